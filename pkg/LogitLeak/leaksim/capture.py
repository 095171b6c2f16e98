import logging

import dask
import numpy as np
import toolz as tz

from .simulate import simulate_traces
from .traces import TraceSet
from ..qnn.inference import forward, forward_batch, to_raw
from ..qnn.model_io import model_hash
from ..qnn.quantize import quantize_input
from ..util.seeds import derive_rng

logger = logging.getLogger(__name__)

UNIFORM = 'uniform'
MODEL_DRIVEN = 'model-driven'
LOGIT_SOURCES = (UNIFORM, MODEL_DRIVEN)


def uniform_block(indices, cfg, seed):
    """Logit bytes i.i.d. uniform per position, as on the modified open
    device; trace i draws its bytes and noise from substream (seed, i)."""
    rngs = [derive_rng(seed, i) for i in indices]
    raw = np.stack([r.integers(0, 256, size=cfg.num_classes)
                    for r in rngs]).astype(np.uint8)
    return simulate_traces(raw.view(np.int8), cfg, rngs), raw


def model_block(indices, cfg, seed, model, inputs):
    """Logits of dataset inputs, picked by each trace's substream."""
    rngs = [derive_rng(seed, i) for i in indices]
    choice = [int(r.integers(len(inputs))) for r in rngs]
    q = quantize_input(inputs[choice].reshape(len(choice), -1))
    logits = forward_batch(model, q)
    return simulate_traces(logits, cfg, rngs), to_raw(logits)


def run_blocks(process, n, block_size=4096, num_workers=1):
    """Apply process to index blocks with dask and stack the results.

    Each trace owns its substream, so the output does not depend on the
    block size or the number of workers.
    """
    assert callable(process), "block task is not callable"

    @dask.delayed
    def call_process(indices):
        return process(indices)

    results = [tz.pipe(list(block), call_process)
               for block in tz.partition_all(block_size, range(n))]
    logger.debug("capturing %d traces in %d blocks", n, len(results))
    scheduler = 'threads' if num_workers > 1 else 'synchronous'
    done = dask.compute(*results, scheduler=scheduler,
                        num_workers=num_workers)
    samples = np.concatenate([d[0] for d in done])
    labels = np.concatenate([d[1] for d in done])
    return samples, labels


def capture_profiling_set(logit_source, n, cfg, seed, model=None,
                          inputs=None, block_size=4096, num_workers=1):
    """Labeled traces from the open device.

    logit_source 'uniform' forces uniformly distributed logit bytes;
    'model-driven' runs the model on dataset inputs (pixels) instead,
    reproducing the natural, biased logit distribution.
    """
    assert n >= 1, "need at least one trace"
    logit_source = logit_source.replace('_', '-')
    if logit_source == UNIFORM:
        process = tz.partial(uniform_block, cfg=cfg, seed=seed)
    elif logit_source == MODEL_DRIVEN:
        assert model is not None and inputs is not None, \
            "model-driven capture needs a model and dataset inputs"
        inputs = np.asarray(inputs)
        process = tz.partial(model_block, cfg=cfg, seed=seed, model=model,
                             inputs=inputs)
    else:
        raise ValueError("unknown logit source %r (choose from %s)"
                         % (logit_source, ", ".join(LOGIT_SOURCES)))

    samples, labels = run_blocks(process, n, block_size, num_workers)
    metadata = {'seed': int(seed), 'source': logit_source}
    if model is not None:
        metadata['model_hash'] = model_hash(model)
    logger.info("captured %d %s profiling traces of length %d", n,
                logit_source, cfg.trace_length)
    return TraceSet(samples, labels, fingerprint=cfg.fingerprint(),
                    metadata=metadata)


def capture_attack_set(device, input, n, cfg, seed, input_id=None):
    """n unlabeled traces of one inference on the target device.

    Returns the trace set and, separately, the true LogitVector; the
    latter is for evaluation only and is never attached to the traces.
    """
    assert n >= 1, "need at least one trace"
    truth = forward(device, input)
    rngs = [derive_rng(seed, i) for i in range(n)]
    logits = np.repeat(truth.values[np.newaxis], n, axis=0)
    samples = simulate_traces(logits, cfg, rngs)
    input_id = "input" if input_id is None else str(input_id)
    ts = TraceSet(samples, None, ["%s/%d" % (input_id, i) for i in range(n)],
                  fingerprint=cfg.fingerprint(),
                  metadata={'seed': int(seed)})
    return ts, truth
