import logging

import numpy as np

from ..qnn.inference import LogitVector
from ..qnn.softmax import schedule_operands, EVENT_KINDS, LOAD_LOGIT, \
    LOAD_BASE, STORE_BASE
from .traces import Trace

logger = logging.getLogger(__name__)


def clean_traces(logits, cfg):
    """Noise-free traces of a batch of logit vectors, shape (n, length).

    Each event window carries amplitude * L(operand) for the operand of
    its schedule event; a store window without a store stays at zero.
    """
    z = np.ascontiguousarray(logits, dtype=np.int8)
    if z.ndim == 1:
        z = z[np.newaxis]
    assert z.shape[1] == cfg.num_classes, \
        "logit vectors have %d entries, config expects %d" % (
            z.shape[1], cfg.num_classes)
    logit_ops, base_ops, store = schedule_operands(z)
    table = cfg.leak_table()
    amps = cfg.amplitudes()
    spe = cfg.samples_per_event

    out = np.zeros((z.shape[0], cfg.trace_length), dtype=np.float64)
    starts = cfg.event_windows()
    operands = {LOAD_LOGIT: logit_ops, LOAD_BASE: base_ops,
                STORE_BASE: logit_ops}
    for i in range(cfg.num_classes):
        for k, kind in enumerate(EVENT_KINDS):
            leak = amps[i] * table[operands[kind][:, i]]
            if kind == STORE_BASE:
                leak = leak * store[:, i, np.newaxis]
            out[:, starts[i, k]:starts[i, k] + spe] = leak
    return out


def add_noise(clean, cfg, rng):
    noise = rng.standard_normal(clean.shape[-1])
    return (clean + cfg.noise_sigma * noise).astype(np.float32)


def simulate_trace(z, cfg, rng, input_id=None, labeled=False):
    """One noisy acquisition of the max-search over z.

    The trace carries z as its label only when labeled is set (profiling
    on the open device).
    """
    z = LogitVector(z)
    samples = add_noise(clean_traces(z.values, cfg)[0], cfg, rng)
    return Trace(samples, label=z if labeled else None, input_id=input_id)


def simulate_traces(logits, cfg, rngs):
    """Batch version of simulate_trace with one generator per trace."""
    clean = clean_traces(logits, cfg)
    assert len(rngs) == len(clean), \
        "%d generators for %d traces" % (len(rngs), len(clean))
    return np.stack([add_noise(c, cfg, r) for c, r in zip(clean, rngs)])
