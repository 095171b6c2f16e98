import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import log_softmax
from tqdm import tqdm

from .snr import NUM_BYTE_CLASSES, PoiSelection
from ..models.mlp import MLP
from ..util.adam import Adam
from ..util.errors import TrainingDivergedError
from ..util.losses import get_loss

logger = logging.getLogger(__name__)

LOG_FLOOR = math.log(1e-40)
NEURAL_KINDS = ('logreg', 'mlp')

# profiling hyperparameters of the hardware-scale attack
DEFAULT_HYPER = {
    'logreg': {'hidden': [], 'epochs': 20, 'batch_size': 512, 'lr': 1e-5},
    'mlp': {'hidden': [1000, 1000, 100], 'epochs': 20, 'batch_size': 512,
            'lr': 1e-4},
}


@dataclass(eq=False)
class NeuralDistinguisher:
    """Classifier from PoI-reduced traces to the 256 byte classes.

    Inputs are standardized with the profiling mean and deviation before
    entering the network. logreg has no hidden layer.
    """
    kind: str
    net: MLP
    poi: PoiSelection
    mean: np.ndarray
    std: np.ndarray
    record: dict = field(default_factory=dict)
    position: Optional[int] = None

    def __post_init__(self):
        assert self.kind in NEURAL_KINDS, "unknown kind %r" % self.kind
        assert self.net.widths[-1] == NUM_BYTE_CLASSES, \
            "output width must be %d" % NUM_BYTE_CLASSES
        assert self.kind != 'logreg' or self.net.num_layers == 1, \
            "logistic regression has no hidden layers"

    def standardize(self, reduced):
        return ((np.asarray(reduced, dtype=np.float32) - self.mean)
                / self.std).astype(np.float32)

    def raw_log_probs(self, reduced):
        """Unclamped log softmax outputs, shape (n, 256)."""
        logits = self.net.forward(self.standardize(np.atleast_2d(reduced)))
        return log_softmax(logits.astype(np.float64), axis=1)

    def log_scores(self, samples):
        return np.maximum(self.raw_log_probs(self.poi.reduce(samples)),
                          LOG_FLOOR)


def hyper_for(kind, **overrides):
    hyper = dict(DEFAULT_HYPER[kind])
    hyper.update({k: v for k, v in overrides.items() if v is not None})
    if kind == 'logreg':
        hyper['hidden'] = []
    return hyper


def train_distinguisher(ts, poi, kind='mlp', position=0, seed=0,
                        epochs=None, batch_size=None, lr=None, hidden=None,
                        validation=0.1, progress=False):
    """Fit a logreg or MLP distinguisher on one logit position.

    Minimizes categorical cross-entropy with Adam; 10% of the profiling
    traces are held out to report validation loss and accuracy. A NaN
    loss aborts with the learning rate, epoch and batch index.
    """
    assert ts.labeled, "profiling needs a labeled trace set"
    assert kind in NEURAL_KINDS, "unknown distinguisher kind %r" % kind
    hyper = hyper_for(kind, epochs=epochs, batch_size=batch_size, lr=lr,
                      hidden=hidden)
    rng = np.random.default_rng(seed)

    x = poi.reduce(ts.samples).astype(np.float32)
    y = ts.byte_labels(position)
    perm = rng.permutation(len(x))
    n_val = int(len(x) * validation) if len(x) >= 10 else 0
    val_idx, train_idx = perm[:n_val], perm[n_val:]

    mean = x[train_idx].mean(axis=0)
    std = x[train_idx].std(axis=0)
    std[std == 0] = 1.0
    widths = [x.shape[1]] + list(hyper['hidden']) + [NUM_BYTE_CLASSES]
    net = MLP(widths, seed=int(rng.integers(2 ** 31)), dtype=np.float32)
    d = NeuralDistinguisher(kind, net, poi, mean.astype(np.float32),
                            std.astype(np.float32), position=position)

    xs = d.standardize(x)
    opt = Adam(lr=hyper['lr'])
    loss = float('nan')
    bs = int(hyper['batch_size'])
    for epoch in tqdm(range(hyper['epochs']), disable=not progress,
                      desc="logit %d" % position):
        order = rng.permutation(train_idx)
        for batch, start in enumerate(range(0, len(order), bs)):
            idx = order[start:start + bs]
            logits, cache = net.forward(xs[idx], keep=True)
            loss, grad = get_loss(y[idx], logits, "ssce", kind)
            if not np.isfinite(loss):
                raise TrainingDivergedError(hyper['lr'], epoch, batch)
            grads, _ = net.backward(cache, grad.astype(np.float32))
            opt.step(net.params, grads)
        if logger.isEnabledFor(logging.DEBUG) and n_val:
            val_loss, _ = get_loss(y[val_idx], net.forward(xs[val_idx]),
                                   "ssce", kind)
            logger.debug("logit %d epoch %d: loss %.4f, val loss %.4f",
                         position, epoch, loss, val_loss)

    d.record = {
        'epochs': int(hyper['epochs']),
        'batch_size': bs,
        'lr': float(hyper['lr']),
        'seed': int(seed),
        'final_loss': float(loss),
    }
    if n_val:
        val_logits = net.forward(xs[val_idx])
        d.record['val_loss'] = float(get_loss(y[val_idx], val_logits,
                                              "ssce", kind)[0])
        d.record['val_accuracy'] = float(
            np.mean(np.argmax(val_logits, axis=1) == y[val_idx]))
    logger.info("logit %d: %s trained, loss %.4f, val accuracy %s",
                position, kind, loss, d.record.get('val_accuracy'))
    return d


def neural_log_scores(trace, d, poi=None):
    """Clamped log probabilities of the byte classes for one trace."""
    poi = d.poi if poi is None else poi
    samples = trace.samples if hasattr(trace, 'samples') else trace
    return np.maximum(d.raw_log_probs(poi.reduce(samples)[np.newaxis])[0],
                      LOG_FLOOR)
