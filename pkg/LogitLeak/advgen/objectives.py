import math

import numpy as np

from ..util.errors import ShapeError

PROB_FLOOR = 1e-40


def _margin(scores, label, kappa, targeted):
    s = np.asarray(scores, dtype=np.float64)
    assert 0 <= label < len(s), "class %d outside [0, %d)" % (label, len(s))
    other = np.max(np.delete(s, label))
    if targeted:
        return max(other - s[label], -kappa)
    return max(s[label] - other, -kappa)


def cw_logit_objective(z, target, kappa=0.0, targeted=True):
    """max(max_{i != t} z[i] - z[t], -kappa) on logits.

    With targeted unset, target is the true class and the margin is
    flipped: max(z[y] - max_{i != y} z[i], -kappa).
    """
    return float(_margin(z, target, kappa, targeted))


def zoo_log_objective(probs, target, kappa=0.0, targeted=True):
    """The logit margin evaluated on log probabilities; zero entries are
    clamped to 1e-40 before the log."""
    logp = np.log(np.maximum(np.asarray(probs, dtype=np.float64),
                             PROB_FLOOR))
    return float(_margin(logp, target, kappa, targeted))


def distortion_l2(x0, x):
    """Euclidean norm of x - x0 in pixel units."""
    x0 = np.asarray(x0, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x0.shape != x.shape:
        raise ShapeError("cannot compare inputs of shape %s and %s"
                         % (x0.shape, x.shape))
    return math.sqrt(float(np.sum((x - x0) ** 2)))
