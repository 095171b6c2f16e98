import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..util.errors import DataError, EmptyPoiError

logger = logging.getLogger(__name__)

NUM_BYTE_CLASSES = 256


@dataclass(frozen=True, eq=False)
class SnrProfile:
    """Per-sample SNR for the raw byte of one logit position.

    Samples whose within-class variance is zero while the class means
    differ hold +inf and are flagged in ``infinite``.
    """
    values: np.ndarray
    position: Optional[int] = None
    num_classes_used: int = 0

    @property
    def infinite(self):
        return np.isinf(self.values)

    @property
    def peak(self):
        return float(np.max(self.values)) if self.values.size else 0.0

    @property
    def peak_index(self):
        return int(np.argmax(self.values))

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True, eq=False)
class PoiSelection:
    indices: np.ndarray
    threshold: float

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        assert idx.ndim == 1 and np.all(np.diff(idx) > 0), \
            "PoI indices must be strictly increasing"
        object.__setattr__(self, 'indices', idx)

    def __len__(self):
        return len(self.indices)

    def reduce(self, samples):
        """Keep the PoI columns of a (n, length) or (length,) array."""
        samples = np.asarray(samples)
        return samples[..., self.indices]


def class_statistics(samples, classes, num_classes=NUM_BYTE_CLASSES):
    """Counts, means and population variances per class, float64."""
    x = np.asarray(samples, dtype=np.float64)
    y = np.asarray(classes, dtype=np.int64)
    order = np.argsort(y, kind='stable')
    x, y = x[order], y[order]
    counts = np.bincount(y, minlength=num_classes)
    present = np.flatnonzero(counts)
    starts = np.concatenate([[0], np.cumsum(counts[present])[:-1]])

    means = np.zeros((num_classes,) + x.shape[1:])
    variances = np.zeros_like(means)
    if len(present):
        n_c = counts[present].reshape((-1,) + (1,) * (x.ndim - 1))
        means[present] = np.add.reduceat(x, starts, axis=0) / n_c
        centered = x - np.repeat(means[present], counts[present], axis=0)
        variances[present] = np.add.reduceat(centered ** 2, starts,
                                             axis=0) / n_c
    return counts, means, variances


def empirical_snr(samples, classes, num_classes=NUM_BYTE_CLASSES):
    """Var over classes of class means / mean over classes of variances.

    Classes with fewer than two traces take part in neither term.
    """
    counts, means, variances = class_statistics(samples, classes, num_classes)
    used = counts >= 2
    if np.count_nonzero(used) < 2:
        raise DataError("SNR needs at least 2 classes with 2 traces each, "
                        "got %d" % np.count_nonzero(used))
    signal = np.var(means[used], axis=0)
    noise = np.mean(variances[used], axis=0)
    # rounding leaves tiny variances where the traces are noise-free
    tol = 1e-12 * np.mean(means[used] ** 2, axis=0) + 1e-30
    noisy = noise > tol
    snr = np.zeros_like(signal)
    np.divide(signal, noise, out=snr, where=noisy)
    degenerate = ~noisy & (signal > tol)
    snr[degenerate] = np.inf
    if np.any(degenerate):
        logger.warning("%d samples without within-class noise, SNR set to "
                       "+inf", np.count_nonzero(degenerate))
    return snr, int(np.count_nonzero(used))


def compute_snr(ts, position):
    """SNR profile of a labeled trace set, grouped on one logit byte."""
    assert ts.labeled, "SNR needs a labeled trace set"
    snr, used = empirical_snr(ts.samples, ts.byte_labels(position))
    profile = SnrProfile(snr, position, used)
    logger.info("logit %d: peak SNR %.4g at sample %d", position,
                profile.peak, profile.peak_index)
    return profile


def select_poi(snr, threshold, max_points=None):
    """All samples with SNR >= threshold, in order.

    max_points keeps only the strongest samples among those.
    """
    if not threshold > 0:
        raise ValueError("SNR threshold must be > 0, got %s" % threshold)
    indices = np.flatnonzero(snr.values >= threshold)
    if len(indices) == 0:
        raise EmptyPoiError(threshold, snr.peak, snr.position)
    if max_points is not None and len(indices) > max_points:
        strongest = np.argsort(-snr.values[indices], kind='stable')
        indices = np.sort(indices[strongest[:max_points]])
    logger.debug("threshold %g selects %d samples", threshold, len(indices))
    return PoiSelection(indices, float(threshold))
