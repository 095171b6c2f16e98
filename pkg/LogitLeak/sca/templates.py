import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .snr import NUM_BYTE_CLASSES, PoiSelection

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, eq=False)
class TemplateModel:
    """One Gaussian (mean, full covariance) per byte class, uniform prior.

    Covariances are kept as lower Cholesky factors. ``reg`` records the
    diagonal loading each class needed (0 when none), classes without
    profiling traces have ``profiled`` unset and score -inf.
    """
    means: np.ndarray          # (256, d)
    chol: np.ndarray           # (256, d, d)
    profiled: np.ndarray       # (256,) bool
    reg: np.ndarray            # (256,)
    counts: np.ndarray         # (256,)
    poi: PoiSelection
    position: Optional[int] = None
    kind: str = field(default='template')

    @property
    def dim(self):
        return self.means.shape[1]

    @property
    def log_det(self):
        diag = np.diagonal(self.chol, axis1=1, axis2=2)
        return 2.0 * np.sum(np.log(np.where(self.profiled[:, np.newaxis],
                                            diag, 1.0)), axis=1)

    def log_scores(self, samples):
        return template_log_scores_batch(self.poi.reduce(samples), self)


def regularized_cholesky(cov, reg_epsilon, max_retries=10):
    """Cholesky factor of cov, loading the diagonal if needed.

    The first attempt is unregularized; then eps * mean(diag) * I is added
    with eps = reg_epsilon escalating x10 per retry (absolute eps when the
    diagonal is zero). Returns (factor, eps used) or (None, eps) when all
    retries fail.
    """
    d = cov.shape[0]
    scale = float(np.mean(np.diag(cov)))
    if not scale > 0:
        scale = 1.0
    eps = 0.0
    for attempt in range(max_retries + 1):
        try:
            return linalg.cholesky(cov + eps * scale * np.eye(d),
                                   lower=True), eps
        except linalg.LinAlgError:
            eps = reg_epsilon if eps == 0.0 else eps * 10.0
    return None, eps


def fit_templates(ts, poi, reg_epsilon=1e-6, position=0, max_retries=10):
    """Sample mean and sample covariance per class over PoI samples."""
    assert ts.labeled, "templates need a labeled trace set"
    x = poi.reduce(ts.samples).astype(np.float64)
    y = ts.byte_labels(position)
    d = x.shape[1]

    means = np.zeros((NUM_BYTE_CLASSES, d))
    chol = np.zeros((NUM_BYTE_CLASSES, d, d))
    profiled = np.zeros(NUM_BYTE_CLASSES, dtype=bool)
    reg = np.zeros(NUM_BYTE_CLASSES)
    counts = np.bincount(y, minlength=NUM_BYTE_CLASSES)
    for c in np.flatnonzero(counts):
        xc = x[y == c]
        means[c] = xc.mean(axis=0)
        if len(xc) >= 2:
            cov = np.atleast_2d(np.cov(xc, rowvar=False))
        else:
            cov = np.zeros((d, d))
        factor, eps = regularized_cholesky(cov, reg_epsilon, max_retries)
        if factor is None:
            logger.warning("class %d: covariance not positive definite "
                           "after %d retries, left unprofiled", c,
                           max_retries)
            continue
        chol[c] = factor
        reg[c] = eps
        profiled[c] = True

    missing = NUM_BYTE_CLASSES - int(np.count_nonzero(profiled))
    if missing:
        logger.warning("logit %d: %d byte classes unprofiled", position,
                       missing)
    logger.info("logit %d: templates over %d samples, %d classes "
                "regularized", position, d, np.count_nonzero(reg))
    return TemplateModel(means, chol, profiled, reg, counts, poi, position)


def template_log_scores_batch(reduced, model):
    """Gaussian log densities of PoI-reduced rows, shape (n, 256)."""
    x = np.atleast_2d(np.asarray(reduced, dtype=np.float64))
    assert x.shape[1] == model.dim, \
        "reduced traces have %d samples, templates expect %d" % (
            x.shape[1], model.dim)
    scores = np.full((x.shape[0], NUM_BYTE_CLASSES), -np.inf)
    log_det = model.log_det
    for c in np.flatnonzero(model.profiled):
        diff = (x - model.means[c]).T
        white = linalg.solve_triangular(model.chol[c], diff, lower=True)
        maha = np.sum(white ** 2, axis=0)
        scores[:, c] = -0.5 * (model.dim * LOG_2PI + log_det[c] + maha)
    return scores


def template_log_scores(trace, model, poi=None):
    """Log-likelihood of every byte class for one trace."""
    poi = model.poi if poi is None else poi
    samples = trace.samples if hasattr(trace, 'samples') else trace
    return template_log_scores_batch(poi.reduce(samples)[np.newaxis],
                                     model)[0]
