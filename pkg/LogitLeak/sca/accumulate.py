import logging

import numpy as np
from joblib import Parallel, delayed
from scipy.special import log_softmax

from .snr import NUM_BYTE_CLASSES
from ..util.seeds import derive_rng, derive_seed

logger = logging.getLogger(__name__)


class UniformScorer(object):
    """Chance-level reference: random log scores, independent of traces."""
    kind = 'uniform'

    def __init__(self, seed):
        self.rng = derive_rng(seed, 0x756e69)

    def log_scores(self, samples):
        n = np.atleast_2d(samples).shape[0]
        return log_softmax(self.rng.standard_normal((n, NUM_BYTE_CLASSES)),
                           axis=1)


def per_trace_scores(traces, scorer):
    samples = traces.samples if hasattr(traces, 'samples') else traces
    return scorer.log_scores(np.atleast_2d(samples))


def map_accumulate(traces, scorer):
    """Sum of per-trace log scores and its argmax (lowest index on ties)."""
    scores = per_trace_scores(traces, scorer)
    assert len(scores) >= 1, "need at least one trace"
    acc = np.sum(scores, axis=0)
    return int(np.argmax(acc)), acc


def rank_of(acc, true_byte):
    """Position of true_byte in the MAP ordering; 0 means recovered.

    Classes scoring higher, or equal with a lower index, rank first.
    """
    acc = np.asarray(acc)
    value = acc[true_byte]
    return int(np.count_nonzero(acc > value) +
               np.count_nonzero(acc[:true_byte] == value))


def cumulative_ranks(scores, true_byte):
    """Rank of true_byte after accumulating the first k+1 traces."""
    acc = np.cumsum(scores, axis=0)
    return np.array([rank_of(a, true_byte) for a in acc], dtype=np.int64)


def _one_attack(attack_factory, true_byte, max_traces, seed, repeat):
    scores = attack_factory(max_traces, derive_seed(seed, repeat))
    assert scores.shape == (max_traces, NUM_BYTE_CLASSES), \
        "attack returned scores of shape %s" % (scores.shape,)
    return cumulative_ranks(scores, true_byte)


def attack_ranks(attack_factory, true_byte, max_traces, repeats, seed,
                 n_jobs=1):
    """Rank evolution over R independent attacks, shape (R, max_traces).

    attack_factory(n, seed) draws a fresh attack set of n traces and
    returns its per-trace log scores; every repeat gets its own seed.
    """
    assert repeats >= 1, "need at least one repeat"
    rows = Parallel(n_jobs=n_jobs)(
        delayed(_one_attack)(attack_factory, true_byte, max_traces, seed, r)
        for r in range(repeats))
    return np.stack(rows)


def success_rate_curve(attack_factory, true_byte, max_traces, repeats, seed,
                       n_jobs=1, ranks=None):
    """Entry k: fraction of repeats recovering true_byte from k+1 traces."""
    if ranks is None:
        ranks = attack_ranks(attack_factory, true_byte, max_traces, repeats,
                             seed, n_jobs)
    return np.mean(ranks == 0, axis=0)


def guessing_entropy_curve(attack_factory, true_byte, max_traces, repeats,
                           seed, n_jobs=1, ranks=None):
    """Entry k: mean rank of true_byte after k+1 traces."""
    if ranks is None:
        ranks = attack_ranks(attack_factory, true_byte, max_traces, repeats,
                             seed, n_jobs)
    return np.mean(ranks, axis=0)


def traces_to_disclosure(rank_evolution):
    """Traces after which the rank stays 0; -1 if that never happens."""
    rank_evolution = np.asarray(rank_evolution)
    failed = np.flatnonzero(rank_evolution > 0)
    if len(failed) == 0:
        return 1
    if failed[-1] == len(rank_evolution) - 1:
        return -1
    return int(failed[-1]) + 2
