import logging

import numpy as np
from scipy import stats

from .metrics import Curve, MetricsBundle
from ..leaksim.simulate import simulate_traces
from ..sca.accumulate import UniformScorer, attack_ranks
from ..util.seeds import derive_rng

logger = logging.getLogger(__name__)


class PositionAttack(object):
    """Attack-set factory for one logit position.

    Each call simulates n fresh traces of the max-search over a fixed
    logit vector and returns the scorer's per-trace log scores.
    """

    def __init__(self, scorer, cfg, logits):
        self.scorer = scorer
        self.cfg = cfg
        self.logits = np.asarray(logits, dtype=np.int8)

    def __call__(self, n, seed):
        rngs = [derive_rng(seed, i) for i in range(n)]
        samples = simulate_traces(np.repeat(self.logits[np.newaxis], n,
                                            axis=0), self.cfg, rngs)
        return self.scorer.log_scores(samples)


class ChanceAttack(object):
    def __call__(self, n, seed):
        return UniformScorer(seed).log_scores(np.zeros((n, 1)))


def attack_logits(cfg, seed):
    """The logit vector attacked by the success-rate curves."""
    raw = derive_rng(seed, 0x7461726765).integers(0, 256,
                                                  size=cfg.num_classes)
    return raw.astype(np.uint8).view(np.int8)


def evaluate_extraction(extractors, max_traces, repeats, seed, logits=None,
                        chance=False, n_jobs=1, positions=None,
                        compare_at=None):
    """Success-rate and guessing-entropy curves per scorer and position.

    extractors maps a scorer kind to a ProfiledExtractor; all of them
    must share one leakage config. With chance set, a uniform scorer is
    evaluated as well under the kind 'uniform'. The summary compares
    the scorers after compare_at traces (10, or max_traces if fewer).
    """
    assert extractors, "no extractor to evaluate"
    fingerprints = {ex.fingerprint for ex in extractors.values()}
    assert len(fingerprints) == 1, \
        "extractors were profiled under different leakage configs"
    cfg = next(iter(extractors.values())).cfg
    logits = attack_logits(cfg, seed) if logits is None else \
        np.asarray(logits, dtype=np.int8)
    positions = range(cfg.num_classes) if positions is None else positions

    bundle = MetricsBundle(provenance={'repeats': int(repeats),
                                       'max_traces': int(max_traces),
                                       'seed': int(seed)})
    for kind, ex in sorted(extractors.items()):
        for position in positions:
            factory = PositionAttack(ex.scorers[position], cfg, logits)
            bundle.curves[(kind, position)] = _curve(
                factory, logits, position, max_traces, repeats, seed,
                n_jobs)
            logger.info("%s position %d: success rate %.2f after %d traces",
                        kind, position,
                        bundle.curves[(kind, position)].success_rate[-1],
                        max_traces)
        for position, profile in enumerate(ex.snr_profiles):
            bundle.snr.setdefault(position, profile.values)
    if chance:
        for position in positions:
            bundle.curves[('uniform', position)] = _curve(
                ChanceAttack(), logits, position, max_traces, repeats, seed,
                n_jobs)
    compare_at = min(10, max_traces) if compare_at is None else compare_at
    bundle.summary.update(compare_scorers(bundle.curves, compare_at))
    return bundle


def _curve(factory, logits, position, max_traces, repeats, seed, n_jobs):
    true_byte = int(logits.view(np.uint8)[position])
    ranks = attack_ranks(factory, true_byte, max_traces, repeats, seed,
                         n_jobs=n_jobs)
    return Curve(success_rate=np.mean(ranks == 0, axis=0),
                 guessing_entropy=np.mean(ranks, axis=0),
                 repeats=int(repeats), max_traces=int(max_traces),
                 seed=int(seed), true_byte=true_byte)


def compare_scorers(curves, traces):
    """Pooled success of every scorer kind after `traces` traces.

    Successes are counted over all evaluated positions and repeats. For
    each ordered pair of kinds, p_<a>_below_<b> is the one-sided binomial
    p-value of "a succeeds less often than b"; a small value means a is
    significantly worse.
    """
    successes, trials = {}, {}
    for (kind, _), curve in sorted(curves.items()):
        if traces > curve.max_traces:
            continue
        hits = int(round(curve.success_rate[traces - 1] * curve.repeats))
        successes[kind] = successes.get(kind, 0) + hits
        trials[kind] = trials.get(kind, 0) + curve.repeats
    summary = {'compared_at_traces': int(traces)}
    for kind in sorted(successes):
        summary['sr_' + kind] = successes[kind] / trials[kind]
        summary['successes_' + kind] = successes[kind]
        summary['trials_' + kind] = trials[kind]
    for a in sorted(successes):
        for b in sorted(successes):
            if a == b:
                continue
            # rates of exactly 0 or 1 make the test degenerate
            rate = np.clip(summary['sr_' + b], 0.5 / trials[a],
                           1.0 - 0.5 / trials[a])
            test = stats.binomtest(successes[a], trials[a], rate,
                                   alternative='less')
            summary['p_%s_below_%s' % (a, b)] = float(test.pvalue)
    if len(successes) > 1:
        logger.info("success after %d traces: %s", traces,
                    ", ".join("%s %.3f" % (k, summary['sr_' + k])
                              for k in sorted(successes)))
    return summary
