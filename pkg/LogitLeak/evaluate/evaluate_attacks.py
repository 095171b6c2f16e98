import logging

import numpy as np

from .metrics import MetricsBundle

logger = logging.getLogger(__name__)


def _rate(flags):
    return 100.0 * float(np.mean(flags)) if len(flags) else 0.0


def _mean(values):
    return float(np.mean(values)) if len(values) else float('nan')


def summarize_attacks(zoo_reports, bim_reports=(), failures=0):
    """Attack summary table.

    Success and transfer rates are percentages over all attempted inputs,
    failed runs included. Distortion is averaged over successes only,
    queries and traces over all completed runs.
    """
    zoo_reports = list(zoo_reports)
    bim_reports = list(bim_reports)
    attempted = len(zoo_reports) + failures
    ok = [r for r in zoo_reports if r.success]
    summary = {
        'num_inputs': attempted,
        'failures': int(failures),
        'success_rate': 100.0 * len(ok) / attempted if attempted else 0.0,
        'mean_distortion': _mean([r.distortion for r in ok]),
        'mean_queries': _mean([r.queries for r in zoo_reports]),
        'mean_traces': _mean([r.traces for r in zoo_reports]),
        'mean_iterations': _mean([r.iterations for r in zoo_reports]),
        'all_verified': all(r.verified for r in ok),
    }
    if bim_reports:
        transferred = [r for r in bim_reports if r.success]
        summary['transfer_rate'] = _rate([r.success for r in bim_reports])
        summary['bim_mean_distortion'] = _mean(
            [r.distortion for r in transferred])
    logger.info("attacks: %.1f%% success on %d inputs, mean L2 %.3f",
                summary['success_rate'], attempted,
                summary['mean_distortion'])
    return summary


def attack_metrics(zoo_reports, bim_reports=(), failures=0, provenance=None):
    """MetricsBundle holding the summary and per-input series."""
    bundle = MetricsBundle(provenance=dict(provenance or {}))
    bundle.summary = summarize_attacks(zoo_reports, bim_reports, failures)
    for r in zoo_reports:
        bundle.objectives[r.input_id] = np.asarray(r.objective_log)
        if len(r.extraction_accuracy):
            bundle.extraction_accuracy[r.input_id] = \
                np.asarray(r.extraction_accuracy)
    return bundle


def check_trace_accounting(report, n):
    """Traces spent by one attack stay within n per oracle query."""
    return report.traces <= n * report.queries
