import logging
import os
from dataclasses import dataclass, field
from typing import Dict

import h5py
import numpy as np

from ..util.errors import DataError

logger = logging.getLogger(__name__)

METRICS_VERSION = 1


@dataclass(eq=False)
class Curve:
    """Success rate and guessing entropy of one scorer on one position."""
    success_rate: np.ndarray
    guessing_entropy: np.ndarray
    repeats: int
    max_traces: int
    seed: int
    true_byte: int

    def __post_init__(self):
        assert len(self.success_rate) == self.max_traces, \
            "success-rate curve has %d entries for %d traces" % (
                len(self.success_rate), self.max_traces)

    @property
    def traces_to_full_success(self):
        """Smallest trace count with success rate 1, -1 if never."""
        hit = np.flatnonzero(np.asarray(self.success_rate) >= 1.0)
        return int(hit[0]) + 1 if len(hit) else -1


@dataclass(eq=False)
class MetricsBundle:
    """Everything an evaluation run measures.

    curves maps (scorer kind, position) to a Curve, snr maps a position
    to its SNR values, histograms maps a logit source to a
    (num_classes, 256) count table, extraction_accuracy maps an attack
    input id to the per-call accuracy of the oracle, objectives maps it
    to the ZOO objective series and summary holds the attack table.
    """
    curves: Dict = field(default_factory=dict)
    snr: Dict = field(default_factory=dict)
    histograms: Dict = field(default_factory=dict)
    extraction_accuracy: Dict = field(default_factory=dict)
    objectives: Dict = field(default_factory=dict)
    summary: Dict = field(default_factory=dict)
    provenance: Dict = field(default_factory=dict)

    def is_empty(self):
        return not (self.curves or self.snr or self.histograms or
                    self.extraction_accuracy or self.objectives or
                    self.summary)

    def update(self, other):
        for name in ('curves', 'snr', 'histograms', 'extraction_accuracy',
                     'objectives', 'summary', 'provenance'):
            getattr(self, name).update(getattr(other, name))
        return self


def _write_series(group, key, values):
    group.create_dataset(key, data=np.asarray(values, dtype=np.float64),
                         compression='gzip')


def save_metrics(bundle, path):
    if os.path.dirname(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
    with h5py.File(path, 'w') as f:
        f.attrs['format_version'] = METRICS_VERSION
        for k, v in bundle.provenance.items():
            f.attrs[k] = v
        curves = f.create_group('curves')
        for (kind, position), curve in sorted(bundle.curves.items()):
            g = curves.create_group("%s/position_%d" % (kind, position))
            _write_series(g, 'success_rate', curve.success_rate)
            _write_series(g, 'guessing_entropy', curve.guessing_entropy)
            g.attrs['repeats'] = curve.repeats
            g.attrs['max_traces'] = curve.max_traces
            g.attrs['seed'] = curve.seed
            g.attrs['true_byte'] = curve.true_byte
        snr = f.create_group('snr')
        for position, values in sorted(bundle.snr.items()):
            _write_series(snr, "position_%d" % position, values)
        hist = f.create_group('histograms')
        for source, counts in sorted(bundle.histograms.items()):
            hist.create_dataset(source, data=np.asarray(counts, np.int64),
                                compression='gzip')
        acc = f.create_group('extraction_accuracy')
        for input_id, values in sorted(bundle.extraction_accuracy.items()):
            _write_series(acc, _key(input_id), values)
        obj = f.create_group('objectives')
        for input_id, values in sorted(bundle.objectives.items()):
            _write_series(obj, _key(input_id), values)
        summary = f.create_group('summary')
        for k, v in bundle.summary.items():
            summary.attrs[k] = v
    logger.info("wrote metrics %s", path)


def load_metrics(path):
    if not os.path.isfile(path):
        raise DataError("missing metrics file %s" % path)
    bundle = MetricsBundle()
    with h5py.File(path, 'r') as f:
        version = int(f.attrs.get('format_version', -1))
        if version < 0 or version > METRICS_VERSION:
            raise DataError("%s has format_version %d, this reader "
                            "supports <= %d" % (path, version,
                                                METRICS_VERSION))
        bundle.provenance = {k: _scalar(v) for k, v in f.attrs.items()
                             if k != 'format_version'}
        for kind, per_kind in f['curves'].items():
            for name, g in per_kind.items():
                position = int(name.split('_')[-1])
                bundle.curves[(kind, position)] = Curve(
                    np.array(g['success_rate']),
                    np.array(g['guessing_entropy']),
                    int(g.attrs['repeats']), int(g.attrs['max_traces']),
                    int(g.attrs['seed']), int(g.attrs['true_byte']))
        for name, ds in f['snr'].items():
            bundle.snr[int(name.split('_')[-1])] = np.array(ds)
        for source, ds in f['histograms'].items():
            bundle.histograms[source] = np.array(ds)
        for input_id, ds in f['extraction_accuracy'].items():
            bundle.extraction_accuracy[input_id] = np.array(ds)
        for input_id, ds in f['objectives'].items():
            bundle.objectives[input_id] = np.array(ds)
        bundle.summary = {k: _scalar(v)
                          for k, v in f['summary'].attrs.items()}
    return bundle


def _scalar(v):
    if isinstance(v, bytes):
        return v.decode('utf-8')
    if isinstance(v, np.generic):
        return v.item()
    return v


def _key(input_id):
    return str(input_id).replace('/', '_')
