import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..qnn.inference import LogitVector
from ..util.errors import ConfigError, ShapeError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Trace:
    samples: np.ndarray
    label: Optional[LogitVector] = None
    input_id: Optional[str] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float32)
        assert samples.ndim == 1, "trace samples must be 1-d"
        assert np.all(np.isfinite(samples)), "trace holds non-finite samples"
        object.__setattr__(self, 'samples', samples)


class TraceSet(object):
    """Equal-length traces stored as one (n, length) float32 matrix.

    Labels, when present, are the raw logit bytes, one row per trace.
    Profiling sets are labeled on every trace, attack sets on none.
    """

    def __init__(self, samples, labels=None, input_ids=None,
                 fingerprint=None, metadata=None):
        samples = np.asarray(samples, dtype=np.float32)
        if samples.ndim != 2:
            raise ShapeError("trace set needs (n, length) samples, got %s"
                             % (samples.shape,))
        if labels is not None:
            # signed logits and raw bytes both map to the raw byte
            labels = (np.asarray(labels).astype(np.int64) & 0xFF).astype(
                np.uint8)
            if labels.ndim != 2 or labels.shape[0] != samples.shape[0]:
                raise ShapeError("labels %s do not match %d traces"
                                 % (labels.shape, samples.shape[0]))
        self.samples = samples
        self.labels = labels
        self.input_ids = list(input_ids) if input_ids is not None else \
            [str(i) for i in range(len(samples))]
        self.fingerprint = fingerprint
        self.metadata = dict(metadata or {})

    def __len__(self):
        return self.samples.shape[0]

    def __getitem__(self, i):
        label = None if self.labels is None else \
            LogitVector.from_raw(self.labels[i])
        return Trace(self.samples[i], label, self.input_ids[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @property
    def traces(self):
        return list(self)

    @property
    def trace_length(self):
        return self.samples.shape[1]

    @property
    def labeled(self):
        return self.labels is not None

    @property
    def num_classes(self):
        return 0 if self.labels is None else self.labels.shape[1]

    @classmethod
    def from_traces(cls, traces, fingerprint=None, metadata=None):
        traces = list(traces)
        assert traces, "need at least one trace"
        lengths = set(len(t.samples) for t in traces)
        if len(lengths) != 1:
            raise ShapeError("traces have differing lengths %s"
                             % sorted(lengths))
        has_label = [t.label is not None for t in traces]
        if any(has_label) and not all(has_label):
            raise ShapeError("either every trace carries a label or none")
        labels = np.stack([t.label.raw for t in traces]) \
            if all(has_label) else None
        return cls(np.stack([t.samples for t in traces]), labels,
                   [t.input_id for t in traces], fingerprint, metadata)

    def byte_labels(self, position):
        """Class variable of one logit position: its raw byte, 0..255."""
        assert self.labeled, "trace set carries no labels"
        return self.labels[:, position].astype(np.int64)

    def concat(self, other):
        if self.fingerprint != other.fingerprint:
            raise ConfigError("cannot concatenate trace sets captured under "
                              "different configs")
        if self.trace_length != other.trace_length:
            raise ShapeError("trace lengths differ: %d vs %d"
                             % (self.trace_length, other.trace_length))
        if self.labeled != other.labeled:
            raise ShapeError("cannot mix labeled and unlabeled traces")
        labels = None if self.labels is None else \
            np.concatenate([self.labels, other.labels])
        return TraceSet(np.concatenate([self.samples, other.samples]),
                        labels, self.input_ids + other.input_ids,
                        self.fingerprint, self.metadata)

    def check_fingerprint(self, fingerprint):
        if self.fingerprint is not None and self.fingerprint != fingerprint:
            raise ConfigError("trace set was captured under config %s, "
                              "expected %s" % (self.fingerprint[:12],
                                               fingerprint[:12]))
