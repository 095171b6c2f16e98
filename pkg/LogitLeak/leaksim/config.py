import hashlib
import json
import logging
import math
from dataclasses import dataclass, field, asdict
from typing import Tuple

import numpy as np

from ..qnn.softmax import EVENT_KINDS
from ..util.errors import ConfigError
from ..util.seeds import derive_rng

logger = logging.getLogger(__name__)

LEAK_MODELS = ('hamming_weight', 'identity_byte', 'weighted_bits')
EVENTS_PER_INDEX = len(EVENT_KINDS)

_HW = np.array([bin(b).count('1') for b in range(256)], dtype=np.float64)
_BITS = ((np.arange(256)[:, np.newaxis] >> np.arange(8)) & 1).astype(
    np.float64)


def hamming_weight(b):
    return _HW[np.asarray(b, dtype=np.uint8)]


@dataclass(frozen=True)
class LeakageConfig:
    """Acquisition chain of the simulated EM measurement.

    Every schedule index owns one window per event kind (load_logit,
    load_base, store_base), each samples_per_event long and separated by
    pad_samples of pure noise. The store window exists whether or not the
    store happens, so trace geometry never depends on the data.
    """
    samples_per_event: int = 5
    noise_sigma: float = 1.0
    leak_model: str = 'hamming_weight'
    leak_amplitude: float = 1.0
    pad_samples: int = 3
    rng_seed: int = 0
    position_amplitudes: Tuple[float, ...] = field(default=())
    num_classes: int = 10

    def __post_init__(self):
        object.__setattr__(self, 'position_amplitudes',
                           tuple(float(a) for a in self.position_amplitudes))
        if int(self.samples_per_event) < 1:
            raise ConfigError("samples_per_event must be >= 1, got %s"
                              % self.samples_per_event)
        if int(self.pad_samples) < 0:
            raise ConfigError("pad_samples must be >= 0, got %s"
                              % self.pad_samples)
        if not self.noise_sigma >= 0 or not math.isfinite(self.noise_sigma):
            raise ConfigError("noise_sigma must be finite and >= 0, got %s"
                              % self.noise_sigma)
        if self.leak_model not in LEAK_MODELS:
            raise ConfigError("unknown leak model %r (choose from %s)"
                              % (self.leak_model, ", ".join(LEAK_MODELS)))
        if self.position_amplitudes and \
                len(self.position_amplitudes) != self.num_classes:
            raise ConfigError("position_amplitudes lists %d values for %d "
                              "logit positions"
                              % (len(self.position_amplitudes),
                                 self.num_classes))

    @classmethod
    def from_dict(cls, section, rng_seed, num_classes=10):
        return cls(samples_per_event=int(section['samples_per_event']),
                   noise_sigma=float(section['noise_sigma']),
                   leak_model=section['leak_model'],
                   leak_amplitude=float(section['leak_amplitude']),
                   pad_samples=int(section['pad_samples']),
                   rng_seed=int(rng_seed),
                   position_amplitudes=section.get('position_amplitudes', ()),
                   num_classes=num_classes)

    def to_dict(self):
        d = asdict(self)
        d['position_amplitudes'] = list(self.position_amplitudes)
        return d

    def replace(self, **kwargs):
        d = asdict(self)
        d.update(kwargs)
        return LeakageConfig(**d)

    @property
    def num_events(self):
        return EVENTS_PER_INDEX * self.num_classes

    @property
    def trace_length(self):
        return self.num_events * self.samples_per_event + \
            (self.num_events + 1) * self.pad_samples

    def event_start(self, index, kind):
        e = EVENTS_PER_INDEX * index + EVENT_KINDS.index(kind)
        return self.pad_samples + e * (self.samples_per_event +
                                       self.pad_samples)

    def window(self, index, kind):
        start = self.event_start(index, kind)
        return slice(start, start + self.samples_per_event)

    def event_windows(self):
        """Window start per (logit index, event kind), shape (classes, 3)."""
        return np.array([[self.event_start(i, k) for k in EVENT_KINDS]
                         for i in range(self.num_classes)], dtype=np.int64)

    def fingerprint(self):
        text = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def amplitudes(self):
        if self.position_amplitudes:
            a = np.asarray(self.position_amplitudes, dtype=np.float64)
        else:
            a = np.ones(self.num_classes)
        return a * self.leak_amplitude

    def bit_weights(self):
        """Per-sample weights of the 8 operand bits (weighted_bits model)."""
        rng = derive_rng(self.rng_seed, 0x6c65616b)
        return rng.standard_normal((self.samples_per_event, 8)) / math.sqrt(8)

    def leak_table(self):
        """Noise-free leak of every byte value, shape (256, samples)."""
        spe = self.samples_per_event
        if self.leak_model == 'hamming_weight':
            return np.repeat(_HW[:, np.newaxis], spe, axis=1)
        if self.leak_model == 'identity_byte':
            return np.repeat((np.arange(256) / 255.0)[:, np.newaxis], spe,
                             axis=1)
        return _BITS @ self.bit_weights().T


def signal_variance(cfg):
    """Per-sample variance of the leak over uniformly drawn bytes."""
    return np.var(cfg.leak_table(), axis=0)


def calibrate_sigma(cfg, target_snr, index=None):
    """Noise level giving peak SNR target_snr at a load_logit window.

    With bytes drawn uniformly, the SNR of a window sample is
    a^2 Var_y(L(y)) / sigma^2, so sigma follows in closed form. index
    selects the position whose amplitude is used (the strongest if None).
    """
    if not target_snr > 0:
        raise ConfigError("target SNR must be > 0, got %s" % target_snr)
    amps = cfg.amplitudes()
    a = np.max(np.abs(amps)) if index is None else abs(amps[index])
    sigma = a * math.sqrt(float(np.max(signal_variance(cfg))) / target_snr)
    logger.info("sigma %.4f gives peak SNR %.3g (%s)", sigma, target_snr,
                cfg.leak_model)
    return sigma
