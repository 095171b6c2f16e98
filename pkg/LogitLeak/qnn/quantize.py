import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

Q7_MIN = -128
Q7_MAX = 127
MAX_FRAC_BITS = 7


def as_tensor(x):
    """Float32 tensor with a non-empty shape of positive dimensions."""
    t = np.asarray(x, dtype=np.float32)
    if t.ndim == 0:
        t = t.reshape(1)
    assert all(d >= 1 for d in t.shape), \
        "tensor dimensions must be >= 1, got %s" % (t.shape,)
    return t


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def saturate(x):
    return np.clip(x, Q7_MIN, Q7_MAX)


@dataclass(frozen=True, eq=False)
class QuantizedTensor:
    data: np.ndarray
    frac_bits: int

    def __post_init__(self):
        assert 0 <= self.frac_bits <= MAX_FRAC_BITS, \
            "frac_bits %d outside [0, %d]" % (self.frac_bits, MAX_FRAC_BITS)
        assert self.data.dtype == np.int8, \
            "quantized data must be int8, got %s" % self.data.dtype

    @property
    def shape(self):
        return self.data.shape

    @property
    def scale(self):
        return 2.0 ** (-self.frac_bits)


def quantize_ptq(t, frac_bits):
    """Post-training quantization to q7 with a power-of-two scale.

    Each element becomes round-half-away-from-zero(x * 2**frac_bits),
    saturated to [-128, 127].
    """
    if not 0 <= frac_bits <= MAX_FRAC_BITS:
        raise ValueError("frac_bits must be in [0, %d], got %s"
                         % (MAX_FRAC_BITS, frac_bits))
    t = as_tensor(t)
    q = saturate(round_half_away(t.astype(np.float64) * (1 << frac_bits)))
    return QuantizedTensor(q.astype(np.int8), int(frac_bits))


def dequantize(qt):
    return (qt.data.astype(np.float32) * np.float32(qt.scale))


def representable_range(frac_bits):
    scale = 2.0 ** (-frac_bits)
    return Q7_MIN * scale, Q7_MAX * scale


def choose_frac_bits(t):
    """Largest frac_bits in [0, 7] whose q7 range still covers max|t|."""
    peak = float(np.max(np.abs(t))) if np.size(t) else 0.0
    for frac_bits in range(MAX_FRAC_BITS, -1, -1):
        lo, hi = representable_range(frac_bits)
        if peak <= hi:
            return frac_bits
    logger.debug("max |t| = %s saturates even at frac_bits 0", peak)
    return 0


def quantize_input(pixels):
    """Device input pipeline: pixel p in [0, 255] -> q7 value round(p) - 128.

    This is quantize_ptq of the normalized value (p - 128) / 128 with
    frac_bits 7, so one pixel unit is exactly one quantization step.
    """
    p = np.clip(np.asarray(pixels, dtype=np.float64), 0.0, 255.0)
    q = saturate(round_half_away(p) - 128)
    return QuantizedTensor(q.astype(np.int8), MAX_FRAC_BITS)


def normalize_pixels(pixels):
    return (np.asarray(pixels, dtype=np.float64) - 128.0) / 128.0
