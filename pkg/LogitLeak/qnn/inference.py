import logging
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .quantize import QuantizedTensor, saturate
from ..util.errors import ShapeError

logger = logging.getLogger(__name__)

ACTIVATIONS = ('relu', 'none')


@dataclass(frozen=True)
class LogitVector:
    """Signed 8-bit confidence scores; raw bytes > 127 are negative logits."""
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values',
                           np.asarray(self.values, dtype=np.int8).copy())

    @classmethod
    def from_raw(cls, raw):
        return cls(np.asarray(raw, dtype=np.uint8).view(np.int8))

    @property
    def raw(self):
        return self.values.view(np.uint8)

    @property
    def num_classes(self):
        return len(self.values)

    def __array__(self, dtype=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        return np.array_equal(self.values, np.asarray(other, dtype=np.int8))

    def __hash__(self):
        return hash(self.values.tobytes())

    def argmax(self):
        return int(np.argmax(self.values))


def to_raw(logits):
    return np.ascontiguousarray(logits, dtype=np.int8).view(np.uint8)


def from_raw(raw):
    return np.ascontiguousarray(raw, dtype=np.uint8).view(np.int8)


@dataclass(frozen=True, eq=False)
class QuantizedLayer:
    weight: QuantizedTensor   # (out, in)
    bias: QuantizedTensor     # (out,)
    activation: str
    out_frac_bits: int

    def __post_init__(self):
        assert self.activation in ACTIVATIONS, \
            "unknown activation %r" % self.activation
        assert self.weight.data.ndim == 2 and \
            self.bias.shape == (self.weight.shape[0],), \
            "weight %s and bias %s are not composable" % (
                self.weight.shape, self.bias.shape)


@dataclass(frozen=True, eq=False)
class QuantizedModel:
    layers: List[QuantizedLayer]
    input_frac_bits: int
    num_classes: int = field(default=10)

    def __post_init__(self):
        assert len(self.layers) >= 1, "model needs at least one layer"
        for a, b in zip(self.layers[:-1], self.layers[1:]):
            assert a.weight.shape[0] == b.weight.shape[1], \
                "layer shapes %s -> %s are not composable" % (
                    a.weight.shape, b.weight.shape)
        assert self.layers[-1].weight.shape[0] == self.num_classes, \
            "final layer emits %d values, expected %d classes" % (
                self.layers[-1].weight.shape[0], self.num_classes)

    @property
    def input_size(self):
        return self.layers[0].weight.shape[1]


def shift_round(acc, shift):
    """Arithmetic shift with round-half-up for right shifts, as NNOM does."""
    if shift > 0:
        return (acc + (1 << (shift - 1))) >> shift
    if shift < 0:
        return acc << (-shift)
    return acc


def dense_q7(x, layer, in_frac_bits):
    """One q7 fully-connected layer on a batch of int8 rows."""
    w = layer.weight.data.astype(np.int64)
    acc_frac = layer.weight.frac_bits + in_frac_bits
    acc = x.astype(np.int64) @ w.T
    bias = shift_round(layer.bias.data.astype(np.int64),
                       layer.bias.frac_bits - acc_frac)
    acc = acc + bias
    out = saturate(shift_round(acc, acc_frac - layer.out_frac_bits))
    if layer.activation == 'relu':
        out = np.maximum(out, 0)
    return out.astype(np.int8)


def forward_batch(model, inputs):
    """Logits for a batch of quantized inputs, shape (n, num_classes)."""
    if isinstance(inputs, QuantizedTensor):
        if inputs.frac_bits != model.input_frac_bits:
            raise ShapeError("input has frac_bits %d, model expects %d"
                             % (inputs.frac_bits, model.input_frac_bits))
        x = inputs.data
    else:
        x = np.asarray(inputs, dtype=np.int8)
    x = x.reshape(x.shape[0], -1) if x.ndim > 1 else x.reshape(1, -1)
    if x.shape[1] != model.input_size:
        raise ShapeError("input has %d values, first layer expects %d"
                         % (x.shape[1], model.input_size))

    frac_bits = model.input_frac_bits
    for layer in model.layers:
        x = dense_q7(x, layer, frac_bits)
        frac_bits = layer.out_frac_bits
    return x


def forward(model, input):
    """Pre-softmax logits of one input as a LogitVector."""
    data = input.data if isinstance(input, QuantizedTensor) else \
        np.asarray(input, dtype=np.int8)
    if data.size != model.input_size:
        raise ShapeError("input has shape %s (%d values), first layer "
                         "expects %d" % (data.shape, data.size,
                                         model.input_size))
    if isinstance(input, QuantizedTensor):
        input = QuantizedTensor(data.reshape(1, -1), input.frac_bits)
    else:
        input = data.reshape(1, -1)
    return LogitVector(forward_batch(model, input)[0])


def classify(model, inputs):
    return np.argmax(forward_batch(model, inputs), axis=1)
