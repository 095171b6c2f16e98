import numpy as np

from .quantize import normalize_pixels
from ..models.mlp import MLP

PIXEL_SCALE = 1.0 / 128


class FloatMLP(object):
    """Pre-quantization copy of the victim, addressed in pixel units.

    The white-box baseline differentiates through this network; the
    quantized victim never exposes its internals.
    """

    def __init__(self, net):
        assert isinstance(net, MLP), type(net)
        self.net = net

    @property
    def input_size(self):
        return self.net.widths[0]

    def logits(self, pixels):
        x = np.asarray(pixels, dtype=np.float64)
        single = x.ndim == 1
        x = normalize_pixels(x.reshape(-1, self.input_size)).astype(
            self.net.dtype)
        z = self.net.forward(x)
        return z[0] if single else z

    def input_gradient(self, pixels, grad_fn):
        """Loss and its gradient w.r.t. the pixels of a single input."""
        x = normalize_pixels(np.asarray(pixels, dtype=np.float64).reshape(
            1, self.input_size)).astype(self.net.dtype)
        loss, gx = self.net.input_gradient(x, grad_fn)
        return loss, gx[0] * PIXEL_SCALE
