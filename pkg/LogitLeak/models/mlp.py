import logging

import numpy as np

from ..util.errors import ShapeError

logger = logging.getLogger(__name__)


def relu(x):
    return np.maximum(x, 0)


class MLP(object):
    '''Fully-connected network with ReLU hidden layers and a linear output::

        x --> h_1 --> ... --> h_n --> logits

    Args:

        widths:

            Layer widths including input and output, e.g. ``[64, 32, 10]``.
            ``[d, k]`` is multinomial logistic regression.

        seed:

            Seed of the He-normal weight initialization.

        dtype:

            Parameter dtype, float64 for the victim, float32 for the
            side-channel distinguishers.
    '''

    def __init__(self, widths, seed=0, dtype=np.float32, zero_init=False):
        assert len(widths) >= 2, "need at least input and output width"
        self.widths = [int(w) for w in widths]
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)
        self.params = {}
        for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
            if zero_init:
                w = np.zeros((fan_in, fan_out))
            else:
                w = rng.standard_normal((fan_in, fan_out)) * \
                    np.sqrt(2.0 / fan_in)
            self.params['w%d' % i] = w.astype(self.dtype)
            self.params['b%d' % i] = np.zeros(fan_out, dtype=self.dtype)

    @property
    def num_layers(self):
        return len(self.widths) - 1

    @property
    def hidden(self):
        return self.widths[1:-1]

    def weights(self):
        return [(self.params['w%d' % i], self.params['b%d' % i])
                for i in range(self.num_layers)]

    def forward(self, x, keep=False):
        x = np.asarray(x, dtype=self.dtype)
        if x.ndim != 2 or x.shape[1] != self.widths[0]:
            raise ShapeError("network expects (n, %d) inputs, got %s"
                             % (self.widths[0], x.shape))
        cache = [x]
        for i in range(self.num_layers):
            x = x @ self.params['w%d' % i] + self.params['b%d' % i]
            if i < self.num_layers - 1:
                x = relu(x)
            cache.append(x)
        if keep:
            return x, cache
        return x

    def activations(self, x):
        """Outputs of every layer (post-activation), for calibration."""
        return self.forward(x, keep=True)[1][1:]

    def backward(self, cache, grad_out):
        """Parameter gradients and the gradient w.r.t. the input."""
        grads = {}
        g = grad_out
        for i in range(self.num_layers - 1, -1, -1):
            if i < self.num_layers - 1:
                g = g * (cache[i + 1] > 0)
            grads['w%d' % i] = cache[i].T @ g
            grads['b%d' % i] = np.sum(g, axis=0)
            g = g @ self.params['w%d' % i].T
        return grads, g

    def input_gradient(self, x, grad_fn):
        """Gradient of grad_fn's loss w.r.t. x; grad_fn maps logits to
        (loss, dloss/dlogits)."""
        logits, cache = self.forward(x, keep=True)
        loss, grad = grad_fn(logits)
        _, gx = self.backward(cache, grad)
        return loss, gx
