import logging

import numpy as np

from ..leaksim.capture import capture_attack_set
from ..qnn.inference import forward
from ..qnn.model_io import model_hash
from ..qnn.quantize import QuantizedTensor, quantize_input

logger = logging.getLogger(__name__)


def device_input(x):
    """Input pipeline of the device: real pixels in, q7 tensor out."""
    if isinstance(x, QuantizedTensor):
        return x
    return quantize_input(np.asarray(x, dtype=np.float64).reshape(-1))


class TargetDevice(object):
    """Simulated target D*: the victim behind its EM side channel.

    ``acquire`` is all an attacker gets. ``reference_logits`` and
    ``classify`` are evaluation channels used to score the attack and to
    re-verify adversarial examples; the extraction path never calls them.
    """

    def __init__(self, model, cfg):
        self._model = model
        self.cfg = cfg

    @property
    def num_classes(self):
        return self._model.num_classes

    @property
    def input_size(self):
        return self._model.input_size

    def model_hash(self):
        return model_hash(self._model)

    def acquire(self, x, n, seed, input_id=None):
        ts, _ = capture_attack_set(self._model, device_input(x), n, self.cfg,
                                   seed, input_id=input_id)
        return ts

    def reference_logits(self, x):
        return forward(self._model, device_input(x))

    def classify(self, x):
        return forward(self._model, device_input(x)).argmax()
