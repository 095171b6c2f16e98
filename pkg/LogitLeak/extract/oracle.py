import logging

import numpy as np

from .device import TargetDevice
from .extractor import extract_logits
from ..qnn.softmax import nnom_softmax
from ..util.seeds import derive_seed

logger = logging.getLogger(__name__)


class LogitOracle(object):
    """Black-box access to logits and probabilities through the side
    channel.

    Every call acquires fresh traces (substream (seed, call index)) and
    runs the profiled extraction. ``traces_consumed`` is the global cost
    counter: calls x n with one shared capture per call.
    """
    exact = False

    def __init__(self, extractor, device, seed, n=None,
                 record_accuracy=False):
        self.extractor = extractor
        self.device = device
        self.seed = seed
        self.n = extractor.traces_per_query if n is None else int(n)
        self.record_accuracy = record_accuracy
        self.calls = 0
        self.traces_consumed = 0
        # fraction of correctly extracted positions per call, evaluation
        # mode only
        self.history = []

    def __call__(self, x):
        result = extract_logits(self.device, x, self.extractor,
                                self.device.cfg,
                                derive_seed(self.seed, self.calls), self.n,
                                evaluate=self.record_accuracy)
        self.calls += 1
        self.traces_consumed += result.traces_consumed
        if self.record_accuracy:
            self.history.append(float(np.mean(result.position_correct)))
        probs = nnom_softmax(result.estimate.values)
        return result.estimate, probs, result.traces_consumed


class ExactLogitOracle(object):
    """Same interface, true logits of the model, no traces."""
    exact = True

    def __init__(self, device):
        self.device = device
        self.calls = 0
        self.traces_consumed = 0
        self.history = []

    def __call__(self, x):
        z = self.device.reference_logits(x)
        self.calls += 1
        return z, nnom_softmax(z.values), 0


def logit_oracle(ex, target, cfg, seed, n=None, record_accuracy=False):
    """Side-channel oracle on a target model or device under cfg."""
    device = target if isinstance(target, TargetDevice) else \
        TargetDevice(target, cfg)
    return LogitOracle(ex, device, seed, n, record_accuracy)
