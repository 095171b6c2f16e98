import numpy as np
import pytest

from LogitLeak.extract import TargetDevice, profile
from LogitLeak.leaksim import LeakageConfig, calibrate_sigma
from LogitLeak.models import MLP
from LogitLeak.qnn import QuantizedTensor, QuantizedLayer, QuantizedModel, \
    FloatMLP, make_digits, train_victim


def make_toy_model():
    """Two pixels, ten classes.

    Class 0 scores round((q0 - q1) / 2), class 1 the opposite and every
    other class sits at -128, so the decision flips where the two pixels
    cross.
    """
    w = np.zeros((10, 2), dtype=np.int8)
    w[0] = [64, -64]
    w[1] = [-64, 64]
    b = np.full(10, -128, dtype=np.int8)
    b[:2] = 0
    layer = QuantizedLayer(QuantizedTensor(w, 0), QuantizedTensor(b, 0),
                           'none', 0)
    return QuantizedModel([layer], 7, 10)


def make_toy_shadow():
    net = MLP([2, 10], dtype=np.float64, zero_init=True)
    net.params['w0'][:, 0] = [1.0, -1.0]
    net.params['w0'][:, 1] = [-1.0, 1.0]
    net.params['b0'][2:] = -10.0
    return FloatMLP(net)


@pytest.fixture
def toy_model():
    return make_toy_model()


@pytest.fixture
def toy_shadow():
    return make_toy_shadow()


@pytest.fixture
def random_model():
    """64 -> 16 -> 10 q7 network with fixed random weights."""
    rng = np.random.default_rng(5)
    layers = [
        QuantizedLayer(
            QuantizedTensor(rng.integers(-40, 40, (16, 64)).astype(np.int8),
                            7),
            QuantizedTensor(rng.integers(-20, 20, 16).astype(np.int8), 7),
            'relu', 4),
        QuantizedLayer(
            QuantizedTensor(rng.integers(-60, 60, (10, 16)).astype(np.int8),
                            6),
            QuantizedTensor(rng.integers(-20, 20, 10).astype(np.int8), 6),
            'none', 3),
    ]
    return QuantizedModel(layers, 7, 10)


@pytest.fixture(scope='session')
def noiseless_cfg():
    return LeakageConfig(samples_per_event=2, pad_samples=1,
                         noise_sigma=0.0, leak_model='weighted_bits',
                         rng_seed=7)


@pytest.fixture(scope='session')
def noiseless_extractor(noiseless_cfg):
    # the load_logit window of each position is its only noise-free leak
    return profile(noiseless_cfg, 5120, 'template', seed=11,
                   max_points=noiseless_cfg.samples_per_event)


@pytest.fixture
def toy_device(noiseless_cfg):
    return TargetDevice(make_toy_model(), noiseless_cfg)


@pytest.fixture(scope='session')
def digits():
    images, labels = make_digits(3000, seed=1)
    return images.reshape(len(images), -1), labels


@pytest.fixture(scope='session')
def digits_victim(digits):
    images, labels = digits
    return train_victim(images, labels, hidden=(32,), seed=2, epochs=60)


@pytest.fixture(scope='session')
def calibrated_cfg():
    cfg = LeakageConfig(samples_per_event=8, pad_samples=3,
                        leak_model='weighted_bits', rng_seed=5)
    return cfg.replace(noise_sigma=calibrate_sigma(cfg, 0.2))


@pytest.fixture(scope='session')
def calibrated_extractor(calibrated_cfg):
    return profile(calibrated_cfg, 50000, 'mlp', seed=8,
                   hyper={'hidden': [200, 100], 'epochs': 20,
                          'batch_size': 256, 'lr': 1e-3})
