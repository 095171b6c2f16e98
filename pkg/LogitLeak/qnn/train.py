import logging

import numpy as np
from tqdm import tqdm

from .inference import QuantizedLayer, QuantizedModel, classify
from .shadow import FloatMLP
from .quantize import MAX_FRAC_BITS, choose_frac_bits, normalize_pixels, \
    quantize_input, quantize_ptq
from ..models.mlp import MLP
from ..util.adam import Adam
from ..util.errors import ConvergenceError
from ..util.losses import get_loss

logger = logging.getLogger(__name__)


def split_holdout(num, holdout, rng):
    perm = rng.permutation(num)
    n_test = max(1, int(round(num * holdout)))
    return perm[n_test:], perm[:n_test]


def fit_float(net, x, y, epochs, batch_size, lr, rng, progress=False):
    """Minibatch cross-entropy training with Adam; returns the last loss."""
    opt = Adam(lr=lr)
    loss = float('nan')
    for epoch in tqdm(range(epochs), disable=not progress, desc="victim"):
        perm = rng.permutation(len(x))
        for start in range(0, len(x), batch_size):
            idx = perm[start:start + batch_size]
            logits, cache = net.forward(x[idx], keep=True)
            loss, grad = get_loss(y[idx], logits, "ssce", "victim")
            grads, _ = net.backward(cache, grad)
            opt.step(net.params, grads)
        if epoch % 10 == 0 or epoch == epochs - 1:
            logger.info("victim epoch %d loss %.4f", epoch, loss)
    return float(loss)


def quantize_network(net, calibration_inputs, num_classes):
    """PTQ of a float network into a q7 model.

    Per-tensor frac_bits: weights and biases from their own range, layer
    outputs from the activation range observed on the calibration set.
    """
    acts = net.activations(calibration_inputs)
    layers = []
    for i, (w, b) in enumerate(net.weights()):
        w_q = quantize_ptq(w.T, choose_frac_bits(w))
        b_q = quantize_ptq(b, choose_frac_bits(b))
        out_frac = choose_frac_bits(acts[i])
        activation = 'relu' if i < net.num_layers - 1 else 'none'
        layers.append(QuantizedLayer(w_q, b_q, activation, out_frac))
        logger.info("layer %d: w frac %d, b frac %d, out frac %d",
                    i, w_q.frac_bits, b_q.frac_bits, out_frac)
    return QuantizedModel(layers, MAX_FRAC_BITS, num_classes)


def train_victim(images, labels, hidden=(32,), seed=0, epochs=60,
                 batch_size=64, lr=1e-2, holdout=0.2, num_classes=10,
                 min_accuracy=None, progress=False):
    """Float training with Adam followed by post-training quantization.

    images are pixels in [0, 255], one row per sample. Returns the
    quantized victim, its float shadow network and a training report.
    """
    images = np.asarray(images, dtype=np.float64).reshape(len(images), -1)
    labels = np.asarray(labels, dtype=np.int64)
    assert len(images) > 0, "dataset is empty"
    assert len(images) == len(labels), "images and labels differ in length"
    assert labels.min() >= 0 and labels.max() < num_classes, \
        "labels outside [0, %d)" % num_classes

    rng = np.random.default_rng(seed)
    train_idx, test_idx = split_holdout(len(images), holdout, rng)
    x = normalize_pixels(images).astype(np.float64)

    widths = [x.shape[1]] + list(hidden) + [num_classes]
    net = MLP(widths, seed=int(rng.integers(2 ** 31)), dtype=np.float64)
    final_loss = fit_float(net, x[train_idx], labels[train_idx], epochs,
                           batch_size, lr, rng, progress=progress)

    model = quantize_network(net, x[train_idx], num_classes)
    float_acc = float(np.mean(
        np.argmax(net.forward(x[test_idx]), axis=1) == labels[test_idx]))
    q_acc = float(np.mean(
        classify(model, quantize_input(images[test_idx]).data) ==
        labels[test_idx]))
    logger.info("held-out accuracy: float %.4f, quantized %.4f",
                float_acc, q_acc)

    report = {
        'seed': int(seed),
        'epochs': int(epochs),
        'final_loss': final_loss,
        'float_accuracy': float_acc,
        'accuracy': q_acc,
        'num_train': int(len(train_idx)),
        'num_test': int(len(test_idx)),
        'test_indices': test_idx,
    }
    if min_accuracy is not None and q_acc < min_accuracy:
        raise ConvergenceError(q_acc, min_accuracy)
    return model, FloatMLP(net), report
