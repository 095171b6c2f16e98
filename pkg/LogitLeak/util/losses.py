import logging

import numpy as np
from scipy.special import log_softmax, softmax

logger = logging.getLogger(__name__)


def sparse_softmax_cross_entropy(labels, logits):
    """Mean cross-entropy of integer labels under softmax(logits).

    Returns the loss and its gradient with respect to the logits.
    """
    n = logits.shape[0]
    logp = log_softmax(logits, axis=1)
    loss = -np.mean(logp[np.arange(n), labels])
    grad = softmax(logits, axis=1)
    grad[np.arange(n), labels] -= 1.0
    grad /= n
    return loss, grad


def get_loss_fn(loss):
    if loss == "ssce":
        loss_fn = sparse_softmax_cross_entropy
    else:
        raise ValueError("invalid loss function", loss)
    return loss_fn


def get_loss(gt, pred, loss, name):
    loss_fn = get_loss_fn(loss)
    value, grad = loss_fn(gt, pred)
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("%s (%s): %s", name, loss, value)
    return value, grad
