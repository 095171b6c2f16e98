import logging
from collections import namedtuple

import numpy as np

logger = logging.getLogger(__name__)

# logits this far below the maximum get probability zero
MASK_WIDTH = 8
# base register value loaded at index 0; index 0 always stores
BASE_SENTINEL = -128

LOAD_LOGIT = 'load_logit'
LOAD_BASE = 'load_base'
STORE_BASE = 'store_base'
EVENT_KINDS = (LOAD_LOGIT, LOAD_BASE, STORE_BASE)

ScheduleEvent = namedtuple('ScheduleEvent', ['tag', 'operand', 'index'])


def nnom_softmax(z):
    """Masked softmax of local_softmax_q7, evaluated in floating point.

    Entries below max(z) - 8 get probability 0, the rest are normalized
    with exp(z[i] - max(z)).
    """
    z = np.asarray(z, dtype=np.int8).astype(np.float64)
    m = np.max(z)
    keep = z >= m - MASK_WIDTH
    e = np.where(keep, np.exp(z - m), 0.0)
    return e / np.sum(e)


def nnom_softmax_batch(z):
    z = np.asarray(z, dtype=np.int8).astype(np.float64)
    m = np.max(z, axis=1, keepdims=True)
    keep = z >= m - MASK_WIDTH
    e = np.where(keep, np.exp(z - m), 0.0)
    return e / np.sum(e, axis=1, keepdims=True)


def argmax_search_schedule(z):
    """Instruction stream of the softmax max-search over the logits.

    Per index i: load of z[i], load of the running maximum (base), and a
    store of z[i] into base when z[i] is strictly larger. Index 0 always
    stores, so base holds z[0] after the first step. Operands are raw
    unsigned bytes, as they appear on the bus.
    """
    z = np.asarray(z, dtype=np.int8)
    schedule = []
    base = BASE_SENTINEL
    for i, value in enumerate(z):
        value = int(value)
        schedule.append(ScheduleEvent(LOAD_LOGIT, value & 0xFF, i))
        schedule.append(ScheduleEvent(LOAD_BASE, base & 0xFF, i))
        if i == 0 or value > base:
            schedule.append(ScheduleEvent(STORE_BASE, value & 0xFF, i))
            base = value
    return schedule


def schedule_operands(z):
    """Vectorized schedule for a batch of logit vectors.

    Returns raw byte operands of the load_logit and load_base events and
    the store mask, each of shape (n, num_classes); store operands equal
    the load_logit operands where the mask is set.
    """
    z = np.ascontiguousarray(z, dtype=np.int8)
    if z.ndim == 1:
        z = z[np.newaxis]
    z16 = z.astype(np.int16)
    sentinel = np.full((z.shape[0], 1), BASE_SENTINEL, dtype=np.int16)
    running = np.maximum.accumulate(np.concatenate([sentinel, z16], axis=1),
                                    axis=1)
    base = running[:, :-1]
    store = z16 > base
    store[:, 0] = True
    return (z.view(np.uint8), base.astype(np.int8).view(np.uint8), store)


def logit_histogram(logits):
    """Per-position histogram of raw logit bytes, shape (num_classes, 256)."""
    raw = np.ascontiguousarray(logits, dtype=np.int8).view(np.uint8)
    return np.stack([np.bincount(raw[:, p], minlength=256)
                     for p in range(raw.shape[1])])
