import logging

import numpy as np

from .objectives import distortion_l2
from .zoo import AttackReport
from ..util.losses import get_loss

logger = logging.getLogger(__name__)


def bim_whitebox_baseline(shadow, x0, spec, true_label, verify,
                          input_id=''):
    """Basic iterative method on the float shadow of the victim.

    Steps of bim_alpha pixels along the sign of the cross-entropy
    gradient, clipped to the bim_epsilon ball around x0 and to the box.
    Success is decided by verify, the quantized victim, so the result
    measures transfer from the float copy to the deployed model.
    """
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    lo, hi = spec.box
    label = spec.target if spec.targeted else true_label
    # ascend the loss of the true class, descend that of the target
    direction = -1.0 if spec.targeted else 1.0
    labels = np.array([label])

    def grad_fn(logits):
        return get_loss(labels, logits, "ssce", "bim")

    x = x0.copy()
    objective_log = []
    for _ in range(spec.bim_iters):
        loss, g = shadow.input_gradient(x, grad_fn)
        objective_log.append(float(loss))
        x = x + direction * spec.bim_alpha * np.sign(g)
        x = np.clip(x, x0 - spec.bim_epsilon, x0 + spec.bim_epsilon)
        x = np.clip(x, lo, hi)

    final_class = int(verify(x))
    success = final_class == label if spec.targeted else \
        final_class != label
    logger.info("bim %s: transfer %s, L2 %.3f", input_id, success,
                distortion_l2(x0, x))
    return AttackReport(
        success=bool(success),
        adversarial=x,
        distortion=distortion_l2(x0, x),
        iterations=int(spec.bim_iters),
        queries=0,
        traces=0,
        objective_log=objective_log,
        method='bim',
        original_class=int(true_label),
        final_class=final_class,
        target=spec.target if spec.targeted else -1,
        verified=True,
        input_id=str(input_id))
