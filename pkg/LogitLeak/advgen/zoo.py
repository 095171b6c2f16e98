import logging
from dataclasses import dataclass, field, asdict
from typing import List, Optional, Tuple

import numpy as np

from .objectives import cw_logit_objective, zoo_log_objective, \
    distortion_l2
from ..util.adam import CoordinateAdam
from ..util.errors import ConfigError, RejectedInputError

logger = logging.getLogger(__name__)

# one step of the device input pipeline, in pixels
QUANT_STEP = 1.0
LOG_EVERY = 100


@dataclass(frozen=True)
class AttackSpec:
    mode: str = 'untargeted'
    target: int = -1
    kappa: float = 0.0
    const: float = 1.0
    step: float = 1.0
    lr: float = 1.0
    max_iters: int = 10000
    coords: int = 16
    box: Tuple[float, float] = (0.0, 255.0)
    loss: str = 'logit'
    solver: str = 'adam'
    confirmations: int = 3
    distortion_scale: float = 1.0 / 128
    bim_epsilon: float = 16.0
    bim_alpha: float = 2.0
    bim_iters: int = 20

    def __post_init__(self):
        object.__setattr__(self, 'box', tuple(float(b) for b in self.box))
        if self.mode not in ('targeted', 'untargeted'):
            raise ConfigError("mode must be targeted or untargeted, got %r"
                              % self.mode)
        if self.mode == 'targeted' and self.target < 0:
            raise ConfigError("targeted attack needs a target class")
        if not self.step >= QUANT_STEP:
            raise ConfigError("step h=%g is below one input quantization "
                              "step (%g)" % (self.step, QUANT_STEP))
        if self.max_iters < 1 or self.coords < 1:
            raise ConfigError("max_iters and coords must be >= 1")
        if not self.box[0] < self.box[1]:
            raise ConfigError("box %s is empty" % (self.box,))
        if self.loss not in ('log_prob', 'logit'):
            raise ConfigError("unknown loss %r" % self.loss)
        if self.solver not in ('adam', 'newton'):
            raise ConfigError("unknown solver %r" % self.solver)
        if self.confirmations < 1:
            raise ConfigError("confirmations must be >= 1")

    @property
    def targeted(self):
        return self.mode == 'targeted'

    @classmethod
    def from_dict(cls, section):
        names = cls.__dataclass_fields__.keys()
        return cls(**{k: v for k, v in section.items() if k in names})

    def to_dict(self):
        d = asdict(self)
        d['box'] = list(self.box)
        return d


@dataclass(eq=False)
class ZooState:
    x: np.ndarray
    adam: CoordinateAdam
    iteration: int = 0
    best_distortion: float = float('inf')
    best_success: bool = False
    best_image: Optional[np.ndarray] = None
    queries: int = 0
    traces: int = 0

    def record_success(self, x0):
        d = distortion_l2(x0, self.x)
        if d <= self.best_distortion:
            self.best_distortion = d
            self.best_image = self.x.copy()
        self.best_success = True


@dataclass(eq=False)
class AttackReport:
    success: bool
    adversarial: np.ndarray
    distortion: float
    iterations: int
    queries: int
    traces: int
    objective_log: List[float] = field(default_factory=list)
    method: str = 'zoo'
    original_class: int = -1
    final_class: int = -1
    target: int = -1
    verified: bool = False
    gradient_queries: int = 0
    verification_queries: int = 0
    extraction_accuracy: List[float] = field(default_factory=list)
    input_id: str = ''


class CountingObjective(object):
    """Scalar objective that counts its evaluations."""

    def __init__(self, fn):
        self.fn = fn
        self.queries = 0

    def __call__(self, x):
        self.queries += 1
        return self.fn(x)


def fd_gradient_coord(f, x, i, h, box=None):
    """Central difference (f(x + h e_i) - f(x - h e_i)) / 2h.

    With a box, both evaluation points are clamped and the difference is
    divided by the actual distance between them. Returns the estimate and
    the two objective values.
    """
    assert h > 0, "finite-difference step must be > 0"
    xp = np.array(x, dtype=np.float64)
    xm = np.array(x, dtype=np.float64)
    xp.flat[i] += h
    xm.flat[i] -= h
    if box is not None:
        np.clip(xp, box[0], box[1], out=xp)
        np.clip(xm, box[0], box[1], out=xm)
    span = xp.flat[i] - xm.flat[i]
    fp, fm = f(xp), f(xm)
    if span <= 0:
        return 0.0, fp, fm
    return (fp - fm) / span, fp, fm


class AttackObjective(object):
    """||scale (x - x0)||^2 + c g(x) through a logit oracle.

    Keeps the query count, the traces the oracle consumed and the class
    the oracle reported for the last query.
    """

    def __init__(self, oracle, x0, spec, label):
        self.oracle = oracle
        self.x0 = np.asarray(x0, dtype=np.float64)
        self.spec = spec
        self.label = label
        self.queries = 0
        self.traces = 0
        self.last_class = -1
        self.last_margin = float('inf')

    def margin(self, z, probs):
        if self.spec.loss == 'logit':
            return cw_logit_objective(np.asarray(z), self.label,
                                      self.spec.kappa, self.spec.targeted)
        return zoo_log_objective(probs, self.label, self.spec.kappa,
                                 self.spec.targeted)

    def __call__(self, x):
        z, probs, traces = self.oracle(x)
        self.queries += 1
        self.traces += traces
        z = np.asarray(z)
        self.last_class = int(np.argmax(z))
        if self.label is None:
            # untargeted without a given label: attack the initial class
            self.label = self.last_class
        self.last_margin = self.margin(z, probs)
        penalty = np.sum((self.spec.distortion_scale * (x - self.x0)) ** 2)
        return float(penalty + self.spec.const * self.last_margin)

    def succeeded(self):
        if self.spec.targeted:
            return self.last_class == self.label
        return self.last_class != self.label


def zoo_attack(oracle, x0, spec, seed, true_label=None, verify=None,
               input_id=''):
    """Zeroth-order coordinate descent against a logit oracle.

    Each iteration samples spec.coords coordinates without replacement,
    estimates their partial derivatives with two oracle queries each and
    applies per-coordinate Adam (or Newton) steps inside the box; one
    more query checks the new point. Success must hold for
    spec.confirmations consecutive queries (1 for an exact oracle) and,
    when verify is given, for the true victim as well.
    """
    x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
    lo, hi = spec.box
    if np.any(x0 < lo) or np.any(x0 > hi):
        raise RejectedInputError("input lies outside the box [%g, %g]"
                                 % (lo, hi))
    rng = np.random.default_rng(seed)
    label = spec.target if spec.targeted else true_label
    f = AttackObjective(oracle, x0, spec, label)

    value = f(x0)
    original = f.last_class
    if spec.targeted and original == spec.target:
        raise RejectedInputError("input is already classified as target %d"
                                 % spec.target)
    label = f.label
    if not spec.targeted and true_label is not None:
        if original != true_label:
            raise RejectedInputError("input is misclassified (%d, true %d)"
                                     % (original, true_label))

    confirmations = 1 if getattr(oracle, 'exact', False) else \
        spec.confirmations
    state = ZooState(x0.copy(), CoordinateAdam(x0.size, lr=spec.lr))
    objective_log = [value]
    gradient_queries = verification_queries = 0
    coords = min(spec.coords, x0.size)

    while state.iteration < spec.max_iters:
        idx = rng.choice(x0.size, size=coords, replace=False)
        grads = np.zeros(coords)
        hess = np.zeros(coords)
        for j, i in enumerate(idx):
            grads[j], fp, fm = fd_gradient_coord(f, state.x, i, spec.step,
                                                 spec.box)
            hess[j] = (fp - 2.0 * value + fm) / (spec.step ** 2)
        gradient_queries += 2 * coords

        if spec.solver == 'adam':
            delta = state.adam.delta(idx, grads)
        else:
            delta = -spec.lr * grads
            curved = hess > 0
            delta[curved] /= hess[curved]
        state.x[idx] = np.clip(state.x[idx] + delta, lo, hi)
        state.iteration += 1

        value = f(state.x)
        verification_queries += 1
        objective_log.append(value)
        if logger.isEnabledFor(logging.DEBUG) and \
                state.iteration % LOG_EVERY == 0:
            logger.debug("iteration %d: objective %.4f, class %d",
                         state.iteration, value, f.last_class)

        if f.succeeded():
            stable = True
            for _ in range(confirmations - 1):
                f(state.x)
                verification_queries += 1
                if not f.succeeded():
                    stable = False
                    break
            if stable:
                state.record_success(x0)
                break

    state.queries = f.queries
    state.traces = f.traces
    adversarial = state.best_image if state.best_success else state.x
    final_class = f.last_class
    verified = state.best_success
    if state.best_success and verify is not None:
        final_class = int(verify(adversarial))
        verified = final_class == label if spec.targeted else \
            final_class != label
        if not verified:
            logger.warning("oracle reported success but the victim "
                           "classifies the example as %d", final_class)

    history = list(getattr(oracle, 'history', []))
    report = AttackReport(
        success=bool(state.best_success and verified),
        adversarial=adversarial,
        distortion=distortion_l2(x0, adversarial),
        iterations=state.iteration,
        queries=state.queries,
        traces=state.traces,
        objective_log=objective_log,
        method='zoo',
        original_class=original,
        final_class=final_class,
        target=spec.target if spec.targeted else -1,
        verified=bool(verified),
        gradient_queries=gradient_queries,
        verification_queries=verification_queries,
        extraction_accuracy=history,
        input_id=str(input_id))
    logger.info("zoo %s: success %s after %d iterations, L2 %.3f, %d "
                "queries, %d traces", input_id, report.success,
                report.iterations, report.distortion, report.queries,
                report.traces)
    return report
