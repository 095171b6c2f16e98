import numpy as np


class Adam(object):
    """Adam update rule over a dict of named numpy parameters.

    Parameters are updated in place; moments are created lazily the first
    time a parameter name is seen.
    """

    def __init__(self, lr=1e-3, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = {}
        self.v = {}
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        step_size = self.lr / bc1

        for k in params:
            g = grads[k]
            if k not in self.m:
                self.m[k] = np.zeros_like(params[k])
                self.v[k] = np.zeros_like(params[k])

            self.m[k] *= self.beta1
            self.m[k] += (1.0 - self.beta1) * g
            self.v[k] *= self.beta2
            self.v[k] += (1.0 - self.beta2) * (g * g)

            denom = np.sqrt(self.v[k] * (1.0 / bc2)) + self.epsilon
            params[k] -= (step_size * self.m[k] / denom).astype(
                params[k].dtype, copy=False)


class CoordinateAdam(object):
    """Adam with one step counter per coordinate.

    Used by coordinate descent, where only a few coordinates receive a
    gradient estimate per iteration.
    """

    def __init__(self, size, lr=1.0, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = np.zeros(size, dtype=np.float64)
        self.v = np.zeros(size, dtype=np.float64)
        self.t = np.zeros(size, dtype=np.int64)

    def delta(self, idx, grad):
        idx = np.asarray(idx)
        self.t[idx] += 1
        self.m[idx] = self.beta1 * self.m[idx] + (1.0 - self.beta1) * grad
        self.v[idx] = self.beta2 * self.v[idx] + \
            (1.0 - self.beta2) * grad * grad
        m_hat = self.m[idx] / (1.0 - self.beta1 ** self.t[idx])
        v_hat = self.v[idx] / (1.0 - self.beta2 ** self.t[idx])
        return -self.lr * m_hat / (np.sqrt(v_hat) + self.epsilon)
