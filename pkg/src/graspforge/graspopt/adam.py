"""Plain Adam with bias correction."""

from __future__ import annotations

import numpy as np


class Adam:
    """Per-coordinate adaptive steps; moments start at zero."""

    def __init__(self, n: int, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = np.zeros(n)
        self.v = np.zeros(n)
        self.t = 0

    def step(self, params: np.ndarray, gradient: np.ndarray, lr: float) -> np.ndarray:
        """Return updated parameters (the input array is not modified)."""
        gradient = np.asarray(gradient, dtype=float)
        self.t += 1
        self.m = self.beta1 * self.m + (1.0 - self.beta1) * gradient
        self.v = self.beta2 * self.v + (1.0 - self.beta2) * gradient**2
        m_hat = self.m / (1.0 - self.beta1**self.t)
        v_hat = self.v / (1.0 - self.beta2**self.t)
        return params - lr * m_hat / (np.sqrt(v_hat) + self.eps)
