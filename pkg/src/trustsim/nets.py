"""Small dense networks with hand-rolled backprop, checked against finite
differences, plus the Adam-style optimizer and Polyak soft updates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class DenseNet:
    """Fully connected net: ReLU hidden layers, sigmoid or identity output."""

    def __init__(self, sizes: list[int], output: str = "identity",
                 rng: np.random.Generator | None = None):
        if len(sizes) < 2:
            raise ValueError("need at least input and output sizes")
        if output not in ("identity", "sigmoid"):
            raise ValueError(f"unknown output activation {output!r}")
        self.sizes = list(sizes)
        self.output = output
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        rng = rng or np.random.default_rng(0)
        for i, (d_in, d_out) in enumerate(zip(sizes[:-1], sizes[1:])):
            last = i == len(sizes) - 2
            if last:
                w = rng.uniform(-3e-3, 3e-3, size=(d_in, d_out))
            else:
                w = rng.normal(0.0, np.sqrt(2.0 / d_in), size=(d_in, d_out))
            self.weights.append(w)
            self.biases.append(np.zeros(d_out))

    @property
    def in_dim(self) -> int:
        return self.sizes[0]

    @property
    def out_dim(self) -> int:
        return self.sizes[-1]

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Forward pass without caching; x is (batch, in_dim) or (in_dim,)."""
        single = x.ndim == 1
        h = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if h.shape[1] != self.in_dim:
            raise ValueError(f"expected input dim {self.in_dim}, got {h.shape[1]}")
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                np.maximum(h, 0.0, out=h)
            elif self.output == "sigmoid":
                h = _sigmoid(h)
        return h[0] if single else h

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Forward pass with cached activations for a following backward()."""
        h = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if h.shape[1] != self.in_dim:
            raise ValueError(f"expected input dim {self.in_dim}, got {h.shape[1]}")
        self._acts = [h]
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            h = h @ w + b
            if i < last:
                h = np.maximum(h, 0.0)
            elif self.output == "sigmoid":
                h = _sigmoid(h)
            self._acts.append(h)
        return h

    def backward(self, d_out: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray], np.ndarray]:
        """Backpropagate dL/d(output); returns (dW list, db list, dL/dx)."""
        acts = self._acts
        last = len(self.weights) - 1
        d = np.asarray(d_out, dtype=np.float64)
        if self.output == "sigmoid":
            y = acts[-1]
            d = d * y * (1.0 - y)
        d_ws: list[np.ndarray] = [None] * len(self.weights)
        d_bs: list[np.ndarray] = [None] * len(self.biases)
        for i in range(last, -1, -1):
            d_ws[i] = acts[i].T @ d
            d_bs[i] = d.sum(axis=0)
            d = d @ self.weights[i].T
            if i > 0:
                d = d * (acts[i] > 0)
        return d_ws, d_bs, d

    def parameters(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def copy(self) -> "DenseNet":
        other = DenseNet.__new__(DenseNet)
        other.sizes = list(self.sizes)
        other.output = self.output
        other.weights = [w.copy() for w in self.weights]
        other.biases = [b.copy() for b in self.biases]
        return other

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())


def soft_update(target: DenseNet, online: DenseNet, rate: float) -> DenseNet:
    """Polyak update in place: theta_t <- rate*theta_o + (1-rate)*theta_t."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    if target.sizes != online.sizes:
        raise ValueError("target and online shapes differ")
    for p_t, p_o in zip(target.parameters(), online.parameters()):
        p_t *= 1.0 - rate
        p_t += rate * p_o
    return target


class Adam:
    """Per-parameter adaptive gradient steps (first/second moment scaling)."""

    def __init__(self, net: DenseNet, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        self.net = net
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in net.parameters()]
        self.v = [np.zeros_like(p) for p in net.parameters()]

    def step(self, d_ws: list[np.ndarray], d_bs: list[np.ndarray]) -> None:
        grads = list(d_ws) + list(d_bs)
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.net.parameters(), grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


@dataclass
class LossProbe:
    """A scalar loss over net outputs for gradient checking.

    loss maps the (batch, out_dim) output to a float; grad returns
    dLoss/d(output) with the same shape as the output.
    """

    inputs: np.ndarray
    loss: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]


def backprop_check(net: DenseNet, probe: LossProbe, step: float = 1e-5) -> float:
    """Max relative error between analytic and central-difference gradients.

    Perturbs every parameter of the net by +/- step and compares the
    finite-difference slope with the backpropagated gradient.
    """
    y = net.forward(probe.inputs)
    d_ws, d_bs, _ = net.backward(probe.grad(y))
    analytic = list(d_ws) + list(d_bs)

    max_err = 0.0
    for p, g in zip(net.parameters(), analytic):
        flat_p = p.reshape(-1)
        flat_g = g.reshape(-1)
        for k in range(flat_p.size):
            orig = flat_p[k]
            flat_p[k] = orig + step
            hi = probe.loss(net.predict(probe.inputs))
            flat_p[k] = orig - step
            lo = probe.loss(net.predict(probe.inputs))
            flat_p[k] = orig
            numeric = (hi - lo) / (2.0 * step)
            denom = max(abs(flat_g[k]), abs(numeric))
            if denom < 1e-10:
                continue
            err = abs(flat_g[k] - numeric) / max(denom, 1e-6)
            if err > max_err:
                max_err = err
    return max_err
