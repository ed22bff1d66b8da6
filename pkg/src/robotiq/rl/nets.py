"""Tiny dense networks with hand-written backprop, plus Adam.

Everything is float64 and allocation-light: parameters are plain numpy
arrays, gradients are returned in the same order `param_arrays` yields them,
so finite-difference checks can walk parameter-by-parameter.
"""

from __future__ import annotations

import numpy as np


def init_layers(sizes, rng: np.random.Generator, final_scale: float = 1.0):
    """Xavier-initialized [W, b] pairs; the last W is scaled by final_scale."""
    layers = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        scale = np.sqrt(2.0 / (fan_in + fan_out))
        layers.append([rng.normal(0.0, scale, (fan_in, fan_out)), np.zeros(fan_out)])
    layers[-1][0] = layers[-1][0] * final_scale
    return layers


def mlp_forward(layers, x: np.ndarray):
    """tanh hidden layers, linear output. Returns (output, activations)."""
    acts = [x]
    h = x
    last = len(layers) - 1
    for i, (W, b) in enumerate(layers):
        z = h @ W + b
        h = z if i == last else np.tanh(z)
        acts.append(h)
    return h, acts


def mlp_backward(layers, acts, grad_out: np.ndarray):
    """Gradient of a scalar loss wrt every [W, b], given dL/d(output)."""
    grads = [None] * len(layers)
    g = grad_out
    for i in reversed(range(len(layers))):
        W, _ = layers[i]
        grads[i] = (acts[i].T @ g, g.sum(axis=0))
        if i > 0:
            g = (g @ W.T) * (1.0 - acts[i] ** 2)
    return grads


def flatten_arrays(arrays) -> np.ndarray:
    return np.concatenate([a.ravel() for a in arrays]) if arrays else np.zeros(0)


def assign_flat(arrays, flat: np.ndarray) -> None:
    """Write a flat vector back into the given arrays, in order."""
    i = 0
    for a in arrays:
        n = a.size
        a[...] = flat[i : i + n].reshape(a.shape)
        i += n
    if i != flat.size:
        raise ValueError(f"flat vector size {flat.size} != parameter count {i}")


class Adam:
    """Standard Adam over a fixed list of parameter arrays, updated in place."""

    def __init__(self, arrays, lr: float, beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.arrays = list(arrays)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(a) for a in self.arrays]
        self.v = [np.zeros_like(a) for a in self.arrays]
        self.t = 0

    def step(self, grads) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.t
        bias2 = 1.0 - b2**self.t
        for a, g, m, v in zip(self.arrays, grads, self.m, self.v):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            a -= self.lr * (m / bias1) / (np.sqrt(v / bias2) + self.eps)
