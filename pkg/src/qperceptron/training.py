"""Batch gradient descent with absolute loss-delta convergence, shared by all models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .data import AggregatedDataset
from .models import ClassicalPerceptron, QubitPerceptron, _augment


class ConfigError(ValueError):
    """Raised for invalid training configuration values."""


class DivergenceError(RuntimeError):
    """Raised when the loss becomes non-finite during training."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite loss at iteration {iteration}")
        self.iteration = iteration


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    loss_delta_threshold: float = 1e-7
    max_iterations: int = 200_000
    record_trajectory: bool = False

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.loss_delta_threshold <= 0:
            raise ConfigError("loss_delta_threshold must be positive")
        if self.max_iterations <= 0:
            raise ConfigError("max_iterations must be positive")


@dataclass
class TrainReport:
    final_loss: float
    iterations: int
    converged: bool
    final_weights: object
    loss_trajectory: list = field(default_factory=list)


@njit(cache=True)
def _descend_classical(xa, xat, q, q_plus, w, lr, thr, max_iter):
    prev = 0.0
    loss = 0.0
    iterations = 0
    p = xa.shape[0]
    for t in range(max_iter):
        z = xa @ w
        loss = 0.0
        coef = np.empty(p)
        for i in range(p):
            loss += q[i] * (q_plus[i] * np.logaddexp(0.0, -z[i])
                            + (1.0 - q_plus[i]) * np.logaddexp(0.0, z[i]))
            sigma = 0.5 * (1.0 + np.tanh(0.5 * z[i]))
            coef[i] = q[i] * (sigma - q_plus[i])
        if not np.isfinite(loss):
            return w, loss, t, False, True
        if t > 0 and abs(loss - prev) < thr:
            return w, loss, t, True, False
        w = w - lr * (xat @ coef)
        prev = loss
        iterations = t + 1
    return w, loss, iterations, False, False


@njit(cache=True)
def _descend_qubit(xa, xat, q, b, c, wx, wy, wz, lr, thr, max_iter):
    prev = 0.0
    loss = 0.0
    iterations = 0
    p = xa.shape[0]
    for t in range(max_iter):
        hx = xa @ wx
        hy = xa @ wy
        hz = xa @ wz
        loss = 0.0
        cx = np.empty(p)
        cy = np.empty(p)
        cz = np.empty(p)
        for i in range(p):
            h = math.sqrt(hx[i] ** 2 + hy[i] ** 2 + hz[i] ** 2)
            if h < 1e-4:
                tc = 1.0 - h * h / 3.0 + 2.0 * h**4 / 15.0
            else:
                tc = math.tanh(h) / h
            loss -= q[i] * (hx[i] * c[i] + hz[i] * b[i] - np.logaddexp(h, -h))
            cx[i] = -q[i] * (c[i] - hx[i] * tc)
            cy[i] = q[i] * (hy[i] * tc)
            cz[i] = -q[i] * (b[i] - hz[i] * tc)
        if not np.isfinite(loss):
            return wx, wy, wz, loss, t, False, True
        if t > 0 and abs(loss - prev) < thr:
            return wx, wy, wz, loss, t, True, False
        wx = wx - lr * (xat @ cx)
        wy = wy - lr * (xat @ cy)
        wz = wz - lr * (xat @ cz)
        prev = loss
        iterations = t + 1
    return wx, wy, wz, loss, iterations, False, False


def _train_compiled(model, data: AggregatedDataset, config: TrainConfig):
    """Jitted descent for the two convex models; semantics match the generic loop."""
    xa = np.ascontiguousarray(_augment(data.patterns, model.bias_enabled))
    xat = np.ascontiguousarray(xa.T)
    q = data.weight
    b = data.label_mean
    args = (config.learning_rate, config.loss_delta_threshold, config.max_iterations)
    if isinstance(model, ClassicalPerceptron):
        w, loss, iterations, converged, diverged = _descend_classical(
            xa, xat, q, 0.5 * (1.0 + b), model.w.copy(), *args)
        trained = model.with_params(w)
    else:
        c = np.sqrt(np.maximum(0.0, 1.0 - b * b))
        wx, wy, wz, loss, iterations, converged, diverged = _descend_qubit(
            xa, xat, q, b, c, model.wx.copy(), model.wy.copy(), model.wz.copy(), *args)
        trained = model.with_params(np.concatenate([wx, wy, wz]))
    if diverged:
        raise DivergenceError(iterations)
    return trained, TrainReport(
        final_loss=float(loss),
        iterations=int(iterations),
        converged=bool(converged),
        final_weights=trained,
    )


def train(model, data: AggregatedDataset, config: TrainConfig = TrainConfig()):
    """Full-batch gradient descent until |delta loss| < threshold or the iteration cap.

    Returns (trained model, TrainReport). Works with any model exposing
    loss_grad / params / with_params; the classical and qubit models run in a
    compiled loop unless a loss trajectory is requested.
    """
    if not config.record_trajectory and isinstance(model, (ClassicalPerceptron, QubitPerceptron)):
        # dimension check up front; the kernel assumes consistent shapes
        model.loss_grad(data)
        return _train_compiled(model, data, config)
    params = model.params
    prev_loss = None
    trajectory = []
    iterations = 0
    converged = False
    loss = math.nan
    for t in range(config.max_iterations):
        lg = model.loss_grad(data)
        loss = lg.loss
        if not math.isfinite(loss):
            raise DivergenceError(t)
        if config.record_trajectory:
            trajectory.append(loss)
        if prev_loss is not None and abs(loss - prev_loss) < config.loss_delta_threshold:
            iterations = t
            converged = True
            break
        params = params - config.learning_rate * lg.grad
        model = model.with_params(params)
        prev_loss = loss
        iterations = t + 1
    return model, TrainReport(
        final_loss=loss,
        iterations=iterations,
        converged=converged,
        final_weights=model,
        loss_trajectory=trajectory,
    )
