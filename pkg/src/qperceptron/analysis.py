"""Decision-boundary geometry: expectation grids, hyperplane and quadric residuals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import EntangledPerceptron, QubitPerceptron


@dataclass(frozen=True)
class ExpectationGrid:
    """E[y|x] = 2 p(+1|x) - 1 sampled on a uniform 2D grid; values[i, j] is at (x0[j], x1[i])."""

    x0: np.ndarray
    x1: np.ndarray
    values: np.ndarray


def expectation_grid(model, x0_range=(-2.0, 2.0), x1_range=(-2.0, 2.0),
                     resolution: int = 200) -> ExpectationGrid:
    """Evaluate the label expectation of a 2D model on a uniform grid."""
    if model.dim != 2:
        raise ValueError(f"expectation grids need a 2D model, got dimension {model.dim}")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    x0 = np.linspace(*x0_range, resolution)
    x1 = np.linspace(*x1_range, resolution)
    g0, g1 = np.meshgrid(x0, x1)
    points = np.column_stack([g0.ravel(), g1.ravel()])
    values = 2.0 * np.asarray(model.predict(points)) - 1.0
    return ExpectationGrid(x0=x0, x1=x1, values=values.reshape(resolution, resolution))


def write_grid_csv(path, grid: ExpectationGrid) -> None:
    """Grid CSV: header row of x0 coordinates, first column x1 coordinates, 9 significant digits."""
    with open(path, "w") as fh:
        fh.write("x1\\x0," + ",".join(f"{v:.9g}" for v in grid.x0) + "\n")
        for xv, row in zip(grid.x1, grid.values):
            fh.write(f"{xv:.9g}," + ",".join(f"{v:.9g}" for v in row) + "\n")


def qubit_separation_residual(model: QubitPerceptron, x) -> float:
    """h^z(x); zero exactly on the p = 1/2 boundary of the single-qubit model."""
    return float(model.fields(x)[..., 2])


def qubit_equal_prob_residual(model: QubitPerceptron, x, epsilon_prob: float) -> float:
    """Residual of the equal-probability curve (h^z)^2 tanh^2 h = ((h^x)^2 + (h^z)^2) eps^2.

    Valid in the trained regime where w^y has collapsed to zero; a finite w^y is
    rejected rather than silently ignored.
    """
    if not 0.0 <= epsilon_prob < 1.0:
        raise ValueError("epsilon_prob must be in [0, 1)")
    if np.linalg.norm(model.wy) >= 1e-3:
        raise ValueError("equal-probability curve requires ||w^y|| < 1e-3 (trained fixed point)")
    hx, _, hz = model.fields(x)
    h = np.sqrt(hx * hx + hz * hz)
    return float(hz * hz * np.tanh(h) ** 2 - (hx * hx + hz * hz) * epsilon_prob**2)


def single_qubit_delta(epsilon_prob: float) -> float:
    """Large-field hyperplane slope delta = eps^2 / sqrt(1 - eps^2)."""
    return epsilon_prob**2 / np.sqrt(1.0 - epsilon_prob**2)


def entangled_delta(epsilon_prob: float) -> float:
    """Quadric mixing factor delta = (1 + eps) / (1 - eps)."""
    return (1.0 + epsilon_prob) / (1.0 - epsilon_prob)


def entangled_quadric_residual(model: EntangledPerceptron, x, epsilon_prob: float = 0.0) -> float:
    """(|h00|^2 + |h10|^2) - delta (|h01|^2 + |h11|^2); zero on the eps-probability quadric."""
    h = model.fields(x)
    a = np.abs(h) ** 2
    if a.sum() <= 0.0:
        from .models import DegenerateStateError

        raise DegenerateStateError("all fields vanish for this input")
    return float((a[0] + a[2]) - entangled_delta(epsilon_prob) * (a[1] + a[3]))


def symmetric_quadratic_form(model: EntangledPerceptron, row_a: int, row_b: int) -> np.ndarray:
    """Symmetric matrix B with x^T B x = h_a h_b for real-weight models.

    row_a, row_b index the four weight rows (00, 01, 10, 11); B is built from the
    symmetrized products of the two weight vectors, so the field product becomes
    a genuine quadratic form in the (augmented) input.
    """
    wa = model.w[row_a].real
    wb = model.w[row_b].real
    return 0.5 * (np.outer(wa, wb) + np.outer(wb, wa))
