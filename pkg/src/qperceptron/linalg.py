"""2x2 Hermitian numerics: Pauli algebra, Bloch-vector states, eigendecomposition and matrix log."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}
IDENTITY2 = np.eye(2, dtype=complex)

# Below this field norm, tanh(h)/h switches to its Taylor series.
SMALL_FIELD = 1e-4
DEFAULT_EIGEN_FLOOR = 1e-12
PSD_TOLERANCE = 1e-10


class InvalidFieldError(ValueError):
    """Raised when a field vector contains non-finite components."""


class NotPSDError(ValueError):
    """Raised when a matrix expected to be positive semidefinite is not."""


def pauli(k: str) -> np.ndarray:
    """Return the Pauli matrix for axis k in {'x','y','z'}."""
    try:
        return PAULI[k].copy()
    except KeyError:
        raise ValueError(f"invalid Pauli axis {k!r}, expected 'x', 'y' or 'z'") from None


def tanhc(h):
    """tanh(h)/h, with the series 1 - h^2/3 + 2h^4/15 below the small-field cutoff.

    Accepts scalars or arrays; the h -> 0 limit is exactly 1.
    """
    h = np.asarray(h, dtype=float)
    small = np.abs(h) < SMALL_FIELD
    safe = np.where(small, 1.0, h)
    out = np.where(small, 1.0 - h * h / 3.0 + 2.0 * h**4 / 15.0, np.tanh(safe) / safe)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class FieldVector:
    """Dimensionless qubit field (hx, hy, hz); the inverse temperature is absorbed."""

    hx: float
    hy: float
    hz: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.hx, self.hy, self.hz)):
            raise InvalidFieldError(f"non-finite field components {(self.hx, self.hy, self.hz)}")

    @property
    def norm(self) -> float:
        return math.sqrt(self.hx**2 + self.hy**2 + self.hz**2)

    def as_array(self) -> np.ndarray:
        return np.array([self.hx, self.hy, self.hz])


@dataclass(frozen=True)
class BlochState:
    """Qubit density matrix in Bloch form rho = (I + m . sigma) / 2."""

    mx: float
    my: float
    mz: float
    source_field: FieldVector

    @property
    def bloch_norm(self) -> float:
        return math.sqrt(self.mx**2 + self.my**2 + self.mz**2)

    def matrix(self) -> np.ndarray:
        m = IDENTITY2.copy()
        for comp, axis in ((self.mx, "x"), (self.my, "y"), (self.mz, "z")):
            m += comp * PAULI[axis]
        return 0.5 * m

    def eigenvalues(self) -> tuple[float, float]:
        """Closed-form eigenvalues (1 +- |m|) / 2, descending."""
        r = self.bloch_norm
        return 0.5 * (1.0 + r), 0.5 * (1.0 - r)


def bloch_from_field(f: FieldVector) -> BlochState:
    """Bloch vector m^k = (h^k / h) tanh(h) of the thermal qubit state."""
    t = tanhc(f.norm)
    return BlochState(mx=f.hx * t, my=f.hy * t, mz=f.hz * t, source_field=f)


def herm2_eigh(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a 2x2 Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues in descending order
    and eigenvectors as orthonormal columns.
    """
    w, v = np.linalg.eigh(np.asarray(m, dtype=complex))
    return w[::-1], v[:, ::-1]


def herm2_log(m: np.ndarray, eigen_floor: float = DEFAULT_EIGEN_FLOOR) -> np.ndarray:
    """Matrix logarithm of a PSD Hermitian 2x2 matrix with an eigenvalue floor.

    Eigenvalues are clamped below at eigen_floor before the log; an eigenvalue
    below -1e-10 raises NotPSDError.
    """
    if eigen_floor <= 0:
        raise ValueError("eigen_floor must be positive")
    w, v = herm2_eigh(m)
    if w[-1] < -PSD_TOLERANCE:
        raise NotPSDError(f"matrix has negative eigenvalue {w[-1]:g}")
    logw = np.log(np.maximum(w, eigen_floor))
    return (v * logw) @ v.conj().T
