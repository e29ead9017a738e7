"""The three classifiers: logistic perceptron, single-qubit perceptron, entangled two-qubit perceptron."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .data import AggregatedDataset, data_density
from .linalg import DEFAULT_EIGEN_FLOOR, FieldVector, bloch_from_field, herm2_eigh, herm2_log, tanhc


class DegenerateStateError(ValueError):
    """Raised when all entangled fields vanish for some input (N = 0)."""


@dataclass(frozen=True)
class LossGrad:
    loss: float
    grad: np.ndarray


def _augment(x: np.ndarray, bias: bool) -> np.ndarray:
    """Append a constant +1 coordinate when the model carries a bias."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if bias:
        x = np.hstack([x, np.ones((x.shape[0], 1))])
    return x


def _check_dim(model_dim: int, data_dim: int) -> None:
    if model_dim != data_dim:
        raise ValueError(f"model expects inputs of dimension {model_dim}, got {data_dim}")


def _ln2cosh(h):
    return np.logaddexp(h, -h)


@dataclass(frozen=True)
class ClassicalPerceptron:
    """Logistic regression on +-1 labels: p(y=1|x) = sigmoid(w . x)."""

    w: np.ndarray
    bias_enabled: bool = True

    @classmethod
    def zeros(cls, d: int, bias: bool = True) -> "ClassicalPerceptron":
        return cls(w=np.zeros(d + int(bias)), bias_enabled=bias)

    @property
    def dim(self) -> int:
        return len(self.w) - int(self.bias_enabled)

    @property
    def params(self) -> np.ndarray:
        return self.w.copy()

    def with_params(self, p: np.ndarray) -> "ClassicalPerceptron":
        return replace(self, w=np.asarray(p, dtype=float).copy())

    def loss_grad(self, data: AggregatedDataset) -> LossGrad:
        return classical_loss_grad(self, data)

    def predict(self, x) -> np.ndarray:
        """Probability of label +1 for one input or a batch."""
        xa = _augment(x, self.bias_enabled)
        _check_dim(self.dim, xa.shape[1] - int(self.bias_enabled))
        z = xa @ self.w
        p = 0.5 * (1.0 + np.tanh(0.5 * z))  # numerically stable sigmoid
        return p if np.ndim(x) > 1 else float(p[0])


def classical_loss_grad(model: ClassicalPerceptron, data: AggregatedDataset) -> LossGrad:
    """Negative log-likelihood of logistic regression over pattern statistics, and its gradient."""
    _check_dim(model.dim, data.dim)
    xa = _augment(data.patterns, model.bias_enabled)
    q = data.weight
    q_plus = 0.5 * (1.0 + data.label_mean)
    z = xa @ model.w
    # -q(+|x) ln sigma(z) - q(-|x) ln sigma(-z), via softplus for large |z|
    loss = float(np.sum(q * (q_plus * np.logaddexp(0.0, -z) + (1.0 - q_plus) * np.logaddexp(0.0, z))))
    sigma = 0.5 * (1.0 + np.tanh(0.5 * z))
    grad = xa.T @ (q * (sigma - q_plus))
    return LossGrad(loss=loss, grad=grad)


@dataclass(frozen=True)
class QubitPerceptron:
    """Single-qubit perceptron: fields h^k = w^k . x set a thermal qubit state."""

    wx: np.ndarray
    wy: np.ndarray
    wz: np.ndarray
    bias_enabled: bool = True

    @classmethod
    def zeros(cls, d: int, bias: bool = True) -> "QubitPerceptron":
        n = d + int(bias)
        return cls(wx=np.zeros(n), wy=np.zeros(n), wz=np.zeros(n), bias_enabled=bias)

    @property
    def dim(self) -> int:
        return len(self.wz) - int(self.bias_enabled)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([self.wx, self.wy, self.wz])

    def with_params(self, p: np.ndarray) -> "QubitPerceptron":
        p = np.asarray(p, dtype=float)
        n = len(self.wx)
        return replace(self, wx=p[:n].copy(), wy=p[n : 2 * n].copy(), wz=p[2 * n :].copy())

    def loss_grad(self, data: AggregatedDataset) -> LossGrad:
        return qubit_loss_grad(self, data)

    def fields(self, x) -> np.ndarray:
        """(hx, hy, hz) per input row."""
        xa = _augment(x, self.bias_enabled)
        _check_dim(self.dim, xa.shape[1] - int(self.bias_enabled))
        out = np.stack([xa @ self.wx, xa @ self.wy, xa @ self.wz], axis=-1)
        return out[0] if np.ndim(x) == 1 else out

    def predict(self, x):
        """p(y=+1|x) = (1 + m^z) / 2."""
        h = np.atleast_2d(self.fields(x))
        norm = np.linalg.norm(h, axis=-1)
        mz = h[:, 2] * tanhc(norm)
        p = 0.5 * (1.0 + mz)
        return p if np.ndim(x) > 1 else float(p[0])


def qubit_loss_grad(model: QubitPerceptron, data: AggregatedDataset) -> LossGrad:
    """Closed-form quantum log-likelihood and its three gradient blocks."""
    _check_dim(model.dim, data.dim)
    xa = _augment(data.patterns, model.bias_enabled)
    q = data.weight
    b = data.label_mean
    c = np.sqrt(np.maximum(0.0, 1.0 - b * b))
    hx, hy, hz = xa @ model.wx, xa @ model.wy, xa @ model.wz
    h = np.sqrt(hx * hx + hy * hy + hz * hz)
    t = tanhc(h)
    loss = float(-np.sum(q * (hx * c + hz * b - _ln2cosh(h))))
    gx = -xa.T @ (q * (c - hx * t))
    gy = xa.T @ (q * (hy * t))
    gz = -xa.T @ (q * (b - hz * t))
    return LossGrad(loss=loss, grad=np.concatenate([gx, gy, gz]))


def qubit_loss_trace_oracle(model: QubitPerceptron, data: AggregatedDataset,
                            eigen_floor: float = DEFAULT_EIGEN_FLOOR) -> float:
    """Likelihood evaluated directly as -sum_x q(x) Tr{eta_x ln rho_x}.

    An independent path through the density-matrix construction, for cross-checking
    the closed form.
    """
    _check_dim(model.dim, data.dim)
    total = 0.0
    fields = model.fields(data.patterns)
    for qx, b, hvec in zip(data.weight, data.label_mean, fields):
        rho = bloch_from_field(FieldVector(*hvec)).matrix()
        eta = data_density(b)
        total -= qx * float(np.trace(eta @ herm2_log(rho, eigen_floor)).real)
    return total


def qubit_predict(model: QubitPerceptron, x):
    return model.predict(x)


@dataclass(frozen=True)
class EntangledPerceptron:
    """Two-qubit perceptron: complex fields h^{ij} = w^{ij} . x define a pure joint state.

    Weight rows are ordered (00, 01, 10, 11); predictions come from the reduced
    density matrix of qubit B.
    """

    w: np.ndarray  # complex, shape (4, d [+1])
    bias_enabled: bool = True
    eigen_floor: float = DEFAULT_EIGEN_FLOOR

    @classmethod
    def random(cls, d: int, bias: bool = True, seed: int = 0, scale: float = 0.1,
               eigen_floor: float = DEFAULT_EIGEN_FLOOR) -> "EntangledPerceptron":
        rng = np.random.default_rng(seed)
        n = d + int(bias)
        w = scale * (rng.standard_normal((4, n)) + 1j * rng.standard_normal((4, n)))
        return cls(w=w, bias_enabled=bias, eigen_floor=eigen_floor)

    def __post_init__(self):
        if self.eigen_floor <= 0:
            raise ValueError("eigen_floor must be positive")
        if not np.any(self.w):
            raise ValueError("all-zero weights give a degenerate state for every input")

    @property
    def dim(self) -> int:
        return self.w.shape[1] - int(self.bias_enabled)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([self.w.real.ravel(), self.w.imag.ravel()])

    def with_params(self, p: np.ndarray) -> "EntangledPerceptron":
        p = np.asarray(p, dtype=float)
        k = self.w.size
        w = (p[:k] + 1j * p[k:]).reshape(self.w.shape)
        return replace(self, w=w)

    def loss_grad(self, data: AggregatedDataset) -> LossGrad:
        return entangled_loss_grad(self, data)

    def fields(self, x) -> np.ndarray:
        """Complex fields (h00, h01, h10, h11) per input row."""
        xa = _augment(x, self.bias_enabled)
        _check_dim(self.dim, xa.shape[1] - int(self.bias_enabled))
        out = xa @ self.w.T
        return out[0] if np.ndim(x) == 1 else out

    def predict(self, x):
        """p(y=+1|x) = rho_B[0,0] = (|h00|^2 + |h10|^2) / N."""
        h = np.atleast_2d(self.fields(x))
        a = np.abs(h) ** 2
        n = a.sum(axis=1)
        if np.any(n <= 0.0):
            raise DegenerateStateError("all fields vanish for some input")
        p = (a[:, 0] + a[:, 2]) / n
        return p if np.ndim(x) > 1 else float(p[0])


def entangled_rho(model: EntangledPerceptron, x) -> np.ndarray:
    """Reduced density matrix of qubit B for one input: rho_B = H^dagger H / N."""
    h = model.fields(x).reshape(2, 2)  # h[i, j]
    n = float(np.sum(np.abs(h) ** 2))
    if n <= 0.0:
        raise DegenerateStateError("all fields vanish for this input")
    return h.conj().T @ h / n


def _entangled_losses(hfields: np.ndarray, q: np.ndarray, b: np.ndarray,
                      eigen_floor: float) -> np.ndarray:
    """-sum_x q Tr{eta ln rho_B} via the Bloch form of the 2x2 matrices.

    hfields has shape (..., P, 4); leading axes are independent weight settings.
    """
    a = np.abs(hfields) ** 2
    n = a.sum(axis=-1)
    if np.any(n <= 0.0):
        raise DegenerateStateError("all fields vanish for some pattern")
    h00, h01, h10, h11 = (hfields[..., k] for k in range(4))
    off = (np.conj(h00) * h01 + np.conj(h10) * h11) / n  # rho_B[0,1]
    mz = (a[..., 0] + a[..., 2] - a[..., 1] - a[..., 3]) / n
    mx = 2.0 * off.real
    my = -2.0 * off.imag
    r = np.sqrt(mx * mx + my * my + mz * mz)
    lam_p = np.log(np.maximum(0.5 * (1.0 + r), eigen_floor))
    lam_m = np.log(np.maximum(0.5 * (1.0 - r), eigen_floor))
    # eta in Bloch form: m_eta = (sqrt(1 - b^2), 0, b)
    ex = np.sqrt(np.maximum(0.0, 1.0 - b * b))
    r_safe = np.where(r < 1e-300, 1.0, r)
    overlap = (mx * ex + mz * b) / r_safe  # m_hat . m_eta
    tr = 0.5 * (lam_p + lam_m) + 0.5 * overlap * (lam_p - lam_m)
    return -np.sum(q * tr, axis=-1)


def entangled_loss(model: EntangledPerceptron, data: AggregatedDataset) -> float:
    _check_dim(model.dim, data.dim)
    h = model.fields(data.patterns)
    return float(_entangled_losses(h, data.weight, data.label_mean, model.eigen_floor))


def entangled_loss_grad(model: EntangledPerceptron, data: AggregatedDataset,
                        method: str = "fd", fd_step: float = 1e-5) -> LossGrad:
    """Entangled quantum log-likelihood with gradient by central finite differences (default)
    or the analytic eigendecomposition path."""
    loss = entangled_loss(model, data)
    if method == "fd":
        grad = _entangled_grad_fd(model, data, fd_step)
    elif method == "analytic":
        grad = _entangled_grad_analytic(model, data)
    else:
        raise ValueError(f"unknown gradient method {method!r}")
    return LossGrad(loss=loss, grad=grad)


def _entangled_grad_fd(model: EntangledPerceptron, data: AggregatedDataset,
                       step: float) -> np.ndarray:
    """Central differences over all real parameters, batched over perturbations.

    Perturbing one weight entry W[r, c] shifts only field column r by x_c, so all
    perturbed field tables are built from the base fields without re-deriving W.
    """
    xa = _augment(data.patterns, model.bias_enabled)
    base = xa @ model.w.T  # (P, 4)
    n_rows, n_cols = model.w.shape
    k = model.w.size
    direction = np.zeros((n_rows, n_cols, xa.shape[0], n_rows), dtype=complex)
    for r in range(n_rows):
        direction[r, :, :, r] = xa.T
    direction = np.concatenate([direction.reshape(k, *base.shape),
                                1j * direction.reshape(k, *base.shape)])
    q, b, floor = data.weight, data.label_mean, model.eigen_floor
    loss_plus = _entangled_losses(base + step * direction, q, b, floor)
    loss_minus = _entangled_losses(base - step * direction, q, b, floor)
    return (loss_plus - loss_minus) / (2.0 * step)


def _entangled_grad_analytic(model: EntangledPerceptron, data: AggregatedDataset) -> np.ndarray:
    """Gradient of -sum q Tr{eta ln rho_B} via the divided-difference derivative of the log.

    Matches the finite-difference path away from eigenvalue-floor crossings.
    """
    _check_dim(model.dim, data.dim)
    floor = model.eigen_floor
    xa = _augment(data.patterns, model.bias_enabled)
    g_re = np.zeros((2, 2, xa.shape[1]))
    g_im = np.zeros_like(g_re)
    for qx, b, xrow in zip(data.weight, data.label_mean, xa):
        hmat = (model.w @ xrow).reshape(2, 2)
        n = float(np.sum(np.abs(hmat) ** 2))
        if n <= 0.0:
            raise DegenerateStateError("all fields vanish for some pattern")
        rho = hmat.conj().T @ hmat / n
        lam, v = herm2_eigh(rho)
        lam_c = np.maximum(lam, floor)
        # divided-difference kernel of the clamped log
        phi = np.empty((2, 2))
        for aa in range(2):
            phi[aa, aa] = 1.0 / lam_c[aa] if lam[aa] > floor else 0.0
        dl = lam[0] - lam[1]
        if abs(dl) > 1e-14:
            phi[0, 1] = phi[1, 0] = (np.log(lam_c[0]) - np.log(lam_c[1])) / dl
        else:
            phi[0, 1] = phi[1, 0] = phi[0, 0]
        eta = data_density(b)
        gmat = v @ (phi * (v.conj().T @ eta @ v)) @ v.conj().T  # Tr{eta d ln rho} = Tr{G d rho}
        tr_g_rho = float(np.trace(gmat @ rho).real)
        m = gmat @ hmat.conj().T  # Tr{G H^dag dH} = sum_ij M[j,i] dH[i,j]
        for i in range(2):
            for j in range(2):
                # d rho = (dA - rho dN) / N with dh_ij = x_c (re) or i x_c (im)
                g_re[i, j] += (-qx / n) * (2.0 * m[j, i].real - tr_g_rho * 2.0 * hmat[i, j].real) * xrow
                g_im[i, j] += (-qx / n) * (-2.0 * m[j, i].imag - tr_g_rho * 2.0 * hmat[i, j].imag) * xrow
    return np.concatenate([g_re.reshape(4, -1).ravel(), g_im.reshape(4, -1).ravel()])


def entangled_predict(model: EntangledPerceptron, x):
    return model.predict(x)


def mse(probs, labels) -> float:
    """Brier score: mean squared difference between 1[y = +1] and p(+1|x)."""
    probs = np.asarray(probs, dtype=float)
    labels = np.asarray(labels)
    if probs.shape != labels.shape:
        raise ValueError(f"length mismatch: {probs.shape} vs {labels.shape}")
    indicator = (labels == 1).astype(float)
    return float(np.mean((indicator - probs) ** 2))


def model_to_json(model) -> str:
    """Serialize any of the three models to JSON at full double precision."""
    if isinstance(model, ClassicalPerceptron):
        payload = {"kind": "classical", "dim": model.dim, "bias": model.bias_enabled,
                   "w": model.w.tolist()}
    elif isinstance(model, QubitPerceptron):
        payload = {"kind": "qubit", "dim": model.dim, "bias": model.bias_enabled,
                   "wx": model.wx.tolist(), "wy": model.wy.tolist(), "wz": model.wz.tolist()}
    elif isinstance(model, EntangledPerceptron):
        payload = {"kind": "entangled", "dim": model.dim, "bias": model.bias_enabled,
                   "eigen_floor": model.eigen_floor,
                   "w": [[[c.real, c.imag] for c in row] for row in model.w]}
    else:
        raise TypeError(f"unknown model type {type(model).__name__}")
    return json.dumps(payload)


def model_from_json(text: str):
    payload = json.loads(text)
    kind = payload["kind"]
    if kind == "classical":
        return ClassicalPerceptron(w=np.array(payload["w"]), bias_enabled=payload["bias"])
    if kind == "qubit":
        return QubitPerceptron(wx=np.array(payload["wx"]), wy=np.array(payload["wy"]),
                               wz=np.array(payload["wz"]), bias_enabled=payload["bias"])
    if kind == "entangled":
        w = np.array([[complex(re, im) for re, im in row] for row in payload["w"]])
        return EntangledPerceptron(w=w, bias_enabled=payload["bias"],
                                   eigen_floor=payload["eigen_floor"])
    raise ValueError(f"unknown model kind {kind!r}")
