"""Gauge trace, logical fidelity and derived logical diagnostics.

Pauli conventions follow ``ell = |1><1| = (I - Z)/2``: logical ``|0>`` has
Bloch vector ``(0, 0, 1)``.  The y component is ``Tr(rho Y)`` with the
standard ``Y = [[0, -i], [i, 0]]``, i.e. ``y = 2 Im rho[1, 0]``, giving a
right-handed ``(x, y, z)`` frame.

Two-mode logical matrices are indexed by ``2*ell_1 + ell_2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotNormalizedError
from .states import NORM_TOL, ModeWavefunction, PositionGrid

PSD_TOL = 1e-10

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / math.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
LOGICAL_CZ = np.diag([1, 1, 1, -1]).astype(complex)


@dataclass(frozen=True, eq=False)
class LogicalDensityMatrix:
    entries: np.ndarray
    flags: tuple = ()

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] not in (2, 4):
            raise DomainError(f"logical density matrix must be 2x2 or 4x4, got {rho.shape}")
        rho.flags.writeable = False
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def check(self, tol: float = PSD_TOL) -> None:
        """Raise :class:`DomainError` unless Hermitian, unit trace and PSD within ``tol``."""
        rho = self.entries
        if np.max(np.abs(rho - rho.conj().T)) > tol:
            raise DomainError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1) > tol:
            raise DomainError(f"density matrix trace {np.trace(rho).real!r} != 1")
        if np.linalg.eigvalsh(rho).min() < -tol:
            raise DomainError("density matrix is not positive semidefinite")

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [[float(z.real), float(z.imag)] for z in self.entries.ravel()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LogicalDensityMatrix":
        dim = int(data["dim"])
        flat = np.array([complex(re, im) for re, im in data["entries"]])
        return cls(flat.reshape(dim, dim))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "LogicalDensityMatrix":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class SchmidtData:
    p_a: float
    p_b: float
    entropy: float


def pure_density(vec) -> LogicalDensityMatrix:
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return LogicalDensityMatrix(np.outer(v, v.conj()))


def rz(theta: float) -> np.ndarray:
    """Logical z rotation ``exp(-i theta Z / 2)``."""
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _hermitian_gram(rows: np.ndarray, weight: float) -> np.ndarray:
    # upper triangle computed, lower mirrored: exactly Hermitian
    d = rows.shape[0]
    out = np.zeros((d, d), dtype=complex)
    for a in range(d):
        out[a, a] = weight * float(np.vdot(rows[a], rows[a]).real)
        for b in range(a + 1, d):
            out[a, b] = weight * np.vdot(rows[b], rows[a])
            out[b, a] = np.conj(out[a, b])
    return out


def _logical_layout(grid: PositionGrid):
    """Flat target index of each grid point in a padded ``(ell, m_gauge, r)`` array.

    Returns ``(targets, width)`` where ``width = n_gauge * K`` and the padded
    array has length ``2 * width``.  Off-grid partners stay zero.
    """
    k = grid.points_per_bin
    _, r, ell, mg = grid.labels
    mg0 = int(mg.min())
    n_gauge = int(mg.max()) - mg0 + 1
    width = n_gauge * k
    targets = ell * width + (mg - mg0) * k + (r + k // 2)
    return targets, width


def logical_rows(state: ModeWavefunction) -> np.ndarray:
    """Amplitudes rearranged as a ``2 x (n_gauge*K)`` matrix indexed by ``ell``."""
    targets, width = _logical_layout(state.grid)
    out = np.zeros(2 * width, dtype=complex)
    out[targets] = state.amplitudes
    return out.reshape(2, width)


def two_mode_logical_rows(grid1: PositionGrid, grid2: PositionGrid, amps: np.ndarray) -> np.ndarray:
    """Two-mode amplitudes as a ``4 x (gauge1 * gauge2)`` matrix indexed by ``2*ell1 + ell2``."""
    t1, w1 = _logical_layout(grid1)
    t2, w2 = _logical_layout(grid2)
    padded = np.zeros((2 * w1, 2 * w2), dtype=complex)
    padded[np.ix_(t1, t2)] = amps
    return padded.reshape(2, w1, 2, w2).transpose(0, 2, 1, 3).reshape(4, w1 * w2)


def _require_normalized(n2: float, auto_normalize: bool) -> float:
    if abs(n2 - 1.0) <= NORM_TOL:
        return 1.0
    if auto_normalize and n2 > 0:
        return 1.0 / n2
    raise NotNormalizedError(f"state has norm^2 = {n2!r}; normalize it first")


def gauge_trace(state: ModeWavefunction, auto_normalize: bool = False) -> LogicalDensityMatrix:
    """Trace out the gauge mode, leaving the 2x2 logical state."""
    scale = _require_normalized(state.norm_squared(), auto_normalize)
    rows = logical_rows(state)
    return LogicalDensityMatrix(_hermitian_gram(rows, state.grid.spacing * scale))


def gauge_trace_two_mode(state, auto_normalize: bool = False) -> LogicalDensityMatrix:
    """Trace out both gauge modes of a two-mode state, leaving a 4x4 logical state."""
    scale = _require_normalized(state.norm_squared(), auto_normalize)
    rows = two_mode_logical_rows(state.grid1, state.grid2, state.amplitudes)
    weight = state.grid1.spacing * state.grid2.spacing * scale
    return LogicalDensityMatrix(_hermitian_gram(rows, weight))


def _drop_noise(w: np.ndarray) -> np.ndarray:
    # eigenvalues at round-off level are zero; their square roots would
    # otherwise inject ~sqrt(eps) errors
    cutoff = w.size * np.finfo(float).eps * max(float(np.max(np.abs(w))), 1e-300)
    return np.where(w > cutoff, w, 0.0)


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    if w.min() < -PSD_TOL:
        raise DomainError(f"matrix has eigenvalue {w.min()!r} below -{PSD_TOL}")
    return (v * np.sqrt(_drop_noise(w))) @ v.conj().T


def _entries(rho) -> np.ndarray:
    return rho.entries if isinstance(rho, LogicalDensityMatrix) else np.asarray(rho, dtype=complex)


def logical_fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))**2``."""
    r, s = _entries(rho), _entries(sigma)
    if r.shape != s.shape:
        raise DomainError(f"dimension mismatch: {r.shape} vs {s.shape}")
    for m in (r, s):
        LogicalDensityMatrix(m).check()
    root = _psd_sqrt(s)
    inner = root @ r @ root
    inner = 0.5 * (inner + inner.conj().T)
    w = _drop_noise(np.linalg.eigvalsh(inner))
    f = float(np.sum(np.sqrt(w)) ** 2)
    return min(max(f, 0.0), 1.0)


def fidelity_2x2(rho, sigma) -> float:
    """Closed form for qubits: ``Tr(rho sigma) + 2 sqrt(det rho det sigma)``."""
    r, s = _entries(rho), _entries(sigma)
    dets = max(float(np.linalg.det(r).real), 0.0) * max(float(np.linalg.det(s).real), 0.0)
    return float(np.trace(r @ s).real) + 2.0 * math.sqrt(dets)


def bloch_vector(rho) -> tuple:
    r = _entries(rho)
    if r.shape != (2, 2):
        raise DomainError("Bloch vector needs a 2x2 density matrix")
    # "+ 0.0" folds negative zero
    return (
        float(2.0 * r[0, 1].real) + 0.0,
        float(2.0 * r[1, 0].imag) + 0.0,
        float((r[0, 0] - r[1, 1]).real) + 0.0,
    )


def purity(rho) -> float:
    r = _entries(rho)
    return float(np.real(np.trace(r @ r)))


def entropy_bits(probabilities) -> float:
    p = np.asarray(probabilities, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p))) if p.size else 0.0


def von_neumann_entropy(rho) -> float:
    w = np.clip(np.linalg.eigvalsh(_entries(rho)), 0.0, None)
    return entropy_bits(w)


def schmidt_data(state: ModeWavefunction) -> SchmidtData:
    """Squared Schmidt coefficients across the logical/gauge cut of a pure state."""
    rho = gauge_trace(state)
    w = np.clip(np.linalg.eigvalsh(rho.entries), 0.0, None)
    w = w / w.sum()
    p_b, p_a = float(w[0]), float(w[1])
    return SchmidtData(p_a, p_b, entropy_bits([p_a, p_b]))
