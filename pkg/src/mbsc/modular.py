"""Centered modular arithmetic on positions and grid indices.

A position ``s`` splits with respect to a bin size ``alpha`` as
``s = alpha*m + u`` with ``m = floor(s/alpha + 1/2)`` and
``u in [-alpha/2, alpha/2)``.  The bin number further splits by parity,
``m = 2*m_gauge + ell``, which gives the three subsystem labels
``(ell, m_gauge, u_gauge)``.

Parity uses the Euclidean convention, so ``ell`` is always 0 or 1 and
``m = 2*m_gauge + ell`` holds for negative ``m`` as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class BinSpec:
    """Bin size used for every modular split."""

    alpha: float

    def __post_init__(self):
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0:
            raise DomainError(f"bin size must be positive and finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def half(self) -> float:
        return 0.5 * self.alpha


@dataclass(frozen=True)
class BinDecomposition:
    m: int
    u: float


@dataclass(frozen=True)
class SubsystemLabels:
    ell: int
    m_gauge: int
    u_gauge: float


def _check_finite(s) -> float:
    s = float(s)
    if not math.isfinite(s):
        raise DomainError(f"position must be finite, got {s!r}")
    return s


def decompose(s: float, spec: BinSpec) -> BinDecomposition:
    """Split ``s`` into bin number ``m`` and modular position ``u``.

    Boundary points ``(m + 1/2)*alpha`` belong to bin ``m + 1``.
    """
    s = _check_finite(s)
    alpha = spec.alpha
    m = math.floor(s / alpha + 0.5)
    u = s - alpha * m
    # s/alpha rounding can land one bin off near a boundary
    if u < -0.5 * alpha:
        m -= 1
        u = s - alpha * m
    elif u >= 0.5 * alpha:
        m += 1
        u = s - alpha * m
    # within rounding of a boundary neither bin fits: boundary goes up
    if u >= 0.5 * alpha:
        m += 1
        u = -0.5 * alpha
    elif u < -0.5 * alpha:
        u = -0.5 * alpha
    return BinDecomposition(int(m), u)


def subsystem_labels(s: float, spec: BinSpec) -> SubsystemLabels:
    d = decompose(s, spec)
    ell = d.m % 2
    return SubsystemLabels(ell, (d.m - ell) // 2, d.u)


def recompose(labels: SubsystemLabels, spec: BinSpec) -> float:
    """Inverse of :func:`subsystem_labels`."""
    if labels.ell not in (0, 1):
        raise DomainError(f"logical label must be 0 or 1, got {labels.ell!r}")
    u = float(labels.u_gauge)
    if not (-spec.half <= u < spec.half):
        raise DomainError(f"gauge modular position {u!r} outside [-alpha/2, alpha/2)")
    m = labels.ell + 2 * labels.m_gauge
    return spec.alpha * m + u


def decompose_array(s, spec: BinSpec):
    """Vectorized :func:`decompose`; returns integer ``m`` and float ``u`` arrays."""
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)):
        raise DomainError("positions must be finite")
    alpha = spec.alpha
    m = np.floor(s / alpha + 0.5)
    u = s - alpha * m
    m = m - (u < -0.5 * alpha) + (u >= 0.5 * alpha)
    u = s - alpha * m
    up = u >= 0.5 * alpha
    m = m + up
    u = np.where(up | (u < -0.5 * alpha), -0.5 * alpha, u)
    return m.astype(np.int64), u


def labels_array(s, spec: BinSpec):
    """Vectorized :func:`subsystem_labels`; returns ``(ell, m_gauge, u_gauge)``."""
    m, u = decompose_array(s, spec)
    ell = np.mod(m, 2)
    return ell, (m - ell) // 2, u


def index_labels(offsets, points_per_bin: int):
    """Exact labels for integer grid offsets ``i`` (position ``i*alpha/K``).

    Returns ``(m, r, ell, m_gauge)`` with ``i = m*K + r`` and
    ``r in [-K/2, K/2)``.  No floating point is involved.
    """
    i = np.asarray(offsets, dtype=np.int64)
    k = int(points_per_bin)
    if k < 2 or k % 2:
        raise DomainError("points per bin must be an even integer >= 2")
    m = np.floor_divide(i + k // 2, k)
    r = i - m * k
    ell = np.mod(m, 2)
    return m, r, ell, (m - ell) // 2
