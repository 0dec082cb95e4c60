"""Single-mode wavefunctions on alpha-commensurate position grids.

Conventions
-----------
* ``hbar = 1`` with ``[q, p] = i``; the vacuum has position variance 1/2.
* Grid positions are ``s_j = (j - N/2) * delta`` with ``delta = alpha / K``
  and ``N = K * B``.  Every ``s_j`` is an integer multiple of ``delta``, so
  ``u = 0`` is always a grid class and a shift by ``alpha`` is exactly ``K``
  steps.  The grid covers ``[-B*alpha/2, B*alpha/2)``; the two outermost
  bins are half bins.
* Amplitudes carry units of ``position**-1/2``; inner products use the
  rectangle rule ``delta * sum(conj(a) * b)``.
* The grid has hard walls.  Shifts that would push more than ``1e-12`` of
  norm past an edge raise :class:`EdgeSpillError` instead of wrapping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    ConfigurationError,
    DomainError,
    EdgeSpillError,
    GridMismatchError,
    ResolutionError,
)
from .modular import BinSpec, index_labels

NORM_TOL = 1e-10
SPILL_TOL = 1e-12


@dataclass(frozen=True)
class PositionGrid:
    spec: BinSpec
    points_per_bin: int
    n_bins: int

    def __post_init__(self):
        k, b = self.points_per_bin, self.n_bins
        if int(k) != k or k < 2 or k % 2:
            raise ConfigurationError(f"points_per_bin must be an even integer >= 2, got {k!r}")
        if int(b) != b or b < 2 or b % 2:
            raise ConfigurationError(f"n_bins must be an even integer >= 2, got {b!r}")
        object.__setattr__(self, "points_per_bin", int(k))
        object.__setattr__(self, "n_bins", int(b))

    @property
    def alpha(self) -> float:
        return self.spec.alpha

    @property
    def spacing(self) -> float:
        return self.spec.alpha / self.points_per_bin

    @property
    def size(self) -> int:
        return self.points_per_bin * self.n_bins

    @property
    def half_extent(self) -> float:
        return 0.5 * self.n_bins * self.spec.alpha

    @cached_property
    def offsets(self) -> np.ndarray:
        """Integer position of each grid point in units of the spacing."""
        i = np.arange(self.size, dtype=np.int64) - self.size // 2
        i.flags.writeable = False
        return i

    @cached_property
    def positions(self) -> np.ndarray:
        s = self.offsets * self.spacing
        s.flags.writeable = False
        return s

    @cached_property
    def labels(self):
        """Exact ``(m, r, ell, m_gauge)`` integer arrays for every grid point."""
        out = index_labels(self.offsets, self.points_per_bin)
        for a in out:
            a.flags.writeable = False
        return out


def make_grid(alpha: float, points_per_bin: int, n_bins: int) -> PositionGrid:
    return PositionGrid(BinSpec(alpha), points_per_bin, n_bins)


@dataclass(frozen=True, eq=False)
class ModeWavefunction:
    grid: PositionGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.size,):
            raise ConfigurationError(
                f"expected {self.grid.size} amplitudes, got shape {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def positions(self) -> np.ndarray:
        return self.grid.positions

    def norm_squared(self) -> float:
        return float(self.grid.spacing * np.sum(np.abs(self.amplitudes) ** 2))

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= tol

    def normalized(self) -> "ModeWavefunction":
        n2 = self.norm_squared()
        if not n2 > 0:
            raise DomainError("cannot normalize a zero state")
        return ModeWavefunction(self.grid, self.amplitudes / math.sqrt(n2))


def from_function(grid: PositionGrid, func, normalize: bool = True) -> ModeWavefunction:
    """Sample ``func(s)`` on the grid."""
    state = ModeWavefunction(grid, func(grid.positions))
    return state.normalized() if normalize else state


def gaussian_state(grid: PositionGrid, center: float, variance: float) -> ModeWavefunction:
    """Real Gaussian whose probability density has the given position variance."""
    if not variance > 0:
        raise DomainError(f"variance must be positive, got {variance!r}")
    if not -grid.half_extent <= center < grid.half_extent:
        raise DomainError(f"center {center!r} outside the grid extent")
    sigma = math.sqrt(variance)
    s = grid.positions
    inside = np.count_nonzero(np.abs(s - center) <= 3 * sigma)
    if inside < 4:
        raise ResolutionError(
            f"only {inside} grid points within 3 sigma; need spacing <= {1.5 * sigma:.3g} "
            f"(points_per_bin >= {math.ceil(grid.alpha / (1.5 * sigma))})"
        )
    return from_function(grid, lambda x: np.exp(-((x - center) ** 2) / (4 * variance)))


def momentum_squeezed_state(grid: PositionGrid, p_variance: float) -> ModeWavefunction:
    """Finite-squeezing stand-in for the zero-momentum eigenstate.

    The position variance is ``1 / (4 * p_variance)`` (minimum uncertainty,
    ``hbar = 1``).
    """
    if not p_variance > 0:
        raise DomainError(f"p_variance must be positive, got {p_variance!r}")
    q_variance = 1.0 / (4.0 * p_variance)
    sigma = math.sqrt(q_variance)
    if 3 * sigma > grid.half_extent:
        need = 2 * math.ceil(3 * sigma / grid.alpha)
        raise ResolutionError(
            f"3 sigma = {3 * sigma:.4g} exceeds grid half extent {grid.half_extent:.4g}; "
            f"need n_bins >= {need}"
        )
    return gaussian_state(grid, 0.0, q_variance)


def squeezing_db_to_p_variance(db: float) -> float:
    """Momentum variance for ``db`` decibels of squeezing below vacuum."""
    return 0.5 * 10.0 ** (-db / 10.0)


def _spill_norm(amps: np.ndarray, steps: int, spacing: float) -> float:
    if steps > 0:
        lost = amps[-steps:]
    elif steps < 0:
        lost = amps[:-steps]
    else:
        return 0.0
    return math.sqrt(spacing * float(np.sum(np.abs(lost) ** 2)))


def shift_array(amps: np.ndarray, steps: int, axis: int = 0) -> np.ndarray:
    """Translate along ``axis`` by ``steps`` indices, filling with zeros."""
    out = np.zeros_like(amps)
    n = amps.shape[axis]
    if abs(steps) >= n:
        return out
    src = [slice(None)] * amps.ndim
    dst = [slice(None)] * amps.ndim
    if steps >= 0:
        src[axis], dst[axis] = slice(0, n - steps), slice(steps, n)
    else:
        src[axis], dst[axis] = slice(-steps, n), slice(0, n + steps)
    out[tuple(dst)] = amps[tuple(src)]
    return out


def apply_position_shift(state: ModeWavefunction, shift_steps: int) -> ModeWavefunction:
    """``X(shift_steps * delta)``: ``psi(s) -> psi(s - shift_steps * delta)``."""
    steps = int(shift_steps)
    grid = state.grid
    if abs(steps) >= grid.size:
        raise EdgeSpillError(f"shift of {steps} steps exceeds the grid size {grid.size}")
    spill = _spill_norm(state.amplitudes, steps, grid.spacing)
    if spill >= SPILL_TOL:
        raise EdgeSpillError(
            f"shift of {steps} steps pushes norm {spill:.3g} past the grid edge; enlarge n_bins"
        )
    return ModeWavefunction(grid, shift_array(state.amplitudes, steps))


def apply_momentum_phase(state: ModeWavefunction, t: float) -> ModeWavefunction:
    """``Z(t) = exp(i t q)``, exact on the grid."""
    return ModeWavefunction(state.grid, np.exp(1j * t * state.positions) * state.amplitudes)


def inner_product(a: ModeWavefunction, b: ModeWavefunction) -> complex:
    if a.grid != b.grid:
        raise GridMismatchError("states live on different grids")
    return complex(a.grid.spacing * np.vdot(a.amplitudes, b.amplitudes))


# --- serialization -------------------------------------------------------

_HEADER = "# mbsc wavefunction v1"


def dumps_wavefunction(state: ModeWavefunction) -> str:
    g = state.grid
    lines = [
        _HEADER,
        f"# alpha = {float.hex(g.alpha)}",
        f"# points_per_bin = {g.points_per_bin}",
        f"# n_bins = {g.n_bins}",
        "s,re,im",
    ]
    for s, a in zip(g.positions, state.amplitudes):
        lines.append(f"{float(s)!r},{float(a.real)!r},{float(a.imag)!r}")
    return "\n".join(lines) + "\n"


def loads_wavefunction(text: str) -> ModeWavefunction:
    header = {}
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep:
                header[key.strip()] = value.strip()
            continue
        if line == "s,re,im":
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ConfigurationError(f"malformed wavefunction row: {line!r}")
        rows.append((float(parts[1]), float(parts[2])))
    try:
        alpha = float.fromhex(header["alpha"])
        k = int(header["points_per_bin"])
        b = int(header["n_bins"])
    except (KeyError, ValueError) as exc:
        raise ConfigurationError(f"malformed wavefunction header: {exc}") from None
    grid = make_grid(alpha, k, b)
    if len(rows) != grid.size:
        raise ConfigurationError(f"expected {grid.size} rows, found {len(rows)}")
    arr = np.array(rows, dtype=float)
    return ModeWavefunction(grid, arr[:, 0] + 1j * arr[:, 1])


def save_wavefunction(state: ModeWavefunction, path) -> None:
    Path(path).write_text(dumps_wavefunction(state), encoding="utf-8")


def load_wavefunction(path) -> ModeWavefunction:
    return loads_wavefunction(Path(path).read_text(encoding="utf-8"))
