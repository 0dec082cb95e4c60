"""Approximate GKP states built from truncated Jacobi theta series.

The approximate codeword wavefunction is

    psi(s) = exp(-kappa**2 s**2 / 2) [a theta(s/2alpha, tau) + b theta((s - alpha)/2alpha, tau)]

with ``tau = i pi Delta**2 / (2 alpha**2)``: a comb of Gaussian spikes of
amplitude width ``Delta`` and period ``2 alpha`` under a Gaussian envelope of
inverse width ``kappa``.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields

import numpy as np

from .analysis import (
    KET0,
    KET1,
    KET_PLUS,
    LogicalDensityMatrix,
    bloch_vector,
    gauge_trace,
    logical_fidelity,
    pure_density,
    purity,
    schmidt_data,
)
from .errors import ConfigurationError, DomainError, MbscError, ResolutionError
from .modular import BinSpec
from .states import ModeWavefunction, PositionGrid, from_function

_TAIL_DIGITS = 16


def theta_terms(tau: complex) -> int:
    """Truncation ``M`` so that every dropped term of the series is below ``1e-16``.

    ``|exp(i pi m^2 tau)| = exp(-pi m^2 Im tau)`` for real ``z``.
    """
    im = complex(tau).imag
    if not im > 0:
        raise DomainError(f"theta series needs Im(tau) > 0, got {tau!r}")
    return math.ceil(math.sqrt(_TAIL_DIGITS * math.log(10) / (math.pi * im))) + 2


def theta3(z, tau: complex, terms: int | None = None):
    """Jacobi theta function ``sum_m exp(2 pi i (m^2 tau / 2 + m z))``.

    ``z`` may be a scalar or an array; the truncation is fixed per ``tau``.
    """
    tau = complex(tau)
    M = theta_terms(tau) if terms is None else int(terms)
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=float)
    total = np.zeros(z.shape, dtype=complex)
    # tails first: smallest terms are added before the O(1) ones
    for m in sorted(range(-M, M + 1), key=lambda m: (-abs(m), m)):
        total += cmath.exp(1j * math.pi * m * m * tau) * np.exp(2j * math.pi * m * z)
    return complex(total) if scalar else total


@dataclass(frozen=True)
class ApproxGkpParams:
    a: complex
    b: complex
    delta: float
    kappa: float
    spec: BinSpec = BinSpec(math.sqrt(math.pi))

    def __post_init__(self):
        if not self.delta > 0 or not self.kappa > 0:
            raise DomainError("delta and kappa must be positive")
        n = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(n - 1) > 1e-12:
            raise DomainError(f"|a|^2 + |b|^2 = {n!r}, expected 1")

    @classmethod
    def plus(cls, delta, kappa, spec=None):
        r = 1 / math.sqrt(2)
        return cls(r, r, delta, kappa, spec or BinSpec(math.sqrt(math.pi)))

    @property
    def alpha(self) -> float:
        return self.spec.alpha

    @property
    def tau_delta(self) -> complex:
        return 1j * math.pi * self.delta**2 / (2 * self.alpha**2)

    @property
    def small_spike_regime(self) -> bool:
        return self.delta <= self.alpha / 10

    def intended_state(self) -> LogicalDensityMatrix:
        return pure_density([self.a, self.b])


def gkp_bracket(s, a, b, delta: float, alpha: float):
    """Unnormalized, envelope-free comb ``a theta(s/2alpha) + b theta((s-alpha)/2alpha)``."""
    tau = 1j * math.pi * delta**2 / (2 * alpha**2)
    s = np.asarray(s, dtype=float)
    return a * theta3(s / (2 * alpha), tau) + b * theta3((s - alpha) / (2 * alpha), tau)


def auto_grid(delta: float, kappa: float, spec: BinSpec) -> PositionGrid:
    """Grid that resolves spikes (``delta/spacing >= 8``) and the envelope (half extent ``>= 8/kappa``)."""
    alpha = spec.alpha
    k = max(32, math.ceil(8 * alpha / delta))
    k += k % 2
    extent = max(16 / kappa, 8 * alpha)
    b = math.ceil(extent / alpha)
    b += b % 2
    return PositionGrid(spec, k, b)


def approx_gkp_state(grid: PositionGrid, params: ApproxGkpParams) -> ModeWavefunction:
    if grid.spec != params.spec:
        raise ConfigurationError("grid and parameters use different bin sizes")
    need_k = math.ceil(4 * grid.alpha / params.delta)
    if grid.spacing > params.delta / 4:
        raise ResolutionError(
            f"spacing {grid.spacing:.4g} > delta/4; need points_per_bin >= {need_k + need_k % 2}"
        )
    if grid.half_extent < 3 / params.kappa:
        need_b = math.ceil(6 / params.kappa / grid.alpha)
        raise ResolutionError(
            f"grid half extent {grid.half_extent:.4g} < 3/kappa; need n_bins >= {need_b + need_b % 2}"
        )
    kappa = params.kappa

    def psi(s):
        env = np.exp(-0.5 * kappa**2 * s**2)
        return env * gkp_bracket(s, params.a, params.b, params.delta, params.alpha)

    return from_function(grid, psi)


def small_spike_logical_state(params: ApproxGkpParams) -> LogicalDensityMatrix:
    """Closed-form logical state of an approximate GKP state with ``delta << alpha``.

    Uses the dimensionless ``tau' = i pi (delta**2 + kappa**-2) / (4 alpha**2)``,
    which makes the closed form agree with the numerical gauge trace up to
    spike-overlap terms of order ``exp(-alpha**2 / (4 delta**2))``.  For
    ``a = b`` the unit-trace normalization ``(theta(0) + theta(1/2)) / 2``
    equals ``theta(0, 4 tau')``.
    """
    alpha, kappa, delta = params.alpha, params.kappa, params.delta
    flags = ()
    if not params.small_spike_regime:
        flags = ("delta>alpha/10",)
        warnings.warn(
            f"delta={delta} exceeds alpha/10; small-spike closed form is unreliable",
            stacklevel=2,
        )
    tp = 1j * math.pi * (delta**2 + kappa**-2) / (4 * alpha**2)
    damp = math.exp(-(alpha**2) * kappa**2 / 4)
    t0 = theta3(0.0, tp).real
    t_quarter = theta3(0.25, tp).real
    t_half = theta3(0.5, tp).real
    a, b = complex(params.a), complex(params.b)
    rho = np.array(
        [
            [abs(a) ** 2 * t0, a * b.conjugate() * damp * t_quarter],
            [b * a.conjugate() * damp * t_quarter, abs(b) ** 2 * t_half],
        ]
    )
    return LogicalDensityMatrix(rho / (abs(a) ** 2 * t0 + abs(b) ** 2 * t_half), flags)


@dataclass(frozen=True)
class SweepRecord:
    kappa: float
    bloch_x: float
    bloch_y: float
    bloch_z: float
    fidelity_plus: float
    purity: float
    schmidt_entropy: float
    status: str = "ok"


SWEEP_COLUMNS = tuple(f.name for f in fields(SweepRecord))


def sweep_point(delta: float, kappa: float, spec: BinSpec, grid: PositionGrid | None = None) -> SweepRecord:
    try:
        params = ApproxGkpParams.plus(delta, kappa, spec)
        g = grid if grid is not None else auto_grid(delta, kappa, spec)
        state = approx_gkp_state(g, params)
        rho = gauge_trace(state)
        x, y, z = bloch_vector(rho)
        return SweepRecord(
            kappa, x, y, z,
            logical_fidelity(rho, pure_density(KET_PLUS)),
            purity(rho),
            schmidt_data(state).entropy,
        )
    except MbscError as exc:
        nan = float("nan")
        return SweepRecord(kappa, nan, nan, nan, nan, nan, nan, f"error: {exc}")


def kappa_sweep(delta, kappas, spec: BinSpec, grid_policy=None, jobs: int = 1) -> list:
    """Logical diagnostics of approximate ``|+>`` states over envelope widths.

    ``grid_policy`` maps ``kappa`` to a :class:`PositionGrid`; it defaults to
    :func:`auto_grid`.  Output order follows ``kappas``.
    """
    policy = grid_policy or (lambda k: auto_grid(delta, k, spec))

    def run(kappa):
        try:
            grid = policy(kappa)
        except MbscError as exc:
            nan = float("nan")
            return SweepRecord(kappa, nan, nan, nan, nan, nan, nan, f"error: {exc}")
        return sweep_point(delta, kappa, spec, grid)

    kappas = [float(k) for k in kappas]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(run, kappas))
    return [run(k) for k in kappas]


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for rec in records:
        row = astuple(rec)
        writer.writerow([f"{v:.17g}" for v in row[:-1]] + [row[-1]])
    return buf.getvalue()


def codeword_fidelities(rho) -> dict:
    """Fidelity of ``rho`` with the logical ``|0>``, ``|1>`` and ``|+>``."""
    return {
        "zero": logical_fidelity(rho, pure_density(KET0)),
        "one": logical_fidelity(rho, pure_density(KET1)),
        "plus": logical_fidelity(rho, pure_density(KET_PLUS)),
    }
