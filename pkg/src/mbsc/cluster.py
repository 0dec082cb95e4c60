"""Two-mode states, the CZ gate and the hidden logical cluster state.

For ``g = 1`` and ``alpha = sqrt(pi)`` the CV controlled-Z phase
``exp(i s_1 s_2)`` factors over the subsystem labels into

    exp(i pi ell_1 ell_2)                            logical CZ
    exp(i sqrt(pi) (ell_1 u_2 + ell_2 u_1))          logical-gauge coupling
    exp(i u_1 u_2)                                   gauge-gauge
    exp(2 i sqrt(pi) (m_1 u_2 + m_2 u_1))            gauge-gauge

because the remaining cross terms are integer multiples of ``2 pi``.  A
modular-position measurement followed by a shift to ``u = 0`` removes the
logical-gauge coupling of the measured mode, up to a known momentum kick on
its partner that feed-forward undoes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import (
    KET_PLUS,
    LOGICAL_CZ,
    LogicalDensityMatrix,
    entropy_bits,
    gauge_trace_two_mode,
    logical_fidelity,
    pure_density,
    purity,
    von_neumann_entropy,
    _logical_layout,
)
from .errors import (
    ConfigurationError,
    DomainError,
    EdgeSpillError,
    ResourceGuardError,
)
from .modular import SQRT_PI, BinSpec, labels_array
from .states import (
    NORM_TOL,
    SPILL_TOL,
    ModeWavefunction,
    PositionGrid,
    momentum_squeezed_state,
    shift_array,
)

MAX_AMPLITUDES = 2**24


def check_memory(grid1: PositionGrid, grid2: PositionGrid, max_amplitudes: int = MAX_AMPLITUDES):
    n = grid1.size * grid2.size
    if n > max_amplitudes:
        raise ResourceGuardError(
            f"two-mode grid needs {n} amplitudes ({16 * n / 2**20:.0f} MiB), "
            f"limit is {max_amplitudes}; reduce points_per_bin/n_bins or raise the limit"
        )


@dataclass(frozen=True, eq=False)
class TwoModeState:
    grid1: PositionGrid
    grid2: PositionGrid
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid1.size, self.grid2.size):
            raise ConfigurationError(
                f"expected amplitude shape {(self.grid1.size, self.grid2.size)}, got {amps.shape}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    def grid(self, mode: int) -> PositionGrid:
        return (self.grid1, self.grid2)[_axis(mode)]

    def norm_squared(self) -> float:
        w = self.grid1.spacing * self.grid2.spacing
        return float(w * np.sum(np.abs(self.amplitudes) ** 2))

    def normalized(self) -> "TwoModeState":
        n2 = self.norm_squared()
        if not n2 > 0:
            raise DomainError("cannot normalize a zero state")
        return TwoModeState(self.grid1, self.grid2, self.amplitudes / math.sqrt(n2))


def _axis(mode: int) -> int:
    if mode not in (1, 2):
        raise DomainError(f"mode must be 1 or 2, got {mode!r}")
    return mode - 1


@dataclass(frozen=True, eq=False)
class GraphAdjacency:
    weights: np.ndarray

    def __post_init__(self):
        v = np.array(self.weights, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1] or v.shape[0] < 1:
            raise DomainError("adjacency matrix must be square and non-empty")
        if not np.array_equal(v, v.T):
            raise DomainError("adjacency matrix must be symmetric")
        if np.any(np.diag(v) != 0):
            raise DomainError("adjacency matrix must have zero diagonal")
        v.flags.writeable = False
        object.__setattr__(self, "weights", v)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def binary(self) -> bool:
        return bool(np.all((self.weights == 0) | (self.weights == 1)))

    def edges(self):
        j, k = np.nonzero(np.triu(self.weights, 1))
        return list(zip(j.tolist(), k.tolist()))


def linear_graph(n: int) -> GraphAdjacency:
    v = np.zeros((n, n))
    for j in range(n - 1):
        v[j, j + 1] = v[j + 1, j] = 1
    return GraphAdjacency(v)


def product_state(psi1: ModeWavefunction, psi2: ModeWavefunction,
                  max_amplitudes: int = MAX_AMPLITUDES) -> TwoModeState:
    check_memory(psi1.grid, psi2.grid, max_amplitudes)
    return TwoModeState(psi1.grid, psi2.grid, np.outer(psi1.amplitudes, psi2.amplitudes))


def apply_cz(state: TwoModeState, g: float) -> TwoModeState:
    """``exp(i g q1 q2)``, diagonal in position."""
    phase = np.exp(1j * g * np.multiply.outer(state.grid1.positions, state.grid2.positions))
    return TwoModeState(state.grid1, state.grid2, phase * state.amplitudes)


def decomposed_cz_phase(ell1, m1, u1, ell2, m2, u2):
    """Product of the four surviving subsystem phases of ``CZ[1]`` at ``alpha = sqrt(pi)``."""
    return (
        np.exp(1j * math.pi * ell1 * ell2)
        * np.exp(1j * SQRT_PI * (ell1 * u2 + ell2 * u1))
        * np.exp(1j * u1 * u2)
        * np.exp(2j * SQRT_PI * (m1 * u2 + m2 * u1))
    )


def apply_cz_decomposed(state: TwoModeState) -> TwoModeState:
    """``CZ[1]`` assembled from its subsystem factors using exact grid labels."""
    for grid in (state.grid1, state.grid2):
        if grid.alpha != SQRT_PI:
            raise DomainError("the CZ[1] factorization requires alpha = sqrt(pi)")
    parts = []
    for grid in (state.grid1, state.grid2):
        _, r, ell, mg = grid.labels
        parts.append((ell.astype(float), mg.astype(float), r * grid.spacing))
    (l1, m1, u1), (l2, m2, u2) = parts
    phase = decomposed_cz_phase(
        l1[:, None], m1[:, None], u1[:, None], l2[None, :], m2[None, :], u2[None, :]
    )
    return TwoModeState(state.grid1, state.grid2, phase * state.amplitudes)


def phase_identity_check(samples, alpha: float = SQRT_PI, graph: GraphAdjacency | None = None) -> float:
    """Largest ``|exp(i s_j s_k) - decomposed phase|`` over samples and graph edges.

    ``samples`` has shape ``(n_samples, n_modes)``; the graph defaults to a
    linear chain over the modes.
    """
    if alpha != SQRT_PI:
        raise DomainError("the CZ[1] factorization is specific to alpha = sqrt(pi)")
    s = np.atleast_2d(np.asarray(samples, dtype=float))
    graph = graph or linear_graph(s.shape[1])
    if graph.n != s.shape[1]:
        raise DomainError(f"graph has {graph.n} modes, samples have {s.shape[1]}")
    if not graph.binary:
        raise DomainError("the hidden-cluster factorization needs a binary adjacency matrix")
    ell, mg, u = labels_array(s, BinSpec(alpha))
    worst = 0.0
    for j, k in graph.edges():
        direct = np.exp(1j * s[:, j] * s[:, k])
        split = decomposed_cz_phase(ell[:, j], mg[:, j], u[:, j], ell[:, k], mg[:, k], u[:, k])
        if s.shape[0]:
            worst = max(worst, float(np.max(np.abs(direct - split))))
    return worst


def apply_two_mode_shift(state: TwoModeState, mode: int, shift_steps: int) -> TwoModeState:
    """Position shift of one mode by an integer number of grid steps."""
    axis = _axis(mode)
    steps = int(shift_steps)
    n = state.amplitudes.shape[axis]
    if abs(steps) >= n:
        raise EdgeSpillError(f"shift of {steps} steps exceeds the grid size {n}")
    amps = state.amplitudes
    if steps:
        edge = slice(n - steps, n) if steps > 0 else slice(0, -steps)
        lost = amps[edge] if axis == 0 else amps[:, edge]
        spill = math.sqrt(state.grid1.spacing * state.grid2.spacing * float(np.sum(np.abs(lost) ** 2)))
        if spill >= SPILL_TOL:
            raise EdgeSpillError(
                f"shift of {steps} steps on mode {mode} pushes norm {spill:.3g} past the grid edge"
            )
    return TwoModeState(state.grid1, state.grid2, shift_array(amps, steps, axis))


def apply_two_mode_momentum_phase(state: TwoModeState, mode: int, t: float) -> TwoModeState:
    axis = _axis(mode)
    phase = np.exp(1j * t * state.grid(mode).positions)
    amps = state.amplitudes * (phase[:, None] if axis == 0 else phase[None, :])
    return TwoModeState(state.grid1, state.grid2, amps)


def class_probabilities(state: TwoModeState, mode: int) -> np.ndarray:
    """Probability of each modular class ``r = -K/2 .. K/2-1`` on ``mode``."""
    axis = _axis(mode)
    grid = state.grid(mode)
    k = grid.points_per_bin
    other = state.grid(3 - mode)
    marginal = other.spacing * np.sum(np.abs(state.amplitudes) ** 2, axis=1 - axis)
    _, r, _, _ = grid.labels
    return grid.spacing * np.bincount(r + k // 2, weights=marginal, minlength=k)


def modular_measure_and_correct(state: TwoModeState, mode: int, rng=None, outcome_class=None):
    """Measure the modular position of ``mode`` and shift it back to ``u = 0``.

    Exactly one of ``rng`` (a seeded ``numpy.random.Generator``) or
    ``outcome_class`` (``r`` in ``[-K/2, K/2)``, outcome ``u0 = r * spacing``)
    selects the outcome.  Returns ``(state, u0, probability)``.
    """
    if (rng is None) == (outcome_class is None):
        raise DomainError("pass exactly one of rng or outcome_class")
    if abs(state.norm_squared() - 1) > NORM_TOL:
        raise DomainError("measurement needs a normalized state")
    axis = _axis(mode)
    grid = state.grid(mode)
    k = grid.points_per_bin
    probs = class_probabilities(state, mode)
    if outcome_class is None:
        p = np.clip(probs, 0.0, None)
        idx = int(rng.choice(k, p=p / p.sum()))
        r0 = idx - k // 2
    else:
        r0 = int(outcome_class)
        if not -k // 2 <= r0 < k // 2:
            raise DomainError(f"outcome class {r0} outside [{-k // 2}, {k // 2})")
    prob = float(probs[r0 + k // 2])
    if not prob > 0:
        raise DomainError(f"outcome class {r0} has zero probability")
    _, r, _, _ = grid.labels
    keep = (r == r0)
    mask = keep[:, None] if axis == 0 else keep[None, :]
    projected = TwoModeState(state.grid1, state.grid2, np.where(mask, state.amplitudes, 0) / math.sqrt(prob))
    corrected = apply_two_mode_shift(projected, mode, -r0)
    return corrected, r0 * grid.spacing, prob


def logical_gauge_entropy(state: TwoModeState) -> float:
    """Entropy (bits) between both logical qubits and both gauge modes."""
    return von_neumann_entropy(gauge_trace_two_mode(state))


def gauge_entropy(state: TwoModeState, mode: int) -> float:
    """Schmidt entropy (bits) of gauge mode ``mode`` against everything else."""
    axis = _axis(mode)
    amps = state.amplitudes if axis == 0 else state.amplitudes.T
    grid = state.grid(mode)
    targets, width = _logical_layout(grid)
    padded = np.zeros((2 * width, amps.shape[1]), dtype=complex)
    padded[targets] = amps
    mat = padded.reshape(2, width, -1).transpose(1, 0, 2).reshape(width, -1)
    sv = np.linalg.svd(mat, compute_uv=False)
    p = state.grid1.spacing * state.grid2.spacing * sv**2
    return entropy_bits(p / p.sum())


def mode_logical_state(state: TwoModeState, mode: int) -> LogicalDensityMatrix:
    """Reduced logical qubit of one mode."""
    rho = gauge_trace_two_mode(state).entries.reshape(2, 2, 2, 2)
    red = np.einsum("abcb->ac", rho) if mode == 1 else np.einsum("abad->bd", rho)
    return LogicalDensityMatrix(red)


def cluster_target() -> LogicalDensityMatrix:
    """``CZ |++>`` on two logical qubits."""
    return pure_density(LOGICAL_CZ @ np.kron(KET_PLUS, KET_PLUS))


def cluster_grid(position_std: float, points_per_bin: int = 16, n_bins: int | None = None) -> PositionGrid:
    """Grid for a momentum-squeezed mode; the default keeps 11 sigma of guard band."""
    if n_bins is None:
        n_bins = max(8, math.ceil(22 * position_std / SQRT_PI))
        n_bins += n_bins % 2
    return PositionGrid(BinSpec(SQRT_PI), points_per_bin, n_bins)


def _stage(name: str, state: TwoModeState, target) -> dict:
    rho = gauge_trace_two_mode(state)
    return {
        "stage": name,
        "rho_LL": rho.to_dict(),
        "fidelity_cluster": logical_fidelity(rho, target),
        "purity": purity(rho),
        "logical_gauge_entropy": von_neumann_entropy(rho),
        "gauge_entropy": [gauge_entropy(state, 1), gauge_entropy(state, 2)],
    }


def hidden_cluster_experiment(
    position_std: float,
    points_per_bin: int = 16,
    n_bins: int | None = None,
    seed: int = 0,
    outcome_classes=None,
    feedforward: bool = True,
    max_amplitudes: int = MAX_AMPLITUDES,
) -> dict:
    """Two momentum-squeezed modes, ``CZ[1]``, then modular measurement of each mode.

    ``position_std`` is the position standard deviation of each input mode.
    With ``feedforward`` the known momentum kick ``-u0`` from each outcome is
    applied to the partner mode.  ``outcome_classes`` fixes the measured
    class of both modes instead of sampling.
    """
    grid = cluster_grid(position_std, points_per_bin, n_bins)
    check_memory(grid, grid, max_amplitudes)
    p_variance = 1.0 / (4.0 * position_std**2)
    mode = momentum_squeezed_state(grid, p_variance)
    rng = np.random.default_rng(seed)
    target = cluster_target()

    state = product_state(mode, mode, max_amplitudes)
    stages = [_stage("input", state, target)]
    state = apply_cz(state, 1.0)
    stages.append(_stage("after_cz", state, target))
    measurements = []
    for m in (1, 2):
        if outcome_classes is None:
            state, u0, prob = modular_measure_and_correct(state, m, rng=rng)
        else:
            state, u0, prob = modular_measure_and_correct(state, m, outcome_class=outcome_classes[m - 1])
        kick = (-u0 if feedforward else 0.0) + 0.0
        if kick:
            state = apply_two_mode_momentum_phase(state, 3 - m, kick)
        measurements.append({
            "mode": m,
            "class_index": int(round(u0 / grid.spacing)),
            "u0": u0,
            "probability": prob,
            "feedforward_t": kick,
        })
        stages.append(_stage(f"after_mode{m}", state, target))

    final = stages[-1]
    return {
        "inputs": {
            "alpha": grid.alpha,
            "alpha_hex": float.hex(grid.alpha),
            "position_std": position_std,
            "p_variance": p_variance,
            "points_per_bin": grid.points_per_bin,
            "n_bins": grid.n_bins,
            "seed": seed,
            "outcome_classes": None if outcome_classes is None else list(outcome_classes),
            "feedforward": feedforward,
        },
        "target": "CZ|++>",
        "stages": stages,
        "measurements": measurements,
        "final_fidelity": final["fidelity_cluster"],
        "final_purity": final["purity"],
    }
