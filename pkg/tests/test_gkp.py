import cmath
import math

import numpy as np
import pytest

from mbsc.analysis import KET0, KET_PLUS, PAULI_X, gauge_trace, logical_fidelity, pure_density
from mbsc.errors import ConfigurationError, DomainError, ResolutionError
from mbsc.gkp import (
    SWEEP_COLUMNS,
    ApproxGkpParams,
    approx_gkp_state,
    auto_grid,
    codeword_fidelities,
    gkp_bracket,
    kappa_sweep,
    records_to_csv,
    small_spike_logical_state,
    sweep_point,
    theta3,
    theta_terms,
)
from mbsc.modular import SQRT_PI, BinSpec
from mbsc.states import PositionGrid, apply_position_shift, make_grid

# frozen from a 201-term fsum; exact value is 0.91357913815611682...
THETA_HALF_I = 0.9135791381561168

ORACLE_DELTAS = (0.05, 0.1)
ORACLE_KAPPAS = (0.05, 0.3, 0.75, 2.0)

GENERIC_A = math.cos(0.4)
GENERIC_B = math.sin(0.4) * cmath.exp(0.7j)


def numerical_rho(params):
    grid = auto_grid(params.delta, params.kappa, params.spec)
    return gauge_trace(approx_gkp_state(grid, params)).entries


def test_theta_brute_force_value():
    brute = math.fsum(math.exp(-math.pi * m * m) * math.cos(math.pi * m) for m in range(-100, 101))
    assert brute == pytest.approx(THETA_HALF_I, abs=2e-16)
    assert theta3(0.5, 1j) == pytest.approx(THETA_HALF_I, abs=1e-15)


def test_theta_trivial_limits():
    assert theta3(0.0, 40j) == pytest.approx(1.0, abs=1e-15)
    assert theta3(0.3, 1j) == pytest.approx(theta3(1.3, 1j), abs=1e-14)
    with pytest.raises(DomainError):
        theta3(0.0, 0.5)
    with pytest.raises(DomainError):
        theta_terms(-1j)


def test_theta_truncation_converged():
    zs = np.linspace(-1.5, 1.5, 61)
    for tau in (1j * math.pi * 0.05**2 / (2 * math.pi), 0.01j, 0.3j, 2j):
        m = theta_terms(tau)
        base = theta3(zs, tau)
        doubled = theta3(zs, tau, terms=2 * m)
        assert np.all(np.abs(doubled - base) <= 1e-15 * np.maximum(1.0, np.abs(base)))


def test_theta_array_matches_scalar():
    zs = np.array([-0.7, 0.0, 0.25, 0.9])
    arr = theta3(zs, 0.2j)
    assert arr.shape == (4,)
    for z, v in zip(zs, arr):
        assert v == theta3(float(z), 0.2j)


def test_bracket_is_two_alpha_periodic_without_envelope():
    grid = make_grid(SQRT_PI, 64, 12)
    s = grid.positions
    period = 2 * grid.points_per_bin
    f = gkp_bracket(s, GENERIC_A, GENERIC_B, 0.2, SQRT_PI)
    # index shift by 2K is an exact 2 alpha translation on the grid
    assert np.allclose(f[period:], f[:-period], rtol=0, atol=1e-12)


def test_params_validation():
    with pytest.raises(DomainError):
        ApproxGkpParams(1.0, 1.0, 0.1, 0.1)
    with pytest.raises(DomainError):
        ApproxGkpParams(1.0, 0.0, 0.0, 0.1)
    with pytest.raises(DomainError):
        ApproxGkpParams(1.0, 0.0, 0.1, -1.0)
    p = ApproxGkpParams.plus(0.1, 0.3)
    assert p.small_spike_regime
    assert p.tau_delta == pytest.approx(1j * 0.01 / 2)


def test_resolution_errors_name_minimums():
    p = ApproxGkpParams.plus(0.1, 0.3)
    with pytest.raises(ResolutionError, match="points_per_bin >= 72"):
        approx_gkp_state(make_grid(SQRT_PI, 16, 40), p)
    with pytest.raises(ResolutionError, match="n_bins >= 12"):
        approx_gkp_state(make_grid(SQRT_PI, 72, 4), p)
    with pytest.raises(ConfigurationError):
        approx_gkp_state(make_grid(1.0, 72, 40), p)


def test_zero_codeword_example():
    rho = numerical_rho(ApproxGkpParams(1.0, 0.0, 0.1, 0.05))
    assert logical_fidelity(rho, pure_density(KET0)) >= 0.99


@pytest.mark.parametrize("kappa,expected", [(0.05, (1, 0, 0)), (2.0, (0, 0, 1))])
def test_plus_bloch_examples(kappa, expected):
    from mbsc.analysis import bloch_vector

    got = bloch_vector(numerical_rho(ApproxGkpParams.plus(0.1, kappa)))
    assert got == pytest.approx(expected, abs=0.01)


@pytest.mark.parametrize("delta", ORACLE_DELTAS)
@pytest.mark.parametrize("kappa", ORACLE_KAPPAS)
def test_small_spike_closed_form_matches_gauge_trace(delta, kappa):
    p = ApproxGkpParams.plus(delta, kappa)
    closed = small_spike_logical_state(p).entries
    assert np.max(np.abs(closed - numerical_rho(p))) <= 1e-3


def printed_form(p):
    """Closed form with tau' = tau_delta (delta^2 + kappa^-2) / 2, as sometimes quoted."""
    tp = 0.5 * p.tau_delta * (p.delta**2 + p.kappa**-2)
    damp = math.exp(-(p.alpha**2) * p.kappa**2 / 4)
    off = damp * theta3(0.25, tp).real
    rho = np.array([[theta3(0.0, tp).real, off], [off, theta3(0.5, tp).real]])
    return rho / (2 * theta3(0.0, 4 * tp).real)


def test_alternative_tau_prime_disagrees_with_gauge_trace():
    # normalization is consistent (unit trace) but the spike width scale is not
    p = ApproxGkpParams.plus(0.1, 0.3)
    alt = printed_form(p)
    assert np.trace(alt) == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(alt - numerical_rho(p))) > 0.4


def test_closed_form_normalization_identity():
    # theta(0, t) + theta(1/2, t) = 2 theta(0, 4t)
    for t in (0.01j, 0.2j, 1.5j):
        lhs = theta3(0.0, t) + theta3(0.5, t)
        assert lhs == pytest.approx(2 * theta3(0.0, 4 * t), abs=1e-14)


def test_closed_form_limits():
    small = small_spike_logical_state(ApproxGkpParams.plus(0.1, 1e-3)).entries
    assert np.allclose(small, 0.5 * np.ones((2, 2)), atol=1e-6)
    large = small_spike_logical_state(ApproxGkpParams.plus(0.1, 10.0)).entries
    assert large[0, 0].real == pytest.approx(1.0, abs=1e-12)
    assert abs(large[0, 1]) < 1e-12


def test_closed_form_general_amplitudes():
    p = ApproxGkpParams(GENERIC_A, GENERIC_B, 0.05, 0.3)
    closed = small_spike_logical_state(p).entries
    assert np.max(np.abs(closed - numerical_rho(p))) <= 1e-3


def test_closed_form_regime_flag():
    with pytest.warns(UserWarning):
        rho = small_spike_logical_state(ApproxGkpParams.plus(0.5, 0.3))
    assert rho.flags == ("delta>alpha/10",)
    assert small_spike_logical_state(ApproxGkpParams.plus(0.1, 0.3)).flags == ()


def test_limit_sequence_approaches_intended_state():
    fids = []
    for x in (0.4, 0.3, 0.2, 0.1, 0.05):
        p = ApproxGkpParams(GENERIC_A, GENERIC_B, x, x)
        fids.append(logical_fidelity(numerical_rho(p), p.intended_state()))
    assert all(b > a for a, b in zip(fids, fids[1:]))
    assert fids[-1] > 0.999


def test_logical_x_covariance_generic_amplitudes():
    p = ApproxGkpParams(GENERIC_A, GENERIC_B, 0.1, 0.3)
    grid = auto_grid(0.1, 0.3, p.spec)
    psi = approx_gkp_state(grid, p)
    rho = gauge_trace(psi).entries
    shifted = gauge_trace(apply_position_shift(psi, grid.points_per_bin)).entries
    assert np.max(np.abs(shifted - PAULI_X @ rho @ PAULI_X)) <= 1e-3


def test_auto_grid_policy():
    g = auto_grid(0.1, 0.05, BinSpec(SQRT_PI))
    assert g.points_per_bin % 2 == 0 and g.points_per_bin >= 8 * SQRT_PI / 0.1
    assert g.half_extent >= 8 / 0.05
    g = auto_grid(0.5, 3.0, BinSpec(SQRT_PI))
    assert g.points_per_bin == 32
    assert g.half_extent >= 4 * SQRT_PI


def test_sweep_regime_examples():
    spec = BinSpec(SQRT_PI)
    wide = sweep_point(0.1, 0.05, spec)
    assert wide.status == "ok"
    assert wide.fidelity_plus >= 0.99 and wide.purity >= 0.99
    narrow = sweep_point(0.1, 2.0, spec)
    assert narrow.fidelity_plus == pytest.approx(0.5, abs=0.05)
    assert narrow.purity >= 0.95


def test_sweep_order_and_parallel_determinism():
    spec = BinSpec(SQRT_PI)
    kappas = [2.0, 0.5, 1.0]
    serial = kappa_sweep(0.1, kappas, spec)
    threaded = kappa_sweep(0.1, kappas, spec, jobs=3)
    assert [r.kappa for r in serial] == kappas
    assert records_to_csv(serial) == records_to_csv(threaded)


def test_sweep_records_errors_per_point():
    spec = BinSpec(SQRT_PI)
    recs = kappa_sweep(0.1, [1.0], spec, grid_policy=lambda k: PositionGrid(spec, 4, 4))
    assert recs[0].status.startswith("error:")
    assert math.isnan(recs[0].purity)


def test_csv_schema():
    text = records_to_csv(kappa_sweep(0.1, [1.0], BinSpec(SQRT_PI)))
    header, row = text.splitlines()
    assert header == "kappa,bloch_x,bloch_y,bloch_z,fidelity_plus,purity,schmidt_entropy,status"
    assert tuple(header.split(",")) == SWEEP_COLUMNS
    assert row.endswith(",ok")
    assert float(row.split(",")[0]) == 1.0


def test_codeword_fidelities():
    f = codeword_fidelities(pure_density(KET_PLUS))
    assert f["plus"] == pytest.approx(1.0)
    assert f["zero"] == pytest.approx(0.5) and f["one"] == pytest.approx(0.5)
