"""Checks of the truncated state-vector simulator itself: operator algebra
on the grid, gate action, truncation guards, and agreement with the
Gaussian pipeline."""

import numpy as np
import pytest
from scipy.linalg import expm

from su12sim.fock_oracle import (
    FockStateVector,
    LeakageExceeded,
    TruncatedFockSpace,
    _mode_operators,
    _occupation_arrays,
    compare_with_gaussian,
    conserved_difference_stats,
    estimator_stats_fock,
    k_operator,
    mean_derivative_fock,
    photon_statistics_fock,
    vacuum_k_variance,
)
from su12sim.gaussian import InputState
from su12sim.interferometer import InterferometerConfig
from su12sim.sensitivity import mean_derivative


@pytest.mark.parametrize("i", range(1, 9))
def test_k_operators_hermitian(i):
    K = k_operator(i, 6).toarray()
    assert np.allclose(K, K.conj().T, atol=1e-14)


def test_vacuum_generator_variances():
    # the four pair-creation quadratures fluctuate at 1/4 on vacuum
    for i in (1, 2, 3, 4):
        assert np.isclose(vacuum_k_variance(i, 10), 0.25, atol=1e-12)
    # the diagonal generators do not fluctuate at all
    for i in (7, 8):
        assert np.isclose(vacuum_k_variance(i, 10), 0.0, atol=1e-14)


def test_operator_brackets_on_the_grid():
    """Commutators of the number-conserving and pair-creation generators
    reproduce the tabulated coefficients on interior states (away from
    the cutoff boundary, where truncation breaks the ladder algebra)."""
    from su12sim.lie import bracket_coefficients

    d = 7
    n1, n2, n3 = _occupation_arrays(d)
    interior = (n1 <= d - 3) & (n2 <= d - 3) & (n3 <= d - 3)
    K = {i: k_operator(i, d).toarray() for i in range(1, 9)}
    for i, j in [(1, 2), (3, 4), (5, 6), (1, 3), (2, 6), (7, 1), (8, 3), (1, 8)]:
        direct = (K[i] @ K[j] - K[j] @ K[i]).astype(complex)
        expected = np.zeros(direct.shape, dtype=complex)
        for c, k in bracket_coefficients(i, j):
            expected += c * K[k]
        block = np.ix_(interior, interior)
        assert np.allclose(direct[block], expected[block], atol=1e-12), (i, j)


def test_single_gate_two_mode_squeezed_amplitudes():
    b = 0.5
    space = TruncatedFockSpace(12)
    psi, _ = space.coherent_vector((0, 0, 0))
    psi = space.apply_fwm(psi, b, 0.0, "12")
    grid = psi.reshape(12, 12, 12)
    r = b / 2
    for n in range(5):
        expected = np.tanh(r) ** n / np.cosh(r)
        assert np.isclose(abs(grid[n, n, 0]), expected, atol=1e-10), n
    # nothing outside the pair ladder
    assert abs(grid[1, 0, 0]) < 1e-14
    assert abs(grid[0, 0, 1]) < 1e-14
    mean, _ = photon_statistics_fock(
        FockStateVector(12, psi, 0.0, (0.0,))
    )
    assert np.isclose(mean[0], np.sinh(r) ** 2, atol=1e-10)


def test_gate_heisenberg_action():
    """Conjugating the probe annihilator through one mixer gate reproduces
    the 3x3 mode-matrix coefficients on low-occupation states.  Residuals
    come from the cutoff boundary and die off fast with the cutoff."""
    d, b, th = 8, 0.4, 0.9
    A1, A2, _ = _mode_operators(d)
    H = np.sin(th) * k_operator(1, d) - np.cos(th) * k_operator(2, d)
    U = expm(-1j * b * H.toarray())
    conj = U.conj().T @ A1.toarray() @ U
    expected = (
        np.cosh(b / 2) * A1.toarray()
        + np.exp(-1j * th) * np.sinh(b / 2) * A2.toarray().conj().T
    )
    n1, n2, n3 = _occupation_arrays(d)
    interior = (n1 <= 2) & (n2 <= 2) & (n3 <= 2)
    block = np.ix_(interior, interior)
    assert np.allclose(conj[block], expected[block], atol=1e-5)


def test_phase_stage_is_diagonal_phase():
    space = TruncatedFockSpace(5)
    psi, _ = space.coherent_vector((0.3, 0.2, 0.1))
    rot = space.apply_phases(psi, 0.4, 0.5, 0.6)
    assert np.allclose(np.abs(rot), np.abs(psi), atol=1e-15)


def test_run_circuit_unitary_up_to_preparation():
    space = TruncatedFockSpace(14)
    cfg = InterferometerConfig.balanced(0.4, 0.3, phi1=0.8, phi2=0.2)
    state = InputState.coherent(1, 0.6)
    fsv = space.run_circuit(cfg, state)
    assert np.isclose(fsv.norm ** 2, 1.0 - fsv.gate_leakage[0], atol=1e-12)
    assert len(fsv.gate_leakage) == 6  # preparation + five stages
    assert fsv.gate_leakage[3] == 0.0  # the phase stage cannot leak


def test_guard_trips_at_strong_gain():
    space = TruncatedFockSpace(14)
    cfg = InterferometerConfig.balanced(2.0, 2.0)
    with pytest.raises(LeakageExceeded):
        space.run_circuit(cfg, InputState.vacuum())


def test_guard_trips_on_preparation_deficit():
    space = TruncatedFockSpace(8)
    with pytest.raises(LeakageExceeded):
        space.run_circuit(
            InterferometerConfig.balanced(0.1, 0.1), InputState.coherent(1, 2.5)
        )


def test_photon_statistics_on_handmade_state():
    d = 4
    psi = np.zeros(d ** 3, dtype=complex)
    psi[0] = 1 / np.sqrt(2)          # |0,0,0>
    psi[d * d + d] = 1 / np.sqrt(2)  # |1,1,0>
    fsv = FockStateVector(d, psi, 0.0, (0.0,))
    mean, cov = photon_statistics_fock(fsv)
    assert np.allclose(mean, [0.5, 0.5, 0.0])
    assert np.isclose(cov[0, 0], 0.25)
    assert np.isclose(cov[0, 1], 0.25)
    m, v = estimator_stats_fock(fsv, (1, -1, 0))
    assert np.isclose(m, 0.0) and np.isclose(v, 0.0, atol=1e-14)


def test_conserved_difference_on_circuits():
    space = TruncatedFockSpace(14)
    cfg = InterferometerConfig.balanced(0.4, 0.4, phi1=1.1, phi3=0.3)
    m, v = conserved_difference_stats(space.run_circuit(cfg, InputState.vacuum()))
    assert abs(m) < 1e-10 and abs(v) < 1e-10
    state = InputState.coherent(3, 0.5)
    m, v = conserved_difference_stats(space.run_circuit(cfg, state))
    assert np.isclose(m, -0.25, atol=1e-8)


def test_fock_derivative_matches_analytic():
    space = TruncatedFockSpace(14)
    cfg = InterferometerConfig.balanced(0.3, 0.25, phi1=0.4, phi2=1.0)
    state = InputState.coherent(1, 0.5)
    w = (1.0, -0.5, 0.25)
    for j in (1, 2, 3):
        df = mean_derivative_fock(space, cfg, state, w, j)
        da = mean_derivative(cfg, state, w, j)
        assert np.isclose(df, da, atol=1e-5), j


def test_agreement_suite_small():
    worst = compare_with_gaussian(trials=8)
    for key in ("mean", "cov", "var", "deriv"):
        assert worst[key] < 1e-6, (key, worst)
    assert worst["leakage"] < 1e-8
