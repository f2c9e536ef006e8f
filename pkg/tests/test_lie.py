"""Group and algebra structure checks for the SU(1,2) defining representation."""

import numpy as np
import pytest

from su12sim.lie import (
    METRIC,
    GENERATORS,
    AD_K1_REFERENCE,
    ad_matrix,
    bracket_coefficients,
    exp_generator,
    generator,
    group_element,
    is_pseudo_unitary,
    membership_defect,
    random_element,
)


def test_metric_signature():
    assert np.array_equal(METRIC, np.diag([1.0, -1.0, -1.0]))


def test_generators_satisfy_algebra_condition():
    # J g^dag J = -g for every basis element
    for i in range(1, 9):
        g = generator(i)
        lhs = METRIC @ g.conj().T @ METRIC
        assert np.allclose(lhs, -g, atol=1e-15)


def test_generators_traceless():
    for i in range(1, 9):
        assert abs(np.trace(generator(i))) < 1e-15


@pytest.mark.parametrize("i", range(1, 9))
def test_closed_form_matches_exponential(i):
    for a in (-1.3, -0.4, 0.25, 0.9, 2.0):
        S = group_element(i, a)
        E = exp_generator(i, a)
        assert np.allclose(S, E, atol=1e-12), (i, a)


@pytest.mark.parametrize("i", range(1, 9))
def test_one_parameter_elements_are_members(i):
    for a in (-0.8, 0.6, 1.7):
        assert is_pseudo_unitary(group_element(i, a))


def test_random_products_stay_in_group():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(300):
        S = random_element(rng)
        worst = max(worst, membership_defect(S))
    assert worst < 1e-9


def test_membership_defect_flags_non_members():
    assert membership_defect(np.diag([1.1, 1.0, 1.0])) > 1e-3
    assert not is_pseudo_unitary(2.0 * np.eye(3))


def test_inverse_from_metric():
    """J S^dag J is the inverse of any group element."""
    rng = np.random.default_rng(5)
    for _ in range(20):
        S = random_element(rng)
        inv = METRIC @ S.conj().T @ METRIC
        assert np.allclose(inv @ S, np.eye(3), atol=1e-10)


def test_bracket_table_single_global_sign():
    """Matrix commutators reproduce the tabulated coefficients up to one
    overall sign shared by every pair."""
    K = {i: 1j * GENERATORS[i] for i in range(1, 9)}
    sign = None
    for i in range(1, 9):
        for j in range(i + 1, 9):
            direct = K[i] @ K[j] - K[j] @ K[i]
            table = sum(c * K[k] for c, k in bracket_coefficients(i, j))
            if isinstance(table, int):  # vanishing bracket
                assert np.allclose(direct, 0.0, atol=1e-14), (i, j)
                continue
            if sign is None:
                scale = np.max(np.abs(table))
                if scale > 1e-12:
                    ratios = direct[np.abs(table) > 1e-12] / table[np.abs(table) > 1e-12]
                    sign = np.real(ratios[0])
            assert np.allclose(direct, sign * table, atol=1e-12), (i, j)
    assert sign is not None and abs(abs(sign) - 1.0) < 1e-12


def test_adjoint_k1_matches_reference():
    assert np.allclose(ad_matrix(1), AD_K1_REFERENCE, atol=1e-14)


def test_adjoint_consistency_all_generators():
    """Row j of ad_i holds the expansion coefficients of [K_i, K_j]."""
    for i in range(1, 9):
        m = ad_matrix(i)
        for j in range(1, 9):
            row = np.zeros(8, dtype=complex)
            for c, k in bracket_coefficients(i, j):
                row[k - 1] += c
            assert np.allclose(m[j - 1], row, atol=1e-14), (i, j)
