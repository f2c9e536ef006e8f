"""Defining representation of su(1,2) on the mode triple (a1, a2^dag, a3^dag).

A three-mode interferometer built from two-mode squeezers (four-wave
mixers), a beam splitter on the two idler modes, and single-mode phase
shifts is generated by eight Hermitian operators:

    K1 = (a1^dag a2^dag + a1 a2)/2        K2 = -i(a1^dag a2^dag - a1 a2)/2
    K3 = (a1^dag a3^dag + a1 a3)/2        K4 = -i(a1^dag a3^dag - a1 a3)/2
    K5 = -(a2^dag a3 + a3^dag a2)/2       K6 = -i(a2^dag a3 - a3^dag a2)/2
    K7 = (a1^dag a1 + a2 a2^dag)/2        K8 = (a1^dag a1 - a2 a2^dag + 2 a3 a3^dag)/(2 sqrt 3)

K1..K4 create/annihilate photons in pairs (amplifiers), K5/K6 exchange
photons between modes 2 and 3 (a passive beam splitter), and K7/K8 are
phase operators.  Conjugating the column vector (a1, a2^dag, a3^dag) by
exp(i alpha K_i) acts linearly, which defines the 3x3 matrices of this
module.  Every such matrix S satisfies the pseudo-unitarity relation

    J S^dag J S = I,   J = diag(1, -1, -1),

equivalently S^dag J S = J: the quadratic form carried by J is the
photon-number difference n1 - n2 - n3, which is conserved by every
element of the group.  (As an operator identity, n1 - n2 - n3 commutes
with each K_i; its commutation action on the triple (a1, a2^dag, a3^dag)
is -1 times each component, i.e. a multiple of the identity matrix.)

The generators g_i of this module are the derivatives of the closed-form
one-parameter subgroups at zero, so exp(alpha g_i) reproduces them
exactly.  They obey J g^dag J = -g, the algebra-level membership
condition.
"""

import numpy as np
from scipy.linalg import expm

SQRT3 = np.sqrt(3.0)

#: pseudo-unitarity metric for the (a1, a2^dag, a3^dag) ordering
METRIC = np.diag([1.0, -1.0, -1.0]).astype(complex)


def generator(i):
    """Defining-representation generator g_i (i = 1..8), a 3x3 complex array.

    Normalized so that exp(alpha * g_i) equals group_element(i, alpha).
    """
    g = np.zeros((3, 3), dtype=complex)
    if i == 1:
        g[0, 1] = -0.5j
        g[1, 0] = 0.5j
    elif i == 2:
        g[0, 1] = -0.5
        g[1, 0] = -0.5
    elif i == 3:
        g[0, 2] = -0.5j
        g[2, 0] = 0.5j
    elif i == 4:
        g[0, 2] = -0.5
        g[2, 0] = -0.5
    elif i == 5:
        g[1, 2] = -0.5j
        g[2, 1] = -0.5j
    elif i == 6:
        g[1, 2] = -0.5
        g[2, 1] = 0.5
    elif i == 7:
        g[0, 0] = -0.5j
        g[1, 1] = 0.5j
    elif i == 8:
        g[0, 0] = -0.5j / SQRT3
        g[1, 1] = -0.5j / SQRT3
        g[2, 2] = 1j / SQRT3
    else:
        raise ValueError(f"generator index must be 1..8, got {i}")
    return g


GENERATORS = {i: generator(i) for i in range(1, 9)}


def group_element(i, alpha):
    """Closed form of exp(i alpha K_i) acting on (a1, a2^dag, a3^dag).

    The amplifier elements (i = 1..4) are hyperbolic in alpha/2, the
    beam-splitter elements (i = 5, 6) trigonometric, and the phase
    elements (i = 7, 8) diagonal unit-modulus.
    """
    c, s = np.cosh(alpha / 2.0), np.sinh(alpha / 2.0)
    cc, ss = np.cos(alpha / 2.0), np.sin(alpha / 2.0)
    if i == 1:
        return np.array([[c, -1j * s, 0], [1j * s, c, 0], [0, 0, 1]], dtype=complex)
    if i == 2:
        return np.array([[c, -s, 0], [-s, c, 0], [0, 0, 1]], dtype=complex)
    if i == 3:
        return np.array([[c, 0, -1j * s], [0, 1, 0], [1j * s, 0, c]], dtype=complex)
    if i == 4:
        return np.array([[c, 0, -s], [0, 1, 0], [-s, 0, c]], dtype=complex)
    if i == 5:
        return np.array([[1, 0, 0], [0, cc, -1j * ss], [0, -1j * ss, cc]], dtype=complex)
    if i == 6:
        return np.array([[1, 0, 0], [0, cc, -ss], [0, ss, cc]], dtype=complex)
    if i == 7:
        return np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha), 1.0 + 0j])
    if i == 8:
        r = alpha / (2.0 * SQRT3)
        return np.diag([np.exp(-1j * r), np.exp(-1j * r), np.exp(2j * r)])
    raise ValueError(f"generator index must be 1..8, got {i}")


def exp_generator(i, alpha):
    """Matrix exponential exp(alpha * g_i), for cross-checking group_element."""
    return expm(alpha * GENERATORS[i])


# ---------------------------------------------------------------------------
# Structure constants.
#
# BRACKET_TABLE holds the tabulated coefficients for each unordered pair
# (i, j) with i < j, in the column-with-row orientation: the listed
# combination equals [K_j, K_i].  The operator bracket [K_i, K_j] is
# therefore the negative of the listed entry.  Pairs that commute have an
# empty list.  Coefficients multiply the Hermitian operators K_k.
# ---------------------------------------------------------------------------

_H = SQRT3 / 2.0

BRACKET_TABLE = {
    (1, 2): [(1j, 7)],
    (1, 3): [(0.5j, 6)],
    (1, 4): [(-0.5j, 5)],
    (1, 5): [(-0.5j, 4)],
    (1, 6): [(0.5j, 3)],
    (1, 7): [(1j, 2)],
    (1, 8): [],
    (2, 3): [(0.5j, 5)],
    (2, 4): [(0.5j, 6)],
    (2, 5): [(0.5j, 3)],
    (2, 6): [(0.5j, 4)],
    (2, 7): [(-1j, 1)],
    (2, 8): [],
    (3, 4): [(0.5j, 7), (_H * 1j, 8)],
    (3, 5): [(-0.5j, 2)],
    (3, 6): [(-0.5j, 1)],
    (3, 7): [(0.5j, 4)],
    (3, 8): [(_H * 1j, 4)],
    (4, 5): [(0.5j, 1)],
    (4, 6): [(-0.5j, 2)],
    (4, 7): [(-0.5j, 3)],
    (4, 8): [(-_H * 1j, 3)],
    (5, 6): [(0.5j, 7), (-_H * 1j, 8)],
    (5, 7): [(-0.5j, 6)],
    (5, 8): [(_H * 1j, 6)],
    (6, 7): [(0.5j, 5)],
    (6, 8): [(-_H * 1j, 5)],
    (7, 8): [],
}


def bracket_coefficients(i, j):
    """Coefficients c_k of the operator bracket [K_i, K_j] = sum_k c_k K_k."""
    if i == j:
        return []
    if i < j:
        return [(-c, k) for c, k in BRACKET_TABLE[(i, j)]]
    return list(BRACKET_TABLE[(j, i)])


def ad_matrix(i):
    """Adjoint action of K_i as an 8x8 matrix: [K_i, K_j] = sum_k M[j,k] K_k.

    Rows/columns are 0-based for generator indices 1..8.
    """
    m = np.zeros((8, 8), dtype=complex)
    for j in range(1, 9):
        for c, k in bracket_coefficients(i, j):
            m[j - 1, k - 1] += c
    return m


#: reference adjoint matrix of K1 for entrywise regression checks
AD_K1_REFERENCE = np.zeros((8, 8), dtype=complex)
AD_K1_REFERENCE[1, 6] = -1j
AD_K1_REFERENCE[2, 5] = -0.5j
AD_K1_REFERENCE[3, 4] = 0.5j
AD_K1_REFERENCE[4, 3] = 0.5j
AD_K1_REFERENCE[5, 2] = -0.5j
AD_K1_REFERENCE[6, 1] = -1j


def membership_defect(S):
    """Max-abs deviation of J S^dag J S from the identity."""
    S = np.asarray(S, dtype=complex)
    return float(np.max(np.abs(METRIC @ S.conj().T @ METRIC @ S - np.eye(3))))


def is_pseudo_unitary(S, tol=1e-9):
    """Whether S is a group member: J S^dag J S = I within tol."""
    return membership_defect(S) <= tol


def random_element(rng, factors=6, scale=0.8):
    """Random group member: a product of single-generator closed forms.

    Products of exact one-parameter elements are exact members, so the
    result fails membership checks only through rounding.
    """
    S = np.eye(3, dtype=complex)
    idx = rng.integers(1, 9, size=factors)
    amp = rng.uniform(-scale, scale, size=factors)
    for i, a in zip(idx, amp):
        S = group_element(int(i), float(a)) @ S
    return S
