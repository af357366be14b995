from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from centralpss.linalg import (
    InconsistentSystem,
    least_norm,
    rational_psd_decompose,
    solve_affine,
    solve_square,
)

from oracles import psd_by_sturm


def test_identity_factorization():
    ldl = rational_psd_decompose([[1, 0], [0, 1]])
    assert ldl.D == [1, 1]
    assert ldl.L == [[1, 0], [0, 1]]


def test_hand_eliminated_example():
    G = [[3, 0, 1], [0, 1, 0], [1, 0, 1]]
    ldl = rational_psd_decompose(G)
    assert ldl.perm == [0, 1, 2]
    assert ldl.D == [3, 1, F(2, 3)]
    assert ldl.L[2][0] == F(1, 3)
    assert ldl.reconstruct() == [[F(v) for v in row] for row in G]


def test_indefinite():
    assert rational_psd_decompose([[1, 2], [2, 1]]) is None


def test_zero_pivot_is_skipped_by_permutation():
    G = [[0, 0, 0], [0, 2, 1], [0, 1, 1]]
    ldl = rational_psd_decompose(G)
    assert ldl is not None
    assert ldl.reconstruct() == [[F(v) for v in row] for row in G]


def test_zero_diagonal_with_nonzero_row():
    assert rational_psd_decompose([[0, 1], [1, 0]]) is None


def test_rejects_asymmetric():
    with pytest.raises(ValueError):
        rational_psd_decompose([[1, 2], [3, 4]])


def test_solve_affine_parameterization():
    sol = solve_affine([[F(1), F(1), F(0)]], [F(2)], 3)
    assert len(sol.null_basis) == 2
    x = sol.point([F(5), F(-1)])
    assert x[0] + x[1] == 2
    assert sol.params_of(x) == [5, -1]


def test_inconsistent():
    with pytest.raises(InconsistentSystem):
        solve_affine([[F(1), F(1)], [F(2), F(2)]], [F(1), F(3)], 2)


def test_least_norm_is_orthogonal_projection():
    sol = solve_affine([[F(1), F(1)]], [F(2)], 2)
    assert least_norm(sol) == [1, 1]
    # weighting the second coordinate pushes mass onto the first
    assert least_norm(sol, [1, 3]) == [F(3, 2), F(1, 2)]


def test_solve_square():
    assert solve_square([[F(2), F(1)], [F(1), F(3)]], [F(3), F(5)]) == [F(4, 5), F(7, 5)]


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def symmetric(draw):
    n = draw(st.integers(1, 5))
    vals = draw(st.lists(rationals, min_size=n * n, max_size=n * n))
    M = [[vals[i * n + j] for j in range(n)] for i in range(n)]
    return [[M[min(i, j)][max(i, j)] for j in range(n)] for i in range(n)]


@st.composite
def gram_products(draw):
    n = draw(st.integers(1, 5))
    k = draw(st.integers(1, n))
    B = [draw(st.lists(rationals, min_size=k, max_size=k)) for _ in range(n)]
    return [[sum((B[i][t] * B[j][t] for t in range(k)), F(0)) for j in range(n)] for i in range(n)]


@settings(max_examples=80, deadline=None)
@given(st.one_of(symmetric(), gram_products()))
def test_ldl_matches_sturm_oracle(G):
    ldl = rational_psd_decompose(G)
    assert (ldl is not None) == psd_by_sturm(G)
    if ldl is not None:
        assert all(d >= 0 for d in ldl.D)
        assert ldl.reconstruct() == G
