import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import gcd_of_minors_factors, sympy_invariant_factors
from tga import snf


def matrices(max_rows=6, max_cols=6, lo=-9, hi=9):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=m, max_size=m)
        )
    )


def check_snf(M):
    U, D, V = snf.smith_normal_form(M)
    assert snf.matmul(snf.matmul(U, M), V) == D
    assert abs(snf.determinant(U)) == 1
    assert abs(snf.determinant(V)) == 1
    d = snf.diagonal(D)
    for i, row in enumerate(D):
        for j, x in enumerate(row):
            if i != j:
                assert x == 0
    assert all(x >= 0 for x in d)
    nz = [x for x in d if x]
    assert d[: len(nz)] == nz, "zeros trail the nonzero factors"
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    return nz


def test_identity_and_zero():
    assert snf.smith_normal_form([[1, 0], [0, 1]])[1] == [[1, 0], [0, 1]]
    U, D, V = snf.smith_normal_form([[0, 0], [0, 0]])
    assert D == [[0, 0], [0, 0]] and U == snf.identity(2) and V == snf.identity(2)


def test_worked_example_against_minors():
    nz = check_snf([[2, 4], [6, 8]])
    assert nz == [2, 4]
    assert gcd_of_minors_factors([[2, 4], [6, 8]]) == [2, 4]


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_identities_and_oracles(M):
    nz = check_snf(M)
    assert nz == sympy_invariant_factors(M)
    assert nz[:3] == gcd_of_minors_factors(M, 3)[: len(nz[:3])]


def test_large_random_matrices_up_to_30(rng):
    for _ in range(6):
        m, n = rng.randint(10, 30), rng.randint(10, 30)
        M = [[rng.randint(-3, 3) if rng.random() < 0.4 else 0 for _ in range(n)] for _ in range(m)]
        nz = check_snf(M)
        assert nz == sympy_invariant_factors(M)
        minors = gcd_of_minors_factors(M, 2) if m * n <= 400 else None
        if minors is not None:
            assert nz[: len(minors)] == minors


def test_cokernel_and_group_text():
    assert str(snf.cokernel([[2]], 1, 1)) == "Z/2"
    assert str(snf.cokernel([[0]], 1, 1)) == "Z"
    assert str(snf.cokernel([[1]], 1, 1)) == "trivial"
    assert str(snf.AbelianGroup(3, (2, 4))) == "Z^3 + Z/2 + Z/4"
    with pytest.raises(ValueError):
        snf.AbelianGroup(0, (4, 2))
    with pytest.raises(ValueError):
        snf.AbelianGroup(0, (1,))


@settings(max_examples=80, deadline=None)
@given(matrices(5, 5, -5, 5), st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_solve_integer_agrees_with_construction(M, x):
    n = len(M[0])
    x = x[:n]
    b = [sum(a * c for a, c in zip(row, x)) for row in M]
    sol = snf.solve_integer(M, b, n)
    assert sol is not None
    assert [sum(a * c for a, c in zip(row, sol)) for row in M] == b


def test_solve_integer_reports_no_solution():
    assert snf.solve_integer([[2]], [1], 1) is None
    assert snf.solve_integer([[0]], [1], 1) is None


def test_kernel_and_hermite_basis_is_canonical():
    rnd = random.Random(5)
    for _ in range(20):
        M = [[rnd.randint(-3, 3) for _ in range(6)] for _ in range(3)]
        K = snf.integer_kernel(M, 6)
        for row in K:
            assert all(sum(a * b for a, b in zip(r, row)) == 0 for r in M)
        shuffled = [list(r) for r in K]
        rnd.shuffle(shuffled)
        if len(shuffled) >= 2:
            shuffled[0] = [a + 3 * b for a, b in zip(shuffled[0], shuffled[1])]
        assert snf.hermite_rows(K) == snf.hermite_rows(shuffled)
