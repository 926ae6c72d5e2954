import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffdual import gflinear as gf
from cliffdual.forms import model_form


def test_rank_kernel_solve_examples():
    assert gf.rank(np.eye(3, dtype=np.int64), 2) == 3
    K = gf.kernel(np.ones((1, 5), dtype=np.int64), 2)
    assert K.shape == (4, 5) and not np.any(K.sum(axis=1) % 2)
    A = np.array([[1, 2], [3, 4]])
    assert np.array_equal(gf.solve(A, [0, 0], 5), [0, 0])


def test_orthocomplement_examples():
    dot4 = np.eye(4, dtype=np.int64)
    N = gf.Subspace(2, 4, np.ones((1, 4), dtype=np.int64))
    P = N.perp(dot4)
    assert P.dim == 3 and all(v.sum() % 2 == 0 for v in P.elements())
    assert gf.Subspace(2, 4).perp(dot4).dim == 4
    v = np.array([[0, 1, 1, 1, 1]])
    N = gf.Subspace(2, 5, v)
    P = N.perp(model_form(5, 0, 2).polar.matrix)
    assert P.dim == 4 and P.contains_all(N)


def test_quotient_section_examples():
    t = 5
    N = gf.Subspace(2, t, np.array([[0, 1, 1, 1, 1]]))
    perp = N.perp(np.eye(t, dtype=np.int64))
    sec = gf.QuotientSection(N, perp)
    assert sec.k == 3
    # any valid complement, e.g. span{00011, 00101, 10000}, works
    T = np.array([gf.parse_digits(x, 2) for x in ("00011", "00101", "10000")])
    sec2 = gf.QuotientSection(N, perp, complement=T)
    assert sec2.k == 3
    for v in perp.elements():
        assert N.contains((sec2.lift(sec2.project(v)) - v) % 2)
    zero = gf.Subspace(2, 3)
    full = gf.Subspace.full(2, 3)
    s0 = gf.QuotientSection(zero, full)
    assert s0.k == 3
    for v in full.elements():
        assert np.array_equal(s0.lift(s0.project(v)), v)


def test_dot_quotient_of_ones():
    N = gf.Subspace(2, 4, np.ones((1, 4), dtype=np.int64))
    sec = gf.QuotientSection(N, N.perp(np.eye(4, dtype=np.int64)))
    assert sec.k == 2


@given(st.sampled_from([2, 3, 5]), st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_rref_canonical_under_change_of_basis(d, t, seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(0, t + 1))
    rows = rng.integers(0, d, (k, t))
    S = gf.Subspace(d, t, rows)
    # random invertible mixing of a basis
    while True:
        g = rng.integers(0, d, (S.dim, S.dim))
        if S.dim == 0 or gf.rank(g, d) == S.dim:
            break
    S2 = gf.Subspace(d, t, g @ S.basis % d if S.dim else None)
    assert S == S2
    assert np.array_equal(gf.rref(S.basis, d)[0] if S.dim else S.basis, S2.basis)


@given(st.sampled_from([2, 3, 5]), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_perp_involution_and_dimension(d, t, seed):
    rng = np.random.default_rng(seed)
    while True:
        U = np.triu(rng.integers(0, d, (t, t)), 1)
        B = (U + U.T + np.diag(rng.integers(0, d, t))) % d
        if gf.rank(B, d) == t:
            break
    N = gf.Subspace(d, t, rng.integers(0, d, (int(rng.integers(0, t + 1)), t)))
    P = N.perp(B)
    assert N.dim + P.dim == t
    assert P.perp(B) == N


@given(st.sampled_from([2, 3, 7]), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_solve_and_inverse(d, n, seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, d, (n, n))
    x = rng.integers(0, d, n)
    b = A @ x % d
    y = gf.solve(A, b, d)
    assert y is not None and np.array_equal(A @ y % d, b)
    if gf.rank(A, d) == n:
        assert np.array_equal(A @ gf.inverse(A, d) % d, np.eye(n, dtype=np.int64))
        assert gf.det(A, d) != 0
    else:
        assert gf.det(A, d) == 0


def test_vec_index_roundtrip():
    V = gf.all_vectors(4, 3)
    assert np.array_equal(gf.vec_index(V, 3), np.arange(81))
    assert gf.digits([1, 0, 2]) == "102"
    assert np.array_equal(gf.parse_digits("102", 3), [1, 0, 2])


def test_gf2_packed_rank_agrees(rng):
    for _ in range(50):
        A = rng.integers(0, 2, (6, 9))
        assert gf.rank_gf2(gf.pack_rows(A)) == gf.rank(A, 2)
