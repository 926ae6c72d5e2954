import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffdual import gflinear as gf
from cliffdual.cliffordrep import CliffordWord, random_word
from cliffdual.commutant import (
    CommutantElement,
    CosetState,
    coset_basis,
    commutant_dimension,
    commutes_dense,
    commutes_with_generators,
    exact_rank,
    gram_matrix_S,
    identity_column,
    overlap,
    overlap_closed_form_t5,
    overlap_direct,
    permutation_column,
    projector_column,
    projector_column_weyl,
    semigroup_elements,
    semigroup_product,
    strata_with_zero,
    t5_codes,
)
from cliffdual.forms import model_form
from cliffdual.isotropic import IsoSubspace, enumerate_strata, ones
from cliffdual.orthostoch import enumerate_O1


def codes(r, s, d):
    return [N for N in enumerate_strata(r, s, d) if N.m > 0]


@pytest.mark.parametrize("r,s,d", [(5, 0, 2), (4, 0, 2), (2, 2, 2), (3, 1, 2), (2, 2, 3)])
def test_projector_properties(r, s, d):
    for N in codes(r, s, d):
        P = projector_column(N)
        assert (P @ P).equals(P)
        assert P.dagger().equals(P)
        assert P.rank() == d ** (r + s - 2 * N.m)
        assert P.trace() == d ** (r + s - 2 * N.m)
        assert np.allclose(P.to_complex(), projector_column_weyl(N).to_complex(), atol=1e-12)


def test_R_is_a_homomorphism():
    G = enumerate_O1(4, 0, 2)
    for a, b in itertools.islice(itertools.product(range(G.order), repeat=2), 0, None, 37):
        lhs = permutation_column(G.elements[a], 2) @ permutation_column(G.elements[b], 2)
        rhs = permutation_column(G.elements[a] @ G.elements[b] % 2, 2)
        assert lhs.equals(rhs)


def test_R_conjugates_projectors():
    G = enumerate_O1(5, 0, 2)
    for N in t5_codes():
        P = projector_column(N)
        for O in G.elements[::11]:
            R = permutation_column(O, 2)
            assert (R @ P @ R.dagger()).equals(projector_column(N.image(O)))


def test_semigroup_sizes():
    # distinct operators; for t = 4 the 24 group elements and the 6 cosets of
    # the stabilizer acting on P(<1_4>)
    assert len(semigroup_elements(3, 0, 2)) == 6
    assert len(semigroup_elements(4, 0, 2)) == 30
    assert len(semigroup_elements(4, 0, 2, distinct=False)) == 48
    assert len(semigroup_elements(5, 0, 2)) == 120 + 5 * 30


def test_distinct_elements_are_distinct_as_matrices():
    els = semigroup_elements(4, 0, 2)
    mats = {np.round(e.column.to_complex(), 9).tobytes() for e in els}
    assert len(mats) == len(els)


@pytest.mark.parametrize("r,s", [(3, 0), (4, 0), (2, 2), (5, 0)])
def test_elements_commute_with_generators(r, s):
    for e in semigroup_elements(r, s, 2):
        assert all(commutes_with_generators(e.column, r, s, 2).values())


def test_dense_commutation_spot_check(rng):
    els = semigroup_elements(3, 0, 2)
    for e in els[:3]:
        w = random_word(2, 2, 6, rng)
        assert commutes_dense(e, w, 3, 0)


def test_non_commutant_detected():
    # a transposition that moves 1_3 is not in O_1, and its R fails to commute
    # once the Weyl phases are involved; a generic diagonal fails H
    A = identity_column(2, 3)
    A.ints[0, 0] = 2
    assert not commutes_with_generators(A, 3, 0, 2)["H"]


def test_left_ideal():
    G = enumerate_O1(5, 0, 2)
    keys = {hash(e.column) for e in semigroup_elements(5, 0, 2)}
    for e in semigroup_elements(5, 0, 2)[120::17]:
        for O in G.elements[::23]:
            assert hash(permutation_column(O, 2) @ e.column) in keys


@pytest.mark.parametrize("r,s", [(5, 0), (4, 0), (2, 2)])
def test_semigroup_product_all_pairs(r, s):
    Ns = strata_with_zero(r, s, 2)
    for N1, N2 in itertools.product(Ns, repeat=2):
        out = semigroup_product(N1, N2)
        lhs = projector_column(N1) @ projector_column(N2)
        rhs = (permutation_column(out["O"], 2) @ projector_column(out["I"])).scaled(out["scalar"])
        assert lhs.equals(rhs)
        assert out["I"].m >= max(N1.m, N2.m)
        if N1.contains_ones or N2.contains_ones:
            assert out["I"].contains_ones


def test_product_with_ones_projector():
    # (6,2): 1_8 is isotropic; P(N) P(<1>) = P(<N, 1>) for codes avoiding 1_8
    q = model_form(6, 2, 2)
    one = IsoSubspace(q, gf.Subspace(2, 8, ones(8)[None]))
    N = IsoSubspace(q, gf.Subspace(2, 8, np.array([[1, 1, 1, 1, 0, 0, 0, 0]])))
    NN = IsoSubspace(q, N.N + one.N)
    lhs = projector_column(N) @ projector_column(one)
    assert lhs.equals(projector_column(NN))


def test_gram_invariant_under_conjugation():
    els, G = gram_matrix_S(4, 0, 2, 3)
    O = enumerate_O1(4, 0, 2).elements[5]
    R = permutation_column(O, 2)
    conj = [R @ e.column @ R.dagger() for e in els]
    for a in range(0, len(els), 4):
        for b in range(0, len(els), 3):
            assert conj[a].hs_inner(conj[b]) ** 3 == G[a][b]


def test_gram_rank():
    _, G = gram_matrix_S(3, 0, 2, 4)
    assert exact_rank(G) == 6
    _, G = gram_matrix_S(4, 0, 2, 5)
    assert exact_rank(G) == 30
    assert exact_rank([[1, 2], [2, 4]]) == 1


def test_commutant_dimension_small():
    assert commutant_dimension(3, 0, 2, 2) == 6
    assert commutant_dimension(2, 0, 2, 2) == 2  # U (x) U on two qubits: swap and identity
    assert commutant_dimension(1, 1, 2, 2) == 2


def test_coset_basis_size_and_orthonormality():
    N = t5_codes()[0]
    for n in (1, 2):
        B = coset_basis(N, n)
        assert len(B) == 2 ** (n * 3)
        for a in B[::3]:
            for b in B[::2]:
                assert overlap(a, b) == overlap_direct(a, b)
                assert overlap(a, b).as_fraction() == Fraction(int(a == b))


@given(st.integers(0, 2**31), st.integers(1, 3))
def test_overlap_law_t5(seed, n):
    rng = np.random.default_rng(seed)
    Ns = t5_codes()
    i, j = rng.integers(0, 5, 2)
    a = CosetState(Ns[i], rng.integers(0, 2, (3, n)), n)
    b = CosetState(Ns[j], rng.integers(0, 2, (3, n)), n)
    val = overlap_direct(a, b)
    assert overlap(a, b) == val
    assert val.as_fraction() == overlap_closed_form_t5(a, b, int(i), int(j))


def test_coset_state_vector():
    N = t5_codes()[2]
    a = coset_basis(N, 2)[5]
    v = a.to_state(exact=False).arr[0]
    assert np.isclose(np.linalg.norm(v), 1)
    assert a.to_state().equals(a.to_state()) and np.allclose(a.to_state().to_complex()[0], v)
    with pytest.raises(ValueError):
        CosetState.from_lift(N, np.eye(5, dtype=np.int64)[:, :1], 1)
