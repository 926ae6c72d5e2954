import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cliffdual import gflinear as gf
from cliffdual.forms import GenQuadForm, model_form
from cliffdual.isotropic import (
    IsoSubspace,
    enumerate_strata,
    find_isotropic,
    is_isotropic,
    max_isotropic_dim,
    ones,
    witt_transporter,
)
from cliffdual.orthostoch import is_in_O1


def sub(d, *rows):
    return gf.Subspace(d, len(rows[0]), np.array([gf.parse_digits(r, d) for r in rows]))


def test_t5_census():
    Gr = enumerate_strata(5, 0, 2, m=1)
    assert len(Gr) == 5
    assert all(not N.contains_ones and N.m == 1 for N in Gr)
    expected = {sub(2, x) for x in ("01111", "10111", "11011", "11101", "11110")}
    assert {N.N for N in Gr} == expected


def test_t7_code_present():
    Gr3 = enumerate_strata(7, 0, 2, m=3, stratum="Gr")
    assert sub(2, "1111000", "0011110", "1010101") in {N.N for N in Gr3}


def test_t3_has_no_codes():
    assert all(N.m == 0 for N in enumerate_strata(3, 0, 2))
    assert max_isotropic_dim(3, 0, 2) == 0


def test_max_dims():
    assert max_isotropic_dim(5, 0, 2) == 1
    assert max_isotropic_dim(7, 0, 2) == 3
    assert not [N for N in enumerate_strata(7, 0, 2) if N.m == 4]


def test_split_form_lagrangian_contains_ones():
    for tp in (1, 2, 3):
        q = model_form(tp, tp, 2)
        rows = np.zeros((tp, 2 * tp), dtype=np.int64)
        rows[np.arange(tp), np.arange(tp)] = 1
        rows[np.arange(tp), tp + np.arange(tp)] = 1
        N = IsoSubspace(q, gf.Subspace(2, 2 * tp, rows))
        assert N.contains_ones and N.m == tp
        assert N in enumerate_strata(tp, tp, 2, m=tp, stratum="Gr0")


@pytest.mark.parametrize("r,s,d", [(5, 0, 2), (4, 0, 2), (6, 0, 2), (3, 3, 2), (7, 0, 2), (3, 0, 3), (2, 1, 3)])
def test_enumerated_are_isotropic_and_stochastic(r, s, d):
    q = model_form(r, s, d)
    for N in enumerate_strata(r, s, d):
        assert is_isotropic(q, N.N)
        assert not np.any(q.evaluate(N.N.elements()))
        if d == 2:
            B = N.N.basis
            assert not np.any(B.sum(axis=1) % 4 - 0) or s  # |v| = 0 mod 4 for q_{t,0}
            assert not np.any(q.polar.evaluate(B[:, None, :], B[None, :, :]))
        assert not np.any(q.polar.evaluate(N.N.basis, ones(r + s)))


@pytest.mark.parametrize("r,s,d", [(5, 0, 2), (4, 0, 2), (6, 0, 2), (7, 0, 2), (2, 2, 2), (3, 1, 2), (3, 0, 3), (4, 0, 3), (2, 2, 3)])
def test_orbit_completeness(r, s, d):
    strata = {}
    for N in enumerate_strata(r, s, d):
        if N.m:
            strata.setdefault((N.m, N.contains_ones), []).append(N)
    q = model_form(r, s, d)
    for group in strata.values():
        for N in group[1:]:
            O = witt_transporter(group[0], N)
            assert O is not None
            assert is_in_O1(O, q)
            assert group[0].N.image(O) == N.N


def test_transporter_examples():
    q = model_form(8, 0, 2)
    N1 = IsoSubspace(q, sub(2, "11110000"))
    N2 = IsoSubspace(q, sub(2, "00001111"))
    O = witt_transporter(N1, N2)
    assert O is not None and N1.N.image(O) == N2.N and is_in_O1(O, q)
    assert witt_transporter(N1, N1) is not None
    N3 = IsoSubspace(q, gf.Subspace(2, 8, ones(8)[None]))
    assert witt_transporter(N1, N3) is None


def test_stratum_sizes_invariant_under_sign_relabeling():
    # q_{r,s} with the signs placed in a different order has the same census
    for r, s in [(3, 1), (2, 2), (4, 1)]:
        t = r + s
        base = sorted((N.m, N.contains_ones) for N in enumerate_strata(r, s, 2))
        for perm in itertools.islice(itertools.permutations(range(t)), 0, None, 7):
            P = np.eye(t, dtype=np.int64)[list(perm)]
            q = model_form(r, s, 2).restrict(P)
            from cliffdual.isotropic import enumerate_subspaces

            levels = enumerate_subspaces(q)
            got = sorted((N.dim, N.contains(ones(t))) for lev in levels for N in lev)
            assert got == base


@given(st.integers(0, 2**32 - 1))
def test_find_isotropic_reaches_code_dimension(seed):
    rng = np.random.default_rng(seed)
    q = model_form(7, 0, 2)
    N = find_isotropic(q, 3, rng=rng)
    assert N is not None and N.m == 3 and not N.contains_ones
    assert N.section.k == 1


def test_odd_d_codes():
    # 1_5 is itself isotropic at d = 5, which caps codes avoiding it at m = 1
    q = model_form(5, 0, 5)
    assert max_isotropic_dim(5, 0, 5) == 1
    N = find_isotropic(q, 1, rng=np.random.default_rng(0))
    assert N is not None and N.m == 1 and not N.contains_ones
    assert not np.any(q.evaluate(N.N.elements()))
