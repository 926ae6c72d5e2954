import numpy as np
import pytest

from cliffdual import gflinear as gf
from cliffdual.cliffordrep import generators
from cliffdual.commutant import projector_column, t5_codes, coset_basis
from cliffdual.decompose import (
    T5Span,
    TensorPowerSum,
    anti_identity_basis,
    build_layers,
    commutator,
    defect_counts,
    epsilon,
    exact_duality_check,
    exact_duality_predicate,
    layer_commutation_suite,
    orthonormal_bases,
    real_clifford_suite,
    stab_projector,
    stab_subspace_ops,
    strata_empty,
    t5_pipeline,
    t5_span_analysis,
    trivial_component_norm,
    two_mod_three_agrees,
    weyl_transform_check,
)
from cliffdual.orthostoch import action_on_subspaces, character_table, enumerate_O1


# ---- TensorPowerSum algebra against dense matrices


def test_tensor_power_sum_dense_agreement():
    Ns = t5_codes()[:2]
    a = TensorPowerSum.single(projector_column(Ns[0]), 2)
    b = TensorPowerSum.single(projector_column(Ns[1]), 2, c=3)

    def dense(x):
        ints, den = x.dense_ints()
        return np.asarray(ints, float) / den

    Pa = projector_column(Ns[0]).to_complex().real
    Pb = projector_column(Ns[1]).to_complex().real
    assert np.allclose(dense(a), np.kron(Pa, Pa))
    assert np.allclose(dense(a + b), np.kron(Pa, Pa) + 3 * np.kron(Pb, Pb))
    assert np.allclose(dense(a @ b), 3 * np.kron(Pa @ Pb, Pa @ Pb))
    assert (a - a).is_zero()
    assert commutator(a, b).is_zero() == np.allclose(dense(a @ b), dense(b @ a))
    assert a.hs_norm2() == pytest.approx(np.sum(dense(a) ** 2))


# ---- layers


@pytest.mark.parametrize("r,s,n", [(4, 0, 2), (5, 1, 1), (3, 1, 2), (2, 2, 1)])
def test_layer_suite(r, s, n):
    res = layer_commutation_suite(build_layers(r, s, 2, n))
    for m, row in res["layers"].items():
        assert row["R-invariant"] and row["Clifford-commuting"]
        if res["ones_isotropic"]:
            assert row["[C',P1]=0"] and row["C'P1=d^m D"]
        else:
            assert row["D_next_zero"]


def test_layer_identity_needs_hyperplane_count():
    row = layer_commutation_suite(build_layers(5, 1, 2, 1))["layers"][1]
    assert row["|Gr|"] == 10 and row["|Gr0_next|"] == 5
    assert row["C'P1=d^m D"] and not row["C'P1=D"]


# ---- stabilizer compression


def test_stab_projector():
    P = stab_projector(3, 0, 3, 1)
    assert (P @ P).equals(P) and P.dagger().equals(P)
    # trace of the group average = number of orbits of O_1 on Z_3^3
    G = enumerate_O1(3, 0, 3)
    V = gf.all_vectors(3, 3)
    orbits = {min(gf.vec_index(V[i] @ g.T % 3, 3) for g in G.elements) for i in range(27)}
    assert P.trace() == len(orbits)


def test_stab_commutators_vanish():
    res = stab_subspace_ops(3, 0, 3, 2)
    assert res["P_idempotent"] and res["P_selfadjoint"]
    assert all(res["commutators"].values())
    assert res["compression_abelian"]


# ---- exact duality


@pytest.mark.parametrize("d", [3, 5, 7, 11, 13])
def test_exact_duality_predicate(d):
    for t in (2, 3):
        assert exact_duality_check(d, t)["agree"]
    assert two_mod_three_agrees(d) or d == 3


def test_exact_duality_examples():
    assert strata_empty(5, 2, 0) and exact_duality_predicate(5, 2, 0)
    assert strata_empty(5, 3, 0) and exact_duality_predicate(5, 3, 0)
    assert not strata_empty(7, 3, 0) and not exact_duality_predicate(7, 3, 0)
    # 1_3 is isotropic at d = 3, so Gr0 is not empty
    assert not strata_empty(3, 3, 0) and not exact_duality_predicate(3, 3, 0)
    assert not exact_duality_predicate(5, 4, 0)
    with pytest.raises(ValueError):
        exact_duality_predicate(2, 3, 0)


# ---- t = 5 pipeline


def test_epsilon_values():
    assert epsilon(4) == pytest.approx(5 * (1 / 256 + 1 / 16) + 20 / 256)
    assert epsilon(1) > 1


@pytest.mark.parametrize("n,rank", [(1, 30), (2, 316), (3, 2560)])
def test_t5_span_rank(n, rank):
    span = T5Span(n)
    assert span.size == 5 * 8**n
    assert span.exact_rank() == rank
    assert np.linalg.matrix_rank(span.gram().toarray(), hermitian=True) == rank


def test_t5_span_independent_at_n4():
    a = t5_span_analysis(4)
    assert a["rank"] == a["expected_rank"] == 5 * 2**12
    assert a["within_epsilon"]
    assert 1 - epsilon(4) <= a["spectrum_min"] and a["spectrum_max"] <= 1 + epsilon(4)


def test_state_permutation_matches_direct_action():
    span = T5Span(1)
    G = enumerate_O1(5, 0, 2)
    V = gf.all_vectors(5, 2)
    S = span.S.toarray()
    for g in G.elements[::17]:
        perm = span.state_permutation(g)
        col = gf.vec_index(V @ g.T % 2, 2)
        moved = np.zeros_like(S)
        moved[:, col] = S
        assert np.array_equal(moved, S[perm])


def _dense_component_dims(n):
    """Oracle: SVD span projector and dense character projectors."""
    span = T5Span(n)
    dim = 2 ** (5 * n)
    U, sv, _ = np.linalg.svd(span.S.toarray().T.astype(float), full_matrices=False)
    Q = U[:, sv > 1e-8]
    Pspan = Q @ Q.T
    G = enumerate_O1(5, 0, 2)
    table = character_table(G, action_on_subspaces(G, [N.N for N in t5_codes()]))
    label = G.class_label()
    V = gf.all_vectors(5, 2)
    perms = []
    for g in G.elements:
        col = gf.vec_index(V @ g.T % 2, 2)
        idx = np.zeros(1, dtype=np.int64)
        for _ in range(n):
            idx = (idx[:, None] * 32 + col[None, :]).ravel()
        perms.append(idx)
    dims = {"span": Q.shape[1]}
    comp = np.eye(dim) - Pspan
    for li, lam in enumerate(table.labels):
        chi = [float(v.to_complex().real) for v in table.values[li]]
        Pi = np.zeros((dim, dim))
        for a, p in enumerate(perms):
            c = chi[label[a]]
            if c:
                Pi[p, np.arange(dim)] += c
        Pi *= table.degrees[li] / G.order
        dims[lam] = int(round(np.trace(Pi @ comp)))
    return dims


@pytest.mark.parametrize("n", [1, 2])
def test_t5_pipeline_components(n):
    out = t5_pipeline(n)
    assert out["complete"] and out["idempotent"] and out["orthogonal"]
    assert out["character_consistent"] and out["clifford_commuting"]
    assert out["total_dim"] == 2 ** (5 * n)
    got = {k: v["dim"] for k, v in out["components"].items()}
    assert got == _dense_component_dims(n)
    for k, v in out["components"].items():
        if v["degree"]:
            assert v["dim"] % v["degree"] == 0


def test_t5_pipeline_n2_frozen():
    out = t5_pipeline(2, checks=False)
    got = {k: v["dim"] for k, v in out["components"].items() if v["dim"]}
    assert got == {"span": 316, "[5]": 36, "[4,1]": 256, "[3,2]": 200, "[3,1,1]": 216}


# ---- real Clifford


@pytest.mark.parametrize("n", [1, 2])
def test_real_clifford_suite_t4(n):
    res = real_clifford_suite(n, 4)
    assert res["size"] == res["expected_size"] == 2 ** (n * 2)
    assert res["orthonormal"] and res["in_C1"] and res["weyl_stabilized"]
    assert all(v for k, v in res["commute"].items() if k != "count")
    if n == 1:
        assert res["weyl_transform"]


def test_weyl_transform_t6():
    assert weyl_transform_check(6)


# ---- orthonormal bases and defects


def test_orthonormal_bases_count():
    # |O_t(F_2)| for the dot product: brute force over all invertible matrices at t = 3
    bases = orthonormal_bases(3)
    brute = 0
    for flat in gf.all_vectors(9, 2):
        B = flat.reshape(3, 3)
        if np.array_equal(B.T @ B % 2, np.eye(3, dtype=np.int64)):
            brute += 1
    assert len(bases) == brute == 6


def test_defect_strata_and_witness():
    assert set(defect_counts(4)) == {0, 4}
    assert set(defect_counts(5)) == {0, 4}
    B = anti_identity_basis(5, 4)
    assert np.array_equal(B.T @ B % 2, np.eye(5, dtype=np.int64))
    assert int(np.sum(B.sum(axis=0) % 4 == 3)) == 4


# ---- trivial isotypic component (heuristic)


@pytest.mark.parametrize("r,s,expect", [(4, 4, True), (8, 0, True), (6, 2, False), (7, 1, False), (5, 3, False)])
def test_trivial_component_n1(r, s, expect):
    res = trivial_component_norm(r, s, 1, iters=300)
    assert res["nonzero"] == expect == res["predicted"]
