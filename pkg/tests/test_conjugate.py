import numpy as np
import pytest

from cliffdual import gflinear as gf
from cliffdual.cliffordrep import CliffordWord, clifford_matrix, parse_word, random_word
from cliffdual.config import ResourceLimitError
from cliffdual.conjugate import (
    build_plan,
    check_rs_equivalence,
    dump_plan,
    load_plan,
    minimal_t,
    verify_conjugation,
    verify_words,
)
from cliffdual.forms import find_isometry, model_form
from cliffdual.isotropic import ones
from cliffdual.scalars import CycArray


def test_minimal_t():
    assert [minimal_t(d) for d in (2, 3, 5, 7, 11, 13)] == [7, 11, 9, 27, 43, 25]
    with pytest.raises(ValueError):
        minimal_t(4)


def test_qubit_plan():
    plan = build_plan(2)
    assert plan.t == 7 and plan.m == 3
    assert not plan.N.contains_ones and plan.N.section.k == 1
    assert plan.nu(ones(7)) == 1 and plan.nu(np.zeros(7, dtype=np.int64)) == 0


@pytest.mark.parametrize("d", [3, 5])
def test_odd_plans(d):
    plan = build_plan(d, rng=np.random.default_rng(0))
    assert plan.t == minimal_t(d) and plan.m == (plan.t - 1) // 2
    assert not np.any(plan.N.q.evaluate(plan.N.N.elements()))
    assert plan.N.section.k == 1
    assert [plan.nu(c * ones(plan.t)) for c in range(d)] == list(range(d))


@pytest.mark.parametrize("n", [1, 2])
def test_encoder_is_an_isometry(n):
    plan = build_plan(2)
    enc = plan.encoder(n)
    assert enc.overlaps(enc).equals(CycArray.eye(2, 2**n))
    assert np.allclose(plan.encoder(n, exact=False).arr, enc.to_complex())


def test_simple_words():
    plan = build_plan(2)
    for text in ("", "H0", "P0", "P0 P0 P0", "H0 P0 H0"):
        res = verify_conjugation(plan, parse_word(text, 1, 2))
        assert res["ok"], text


def test_random_words_exact(rng):
    plan = build_plan(2)
    res = verify_words(plan, [random_word(1, 2, 25, rng) for _ in range(20)])
    assert all(r["ok"] for r in res)
    res = verify_words(plan, [random_word(2, 2, 10, rng) for _ in range(3)])
    assert all(r["ok"] for r in res)


def test_phases_compose(rng):
    plan = build_plan(2)
    for _ in range(5):
        a = random_word(1, 2, 8, rng)
        b = random_word(1, 2, 8, rng)
        ra, rb, rab = (verify_conjugation(plan, w) for w in (a, b, a + b))
        assert rab["phase"] == (ra["phase"] + rb["phase"]) % ra["M"]


def test_global_phase_gate():
    # Delta_{7,0}(zeta_8^k) = zeta_8^{7k}, and conj gives zeta_8^{-k}: the ratio is trivial
    plan = build_plan(2)
    res = verify_conjugation(plan, parse_word("PH:3 H0", 1, 2))
    assert res["ok"] and res["phase"] == 0


def test_encoder_does_not_give_U_itself():
    # sanity: the compressed operator is conj(P), which is not a phase times P
    plan = build_plan(2)
    w = parse_word("P0", 1, 2)
    enc = plan.encoder(1)
    from cliffdual.cliffordrep import apply_tensor_power

    E = enc.overlaps(apply_tensor_power(w, 7, 0, enc))
    U = clifford_matrix(w)
    assert not any(E.equals(U.mul_root(e)) for e in range(8))


def test_odd_d_float(rng):
    plan = build_plan(3, rng=np.random.default_rng(0))
    for _ in range(2):
        res = verify_conjugation(plan, random_word(1, 3, 15, rng), exact=False)
        assert res["ok"] and res["residual"] < 1e-9


def test_resource_guard():
    plan = build_plan(3, rng=np.random.default_rng(0))
    with pytest.raises(ResourceLimitError):
        verify_conjugation(plan, random_word(1, 3, 3, np.random.default_rng(0)), exact=True)


def test_plan_roundtrip(tmp_path):
    plan = build_plan(3, rng=np.random.default_rng(1))
    p = tmp_path / "plan.json"
    dump_plan(plan, p)
    back = load_plan(p)
    assert back.t == plan.t and back.N.N == plan.N.N
    assert back.to_json() == plan.to_json()


def test_rs_equivalence_witness():
    q80, q44 = model_form(8, 0, 2), model_form(4, 4, 2)
    S = np.eye(8, dtype=np.int64)
    S[0] = 1
    g = find_isometry(q80, q44, source_basis=S, prescribed=[ones(8)])
    assert g is not None
    assert np.array_equal(g @ ones(8) % 2, ones(8))
    assert check_rs_equivalence(g, 8, 0, 4, 4, 2)
    assert not check_rs_equivalence(np.eye(8, dtype=np.int64), 8, 0, 4, 4, 2)
