"""Quick internal checks behind ``cliffdual selftest``.

Each suite returns a dict of named booleans and runs in a few seconds.
"""

from __future__ import annotations

import numpy as np


def forms_suite():
    from .forms import garf, invariants, model_form, models_equivalent

    out = {}
    out["garf(q_rs) = r - s mod 8, r,s <= 5"] = all(
        garf(model_form(r, s, 2)) == (r - s) % 8 for r in range(6) for s in range(6) if r + s
    )
    agree = True
    for d in (2, 3, 5):
        for t in range(1, 5):
            for s in range(t + 1):
                for s2 in range(t + 1):
                    a = invariants(model_form(t - s, s, d)).key() == invariants(model_form(t - s2, s2, d)).key()
                    agree &= a == models_equivalent(t - s, s, t - s2, s2, d)
    out["closed-form equivalence matches invariants"] = agree
    return out


def iso_suite():
    from .isotropic import enumerate_strata, witt_transporter

    Gr = [N for N in enumerate_strata(5, 0, 2, m=1)]
    out = {"Gr(5,0) has 5 lines": len(Gr) == 5 and all(not N.contains_ones for N in Gr)}
    out["single orbit"] = all(witt_transporter(Gr[0], N) is not None for N in Gr)
    out["q_{2,0} has no nonzero codes at d=3"] = all(N.m == 0 for N in enumerate_strata(2, 0, 3))
    return out


def group_suite():
    from .orthostoch import character_table, enumerate_O1

    G3 = enumerate_O1(3, 0, 2)
    T = character_table(G3)
    return {
        "|O1(3,0)| = 6": G3.order == 6,
        "closed": G3.is_closed(),
        "character orthogonality": T.check_orthogonality(),
        "degrees": sorted(T.degrees) == [1, 1, 2],
    }


def cliffordrep_suite():
    from .cliffordrep import CliffordWord, clifford_matrix, random_word, weight_eigenvalue_check
    from .forms import model_form
    from .scalars import CycArray

    out = {}
    ok = True
    for d in (2, 3):
        for g in (("H", 0), ("P", 0)):
            U = clifford_matrix(CliffordWord(1, d, (g,)))
            ok &= (U @ U.conj().T).equals(CycArray.eye(d, d))
    out["single-qudit gates unitary"] = ok
    rng = np.random.default_rng(0)
    w = random_word(2, 2, 12, rng)
    U = clifford_matrix(w)
    V = clifford_matrix(w.inverse())
    out["word inverse"] = (U @ V).equals(CycArray.eye(2, 4))
    q = model_form(2, 1, 2)
    out["weight law sample"] = all(
        weight_eigenvalue_check(q, rng.integers(0, 2, (4, 3)), 3, 1) for _ in range(5)
    )
    return out


def commutant_suite():
    from .commutant import commutes_with_generators, exact_rank, gram_matrix_S, semigroup_elements

    els = semigroup_elements(3, 0, 2)
    out = {"|S(3,0)| = 6": len(els) == 6}
    out["S(3,0) commutes"] = all(all(commutes_with_generators(e.column, 3, 0, 2).values()) for e in els)
    _, G = gram_matrix_S(3, 0, 2, 4)
    out["Gram full rank at n=4"] = exact_rank(G) == 6
    return out


def decompose_suite():
    from .decompose import exact_duality_check, t5_span_analysis, two_mod_three_agrees

    out = {f"exact duality d={d} t={t}": exact_duality_check(d, t)["agree"] for d in (3, 5) for t in (2, 3)}
    out["2 mod 3 reduction"] = all(two_mod_three_agrees(d) for d in (5, 7, 11, 13))
    a = t5_span_analysis(3)
    out["t5 coset states independent at n=3"] = a["rank"] == a["expected_rank"] == 2560
    return out


def conjugate_suite():
    from .cliffordrep import random_word
    from .conjugate import build_plan, verify_conjugation

    plan = build_plan(2)
    rng = np.random.default_rng(0)
    res = [verify_conjugation(plan, random_word(1, 2, 15, rng)) for _ in range(5)]
    return {"t = 7": plan.t == 7, "5 random words": all(r["ok"] for r in res)}


SUITES = {
    "forms": forms_suite,
    "iso": iso_suite,
    "group": group_suite,
    "cliffordrep": cliffordrep_suite,
    "commutant": commutant_suite,
    "decompose": decompose_suite,
    "conjugate": conjugate_suite,
}
