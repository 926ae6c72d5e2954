"""Implementing conj(U) from t parallel uses of a black-box Clifford U.

A stochastic isotropic N of dimension (t-1)/2 avoiding 1_t gives a code C_N
with one-dimensional T_N = N^perp / N spanned by [1_t]_N.  The encoder
|x> -> |[1_t x^T]_N> maps H_n isometrically onto C_N, and
encoder^dagger Delta_{t,0}(U) encoder equals conj(U) up to a center phase.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import gflinear as gf
from .cliffordrep import CliffordWord, StateBatch, apply_tensor_power, clifford_matrix
from .commutant import CosetState
from .config import FalsificationError, ResourceLimitError
from .forms import model_form
from .isotropic import IsoSubspace, find_isotropic, ones
from .scalars import CycArray, check_prime, cyclotomic_order

CODE_T7 = ("1111000", "0011110", "1010101")


def minimal_t(d: int) -> int:
    check_prime(d)
    if d == 2:
        return 7
    return 2 * d - 1 if d % 4 == 1 else 4 * d - 1


@dataclass
class ConjugationPlan:
    d: int
    t: int
    N: IsoSubspace

    @property
    def m(self):
        return self.N.m

    def nu(self, v) -> int:
        """Coordinate of [v]_N in T_N, normalised so that [1_t]_N -> 1."""
        v = gf.as_mod(v, self.d)
        for c in range(self.d):
            if self.N.N.contains((v - c * ones(self.t)) % self.d):
                return c
        raise ValueError("vector is not in N^perp")

    def lift(self, x):
        """t x n label 1_t x^T of the encoded basis state |x>."""
        x = gf.as_mod(np.atleast_1d(x), self.d)
        return np.outer(ones(self.t), x) % self.d

    def encoder_states(self, n):
        return [CosetState.from_lift(self.N, self.lift(x), n) for x in gf.all_vectors(n, self.d)]

    def encoder(self, n, exact=True) -> StateBatch:
        """Batch whose rows are the encoder columns (d^n states in H_{n,t})."""
        states = self.encoder_states(n)
        dim = self.d ** (n * self.t)
        k = n * self.m
        if exact:
            arr = np.zeros((len(states), dim), dtype=np.int64)
            for i, st in enumerate(states):
                arr[i, st.support()] = 1
            return StateBatch(n, self.t, self.d, CycArray.from_ints(self.d, arr, k=k))
        arr = np.zeros((len(states), dim), dtype=np.complex128)
        for i, st in enumerate(states):
            arr[i, st.support()] = self.d ** (-k / 2)
        return StateBatch(n, self.t, self.d, arr)

    def to_json(self):
        return {
            "version": 1,
            "d": self.d,
            "t": self.t,
            "m": self.m,
            "N": [gf.digits(r) for r in self.N.N.basis],
            "nu": "[v]_N -> c with v = c 1_t mod N",
            "encoder": "|x> -> |[1_t x^T]_N>",
        }

    @classmethod
    def from_json(cls, obj):
        d, t = obj["d"], obj["t"]
        rows = np.array([gf.parse_digits(r, d) for r in obj["N"]])
        return cls(d, t, IsoSubspace(model_form(t, 0, d), gf.Subspace(d, t, rows)))


def build_plan(d: int, n: int = 1, rng=None) -> ConjugationPlan:
    t = minimal_t(d)
    q = model_form(t, 0, d)
    m = (t - 1) // 2
    if d == 2:
        rows = np.array([gf.parse_digits(r, 2) for r in CODE_T7])
        N = IsoSubspace(q, gf.Subspace(2, t, rows))
    else:
        if d**t > 5_000_000:
            raise ResourceLimitError(f"code search over Z_{d}^{t} is too large")
        N = find_isotropic(q, m, avoid_ones=True, rng=rng)
        if N is None:
            raise FalsificationError(f"no stochastic isotropic subspace of dim {m} for d={d}, t={t}")
    if N.m != m or N.contains_ones or N.section.k != 1:
        raise FalsificationError("code does not have a one-dimensional quotient")
    return ConjugationPlan(d, t, N)


def verify_conjugation(plan: ConjugationPlan, word: CliffordWord, exact=True, tol=1e-9) -> dict:
    """encoder^dagger Delta_{t,0}(U) encoder against phase * conj(U)."""
    n, d = word.n, plan.d
    if exact and d ** (n * plan.t) > 2**15:
        raise ResourceLimitError("exact verification limited to d^(n t) <= 2^15")
    if not exact and d ** (n * plan.t) > 2**19:
        raise ResourceLimitError("float verification limited to d^(n t) <= 2^19")
    enc = plan.encoder(n, exact)
    out = apply_tensor_power(word, plan.t, 0, enc)
    E = enc.overlaps(out)  # E[x, y] = <enc_x| Delta(U) |enc_y>
    Ubar = clifford_matrix(word, exact=exact)
    Ubar = Ubar.conj() if exact else np.conj(Ubar)
    M = cyclotomic_order(d)
    if exact:
        for e in range(M):
            if E.equals(Ubar.mul_root(e)):
                return {"ok": True, "phase": e, "M": M, "residual": 0.0}
        return {"ok": False, "phase": None, "M": M, "residual": float(np.max(np.abs(E.to_complex() - Ubar.to_complex())))}
    best, arg = np.inf, None
    for e in range(M):
        r = float(np.max(np.abs(E - np.exp(2j * np.pi * e / M) * Ubar)))
        if r < best:
            best, arg = r, e
    return {"ok": best < tol, "phase": arg, "M": M, "residual": best}


def verify_words(plan, words, exact=True, tol=1e-9):
    results = []
    for w in words:
        r = verify_conjugation(plan, w, exact, tol)
        r["word"] = w.to_text()
        results.append(r)
    return results


def rs_intertwiner(g, d):
    """Index map |F> -> |g F> on one column for g in GL(T) (as a permutation array)."""
    g = gf.as_mod(g, d)
    t = g.shape[0]
    V = gf.all_vectors(t, d)
    return gf.vec_index(V @ g.T % d, d)


def check_rs_equivalence(g, r1, s1, r2, s2, d) -> bool:
    """Does |F> -> |gF> intertwine Delta_{r1,s1} and Delta_{r2,s2} on single-qudit generators?

    g must carry q_{r1,s1} to q_{r2,s2}.  Checked exactly at n = 1.
    """
    from .cliffordrep import tensor_power_matrix

    perm = rs_intertwiner(g, d)
    D = d ** (r1 + s1)
    Pm = np.zeros((D, D), dtype=np.int64)
    Pm[perm, np.arange(D)] = 1
    Pc = CycArray.from_ints(d, Pm)
    for gate in (("H", 0), ("P", 0)):
        w = CliffordWord(1, d, (gate,))
        A = tensor_power_matrix(w, r1, s1)
        B = tensor_power_matrix(w, r2, s2)
        if not (Pc @ A).equals(B @ Pc):
            return False
    return True


def dump_plan(plan, path):
    with open(path, "w") as fh:
        json.dump(plan.to_json(), fh, indent=2, sort_keys=True)


def load_plan(path) -> ConjugationPlan:
    with open(path) as fh:
        return ConjugationPlan.from_json(json.load(fh))
