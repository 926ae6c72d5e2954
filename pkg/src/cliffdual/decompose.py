"""Layer operators, the t = 5 decomposition, stabilizer compression and the real-Clifford suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from . import gflinear as gf
from .cliffordrep import (
    CliffordWord,
    StateBatch,
    apply_tensor_power,
    generators,
    tensor_power_matrix,
)
from .commutant import (
    ColumnOp,
    commutes_with_generators,
    coset_basis,
    coset_matrix,
    permutation_column,
    projector_column,
    t5_codes,
)
from .config import LIMITS, ResourceLimitError
from .forms import QuadForm, SymBilForm, iter_isometries, model_form
from .isotropic import IsoSubspace, enumerate_strata, ones
from .orthostoch import action_on_subspaces, character_table, enumerate_O1
from .scalars import CycArray, legendre


# ---------------------------------------------------------------- sums of tensor powers


def _canonical(A: ColumnOp):
    """(c, B) with A = c B, B primitive integer with positive leading entry."""
    nz = np.flatnonzero(A.ints)
    if nz.size == 0:
        return Fraction(0), None
    g = 0
    for x in np.unique(np.abs(A.ints[A.ints != 0])):
        g = gcd(g, int(x))
    sign = 1 if A.ints.flat[nz[0]] > 0 else -1
    B = ColumnOp(A.d, A.t, A.ints // (g * sign), 0)
    return Fraction(g * sign, A.d**A.m), B


class TensorPowerSum:
    """sum_i c_i A_i^{(x) n} for column operators A_i and rational c_i."""

    def __init__(self, n, terms=()):
        self.n = n
        acc: dict = {}
        for c, A in terms:
            s, B = _canonical(A)
            if B is None or c == 0:
                continue
            key = B.ints.tobytes()
            if key in acc:
                acc[key] = (acc[key][0] + Fraction(c) * s**n, B)
            else:
                acc[key] = (Fraction(c) * s**n, B)
        self.terms = [(c, B) for c, B in acc.values() if c != 0]

    @classmethod
    def single(cls, A: ColumnOp, n, c=1):
        return cls(n, [(Fraction(c), A)])

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        return TensorPowerSum(self.n, self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def scaled(self, c):
        return TensorPowerSum(self.n, [(Fraction(c) * a, A) for a, A in self.terms])

    def __matmul__(self, other):
        return TensorPowerSum(self.n, [(a * b, A @ B) for a, A in self.terms for b, B in other.terms])

    def dagger(self):
        return TensorPowerSum(self.n, [(a, A.dagger()) for a, A in self.terms])

    def hs_inner(self, other) -> Fraction:
        """tr(self^dagger other), exact."""
        tot = Fraction(0)
        for a, A in self.terms:
            for b, B in other.terms:
                tot += a * b * A.hs_inner(B) ** self.n
        return tot

    def hs_norm2(self) -> Fraction:
        return self.hs_inner(self)

    def is_zero(self) -> bool:
        return self.hs_norm2() == 0

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def trace(self) -> Fraction:
        return sum((a * A.trace() ** self.n for a, A in self.terms), Fraction(0))

    def dense_ints(self):
        """(integer matrix X, denominator D) with operator X / D (small n only)."""
        if not self.terms:
            return None, 1
        d, t = self.terms[0][1].d, self.terms[0][1].t
        dim = d ** (t * self.n)
        if dim > 4096:
            raise ResourceLimitError("dense tensor-power sum too large")
        den = 1
        for a, _ in self.terms:
            den = den * a.denominator // gcd(den, a.denominator)
        X = np.zeros((dim, dim), dtype=object)
        for a, A in self.terms:
            K = np.array([[1]], dtype=object)
            for _ in range(self.n):
                K = np.kron(K, A.ints.astype(object))
            X = X + K * (a.numerator * (den // a.denominator))
        return X, den

    def apply(self, psi: StateBatch) -> StateBatch:
        from .commutant import apply_column_power

        out = None
        for a, A in self.terms:
            y = apply_column_power(psi, A)
            y = StateBatch(psi.n, psi.t, psi.d, y.to_complex() * float(a)) if not psi.exact else _scale_exact(y, a)
            out = y if out is None else StateBatch(psi.n, psi.t, psi.d, out.arr + y.arr)
        return out

    def commutes_with_generators(self, r, s, d) -> bool:
        """Termwise commutation with Delta_{r,s}(H), (P), (CADD)."""
        return all(all(commutes_with_generators(A, r, s, d).values()) for _, A in self.terms)


def _scale_exact(psi: StateBatch, c: Fraction):
    num = psi.arr.scale_int(c.numerator)
    den = c.denominator
    d = psi.d
    k = 0
    while den % d == 0:
        den //= d
        k += 2
    if den != 1:
        raise ValueError("exact scaling requires a power-of-d denominator")
    return StateBatch(psi.n, psi.t, d, CycArray(d, num.data, num.k + k))


def commutator(a: TensorPowerSum, b: TensorPowerSum) -> TensorPowerSum:
    return a @ b - b @ a


# ---------------------------------------------------------------- layers


@dataclass
class LayerOperators:
    r: int
    s: int
    d: int
    n: int
    Cp: dict = field(default_factory=dict)  # C'_m
    D: dict = field(default_factory=dict)  # D_m
    C: dict = field(default_factory=dict)  # C_m = C'_m - D_{m+1}
    strata: dict = field(default_factory=dict)

    @property
    def t(self):
        return self.r + self.s

    def ones_isotropic(self):
        D = 4 if self.d == 2 else self.d
        return (self.r - self.s) % D == 0


def build_layers(r, s, d, n) -> LayerOperators:
    """C'_m = sum over Gr_m of P(N), D_m = sum over Gr0_m, C_m = C'_m - D_{m+1}."""
    L = LayerOperators(r, s, d, n)
    allN = enumerate_strata(r, s, d)
    q = model_form(r, s, d)
    zero = IsoSubspace(q, gf.Subspace(d, r + s))
    gr = [zero] + [N for N in allN if N.m > 0 and not N.contains_ones]
    gr0 = [N for N in allN if N.contains_ones]
    ms = sorted({N.m for N in gr} | {N.m for N in gr0})
    for m in range(0, max(ms) + 2):
        a = [N for N in gr if N.m == m]
        b = [N for N in gr0 if N.m == m]
        L.strata[m] = {"Gr": a, "Gr0": b}
        L.Cp[m] = TensorPowerSum(n, [(1, projector_column(N)) for N in a])
        L.D[m] = TensorPowerSum(n, [(1, projector_column(N)) for N in b])
    top = max(L.Cp)
    for m in range(0, top):
        L.C[m] = L.Cp[m] - L.D[m + 1]
    return L


def ones_projector(r, s, d, n) -> TensorPowerSum:
    q = model_form(r, s, d)
    return TensorPowerSum.single(projector_column(IsoSubspace(q, gf.Subspace(d, r + s, ones(r + s)))), n)


def layer_commutation_suite(L: LayerOperators, group=None) -> dict:
    """Exact checks of the layer identities; every value is a bool or a count."""
    out = {"ones_isotropic": L.ones_isotropic(), "layers": {}}
    if group is None:
        try:
            group = enumerate_O1(L.r, L.s, L.d)
        except ResourceLimitError:
            group = None
    P1 = ones_projector(L.r, L.s, L.d, L.n) if L.ones_isotropic() else None
    Rs = []
    if group is not None:
        Rs = [TensorPowerSum.single(permutation_column(g, L.d), L.n) for g in _group_generators(group)]
    for m in sorted(L.C):
        res = {"|Gr|": len(L.strata[m]["Gr"]), "|Gr0_next|": len(L.strata[m + 1]["Gr0"])}
        Cp = L.Cp[m]
        if P1 is not None:
            res["[C',P1]=0"] = commutator(Cp, P1).is_zero()
            # each M in Gr0_{m+1} arises from d^m hyperplanes N in Gr_m
            res["C'P1=d^m D"] = (Cp @ P1).equals(L.D[m + 1].scaled(L.d**m))
            res["C'P1=D"] = (Cp @ P1).equals(L.D[m + 1])
        else:
            res["D_next_zero"] = len(L.D[m + 1]) == 0
        res["R-invariant"] = all(
            (R @ Cp @ R.dagger()).equals(Cp) and (R @ L.D[m + 1] @ R.dagger()).equals(L.D[m + 1]) for R in Rs
        )
        res["Clifford-commuting"] = Cp.commutes_with_generators(L.r, L.s, L.d) and L.D[
            m + 1
        ].commutes_with_generators(L.r, L.s, L.d)
        out["layers"][m] = res
    return out


def _group_generators(G):
    return [G.elements[i] for i in G.generators()]


# ---------------------------------------------------------------- stabilizer compression


def stab_projector(r, s, d, n, group=None) -> TensorPowerSum:
    """|O_1|^{-1} sum_O R(O)."""
    G = group or enumerate_O1(r, s, d)
    w = Fraction(1, G.order)
    return TensorPowerSum(n, [(w, permutation_column(g, d)) for g in G.elements])


def stab_subspace_ops(r, s, d, n) -> dict:
    """Compression of the layer operators by the group average and its commutativity."""
    L = build_layers(r, s, d, n)
    P = stab_projector(r, s, d, n)
    res = {
        "P_idempotent": (P @ P).equals(P),
        "P_selfadjoint": P.dagger().equals(P),
        "commutators": {},
    }
    ops = {f"C{m}": L.C[m] for m in L.C} | {f"D{m}": L.D[m] for m in L.D if len(L.D[m])}
    names = sorted(ops)
    for i, a in enumerate(names):
        for b in names[i:]:
            res["commutators"][f"[{a},{b}]P"] = (commutator(ops[a], ops[b]) @ P).is_zero()
    basis = {f"C{m}P": L.C[m] @ P for m in L.C}
    basis |= {f"D{m + 1}P": L.D[m + 1] @ P for m in L.C if len(L.D[m + 1])}
    keys = sorted(basis)
    res["compression_abelian"] = all(
        commutator(basis[a], basis[b]).is_zero() for i, a in enumerate(keys) for b in keys[i + 1 :]
    )
    res["compression_basis"] = keys
    res["P_stab"] = P
    res["layers"] = L
    return res


# ---------------------------------------------------------------- exact duality


def exact_duality_predicate(d, r, s) -> bool:
    """Closed-form condition for the commutant to be spanned by the R(O)."""
    t = r + s
    if d == 2 or t < 2:
        raise ValueError("predicate is stated for odd d and t >= 2")
    if t > 3 or r * s != 0:
        return False
    if t == 2:
        return True
    return legendre(3, d) == -legendre(-1, d)


def strata_empty(d, r, s) -> bool:
    """Enumeration: no non-zero stochastic isotropic subspace."""
    return all(N.m == 0 for N in enumerate_strata(r, s, d))


def exact_duality_check(d, t) -> dict:
    """Predicate versus enumeration for every (r, s) with r + s = t."""
    rows = {}
    for s in range(t + 1):
        r = t - s
        rows[(r, s)] = {"predicate": exact_duality_predicate(d, r, s), "empty": strata_empty(d, r, s)}
    return {"d": d, "t": t, "agree": all(v["predicate"] == v["empty"] for v in rows.values()), "cases": rows}


def two_mod_three_agrees(d) -> bool:
    """l(3) = -l(-1) holds exactly when d = 2 mod 3 (d > 3)."""
    return (legendre(3, d) == -legendre(-1, d)) == (d % 3 == 2)


# ---------------------------------------------------------------- t = 5 pipeline


def epsilon(n) -> float:
    return 5 * (4.0**-n + 2.0**-n) + 2 * math.comb(5, 2) * 4.0**-n


class T5Span:
    """Coset states of the five t = 5 codes and their Gram matrix."""

    def __init__(self, n):
        self.n = n
        self.codes = t5_codes()
        self.states = [st for N in self.codes for st in coset_basis(N, n)]
        self.code_of = np.repeat(np.arange(5), 8**n)
        self.S = coset_matrix(self.states, n, 5, 2)  # 0/1 supports
        self.G_int = (self.S @ self.S.T).tocsr()  # overlaps times 2^n
        self.pos = {st.key(): i for i, st in enumerate(self.states)}

    @property
    def size(self):
        return len(self.states)

    def gram(self):
        return self.G_int.astype(float) / 2.0**self.n

    def diagonally_dominant(self) -> bool:
        """Exact strict diagonal dominance of the integer Gram matrix."""
        G = self.G_int
        diag = G.diagonal()
        off = np.asarray(abs(G).sum(axis=1)).ravel() - diag
        return bool(np.all(off < diag))

    def exact_rank(self) -> int:
        """Rank of the coset states over Q.

        Strict diagonal dominance certifies full rank.  Otherwise the rank of
        the integer Gram matrix modulo the prime 2^31 - 1 is used, block by
        block; it is a lower bound for the rational rank and agrees with it
        unless the prime divides every maximal nonzero minor.
        """
        if self.diagonally_dominant():
            return self.size
        G = self.G_int
        k, lab = connected_components(G, directed=False)
        total = 0
        for c in range(k):
            idx = np.flatnonzero(lab == c)
            total += gf.rank(G[idx][:, idx].toarray().astype(np.int64), 2**31 - 1)
        return total

    def spectrum(self):
        """Eigenvalues of the Gram matrix, block by block."""
        G = self.gram().tocsr()
        k, lab = connected_components(G, directed=False)
        ev = []
        for c in range(k):
            idx = np.flatnonzero(lab == c)
            ev.append(np.linalg.eigvalsh(G[idx][:, idx].toarray()))
        return np.sort(np.concatenate(ev))

    def _tables(self):
        if not hasattr(self, "_lifts"):
            self._lifts = np.stack([st.lift() for st in self.states])  # (size, 5, n)
            V = gf.all_vectors(5, 2)
            self._coord = []
            for N in self.codes:
                tab = -np.ones(32, dtype=np.int64)
                inside = np.array([N.perp.contains(v) for v in V])
                tab[inside] = gf.vec_index(N.section.project(V[inside]), 2)
                self._coord.append(tab)
            self._code_index = {N.N: i for i, N in enumerate(self.codes)}

    def state_permutation(self, O):
        """Index map b -> O.b on the coset states (R(O)|b> = |O.b>)."""
        self._tables()
        n = self.n
        code_img = np.array([self._code_index[N.N.image(O)] for N in self.codes])
        new_code = code_img[self.code_of]
        cols = np.einsum("ij,bjc->bci", O, self._lifts) % 2  # (size, n, 5)
        vi = gf.vec_index(cols, 2)  # (size, n)
        tabs = np.stack(self._coord)
        coords = tabs[new_code[:, None], vi]  # (size, n), T_N coordinates as 3-bit indices
        bits = (coords[:, :, None] >> np.arange(2, -1, -1)) & 1  # (size, n, 3)
        fbar = np.transpose(bits, (0, 2, 1)).reshape(self.size, 3 * n)
        return new_code * 8**n + gf.vec_index(fbar, 2)


def _full_permutation(col_perm, n, D):
    idx = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        idx = (idx[:, None] * D + col_perm[None, :]).ravel()
    return idx


def t5_pipeline(n, checks=True, rng=None, tol=1e-9) -> dict:
    """Isotypic idempotents of H_{n,5} (d = 2): the code span plus one per partition of 5."""
    if not 1 <= n <= 3:
        raise ResourceLimitError("t5_pipeline materializes vectors of size 2^(5n); n <= 3 supported")
    rng = rng or np.random.default_rng(0)
    span = T5Span(n)
    G = enumerate_O1(5, 0, 2)
    codes = span.codes
    perms5 = action_on_subspaces(G, [N.N for N in codes])
    table = character_table(G, perms5)
    V = gf.all_vectors(5, 2)
    dim = 2 ** (5 * n)
    Gram = span.gram().toarray()
    # at n = 1 the coset states are dependent; the pseudo-inverse still gives the span projector
    Ginv = np.linalg.pinv(Gram, hermitian=True)
    GG = Ginv @ Gram
    span_dim = int(round(np.trace(GG)))
    amp = 2.0 ** (-n / 2)
    Psi = (span.S.astype(float) * amp).tocsr()

    def P_span(v):
        return Psi.T @ (Ginv @ (Psi @ v))

    col_perms = [gf.vec_index(V @ g.T % 2, 2) for g in G.elements]
    full_perms = [_full_permutation(p, n, 32) for p in col_perms]
    fixed = np.array([int(np.sum(p == np.arange(32))) for p in col_perms])
    # tr R(O) P_span = tr(G^+ G Pi_O) with Pi_O the induced permutation of coset states
    state_fixed = []
    for g in G.elements:
        sp = span.state_permutation(g)
        state_fixed.append(int(round(float(np.sum(GG[sp, np.arange(span.size)])))))
    state_fixed = np.array(state_fixed)
    label = G.class_label()
    chars = np.array([[float(v.to_complex().real) for v in row] for row in table.values])
    degs = [int(x) for x in table.degrees]
    comps = {"span": {"dim": span_dim, "degree": None, "multiplicity": None}}
    for li, lam in enumerate(table.labels):
        chi = chars[li][label]
        tr = Fraction(0)
        for a in range(G.order):
            tr += Fraction(int(round(chi[a]))) * (fixed[a] ** n - int(state_fixed[a]))
        dimc = tr * degs[li] / G.order
        comps[lam] = {"dim": int(dimc), "degree": degs[li], "multiplicity": int(dimc) // degs[li]}

    def R(a, v):
        out = np.empty_like(v)
        out[full_perms[a]] = v
        return out

    def group_sum(li, v):
        chi = chars[li][label]
        acc = np.zeros_like(v)
        for a in range(G.order):
            if chi[a] != 0:
                acc += chi[a] * R(a, v)
        return acc

    def Pi(li, v):
        w = v - P_span(v)
        return degs[li] / G.order * group_sum(li, w)

    out = {
        "n": n,
        "components": comps,
        "total_dim": sum(c["dim"] for c in comps.values()),
        "hilbert_dim": dim,
        "gram_condition": float(np.linalg.cond(Gram)),
        "epsilon": epsilon(n),
        "spectrum_range": [float(x) for x in np.linalg.eigvalsh(Gram)[[0, -1]]],
    }
    out["max_deviation"] = max(abs(out["spectrum_range"][0] - 1), abs(out["spectrum_range"][1] - 1))
    if checks:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        parts = [P_span(v)] + [Pi(li, v) for li in range(len(degs))]
        out["complete"] = bool(np.max(np.abs(sum(parts) - v)) < tol * np.linalg.norm(v))
        idem = [np.max(np.abs(P_span(parts[0]) - parts[0]))]
        idem += [np.max(np.abs(Pi(li, parts[li + 1]) - parts[li + 1])) for li in range(len(degs))]
        out["idempotent"] = bool(max(idem) < tol * np.linalg.norm(v))
        orth = []
        for i, p in enumerate(parts):
            for j, q in enumerate(parts):
                if i < j:
                    orth.append(abs(np.vdot(p, q)))
        out["orthogonal"] = bool(max(orth) < tol * np.linalg.norm(v) ** 2)
        # character projector applied twice on the complement of the span
        w = v - P_span(v)
        cons = []
        for li in range(len(degs)):
            once = group_sum(li, w)
            twice = group_sum(li, once)
            cons.append(np.max(np.abs(twice - G.order / degs[li] * once)))
        out["character_consistent"] = bool(max(cons) < tol * G.order * np.linalg.norm(v))
        comm = []
        psi = StateBatch(n, 5, 2, v[None, :])
        for g in generators(n, 2):
            gv = apply_tensor_power(g, 5, 0, psi).arr[0]
            for li in range(len(degs)):
                lhs = apply_tensor_power(g, 5, 0, StateBatch(n, 5, 2, Pi(li, v)[None, :])).arr[0]
                comm.append(np.max(np.abs(lhs - Pi(li, gv))))
            lhs = apply_tensor_power(g, 5, 0, StateBatch(n, 5, 2, P_span(v)[None, :])).arr[0]
            comm.append(np.max(np.abs(lhs - P_span(gv))))
        out["clifford_commuting"] = bool(max(comm) < tol * np.linalg.norm(v))
    return out


def t5_span_analysis(n) -> dict:
    """Exact rank certificate and Gram spectrum of the five-code span."""
    span = T5Span(n)
    ev = span.spectrum()
    return {
        "n": n,
        "states": span.size,
        "rank": span.exact_rank(),
        "expected_rank": 5 * 2 ** (3 * n),
        "spectrum_min": float(ev[0]),
        "spectrum_max": float(ev[-1]),
        "epsilon": epsilon(n),
        "within_epsilon": bool(ev[0] >= 1 - epsilon(n) - 1e-9 and ev[-1] <= 1 + epsilon(n) + 1e-9),
    }


# ---------------------------------------------------------------- real Clifford suite


def kappa_form(n) -> QuadForm:
    """kappa(v) = v_z . v_x on V = Z_2^{2n}."""
    rep = np.zeros((2 * n, 2 * n), dtype=np.int64)
    rep[np.arange(n), n + np.arange(n)] = 1
    return QuadForm(2, rep)


def symplectic_pairing(u, v, n):
    u, v = np.asarray(u), np.asarray(v)
    return int(u[..., :n] @ v[..., n:] + u[..., n:] @ v[..., :n]) % 2


def _weyl_column(u, v):
    """Column state of Psi for z-bits u and x-bits v (length t' each), as +-1 ints."""
    tp = len(u)
    us = list(u) + [int(np.sum(u)) % 2]
    vs = list(v) + [int(np.sum(v)) % 2]
    state = np.ones(1, dtype=np.int64)
    for p in range(tp + 1):
        pair = np.zeros(4, dtype=np.int64)
        for y in range(2):
            row = (y + vs[p]) % 2
            pair[row * 2 + y] = (-1) ** (us[p] * row)
        state = np.kron(state, pair)
    return state


def _weyl_ints(A, n, t):
    A = gf.as_mod(np.asarray(A).reshape(t // 2 - 1, 2 * n), 2)
    full = np.ones(1, dtype=np.int64)
    for j in range(n):
        full = np.kron(full, _weyl_column(A[:, j], A[:, n + j]))
    return full


def weyl_basis_state(A, n, t) -> StateBatch:
    """Psi_A for a t' x 2n binary matrix A = (A_Z | A_X)."""
    return StateBatch(n, t, 2, CycArray.from_ints(2, _weyl_ints(A, n, t)[None, :], k=n * t // 2))


def weyl_batch(mats, n, t) -> StateBatch:
    ints = np.stack([_weyl_ints(A, n, t) for A in mats])
    return StateBatch(n, t, 2, CycArray.from_ints(2, ints, k=n * t // 2))


def real_signature(t):
    """(r, s) with r + s = t and r - s = 0 mod 4 used for the real-Clifford setting."""
    if t % 2 or t < 4:
        raise ValueError("the Weyl basis needs even t >= 4")
    return (t, 0) if t % 4 == 0 else (t // 2, t // 2)


def weyl_basis(n, t):
    real_signature(t)
    if 2 ** (n * t) > LIMITS["dense_dim"]:
        raise ResourceLimitError("Weyl basis states too large")
    tp = t // 2 - 1
    mats = gf.all_vectors(tp * 2 * n, 2).reshape(-1, tp, 2 * n)
    return mats, weyl_batch(mats, n, t)


def weyl_transform_check(t) -> bool:
    """n = 1: sum_u (-1)^{u.w} Psi_{(u, v)} = 2^{t'/2} |[f]_<1>| with f built from (v, w)."""
    from .commutant import CosetState

    n = 1
    tp = t // 2 - 1
    k = tp + 1
    q = model_form(*real_signature(t), 2)
    one = IsoSubspace(q, gf.Subspace(2, t, ones(t)))
    ok = True
    for v in gf.all_vectors(tp, 2):
        for w in gf.all_vectors(tp, 2):
            acc = None
            for u in gf.all_vectors(tp, 2):
                A = np.stack([u, v], axis=1)
                st = weyl_basis_state(A, n, t).arr
                if int(u @ w) % 2:
                    st = -st
                acc = st if acc is None else acc + st
            X = int(np.sum(v)) % 2
            f = np.zeros(t, dtype=np.int64)
            for p in range(tp):
                f[2 * p] = (w[p] + X) % 2
                f[2 * p + 1] = (w[p] + v[p] + X) % 2
            f[2 * k - 2] = X
            cs = CosetState.from_lift(one, f[:, None], n).to_state()
            # 2^{t'/2} = sqrt(2)^{t'}
            rhs = CycArray(2, cs.arr.data, cs.arr.k - tp)
            ok &= acc.equals(rhs)
    return bool(ok)


def symplectic_complement(t):
    """T' = span{e_0+e_1, e_0+e_2, ...} inside 1^perp with T' + <1> = 1^perp."""
    rows = []
    for i in range(1, t - 1):
        v = np.zeros(t, dtype=np.int64)
        v[0] = 1
        v[i] = 1
        rows.append(v)
    return gf.Subspace(2, t, np.array(rows))


def embedded_symplectic_group(t):
    """All S in GL(T) acting symplectically on T' and trivially on T'^perp."""
    Tp = symplectic_complement(t)
    beta = np.eye(t, dtype=np.int64)
    Tperp = Tp.perp(beta)
    Bp = Tp.basis
    k = Bp.shape[0]
    Gp = Bp @ Bp.T % 2
    full = np.vstack([Bp, Tperp.basis])
    finv = gf.inverse(full.T, 2)
    out = []
    if k > 4:
        raise ResourceLimitError("embedded symplectic group enumeration limited to dim T' <= 4")
    for g in iter_isometries(SymBilForm(2, Gp), SymBilForm(2, Gp)):
        # g acts on T' coordinates; images of basis rows are rows of g^T @ Bp
        img = np.vstack([g.T @ Bp % 2, Tperp.basis])
        out.append(img.T @ finv % 2)
    return Tp, Tperp, out


def real_clifford_generators(n):
    gates = [("H", j) for j in range(n)]
    for j in range(n):
        v = np.zeros(2 * n, dtype=np.int64)
        v[n + j] = 1
        gates.append(("W", tuple(int(x) for x in v)))
    gates += [("CADD", i, j) for i in range(n) for j in range(n) if i != j]
    return gates


def sp_o_commute(t) -> dict:
    """Delta(g) Delta~(S) = Delta~(S) Delta(g) for real-Clifford gates g, all S (column level)."""
    r, s = real_signature(t)
    q = model_form(r, s, 2)
    P1 = projector_column(IsoSubspace(q, gf.Subspace(2, t, ones(t))))
    _, _, Ss = embedded_symplectic_group(t)
    X = tensor_power_matrix(CliffordWord(1, 2, (("W", (0, 1)),)), r, s)
    res = {"H": True, "X": True, "CNOT": True, "count": len(Ss)}
    for S in Ss:
        A = permutation_column(S, 2) @ P1
        c = commutes_with_generators(A, r, s, 2)
        res["H"] &= c["H"]
        res["CNOT"] &= c["CADD"]
        Ac = A.to_cycarray()
        res["X"] &= (X @ Ac).equals(Ac @ X)
    return res


def orthogonal_group_V(n):
    k = kappa_form(n)
    return list(iter_isometries(k, k))


def orbit_signature(vs, n):
    """(I, pairings on I, kappa on I, M) for a tuple of vectors in V."""
    vs = [np.asarray(v) % 2 for v in vs]
    I, basis = [], []
    for i, v in enumerate(vs):
        if gf.rank(np.array(basis + [v]), 2) > len(basis):
            I.append(i)
            basis.append(v)
    pair = tuple(symplectic_pairing(vs[a], vs[b], n) for ai, a in enumerate(I) for b in I[ai + 1 :])
    kap = tuple(int(vs[i][:n] @ vs[i][n:]) % 2 for i in I)
    M = []
    for j in range(len(vs)):
        if j in I:
            continue
        coeffs = gf.solve(np.array(basis).T, vs[j], 2) if basis else np.zeros(0, dtype=np.int64)
        M.append(tuple(int(c) for c in coeffs))
    return (tuple(I), pair, kap, tuple(M))


def orbit_counts(n, tp) -> dict:
    """Orbits of O(V) on V^{t'}: by invariant signatures and by explicit partition."""
    V = gf.all_vectors(2 * n, 2)
    if len(V) ** tp > 70_000:
        raise ResourceLimitError("orbit enumeration too large")
    tuples = gf.all_vectors(tp, len(V))  # indices into V
    sigs = {orbit_signature([V[i] for i in tup], n) for tup in tuples}
    group = orthogonal_group_V(n)
    idx_of = {tuple(v): i for i, v in enumerate(V)}
    acts = [np.array([idx_of[tuple(g @ v % 2)] for v in V]) for g in group]
    w = len(V) ** np.arange(tp - 1, -1, -1)
    parent = np.arange(len(tuples))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for act in acts:
        img = act[tuples] @ w
        for a, b in enumerate(img):
            ra, rb = find(a), find(int(b))
            if ra != rb:
                parent[ra] = rb
    orbits = len({find(a) for a in range(len(tuples))})
    return {"n": n, "t_prime": tp, "signatures": len(sigs), "orbits": orbits, "group_order": len(group),
            "leading_estimate": 2 ** (tp * tp)}


def real_clifford_suite(n, t) -> dict:
    if n > 3 or t > 6:
        raise ResourceLimitError("real-Clifford suite covers t <= 6 and n <= 3")
    r, s = real_signature(t)
    tp = t // 2 - 1
    mats, states = weyl_basis(n, t)
    arr = weyl_batch(mats, n, t).arr
    G = arr.conj() @ arr.T
    q = model_form(r, s, 2)
    P1 = projector_column(IsoSubspace(q, gf.Subspace(2, t, ones(t))))
    batch = StateBatch(n, t, 2, arr)
    from .commutant import apply_column_power

    in_code = apply_column_power(batch, P1).arr.equals(arr)
    stab = True
    for v in gf.all_vectors(2 * n, 2):
        w = CliffordWord(n, 2, (("W", tuple(int(x) for x in v)),))
        stab &= apply_tensor_power(w, r, s, batch).arr.equals(arr)
    res = {
        "size": states.batch,
        "expected_size": 2 ** (n * (t - 2)),
        "orthonormal": G.equals(CycArray.eye(2, states.batch)),
        "in_C1": in_code,
        "weyl_stabilized": bool(stab),
        "commute": sp_o_commute(t),
        "orbits": orbit_counts(n, tp),
    }
    if n == 1:
        res["weyl_transform"] = weyl_transform_check(t)
    return res


# ---------------------------------------------------------------- orthonormal bases of Z_2^t


def orthonormal_bases(t):
    """All ordered orthonormal bases of (Z_2^t, dot) as matrices with columns b_i."""
    I = SymBilForm(2, np.eye(t, dtype=np.int64))
    return list(iter_isometries(I, I))


def defect_counts(t) -> dict:
    """How many bases have exactly k vectors b with |b| = 3 mod 4."""
    counts: dict = {}
    for B in orthonormal_bases(t):
        w = B.sum(axis=0) % 4
        k = int(np.sum(w == 3))
        counts[k] = counts.get(k, 0) + 1
    return dict(sorted(counts.items()))


def anti_identity_basis(t, k):
    """b_i = e_i + (1_k, 0) for i < k, e_i otherwise (a basis in the k-th stratum)."""
    B = np.eye(t, dtype=np.int64)
    lead = np.zeros(t, dtype=np.int64)
    lead[:k] = 1
    for i in range(k):
        B[:, i] = (B[:, i] + lead) % 2
    return B


# ---------------------------------------------------------------- trivial isotypic component


def trivial_component_norm(r, s, n, iters=400, rng=None) -> dict:
    """Heuristic: lazy averaging over generators and inverses, from a random start.

    Returns the surviving norm and the largest generator residual; a nonzero
    invariant vector survives, otherwise the norm decays geometrically.
    """
    rng = rng or np.random.default_rng(0)
    d, t = 2, r + s
    words = generators(n, d)
    words = words + [w.inverse() for w in words]
    dim = d ** (n * t)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    psi = StateBatch(n, t, d, v[None, :])
    for _ in range(iters):
        acc = np.zeros_like(psi.arr)
        for w in words:
            acc += apply_tensor_power(w, r, s, psi).arr
        psi = StateBatch(n, t, d, 0.5 * psi.arr + 0.5 * acc / len(words))
    norm = float(np.linalg.norm(psi.arr))
    resid = 0.0
    if norm > 1e-12:
        u = StateBatch(n, t, d, psi.arr / norm)
        resid = max(float(np.max(np.abs(apply_tensor_power(w, r, s, u).arr - u.arr))) for w in words)
    # invariant vectors are fixed points, so a survivor must also have a tiny residual
    nonzero = norm > 1e-4 and resid < 1e-6
    return {"r": r, "s": s, "n": n, "norm": norm, "residual": resid, "nonzero": nonzero,
            "predicted": (r - s) % 8 == 0}
