"""Stochastic isotropic subspaces N of (T, q_{r,s}) and Witt transport.

N is isotropic when q vanishes on N, and stochastic when 1_t lies in N^perp.
The strata are Gr_m (dim N = m, 1_t not in N) and Gr0_m (1_t in N).
"""

from __future__ import annotations

import numpy as np

from . import gflinear as gf
from .config import LIMITS, ResourceLimitError, cache_load, cache_store
from .forms import GenQuadForm, iter_isometries, model_form, restrict_to_quotient


def ones(t):
    return np.ones(t, dtype=np.int64)


def is_isotropic(q: GenQuadForm, N: gf.Subspace) -> bool:
    if N.dim == 0:
        return True
    B = N.basis
    return not np.any(q.evaluate(B)) and not np.any(q.polar.evaluate(B[:, None], B[None, :]))


def is_stochastic(q: GenQuadForm, N: gf.Subspace) -> bool:
    if N.dim == 0:
        return True
    return not np.any(q.polar.evaluate(N.basis, ones(q.dim)))


class IsoSubspace:
    """A stochastic isotropic subspace together with its quotient data."""

    def __init__(self, q: GenQuadForm, N: gf.Subspace, complement=None):
        if N.d != q.d or N.t != q.dim:
            raise ValueError("subspace does not live in the form's space")
        if not is_isotropic(q, N):
            raise ValueError("subspace is not isotropic")
        if not is_stochastic(q, N):
            raise ValueError("subspace is not stochastic")
        self.q = q
        self.N = N
        self.d = q.d
        self.t = q.dim
        self.perp = N.perp(q.polar.matrix)
        self.contains_ones = N.contains(ones(self.t))
        self._complement = complement
        self._section = None

    @property
    def m(self):
        return self.N.dim

    @property
    def stratum(self):
        return "Gr0" if self.contains_ones else "Gr"

    @property
    def section(self) -> gf.QuotientSection:
        if self._section is None:
            self._section = gf.QuotientSection(self.N, self.perp, self._complement)
        return self._section

    @property
    def qN(self) -> GenQuadForm:
        return restrict_to_quotient(self.q, self.section)

    def ones_class(self):
        """Coordinates of [1_t] in T_N."""
        return self.section.project(ones(self.t))

    def image(self, O):
        return IsoSubspace(self.q, self.N.image(O))

    def __eq__(self, other):
        return isinstance(other, IsoSubspace) and self.N == other.N and self.q == other.q

    def __hash__(self):
        return hash(self.N)

    def __repr__(self):
        return f"IsoSubspace({self.stratum}_{self.m}, rows={[gf.digits(r) for r in self.N.basis]})"

    def to_json(self):
        return self.N.to_json()


def _check_size(t, d):
    if d == 2 and t > LIMITS["iso_t_d2"]:
        raise ResourceLimitError(f"isotropic enumeration limited to t <= {LIMITS['iso_t_d2']} for d = 2")
    if d**t > LIMITS["iso_vectors"]:
        raise ResourceLimitError(f"isotropic enumeration limited to d^t <= {LIMITS['iso_vectors']}")


def _candidate_vectors(q: GenQuadForm):
    """All nonzero isotropic vectors orthogonal to 1_t."""
    V = gf.all_vectors(q.dim, q.d)
    mask = (q.evaluate(V) == 0) & (q.polar.evaluate(V, ones(q.dim)) == 0)
    mask[0] = False
    return V[mask]


def enumerate_subspaces(q: GenQuadForm, max_dim=None):
    """All stochastic isotropic subspaces of (T, q), grouped by dimension."""
    _check_size(q.dim, q.d)
    d, t = q.d, q.dim
    C = _candidate_vectors(q)
    beta = q.polar.matrix
    levels = [[gf.Subspace(d, t)]]
    while max_dim is None or len(levels) <= max_dim:
        nxt = {}
        for N in levels[-1]:
            if N.dim:
                ok = ~np.any(C @ beta @ N.basis.T % d, axis=1)
                ok &= ~np.any(C[:, N.pivots], axis=1)  # one representative per coset of N
                cand = C[ok]
            else:
                cand = C
            for v in cand:
                M = N.span_with(v)
                if M.dim == N.dim + 1:
                    nxt.setdefault(M, None)
        if not nxt:
            break
        levels.append(sorted(nxt, key=gf.Subspace.sort_key))
    return levels


def enumerate_strata(r: int, s: int, d: int, m: int | None = None, stratum: str = "both"):
    """Stochastic isotropic subspaces of q_{r,s}.

    stratum is "Gr" (1_t not in N), "Gr0" (1_t in N) or "both".  With m given,
    only that dimension is returned.
    """
    key = {"r": r, "s": s, "d": d}
    cached = cache_load("strata", key)
    q = model_form(r, s, d)
    if cached is not None:
        levels = [[gf.Subspace.from_json(x) for x in lev] for lev in cached]
    else:
        levels = enumerate_subspaces(q)
        cache_store("strata", key, [[N.to_json() for N in lev] for lev in levels])
    out = []
    one = ones(r + s)
    for lev in levels:
        if m is not None and lev and lev[0].dim != m:
            continue
        for N in lev:
            has = N.contains(one)
            if stratum == "both" or (stratum == "Gr0") == has:
                out.append(IsoSubspace(q, N))
    return out


def max_isotropic_dim(r, s, d) -> int:
    """Largest m with Gr_m non-empty."""
    Gr = enumerate_strata(r, s, d, stratum="Gr")
    return max(N.m for N in Gr)


def find_isotropic(q: GenQuadForm, m: int, avoid_ones: bool = True, rng=None):
    """Greedy chain search for one stochastic isotropic subspace of dimension m.

    Works for spaces too large to enumerate (e.g. d = 3, t = 11); by Witt's
    theorem greedy extension reaches every maximal dimension.
    """
    d, t = q.d, q.dim
    if d**t > 5_000_000:
        raise ResourceLimitError("space too large for isotropic search")
    C = _candidate_vectors(q)
    beta = q.polar.matrix
    one = ones(t)
    N = gf.Subspace(d, t)
    while N.dim < m:
        if N.dim:
            ok = ~np.any(C @ beta @ N.basis.T % d, axis=1)
            ok &= ~np.any(C[:, N.pivots], axis=1)
            cand = C[ok]
        else:
            cand = C
        found = None
        order = range(len(cand)) if rng is None else rng.permutation(len(cand))
        for i in order:
            M = N.span_with(cand[i])
            if M.dim == N.dim + 1 and (not avoid_ones or not M.contains(one)):
                found = M
                break
        if found is None:
            return None
        N = found
    return IsoSubspace(q, N)


def _adapted_basis(N: gf.Subspace, one):
    """Basis of N, ordered with 1_t first when it lies in N."""
    d, t = N.d, N.t
    if N.contains(one):
        rest = gf.complement_basis(N, gf.Subspace(d, t, one))
        return np.vstack([one[None, :], rest]).reshape(N.dim, t), True
    return N.basis.copy(), False


def witt_transporter(N1: IsoSubspace, N2: IsoSubspace):
    """O in O_1(T) with O N1 = N2 (Witt extension by backtracking), or None."""
    if N1.q != N2.q or N1.m != N2.m or N1.contains_ones != N2.contains_ones:
        return None
    q = N1.q
    d, t = q.d, q.dim
    one = ones(t)
    b1, has = _adapted_basis(N1.N, one)
    b2, _ = _adapted_basis(N2.N, one)
    src = [b1]
    pre = list(b2)
    if not has:
        src.append(one[None, :])
        pre.append(one)
    S = np.vstack(src)
    span = gf.Subspace(d, t, S)
    rest = gf.complement_basis(gf.Subspace.full(d, t), span)
    S = np.vstack([S, rest]) if rest.size else S

    def fixes_one(g):
        return np.array_equal(g @ one % d, one)

    for g in iter_isometries(q, q, source_basis=S, prescribed=pre, constraint=fixes_one, limit=1):
        return g
    return None
