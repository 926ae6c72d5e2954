"""Symmetric bilinear, quadratic and generalized quadratic forms over Z_d.

Forms act on column vectors of K = Z_d^k.  Evaluation is vectorized over the
last axis, so ``q.evaluate(all_vectors(k, d))`` gives the full value table.

* ``SymBilForm``: symmetric matrix beta mod d.
* ``QuadForm``: q(u) = u^T A u mod d for an upper-triangular A.
* ``GenQuadForm``: Z_D-valued q with q(u+v) - q(u) - q(v) = 2 beta(u, v) mod D,
  stored as the diagonal q(e_i) and the polar form beta.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import gflinear as gf
from .scalars import check_prime, legendre, order_tau


class SymBilForm:
    __slots__ = ("d", "matrix")

    def __init__(self, d, matrix):
        self.d = check_prime(d)
        A = gf.as_mod(np.atleast_2d(matrix), self.d)
        if A.shape[0] != A.shape[1] or not np.array_equal(A, A.T):
            raise ValueError("bilinear form matrix must be square and symmetric")
        A.setflags(write=False)
        self.matrix = A

    @property
    def dim(self):
        return self.matrix.shape[0]

    def evaluate(self, u, v):
        u = np.asarray(u, dtype=np.int64)
        v = np.asarray(v, dtype=np.int64)
        return np.einsum("...i,ij,...j->...", u, self.matrix, v) % self.d

    def rank(self):
        return gf.rank(self.matrix, self.d) if self.dim else 0

    def radical(self):
        return gf.Subspace(self.d, self.dim, gf.kernel(self.matrix, self.d))

    def is_nondegenerate(self):
        return self.rank() == self.dim

    def is_alternating(self):
        return not np.any(np.diag(self.matrix))

    def restrict(self, rows):
        """Form on coordinates of the span of `rows`."""
        B = np.atleast_2d(rows)
        return SymBilForm(self.d, B @ self.matrix @ B.T % self.d)

    def __eq__(self, other):
        return isinstance(other, SymBilForm) and self.d == other.d and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.d, self.matrix.tobytes()))

    def __repr__(self):
        return f"SymBilForm(d={self.d}, {self.matrix.tolist()})"

    # shared with the quadratic types for isometry search
    def _qvals(self, V):
        return self.evaluate(V, V)

    @property
    def polar(self):
        return self


class QuadForm:
    """Ordinary quadratic form with values in Z_d."""

    __slots__ = ("d", "rep")

    def __init__(self, d, rep):
        self.d = check_prime(d)
        A = gf.as_mod(np.atleast_2d(rep), self.d)
        if A.shape[0] != A.shape[1]:
            raise ValueError("representation must be square")
        A = (np.triu(A) + np.triu(A.T, 1)) % self.d  # fold any lower part into upper
        A.setflags(write=False)
        self.rep = A

    @property
    def dim(self):
        return self.rep.shape[0]

    def evaluate(self, u):
        u = np.asarray(u, dtype=np.int64)
        return np.einsum("...i,ij,...j->...", u, self.rep, u) % self.d

    @property
    def polar(self):
        return SymBilForm(self.d, self.rep + self.rep.T)

    def _qvals(self, V):
        return self.evaluate(V)

    def __eq__(self, other):
        return isinstance(other, QuadForm) and self.d == other.d and np.array_equal(self.rep, other.rep)

    def __hash__(self):
        return hash((self.d, self.rep.tobytes()))

    def __repr__(self):
        return f"QuadForm(d={self.d}, {self.rep.tolist()})"


class GenQuadForm:
    """Generalized quadratic form q : Z_d^k -> Z_D with polar form beta."""

    __slots__ = ("d", "D", "diag", "polar")

    def __init__(self, d, diag, polar):
        self.d = check_prime(d)
        self.D = order_tau(self.d)
        if not isinstance(polar, SymBilForm):
            polar = SymBilForm(self.d, polar)
        diag = np.asarray(diag, dtype=np.int64).reshape(-1) % self.D
        if diag.shape[0] != polar.dim:
            raise ValueError("diagonal length does not match the polar form")
        bd = np.diag(polar.matrix)
        if self.d == 2:
            if np.any(diag % 2 != bd % 2):
                raise ValueError("q(e_i) must reduce to beta(e_i, e_i) mod 2")
        elif np.any(diag != bd):
            raise ValueError("for odd d, q(e_i) must equal beta(e_i, e_i)")
        diag.setflags(write=False)
        self.diag = diag
        self.polar = polar

    @property
    def dim(self):
        return self.diag.shape[0]

    def evaluate(self, u):
        u = np.asarray(u, dtype=np.int64) % self.d
        lin = np.einsum("...i,i->...", u * u, self.diag)
        up = np.triu(self.polar.matrix, 1)
        cross = np.einsum("...i,ij,...j->...", u, up, u)
        return (lin + 2 * cross) % self.D

    def _qvals(self, V):
        return self.evaluate(V)

    def upper_triangular(self):
        """Z_D matrix A with q(u) = u^T A u mod D for lifted u."""
        A = 2 * np.triu(self.polar.matrix, 1)
        A = A + np.diag(self.diag)
        return A % self.D

    @classmethod
    def from_upper_triangular(cls, d, A):
        d = check_prime(d)
        D = order_tau(d)
        A = np.asarray(A, dtype=np.int64) % D
        k = A.shape[0]
        if np.any(np.tril(A, -1)):
            raise ValueError("matrix must be upper triangular")
        off = np.triu(A, 1)
        if d == 2:
            if np.any(off % 2):
                raise ValueError("off-diagonal entries must be even for d = 2")
            half = off // 2
        else:
            half = off * pow(2, -1, d) % d
        beta = (half + half.T) % d
        beta[np.arange(k), np.arange(k)] = np.diag(A) % d
        return cls(d, np.diag(A), beta)

    def to_json(self):
        return {"d": self.d, "D": self.D, "diag": self.diag.tolist(), "polar": self.polar.matrix.tolist()}

    @classmethod
    def from_json(cls, obj):
        q = cls(obj["d"], obj["diag"], obj["polar"])
        if "D" in obj and int(obj["D"]) != q.D:
            raise ValueError("D does not match d")
        return q

    def restrict(self, rows):
        """Form on coordinates of the span of `rows` (pullback)."""
        B = np.atleast_2d(np.asarray(rows, dtype=np.int64))
        return GenQuadForm(self.d, self.evaluate(B), self.polar.restrict(B))

    def __eq__(self, other):
        return (isinstance(other, GenQuadForm) and self.d == other.d and np.array_equal(self.diag, other.diag)
                and self.polar == other.polar)

    def __hash__(self):
        return hash((self.d, self.diag.tobytes(), self.polar.matrix.tobytes()))

    def __repr__(self):
        return f"GenQuadForm(d={self.d}, diag={self.diag.tolist()}, polar={self.polar.matrix.tolist()})"


# ---------------------------------------------------------------- models


def model_form(r: int, s: int, d: int) -> GenQuadForm:
    """q_{r,s}(u) = sum_i s_i u_i^2 mod D with s_i = +1 (i < r) and -1 after."""
    d = check_prime(d)
    D = order_tau(d)
    if r < 0 or s < 0:
        raise ValueError("r and s must be non-negative")
    signs = np.array([1] * r + [-1] * s, dtype=np.int64)
    return GenQuadForm(d, signs % D, np.diag(signs % d))


def model_signs(r, s):
    return np.array([1] * r + [-1] * s, dtype=np.int64)


def hyperbolic_quadratic(kind: int) -> QuadForm:
    """The two refinements q_H^0, q_H^1 of the d = 2 hyperbolic plane."""
    if kind == 0:
        return QuadForm(2, [[0, 1], [0, 0]])
    if kind == 1:
        return QuadForm(2, [[1, 1], [0, 1]])
    raise ValueError("kind must be 0 or 1")


def generalized_refine(beta) -> GenQuadForm:
    """Canonical Z_4 refinement of a d = 2 symmetric form.

    q(u) = sum_{i in supp u} {{beta_ii}} + 2 sum_{i<j in supp u} {{beta_ij}} mod 4.
    """
    if not isinstance(beta, SymBilForm):
        beta = SymBilForm(2, beta)
    if beta.d != 2:
        raise ValueError("generalized refinement is defined for d = 2")
    return GenQuadForm(2, np.diag(beta.matrix), beta)


def polarize(q):
    """Polar form computed from the values of q alone (brute force on pairs of basis vectors)."""
    k = q.dim
    d = q.d
    E = np.eye(k, dtype=np.int64)
    if isinstance(q, QuadForm):
        M = np.zeros((k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                M[i, j] = (q.evaluate(E[i] + E[j]) - q.evaluate(E[i]) - q.evaluate(E[j])) % d
        return SymBilForm(d, M)
    D = q.D
    M = np.zeros((k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            delta = int((q.evaluate(E[i] + E[j]) - q.evaluate(E[i]) - q.evaluate(E[j])) % D)
            if d == 2:
                if delta % 2:
                    raise ValueError("q is not a generalized quadratic form")
                M[i, j] = delta // 2
            else:
                M[i, j] = delta * pow(2, -1, d) % d
    return SymBilForm(d, M)


def wu_class(beta):
    """w with beta(u, u) = beta(w, u) for all u (d = 2)."""
    if not isinstance(beta, SymBilForm):
        beta = SymBilForm(2, beta)
    if beta.d != 2:
        raise ValueError("the Wu class is defined for d = 2")
    w = gf.solve(beta.matrix, np.diag(beta.matrix), 2)
    if w is None:
        raise ValueError("no Wu class")
    return w


# ---------------------------------------------------------------- invariants


def gauss_sum_z4(q: GenQuadForm):
    """sum_u i^{q(u)} as a Gaussian integer (a, b)."""
    vals = q.evaluate(gf.all_vectors(q.dim, 2))
    c = np.bincount(vals, minlength=4)
    return int(c[0] - c[2]), int(c[1] - c[3])


def gauss_phase(a: int, b: int):
    """k in Z_8 with a + bi a positive multiple of exp(2 pi i k / 8), or None."""
    if a == 0 and b == 0:
        return None
    table = {(1, 0): 0, (1, 1): 1, (0, 1): 2, (-1, 1): 3, (-1, 0): 4, (-1, -1): 5, (0, -1): 6, (1, -1): 7}
    sa = (a > 0) - (a < 0)
    sb = (b > 0) - (b < 0)
    if a != 0 and b != 0 and abs(a) != abs(b):
        raise ValueError("Gauss sum phase is not a multiple of pi/4")
    return table[(sa, sb)]


def garf(q: GenQuadForm):
    """Generalized Arf invariant in Z_8 (None when the Gauss sum vanishes)."""
    if q.d != 2:
        raise ValueError("garf is defined for d = 2")
    return gauss_phase(*gauss_sum_z4(q))


def arf(q: QuadForm):
    """Arf invariant via the sign of sum (-1)^q(u) (None when the sum vanishes)."""
    if q.d != 2:
        raise ValueError("Arf is defined for d = 2")
    vals = q.evaluate(gf.all_vectors(q.dim, 2))
    total = int(len(vals) - 2 * vals.sum())
    if total == 0:
        return None
    return 0 if total > 0 else 1


def discriminant(beta: SymBilForm) -> int:
    """Legendre symbol of the Gram determinant of the non-degenerate part (odd d)."""
    d = beta.d
    if d == 2:
        raise ValueError("discriminant invariant is for odd d")
    k = beta.dim
    rad = beta.radical()
    C = gf.complement_basis(gf.Subspace.full(d, k), rad)
    if C.shape[0] == 0:
        return 1
    G = C @ beta.matrix @ C.T % d
    return legendre(gf.det(G, d), d)


@dataclass(frozen=True)
class FormInvariants:
    kind: str
    d: int
    dim: int
    rank: int
    dis: int | None = None
    type: str | None = None
    arf: int | None = None
    garf: int | None = None
    defective: bool = False
    extra: dict = dc_field(default_factory=dict, compare=False)

    def key(self):
        return (self.kind, self.d, self.dim, self.rank, self.dis, self.type, self.arf, self.garf, self.defective)

    def to_json(self):
        out = {"kind": self.kind, "d": self.d, "dim": self.dim, "rank": self.rank}
        for name in ("dis", "type", "arf", "garf"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        out["defective"] = self.defective
        return out


def _kind(f):
    if isinstance(f, GenQuadForm):
        return "generalized"
    if isinstance(f, QuadForm):
        return "quadratic"
    if isinstance(f, SymBilForm):
        return "bilinear"
    raise TypeError(type(f))


def _rad_values_zero(f):
    """Whether q vanishes on the radical of its polar form."""
    rad = f.polar.radical()
    if rad.dim == 0:
        return True
    return not np.any(f.evaluate(rad.basis))


def invariants(f) -> FormInvariants:
    kind = _kind(f)
    d = f.d
    beta = f.polar
    rk = beta.rank()
    if d != 2:
        return FormInvariants(kind, d, f.dim, rk, dis=discriminant(beta))
    btype = "even" if beta.is_alternating() else "odd"
    if kind == "bilinear":
        return FormInvariants(kind, d, f.dim, rk, type=btype)
    defective = not _rad_values_zero(f)
    if kind == "quadratic":
        return FormInvariants(kind, d, f.dim, rk, type=btype, arf=None if defective else arf(f), defective=defective)
    g = None if defective else garf(f)
    return FormInvariants(kind, d, f.dim, rk, type=btype, garf=g, defective=defective)


def model_classes(q: GenQuadForm):
    """All (r, s) with r + s = dim q and q equivalent to q_{r,s}."""
    out = []
    key = invariants(q).key()
    for r in range(q.dim + 1):
        if invariants(model_form(r, q.dim - r, q.d)).key() == key:
            out.append((r, q.dim - r))
    return out


def models_equivalent(r, s, r2, s2, d) -> bool:
    """Closed-form criterion for q_{r,s} ~ q_{r',s'} when r + s = r' + s'."""
    if r + s != r2 + s2:
        return False
    if d == 2:
        return (r - s - r2 + s2) % 8 == 0
    if d % 4 == 1:
        return True
    return (s - s2) % 2 == 0


# ---------------------------------------------------------------- isometries


def iter_isometries(f1, f2, source_basis=None, prescribed=(), constraint=None, limit=None):
    """Yield matrices g (columns in K2) with f2(g u) = f1(u) and g injective.

    ``source_basis`` rows s_1..s_k span K1 (default: standard basis); the first
    len(prescribed) of them are sent to the given vectors, the rest are found by
    backtracking over all of K2.  ``constraint(g)`` can veto complete matrices.
    """
    d = f1.d
    if f2.d != d or _kind(f1) != _kind(f2):
        raise ValueError("forms must have the same kind and d")
    k1, k2 = f1.dim, f2.dim
    S = np.eye(k1, dtype=np.int64) if source_basis is None else gf.as_mod(source_basis, d)
    if S.shape != (k1, k1) or gf.rank(S, d) != k1:
        raise ValueError("source basis must be a basis")
    Sinv = gf.inverse(S.T, d)
    V = gf.all_vectors(k2, d)
    q2 = f2._qvals(V)
    q1s = f1._qvals(S)
    B1 = S @ f1.polar.matrix @ S.T % d
    M2 = f2.polar.matrix
    pre = [gf.as_mod(p, d) for p in prescribed]
    for i, p in enumerate(pre):
        if int(f2._qvals(p[None])[0]) != int(q1s[i]):
            return
        for j in range(i):
            if int(p @ M2 @ pre[j] % d) != int(B1[i, j]):
                return
    if gf.rank(np.array(pre).reshape(len(pre), k2), d) != len(pre):
        return
    count = 0
    idx = gf.vec_index
    # a non-degenerate target Gram matrix forces linear independence
    auto_independent = gf.rank(B1, d) == k1

    def span_mask(chosen):
        m = np.zeros(len(V), dtype=bool)
        if chosen:
            sub = gf.Subspace(d, k2, np.array(chosen)).elements()
            m[idx(sub, d)] = True
        else:
            m[0] = True
        return m

    def rec(i, chosen):
        nonlocal count
        if limit is not None and count >= limit:
            return
        if i == k1:
            g = np.array(chosen).T @ Sinv % d
            if constraint is None or constraint(g):
                count += 1
                yield g
            return
        mask = q2 == q1s[i]
        for j, b in enumerate(chosen):
            mask &= (V @ (M2 @ b) % d) == B1[i, j]
        if auto_independent:
            mask[0] = False
        else:
            mask &= ~span_mask(chosen)
        for c in np.nonzero(mask)[0]:
            yield from rec(i + 1, chosen + [V[c]])
            if limit is not None and count >= limit:
                return

    yield from rec(len(pre), list(pre))


def find_isometry(f1, f2, **kw):
    for g in iter_isometries(f1, f2, limit=1, **kw):
        return g
    return None


def equivalent(f1, f2, witness: bool = True, max_witness_dim: int = 8):
    """Decide equivalence by invariants; optionally return a witness g.

    The witness satisfies f2(g u) = f1(u); it is searched only when the forms
    are equivalent and dim <= max_witness_dim.
    """
    if f1.d != f2.d or _kind(f1) != _kind(f2) or f1.dim != f2.dim:
        return False, None
    same = invariants(f1).key() == invariants(f2).key()
    if not same or not witness or f1.dim > max_witness_dim:
        return same, None
    g = find_isometry(f1, f2)
    if g is None:
        raise RuntimeError("invariants agree but no isometry was found")
    return True, g


def is_isometry(g, f1, f2) -> bool:
    """Check f2(g u) = f1(u) on all of K1 (brute force)."""
    V = gf.all_vectors(f1.dim, f1.d)
    img = (np.asarray(g) @ V.T % f1.d).T
    if isinstance(f1, SymBilForm):
        return bool(np.array_equal(f2.evaluate(img[:, None], img[None, :]), f1.evaluate(V[:, None], V[None, :])))
    return bool(np.array_equal(f2.evaluate(img), f1.evaluate(V)))


def restrict_to_quotient(q: GenQuadForm, section: gf.QuotientSection) -> GenQuadForm:
    """Induced form q_N on N^perp / N in the coordinates of `section`."""
    N = section.N
    if N.dim and np.any(q.evaluate(N.elements())):
        raise ValueError("q does not vanish on N")
    return q.restrict(section.T)


def count_zeros(q) -> int:
    return int(np.sum(q.evaluate(gf.all_vectors(q.dim, q.d)) == 0))

