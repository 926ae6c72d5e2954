"""CSS projectors P(N), permutations R(O), coset states and the semigroup S_{r,s}.

Every element R(O)P(N) of S_{r,s} is an n-th tensor power over the columns
of the t x n basis labels, so all identities are checked on one column
(a d^t x d^t matrix) and raised to n.  Those column matrices are rational,
so they are stored as integer matrices with a denominator d^m.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
from scipy import sparse

from . import gflinear as gf
from .cliffordrep import CliffordWord, StateBatch, basis_states, flat_index, tensor_power_matrix
from .config import FalsificationError, LIMITS, ResourceLimitError
from .forms import GenQuadForm, model_form
from .isotropic import IsoSubspace, enumerate_strata, ones
from .orthostoch import MatrixGroup, enumerate_O1
from .scalars import CycArray, CycScalar, cyclotomic_order, field


class ColumnOp:
    """A rational d^t x d^t operator ints / d^m acting on one column."""

    def __init__(self, d, t, ints, m=0):
        self.d, self.t = d, t
        ints = np.asarray(ints, dtype=np.int64)
        # strip common factors of d from the denominator
        while m > 0 and ints.size and not np.any(ints % d):
            ints = ints // d
            m -= 1
        self.ints = ints
        self.m = m

    @property
    def dim(self):
        return self.d**self.t

    def __matmul__(self, other):
        return ColumnOp(self.d, self.t, self.ints @ other.ints, self.m + other.m)

    def dagger(self):
        return ColumnOp(self.d, self.t, self.ints.T, self.m)

    def scaled(self, c: Fraction):
        """c * self for a rational c whose denominator is a power of d."""
        c = Fraction(c)
        den, m = c.denominator, self.m
        while den % self.d == 0:
            den //= self.d
            m += 1
        if den != 1:
            raise ValueError("scalar denominator must be a power of d")
        return ColumnOp(self.d, self.t, self.ints * c.numerator, m)

    def __add__(self, other):
        m = max(self.m, other.m)
        a = self.ints * self.d ** (m - self.m)
        b = other.ints * other.d ** (m - other.m)
        return ColumnOp(self.d, self.t, a + b, m)

    def __sub__(self, other):
        return self + other.scaled(-1)

    def equals(self, other) -> bool:
        return self.m == other.m and np.array_equal(self.ints, other.ints)

    def __eq__(self, other):
        return isinstance(other, ColumnOp) and self.equals(other)

    def __hash__(self):
        return hash((self.m, self.ints.tobytes()))

    def is_zero(self):
        return not np.any(self.ints)

    def trace(self) -> Fraction:
        return Fraction(int(np.trace(self.ints)), self.d**self.m)

    def hs_inner(self, other) -> Fraction:
        """tr(self^dagger other)."""
        return Fraction(int(np.sum(self.ints * other.ints)), self.d ** (self.m + other.m))

    def rank(self) -> int:
        return gf.rank(self.ints % 2_147_483_629, 2_147_483_629) if self.ints.size else 0

    def ratio_to(self, other):
        """c with self = c * other, or None."""
        nz = np.flatnonzero(other.ints)
        if nz.size == 0:
            return Fraction(0) if self.is_zero() else None
        i = nz[0]
        c = Fraction(int(self.ints.flat[i]), int(other.ints.flat[i])) * Fraction(self.d**other.m, self.d**self.m)
        return c if self.equals(other.scaled(c)) else None

    def to_cycarray(self) -> CycArray:
        return CycArray.from_ints(self.d, self.ints, k=2 * self.m)

    def to_complex(self):
        return self.ints / float(self.d**self.m)

    def power_trace(self, n) -> Fraction:
        return self.trace() ** n

    def to_json(self):
        return {"d": self.d, "t": self.t, "m": self.m, "ints": self.ints.tolist()}


def identity_column(d, t) -> ColumnOp:
    return ColumnOp(d, t, np.eye(d**t, dtype=np.int64))


def _N_elements(N):
    return N.elements() if N.dim else np.zeros((1, N.t), dtype=np.int64)


def projector_column(N) -> ColumnOp:
    """Single-column factor of P(N): d^-m sum over x in N^perp, y in N of |x+y><x|."""
    if isinstance(N, IsoSubspace):
        perp, sub = N.perp, N.N
    else:
        raise TypeError("projector_column expects an IsoSubspace")
    d, t = sub.d, sub.t
    D = d**t
    P = np.zeros((D, D), dtype=np.int64)
    xs = perp.elements()
    ys = _N_elements(sub)
    src = gf.vec_index(xs, d)
    for y in ys:
        P[gf.vec_index(xs + y, d), src] += 1
    return ColumnOp(d, t, P, sub.dim)


def projector_column_weyl(N: IsoSubspace) -> CycArray:
    """The same projector built as d^{-2m} sum_{a,b in N} Z_beta(a) X(b)."""
    d, t = N.d, N.t
    M = cyclotomic_order(d)
    w = M // d
    V = gf.all_vectors(t, d)
    idx = np.arange(d**t)
    beta = N.q.polar.matrix
    els = _N_elements(N.N)
    total = None
    for a in els:
        za = (w * (V @ beta @ a % d)) % M
        for b in els:
            E = -np.ones((d**t, d**t), dtype=np.int64)
            E[gf.vec_index(V + b, d), idx] = za
            term = CycArray.from_exponents(d, E)
            total = term if total is None else total + term
    return CycArray(d, total.data, total.k + 4 * N.m)


def permutation_column(O, d) -> ColumnOp:
    """Single-column factor of R(O): |x> -> |O x>."""
    O = gf.as_mod(O, d)
    t = O.shape[0]
    V = gf.all_vectors(t, d)
    P = np.zeros((d**t, d**t), dtype=np.int64)
    P[gf.vec_index(V @ O.T, d), np.arange(d**t)] = 1
    return ColumnOp(d, t, P)


class CommutantElement:
    """R(O) P(N) in S_{r,s}."""

    def __init__(self, O, N: IsoSubspace):
        self.O = gf.as_mod(O, N.d)
        self.N = N
        self.d, self.t = N.d, N.t
        if not np.array_equal(self.O @ ones(self.t) % self.d, ones(self.t)):
            raise ValueError("O does not fix 1_t")
        self._col = None

    @property
    def column(self) -> ColumnOp:
        if self._col is None:
            self._col = permutation_column(self.O, self.d) @ projector_column(self.N)
        return self._col

    def apply(self, psi: StateBatch) -> StateBatch:
        return apply_column_power(psi, self.column)

    def trace_with(self, other, n) -> Fraction:
        """tr(A^dagger B) for the n-th tensor powers."""
        return self.column.hs_inner(other.column) ** n

    def to_json(self):
        return {"O": self.O.tolist(), "N": self.N.to_json()}


def apply_column_power(psi: StateBatch, A: ColumnOp) -> StateBatch:
    """Apply A^{(x) n} to a state batch (float or exact)."""
    from .cliffordrep import apply_tensor_operator

    if psi.exact:
        return apply_tensor_operator(psi, A.to_cycarray())
    return apply_tensor_operator(psi, A.to_complex())


def R_apply(O, psi: StateBatch, q: GenQuadForm | None = None) -> StateBatch:
    if q is not None:
        from .orthostoch import is_in_O1

        if not is_in_O1(O, q):
            raise ValueError("O is not in O_1(T)")
    return apply_column_power(psi, permutation_column(O, psi.d))


def conjugate_code(O, N: IsoSubspace) -> IsoSubspace:
    return N.image(O)


# ---------------------------------------------------------------- S_{r,s}


def strata_with_zero(r, s, d):
    q = model_form(r, s, d)
    zero = IsoSubspace(q, gf.Subspace(d, r + s))
    return [zero] + [N for N in enumerate_strata(r, s, d) if N.m > 0]


def semigroup_elements(r, s, d, distinct=True):
    """All R(O)P(N); with distinct=True one representative per operator."""
    G = enumerate_O1(r, s, d)
    codes = strata_with_zero(r, s, d)
    out, seen = [], set()
    for N in codes:
        P = projector_column(N)
        for O in G.elements:
            el = CommutantElement(O, N)
            el._col = permutation_column(O, d) @ P
            if distinct:
                key = hash(el._col)
                if key in seen:
                    continue
                seen.add(key)
            out.append(el)
    return out


def exact_rank(M) -> int:
    """Rank over Q of a matrix of Fractions or integers."""
    rows = [[Fraction(x) for x in row] for row in M]
    if not rows:
        return 0
    ncol = len(rows[0])
    rank = 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
    return rank


def gram_matrix_S(r, s, d, n, elements=None):
    """Exact Gram matrix tr(A^dagger B) over distinct elements of S_{r,s}."""
    els = semigroup_elements(r, s, d) if elements is None else elements
    k = len(els)
    G = [[els[a].column.hs_inner(els[b].column) ** n for b in range(k)] for a in range(k)]
    return els, G


def independence_rank(r, s, d, n) -> int:
    _, G = gram_matrix_S(r, s, d, n)
    return exact_rank(G)


def semigroup_product(N1: IsoSubspace, N2: IsoSubspace, group: MatrixGroup | None = None):
    """Find (O, I, c) with P(N1) P(N2) = c R(O) P(I) on one column.

    I is read off from the column support of the product (its range lies in
    the coset spaces of I^perp); O is the first element of O_1, in the
    group's sorted order, that matches.  Raises FalsificationError if no
    pair exists.
    """
    q = N1.q
    d, t = q.d, q.dim
    A = projector_column(N1) @ projector_column(N2)
    group = group or enumerate_O1(*_rs_of(q), d)
    V = gf.all_vectors(t, d)
    cols = np.flatnonzero(np.any(A.ints != 0, axis=0))
    perp = gf.Subspace(d, t, V[cols])
    I_sub = perp.perp(q.polar.matrix)
    try:
        I = IsoSubspace(q, I_sub)
    except ValueError as e:
        raise FalsificationError(f"product support is not a code: {e}") from None
    PI = projector_column(I)
    for O in group.elements:
        cand = permutation_column(O, d) @ PI
        c = A.ratio_to(cand)
        if c is not None and c != 0:
            return {"O": O, "I": I, "scalar": c}
    raise FalsificationError(f"no (O, I) matches P(N1)P(N2) for N1={N1}, N2={N2}")


def _rs_of(q: GenQuadForm):
    if q.d == 2:
        diag = np.asarray(q.diag) % 4
        s = int(np.sum(diag == 3))
        return q.dim - s, s
    signs = np.diag(q.polar.matrix) % q.d
    s = int(np.sum(signs == q.d - 1))
    return q.dim - s, s


# ---------------------------------------------------------------- coset states


class CosetState:
    """|[F]_N> = d^{-n m/2} sum over F' in Hom(X -> N) of |F + F'>."""

    def __init__(self, N: IsoSubspace, Fbar, n):
        self.N = N
        self.n = n
        self.Fbar = gf.as_mod(np.asarray(Fbar).reshape(-1, n), N.d)
        if self.Fbar.shape[0] != N.section.k:
            raise ValueError("Fbar must have dim T_N rows")

    @classmethod
    def from_lift(cls, N: IsoSubspace, F, n):
        F = gf.as_mod(np.asarray(F).reshape(N.t, n), N.d)
        for j in range(n):
            if not N.perp.contains(F[:, j]):
                raise ValueError(f"column {j} is not in N^perp")
        coords = np.stack([N.section.project(F[:, j]) for j in range(n)], axis=1)
        return cls(N, coords, n)

    @property
    def d(self):
        return self.N.d

    def lift(self):
        sec = self.N.section
        return np.stack([sec.lift(self.Fbar[:, j]) for j in range(self.n)], axis=1)

    def column_supports(self):
        """For each column, the d^m indices of x + N."""
        F = self.lift()
        els = _N_elements(self.N.N)
        return [gf.vec_index((F[:, j] + els) % self.d, self.d) for j in range(self.n)]

    def support(self):
        """Flat indices in H_{n,t} (column-major layout)."""
        D = self.d**self.N.t
        idx = np.zeros(1, dtype=np.int64)
        for cs in self.column_supports():
            idx = (idx[:, None] * D + cs[None, :]).ravel()
        return idx

    def amplitude_exponent(self):
        """Amplitudes are sqrt(d)^{-k} with k = n m."""
        return self.n * self.N.m

    def to_state(self, exact=True) -> StateBatch:
        d, t, n = self.d, self.N.t, self.n
        dim = d ** (n * t)
        k = self.amplitude_exponent()
        if exact:
            arr = np.zeros((1, dim), dtype=np.int64)
            arr[0, self.support()] = 1
            return StateBatch(n, t, d, CycArray.from_ints(d, arr, k=k))
        arr = np.zeros((1, dim), dtype=np.complex128)
        arr[0, self.support()] = d ** (-k / 2)
        return StateBatch(n, t, d, arr)

    def key(self):
        return (self.N.N._key, self.Fbar.tobytes())

    def __eq__(self, other):
        return isinstance(other, CosetState) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def coset_state(N: IsoSubspace, Fbar, n) -> CosetState:
    return CosetState(N, Fbar, n)


def coset_basis(N: IsoSubspace, n):
    """All d^{n (t - 2m)} coset states of C_N."""
    k = N.section.k
    out = []
    for flat in gf.all_vectors(k * n, N.d):
        out.append(CosetState(N, flat.reshape(k, n), n))
    return out


def _sqrt_scalar(d, count: int, e: int) -> CycScalar:
    """count * sqrt(d)^{-e} as an exact scalar."""
    return CycScalar(d, {0: count}, sqrtd=e)


def overlap_count(a: CosetState, b: CosetState) -> int:
    """Number of common basis states, via affine-subspace intersections per column."""
    d = a.d
    Fa, Fb = a.lift(), b.lift()
    both = a.N.N + b.N.N
    inter = a.N.N.intersection(b.N.N).dim
    c = 1
    for j in range(a.n):
        if not both.contains((Fa[:, j] - Fb[:, j]) % d):
            return 0
        c *= d**inter
    return c


def overlap(a: CosetState, b: CosetState) -> CycScalar:
    """<a|b> computed column by column."""
    e = a.amplitude_exponent() + b.amplitude_exponent()
    return _sqrt_scalar(a.d, overlap_count(a, b), e)


def overlap_direct(a: CosetState, b: CosetState) -> CycScalar:
    """<a|b> by intersecting the explicit supports."""
    e = a.amplitude_exponent() + b.amplitude_exponent()
    c = np.intersect1d(a.support(), b.support()).size
    return _sqrt_scalar(a.d, int(c), e)


def overlap_closed_form_t5(a: CosetState, b: CosetState, i: int, j: int) -> Fraction:
    """Closed-form overlap between coset states of N_i = <1 + e_i> and N_j (d = 2, t = 5)."""
    n = a.n
    if i == j:
        return Fraction(int(a == b))
    ebar_i = (ones(5) + np.eye(5, dtype=np.int64)[i]) % 2
    ebar_j = (ones(5) + np.eye(5, dtype=np.int64)[j]) % 2
    E = (np.eye(5, dtype=np.int64) + np.outer(ebar_i, ebar_j)) % 2
    img = CosetState.from_lift(b.N, E @ a.lift() % 2, n)
    return Fraction(1, 2**n) if img == b else Fraction(0)


def t5_codes():
    """The five codes N_i = <1_5 + e_i> of (Z_2^5, q_{5,0}), index order i = 0..4."""
    q = model_form(5, 0, 2)
    out = []
    for i in range(5):
        v = (ones(5) + np.eye(5, dtype=np.int64)[i]) % 2
        out.append(IsoSubspace(q, gf.Subspace(2, 5, v)))
    return out


def coset_matrix(states, n, t, d):
    """Sparse 0/1 matrix with one row per coset state (support indicator)."""
    rows, cols = [], []
    for r, st in enumerate(states):
        sup = st.support()
        rows.append(np.full(sup.size, r))
        cols.append(sup)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.ones(rows.size, dtype=np.int64)
    return sparse.csr_matrix((vals, (rows, cols)), shape=(len(states), d ** (n * t)))


# ---------------------------------------------------------------- commutation


def gate_column_matrix(gate, r, s, d) -> CycArray:
    """Delta_{r,s} of a single-qudit gate, restricted to its column."""
    return tensor_power_matrix(CliffordWord(1, d, ((gate[0], 0),)), r, s)


def cadd_pair_permutation(t, d):
    """Index permutation of CADD^{(x) t} on two columns (control first)."""
    V = gf.all_vectors(t, d)
    D = d**t
    x = np.repeat(np.arange(D), D)
    y = np.tile(np.arange(D), D)
    ynew = gf.vec_index(V[x] + V[y], d)
    return x * D + ynew


def commutes_with_generators(A: ColumnOp, r, s, d, two_column=True) -> dict:
    """Exact commutation of A^{(x) n} (n >= 2) with Delta_{r,s}(H), (P), (CADD)."""
    t = r + s
    Ac = A.to_cycarray()
    out = {}
    for g in ("H", "P"):
        G = gate_column_matrix((g,), r, s, d)
        out[g] = (G @ Ac).equals(Ac @ G)
    if two_column:
        out["CADD"] = cadd_commutes(A)
    return out


def cadd_commutes(A: ColumnOp) -> bool:
    """Does A (x) A commute with CADD^{(x) t} on a pair of columns?

    The condition A[x,x'] A[x+y,x'+y'] = A[x,x'] A[y,y'] says that A is
    invariant under translation by every (x, x') in its support.
    """
    d, t = A.d, A.t
    V = gf.all_vectors(t, d)
    for x, xp in zip(*np.nonzero(A.ints)):
        rows = gf.vec_index(V + V[x], d)
        cols = gf.vec_index(V + V[xp], d)
        if not np.array_equal(A.ints[np.ix_(rows, cols)], A.ints):
            return False
    return True


def commutes_dense(el: CommutantElement, word: CliffordWord, r, s, exact=True) -> bool:
    """Direct check on H_{n,t}: Delta(U) A |F> = A Delta(U) |F> for all basis F."""
    from .cliffordrep import apply_tensor_power, identity_batch

    n, d, t = word.n, word.d, r + s
    if d ** (n * t) > LIMITS["dense_dim"] // 4:
        raise ResourceLimitError("dense commutation check too large")
    psi = identity_batch(n, t, d, exact)
    lhs = apply_tensor_power(word, r, s, el.apply(psi))
    rhs = el.apply(apply_tensor_power(word, r, s, psi))
    if exact:
        return lhs.arr.equals(rhs.arr)
    return lhs.close_to(rhs)


# ---------------------------------------------------------------- commutant dimension


def _prime_with_root(M, start=1_000_000):
    from .orthostoch import _is_prime, _primitive_root

    p = start - start % M + 1
    while not _is_prime(p):
        p += M
    g = _primitive_root(p)
    return p, pow(g, (p - 1) // M, p)


def _reduce_mod_p(arr: CycArray, p, root):
    """Image of the integer part of arr (sqrt(d) denominators dropped) under zeta -> root."""
    F = arr.field
    M = F.M
    powers = np.array([pow(root, j, p) for j in range(F.deg)], dtype=np.int64)
    data = arr.data.astype(object) if arr.data.dtype == object else arr.data
    out = np.zeros(arr.shape, dtype=object)
    for j in range(F.deg):
        out = out + (data[j].astype(object) % p) * int(powers[j])
    return (out % p).astype(np.int64)


def commutant_dimension(r, s, n, d, words=None, prime=None):
    """Upper bound (exact with high confidence) on dim of the commutant of Delta_{r,s}.

    Unknown X over the d^{nt} x d^{nt} matrices.  Monomial generators (phase
    and CADD) identify entries along permutation orbits with root-of-unity
    factors, killing orbits with inconsistent phases; the remaining
    generators give linear equations, which are reduced modulo a prime
    p = 1 mod M with zeta_M mapped to an M-th root of unity.  Rank can only
    drop modulo p, so the returned kernel dimension bounds the true one from
    above.
    """
    t = r + s
    dim = d ** (n * t)
    if dim * dim > 2**16:
        raise ResourceLimitError(f"commutant oracle needs {dim * dim} unknowns")
    M = cyclotomic_order(d)
    words = words or [CliffordWord(n, d, (g,)) for g in _gens(n)]
    mats = [tensor_power_matrix(w, r, s) for w in words]
    mono, dense = [], []
    for G in mats:
        pat = np.any(G.data != 0, axis=0)
        if np.all(pat.sum(axis=0) == 1) and np.all(pat.sum(axis=1) == 1) and G.k == 0:
            perm = np.argmax(pat, axis=0)  # G|b> = phase |perm[b]>
            exps = np.array([G.item(perm[b], b).root_exponent() for b in range(dim)])
            mono.append((perm, exps))
        else:
            dense.append(G)
    # orbits of index pairs under the monomial generators
    label = -np.ones((dim, dim), dtype=np.int64)
    phase = np.zeros((dim, dim), dtype=np.int64)
    dead = []
    reps = []
    for a0 in range(dim):
        for b0 in range(dim):
            if label[a0, b0] >= 0:
                continue
            oid = len(reps)
            reps.append((a0, b0))
            label[a0, b0] = oid
            phase[a0, b0] = 0
            stack = [(a0, b0)]
            bad = False
            while stack:
                a, b = stack.pop()
                for perm, ex in mono:
                    a2, b2 = perm[a], perm[b]
                    e2 = (phase[a, b] + ex[a] - ex[b]) % M
                    if label[a2, b2] < 0:
                        label[a2, b2] = oid
                        phase[a2, b2] = e2
                        stack.append((a2, b2))
                    elif phase[a2, b2] != e2:
                        bad = True
            dead.append(bad)
    live = [o for o in range(len(reps)) if not dead[o]]
    col = {o: i for i, o in enumerate(live)}
    p, root = prime if prime else _prime_with_root(M)
    rootpow = np.array([pow(root, e, p) for e in range(M)], dtype=np.int64)
    # basis matrix B_v has entries root^phase on its orbit
    nv = len(live)
    lab = label.ravel()
    ph = rootpow[phase.ravel()]
    blocks = []
    for G in dense:
        Gp = _reduce_mod_p(G, p, root)
        eq = np.zeros((dim * dim, nv), dtype=np.int64)
        for v, o in enumerate(live):
            B = np.zeros(dim * dim, dtype=np.int64)
            sel = lab == o
            B[sel] = ph[sel]
            B = B.reshape(dim, dim)
            C = (Gp @ B - B @ Gp) % p
            eq[:, v] = C.ravel()
        blocks.append(eq)
    if not blocks:
        return nv
    A = np.vstack(blocks)
    A = A[np.any(A != 0, axis=1)]
    return nv - gf.rank(A, p)


def _gens(n):
    g = [("H", j) for j in range(n)] + [("P", j) for j in range(n)]
    g += [("CADD", i, j) for i in range(n) for j in range(n) if i != j]
    return g
