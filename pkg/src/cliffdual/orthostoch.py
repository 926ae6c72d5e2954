"""Orthogonal stochastic groups O_1(T), stabilizers, quotient actions and
character tables.

Groups are explicit lists of t x t matrices over Z_d acting on column vectors.
Character tables come from the Burnside-Dixon method over a prime field, lifted
to exact cyclotomic values; symmetric groups use Murnaghan-Nakayama instead.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from . import gflinear as gf
from .config import LIMITS, ResourceLimitError, cache_load, cache_store
from .forms import GenQuadForm, iter_isometries, model_form
from .isotropic import IsoSubspace, ones
from .scalars import CycScalar


class MatrixGroup:
    """Finite group of invertible matrices over Z_d, stored as one array."""

    def __init__(self, d: int, elements, name: str = ""):
        E = gf.as_mod(np.asarray(elements), d)
        if E.ndim != 3:
            raise ValueError("elements must have shape (order, n, n)")
        self.d = d
        self.n = E.shape[1]
        self.name = name
        codes = self._encode(E)
        order = np.argsort(codes, kind="stable")
        self.elements = E[order]
        self.codes = codes[order]
        if len(np.unique(self.codes)) != len(self.codes):
            raise ValueError("duplicate group elements")
        self.elements.setflags(write=False)
        self._gens = None
        self._classes = None

    def _encode(self, E):
        n = E.shape[-1]
        if self.d ** (n * n) < 2**62:
            w = self.d ** np.arange(n * n - 1, -1, -1, dtype=np.int64)
            return E.reshape(E.shape[:-2] + (n * n,)) @ w
        return np.array([hash(x.tobytes()) for x in E.reshape(-1, n, n)]).reshape(E.shape[:-2])

    @property
    def order(self):
        return len(self.elements)

    def __len__(self):
        return self.order

    def __iter__(self):
        return iter(self.elements)

    def index(self, g) -> int:
        i = self.index_many(np.asarray(g)[None])[0]
        if i < 0:
            raise KeyError("matrix is not in the group")
        return int(i)

    def index_many(self, G):
        """Indices of the matrices G (shape (k, n, n)); -1 when absent."""
        c = self._encode(gf.as_mod(G, self.d))
        pos = np.searchsorted(self.codes, c)
        pos = np.minimum(pos, len(self.codes) - 1)
        return np.where(self.codes[pos] == c, pos, -1)

    def contains(self, g) -> bool:
        return self.index_many(np.asarray(g)[None])[0] >= 0

    def identity_index(self):
        return self.index(np.eye(self.n, dtype=np.int64))

    def mul(self, i, j):
        return self.index(self.elements[i] @ self.elements[j] % self.d)

    def inverse_indices(self):
        inv = np.array([gf.inverse(g, self.d) for g in self.elements])
        return self.index_many(inv)

    def is_closed(self) -> bool:
        gens = self.generators()
        for s in gens:
            prod = np.einsum("ij,gjk->gik", self.elements[s], self.elements) % self.d
            if np.any(self.index_many(prod) < 0):
                return False
        return True

    def generators(self):
        """A small generating set (greedy), as indices."""
        if self._gens is not None:
            return self._gens
        gens = []
        have = np.zeros(self.order, dtype=bool)
        have[self.identity_index()] = True
        rng = np.random.default_rng(0)
        for i in rng.permutation(self.order):
            if have[i]:
                continue
            gens.append(int(i))
            have = self._closure_mask(gens)
            if have.all():
                break
        self._gens = gens
        return gens

    def _closure_mask(self, gens):
        have = np.zeros(self.order, dtype=bool)
        e = self.identity_index()
        have[e] = True
        frontier = [e]
        G = self.elements[gens]
        while frontier:
            X = self.elements[frontier]
            prod = np.einsum("sij,fjk->sfik", G, X) % self.d
            idx = self.index_many(prod.reshape(-1, self.n, self.n))
            new = np.unique(idx[~have[idx]])
            have[new] = True
            frontier = list(new)
        return have

    def conjugacy_classes(self):
        """Classes as lists of element indices, identity class first."""
        if self._classes is not None:
            return self._classes
        gens = self.generators()
        inv = self.inverse_indices()
        label = -np.ones(self.order, dtype=np.int64)
        classes = []
        e = self.identity_index()
        order = [e] + [i for i in range(self.order) if i != e]
        for i in order:
            if label[i] >= 0:
                continue
            cls = [i]
            label[i] = len(classes)
            frontier = [i]
            while frontier:
                X = self.elements[frontier]
                out = []
                for s in gens:
                    Y = self.elements[s] @ X @ self.elements[inv[s]] % self.d
                    idx = self.index_many(Y)
                    for j in idx:
                        if label[j] < 0:
                            label[j] = len(classes)
                            cls.append(int(j))
                            out.append(int(j))
                frontier = out
            classes.append(sorted(cls))
        self._classes = classes
        self._class_label = label
        return classes

    def class_label(self):
        self.conjugacy_classes()
        return self._class_label

    def element_order(self, i) -> int:
        g = self.elements[i]
        x = g.copy()
        k = 1
        I = np.eye(self.n, dtype=np.int64)
        while not np.array_equal(x, I):
            x = x @ g % self.d
            k += 1
        return k

    def subgroup(self, mask_or_indices, name=""):
        idx = np.asarray(mask_or_indices)
        if idx.dtype == bool:
            idx = np.nonzero(idx)[0]
        return MatrixGroup(self.d, self.elements[idx], name=name)

    def to_json(self):
        return {"d": self.d, "n": self.n, "order": self.order,
                "elements": [g.tolist() for g in self.elements]}


# ---------------------------------------------------------------- O_1(T)


def enumerate_orthogonal(q: GenQuadForm, fix=None, name="") -> MatrixGroup:
    """All g in GL(T) preserving q (and fixing the vector `fix` if given)."""
    d = q.d
    fixv = None if fix is None else gf.as_mod(fix, d)

    def ok(g):
        return fixv is None or np.array_equal(g @ fixv % d, fixv)

    els = []
    for g in iter_isometries(q, q, constraint=ok):
        els.append(g)
        if len(els) > LIMITS["group_order"]:
            raise ResourceLimitError("group order exceeds the enumeration guard")
    return MatrixGroup(d, np.array(els).reshape(len(els), q.dim, q.dim), name=name)


@lru_cache(maxsize=32)
def _O1_cached(r, s, d):
    key = {"r": r, "s": s, "d": d}
    hit = cache_load("O1", key)
    if hit is not None:
        return MatrixGroup(d, np.array(hit["elements"]).reshape(hit["order"], r + s, r + s), name=f"O1({r},{s};{d})")
    G = enumerate_orthogonal(model_form(r, s, d), fix=ones(r + s), name=f"O1({r},{s};{d})")
    cache_store("O1", key, G.to_json())
    return G


def enumerate_O1(r: int, s: int, d: int) -> MatrixGroup:
    """O_1(T) = {O : q_{r,s}(O u) = q_{r,s}(u), O 1_t = 1_t}."""
    if d == 2 and r + s > 7:
        raise ResourceLimitError("O_1 enumeration is limited to t <= 7 for d = 2")
    if d != 2 and d ** (r + s) > 20000:
        raise ResourceLimitError("O_1 enumeration is limited to d^t <= 20000 for odd d")
    return _O1_cached(r, s, d)


def stabilizer(G: MatrixGroup, N: gf.Subspace) -> np.ndarray:
    """Indices of g in G with g N = N."""
    if N.dim == 0:
        return np.arange(G.order)
    img = np.einsum("gij,kj->gki", G.elements, N.basis) % G.d  # rows g n_k
    keep = []
    for i in range(G.order):
        if N.contains_all(gf.Subspace(G.d, N.t, img[i])):
            keep.append(i)
    return np.array(keep, dtype=np.int64)


def quotient_action(G: MatrixGroup, N: IsoSubspace):
    """Induced action of the stabilizer of N on T_N.

    Returns (stab_indices, images) where images[i] is the matrix of the
    stabilizer element on the coordinates of T_N.
    """
    sec = N.section
    stab = stabilizer(G, N.N)
    k = sec.k
    mats = np.zeros((len(stab), k, k), dtype=np.int64)
    for a, i in enumerate(stab):
        g = G.elements[i]
        cols = (g @ sec.T.T % G.d).T  # images of the complement basis
        mats[a] = sec.project(cols).T
    return stab, mats


def quotient_group(N: IsoSubspace) -> MatrixGroup:
    """O_1(T_N) for the induced form q_N and the class of 1_t."""
    return enumerate_orthogonal(N.qN, fix=N.ones_class(), name="O1(T_N)")


def block_subgroup(N: IsoSubspace):
    """G_N: elements acting as O_1(T_N) on a complement T_N and trivially on T_N^perp.

    The complement is the one of ``N.section``; T_N^perp contains N, so the
    block extension preserves q and fixes 1_t.  Returns (MatrixGroup, images
    on T_N).
    """
    q = N.q
    d, t = q.d, q.dim
    sec = N.section
    T = sec.T
    H = quotient_group(N)
    Tperp = gf.Subspace(d, t, T).perp(q.polar.matrix)
    # basis of T = [complement rows ; basis of T_N^perp]
    Bas = np.vstack([T, Tperp.basis]) if Tperp.dim else T
    Binv = gf.inverse(Bas.T, d)
    els = []
    for h in H.elements:
        blk = np.eye(t, dtype=np.int64)
        blk[: sec.k, : sec.k] = h
        g = Bas.T @ blk @ Binv % d
        els.append(g)
    G = MatrixGroup(d, np.array(els).reshape(len(els), t, t), name="G_N")
    return G, H


def action_on_subspaces(G: MatrixGroup, subspaces):
    """Permutation action of G on a G-invariant list of subspaces."""
    pos = {S: i for i, S in enumerate(subspaces)}
    perms = np.zeros((G.order, len(subspaces)), dtype=np.int64)
    for a, g in enumerate(G.elements):
        for i, S in enumerate(subspaces):
            perms[a, i] = pos[S.image(g)]
    return perms


def is_in_O1(O, q: GenQuadForm) -> bool:
    d = q.d
    V = gf.all_vectors(q.dim, d)
    img = V @ np.asarray(O).T % d
    return bool(np.array_equal(q.evaluate(img), q.evaluate(V))) and np.array_equal(
        np.asarray(O) @ ones(q.dim) % d, ones(q.dim)
    )


# ---------------------------------------------------------------- characters


def partitions(n, maxpart=None):
    if maxpart is None:
        maxpart = n
    if n == 0:
        yield ()
        return
    for k in range(min(n, maxpart), 0, -1):
        for rest in partitions(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def murnaghan_nakayama(shape: tuple, cycle_type: tuple) -> int:
    """chi_shape on the class of cycle type `cycle_type` (border-strip rule)."""
    if not cycle_type:
        return 1 if sum(shape) == 0 else 0
    k = cycle_type[0]
    rest = cycle_type[1:]
    # beta-set representation: removing a k-strip = moving a bead down by k
    L = len(shape)
    beta = [shape[i] + (L - 1 - i) for i in range(L)]
    bset = set(beta)
    total = 0
    for b in beta:
        nb = b - k
        if nb < 0 or nb in bset:
            continue
        sign = (-1) ** sum(1 for x in beta if nb < x < b)
        new = sorted((bset - {b}) | {nb}, reverse=True)
        Ln = len(new)
        sh = tuple(x - (Ln - 1 - i) for i, x in enumerate(new))
        sh = tuple(x for x in sh if x > 0)
        total += sign * murnaghan_nakayama(sh, rest)
    return total


def cycle_type(perm) -> tuple:
    perm = list(perm)
    seen = [False] * len(perm)
    out = []
    for i in range(len(perm)):
        if not seen[i]:
            n = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                n += 1
            out.append(n)
    return tuple(sorted(out, reverse=True))


class CharacterTable:
    """Rows are irreducible characters; columns are conjugacy classes."""

    def __init__(self, order, classes, sizes, values, labels=None, method=""):
        self.order = order
        self.classes = classes
        self.sizes = sizes
        self.values = values  # list of rows of CycScalar
        self.labels = labels or [str(i) for i in range(len(values))]
        self.method = method

    @property
    def degrees(self):
        return [int(row[0].as_fraction()) for row in self.values]

    def as_complex(self):
        return np.array([[v.to_complex() for v in row] for row in self.values])

    def is_rational(self):
        return all(v.is_rational() for row in self.values for v in row)

    def check_orthogonality(self) -> bool:
        r = len(self.values)
        for i in range(r):
            for j in range(r):
                s = sum((self.values[i][k] * self.values[j][k].conj() * self.sizes[k] for k in range(r)),
                        CycScalar(self.values[0][0].F, {0: 0}))
                if s != CycScalar(s.F, {0: self.order if i == j else 0}):
                    return False
        return True

    def to_json(self):
        rows = []
        for lab, row in zip(self.labels, self.values):
            vals = [str(v.as_fraction()) if v.is_rational() else v.to_json() for v in row]
            rows.append({"label": lab, "values": vals})
        return {"order": self.order, "class_sizes": self.sizes, "method": self.method, "characters": rows}


def _class_data(G: MatrixGroup):
    classes = G.conjugacy_classes()
    label = G.class_label()
    reps = [c[0] for c in classes]
    sizes = [len(c) for c in classes]
    return classes, label, reps, sizes


def symmetric_table(G: MatrixGroup, perms) -> CharacterTable:
    """Character table through a faithful action of G as S_k (|G| = k!)."""
    perms = np.asarray(perms)
    k = perms.shape[1]
    if G.order != math.factorial(k) or len({p.tobytes() for p in perms}) != G.order:
        raise ValueError("action does not realize the full symmetric group")
    classes, label, reps, sizes = _class_data(G)
    types = [cycle_type(perms[i]) for i in reps]
    values, labels = [], []
    for lam in partitions(k):
        values.append([CycScalar.over(1, {0: murnaghan_nakayama(lam, ct)}) for ct in types])
        labels.append("[" + ",".join(map(str, lam)) + "]")
    return CharacterTable(G.order, classes, sizes, values, labels, method="murnaghan-nakayama")


def _primitive_root(p):
    fac = _factor(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // f, p) != 1 for f in fac):
            return g
    raise ValueError("no primitive root")


def _factor(n):
    out, f = set(), 2
    while f * f <= n:
        while n % f == 0:
            out.add(f)
            n //= f
        f += 1
    if n > 1:
        out.add(n)
    return out


def _is_prime(n):
    return n > 1 and all(n % f for f in range(2, math.isqrt(n) + 1))


def _poly_roots_mod(A, p):
    """Eigenvalues in Z_p of the matrix A (roots of det(xI - A)), by evaluation."""
    n = A.shape[0]
    xs = np.arange(p, dtype=np.int64)
    # characteristic polynomial via Faddeev-LeVerrier (n < p)
    c = [1]
    Mk = np.zeros_like(A)
    I = np.eye(n, dtype=np.int64)
    for k in range(1, n + 1):
        Mk = (A @ Mk % p + c[-1] * I) % p
        tr = int(np.trace(A @ Mk % p)) % p
        c.append((-tr * pow(k, -1, p)) % p)
    vals = np.zeros(p, dtype=np.int64)
    for coef in c:
        vals = (vals * xs + coef) % p
    return [int(x) for x in np.nonzero(vals == 0)[0]]


def dixon_table(G: MatrixGroup) -> CharacterTable:
    """Burnside-Dixon character table with exact cyclotomic values."""
    if G.order > 20000:
        raise ResourceLimitError("character table limited to groups of order <= 20000")
    classes, label, reps, sizes = _class_data(G)
    r = len(classes)
    n = G.order
    inv = G.inverse_indices()
    inv_class = [int(label[inv[c]]) for c in reps]
    orders = [G.element_order(i) for i in reps]
    e = math.lcm(*orders)
    p = e + 1
    while not (_is_prime(p) and p > 2 * math.isqrt(n) + 2):
        p += e
    # structure constants c[i][j][k] = #{x in C_i : x^-1 g_k in C_j}
    c = np.zeros((r, r, r), dtype=np.int64)
    Einv = G.elements[inv]
    for k, gk in enumerate(reps):
        Y = Einv @ G.elements[gk] % G.d
        jy = label[G.index_many(Y)]
        np.add.at(c[:, :, k], (label, jy), 1)
    rng = np.random.default_rng(12345)
    for _ in range(50):
        coef = rng.integers(1, p, size=r)
        # A_i[j, k] = c_ijk; want w with A_i w = w_i w
        A = np.tensordot(coef, c, axes=(0, 0)) % p
        roots = _poly_roots_mod(A, p)
        vecs = []
        for lam in roots:
            K = gf.kernel((A - lam * np.eye(r, dtype=np.int64)) % p, p)
            if K.shape[0] != 1:
                break
            vecs.append(K[0])
        if len(vecs) == r:
            break
    else:
        raise RuntimeError("failed to separate the class algebra eigenspaces")
    z = pow(_primitive_root(p), (p - 1) // e, p)
    power_class = {}
    for a, g in enumerate(reps):
        x = np.eye(G.n, dtype=np.int64)
        for l in range(e):
            power_class[(a, l)] = int(label[G.index(x)])
            x = x @ G.elements[g] % G.d
    rows = []
    for w in vecs:
        w = w * pow(int(w[0]), -1, p) % p  # omega(K_1) = 1
        s = sum(int(w[k]) * int(w[inv_class[k]]) * pow(sizes[k], -1, p) for k in range(r)) % p
        deg2 = n * pow(s, -1, p) % p
        f = next(f for f in range(1, math.isqrt(n) + 1) if f * f % p == deg2)
        chi_p = [f * int(w[k]) * pow(sizes[k], -1, p) % p for k in range(r)]
        row = []
        for a in range(r):
            mult = {}
            for j in range(e):
                m = sum(chi_p[power_class[(a, l)]] * pow(z, (-j * l) % e, p) for l in range(e)) * pow(e, -1, p) % p
                if m:
                    mult[j] = m
            row.append(CycScalar.over(e, mult))
        rows.append(row)
    rows.sort(key=lambda row: (row[0].to_complex().real, [-v.to_complex().real for v in row]))
    return CharacterTable(n, classes, sizes, rows, method="dixon")


def character_table(G: MatrixGroup, perms=None) -> CharacterTable:
    """Character table; uses Murnaghan-Nakayama when `perms` realizes S_k."""
    if perms is not None:
        try:
            return symmetric_table(G, perms)
        except ValueError:
            pass
    # coordinate permutation matrices form S_t
    E = G.elements
    if np.all((E == 0) | (E == 1)) and np.all(E.sum(axis=1) == 1) and G.order == math.factorial(G.n):
        perms = np.argmax(E, axis=1)
        return symmetric_table(G, perms)
    return dixon_table(G)


def permutation_group(k: int) -> MatrixGroup:
    """S_k as k x k permutation matrices over Z_2."""
    import itertools

    els = []
    for p in itertools.permutations(range(k)):
        P = np.zeros((k, k), dtype=np.int64)
        P[list(p), range(k)] = 1
        els.append(P)
    return MatrixGroup(2, np.array(els), name=f"S{k}")
