"""Linear algebra over Z_d (and over Z_p for large primes p < 2^31).

Vectors and matrices are numpy int64 arrays reduced mod d.  Subspaces are kept
in reduced row echelon form so that equality and hashing are canonical.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def as_mod(A, d):
    return np.asarray(A, dtype=np.int64) % d


def mm(A, B, d):
    """Matrix product mod d (safe for d < 2^31 and small inner dimension)."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if d < 2**15:
        return (A @ B) % d
    # split to avoid overflow for large moduli
    out = np.zeros(A.shape[:-1] + B.shape[-1:], dtype=np.int64)
    for k in range(A.shape[-1]):
        out = (out + np.multiply.outer(A[..., k], B[k, ...]) % d) % d
    return out


def rref(A, d):
    """Reduced row echelon form of A mod d; returns (R, pivot_columns)."""
    A = as_mod(np.atleast_2d(A), d).copy()
    rows, cols = A.shape
    piv = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, d)
        A[r] = A[r] * inv % d
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            if d < 2**31:
                A[nzr] = (A[nzr] - (col[nzr, None] * A[r][None, :]) % d) % d
            else:
                raise ValueError("modulus too large")
        piv.append(c)
        r += 1
    return A[:r], piv


def rank(A, d) -> int:
    A = np.atleast_2d(A)
    if A.size == 0:
        return 0
    return len(rref(A, d)[1])


def kernel(A, d):
    """Basis (rows) of {x : A x = 0 mod d}."""
    A = np.atleast_2d(as_mod(A, d))
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n, dtype=np.int64)
    R, piv = rref(A, d)
    free = [c for c in range(n) if c not in piv]
    out = np.zeros((len(free), n), dtype=np.int64)
    for i, f in enumerate(free):
        out[i, f] = 1
        for j, p in enumerate(piv):
            out[i, p] = (-R[j, f]) % d
    return out


def solve(A, b, d):
    """One solution x of A x = b mod d, or None."""
    A = np.atleast_2d(as_mod(A, d))
    b = as_mod(b, d).reshape(-1)
    aug = np.concatenate([A, b[:, None]], axis=1)
    R, piv = rref(aug, d)
    n = A.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.int64)
    for j, p in enumerate(piv):
        x[p] = R[j, n]
    return x


def inverse(A, d):
    A = as_mod(A, d)
    n = A.shape[0]
    R, piv = rref(np.concatenate([A, np.eye(n, dtype=np.int64)], axis=1), d)
    if piv[:n] != list(range(n)):
        raise ValueError("matrix is singular")
    return R[:n, n:]


def det(A, d) -> int:
    A = as_mod(A, d).copy()
    n = A.shape[0]
    out = 1
    for c in range(n):
        nz = np.nonzero(A[c:, c])[0]
        if nz.size == 0:
            return 0
        i = c + int(nz[0])
        if i != c:
            A[[c, i]] = A[[i, c]]
            out = -out
        out = out * int(A[c, c]) % d
        inv = pow(int(A[c, c]), -1, d)
        f = A[c + 1:, c] * inv % d
        A[c + 1:] = (A[c + 1:] - f[:, None] * A[c][None, :]) % d
    return out % d


def rank_gf2(rows) -> int:
    """Rank of bit-packed GF(2) rows (Python ints)."""
    basis = {}
    r = 0
    for v in rows:
        v = int(v)
        while v:
            h = v.bit_length() - 1
            if h in basis:
                v ^= basis[h]
            else:
                basis[h] = v
                r += 1
                break
    return r


def pack_rows(A):
    """Bit-pack rows of a 0/1 matrix, first column as most significant bit."""
    A = np.asarray(A, dtype=np.int64) % 2
    t = A.shape[1]
    w = 1 << np.arange(t - 1, -1, -1, dtype=np.int64)
    return [int(x) for x in A @ w] if t <= 62 else [int("".join(map(str, r)), 2) for r in A]


@lru_cache(maxsize=32)
def _all_vectors(t, d):
    if t == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(d**t, dtype=np.int64)
    out = np.zeros((d**t, t), dtype=np.int64)
    for i in range(t - 1, -1, -1):
        out[:, i] = idx % d
        idx //= d
    out.setflags(write=False)
    return out


def all_vectors(t, d):
    """All of Z_d^t in lexicographic order (read-only)."""
    return _all_vectors(int(t), int(d))


def vec_index(v, d):
    """Lexicographic index of vectors (last axis), inverse of all_vectors."""
    v = np.asarray(v, dtype=np.int64)
    t = v.shape[-1]
    w = d ** np.arange(t - 1, -1, -1, dtype=np.int64)
    return (v % d) @ w


def digits(v) -> str:
    v = [int(x) for x in v]
    if max(v, default=0) < 10:
        return "".join(str(x) for x in v)
    return ",".join(str(x) for x in v)


def parse_digits(s: str, d: int):
    s = s.strip()
    parts = s.split(",") if "," in s else list(s)
    return np.array([int(p) for p in parts], dtype=np.int64) % d


class Subspace:
    """Subspace of Z_d^t stored as its RREF basis."""

    __slots__ = ("d", "t", "basis", "pivots", "_key")

    def __init__(self, d: int, t: int, rows=None):
        self.d = int(d)
        self.t = int(t)
        if rows is None or np.size(rows) == 0:
            self.basis = np.zeros((0, t), dtype=np.int64)
            self.pivots = []
        else:
            rows = np.atleast_2d(as_mod(rows, d))
            if rows.shape[1] != t:
                raise ValueError("row length does not match t")
            self.basis, self.pivots = rref(rows, d)
        self.basis.setflags(write=False)
        self._key = (self.d, self.t, self.basis.tobytes())

    @property
    def dim(self):
        return self.basis.shape[0]

    def __eq__(self, other):
        return isinstance(other, Subspace) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"Subspace(d={self.d}, t={self.t}, rows={[digits(r) for r in self.basis]})"

    def sort_key(self):
        return (self.dim, [tuple(r) for r in self.basis])

    def contains(self, v) -> bool:
        v = as_mod(v, self.d)
        if self.dim == 0:
            return not v.any()
        return rank(np.vstack([self.basis, v]), self.d) == self.dim

    def contains_all(self, other) -> bool:
        return all(self.contains(r) for r in other.basis)

    def elements(self):
        """All vectors of the subspace, shape (d^dim, t)."""
        coeffs = all_vectors(self.dim, self.d)
        return coeffs @ self.basis % self.d

    def span_with(self, *vs):
        rows = [self.basis] + [np.atleast_2d(v) for v in vs]
        return Subspace(self.d, self.t, np.vstack(rows))

    def __add__(self, other):
        return Subspace(self.d, self.t, np.vstack([self.basis, other.basis]))

    def intersection(self, other):
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.d, self.t)
        # x A = y B  ->  kernel of [A; -B]^T
        K = kernel(np.vstack([self.basis, -other.basis]).T, self.d)
        if K.size == 0:
            return Subspace(self.d, self.t)
        return Subspace(self.d, self.t, K[:, : self.dim] @ self.basis % self.d)

    def perp(self, beta):
        """Orthocomplement {u : beta(v, u) = 0 for v in self}."""
        beta = as_mod(beta, self.d)
        if self.dim == 0:
            return Subspace(self.d, self.t, np.eye(self.t, dtype=np.int64))
        return Subspace(self.d, self.t, kernel(self.basis @ beta % self.d, self.d))

    def image(self, O):
        """O N for a t x t matrix acting on column vectors."""
        if self.dim == 0:
            return self
        return Subspace(self.d, self.t, (as_mod(O, self.d) @ self.basis.T % self.d).T)

    def to_json(self):
        return {"d": self.d, "t": self.t, "rows": [digits(r) for r in self.basis]}

    @classmethod
    def from_json(cls, obj):
        d, t = int(obj["d"]), int(obj["t"])
        rows = [parse_digits(r, d) for r in obj["rows"]]
        return cls(d, t, np.array(rows) if rows else None)

    @classmethod
    def full(cls, d, t):
        return cls(d, t, np.eye(t, dtype=np.int64))


def complement_basis(outer: Subspace, inner: Subspace):
    """Rows completing a basis of `inner` to one of `outer` (greedy over RREF rows)."""
    if not outer.contains_all(inner):
        raise ValueError("inner is not contained in outer")
    chosen = []
    cur = inner
    for r in outer.basis:
        if not cur.contains(r):
            chosen.append(r)
            cur = cur.span_with(r)
        if cur.dim == outer.dim:
            break
    return np.array(chosen, dtype=np.int64).reshape(len(chosen), outer.t)


class QuotientSection:
    """Coordinates on perp / N through a chosen complement T with perp = N + T."""

    def __init__(self, N: Subspace, perp: Subspace, complement=None):
        d, t = N.d, N.t
        self.d, self.t = d, t
        self.N = N
        self.perp = perp
        if complement is None:
            T = complement_basis(perp, N)
        else:
            T = np.atleast_2d(as_mod(complement, d)).reshape(-1, t)
            if T.shape[0] + N.dim != perp.dim or Subspace(d, t, np.vstack([N.basis, T])) != perp:
                raise ValueError("complement does not span perp together with N")
        self.T = T
        self.k = T.shape[0]
        # left inverse on perp: coordinates in the basis [T; N]
        Q = np.vstack([T, N.basis]) if N.dim else T
        self._Q = Q
        if Q.shape[0]:
            _, cols = rref(Q, d)
            self._cols = cols
            self._inv = inverse(Q[:, cols], d)
        else:
            self._cols = []
            self._inv = np.zeros((0, 0), dtype=np.int64)

    def lift(self, coords):
        """Vectors T^T c for coordinate rows c (shape (..., k))."""
        c = as_mod(coords, self.d)
        if self.k == 0:
            return np.zeros(c.shape[:-1] + (self.t,), dtype=np.int64)
        return c @ self.T % self.d

    def coordinates(self, v):
        """Full coordinates of v in perp w.r.t. [T; N] (shape (..., k + dim N))."""
        v = as_mod(v, self.d)
        if not self._cols:
            return np.zeros(v.shape[:-1] + (0,), dtype=np.int64)
        c = v[..., self._cols] @ self._inv % self.d
        check = c @ self._Q % self.d
        if not np.array_equal(check, v):
            raise ValueError("vector is not in the orthocomplement")
        return c

    def project(self, v):
        """Quotient coordinates of v (shape (..., k))."""
        return self.coordinates(v)[..., : self.k]

    def elements(self):
        return all_vectors(self.k, self.d)


def random_matrix(rng, shape, d):
    return rng.integers(0, d, size=shape, dtype=np.int64)


def enumerate_gl(n, d):
    """All invertible n x n matrices (small n only)."""
    if d ** (n * n) > 2**20:
        raise ValueError("GL enumeration too large")
    for entries in itertools.product(range(d), repeat=n * n):
        A = np.array(entries, dtype=np.int64).reshape(n, n)
        if rank(A, d) == n:
            yield A
