"""Exact scalars: residues mod d and elements of Q(zeta_M)[1/sqrt(d)].

Cyclotomic numbers are stored in the power basis of Z[x]/Phi_M(x), which is a
canonical form, so equality is a coefficient comparison.  The prime ``d`` fixes
the field: tau = (-1)^d exp(i pi/d), D = ord(tau), M = lcm(2D, 8).

Two containers share one field object:

* ``CycScalar`` holds rational coefficients.
* ``CycArray`` holds integer coefficient arrays with a common denominator
  sqrt(d)^k, which is what the tensor-power simulators use.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

SUPPORTED_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23)
_INT_LIMIT = 2**62
_FLOAT_EXACT = 2**52


def check_prime(d: int) -> int:
    d = int(d)
    if d < 2 or any(d % p == 0 for p in range(2, int(math.isqrt(d)) + 1)):
        raise ValueError(f"d must be prime, got {d}")
    return d


def order_tau(d: int) -> int:
    """Order D of tau: 4 for d = 2, d for odd d."""
    d = check_prime(d)
    return 4 if d == 2 else d


def cyclotomic_order(d: int) -> int:
    D = order_tau(d)
    return 2 * D * 8 // math.gcd(2 * D, 8)


def tau_exponent(d: int) -> int:
    """Exponent e with tau = zeta_M^e."""
    M = cyclotomic_order(d)
    # tau = exp(i pi (d + 1/d)) for the sign convention (-1)^d exp(i pi/d)
    # tau^2 = omega = zeta_M^(M/d)
    if d == 2:
        return M // 4  # tau = i
    # tau = omega^((d+1)/2) for odd d
    return (M // d) * ((d + 1) // 2) % M


def omega_exponent(d: int) -> int:
    return cyclotomic_order(d) // d


def omega8_exponent(d: int) -> int:
    return cyclotomic_order(d) // 8


# ---------------------------------------------------------------- residues


class ModInt:
    """Residue class mod a prime; arithmetic stays in canonical range."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        self.modulus = int(modulus)
        self.value = int(value) % self.modulus

    def _coerce(self, other):
        if isinstance(other, ModInt):
            if other.modulus != self.modulus:
                raise ValueError("modulus mismatch")
            return other.value
        return int(other)

    def __add__(self, other):
        return ModInt(self.value + self._coerce(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return ModInt(self.value - self._coerce(other), self.modulus)

    def __rsub__(self, other):
        return ModInt(self._coerce(other) - self.value, self.modulus)

    def __mul__(self, other):
        return ModInt(self.value * self._coerce(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.value, self.modulus)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return ModInt(pow(self.value, e, self.modulus), self.modulus)

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse")
        return ModInt(pow(self.value, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * ModInt(self._coerce(other), self.modulus).inverse()

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return self.modulus == other.modulus and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"ModInt({self.value}, {self.modulus})"


def legendre(a: int, d: int) -> int:
    """Legendre symbol (a/d) for an odd prime d, in {-1, 0, 1}."""
    d = check_prime(d)
    if d == 2:
        raise ValueError("Legendre symbol is undefined for d = 2")
    a %= d
    if a == 0:
        return 0
    return 1 if pow(a, (d - 1) // 2, d) == 1 else -1


# ---------------------------------------------------------------- field


def _poly_divmod(num, den):
    num = list(num)
    out = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        out[i] = c
        for j, b in enumerate(den):
            num[i + j] -= c * b
    return out, num


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple:
    """Integer coefficients of Phi_m, lowest degree first."""
    p = [-1] + [0] * (m - 1) + [1]
    for k in range(1, m):
        if m % k == 0:
            p, rem = _poly_divmod(p, cyclotomic_poly(k))
            assert not any(rem)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return tuple(p)


class CycField:
    """Q(zeta_M) with reduction tables.

    With a prime ``d`` the order is M = lcm(2D, 8) and sqrt(d) is available;
    with ``d=None`` any order M can be used (character values).
    """

    def __init__(self, d: int | None, M: int | None = None):
        if d is not None:
            self.d = check_prime(d)
            self.D = order_tau(d)
            self.M = cyclotomic_order(d)
        else:
            self.d = None
            self.D = None
            self.M = int(M)
        phi = cyclotomic_poly(self.M)
        self.deg = len(phi) - 1
        deg, M = self.deg, self.M
        # R[:, e] = coefficients of x^e mod Phi_M
        R = np.zeros((deg, M), dtype=np.int64)
        cur = [0] * deg
        cur[0] = 1
        for e in range(M):
            R[:, e] = cur
            top = cur[-1]
            cur = [0] + cur[:-1]
            for j in range(deg):
                cur[j] -= top * phi[j]
        self.R = R
        # mono[e] maps coefficient vectors to those of zeta^e * (.)
        self.mono = np.zeros((M, deg, deg), dtype=np.int64)
        for e in range(M):
            for j in range(deg):
                self.mono[e][:, j] = R[:, (e + j) % M]
        self.conj_matrix = np.stack([R[:, (-j) % M] for j in range(deg)], axis=1)
        self.sqrt_d = self._sqrt_d() if d is not None else None

    def _sqrt_d(self):
        """Coefficients of +sqrt(d) in the power basis."""
        d, M = self.d, self.M
        v = np.zeros(M, dtype=np.int64)
        if d == 2:
            v[1] += 1
            v[M - 1] += 1
        else:
            # Gauss sum g = sum (x/d) zeta_d^x; g^2 = (-1/d) d
            for x in range(1, d):
                v[(M // d) * x % M] += legendre(x, d)
            if d % 4 == 3:
                # sqrt(d) = -i g
                v = -np.roll(v, M // 4)
        out = self.R @ v
        val = sum(int(out[j]) * cmath.exp(2j * cmath.pi * j / M) for j in range(self.deg))
        assert abs(val - math.sqrt(d)) < 1e-9
        return out

    def reduce(self, vec):
        """Power-basis coefficients of sum_e vec[e] zeta^e (vec over Z_M)."""
        return self.R @ np.asarray(vec)

    def roots(self):
        return np.exp(2j * np.pi * np.arange(self.deg) / self.M)


@lru_cache(maxsize=None)
def field(d: int) -> CycField:
    return CycField(d)


@lru_cache(maxsize=None)
def cyc_field(M: int) -> CycField:
    """Plain cyclotomic field Q(zeta_M) without a distinguished prime."""
    return CycField(None, M)


# ---------------------------------------------------------------- scalars


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class CycScalar:
    """Exact element of Q(zeta_M) for the field attached to a prime d.

    The stored form always has ``sqrtd == 0``: a denominator sqrt(d)^k is
    absorbed because sqrt(d) itself lies in Z[zeta_M].  Constructors accept any
    k >= 0.
    """

    __slots__ = ("F", "coeffs")

    def __init__(self, d, coeffs=None, sqrtd: int = 0):
        F = d if isinstance(d, CycField) else field(d)
        self.F = F
        if coeffs is None:
            c = [Fraction(0)] * F.deg
        elif isinstance(coeffs, dict):
            full = [Fraction(0)] * F.M
            for e, v in coeffs.items():
                full[int(e) % F.M] += _as_fraction(v)
            c = _reduce_fracs(F, full)
        else:
            c = [_as_fraction(v) for v in coeffs]
            if len(c) != F.deg:
                raise ValueError("power-basis coefficient list has wrong length")
        k = int(sqrtd)
        if k < 0:
            raise ValueError("sqrtd exponent must be non-negative")
        if k and F.d is None:
            raise ValueError("sqrt(d) denominators need a prime field")
        # divide by sqrt(d)^k: sqrt(d)^-1 = sqrt(d) / d
        if k % 2:
            c = _mul_fracs(F, c, [Fraction(int(x)) for x in F.sqrt_d])
            k += 1
        scale = Fraction(1, F.d ** (k // 2)) if k else Fraction(1)
        self.coeffs = tuple(x * scale for x in c)

    @classmethod
    def over(cls, M: int, coeffs: dict):
        """Element sum_e coeffs[e] zeta_M^e of the plain field Q(zeta_M)."""
        return cls(cyc_field(M), coeffs)

    @property
    def d(self):
        return self.F.d

    # constructors
    @classmethod
    def zero(cls, d):
        return cls(d)

    @classmethod
    def one(cls, d):
        return cls(d, {0: 1})

    @classmethod
    def root(cls, d, e: int):
        """zeta_M^e."""
        return cls(d, {e: 1})

    @classmethod
    def tau(cls, d, k: int = 1):
        return cls.root(d, tau_exponent(d) * k)

    @classmethod
    def omega(cls, d, k: int = 1):
        return cls.root(d, omega_exponent(d) * k)

    @classmethod
    def from_int(cls, d, n):
        return cls(d, {0: _as_fraction(n)})

    @classmethod
    def sqrt_d(cls, d):
        F = field(d)
        return cls(d, [Fraction(int(x)) for x in F.sqrt_d])

    @property
    def M(self):
        return self.F.M

    @property
    def sqrtd(self):
        return 0

    def _coerce(self, other):
        if isinstance(other, CycScalar):
            if other.F.M != self.F.M:
                raise ValueError("field mismatch")
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return CycScalar(self.F, {0: Fraction(int(other)) if isinstance(other, np.integer) else other})
        raise TypeError(type(other))

    def __add__(self, other):
        o = self._coerce(other)
        return CycScalar(self.F, [a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycScalar(self.F, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return CycScalar(self.F, _mul_fracs(self.F, self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def conj(self):
        F = self.F
        full = [Fraction(0)] * F.M
        for j, c in enumerate(self.coeffs):
            full[(-j) % F.M] += c
        return CycScalar(F, _reduce_fracs(F, full))

    def norm2(self):
        """|z|^2 as a CycScalar (real)."""
        return self * self.conj()

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.F.M, self.coeffs))

    def to_complex(self) -> complex:
        F = self.F
        return complex(sum(float(c) * r for c, r in zip(self.coeffs, F.roots())))

    def root_exponent(self):
        """e with self == zeta_M^e, or None."""
        for e in range(self.M):
            if self == CycScalar(self.F, {e: 1}):
                return e
        return None

    def as_fraction(self):
        """The value as a Fraction if it is rational, else None."""
        return self.coeffs[0] if self.is_rational() else None

    def to_json(self):
        return {
            "m": self.M,
            "coeffs": [[j, str(c)] for j, c in enumerate(self.coeffs) if c],
            "sqrtd": 0,
        }

    @classmethod
    def from_json(cls, d, obj):
        if int(obj["m"]) != cyclotomic_order(d):
            raise ValueError("cyclotomic order does not match d")
        return cls(d, {int(e): Fraction(v) for e, v in obj["coeffs"]}, obj.get("sqrtd", 0))

    def __repr__(self):
        terms = [f"{c}*z^{j}" for j, c in enumerate(self.coeffs) if c]
        return f"CycScalar(M={self.M}: {' + '.join(terms) or '0'})"


def _reduce_fracs(F, full):
    out = [Fraction(0)] * F.deg
    for e, c in enumerate(full):
        if c:
            col = F.R[:, e % F.M]
            for j in range(F.deg):
                if col[j]:
                    out[j] += c * int(col[j])
    return out


def _mul_fracs(F, a, b):
    full = [Fraction(0)] * F.M
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    full[(i + j) % F.M] += x * y
    return _reduce_fracs(F, full)


# ---------------------------------------------------------------- arrays


def _bound(a) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


def _fit(a):
    """Switch to Python-int storage when int64 could overflow soon."""
    if a.dtype != object and a.size and _bound(a) > 2**40:
        return a.astype(object)
    return a


def _int_matmul(a, b):
    inner = a.shape[-1]
    ba, bb = _bound(a), _bound(b)
    if ba * bb * max(inner, 1) < _FLOAT_EXACT and a.dtype != object and b.dtype != object:
        out = np.matmul(a.astype(np.float64), b.astype(np.float64))
        return np.rint(out).astype(np.int64)
    if ba * bb * max(inner, 1) < _INT_LIMIT and a.dtype != object and b.dtype != object:
        return np.matmul(a, b)
    return np.matmul(a.astype(object), b.astype(object))


class CycArray:
    """Array over Z[zeta_M] scaled by a common sqrt(d)^-k.

    ``data`` has shape (deg, *shape); slice j is the coefficient of zeta^j.
    """

    __slots__ = ("d", "data", "k")

    def __init__(self, d: int, data, k: int = 0, normalize: bool = True):
        self.d = d
        F = field(d)
        data = np.asarray(data)
        if data.dtype != object:
            data = data.astype(np.int64)
        if data.shape[0] != F.deg:
            raise ValueError("leading axis must have length deg")
        self.data = _fit(data)
        self.k = int(k)
        if normalize:
            self._normalize()

    # constructors
    @classmethod
    def from_ints(cls, d, ints, k: int = 0):
        F = field(d)
        ints = np.asarray(ints)
        data = np.zeros((F.deg,) + ints.shape, dtype=ints.dtype if ints.dtype == object else np.int64)
        data[0] = ints
        return cls(d, data, k)

    @classmethod
    def from_exponents(cls, d, exps, k: int = 0):
        """Entries zeta_M^e, with e < 0 meaning zero."""
        F = field(d)
        exps = np.asarray(exps, dtype=np.int64)
        data = np.zeros((F.deg,) + exps.shape, dtype=np.int64)
        mask = exps >= 0
        cols = F.R[:, exps[mask] % F.M]
        data[:, mask] = cols
        return cls(d, data, k)

    @classmethod
    def zeros(cls, d, shape):
        F = field(d)
        return cls(d, np.zeros((F.deg,) + tuple(shape), dtype=np.int64), 0, normalize=False)

    @classmethod
    def eye(cls, d, n):
        return cls.from_ints(d, np.eye(n, dtype=np.int64))

    @classmethod
    def from_scalar(cls, s: CycScalar):
        """Exact scalar with integer-representable coefficients."""
        den = math.lcm(*[c.denominator for c in s.coeffs]) if s.coeffs else 1
        k = 0
        while den % s.d == 0:
            den //= s.d
            k += 2
        if den != 1:
            raise ValueError("denominator is not a power of d")
        scale = s.d ** (k // 2)
        data = np.array([int(c * scale) for c in s.coeffs], dtype=object)
        return cls(s.d, data, k)

    @property
    def field(self):
        return field(self.d)

    @property
    def shape(self):
        return self.data.shape[1:]

    @property
    def ndim(self):
        return self.data.ndim - 1

    def copy(self):
        return CycArray(self.d, self.data.copy(), self.k, normalize=False)

    # normal form
    def _mul_sqrt_d(self, data):
        F = self.field
        return _conv(F, data, F.sqrt_d.reshape((F.deg,) + (1,) * (data.ndim - 1)))

    def _normalize(self):
        d = self.d
        while self.k > 0:
            if not self.data.any():
                self.k = 0
                break
            if self.k >= 2 and not (self.data % d).any():
                self.data = self.data // d
                self.k -= 2
                continue
            # cheap rejection on a few nonzero entries before the full product
            flat = self.data.reshape(self.data.shape[0], -1)
            nz = np.flatnonzero(flat.any(axis=0))[:16]
            if (self._mul_sqrt_d(flat[:, nz]) % d).any():
                break
            y = self._mul_sqrt_d(self.data)
            if (y % d).any():
                break
            self.data = _fit(y // d)
            self.k -= 1
        return self

    def _raised(self, k):
        """Same value with denominator exponent k >= self.k."""
        if k == self.k:
            return self.data
        diff = k - self.k
        data = self.data
        if diff % 2:
            data = self._mul_sqrt_d(data)
            diff -= 1
        if diff:
            data = data * (self.d ** (diff // 2))
        return _fit(data)

    def _align(self, other):
        k = max(self.k, other.k)
        return self._raised(k), other._raised(k), k

    # arithmetic
    def __add__(self, other):
        a, b, k = self._align(other)
        return CycArray(self.d, _fit(a + b), k)

    def __sub__(self, other):
        a, b, k = self._align(other)
        return CycArray(self.d, _fit(a - b), k)

    def __neg__(self):
        return CycArray(self.d, -self.data, self.k, normalize=False)

    def scale_int(self, n: int):
        return CycArray(self.d, _fit(self.data * n), self.k)

    def scale_sqrt_d(self, j: int):
        """Multiply by sqrt(d)^-j (j may be negative)."""
        if j >= 0:
            return CycArray(self.d, self.data, self.k + j)
        return CycArray(self.d, _lift(self, -j), self.k)

    def mul_root(self, e):
        """Multiply entrywise by zeta^e (e scalar or broadcastable array)."""
        F = self.field
        e = np.asarray(e) % F.M
        if e.ndim == 0:
            return CycArray(self.d, np.tensordot(F.mono[int(e)], self.data, axes=(1, 0)), self.k, normalize=False)
        out = np.zeros(self.data.shape, dtype=self.data.dtype)
        eb = np.broadcast_to(e, self.shape)
        for ex in np.unique(eb):
            mask = eb == ex
            out[:, mask] = F.mono[int(ex)] @ self.data[:, mask]
        return CycArray(self.d, out, self.k, normalize=False)

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return self.scale_int(int(other))
        if isinstance(other, CycScalar):
            other = CycArray.from_scalar(other)
        if not isinstance(other, CycArray):
            return NotImplemented
        F = self.field
        return CycArray(self.d, _conv(F, self.data, other.data), self.k + other.k)

    __rmul__ = __mul__

    def __matmul__(self, other):
        F = self.field
        deg = F.deg
        nz_a = [j for j in range(deg) if self.data[j].any()]
        nz_b = [j for j in range(deg) if other.data[j].any()]
        out_shape = np.broadcast_shapes(self.shape[:-2], other.shape[:-2]) + (self.shape[-2], other.shape[-1])
        buckets = {}
        for i in nz_a:
            for j in nz_b:
                p = _int_matmul(self.data[i], other.data[j])
                e = (i + j) % F.M
                buckets[e] = p if e not in buckets else _fit(buckets[e] + p)
        out = _reduce_buckets(F, buckets, out_shape)
        return CycArray(self.d, out, self.k + other.k)

    def kron(self, other):
        F = self.field
        buckets = {}
        for i in range(F.deg):
            if not self.data[i].any():
                continue
            for j in range(F.deg):
                if not other.data[j].any():
                    continue
                p = np.kron(self.data[i], other.data[j])
                e = (i + j) % F.M
                buckets[e] = p if e not in buckets else buckets[e] + p
        shape = tuple(a * b for a, b in zip(self.shape, other.shape))
        return CycArray(self.d, _reduce_buckets(F, buckets, shape), self.k + other.k)

    def conj(self):
        F = self.field
        return CycArray(self.d, np.tensordot(F.conj_matrix, self.data, axes=(1, 0)), self.k, normalize=False)

    @property
    def T(self):
        return CycArray(self.d, np.swapaxes(self.data, -1, -2), self.k, normalize=False)

    def dagger(self):
        return self.conj().T

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], tuple):
            shape = shape[0]
        return CycArray(self.d, self.data.reshape((self.data.shape[0],) + tuple(shape)), self.k, normalize=False)

    def transpose(self, axes):
        return CycArray(self.d, self.data.transpose((0,) + tuple(a + 1 for a in axes)), self.k, normalize=False)

    def take(self, idx, axis):
        return CycArray(self.d, np.take(self.data, idx, axis=axis + 1), self.k, normalize=False)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        sub = self.data[(slice(None),) + idx]
        if sub.ndim == 1:
            return self._scalar(sub)
        return CycArray(self.d, sub, self.k)

    def _scalar(self, vec):
        return CycScalar(self.d, [Fraction(int(x)) for x in vec], self.k)

    def item(self, *idx):
        return self._scalar(self.data[(slice(None),) + tuple(idx)])

    def is_zero(self):
        return not self.data.any()

    def equals(self, other) -> bool:
        if self.shape != other.shape:
            return False
        a, b, _ = self._align(other)
        return bool(np.array_equal(a, b))

    def __eq__(self, other):
        if not isinstance(other, CycArray):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def is_scalar_multiple_of(self, other):
        """Return c with self == c * other (c a root of unity), else None."""
        F = self.field
        for e in range(F.M):
            if self.equals(other.mul_root(e)):
                return e
        return None

    def to_complex(self):
        F = self.field
        data = self.data.astype(np.float64) if self.data.dtype == object else self.data
        out = np.tensordot(F.roots(), data, axes=(0, 0))
        return out / math.sqrt(self.d) ** self.k

    def trace(self):
        return self._scalar(np.trace(self.data, axis1=-2, axis2=-1))

    def sum_all(self):
        return self._scalar(self.data.reshape(self.data.shape[0], -1).sum(axis=1))

    def vdot(self, other):
        """<self|other> over all entries."""
        a = self.conj().reshape(1, -1)
        b = other.reshape(-1, 1)
        return (a @ b).item(0, 0)

    def __repr__(self):
        return f"CycArray(d={self.d}, shape={self.shape}, k={self.k})"


def _lift(arr: CycArray, j: int):
    """Data for arr * sqrt(d)^j at the same denominator exponent."""
    data = arr.data
    if j % 2:
        data = arr._mul_sqrt_d(data)
    return _fit(data * arr.d ** (j // 2))


def _conv(F, a, b):
    """Coefficient convolution of broadcastable arrays with leading axis deg."""
    buckets = {}
    for i in range(F.deg):
        ai = a[i]
        if not np.any(ai):
            continue
        for j in range(F.deg):
            bj = b[j]
            if not np.any(bj):
                continue
            p = ai * bj
            e = (i + j) % F.M
            buckets[e] = p if e not in buckets else buckets[e] + p
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    return _reduce_buckets(F, buckets, shape)


def _reduce_buckets(F, buckets, shape):
    dtype = object if any(v.dtype == object for v in buckets.values()) else np.int64
    out = np.zeros((F.deg,) + tuple(shape), dtype=dtype)
    for e, v in buckets.items():
        col = F.R[:, e]
        for j in range(F.deg):
            c = int(col[j])
            if c:
                out[j] = out[j] + c * v
    return out
