"""Clifford words and their tensor-power action Delta_{r,s}(U) = U^{(x)r} (x) conj(U)^{(x)s}.

Basis states of H_{n,t} = (C^d)^{(x) n t} are labelled by t x n matrices F
over Z_d: row i is the state of copy i, column j the t copies of qudit j.
States are stored as batches of shape (B, d^{n t}) with the flat index
ordered column-major over F, i.e. axis (j, i) of the tensor view is j*t + i.

Words list gates in the order they are applied.  Gate tokens:

    ('H', j)          Fourier gate d^-1/2 sum w^{xy} |x><y|
    ('P', j)          phase gate: tau^{x^2} (d = 2), tau^{x(x-1)} (odd d)
    ('CADD', i, j)    |x_i, x_j> -> |x_i, x_j + x_i>
    ('W', v)          Weyl operator tau^{-(v_z.v_x mod d)} Z(v_z) X(v_x), v = (v_z, v_x)
    ('PH', k)         global phase zeta_M^k

Text form: ``H3 P1 CADD2,5 W:0110 PH:3`` (qudit indices are 0-based).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from . import gflinear as gf
from .forms import GenQuadForm, QuadForm, SymBilForm, model_signs
from .scalars import CycArray, cyclotomic_order, field, omega_exponent, order_tau, tau_exponent


@dataclass(frozen=True)
class CliffordWord:
    n: int
    d: int
    gates: tuple

    def __post_init__(self):
        for g in self.gates:
            _check_gate(g, self.n, self.d)

    def __len__(self):
        return len(self.gates)

    def __add__(self, other):
        if (self.n, self.d) != (other.n, other.d):
            raise ValueError("words act on different systems")
        return CliffordWord(self.n, self.d, self.gates + other.gates)

    def to_text(self):
        return format_word(self)

    @classmethod
    def from_text(cls, text, n, d):
        return parse_word(text, n, d)

    def inverse(self):
        """Word for U^-1 (up to nothing: exact inverse)."""
        out = []
        d = self.d
        M = cyclotomic_order(d)
        for g in reversed(self.gates):
            kind = g[0]
            if kind == "H":
                out += [g] * (1 if d == 2 else 3)
            elif kind == "P":
                out += [g] * (order_tau(d) - 1 if d == 2 else d - 1)
            elif kind == "CADD":
                out += [g] * (d - 1)
            elif kind == "W":
                v = np.array(g[1])
                out.append(("W", tuple(int(x) for x in (-v) % d)))
            else:
                out.append(("PH", (-g[1]) % M))
        return CliffordWord(self.n, d, tuple(out))


def _check_gate(g, n, d):
    kind = g[0]
    if kind in ("H", "P"):
        if not 0 <= g[1] < n:
            raise ValueError(f"qudit index out of range in {g}")
    elif kind == "CADD":
        if not (0 <= g[1] < n and 0 <= g[2] < n and g[1] != g[2]):
            raise ValueError(f"bad CADD indices in {g}")
    elif kind == "W":
        if len(g[1]) != 2 * n:
            raise ValueError("Weyl label must have length 2n")
    elif kind == "PH":
        pass
    else:
        raise ValueError(f"unknown gate {kind}")


_TOKEN = re.compile(r"^(H|P)(\d+)$|^CADD(\d+),(\d+)$|^W:([\d,]+)$|^PH:(-?\d+)$")


def parse_word(text: str, n: int, d: int) -> CliffordWord:
    gates = []
    for tok in text.split():
        m = _TOKEN.match(tok)
        if not m:
            raise ValueError(f"cannot parse gate token {tok!r}")
        if m.group(1):
            gates.append((m.group(1), int(m.group(2))))
        elif m.group(3):
            gates.append(("CADD", int(m.group(3)), int(m.group(4))))
        elif m.group(5):
            gates.append(("W", tuple(int(x) for x in gf.parse_digits(m.group(5), d))))
        else:
            gates.append(("PH", int(m.group(6)) % cyclotomic_order(d)))
    return CliffordWord(n, d, tuple(gates))


def format_word(w: CliffordWord) -> str:
    out = []
    for g in w.gates:
        if g[0] in ("H", "P"):
            out.append(f"{g[0]}{g[1]}")
        elif g[0] == "CADD":
            out.append(f"CADD{g[1]},{g[2]}")
        elif g[0] == "W":
            out.append("W:" + gf.digits(g[1]))
        else:
            out.append(f"PH:{g[1]}")
    return " ".join(out)


def random_word(n, d, length, rng, weyl=True) -> CliffordWord:
    kinds = ["H", "P"] + (["CADD"] if n > 1 else []) + (["W"] if weyl else [])
    gates = []
    for _ in range(length):
        k = kinds[rng.integers(len(kinds))]
        if k in ("H", "P"):
            gates.append((k, int(rng.integers(n))))
        elif k == "CADD":
            i, j = rng.choice(n, size=2, replace=False)
            gates.append(("CADD", int(i), int(j)))
        else:
            gates.append(("W", tuple(int(x) for x in rng.integers(0, d, size=2 * n))))
    return CliffordWord(n, d, tuple(gates))


def generators(n, d):
    """Standard generating gates: H_j, P_j, CADD_ij."""
    gates = [("H", j) for j in range(n)] + [("P", j) for j in range(n)]
    gates += [("CADD", i, j) for i in range(n) for j in range(n) if i != j]
    return [CliffordWord(n, d, (g,)) for g in gates]


# ---------------------------------------------------------------- local gates


def local_gate(g, d):
    """(qudits, exps, k): matrix entries zeta_M^exps / sqrt(d)^k (exps < 0 is zero).

    ``qudits`` lists the qudits the matrix acts on, in its index order.
    """
    M = cyclotomic_order(d)
    w = omega_exponent(d)
    te = tau_exponent(d)
    x = np.arange(d)
    kind = g[0]
    if kind == "H":
        return (g[1],), (w * np.outer(x, x)) % M, 1
    if kind == "P":
        E = -np.ones((d, d), dtype=np.int64)
        ph = x if d == 2 else x * (x - 1)
        E[x, x] = (te * ph) % M
        return (g[1],), E, 0
    if kind == "CADD":
        E = -np.ones((d * d, d * d), dtype=np.int64)
        for a in range(d):
            for b in range(d):
                E[a * d + (a + b) % d, a * d + b] = 0
        return (g[1], g[2]), E, 0
    raise ValueError(f"{kind} is not a local gate")


def weyl_factors(v, n, d):
    """Per-qudit Z^a X^b matrices (exps) and the global tau exponent of W_v."""
    M = cyclotomic_order(d)
    w = omega_exponent(d)
    v = np.asarray(v, dtype=np.int64) % d
    vz, vx = v[:n], v[n:]
    x = np.arange(d)
    mats = []
    for j in range(n):
        E = -np.ones((d, d), dtype=np.int64)
        E[(x + vx[j]) % d, x] = (w * vz[j] * ((x + vx[j]) % d)) % M
        mats.append(E)
    phase = (-tau_exponent(d) * (int(vz @ vx) % d)) % M
    return mats, phase


class Backend:
    """Exact (CycArray) or float (complex128) storage for state batches."""

    def __init__(self, d, kind="exact"):
        if kind not in ("exact", "float"):
            raise ValueError("backend must be 'exact' or 'float'")
        self.d = d
        self.kind = kind
        self.M = cyclotomic_order(d)


def _move(data, axes, lead):
    """Move tensor axes (list) to just after `lead` leading axes."""
    src = [lead + a for a in axes]
    dst = list(range(lead, lead + len(axes)))
    return np.moveaxis(data, src, dst)


def _unmove(data, axes, lead):
    src = list(range(lead, lead + len(axes)))
    dst = [lead + a for a in axes]
    return np.moveaxis(data, src, dst)


class StateBatch:
    """A batch of vectors in H_{n,t} (exact or float)."""

    def __init__(self, n, t, d, data, k=0):
        self.n, self.t, self.d = n, t, d
        if isinstance(data, CycArray):
            self.exact = True
            self.arr = data
        else:
            self.exact = False
            self.arr = np.asarray(data, dtype=np.complex128)
        if self.shape[-1] != d ** (n * t):
            raise ValueError("state length does not match d^(n t)")

    @property
    def shape(self):
        return self.arr.shape

    @property
    def batch(self):
        return self.shape[0]

    def copy(self):
        return StateBatch(self.n, self.t, self.d, self.arr.copy())

    def to_complex(self):
        return self.arr.to_complex() if self.exact else self.arr

    def to_float(self):
        return StateBatch(self.n, self.t, self.d, self.to_complex())

    def axis(self, qudit, copy):
        return qudit * self.t + copy

    def tensor_shape(self):
        return (self.batch,) + (self.d,) * (self.n * self.t)

    def overlaps(self, other):
        """Matrix of <self_a | other_b>."""
        if self.exact and other.exact:
            return self.arr.conj() @ other.arr.T
        return np.conj(self.to_complex()) @ other.to_complex().T

    def equals(self, other) -> bool:
        return self.exact and other.exact and self.arr.equals(other.arr)

    def close_to(self, other, tol=1e-9) -> bool:
        return bool(np.max(np.abs(self.to_complex() - other.to_complex()), initial=0.0) <= tol)

    def to_json(self):
        c = self.to_complex()
        return {"n": self.n, "t": self.t, "d": self.d, "re": c.real.tolist(), "im": c.imag.tolist()}


def basis_states(Fs, n, t, d, exact=True):
    """Batch of basis states |F> for t x n matrices F."""
    Fs = gf.as_mod(np.asarray(Fs).reshape(-1, t, n), d)
    idx = gf.vec_index(np.transpose(Fs, (0, 2, 1)).reshape(len(Fs), n * t), d)
    dim = d ** (n * t)
    if exact:
        arr = np.zeros((len(Fs), dim), dtype=np.int64)
        arr[np.arange(len(Fs)), idx] = 1
        return StateBatch(n, t, d, CycArray.from_ints(d, arr))
    arr = np.zeros((len(Fs), dim), dtype=np.complex128)
    arr[np.arange(len(Fs)), idx] = 1
    return StateBatch(n, t, d, arr)


def flat_index(F, d):
    """Flat index of |F> (F of shape (..., t, n))."""
    F = np.asarray(F)
    n = F.shape[-1]
    t = F.shape[-2]
    return gf.vec_index(np.swapaxes(F, -1, -2).reshape(F.shape[:-2] + (n * t,)), d)


def identity_batch(n, t, d, exact=True):
    dim = d ** (n * t)
    if exact:
        return StateBatch(n, t, d, CycArray.eye(d, dim))
    return StateBatch(n, t, d, np.eye(dim, dtype=np.complex128))


def _apply_exps(state: StateBatch, axes, E, k):
    """Apply the monomial matrix zeta^E / sqrt(d)^k on the given tensor axes."""
    d = state.d
    a = len(axes)
    sub = d**a
    if state.exact:
        F = field(d)
        data = state.arr.data.reshape((F.deg,) + state.tensor_shape())
        lead = 2
        moved = _move(data, axes, lead)
        shp = moved.shape
        moved = moved.reshape(shp[:lead] + (sub,) + shp[lead + a:])
        out = np.zeros_like(moved)
        for y in range(sub):
            acc = None
            for x in np.nonzero(E[y] >= 0)[0]:
                e = int(E[y, x])
                src = moved[:, :, x]
                term = src if e == 0 else np.tensordot(F.mono[e], src, axes=(1, 0))
                acc = term if acc is None else acc + term
            if acc is not None:
                out[:, :, y] = acc
        out = _unmove(out.reshape(shp), axes, lead)
        arr = CycArray(d, out.reshape((F.deg, state.batch, -1)), state.arr.k + k, normalize=k > 0)
        return StateBatch(state.n, state.t, d, arr)
    M = cyclotomic_order(d)
    G = np.where(E >= 0, np.exp(2j * np.pi * np.maximum(E, 0) / M), 0) / np.sqrt(d) ** k
    data = state.arr.reshape(state.tensor_shape())
    moved = _move(data, axes, 1)
    shp = moved.shape
    moved = moved.reshape((shp[0], sub, -1))
    out = np.einsum("yx,bxr->byr", G, moved).reshape(shp)
    out = _unmove(out, axes, 1)
    return StateBatch(state.n, state.t, d, out.reshape(state.batch, -1))


def _phase(state: StateBatch, e):
    if e % cyclotomic_order(state.d) == 0:
        return state
    if state.exact:
        return StateBatch(state.n, state.t, state.d, state.arr.mul_root(e))
    M = cyclotomic_order(state.d)
    return StateBatch(state.n, state.t, state.d, state.arr * np.exp(2j * np.pi * e / M))


def apply_gate_copy(state: StateBatch, g, copy: int, conj: bool):
    """Apply gate g (or its complex conjugate) to one copy."""
    d = state.d
    M = cyclotomic_order(d)
    kind = g[0]
    if kind == "PH":
        return _phase(state, -g[1] if conj else g[1])
    if kind == "W":
        mats, ph = weyl_factors(g[1], state.n, d)
        for j, E in enumerate(mats):
            if np.array_equal(E, np.where(np.eye(d, dtype=bool), 0, -1)):
                continue
            E2 = np.where(E >= 0, (-E) % M, -1) if conj else E
            state = _apply_exps(state, [state.axis(j, copy)], E2, 0)
        return _phase(state, -ph if conj else ph)
    qudits, E, k = local_gate(g, d)
    if conj:
        E = np.where(E >= 0, (-E) % M, -1)
    return _apply_exps(state, [state.axis(j, copy) for j in qudits], E, k)


def apply_tensor_power(word: CliffordWord, r: int, s: int, psi: StateBatch) -> StateBatch:
    """Delta_{r,s}(U) psi for the word U, copies 0..r-1 plain, r..t-1 conjugated."""
    if r + s != psi.t or word.n != psi.n or word.d != psi.d:
        raise ValueError("word and state do not match (n, t, d)")
    for g in word.gates:
        for c in range(psi.t):
            psi = apply_gate_copy(psi, g, c, conj=c >= r)
    return psi


def tensor_power_matrix(word: CliffordWord, r: int, s: int, exact=True):
    """Dense matrix of Delta_{r,s}(U) (small systems only)."""
    psi = identity_batch(word.n, r + s, word.d, exact)
    out = apply_tensor_power(word, r, s, psi)
    return out.arr.T


def clifford_matrix(word: CliffordWord, exact=True):
    return tensor_power_matrix(word, 1, 0, exact)


def apply_column_operator(psi: StateBatch, A, col: int) -> StateBatch:
    """Apply a d^t x d^t operator A to the t copies of qudit `col`."""
    d, t = psi.d, psi.t
    D = d**t
    axes = [psi.axis(col, c) for c in range(t)]
    if psi.exact:
        F = field(d)
        data = psi.arr.data.reshape((F.deg,) + psi.tensor_shape())
        moved = _move(data, axes, 2)
        shp = moved.shape
        moved = np.moveaxis(moved.reshape(shp[:2] + (D, -1)), 2, 3)  # (deg, B, rest, D)
        X = CycArray(d, moved, psi.arr.k, normalize=False)
        Y = X @ A.T
        out = np.moveaxis(Y.data, 3, 2).reshape(shp)
        out = _unmove(out, axes, 2)
        return StateBatch(psi.n, t, d, CycArray(d, out.reshape((F.deg, psi.batch, -1)), Y.k))
    A = A.to_complex() if isinstance(A, CycArray) else np.asarray(A)
    data = psi.arr.reshape(psi.tensor_shape())
    moved = _move(data, axes, 1)
    shp = moved.shape
    moved = moved.reshape((shp[0], D, -1))
    out = np.einsum("yx,bxr->byr", A, moved).reshape(shp)
    return StateBatch(psi.n, t, d, _unmove(out, axes, 1).reshape(psi.batch, -1))


def apply_tensor_operator(psi: StateBatch, A) -> StateBatch:
    """Apply A^{(x) n} column by column (A acts on one column of t copies)."""
    for j in range(psi.n):
        psi = apply_column_operator(psi, A, j)
    return psi


# ---------------------------------------------------------------- weights


def basis_weight(F, r, s, d) -> SymBilForm:
    """M_F = F^T M_{r,s} F (n x n), the weight of |F> for Delta_{r,s}."""
    F = gf.as_mod(F, d)
    S = np.diag(model_signs(r, s))
    return SymBilForm(d, F.T @ S @ F % d)


def weight_exponent(q, F, r, s):
    """Predicted eigenphase of the diagonal operator of q on |F>.

    For a GenQuadForm the operator is sum tau^{q(x)} |x><x| and the return
    value is the tau exponent tr(A M_F) mod D with A the Z_D upper-triangular
    representation; for a QuadForm it is sum omega^{q(x)} |x><x| and the
    omega exponent tr(M_q M_F) mod d.
    """
    F = np.asarray(F, dtype=np.int64)
    S = np.diag(model_signs(r, s))
    if isinstance(q, GenQuadForm):
        A = q.upper_triangular()
        MF = (F % q.d).T @ S @ (F % q.d)
        return int(np.trace(A @ MF)) % q.D
    if isinstance(q, QuadForm):
        MF = F.T @ S @ F % q.d
        return int(np.trace(q.rep @ MF)) % q.d
    raise TypeError(type(q))


def weight_exponent_direct(q, F, r, s):
    """Same eigenphase from the rows: sum_i s_i q(f_i)."""
    F = np.asarray(F, dtype=np.int64)
    signs = model_signs(r, s)
    vals = q.evaluate(F)
    mod = q.D if isinstance(q, GenQuadForm) else q.d
    return int(signs @ vals) % mod


def diagonal_clifford(q: GenQuadForm, xprime=None) -> CliffordWord:
    """Word for sum_x tau^{q(x) + 2 x'.x} |x><x| on n = dim q qudits."""
    d, n = q.d, q.dim
    xp = np.zeros(n, dtype=np.int64) if xprime is None else gf.as_mod(xprime, d)
    gates = []
    beta = q.polar.matrix
    hinv = 1 if d == 2 else 3
    for i in range(n):
        for j in range(i + 1, n):
            for _ in range(int(beta[i, j])):
                # controlled phase omega^{x_i x_j} = H_j CADD_ij H_j^-1
                gates += [("H", j)] * hinv + [("CADD", i, j), ("H", j)]
    if d == 2:
        for i in range(n):
            gates += [("P", i)] * int((q.diag[i] + 2 * xp[i]) % 4)
    else:
        h = (d + 1) // 2
        for i in range(n):
            for _ in range(int(q.diag[i])):
                z = np.zeros(2 * n, dtype=np.int64)
                z[i] = h
                gates += [("P", i), ("W", tuple(int(x) for x in z))]
        if xp.any():
            gates.append(("W", tuple(int(x) for x in np.concatenate([xp, np.zeros(n, dtype=np.int64)]))))
    return CliffordWord(n, d, tuple(gates))


def diagonal_phases(q: GenQuadForm, xprime=None):
    """tau exponents q(x) + 2 x'.x for all x (the reference diagonal)."""
    d, n = q.d, q.dim
    X = gf.all_vectors(n, d)
    xp = np.zeros(n, dtype=np.int64) if xprime is None else gf.as_mod(xprime, d)
    return (q.evaluate(X) + 2 * (X @ xp)) % q.D


def rank_of_tensor_power(n, t, r, s, d):
    """Maximal rank of M_F over basis states, with an exhibiting F."""
    k = min(n, t)
    F = np.zeros((t, n), dtype=np.int64)
    F[np.arange(k), np.arange(k)] = 1
    MF = basis_weight(F, r, s, d)
    return {"rank": MF.rank(), "bound": k, "F": F}


def weight_eigenvalue_check(q: GenQuadForm, F, r, s) -> bool:
    """Apply Delta_{r,s} of the diagonal Clifford of q to |F> and compare with
    tau^{tr(A M_F)} |F> exactly."""
    F = gf.as_mod(F, q.d)
    t, n = F.shape
    psi = basis_states([F], n, t, q.d)
    out = apply_tensor_power(diagonal_clifford(q), r, s, psi)
    e = weight_exponent(q, F, r, s) * tau_exponent(q.d)
    return out.equals(StateBatch(n, t, q.d, psi.arr.mul_root(e % cyclotomic_order(q.d))))
