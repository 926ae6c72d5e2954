import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cliffdual.cliffordrep import (
    CliffordWord,
    apply_tensor_power,
    basis_states,
    basis_weight,
    clifford_matrix,
    diagonal_clifford,
    diagonal_phases,
    generators,
    identity_batch,
    parse_word,
    random_word,
    rank_of_tensor_power,
    tensor_power_matrix,
    weight_eigenvalue_check,
    weight_exponent,
    weight_exponent_direct,
)
from cliffdual.forms import GenQuadForm
from cliffdual.scalars import CycArray


# ---- float oracle built straight from the gate definitions


def tau(d):
    return (-1) ** d * np.exp(1j * np.pi / d)


def oracle_gate(g, n, d):
    w = np.exp(2j * np.pi / d)
    x = np.arange(d)
    eye = np.eye(d)
    if g[0] == "H":
        loc = {g[1]: w ** np.outer(x, x) / np.sqrt(d)}
    elif g[0] == "P":
        ph = x**2 if d == 2 else x * (x - 1)
        loc = {g[1]: np.diag(tau(d) ** ph)}
    elif g[0] == "W":
        v = np.array(g[1])
        vz, vx = v[:n], v[n:]
        Z = np.diag(w**x)
        X = np.roll(eye, 1, axis=0)
        loc = {j: np.linalg.matrix_power(Z, vz[j]) @ np.linalg.matrix_power(X, vx[j]) for j in range(n)}
        U = _kron([loc[j] for j in range(n)])
        return tau(d) ** (-(int(vz @ vx) % d)) * U
    elif g[0] == "CADD":
        i, j = g[1], g[2]
        U = np.zeros((d**n, d**n))
        for idx in range(d**n):
            digs = list(np.unravel_index(idx, (d,) * n))
            digs[j] = (digs[j] + digs[i]) % d
            U[np.ravel_multi_index(digs, (d,) * n), idx] = 1
        return U
    elif g[0] == "PH":
        M = 8 if d == 2 else 8 * d
        return np.exp(2j * np.pi * g[1] / M) * np.eye(d**n)
    return _kron([loc.get(j, eye) for j in range(n)])


def random_form(n, d, rng):
    B = rng.integers(0, d, (n, n))
    B = (np.triu(B, 1) + np.triu(B, 1).T + np.diag(np.diag(B))) % d
    diag = np.diag(B) + 2 * rng.integers(0, 2, n) if d == 2 else np.diag(B)
    return GenQuadForm(d, diag % (2 * d if d == 2 else d), B)


def _kron(mats):
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


def oracle_word(w):
    U = np.eye(w.d**w.n, dtype=complex)
    for g in w.gates:
        U = oracle_gate(g, w.n, w.d) @ U
    return U


def oracle_tensor_power(U, n, d, r, s):
    """U^{(x) r} (x) conj(U)^{(x) s} reordered to the qudit-major, copy-minor layout."""
    t = r + s
    big = _kron([U] * r + [U.conj()] * s)  # axes (copy, qudit)
    T = big.reshape((d,) * (2 * n * t))
    perm = [i * n + j for j in range(n) for i in range(t)]
    T = T.transpose(perm + [n * t + p for p in perm])
    return T.reshape(d ** (n * t), d ** (n * t))


@pytest.mark.parametrize("d", [2, 3, 5])
def test_single_gates_match_oracle(d):
    n = 2
    gates = [("H", 0), ("H", 1), ("P", 0), ("P", 1), ("CADD", 0, 1), ("CADD", 1, 0), ("W", (1, 0, 1, 1)), ("PH", 3)]
    for g in gates:
        w = CliffordWord(n, d, (g,))
        assert np.allclose(clifford_matrix(w).to_complex(), oracle_gate(g, n, d), atol=1e-12), g


@pytest.mark.parametrize("d", [2, 3])
def test_random_words_match_oracle(d, rng):
    for _ in range(10):
        w = random_word(2, d, 12, rng)
        assert np.allclose(clifford_matrix(w).to_complex(), oracle_word(w), atol=1e-10)
        assert np.allclose(clifford_matrix(w, exact=False), oracle_word(w), atol=1e-10)


@pytest.mark.parametrize("d,r,s", [(2, 2, 1), (2, 1, 1), (3, 1, 1), (2, 3, 0)])
def test_tensor_power_matches_oracle(d, r, s, rng):
    n = 1 if d == 3 or r + s == 3 else 2
    for _ in range(4):
        w = random_word(n, d, 8, rng)
        got = tensor_power_matrix(w, r, s).to_complex()
        want = oracle_tensor_power(oracle_word(w), n, d, r, s)
        assert np.allclose(got, want, atol=1e-10)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_generators_unitary_exactly(d):
    for w in generators(2, d):
        U = clifford_matrix(w)
        assert (U @ U.conj().T).equals(CycArray.eye(d, d * d))


def test_word_inverse_exact(rng):
    for d in (2, 3):
        w = random_word(2, d, 15, rng)
        assert (clifford_matrix(w) @ clifford_matrix(w.inverse())).equals(CycArray.eye(d, d * d))


def test_weyl_composition():
    # W_u W_v = tau^{<u,v>} W_{u+v} with the symplectic-type exponent checked numerically
    for d in (2, 3):
        n = 2
        for u in np.ndindex(*(d,) * 4):
            v = ((np.array(u) * 3 + 1) % d)
            Wu = oracle_word(CliffordWord(n, d, (("W", tuple(u)),)))
            Wv = oracle_word(CliffordWord(n, d, (("W", tuple(int(x) for x in v)),)))
            uv = tuple(int(x) for x in (np.array(u) + v) % d)
            Wuv = clifford_matrix(CliffordWord(n, d, (("W", uv),))).to_complex()
            prod = clifford_matrix(CliffordWord(n, d, (("W", tuple(u)), ("W", tuple(int(x) for x in v))))).to_complex()
            assert np.allclose(prod, Wv @ Wu)
            ratio = prod[np.abs(Wuv) > 0.5] / Wuv[np.abs(Wuv) > 0.5]
            assert np.allclose(ratio, ratio[0]) and np.isclose(abs(ratio[0]), 1)


def test_word_text_roundtrip(rng):
    for d in (2, 3, 5):
        w = random_word(3, d, 20, rng)
        assert parse_word(w.to_text(), 3, d) == w
    w = parse_word("H0 P1 CADD0,2 W:010110 PH:3", 3, 2)
    assert w.to_text() == "H0 P1 CADD0,2 W:010110 PH:3"
    with pytest.raises(ValueError):
        parse_word("Q1", 3, 2)
    with pytest.raises(ValueError):
        parse_word("CADD1,1", 3, 2)


def test_basis_states_layout():
    d, n, t = 3, 2, 2
    F = np.array([[1, 2], [0, 1]])
    psi = basis_states([F], n, t, d)
    v = psi.to_complex()[0]
    idx = int(np.flatnonzero(np.abs(v) > 0.5)[0])
    # column-major over F: qudit major, copy minor
    assert idx == np.ravel_multi_index((F[0, 0], F[1, 0], F[0, 1], F[1, 1]), (d,) * 4)


def test_diagonal_clifford_phases():
    for d in (2, 3):
        for n in (1, 2, 3):
            rng = np.random.default_rng(n)
            q = random_form(n, d, rng)
            U = clifford_matrix(diagonal_clifford(q)).to_complex()
            want = tau(d) ** diagonal_phases(q)
            assert np.allclose(U, np.diag(want), atol=1e-10)


@settings(max_examples=60)
@given(st.integers(0, 2**31), st.sampled_from([2, 3]), st.integers(1, 3), st.integers(1, 4))
def test_weight_law(seed, d, n, t):
    rng = np.random.default_rng(seed)
    s = int(rng.integers(0, t + 1))
    r = t - s
    q = random_form(n, d, rng)
    F = rng.integers(0, d, (t, n))
    assert weight_exponent(q, F, r, s) == weight_exponent_direct(q, F, r, s)
    assert weight_eigenvalue_check(q, F, r, s)


@given(st.integers(0, 2**31))
def test_weight_transforms_under_gl(seed):
    rng = np.random.default_rng(seed)
    d, t, n = 3, 3, 2
    F = rng.integers(0, d, (t, n))
    while True:
        g = rng.integers(0, d, (n, n))
        if round(np.linalg.det(g)) % d:
            break
    M = basis_weight(F, 2, 1, d).matrix
    Mg = basis_weight(F @ g % d, 2, 1, d).matrix
    assert np.array_equal(Mg, g.T @ M @ g % d)


def test_rank_of_tensor_power():
    for n, t in [(2, 3), (3, 2), (4, 4)]:
        out = rank_of_tensor_power(n, t, t, 0, 3)
        assert out["rank"] == out["bound"] == min(n, t)


def test_identity_batch_roundtrip():
    psi = identity_batch(1, 2, 2)
    w = random_word(1, 2, 6, np.random.default_rng(3))
    out = apply_tensor_power(w.inverse(), 2, 0, apply_tensor_power(w, 2, 0, psi))
    assert out.equals(psi)
