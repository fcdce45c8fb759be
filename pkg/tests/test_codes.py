import itertools

import numpy as np
import pytest

from cohqec.codes import (
    SyndromeRecord,
    destabilizers,
    frame_for_syndrome,
    logical_basis_state,
    parse_code_token,
    product_state_init,
    random_codespace_init,
    repetition_code,
    rotated_surface_code,
    syndrome_of,
)
from cohqec.pauli import PauliString, commutes, pauli_mul, weight
from cohqec.statevec import apply_pauli, fidelity


def expectation(state, op):
    return float(np.vdot(state.amplitudes, apply_pauli(state, op).amplitudes).real)


def test_repetition_d3_structure():
    code = repetition_code(3)
    assert [str(s) for s in code.stabilizers] == ["Z1 Z2", "Z2 Z3"]
    assert str(code.logical_x) == "X1 X2 X3"
    assert str(code.logical_z) == "Z1"


def test_repetition_d5():
    code = repetition_code(5)
    assert len(code.stabilizers) == 4
    assert weight(code.logical_x) == 5


@pytest.mark.parametrize("d", [4, 2, 1, -3])
def test_repetition_rejects_bad_distance(d):
    with pytest.raises(ValueError):
        repetition_code(d)


def test_surface_d3_counts():
    code = rotated_surface_code(3)
    assert code.n_qubits == 9
    assert len(code.x_type_indices) == 4
    assert len(code.z_type_indices) == 4
    assert weight(code.logical_x) == 3
    assert weight(code.logical_z) == 3


def test_surface_d3_independent_generators():
    code = rotated_surface_code(3)
    # GF(2) rank of the symplectic representation must equal 8
    rows = []
    for s in code.stabilizers:
        rows.append([(s.x_bits >> q) & 1 for q in range(9)] + [(s.z_bits >> q) & 1 for q in range(9)])
    mat = np.array(rows, dtype=np.uint8)
    rank = 0
    work = mat.copy()
    for col in range(work.shape[1]):
        piv = None
        for r in range(rank, work.shape[0]):
            if work[r, col]:
                piv = r
                break
        if piv is None:
            continue
        work[[rank, piv]] = work[[piv, rank]]
        for r in range(work.shape[0]):
            if r != rank and work[r, col]:
                work[r] ^= work[rank]
        rank += 1
    assert rank == 8


def test_surface_d3_distance_exhaustive():
    # no Pauli of weight <= 2 commutes with every stabilizer while acting on the logicals
    code = rotated_surface_code(3)
    n = code.n_qubits
    for w in (1, 2):
        for support in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                x = z = 0
                for q, letter in zip(support, letters):
                    if letter in "XY":
                        x |= 1 << q
                    if letter in "ZY":
                        z |= 1 << q
                p = PauliString(n, x, z)
                if all(commutes(p, s) for s in code.stabilizers):
                    assert commutes(p, code.logical_x) and commutes(p, code.logical_z)


def test_surface_d5_construction_commutes():
    code = rotated_surface_code(5, allow_large=True)
    assert code.n_qubits == 25
    assert len(code.x_type_indices) == 12 and len(code.z_type_indices) == 12
    with pytest.raises(ValueError):
        rotated_surface_code(5)


def test_parse_code_token():
    assert parse_code_token("rep:5").n_qubits == 5
    assert parse_code_token("surface:3").n_qubits == 9
    for bad in ("rep", "rep:abc", "steane:7", "surface:4"):
        with pytest.raises(ValueError):
            parse_code_token(bad)


def test_repetition_basis_states():
    code = repetition_code(3)
    zero = logical_basis_state(code, "zero")
    assert np.allclose(zero.amplitudes[0], 1.0)
    plus = logical_basis_state(code, "plus")
    want = np.zeros(8)
    want[0] = want[7] = 1 / np.sqrt(2)
    assert np.allclose(plus.amplitudes, want)


def test_surface_basis_state_expectations():
    code = rotated_surface_code(3)
    zero = logical_basis_state(code, "zero")
    for s in code.stabilizers:
        assert expectation(zero, s) == pytest.approx(1.0, abs=1e-10)
    assert expectation(zero, code.logical_z) == pytest.approx(1.0, abs=1e-10)
    plus = logical_basis_state(code, "plus")
    for s in code.stabilizers:
        assert expectation(plus, s) == pytest.approx(1.0, abs=1e-10)
    assert expectation(plus, code.logical_x) == pytest.approx(1.0, abs=1e-10)


def test_syndrome_homomorphism():
    code = rotated_surface_code(3)
    rng = np.random.default_rng(2)
    for _ in range(100):
        a = PauliString(9, int(rng.integers(0, 512)), int(rng.integers(0, 512)))
        b = PauliString(9, int(rng.integers(0, 512)), int(rng.integers(0, 512)))
        sa, sb = syndrome_of(code, a), syndrome_of(code, b)
        assert syndrome_of(code, pauli_mul(a, b)) == (sa ^ sb)


@pytest.mark.parametrize("token", ["rep:3", "rep:5", "surface:3"])
def test_destabilizers_anticommutation_pattern(token):
    code = parse_code_token(token)
    dstabs = destabilizers(code)
    for i, d in enumerate(dstabs):
        for j, s in enumerate(code.stabilizers):
            assert commutes(s, d) == (i != j)


class ZeroRng:
    def integers(self, lo, hi, size):
        return np.zeros(size, dtype=np.int64)


def test_random_init_forced_zero():
    code = repetition_code(3)
    state, syndrome, frame = random_codespace_init(code, "zero", ZeroRng())
    assert syndrome.is_trivial and frame.is_identity
    assert fidelity(state, logical_basis_state(code, "zero")) == pytest.approx(1.0)


@pytest.mark.parametrize("token,which", [("rep:3", "zero"), ("surface:3", "plus")])
def test_random_init_consistency(token, which):
    code = parse_code_token(token)
    rng = np.random.default_rng(9)
    for _ in range(20):
        state, syndrome, frame = random_codespace_init(code, which, rng)
        assert syndrome_of(code, frame) == syndrome
        for s, bit in zip(code.stabilizers, syndrome.bits):
            assert expectation(state, s) == pytest.approx(1.0 - 2.0 * bit, abs=1e-10)
        framed = apply_pauli(logical_basis_state(code, which), frame)
        assert fidelity(state, framed) == pytest.approx(1.0, abs=1e-10)


def test_random_init_uniform_syndromes():
    code = repetition_code(3)
    rng = np.random.default_rng(123)
    counts = np.zeros(4)
    n_draws = 10_000
    for _ in range(n_draws):
        _, syndrome, _ = random_codespace_init(code, "zero", rng)
        counts[syndrome.as_int()] += 1
    freq = counts / n_draws
    sigma = np.sqrt(0.25 * 0.75 / n_draws)
    assert np.all(np.abs(freq - 0.25) < 5 * sigma)


@pytest.mark.parametrize("token,which", [("rep:3", "zero"), ("surface:3", "zero"), ("rep:3", "plus")])
def test_product_state_init_matches_frame_distribution(token, which):
    code = parse_code_token(token)
    rng = np.random.default_rng(77)
    m = len(code.stabilizers)
    n_draws = 4000 if code.n_qubits <= 3 else 1500
    counts = np.zeros(1 << m)
    for _ in range(n_draws):
        state, syndrome, frame = product_state_init(code, which, rng)
        counts[syndrome.as_int()] += 1
        assert syndrome_of(code, frame) == syndrome
        framed = apply_pauli(logical_basis_state(code, which), frame)
        assert fidelity(state, framed) == pytest.approx(1.0, abs=1e-9)
    # syndromes uniform over all 2^m sectors, matching the frame method
    freq = counts / n_draws
    expected = 1.0 / (1 << m)
    sigma = np.sqrt(expected * (1 - expected) / n_draws)
    assert np.all(np.abs(freq - expected) < 6 * sigma)


def test_frame_for_syndrome_roundtrip():
    code = rotated_surface_code(3)
    rng = np.random.default_rng(4)
    for _ in range(20):
        bits = tuple(int(b) for b in rng.integers(0, 2, size=8))
        frame = frame_for_syndrome(code, bits)
        assert syndrome_of(code, frame) == SyndromeRecord(bits)
