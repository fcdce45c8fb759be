"""Stabilizer code constructions and codespace state preparation.

Two code families are provided: the bit-flip repetition code (Z-type
stabilizers Z_i Z_{i+1}) and the rotated surface code.  Stabilizer ordering
is fixed so syndromes are reproducible bit for bit: Z-type generators first,
then X-type, each in construction order.

Surface-code layout (d=3 shown, data qubits row-major over the d x d grid,
qubit numbers 1-indexed):

    1 2 3      Z plaquettes: (1,2,4,5) (5,6,8,9) and halves (4,7) (3,6)
    4 5 6      X plaquettes: (2,3,5,6) (4,5,7,8) and halves (1,2) (8,9)
    7 8 9      logical X = X1 X4 X7 (left column), logical Z = Z1 Z2 Z3 (top row)
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import pauli
from .pauli import PauliString, commutes, pauli_mul
from .statevec import (
    MAX_QUBITS,
    StateVector,
    apply_pauli,
    apply_pauli_array,
    computational_basis,
    fidelity,
    measure_stabilizer,
)


@dataclass(frozen=True)
class SyndromeRecord:
    """Stabilizer measurement pattern; bit 1 means eigenvalue -1."""

    bits: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def __xor__(self, other: "SyndromeRecord") -> "SyndromeRecord":
        if len(self) != len(other):
            raise ValueError("syndrome length mismatch")
        return SyndromeRecord(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def as_int(self) -> int:
        # bit i of the integer is the i-th stabilizer's bit
        return sum(b << i for i, b in enumerate(self.bits))

    @property
    def is_trivial(self) -> bool:
        return not any(self.bits)


@dataclass(frozen=True)
class StabilizerCode:
    """[[n, 1, d]] stabilizer code with fixed generator ordering."""

    name: str
    n_qubits: int
    distance: int
    stabilizers: tuple[PauliString, ...]
    logical_x: PauliString
    logical_z: PauliString
    k_logical: int = 1

    def __post_init__(self):
        n = self.n_qubits
        if len(self.stabilizers) != n - self.k_logical:
            raise ValueError("wrong number of stabilizer generators")
        for i, s in enumerate(self.stabilizers):
            if s.n_qubits != n or s.phase_pow != 0:
                raise ValueError(f"stabilizer {i} malformed")
            for t in self.stabilizers[i + 1:]:
                if not commutes(s, t):
                    raise ValueError("stabilizers do not all commute")
            if not commutes(s, self.logical_x) or not commutes(s, self.logical_z):
                raise ValueError("logicals must commute with all stabilizers")
        if commutes(self.logical_x, self.logical_z):
            raise ValueError("logical X and Z must anticommute")

    @property
    def z_type_indices(self) -> tuple[int, ...]:
        """Generators with only Z components (they detect X errors)."""
        return tuple(i for i, s in enumerate(self.stabilizers) if s.x_bits == 0)

    @property
    def x_type_indices(self) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.stabilizers) if s.z_bits == 0)


def syndrome_of(code: StabilizerCode, p: PauliString) -> SyndromeRecord:
    """Anticommutation pattern of p with the stabilizer generators."""
    return SyndromeRecord(tuple(0 if commutes(s, p) else 1 for s in code.stabilizers))


def repetition_code(d: int) -> StabilizerCode:
    """Distance-d bit-flip repetition code: stabilizers Z_i Z_{i+1}."""
    if d < 3 or d % 2 == 0:
        raise ValueError("repetition code distance must be odd and >= 3")
    stabs = tuple(pauli.z_on(d, (i, i + 1)) for i in range(d - 1))
    return StabilizerCode(
        name=f"rep:{d}",
        n_qubits=d,
        distance=d,
        stabilizers=stabs,
        logical_x=pauli.x_on(d, range(d)),
        logical_z=pauli.z_on(d, (0,)),
    )


def rotated_surface_code(d: int, allow_large: bool = False) -> StabilizerCode:
    """Rotated surface code on d*d data qubits (row-major indexing).

    d=3 is always available; d=5 (25 qubits, 2**25 amplitudes for states)
    only behind allow_large.
    """
    if d == 5 and not allow_large:
        raise ValueError("surface d=5 needs allow_large=True (2**25 amplitudes)")
    if d not in (3, 5):
        raise ValueError("supported surface code distances: 3 (and 5 with allow_large)")
    n = d * d

    def qubit(r, c):
        return r * d + c

    z_cells: list[tuple[int, ...]] = []
    x_cells: list[tuple[int, ...]] = []
    # bulk plaquettes; checkerboard with (r+c) even = Z-type
    for r in range(d - 1):
        for c in range(d - 1):
            cell = (qubit(r, c), qubit(r, c + 1), qubit(r + 1, c), qubit(r + 1, c + 1))
            (z_cells if (r + c) % 2 == 0 else x_cells).append(cell)
    # boundary half-cells continuing the checkerboard:
    # top/bottom carry X-type halves, left/right carry Z-type halves
    for c in range(d - 1):
        if (-1 + c) % 2 == 1:  # top, row -1
            x_cells.append((qubit(0, c), qubit(0, c + 1)))
        if (d - 1 + c) % 2 == 1:  # bottom, row d-1
            x_cells.append((qubit(d - 1, c), qubit(d - 1, c + 1)))
    for r in range(d - 1):
        if (r - 1) % 2 == 0:  # left, column -1
            z_cells.append((qubit(r, 0), qubit(r + 1, 0)))
        if (r + d - 1) % 2 == 0:  # right, column d-1
            z_cells.append((qubit(r, d - 1), qubit(r + 1, d - 1)))
    stabs = tuple(pauli.z_on(n, cell) for cell in z_cells) + tuple(
        pauli.x_on(n, cell) for cell in x_cells
    )
    return StabilizerCode(
        name=f"surface:{d}",
        n_qubits=n,
        distance=d,
        stabilizers=stabs,
        logical_x=pauli.x_on(n, (qubit(r, 0) for r in range(d))),
        logical_z=pauli.z_on(n, (qubit(0, c) for c in range(d))),
    )


def parse_code_token(token: str) -> StabilizerCode:
    """Parse "rep:<d>" or "surface:<d>" selectors."""
    try:
        family, d_str = token.split(":")
        d = int(d_str)
    except ValueError:
        raise ValueError(f"bad code token {token!r}; expected rep:<d> or surface:<d>")
    if family == "rep":
        return repetition_code(d)
    if family == "surface":
        return rotated_surface_code(d)
    raise ValueError(f"unknown code family {family!r}")


def logical_basis_state(code: StabilizerCode, which: str) -> StateVector:
    """Zero-syndrome logical basis state: "zero" (+1 of Z-bar) or "plus" (+1 of X-bar)."""
    if code.n_qubits > MAX_QUBITS:
        raise ValueError("state exceeds memory cap")
    if which not in ("zero", "plus"):
        raise ValueError(f"unknown basis state {which!r}")
    amps = computational_basis(code.n_qubits).amplitudes
    # |0...0> satisfies every Z-type generator; project the X-type ones
    for s in code.stabilizers:
        amps = 0.5 * (amps + apply_pauli_array(amps, code.n_qubits, s))
    if which == "plus":
        amps = amps + apply_pauli_array(amps, code.n_qubits, code.logical_x)
    norm = np.linalg.norm(amps)
    if norm < 1e-12:
        raise RuntimeError("codespace projection annihilated the seed state")
    return StateVector(code.n_qubits, amps / norm)


def _gf2_solve_rows(mat: np.ndarray) -> np.ndarray:
    """Particular solutions of mat @ x = e_i over GF(2) for each row index i.

    mat is (m, w) with full row rank.  Returns (m, w) where row i solves for
    the i-th unit vector.
    """
    m, w = mat.shape
    red = mat.copy() % 2
    ops = np.eye(m, dtype=np.uint8)  # tracks row operations: red = ops @ mat
    pivots = []
    row = 0
    for col in range(w):
        hit = None
        for r in range(row, m):
            if red[r, col]:
                hit = r
                break
        if hit is None:
            continue
        if hit != row:
            red[[row, hit]] = red[[hit, row]]
            ops[[row, hit]] = ops[[hit, row]]
        for r in range(m):
            if r != row and red[r, col]:
                red[r] ^= red[row]
                ops[r] ^= ops[row]
        pivots.append(col)
        row += 1
        if row == m:
            break
    if row < m:
        raise ValueError("stabilizer generators are not independent")
    sols = np.zeros((m, w), dtype=np.uint8)
    for i in range(m):
        # x supported on pivot columns with values ops @ e_i
        for j, col in enumerate(pivots):
            sols[i, col] = ops[j, i]
    return sols


@functools.lru_cache(maxsize=None)
def destabilizers(code: StabilizerCode) -> tuple[PauliString, ...]:
    """One Pauli per generator that anticommutes with it and commutes with the rest.

    Products of these realize every syndrome exactly once, which is how random
    codespace frames are drawn.
    """
    n = code.n_qubits
    m = len(code.stabilizers)
    # symplectic product of stabilizer (xs, zs) with error (xe, ze):
    #   parity(zs & xe) + parity(xs & ze)
    mat = np.zeros((m, 2 * n), dtype=np.uint8)
    for i, s in enumerate(code.stabilizers):
        for q in range(n):
            mat[i, q] = (s.z_bits >> q) & 1          # acts on error x bits
            mat[i, n + q] = (s.x_bits >> q) & 1      # acts on error z bits
    sols = _gf2_solve_rows(mat)
    out = []
    for i in range(m):
        x_mask = sum(int(sols[i, q]) << q for q in range(n))
        z_mask = sum(int(sols[i, n + q]) << q for q in range(n))
        out.append(PauliString(n, x_mask, z_mask))
    return tuple(out)


def frame_for_syndrome(code: StabilizerCode, bits) -> PauliString:
    """Canonical Pauli whose syndrome equals the given bit pattern."""
    frame = pauli.identity(code.n_qubits)
    for b, dstab in zip(bits, destabilizers(code)):
        if b:
            frame = pauli_mul(frame, dstab)
    return frame


def random_codespace_init(code: StabilizerCode, which: str, rng):
    """Prepare a logical basis state in a uniformly random syndrome sector.

    Returns (state, syndrome, frame) with state = frame applied to the
    zero-syndrome ``logical_basis_state`` (up to global phase), so fidelity
    bookkeeping against the reference stays exact.  Consumes one bit per
    stabilizer generator from rng.
    """
    bits = tuple(int(b) for b in rng.integers(0, 2, size=len(code.stabilizers)))
    frame = frame_for_syndrome(code, bits)
    state = apply_pauli(logical_basis_state(code, which), frame)
    return state, SyndromeRecord(bits), frame


def product_state_init(code: StabilizerCode, which: str, rng):
    """Random-product-state preparation: alternative path to a random codespace.

    Qubits start in random |0>/|1> (for "zero") or |+>/|-> (for "plus")
    product states; measuring every stabilizer collapses into a random
    syndrome sector.  The recovered frame accounts for any logical content of
    the initial bits.  Consumes n bits plus one uniform per stabilizer.
    """
    n = code.n_qubits
    bits = rng.integers(0, 2, size=n)
    mask = sum(int(b) << q for q, b in enumerate(bits))
    if which == "zero":
        state = computational_basis(n, mask)
    elif which == "plus":
        j = np.arange(1 << n, dtype=np.int64)
        signs = 1.0 - 2.0 * ((np.bitwise_count(j & mask) & 1).astype(np.float64))
        state = StateVector(n, signs.astype(np.complex128) / np.sqrt(1 << n))
    else:
        raise ValueError(f"unknown basis state {which!r}")
    outcome_bits = []
    for s in code.stabilizers:
        outcome, state, _ = measure_stabilizer(state, s, rng)
        outcome_bits.append(0 if outcome == 1 else 1)
    syndrome = SyndromeRecord(tuple(outcome_bits))
    base = frame_for_syndrome(code, syndrome.bits)
    reference = logical_basis_state(code, which)
    logical = code.logical_x if which == "zero" else code.logical_z
    frame = base
    if fidelity(state, apply_pauli(reference, frame)) < 0.5:
        frame = pauli_mul(base, logical)
    if fidelity(state, apply_pauli(reference, frame)) < 1.0 - 1e-9:
        raise RuntimeError("collapsed product state is not a framed logical state")
    return state, syndrome, frame
