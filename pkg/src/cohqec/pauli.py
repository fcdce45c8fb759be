"""Exact n-qubit Pauli operator algebra on a symplectic bit representation.

A Pauli operator is stored as two bit masks (one X bit and one Z bit per
qubit) together with a phase that is a power of i.  The operator encoded by
``PauliString(n, x, z, k)`` is

    i**k * (sigma_1 tensor sigma_2 tensor ... tensor sigma_n)

where sigma_q is I, X, Y or Z according to the (x, z) bits of qubit q.
Qubit q corresponds to bit q of the masks (qubit 0 is the least significant
bit, matching the amplitude ordering of the state-vector engine).

Phase convention: X * Z = -i Y on a single qubit.  The symplectic form makes
commutation checks and syndrome extraction O(n) bit operations.
"""

from __future__ import annotations

from dataclasses import dataclass

PHASES = (1, 1j, -1, -1j)

_LETTERS = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_PHASE_PREFIX = {0: "", 1: "i ", 2: "- ", 3: "-i "}


@dataclass(frozen=True)
class PauliString:
    """Immutable n-qubit Pauli operator with a 4-valued phase."""

    n_qubits: int
    x_bits: int
    z_bits: int
    phase_pow: int = 0  # operator = i**phase_pow * (letter tensor product)

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("need at least one qubit")
        full = (1 << self.n_qubits) - 1
        if not (0 <= self.x_bits <= full and 0 <= self.z_bits <= full):
            raise ValueError("bit mask out of range for %d qubits" % self.n_qubits)
        object.__setattr__(self, "phase_pow", self.phase_pow % 4)

    @property
    def phase(self) -> complex:
        return PHASES[self.phase_pow]

    @property
    def is_hermitian(self) -> bool:
        return self.phase_pow in (0, 2)

    @property
    def is_identity(self) -> bool:
        return self.x_bits == 0 and self.z_bits == 0

    def letter(self, q: int) -> str:
        return _LETTERS[(self.x_bits >> q) & 1, (self.z_bits >> q) & 1]

    def __str__(self) -> str:
        # "X1 Z3 Y4"-style rendering, qubits 1-indexed; bare identity is "I".
        terms = [
            f"{self.letter(q)}{q + 1}"
            for q in range(self.n_qubits)
            if (self.x_bits | self.z_bits) >> q & 1
        ]
        body = " ".join(terms) if terms else "I"
        return _PHASE_PREFIX[self.phase_pow] + body

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_mul(self, other)


def identity(n_qubits: int) -> PauliString:
    return PauliString(n_qubits, 0, 0)


def x_on(n_qubits: int, qubits) -> PauliString:
    """X on the given 0-indexed qubits, identity elsewhere."""
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return PauliString(n_qubits, mask, 0)


def z_on(n_qubits: int, qubits) -> PauliString:
    mask = 0
    for q in qubits:
        mask |= 1 << q
    return PauliString(n_qubits, 0, mask)


def from_letters(letters: str) -> PauliString:
    """Build from a letter string, qubit 1 first: "XIZ" = X1 Z3."""
    x = z = 0
    for q, ch in enumerate(letters.upper()):
        if ch == "X":
            x |= 1 << q
        elif ch == "Z":
            z |= 1 << q
        elif ch == "Y":
            x |= 1 << q
            z |= 1 << q
        elif ch != "I":
            raise ValueError(f"unknown Pauli letter {ch!r}")
    return PauliString(len(letters), x, z)


def _check_sizes(a: PauliString, b: PauliString) -> None:
    if a.n_qubits != b.n_qubits:
        raise ValueError(
            f"size mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )


def pauli_mul(a: PauliString, b: PauliString) -> PauliString:
    """Operator product a*b with exact phase (convention X*Z = -iY).

    Derivation: writing each factor as i**k * i**|x&z| * X^x Z^z and using
    Z^z X^x = (-1)^{z.x} X^x Z^z gives the phase exponent below.
    """
    _check_sizes(a, b)
    x = a.x_bits ^ b.x_bits
    z = a.z_bits ^ b.z_bits
    k = (
        a.phase_pow
        + b.phase_pow
        + (a.x_bits & a.z_bits).bit_count()
        + (b.x_bits & b.z_bits).bit_count()
        + 2 * (a.z_bits & b.x_bits).bit_count()
        - (x & z).bit_count()
    )
    return PauliString(a.n_qubits, x, z, k % 4)


def commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the symplectic inner product of a and b is even."""
    _check_sizes(a, b)
    overlap = (a.x_bits & b.z_bits).bit_count() + (a.z_bits & b.x_bits).bit_count()
    return overlap % 2 == 0


def weight(a: PauliString) -> int:
    """Number of qubits acted on non-trivially."""
    return (a.x_bits | a.z_bits).bit_count()
