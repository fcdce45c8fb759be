"""Minimum-weight lookup decoding and malignant-set combinatorics.

A lookup decoder for one error axis maps every syndrome of the detecting
stabilizer subset (Z-type generators detect X errors and vice versa) to a
minimum-weight single-axis correction.  Ties between equal-weight corrections
are broken lexicographically by sorted qubit support, and that choice is
surfaced in output metadata because the malignant-set counts of the surface
code depend on it.

A qubit set is malignant when an axis-error on exactly that set, followed by
decode-and-correct, composes to a nontrivial logical operator.  The counts
exposed here are the lowest-weight malignant-set count and the number of
distinct proper subsets of lowest-weight malignant sets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .codes import StabilizerCode, SyndromeRecord
from .pauli import PauliString, commutes

MAX_TABLE_STABILIZERS = 20
MAX_ENUM_QUBITS = 25
MAX_ENUM_DISTANCE = 7

TIE_BREAK_RULE = "lexicographic-by-qubit-support"


@dataclass(frozen=True)
class LookupDecoder:
    """Complete syndrome table for one error axis of one code."""

    code: StabilizerCode
    axis: str  # which error type this decoder corrects: "x" or "z"
    syndrome_indices: tuple[int, ...]  # generator indices forming the table key
    table: tuple[int, ...]  # correction qubit-mask per syndrome key
    tie_break: str = TIE_BREAK_RULE

    @property
    def n_syndrome_bits(self) -> int:
        return len(self.syndrome_indices)

    def correction_mask(self, key: int) -> int:
        return self.table[key]

    def correction(self, key: int) -> PauliString:
        mask = self.table[key]
        if self.axis == "x":
            return PauliString(self.code.n_qubits, mask, 0)
        return PauliString(self.code.n_qubits, 0, mask)


def _detector_masks(code: StabilizerCode, axis: str) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(generator indices, per-generator masks) detecting errors of the axis."""
    if axis == "x":
        idx = code.z_type_indices
        masks = tuple(code.stabilizers[i].z_bits for i in idx)
    elif axis == "z":
        idx = code.x_type_indices
        masks = tuple(code.stabilizers[i].x_bits for i in idx)
    else:
        raise ValueError(f"axis must be 'x' or 'z', got {axis!r}")
    return idx, masks


def _syndrome_key(masks, error_mask: int) -> int:
    key = 0
    for i, m in enumerate(masks):
        key |= ((m & error_mask).bit_count() & 1) << i
    return key


def build_lookup_decoder(code: StabilizerCode, axis: str) -> LookupDecoder:
    """Fill the complete table by enumerating errors in increasing weight.

    Within a weight class, ``itertools.combinations`` yields supports in
    lexicographic order, so the first correction stored for a syndrome is the
    lexicographically smallest among minimum-weight candidates.
    """
    idx, masks = _detector_masks(code, axis)
    m = len(idx)
    if m > MAX_TABLE_STABILIZERS:
        raise ValueError(f"table over {m} stabilizers exceeds the size cap")
    n = code.n_qubits
    table: list = [None] * (1 << m)
    remaining = 1 << m
    for w in range(n + 1):
        if remaining == 0:
            break
        for support in itertools.combinations(range(n), w):
            mask = 0
            for q in support:
                mask |= 1 << q
            key = _syndrome_key(masks, mask)
            if table[key] is None:
                table[key] = mask
                remaining -= 1
                if remaining == 0:
                    break
    if remaining:
        raise RuntimeError("syndrome table could not be completed")
    return LookupDecoder(code, axis, idx, tuple(table))


def decode(decoder: LookupDecoder, syndrome: SyndromeRecord) -> PauliString:
    """Look up the stored minimum-weight correction for a restricted syndrome."""
    if len(syndrome) != decoder.n_syndrome_bits:
        raise ValueError(
            f"syndrome has {len(syndrome)} bits, decoder expects {decoder.n_syndrome_bits}"
        )
    return decoder.correction(syndrome.as_int())


@dataclass(frozen=True)
class MalignantCounts:
    """Lowest-weight malignant sets and their distinct proper subsets."""

    a_d: int
    b_d: int
    malignant_sets: tuple[tuple[int, ...], ...]


def enumerate_malignant_sets(
    code: StabilizerCode, decoder: LookupDecoder, axis: str
) -> MalignantCounts:
    """Count size-(d+1)/2 qubit sets whose decoded correction completes a logical.

    Malignancy is operational: error times correction anticommutes with the
    conjugate logical operator (logical Z for X errors and vice versa).
    """
    if axis != decoder.axis:
        raise ValueError("decoder axis does not match requested axis")
    n, d = code.n_qubits, code.distance
    if n > MAX_ENUM_QUBITS or d > MAX_ENUM_DISTANCE:
        raise ValueError("enumeration cap exceeded")
    _, masks = _detector_masks(code, axis)
    conjugate = code.logical_z if axis == "x" else code.logical_x
    size = (d + 1) // 2
    malignant = []
    for support in itertools.combinations(range(n), size):
        mask = 0
        for q in support:
            mask |= 1 << q
        residual = mask ^ decoder.correction_mask(_syndrome_key(masks, mask))
        err = (
            PauliString(n, residual, 0) if axis == "x" else PauliString(n, 0, residual)
        )
        if not commutes(err, conjugate):
            malignant.append(support)
    subsets = set()
    for support in malignant:
        for k in range(size):
            subsets.update(itertools.combinations(support, k))
    return MalignantCounts(len(malignant), len(subsets), tuple(malignant))
