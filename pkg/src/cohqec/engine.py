"""QEC cycle loop: noise, syndrome extraction, active or passive correction.

One cycle applies the sampled discrete flips, then the sampled axis
rotations, measures every stabilizer projectively (all Z-type generators
first, then all X-type, in construction order), decodes the syndrome
*relative* to the Pauli frame, and either applies the correction physically
(active) or folds it into the frame (passive).

``qec_cycle`` is the single-trajectory reference semantics.  Monte Carlo
throughput comes from ``run_trajectories``, a vectorized evaluation of the
same cycle map over a batch of trajectories; the two are kept interchangeable
(see tests) by the shared randomness discipline:

    generator(trial) = Philox(key=(seed, trial))      counter-based, portable
    draw order       = init bits | noise blocks in model order | measurement
                       uniforms, one per measurement in stabilizer-list order

Frame phases are irrelevant to failure probabilities (they cancel in the
squared overlap), so the batched path tracks frames as bit masks only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .codes import (
    StabilizerCode,
    SyndromeRecord,
    destabilizers,
    logical_basis_state,
    syndrome_of,
)
from .decoder import LookupDecoder, build_lookup_decoder, decode
from .noise import NoiseModel, NoiseSample, draw_trajectory_noise
from .pauli import PauliString, pauli_mul
from .statevec import (
    StateVector,
    apply_axis_rotations,
    apply_pauli,
    apply_pauli_array,
    bit_parity,
    fidelity,
    measure_stabilizer,
    pauli_sign_perm,
)

ACTIVE = "active"
PASSIVE = "passive"
STRATEGIES = (ACTIVE, PASSIVE)

INITS = ("zero", "random")
REFERENCES = ("zero", "plus")

ALPHA_MAX_QUBITS = 13


@dataclass(frozen=True)
class PauliFrame:
    """Accumulated virtual correction and the syndrome it imprints."""

    frame: PauliString
    expected_syndrome: SyndromeRecord

    @classmethod
    def identity(cls, code: StabilizerCode) -> "PauliFrame":
        from .pauli import identity

        return cls(identity(code.n_qubits), SyndromeRecord((0,) * len(code.stabilizers)))


@dataclass(frozen=True)
class DecoderPair:
    x: LookupDecoder
    z: LookupDecoder


def build_decoders(code: StabilizerCode) -> DecoderPair:
    return DecoderPair(build_lookup_decoder(code, "x"), build_lookup_decoder(code, "z"))


def measurement_order(code: StabilizerCode) -> tuple[int, ...]:
    """Z-type generators first, then X-type, each in construction order."""
    return tuple(code.z_type_indices) + tuple(code.x_type_indices)


def _restricted(syndrome: SyndromeRecord, indices) -> SyndromeRecord:
    return SyndromeRecord(tuple(syndrome.bits[i] for i in indices))


def qec_cycle(
    state: StateVector,
    frame: PauliFrame,
    code: StabilizerCode,
    decoders: DecoderPair,
    sample: NoiseSample,
    strategy: str,
    rng,
):
    """One noise + syndrome-extraction + correction cycle.

    Returns (state, frame, observed syndrome).  The observed syndrome is in
    generator order; measurement itself proceeds Z-type first.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    n = code.n_qubits
    x_mask = sum(1 << q for q in range(n) if sample.x_flips[q])
    z_mask = sum(1 << q for q in range(n) if sample.z_flips[q])
    if x_mask:
        state = apply_pauli(state, PauliString(n, x_mask, 0))
    if z_mask:
        state = apply_pauli(state, PauliString(n, 0, z_mask))
    if np.any(sample.x_angles):
        state = apply_axis_rotations(state, "x", sample.x_angles)
    if np.any(sample.z_angles):
        state = apply_axis_rotations(state, "z", sample.z_angles)

    bits = [0] * len(code.stabilizers)
    for i in measurement_order(code):
        outcome, state, _ = measure_stabilizer(state, code.stabilizers[i], rng)
        bits[i] = 0 if outcome == 1 else 1
    observed = SyndromeRecord(tuple(bits))

    relative = observed ^ frame.expected_syndrome
    corr_x = decode(decoders.x, _restricted(relative, decoders.x.syndrome_indices))
    corr_z = decode(decoders.z, _restricted(relative, decoders.z.syndrome_indices))
    correction = pauli_mul(corr_x, corr_z)
    if strategy == ACTIVE:
        if not correction.is_identity:
            state = apply_pauli(state, correction)
    else:
        frame = PauliFrame(
            pauli_mul(correction, frame.frame),
            frame.expected_syndrome ^ syndrome_of(code, correction),
        )
    return state, frame, observed


def logical_failure(state: StateVector, frame: PauliFrame, reference: StateVector) -> float:
    """1 - |<reference| frame^dagger |state>|^2, i.e. infidelity in the frame."""
    return 1.0 - fidelity(state, apply_pauli(reference, frame.frame))


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox keyed by (seed, trial)."""
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial index must be nonnegative")
    key = np.array([seed, trial], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


class _CodeTables:
    """Per-code precomputation shared by all batched trajectories."""

    def __init__(self, code: StabilizerCode, decoders: DecoderPair):
        n = code.n_qubits
        self.code = code
        self.n = n
        self.dim = 1 << n
        self.j = np.arange(self.dim, dtype=np.int64)
        self.meas_order = measurement_order(code)
        self.stab_perm = []
        self.stab_coef = []
        self.stab_diagonal = []  # pure-Z generators need no index permutation
        for i in self.meas_order:
            perm, coef = pauli_sign_perm(n, code.stabilizers[i])
            self.stab_perm.append(perm)
            self.stab_coef.append(coef.real.copy())  # CSS generators are real
            self.stab_diagonal.append(code.stabilizers[i].x_bits == 0)
        # positions of each decoder's key bits inside the measured bit vector
        pos = {gen_idx: k for k, gen_idx in enumerate(self.meas_order)}
        self.key_pos_x = np.array([pos[i] for i in decoders.x.syndrome_indices], dtype=np.int64)
        self.key_pos_z = np.array([pos[i] for i in decoders.z.syndrome_indices], dtype=np.int64)
        self.table_x = np.array(decoders.x.table, dtype=np.int64)
        self.table_z = np.array(decoders.z.table, dtype=np.int64)
        self.destab_x = np.array([d.x_bits for d in destabilizers(code)], dtype=np.int64)
        self.destab_z = np.array([d.z_bits for d in destabilizers(code)], dtype=np.int64)
        self.stab_xbits = np.array([s.x_bits for s in code.stabilizers], dtype=np.int64)
        self.stab_zbits = np.array([s.z_bits for s in code.stabilizers], dtype=np.int64)


def _apply_xmask_rows(psi: np.ndarray, j: np.ndarray, masks: np.ndarray) -> np.ndarray:
    perm = j[None, :] ^ masks[:, None]
    return np.take_along_axis(psi, perm, axis=1)


def _apply_zmask_rows(psi: np.ndarray, j: np.ndarray, masks: np.ndarray) -> np.ndarray:
    signs = 1.0 - 2.0 * bit_parity(j[None, :] & masks[:, None])
    return psi * signs


def _rotate_rows(psi: np.ndarray, n: int, axis: str, angles: np.ndarray) -> np.ndarray:
    """angles: (B, n); psi: (B, 2**n), mutated in place (must be contiguous)."""
    b = psi.shape[0]
    for q in range(n):
        theta = angles[:, q]
        hi, lo = 1 << (n - 1 - q), 1 << q
        view = psi.reshape(b, hi, 2, lo)
        a0 = view[:, :, 0, :]
        a1 = view[:, :, 1, :]
        if axis == "x":
            c = np.cos(theta)[:, None, None]
            s = np.sin(theta)[:, None, None]
            n0 = np.multiply(s, a1)
            n0 *= -1j
            n0 += c * a0
            n1 = np.multiply(s, a0)
            n1 *= -1j
            n1 += c * a1
            view[:, :, 0, :] = n0
            view[:, :, 1, :] = n1
        else:
            ph = np.exp(-1j * theta)[:, None, None]
            a1 *= np.conj(ph)
            a0 *= ph
    return psi


def _frame_overlap_sq(
    psi: np.ndarray, ref: np.ndarray, j: np.ndarray, fx: np.ndarray, fz: np.ndarray
) -> np.ndarray:
    """|<F ref|psi>|^2 per row for frames F = X^fx Z^fz (phases drop out)."""
    if not (fx.any() or fz.any()):
        return np.abs(psi @ np.conj(ref)) ** 2
    jf = j[None, :] ^ fx[:, None]
    fref = ref[jf] * (1.0 - 2.0 * bit_parity(jf & fz[:, None]))
    overlap = np.einsum("bj,bj->b", np.conj(fref), psi)
    return np.abs(overlap) ** 2


def _syndrome_bits_of_masks(tables: _CodeTables, fx: np.ndarray, fz: np.ndarray) -> np.ndarray:
    """Syndrome bits (B, m) in measurement order for Pauli masks (fx, fz)."""
    out = np.empty((fx.shape[0], len(tables.meas_order)), dtype=np.uint8)
    for k, i in enumerate(tables.meas_order):
        zb = tables.stab_zbits[i]
        xb = tables.stab_xbits[i]
        out[:, k] = bit_parity(fx & zb) ^ bit_parity(fz & xb)
    return out


def run_trajectories(
    code: StabilizerCode,
    model: NoiseModel,
    strategy: str,
    init: str,
    reference_kind: str,
    n_cycles: int,
    seed: int,
    trials,
    decoders: Optional[DecoderPair] = None,
) -> np.ndarray:
    """Per-cycle logical failure for a batch of trial indices.

    Returns shape (len(trials), n_cycles).  Each trial owns an independent
    Philox stream, so the result for a trial does not depend on how trials
    are grouped into batches.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    if init not in INITS:
        raise ValueError(f"init must be one of {INITS}")
    if reference_kind not in REFERENCES:
        raise ValueError(f"reference must be one of {REFERENCES}")
    if n_cycles < 1:
        raise ValueError("need at least one cycle")
    if decoders is None:
        decoders = build_decoders(code)
    tables = _CodeTables(code, decoders)
    n, dim, j = tables.n, tables.dim, tables.j
    m = len(tables.meas_order)
    trials = list(trials)
    batch = len(trials)
    ref = logical_basis_state(code, reference_kind).amplitudes

    gens = [trial_generator(seed, t) for t in trials]
    if init == "random":
        init_bits = np.stack([g.integers(0, 2, size=m) for g in gens]).astype(np.uint8)
    blocks = [draw_trajectory_noise(model, n, n_cycles, g) for g in gens]
    meas_u = np.stack([g.random((n_cycles, m)) for g in gens])

    def stack_angles(attr):
        parts = [getattr(b, attr) for b in blocks]
        return None if parts[0] is None else np.stack(parts)

    x_ang = stack_angles("x_angles")
    z_ang = stack_angles("z_angles")
    x_flip = np.stack([b.x_flip_masks for b in blocks])  # (B, cycles)
    z_flip = np.stack([b.z_flip_masks for b in blocks])

    psi = np.tile(ref, (batch, 1))
    fx = np.zeros(batch, dtype=np.int64)
    fz = np.zeros(batch, dtype=np.int64)
    if init == "random":
        # frame = product of destabilizers selected by the drawn syndrome bits
        for i in range(m):
            sel = init_bits[:, i].astype(bool)
            fx[sel] ^= tables.destab_x[i]
            fz[sel] ^= tables.destab_z[i]
        psi = _apply_xmask_rows(psi, j, fx)
        psi = _apply_zmask_rows(psi, j, fz)
    expected = _syndrome_bits_of_masks(tables, fx, fz)

    failures = np.empty((batch, n_cycles))
    for c in range(n_cycles):
        xm = x_flip[:, c]
        if xm.any():
            psi = _apply_xmask_rows(psi, j, xm)
        zm = z_flip[:, c]
        if zm.any():
            psi = _apply_zmask_rows(psi, j, zm)
        if x_ang is not None:
            psi = _rotate_rows(np.ascontiguousarray(psi), n, "x", x_ang[:, c])
        if z_ang is not None:
            psi = _rotate_rows(np.ascontiguousarray(psi), n, "z", z_ang[:, c])

        bits = np.empty((batch, m), dtype=np.uint8)
        for k in range(m):
            s_psi = tables.stab_coef[k] * psi
            if not tables.stab_diagonal[k]:
                s_psi = s_psi[:, tables.stab_perm[k]]
            v = 0.5 * (psi + s_psi)
            p_plus = np.einsum("bj,bj->b", v, np.conj(v)).real
            plus = meas_u[:, c, k] < p_plus
            prob = np.where(plus, p_plus, 1.0 - p_plus)
            if prob.min() < 1e-14:
                raise RuntimeError("sampled measurement branch has vanishing norm")
            psi = np.where(plus[:, None], v, psi - v)
            psi /= np.sqrt(prob)[:, None]
            bits[:, k] = ~plus

        relative = bits ^ expected
        key_x = np.zeros(batch, dtype=np.int64)
        for i, pos in enumerate(tables.key_pos_x):
            key_x |= relative[:, pos].astype(np.int64) << i
        key_z = np.zeros(batch, dtype=np.int64)
        for i, pos in enumerate(tables.key_pos_z):
            key_z |= relative[:, pos].astype(np.int64) << i
        corr_x = tables.table_x[key_x]
        corr_z = tables.table_z[key_z]

        if strategy == ACTIVE:
            if corr_x.any():
                psi = _apply_xmask_rows(psi, j, corr_x)
            if corr_z.any():
                psi = _apply_zmask_rows(psi, j, corr_z)
        else:
            fx ^= corr_x
            fz ^= corr_z
            expected = bits.copy()

        failures[:, c] = 1.0 - _frame_overlap_sq(psi, ref, j, fx, fz)
    return np.clip(failures, 0.0, 1.0)


def run_trajectory(
    code: StabilizerCode,
    model: NoiseModel,
    strategy: str,
    init: str,
    reference_kind: str,
    n_cycles: int,
    seed: int,
    trial: int = 0,
    decoders: Optional[DecoderPair] = None,
) -> np.ndarray:
    """Per-cycle logical failure of a single trajectory (deterministic in seed/trial)."""
    return run_trajectories(
        code, model, strategy, init, reference_kind, n_cycles, seed, [trial], decoders
    )[0]


@dataclass(frozen=True)
class AlphaEntry:
    syndrome: SyndromeRecord
    probability: float
    alpha: Optional[complex]  # None when the branch is degenerate


@dataclass(frozen=True)
class AlphaDistribution:
    """Per-syndrome branch probability and post-correction logical amplitude ratio.

    alpha is the ratio (amplitude of logical-flipped reference) / (amplitude
    of reference) in the decoded branch; as a ratio it is independent of the
    branch's global phase (equivalently, the reference amplitude is taken
    real-positive).  With strongly unequal per-qubit angles a branch can have
    |alpha| > 1 (the decoded correction lands on the wrong side of the coset);
    the unclipped second moment is then dominated by those branches and is a
    leading-order object only for shared or near-equal angles.
    """

    entries: tuple[AlphaEntry, ...]

    def __post_init__(self):
        total = sum(e.probability for e in self.entries)
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"branch probabilities sum to {total}, not 1")

    def moment_abs2(self) -> float:
        return sum(e.probability * abs(e.alpha) ** 2 for e in self.entries if e.alpha is not None)

    def moment_abs(self) -> float:
        return sum(e.probability * abs(e.alpha) for e in self.entries if e.alpha is not None)

    def mean(self) -> complex:
        return sum(e.probability * e.alpha for e in self.entries if e.alpha is not None)


def exact_alpha_distribution(code: StabilizerCode, axis: str, angles) -> AlphaDistribution:
    """Exhaustive syndrome-branch analysis of one noisy cycle.

    Applies the exact rotation unitary to the logical reference, projects onto
    every stabilizer outcome pattern, applies the decoded correction to each
    branch, and reports the branch probability together with alpha.
    """
    n = code.n_qubits
    if n > ALPHA_MAX_QUBITS:
        raise ValueError(f"exhaustive syndrome projection capped at {ALPHA_MAX_QUBITS} qubits")
    angles = np.asarray(angles, dtype=np.float64)
    if angles.ndim == 0:
        angles = np.full(n, float(angles))
    which = "zero" if axis == "x" else "plus"
    ref = logical_basis_state(code, which)
    logical = code.logical_x if axis == "x" else code.logical_z
    dec = build_lookup_decoder(code, axis)
    psi = apply_axis_rotations(ref, axis, angles)
    log_ref = apply_pauli(ref, logical).amplitudes
    sub_pos = {gen: i for i, gen in enumerate(dec.syndrome_indices)}
    m = len(code.stabilizers)
    entries = []
    for pattern in range(1 << m):
        branch = psi.amplitudes
        for i, s in enumerate(code.stabilizers):
            o = -1.0 if (pattern >> i) & 1 else 1.0
            branch = 0.5 * (branch + o * apply_pauli_array(branch, n, s))
        prob = float(np.vdot(branch, branch).real)
        syndrome = SyndromeRecord(tuple((pattern >> i) & 1 for i in range(m)))
        if prob < 1e-14:
            entries.append(AlphaEntry(syndrome, prob, None))
            continue
        key = 0
        for gen, i in sub_pos.items():
            key |= syndrome.bits[gen] << i
        corrected = apply_pauli_array(branch, n, dec.correction(key))
        a_ref = np.vdot(ref.amplitudes, corrected)
        a_log = np.vdot(log_ref, corrected)
        alpha = complex(a_log / a_ref) if abs(a_ref) > 1e-12 else None
        entries.append(AlphaEntry(syndrome, prob, alpha))
    return AlphaDistribution(tuple(entries))


__all__ = [
    "ACTIVE",
    "PASSIVE",
    "STRATEGIES",
    "PauliFrame",
    "DecoderPair",
    "build_decoders",
    "measurement_order",
    "qec_cycle",
    "logical_failure",
    "trial_generator",
    "run_trajectory",
    "run_trajectories",
    "AlphaEntry",
    "AlphaDistribution",
    "exact_alpha_distribution",
]
