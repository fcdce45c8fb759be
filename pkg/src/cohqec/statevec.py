"""Dense complex state-vector engine.

Amplitude ordering: basis index j encodes the computational state with qubit
q held in bit q of j (qubit 0 = least significant bit).  All operations are
exact unitaries; rotations use cos/sin, never a linearized form, so the
engine serves as ground truth for perturbative predictions.

The array-level helpers accept amplitudes with arbitrary leading batch axes
(the basis index is always the last axis); the public ``StateVector`` API
wraps single 1-D states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString

MAX_QUBITS = 25  # 2**25 amplitudes, the default memory cap

NORM_TOL = 1e-10
BRANCH_TOL = 1e-14


class MeasurementBranchError(RuntimeError):
    """Sampled measurement branch has numerically vanishing norm."""


@dataclass
class StateVector:
    """Normalized pure state of n qubits as 2**n complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not (1 <= self.n_qubits <= MAX_QUBITS):
            raise ValueError(f"n_qubits must be in [1, {MAX_QUBITS}]")
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n_qubits,):
            raise ValueError("amplitude vector has wrong length")
        self.amplitudes = amps

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def computational_basis(n_qubits: int, index: int = 0) -> StateVector:
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def _indices(n_qubits: int) -> np.ndarray:
    return np.arange(1 << n_qubits, dtype=np.int64)


def bit_parity(values: np.ndarray) -> np.ndarray:
    """Parity (popcount mod 2) of each entry of an integer array."""
    return (np.bitwise_count(values) & 1).astype(np.int8)


def pauli_sign_perm(n_qubits: int, p: PauliString):
    """Return (perm, coef) with (P psi)[j] = coef[j^x] * psi[j^x].

    perm is the index permutation j -> j ^ x_mask and coef carries the Z-part
    sign and the overall phase, so ``(coef * psi)[perm]`` applies P.
    """
    j = _indices(n_qubits)
    signs = 1.0 - 2.0 * bit_parity(j & p.z_bits)
    k = (p.phase_pow + (p.x_bits & p.z_bits).bit_count()) % 4
    coef = (1j) ** k * signs
    return j ^ p.x_bits, coef.astype(np.complex128)


def apply_pauli_array(amps: np.ndarray, n_qubits: int, p: PauliString) -> np.ndarray:
    perm, coef = pauli_sign_perm(n_qubits, p)
    return (coef * amps)[..., perm]


def apply_pauli(state: StateVector, p: PauliString) -> StateVector:
    """Apply a Pauli operator exactly (amplitude permutation and phases)."""
    if p.n_qubits != state.n_qubits:
        raise ValueError("operator size does not match state")
    return StateVector(state.n_qubits, apply_pauli_array(state.amplitudes, state.n_qubits, p))


def apply_axis_rotations_array(
    amps: np.ndarray, n_qubits: int, axis: str, angles: np.ndarray
) -> np.ndarray:
    """Apply prod_q exp(-i angle_q sigma_q) for sigma in {X, Z}.

    angles has shape (..., n_qubits) broadcastable against the batch axes of
    amps (whose last axis is the 2**n basis index).
    """
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape[-1] != n_qubits:
        raise ValueError("need one angle per qubit")
    if not np.all(np.isfinite(angles)):
        raise ValueError("non-finite rotation angle")
    if axis not in ("x", "z"):
        raise ValueError(f"unknown axis {axis!r}")
    out = np.array(amps, dtype=np.complex128, copy=True)
    lead = out.shape[:-1]
    for q in range(n_qubits):
        theta = angles[..., q]
        hi, lo = 1 << (n_qubits - 1 - q), 1 << q
        view = out.reshape(*lead, hi, 2, lo)
        a0 = view[..., 0, :]
        a1 = view[..., 1, :]
        if axis == "x":
            c = np.cos(theta)[..., None, None]
            s = np.sin(theta)[..., None, None]
            new0 = c * a0 - 1j * s * a1
            new1 = -1j * s * a0 + c * a1
            view[..., 0, :] = new0
            view[..., 1, :] = new1
        else:
            ph = np.exp(-1j * theta)[..., None, None]
            view[..., 0, :] = ph * a0
            view[..., 1, :] = np.conj(ph) * a1
    return out


def apply_axis_rotations(state: StateVector, axis: str, angles) -> StateVector:
    """Exact per-qubit rotation exp(-i eps_q sigma_q) about X or Z."""
    amps = apply_axis_rotations_array(
        state.amplitudes, state.n_qubits, axis, np.asarray(angles, dtype=np.float64)
    )
    return StateVector(state.n_qubits, amps)


def measure_stabilizer(state: StateVector, s: PauliString, rng):
    """Projective measurement of a Hermitian Pauli, Born-rule sampled.

    Consumes exactly one uniform variate from rng.  Returns
    (outcome, post_state, prob_of_outcome).
    """
    if s.n_qubits != state.n_qubits:
        raise ValueError("stabilizer size does not match state")
    if not s.is_hermitian:
        raise ValueError("measurement operator must be Hermitian (phase +-1)")
    s_amps = apply_pauli_array(state.amplitudes, state.n_qubits, s)
    plus = 0.5 * (state.amplitudes + s_amps)
    p_plus = float(np.vdot(plus, plus).real)
    u = float(rng.random())
    if u < p_plus:
        outcome, branch, prob = 1, plus, p_plus
    else:
        outcome, branch, prob = -1, 0.5 * (state.amplitudes - s_amps), 1.0 - p_plus
    if prob < BRANCH_TOL:
        raise MeasurementBranchError(
            f"sampled branch has norm {prob:.3e}; state and operator are inconsistent"
        )
    post = StateVector(state.n_qubits, branch / np.sqrt(prob))
    return outcome, post, prob


def fidelity(state: StateVector, reference: StateVector) -> float:
    """|<reference|state>|^2."""
    if state.n_qubits != reference.n_qubits:
        raise ValueError("states have different sizes")
    return float(np.abs(np.vdot(reference.amplitudes, state.amplitudes)) ** 2)
