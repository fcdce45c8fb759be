"""Parametric noise processes generating per-cycle rotation angles and flips.

Model components (at most one per (kind, axis) pair, combinable across kinds):

* local Hamiltonian   -- i.i.d. angle per qubit per cycle
* global Hamiltonian  -- one angle per cycle shared by all qubits
* time correlated     -- AR(1) recursion eps(c+1) = sqrt(beta) eps(c)
                         + sqrt(1-beta) delta(c+1), spatially local or global
* discrete Pauli      -- independent flip per qubit with probability p

CLI tokens: "ln:x:normal:0:0.1", "gn:x:const:0.05",
"tc:x:global:beta=1:normal:0:0.1", "disc:z:p=0.0025", joined with "+".
Distributions: const:<eps>, normal:<mu>:<sigma>, uniform:<mean>:<std>,
optionally suffixed ":cut=<c>" for a hard cutoff at |eps| <= c.

Randomness discipline: every draw is a fixed-size block from the caller's
generator (cutoffs use inverse-CDF sampling, one uniform per angle), so a
trial's full noise sequence is a pure function of its seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate, stats

AXES = ("x", "z")

# burn-in length used to reach the AR(1) stationary law for non-normal innovations
_STATIONARY_BURN_IN = 64


def _check_axis(axis: str) -> str:
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}, got {axis!r}")
    return axis


@dataclass(frozen=True)
class AngleDistribution:
    """Scalar angle law: constant, normal, or uniform, with optional cutoff."""

    kind: str
    mean: float = 0.0
    std: float = 0.0
    cutoff: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("constant", "normal", "uniform"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if self.std < 0:
            raise ValueError("std must be nonnegative")
        if self.kind == "constant" and self.std != 0:
            raise ValueError("constant distribution has zero std")
        if self.cutoff is not None and self.cutoff <= 0:
            raise ValueError("cutoff must be positive")

    def draw(self, gen, size) -> np.ndarray:
        """Sample angles; consumes a fixed number of variates per angle."""
        if self.kind == "constant":
            return np.full(size, self.mean)
        if self.cutoff is None:
            if self.kind == "normal":
                return gen.normal(self.mean, self.std, size=size)
            half = self.std * np.sqrt(3.0)
            return gen.uniform(self.mean - half, self.mean + half, size=size)
        # hard cutoff: inverse-CDF of the truncated law, one uniform per angle
        u = gen.random(size=size)
        if self.kind == "normal":
            a = (-self.cutoff - self.mean) / self.std
            b = (self.cutoff - self.mean) / self.std
            return stats.truncnorm.ppf(u, a, b, loc=self.mean, scale=self.std)
        half = self.std * np.sqrt(3.0)
        lo = max(self.mean - half, -self.cutoff)
        hi = min(self.mean + half, self.cutoff)
        if hi <= lo:
            raise ValueError("cutoff leaves no support for the uniform distribution")
        return lo + u * (hi - lo)

    def _pdf_and_support(self):
        if self.kind == "normal":
            pdf = lambda e: stats.norm.pdf(e, self.mean, self.std)
            lo, hi = self.mean - 12 * self.std, self.mean + 12 * self.std
        else:
            half = self.std * np.sqrt(3.0)
            lo, hi = self.mean - half, self.mean + half
            pdf = lambda e: np.where((e >= lo) & (e <= hi), 1.0 / (hi - lo), 0.0)
        if self.cutoff is not None:
            lo, hi = max(lo, -self.cutoff), min(hi, self.cutoff)
        return pdf, lo, hi


def distribution_moment(dist: AngleDistribution, k: int) -> float:
    """E[eps**k]; closed form for constant and centered normal, quadrature otherwise."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k == 0:
        return 1.0
    if dist.kind == "constant":
        return dist.mean**k
    if dist.kind == "normal" and dist.mean == 0.0 and dist.cutoff is None:
        if k % 2 == 1:
            return 0.0
        return float(_double_factorial_int(k - 1)) * dist.std**k
    pdf, lo, hi = dist._pdf_and_support()
    if dist.std == 0:
        return dist.mean**k
    norm, _ = integrate.quad(pdf, lo, hi, epsabs=0, epsrel=1e-12, limit=400)
    val, _ = integrate.quad(
        lambda e: e**k * pdf(e), lo, hi, epsabs=0, epsrel=1e-12, limit=400
    )
    return float(val / norm)


def _double_factorial_int(m: int) -> int:
    out = 1
    while m > 1:
        out *= m
        m -= 2
    return out


@dataclass(frozen=True)
class LocalHamiltonian:
    axis: str
    dist: AngleDistribution

    def __post_init__(self):
        _check_axis(self.axis)


@dataclass(frozen=True)
class GlobalHamiltonian:
    axis: str
    dist: AngleDistribution

    def __post_init__(self):
        _check_axis(self.axis)


@dataclass(frozen=True)
class TimeCorrelated:
    axis: str
    spatial: str  # "local" or "global"
    beta: float
    innovation: AngleDistribution

    def __post_init__(self):
        _check_axis(self.axis)
        if self.spatial not in ("local", "global"):
            raise ValueError("spatial must be 'local' or 'global'")
        if not 0.0 <= self.beta <= 1.0:
            raise ValueError("beta must lie in [0, 1]")


@dataclass(frozen=True)
class DiscretePauli:
    axis: str
    p: float

    def __post_init__(self):
        _check_axis(self.axis)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("flip probability must lie in [0, 1]")


Component = Union[LocalHamiltonian, GlobalHamiltonian, TimeCorrelated, DiscretePauli]


@dataclass(frozen=True)
class NoiseModel:
    components: tuple[Component, ...]

    def __post_init__(self):
        seen = set()
        for comp in self.components:
            key = (type(comp).__name__, comp.axis)
            if key in seen:
                raise ValueError(f"duplicate component {key}")
            seen.add(key)

    @property
    def has_time_correlation(self) -> bool:
        return any(isinstance(c, TimeCorrelated) for c in self.components)


@dataclass
class NoiseSample:
    """One cycle's realized angles (radians) and discrete flips per qubit."""

    x_angles: np.ndarray
    z_angles: np.ndarray
    x_flips: np.ndarray
    z_flips: np.ndarray


@dataclass
class NoiseProcessState:
    """Current AR(1) values per time-correlated component (keyed by index)."""

    values: dict


def _parse_dist(parts: list[str]) -> AngleDistribution:
    cutoff = None
    if parts and parts[-1].startswith("cut="):
        cutoff = float(parts.pop()[4:])
    if not parts:
        raise ValueError("missing distribution")
    kind = parts[0]
    if kind == "const":
        if len(parts) != 2:
            raise ValueError("const distribution takes one parameter")
        return AngleDistribution("constant", float(parts[1]), 0.0, cutoff)
    if kind in ("normal", "uniform"):
        if len(parts) != 3:
            raise ValueError(f"{kind} distribution takes mean and std")
        return AngleDistribution(kind, float(parts[1]), float(parts[2]), cutoff)
    raise ValueError(f"unknown distribution {kind!r}")


def parse_distribution_token(token: str) -> AngleDistribution:
    """Parse a bare distribution token such as "normal:0:0.1" or "const:0.05"."""
    return _parse_dist(token.split(":"))


def parse_noise_token(token: str) -> Component:
    parts = token.split(":")
    head = parts[0]
    if head == "ln":
        return LocalHamiltonian(_check_axis(parts[1]), _parse_dist(parts[2:]))
    if head == "gn":
        return GlobalHamiltonian(_check_axis(parts[1]), _parse_dist(parts[2:]))
    if head == "tc":
        axis, spatial, beta_part = parts[1], parts[2], parts[3]
        if not beta_part.startswith("beta="):
            raise ValueError("time-correlated token needs beta=<value>")
        return TimeCorrelated(
            _check_axis(axis), spatial, float(beta_part[5:]), _parse_dist(parts[4:])
        )
    if head == "disc":
        axis, p_part = parts[1], parts[2]
        if not p_part.startswith("p="):
            raise ValueError("discrete token needs p=<value>")
        return DiscretePauli(_check_axis(axis), float(p_part[2:]))
    raise ValueError(f"unknown noise component {head!r}")


def parse_noise_spec(spec: str) -> NoiseModel:
    """Parse "tok+tok+..." into a NoiseModel; "none" gives an empty model."""
    spec = spec.strip()
    if spec in ("", "none"):
        return NoiseModel(())
    return NoiseModel(tuple(parse_noise_token(tok) for tok in spec.split("+")))


def _tc_width(comp: TimeCorrelated, n_qubits: int) -> int:
    return n_qubits if comp.spatial == "local" else 1


def _tc_stationary(comp: TimeCorrelated, width: int, gen) -> np.ndarray:
    """Draw the AR(1) state from its stationary law.

    The sqrt(beta)/sqrt(1-beta) coefficients preserve variance, so the
    stationary variance equals the innovation variance; the stationary mean is
    sqrt(1-beta) mu / (1 - sqrt(beta)).  Normal innovations admit the exact
    normal stationary law; other laws are reached by a fixed-length burn-in.
    """
    d = comp.innovation
    if comp.beta == 1.0:
        return d.draw(gen, width)
    if comp.beta == 0.0:
        return d.draw(gen, width)
    if d.kind == "normal" and d.cutoff is None:
        m = np.sqrt(1.0 - comp.beta) * d.mean / (1.0 - np.sqrt(comp.beta))
        return gen.normal(m, d.std, size=width)
    if d.kind == "constant":
        m = np.sqrt(1.0 - comp.beta) * d.mean / (1.0 - np.sqrt(comp.beta))
        return np.full(width, m)
    eps = d.draw(gen, width)
    rb, ri = np.sqrt(comp.beta), np.sqrt(1.0 - comp.beta)
    for _ in range(_STATIONARY_BURN_IN):
        eps = rb * eps + ri * d.draw(gen, width)
    return eps


def init_process(model: NoiseModel, n_qubits: int, rng) -> NoiseProcessState:
    """Initialize time-correlated components from their stationary distribution."""
    values = {}
    for idx, comp in enumerate(model.components):
        if isinstance(comp, TimeCorrelated):
            if comp.beta == 1.0 and comp.innovation.mean != 0.0 and comp.innovation.cutoff is None:
                # not an error: the value is frozen at its single draw, but a
                # biased frozen angle is worth noticing in long runs
                logging.getLogger(__name__).info(
                    "perfectly time-correlated component with biased innovation: "
                    "the angle is held at one biased draw for the whole trajectory"
                )
            values[idx] = _tc_stationary(comp, _tc_width(comp, n_qubits), rng)
    return NoiseProcessState(values)


def sample_cycle(
    model: NoiseModel, state: NoiseProcessState, cycle_index: int, n_qubits: int, rng
) -> NoiseSample:
    """Draw one cycle's NoiseSample, advancing AR(1) components in place.

    Components are consumed in model order; angle contributions on a common
    axis add (the component Hamiltonians commute).
    """
    angles = {"x": np.zeros(n_qubits), "z": np.zeros(n_qubits)}
    flips = {"x": np.zeros(n_qubits, dtype=np.uint8), "z": np.zeros(n_qubits, dtype=np.uint8)}
    for idx, comp in enumerate(model.components):
        if isinstance(comp, LocalHamiltonian):
            angles[comp.axis] = angles[comp.axis] + comp.dist.draw(rng, n_qubits)
        elif isinstance(comp, GlobalHamiltonian):
            angles[comp.axis] = angles[comp.axis] + comp.dist.draw(rng, 1)
        elif isinstance(comp, TimeCorrelated):
            eps = state.values[idx]
            if comp.beta != 1.0:
                delta = comp.innovation.draw(rng, eps.shape[0])
                eps = np.sqrt(comp.beta) * eps + np.sqrt(1.0 - comp.beta) * delta
                state.values[idx] = eps
            angles[comp.axis] = angles[comp.axis] + eps
        elif isinstance(comp, DiscretePauli):
            hits = (rng.random(n_qubits) < comp.p).astype(np.uint8)
            flips[comp.axis] ^= hits
    return NoiseSample(angles["x"], angles["z"], flips["x"], flips["z"])


@dataclass
class TrajectoryNoise:
    """Pre-drawn noise for a whole trajectory (block layout, one stream).

    Angles are (n_cycles, n_qubits); flip masks are (n_cycles,) integers with
    qubit q in bit q.  None marks an axis the model never touches.
    """

    x_angles: Optional[np.ndarray]
    z_angles: Optional[np.ndarray]
    x_flip_masks: np.ndarray
    z_flip_masks: np.ndarray

    def cycle_sample(self, c: int, n_qubits: int) -> NoiseSample:
        def angles(block):
            return np.zeros(n_qubits) if block is None else block[c]

        def bits(masks):
            return np.array(
                [(int(masks[c]) >> q) & 1 for q in range(n_qubits)], dtype=np.uint8
            )

        return NoiseSample(
            angles(self.x_angles),
            angles(self.z_angles),
            bits(self.x_flip_masks),
            bits(self.z_flip_masks),
        )


def draw_trajectory_noise(
    model: NoiseModel, n_qubits: int, n_cycles: int, gen
) -> TrajectoryNoise:
    """Draw every cycle's noise for one trajectory as fixed-size blocks.

    Block order matches model component order (each component draws its whole
    (n_cycles, ...) block before the next), which makes a trial's noise a
    deterministic function of its seed independent of how cycles are consumed.
    """
    blocks = {"x": None, "z": None}
    masks = {
        "x": np.zeros(n_cycles, dtype=np.int64),
        "z": np.zeros(n_cycles, dtype=np.int64),
    }
    for comp in model.components:
        if isinstance(comp, LocalHamiltonian):
            add = comp.dist.draw(gen, (n_cycles, n_qubits))
        elif isinstance(comp, GlobalHamiltonian):
            add = np.broadcast_to(
                comp.dist.draw(gen, (n_cycles, 1)), (n_cycles, n_qubits)
            )
        elif isinstance(comp, TimeCorrelated):
            width = _tc_width(comp, n_qubits)
            eps = _tc_stationary(comp, width, gen)
            path = np.empty((n_cycles, width))
            if comp.beta == 1.0:
                path[:] = eps
            else:
                rb, ri = np.sqrt(comp.beta), np.sqrt(1.0 - comp.beta)
                innov = comp.innovation.draw(gen, (n_cycles, width))
                for c in range(n_cycles):
                    eps = rb * eps + ri * innov[c]
                    path[c] = eps
            add = np.broadcast_to(path, (n_cycles, n_qubits)) if width == 1 else path
        elif isinstance(comp, DiscretePauli):
            hits = gen.random((n_cycles, n_qubits)) < comp.p
            weights = (1 << np.arange(n_qubits, dtype=np.int64))[None, :]
            masks[comp.axis] ^= (hits * weights).sum(axis=1)
            continue
        else:  # pragma: no cover
            raise TypeError(f"unknown component {comp!r}")
        prev = blocks[comp.axis]
        blocks[comp.axis] = add.copy() if prev is None else prev + add
    return TrajectoryNoise(blocks["x"], blocks["z"], masks["x"], masks["z"])
