"""Monte Carlo harness, curve fitting, and CSV persistence.

CSV schema: '#'-prefixed ``key=value`` metadata lines followed by a header
row ``cycle,mean_failure,std_error,trials`` and one row per cycle.  Means are
averaged across trials at fixed cycle index; standard errors are across
trials only (cycles within one trajectory are correlated, which the fit
treats only through the reported per-row errors).

Prediction curves reuse the same schema with a trailing ``source`` column and
zero trials, so downstream tooling needs a single reader.

Trials are processed in fixed-size chunks (a function of the configuration
only, never of the worker count); per-chunk partial sums are combined with
exact compensated summation, so results do not depend on completion order or
on the COHQEC_WORKERS setting.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .analytic import PredictedCurve
from .codes import StabilizerCode, parse_code_token
from .decoder import TIE_BREAK_RULE, enumerate_malignant_sets
from .engine import DecoderPair, build_decoders, run_trajectories
from .noise import NoiseModel, parse_noise_spec

MAX_TRIALS = 10**6
MAX_CYCLES = 10**3

CSV_COLUMNS = ("cycle", "mean_failure", "std_error", "trials")
WORKERS_ENV = "COHQEC_WORKERS"


@dataclass(frozen=True)
class ExperimentConfig:
    code: str
    noise: str
    strategy: str = "active"
    init: str = "zero"
    reference: str = "zero"
    n_cycles: int = 100
    trials: int = 1000
    seed: int = 0
    out: Optional[str] = None
    allow_large: bool = False

    def __post_init__(self):
        if self.trials < 1 or self.trials > MAX_TRIALS:
            raise ValueError(f"trials must be in [1, {MAX_TRIALS}]")
        if self.n_cycles < 1 or self.n_cycles > MAX_CYCLES:
            raise ValueError(f"cycles must be in [1, {MAX_CYCLES}]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        parse_noise_spec(self.noise)  # rejects malformed tokens early
        if self.code.startswith("rep:") and int(self.code.split(":")[1]) > 9:
            raise ValueError("repetition codes beyond d=9 exceed the desk-scale budget")
        if not self.allow_large:
            parse_code_token(self.code)

    def build(self) -> tuple[StabilizerCode, NoiseModel]:
        if self.allow_large and self.code.startswith("surface:"):
            from .codes import rotated_surface_code

            code = rotated_surface_code(int(self.code.split(":")[1]), allow_large=True)
        else:
            code = parse_code_token(self.code)
        return code, parse_noise_spec(self.noise)

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ExperimentConfig":
        kwargs = {}
        converters = {
            "n_cycles": int,
            "cycles": int,
            "trials": int,
            "seed": int,
            "allow_large": lambda v: str(v).lower() in ("1", "true", "yes"),
        }
        for key, value in mapping.items():
            name = "n_cycles" if key == "cycles" else key
            if name not in cls.__dataclass_fields__:
                raise ValueError(f"unknown config key {key!r}")
            kwargs[name] = converters.get(key, str)(value)
        return cls(**kwargs)


def read_config_file(path: str) -> dict:
    """Flat key=value file, '#' comments and blank lines ignored."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


@dataclass
class FailureCurve:
    """Per-cycle mean logical failure with across-trial standard errors."""

    cycles: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    trials: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.cycles = np.asarray(self.cycles, dtype=np.int64)
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.stderr = np.asarray(self.stderr, dtype=np.float64)
        self.trials = np.asarray(self.trials, dtype=np.int64)
        n = len(self.cycles)
        if not (len(self.mean) == len(self.stderr) == len(self.trials) == n):
            raise ValueError("curve columns have mismatched lengths")

    def validate(self) -> None:
        if np.any((self.mean < 0) | (self.mean > 1)):
            raise ValueError("mean failure outside [0, 1]")
        if np.any(self.stderr < 0):
            raise ValueError("negative standard error")
        if np.any(self.trials < 1):
            raise ValueError("every cycle needs at least one trial")


def _chunk_size(n_cycles: int, state_dim: int) -> int:
    # bounded working set; depends on the config only, never on worker count
    by_cycles = (1 << 20) // max(n_cycles, 1)
    by_amplitudes = (1 << 27) // (state_dim * 16)
    return max(1, min(4096, by_cycles, by_amplitudes))


def _chunk_worker(args):
    (config_items, lo, hi) = args
    config = ExperimentConfig(**dict(config_items))
    code, model = config.build()
    fails = run_trajectories(
        code,
        model,
        config.strategy,
        config.init,
        config.reference,
        config.n_cycles,
        config.seed,
        range(lo, hi),
    )
    return fails.sum(axis=0), (fails**2).sum(axis=0)


def _malignant_metadata(code: StabilizerCode, decoders: DecoderPair) -> dict:
    meta = {"tie_break": TIE_BREAK_RULE}
    try:
        counts = enumerate_malignant_sets(code, decoders.x, "x")
        meta["a_d"] = str(counts.a_d)
        meta["b_d"] = str(counts.b_d)
    except ValueError:
        meta["a_d"] = meta["b_d"] = "n/a"
    return meta


def run_experiment(config: ExperimentConfig) -> FailureCurve:
    """Launch independent trajectories and aggregate per-cycle statistics.

    Deterministic for a fixed config (seed included) regardless of the worker
    count: every trial owns a counter-based stream keyed by (seed, trial).
    """
    t0 = time.monotonic()
    code, model = config.build()
    decoders = build_decoders(code)
    chunk = _chunk_size(config.n_cycles, 1 << code.n_qubits)
    bounds = [
        (lo, min(lo + chunk, config.trials)) for lo in range(0, config.trials, chunk)
    ]
    config_items = tuple(sorted(vars(config).items()))
    jobs = [(config_items, lo, hi) for lo, hi in bounds]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_chunk_worker, jobs))
    else:
        partials = [_chunk_worker(job) for job in jobs]
    n = config.n_cycles
    sums = np.array([math.fsum(p[0][c] for p in partials) for c in range(n)])
    sumsq = np.array([math.fsum(p[1][c] for p in partials) for c in range(n)])
    t = config.trials
    mean = sums / t
    if t > 1:
        var = np.maximum(sumsq / t - mean**2, 0.0)
        stderr = np.sqrt(var / (t - 1))
    else:
        stderr = np.zeros(n)
    metadata = {
        "source": "simulation",
        "code": config.code,
        "noise": config.noise,
        "strategy": config.strategy,
        "init": config.init,
        "reference": config.reference,
        "cycles": str(config.n_cycles),
        "trials": str(config.trials),
        "seed": str(config.seed),
        "version": __version__,
        **_malignant_metadata(code, decoders),
        "wall_time_s": f"{time.monotonic() - t0:.3f}",
    }
    curve = FailureCurve(
        cycles=np.arange(1, n + 1),
        mean=np.clip(mean, 0.0, 1.0),
        stderr=stderr,
        trials=np.full(n, t),
        metadata=metadata,
    )
    curve.validate()
    return curve


def write_curve(curve: FailureCurve, path: str) -> None:
    """Lossless CSV write; body is byte-identical for identical inputs."""
    curve.validate()
    with open(path, "w") as fh:
        for key in sorted(curve.metadata):
            fh.write(f"# {key}={curve.metadata[key]}\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for c, m, s, t in zip(curve.cycles, curve.mean, curve.stderr, curve.trials):
            fh.write(f"{int(c)},{float(m)!r},{float(s)!r},{int(t)}\n")


def write_prediction(curve: PredictedCurve, path: str, metadata: dict) -> None:
    """Prediction CSV: simulation schema plus a trailing ``source`` column."""
    source = metadata.get("source", "prediction")
    with open(path, "w") as fh:
        for key in sorted(metadata):
            fh.write(f"# {key}={metadata[key]}\n")
        fh.write(",".join(CSV_COLUMNS) + ",source\n")
        for c, v in zip(curve.cycles, curve.values):
            fh.write(f"{int(c)},{float(v)!r},0.0,0,{source}\n")


def read_curve(path: str) -> FailureCurve:
    """Read either a simulation or a prediction CSV back into a FailureCurve."""
    metadata = {}
    rows = []
    header = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    key, value = body.split("=", 1)
                    metadata[key] = value
                continue
            if header is None:
                header = tuple(line.split(","))
                if header[: len(CSV_COLUMNS)] != CSV_COLUMNS or len(header) > len(CSV_COLUMNS) + 1:
                    raise ValueError(f"unexpected CSV header {header!r}")
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise ValueError(f"row has {len(parts)} fields, header has {len(header)}")
            rows.append(parts)
    if header is None or not rows:
        raise ValueError(f"{path} contains no curve data")
    is_prediction = len(header) > len(CSV_COLUMNS)
    if is_prediction and "source" not in metadata:
        metadata["source"] = rows[0][4]
    curve = FailureCurve(
        cycles=[int(r[0]) for r in rows],
        mean=[float(r[1]) for r in rows],
        stderr=[float(r[2]) for r in rows],
        trials=[int(r[3]) for r in rows],
        metadata=metadata,
    )
    if not is_prediction:
        curve.validate()
    return curve


@dataclass(frozen=True)
class FitResult:
    """Weighted least squares of P(n) = A n + B (n^2 - n)."""

    A: float
    B: float
    cov: np.ndarray
    red_chisq: float

    @property
    def stderr_A(self) -> float:
        return float(np.sqrt(self.cov[0, 0]))

    @property
    def stderr_B(self) -> float:
        return float(np.sqrt(self.cov[1, 1]))


def fit_failure_curve(curve: FailureCurve) -> FitResult:
    """Fit the two-coefficient growth model to a failure curve.

    Weights are 1/stderr**2; exact data (all-zero stderr) falls back to unit
    weights with the covariance scaled by the residual variance.  Rows with
    zero stderr among noisy ones reuse the smallest positive error.
    """
    n = curve.cycles.astype(np.float64)
    if len(np.unique(n)) < 2:
        raise ValueError("need at least two distinct cycle counts to fit")
    y = curve.mean
    design = np.column_stack([n, n * n - n])
    exact = bool(np.all(curve.stderr == 0))
    if exact:
        w = np.ones_like(y)
    else:
        positive = curve.stderr[curve.stderr > 0]
        sigma = np.where(curve.stderr > 0, curve.stderr, positive.min())
        w = 1.0 / sigma**2
    xtw = design.T * w
    cov = np.linalg.inv(xtw @ design)
    coeffs = cov @ (xtw @ y)
    resid = y - design @ coeffs
    dof = max(len(y) - 2, 1)
    chisq = float(np.sum(w * resid**2))
    if exact:
        cov = cov * (chisq / dof)
    return FitResult(A=float(coeffs[0]), B=float(coeffs[1]), cov=cov, red_chisq=chisq / dof)
