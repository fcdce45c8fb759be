"""Reader for the failure-curve CSV schema."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COLUMNS = ("cycle", "mean_failure", "std_error", "trials")


@dataclass
class CurveSeries:
    cycles: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    trials: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def is_prediction(self) -> bool:
        source = self.metadata.get("source", "simulation")
        return source != "simulation"


def read_series(path: str) -> CurveSeries:
    """Parse one curve file; rejects files that do not match the schema."""
    metadata = {}
    header = None
    rows = []
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
                if header[: len(COLUMNS)] != COLUMNS or len(header) > len(COLUMNS) + 1:
                    raise ValueError(f"{path}: unexpected columns {header!r}")
                continue
            parts = line.split(",")
            if len(parts) != len(header):
                raise ValueError(
                    f"{path}: row has {len(parts)} fields, header has {len(header)}"
                )
            rows.append(parts)
    if header is None or not rows:
        raise ValueError(f"{path}: no curve data")
    if len(header) > len(COLUMNS) and "source" not in metadata:
        metadata["source"] = rows[0][4]
    return CurveSeries(
        cycles=np.array([int(r[0]) for r in rows]),
        mean=np.array([float(r[1]) for r in rows]),
        stderr=np.array([float(r[2]) for r in rows]),
        trials=np.array([int(r[3]) for r in rows]),
        metadata=metadata,
    )
