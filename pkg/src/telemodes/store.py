"""Dense multi-sensor telemetry matrices: ingestion, windowing, replay, synthesis.

Readings are held as a P x T float64 matrix (one row per sensor, one column
per snapshot) on a uniform time grid. Ingestion repairs missing cells and
regularizes timestamp jitter so downstream decompositions always see a dense,
evenly sampled matrix.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np


class IngestError(ValueError):
    """Raised when a telemetry file cannot be turned into a SensorMatrix."""


@dataclass(frozen=True)
class SensorMatrix:
    """P sensors x T uniformly sampled readings.

    Invariants: timestamps strictly increasing on a uniform grid of spacing
    ``delta_t``, ``values`` is P x T with no non-finite entries, sensor ids
    unique. Instances are immutable and safe to share across threads.
    """

    sensor_ids: tuple[str, ...]
    timestamps: np.ndarray
    values: np.ndarray
    delta_t: float

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        timestamps = np.asarray(self.timestamps, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        p, t = values.shape
        if len(self.sensor_ids) != p:
            raise ValueError(f"{len(self.sensor_ids)} sensor ids for {p} rows")
        if len(set(self.sensor_ids)) != p:
            raise ValueError("sensor ids must be unique")
        if timestamps.shape != (t,):
            raise ValueError(f"{timestamps.shape[0]} timestamps for {t} columns")
        if t > 1 and not np.all(np.diff(timestamps) > 0):
            raise ValueError("timestamps must be strictly increasing")
        if not np.isfinite(self.delta_t) or self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        if not np.all(np.isfinite(values)):
            raise ValueError("values contain non-finite entries")
        values.setflags(write=False)
        timestamps.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", timestamps)
        object.__setattr__(self, "sensor_ids", tuple(self.sensor_ids))

    @property
    def n_sensors(self) -> int:
        return self.values.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class SnapshotPair:
    """Overlapping snapshot matrices: ``y`` is ``x`` shifted by one column."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have identical shapes")


def shift_pair(m: SensorMatrix) -> SnapshotPair:
    """Split ``m`` into the shifted pair (columns 0..T-2, columns 1..T-1)."""
    if m.n_snapshots < 2:
        raise ValueError("need at least 2 snapshots to form a shifted pair")
    return SnapshotPair(x=m.values[:, :-1], y=m.values[:, 1:])


def window(m: SensorMatrix, t_start: int, t_end: int) -> SensorMatrix:
    """Column slice [t_start, t_end) with timestamps sliced identically."""
    if not (0 <= t_start < t_end <= m.n_snapshots):
        raise ValueError(
            f"window [{t_start}, {t_end}) out of range for T={m.n_snapshots}"
        )
    return SensorMatrix(
        sensor_ids=m.sensor_ids,
        timestamps=m.timestamps[t_start:t_end],
        values=m.values[:, t_start:t_end],
        delta_t=m.delta_t,
    )


def replay_chunks(m: SensorMatrix, chunk: int) -> Iterator[SensorMatrix]:
    """Yield contiguous non-overlapping column blocks of width ``chunk``.

    The last block may be short. Concatenating the blocks reproduces ``m``.
    """
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    for start in range(0, m.n_snapshots, chunk):
        yield window(m, start, min(start + chunk, m.n_snapshots))


def concat(first: SensorMatrix, second: SensorMatrix) -> SensorMatrix:
    """Append ``second``'s columns after ``first``'s (same sensors, same grid)."""
    if first.sensor_ids != second.sensor_ids:
        raise ValueError("sensor ids differ")
    return SensorMatrix(
        sensor_ids=first.sensor_ids,
        timestamps=np.concatenate([first.timestamps, second.timestamps]),
        values=np.hstack([first.values, second.values]),
        delta_t=first.delta_t,
    )


@dataclass(frozen=True)
class ModeSpec:
    """One planted component of a synthetic signal.

    ``pattern`` is the spatial shape over sensors (length P), ``frequency_hz``
    and ``growth_rate`` define the continuous exponent
    ``growth_rate +/- 2*pi*frequency_hz*i``.
    """

    pattern: np.ndarray
    frequency_hz: float
    growth_rate: float = 0.0
    amplitude: float = 1.0
    phase: float = 0.0

    @property
    def exponent(self) -> complex:
        return complex(self.growth_rate, 2.0 * math.pi * self.frequency_hz)


def generate_synthetic(
    p: int,
    t: int,
    modes: Sequence[ModeSpec],
    noise_sigma: float = 0.0,
    delta_t: float = 1.0,
    seed: int | None = 0,
    t0: float = 0.0,
) -> tuple[SensorMatrix, list[complex]]:
    """Synthesize telemetry from planted spatiotemporal components.

    values = sum_k amp_k * Re(pattern_k * exp((growth_k + 2*pi*i*f_k)*t + i*phase_k))
    plus optional Gaussian noise. A complex pattern yields a travelling wave
    (rank 2 per component, the recoverable case); a real pattern degenerates
    to a standing wave pattern_k * cos(...), useful for exercising
    rank-deficient inputs. Returns the matrix and the ground-truth continuous
    exponents (for use as a test oracle).
    """
    if p < 1 or t < 1:
        raise ValueError("p and t must be >= 1")
    nyquist = 1.0 / (2.0 * delta_t)
    times = np.arange(t) * delta_t
    values = np.zeros((p, t))
    truth = []
    for k, mode in enumerate(modes):
        if mode.frequency_hz >= nyquist:
            raise ValueError(
                f"component {k}: frequency {mode.frequency_hz} Hz is at or above "
                f"the Nyquist rate {nyquist} Hz for delta_t={delta_t}"
            )
        pattern = np.asarray(mode.pattern)
        if pattern.shape != (p,):
            raise ValueError(f"component {k}: pattern must have length {p}")
        carrier = np.exp(mode.exponent * times + 1j * mode.phase)
        values += mode.amplitude * np.real(np.outer(pattern, carrier))
        truth.append(mode.exponent)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        values += rng.normal(0.0, noise_sigma, size=values.shape)
    matrix = SensorMatrix(
        sensor_ids=tuple(f"s{i:04d}" for i in range(p)),
        timestamps=t0 + times,
        values=values,
        delta_t=delta_t,
    )
    return matrix, truth


_MISSING_TOKENS = {"", "nan", "na", "null", "none"}


def _parse_cell(token: str) -> float:
    token = token.strip()
    if token.lower() in _MISSING_TOKENS:
        return math.nan
    return float(token)


def _repair_gaps(values: np.ndarray) -> np.ndarray:
    """Per-sensor linear interpolation; leading/trailing gaps take the nearest value."""
    repaired = values.copy()
    cols = np.arange(values.shape[1])
    for row in repaired:
        bad = ~np.isfinite(row)
        if not bad.any():
            continue
        if bad.all():
            raise IngestError("a sensor column contains no finite readings")
        row[bad] = np.interp(cols[bad], cols[~bad], row[~bad])
    return repaired


def ingest_csv(
    path,
    mapping_path=None,
    jitter_tolerance: float = 0.1,
    delta_t: float | None = None,
) -> SensorMatrix:
    """Read telemetry CSV: a `timestamp` column plus one column per sensor.

    delta_t is inferred as the median of consecutive timestamp differences;
    timestamps within ``jitter_tolerance`` (fraction of delta_t) of the ideal
    grid are regularized onto it. Missing cells are repaired by per-sensor
    linear interpolation. ``mapping_path`` is accepted for interface symmetry
    with the exporters and validated if provided.

    Passing ``delta_t`` pins the sample spacing instead of inferring it, which
    also permits files with fewer than two data rows (continuation chunks may
    legitimately hold zero or one snapshot).
    """
    if delta_t is not None and not (math.isfinite(delta_t) and delta_t > 0):
        raise IngestError(f"{path}: delta_t must be finite and positive")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file") from None
        if not header or header[0].strip() != "timestamp":
            raise IngestError(f"{path}: first column must be named 'timestamp'")
        sensor_ids = tuple(h.strip() for h in header[1:])
        if not sensor_ids:
            raise IngestError(f"{path}: no sensor columns")
        if len(set(sensor_ids)) != len(sensor_ids):
            raise IngestError(f"{path}: duplicate sensor id in header")

        times: list[float] = []
        rows: list[list[float]] = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(sensor_ids) + 1:
                raise IngestError(
                    f"{path}: row {lineno} has {len(row)} fields, expected "
                    f"{len(sensor_ids) + 1}"
                )
            try:
                stamp = float(row[0])
                cells = [_parse_cell(c) for c in row[1:]]
            except ValueError as exc:
                raise IngestError(f"{path}: row {lineno}: {exc}") from None
            if not math.isfinite(stamp):
                raise IngestError(f"{path}: row {lineno}: non-finite timestamp")
            times.append(stamp)
            rows.append(cells)

    if len(rows) < 2 and delta_t is None:
        raise IngestError(f"{path}: insufficient snapshots (need at least 2 rows)")
    if not rows:
        return SensorMatrix(
            sensor_ids=sensor_ids,
            timestamps=np.empty(0),
            values=np.empty((len(sensor_ids), 0)),
            delta_t=float(delta_t),
        )
    stamps = np.asarray(times)
    diffs = np.diff(stamps)
    if np.any(diffs <= 0):
        bad = int(np.argmax(diffs <= 0))
        raise IngestError(
            f"{path}: timestamps not strictly increasing at data row {bad + 2}"
        )
    if delta_t is None:
        delta_t = float(np.median(diffs))
    ideal = stamps[0] + delta_t * np.arange(len(stamps))
    if np.max(np.abs(stamps - ideal)) > jitter_tolerance * delta_t:
        worst = int(np.argmax(np.abs(stamps - ideal)))
        raise IngestError(
            f"{path}: irregular sampling at data row {worst + 2}: timestamp "
            f"{stamps[worst]} deviates more than {jitter_tolerance:.0%} of "
            f"delta_t={delta_t} from the uniform grid"
        )

    values = _repair_gaps(np.asarray(rows, dtype=np.float64).T)
    matrix = SensorMatrix(
        sensor_ids=sensor_ids, timestamps=ideal, values=values, delta_t=delta_t
    )
    if mapping_path is not None:
        load_sensor_map(mapping_path)
    return matrix


def write_csv(m: SensorMatrix, path) -> None:
    """Write a SensorMatrix in the same CSV schema ``ingest_csv`` reads."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", *m.sensor_ids])
        for j in range(m.n_snapshots):
            writer.writerow(
                [repr(float(m.timestamps[j]))]
                + [repr(float(v)) for v in m.values[:, j]]
            )


def load_sensor_map(path) -> dict[str, dict[str, str]]:
    """Load the sensor-map JSON: sensor id -> {"node": ..., "category": ...}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise IngestError(f"{path}: sensor map must be a JSON object")
    out = {}
    for sensor_id, entry in raw.items():
        if not isinstance(entry, dict) or "node" not in entry or "category" not in entry:
            raise IngestError(
                f"{path}: sensor map entry for {sensor_id!r} needs 'node' and 'category'"
            )
        out[str(sensor_id)] = {
            "node": str(entry["node"]),
            "category": str(entry["category"]),
        }
    return out
