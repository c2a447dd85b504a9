"""Baseline selection and per-sensor z-scores of mode magnitudes.

A baseline is the set of sensors behaving unremarkably over the analysis
window, picked by a band on their mean raw reading (or named outright). Every
sensor's aggregate mode magnitude is then scored against the baseline
population, and the scores fall into four display classes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .mrdmd import MrDMDTree, node_at
from .store import SensorMatrix

#: z-band edges; boundaries belong to the milder class.
LOW_EDGE = -1.5
BASELINE_EDGE = 1.5
HIGH_EDGE = 2.0

CLASS_NAMES = ("low", "baseline", "elevated", "high")

AGGREGATIONS = ("sum_abs", "sum_sq")


@dataclass(frozen=True)
class BaselineSpec:
    """How baseline sensors are chosen.

    With ``explicit_ids`` the band is ignored and the named sensors are used
    verbatim. Otherwise a sensor joins the baseline when its windowed-mean raw
    reading lies inside [band_low, band_high], both ends included. The only
    supported windowing statistic is the mean.
    """

    band_low: float = -np.inf
    band_high: float = np.inf
    statistic: str = "mean"
    explicit_ids: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.statistic != "mean":
            raise ValueError(f"unsupported baseline statistic: {self.statistic!r}")
        if self.explicit_ids is None and not self.band_low < self.band_high:
            raise ValueError("band_low must be strictly below band_high")
        if self.explicit_ids is not None and len(self.explicit_ids) == 0:
            raise ValueError("explicit_ids, when given, must name at least one sensor")


@dataclass(frozen=True)
class ZScoreReport:
    """Scores for every sensor plus the baseline statistics that produced them."""

    magnitudes: np.ndarray
    z: np.ndarray
    classes: tuple[str, ...]
    baseline_mean: float
    baseline_std: float
    baseline_indices: tuple[int, ...]
    selection: Mapping[str, tuple[int, ...]] | None = field(default=None)

    def __post_init__(self) -> None:
        n = self.magnitudes.shape[0]
        if self.z.shape[0] != n or len(self.classes) != n:
            raise ValueError("per-sensor arrays must agree in length")
        if self.baseline_std <= 0:
            raise ValueError("baseline_std must be positive")

    @property
    def n_baseline(self) -> int:
        return len(self.baseline_indices)


def classify(z: float) -> str:
    """Display class of one z-score; boundaries go to the milder class."""
    if z < LOW_EDGE:
        return "low"
    if z <= BASELINE_EDGE:
        return "baseline"
    if z <= HIGH_EDGE:
        return "elevated"
    return "high"


def select_baseline(data: SensorMatrix, spec: BaselineSpec) -> tuple[int, ...]:
    """Indices of the baseline sensors under a spec, in sensor order."""
    if data.n_snapshots < 1:
        raise ValueError("cannot select a baseline over an empty window")
    if spec.explicit_ids is not None:
        position = {sid: i for i, sid in enumerate(data.sensor_ids)}
        missing = [sid for sid in spec.explicit_ids if sid not in position]
        if missing:
            raise ValueError(f"unknown baseline sensor ids: {missing}")
        return tuple(sorted(position[sid] for sid in set(spec.explicit_ids)))
    means = data.values.mean(axis=1)
    chosen = np.flatnonzero((means >= spec.band_low) & (means <= spec.band_high))
    if chosen.size == 0:
        raise ValueError(
            f"no baseline sensors: no windowed mean lies in "
            f"[{spec.band_low}, {spec.band_high}]"
        )
    return tuple(int(i) for i in chosen)


def sensor_magnitudes(
    tree: MrDMDTree,
    selection: Mapping[str, Sequence[int]] | None = None,
    aggregation: str = "sum_abs",
) -> np.ndarray:
    """Aggregate each sensor's share of the selected modes into one number.

    ``sum_abs`` adds |φ_i[p]| over the selection (linear, sign-robust);
    ``sum_sq`` adds |φ_i[p]|² instead, weighting dominant modes harder.
    ``selection=None`` means every retained mode of every node.
    """
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"aggregation must be one of {AGGREGATIONS}")
    if selection is None:
        from .mrdmd import iter_nodes

        selection = {
            path: tuple(range(node.dmd.rank))
            for path, node in iter_nodes(tree)
            if node.dmd.rank
        }
    out = np.zeros(tree.n_sensors, dtype=np.float64)
    for path, indices in selection.items():
        if len(indices) == 0:
            continue
        node = node_at(tree, path)
        phi = np.abs(node.dmd.modes[:, list(indices)])
        if aggregation == "sum_sq":
            phi = phi * phi
        out += phi.sum(axis=1)
    return out


def zscores(
    magnitudes: np.ndarray,
    baseline: Sequence[int],
    selection: Mapping[str, tuple[int, ...]] | None = None,
) -> ZScoreReport:
    """Score every sensor against the baseline population.

    μ and σ are the mean and population standard deviation of the baseline
    members' magnitudes; all sensors (members included) are scored against
    them. A baseline whose members all carry the same magnitude has σ = 0 and
    no meaningful scores — that is an error, not a silent zero.
    """
    magnitudes = np.asarray(magnitudes, dtype=np.float64)
    if magnitudes.ndim != 1:
        raise ValueError("magnitudes must be a vector")
    members = np.asarray(sorted(set(int(i) for i in baseline)), dtype=np.intp)
    if members.size < 2:
        raise ValueError("baseline must contain at least two sensors")
    if members.min() < 0 or members.max() >= magnitudes.shape[0]:
        raise ValueError("baseline index out of range")
    mu = float(np.mean(magnitudes[members]))
    sigma = float(np.std(magnitudes[members]))
    if sigma == 0.0:
        raise ValueError("degenerate baseline: member magnitudes are identical")
    z = (magnitudes - mu) / sigma
    return ZScoreReport(
        magnitudes=magnitudes,
        z=z,
        classes=tuple(classify(float(v)) for v in z),
        baseline_mean=mu,
        baseline_std=sigma,
        baseline_indices=tuple(int(i) for i in members),
        selection=selection,
    )


def write_zscore_csv(
    report: ZScoreReport,
    sensor_ids: Sequence[str],
    path,
    sensor_map: Mapping[str, Mapping[str, str]] | None = None,
) -> None:
    """Tabular export, one row per sensor.

    ``sensor_map`` (sensor id → {"node": ..., "category": ...}) fills the
    hardware columns; sensors absent from the map get empty strings.
    """
    if len(sensor_ids) != report.magnitudes.shape[0]:
        raise ValueError("sensor_ids disagree with the report length")
    sensor_map = sensor_map or {}
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["sensor_id", "node_id", "category", "magnitude", "z", "class"])
        for i, sid in enumerate(sensor_ids):
            entry = sensor_map.get(sid, {})
            writer.writerow(
                [
                    sid,
                    entry.get("node", ""),
                    entry.get("category", ""),
                    repr(float(report.magnitudes[i])),
                    repr(float(report.z[i])),
                    report.classes[i],
                ]
            )


def read_zscore_csv(path) -> list[dict[str, str]]:
    """Rows of a z-score export as dictionaries, values left as strings."""
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))
