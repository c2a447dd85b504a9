"""Wall-clock comparison of from-scratch fits against streaming updates.

For each dataset size the harness builds a synthetic record once, fits the
leading portion from scratch, then appends the final chunk through the
streaming path. Only the two fit calls are timed (monotonic clock); data
generation, I/O, and bookkeeping stay outside the stopwatch.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass

import numpy as np

from .incremental import partial_fit
from .mrdmd import MrDMDConfig, mrdmd_fit
from .store import ModeSpec, SensorMatrix, generate_synthetic, window

__all__ = [
    "BenchmarkRow",
    "DEFAULT_SIZES",
    "benchmark_dataset",
    "format_table",
    "run_benchmark",
    "write_benchmark_csv",
]

DEFAULT_SIZES = (2000, 5000, 10000, 16000)
DEFAULT_SENSORS = 1000
DEFAULT_CHUNK = 1000
DEFAULT_REPEATS = 10


@dataclass(frozen=True)
class BenchmarkRow:
    """Mean timings for one dataset size."""

    dataset: str
    n_sensors: int
    total_timesteps: int
    initial_fit_s: float
    partial_fit_s: float


def _benchmark_signal(n_sensors: int, total: int, seed: int) -> SensorMatrix:
    """Two well-separated oscillations plus broadband noise."""
    rng = np.random.default_rng(seed)

    def pattern():
        # complex pattern = travelling wave: DMD-recoverable rank-2 content
        return rng.standard_normal(n_sensors) + 1j * rng.standard_normal(n_sensors)

    modes = [
        ModeSpec(
            pattern=pattern(), frequency_hz=0.0008, growth_rate=0.0, amplitude=1.0
        ),
        ModeSpec(
            pattern=pattern(), frequency_hz=0.045, growth_rate=0.0, amplitude=0.6
        ),
    ]
    data, _ = generate_synthetic(
        n_sensors, total, modes, noise_sigma=0.1, seed=seed + 1
    )
    return data


def benchmark_dataset(
    data: SensorMatrix,
    chunk: int,
    repeats: int,
    config: MrDMDConfig,
) -> tuple[float, float]:
    """Mean (initial, partial) fit seconds for one prepared dataset.

    Each repeat fits the first ``T - chunk`` snapshots from scratch and then
    streams in the final ``chunk``; the streaming update starts from that
    repeat's own initial tree.
    """
    total = data.n_snapshots
    if not 0 < chunk < total:
        raise ValueError("chunk must be positive and smaller than the record")
    head = window(data, 0, total - chunk)
    tail = window(data, total - chunk, total)
    initial_times = []
    partial_times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        tree = mrdmd_fit(head, config)
        t1 = time.perf_counter()
        partial_fit(tree, tail)
        t2 = time.perf_counter()
        initial_times.append(t1 - t0)
        partial_times.append(t2 - t1)
    return float(np.mean(initial_times)), float(np.mean(partial_times))


def run_benchmark(
    sizes=DEFAULT_SIZES,
    n_sensors: int = DEFAULT_SENSORS,
    chunk: int = DEFAULT_CHUNK,
    repeats: int = DEFAULT_REPEATS,
    config: MrDMDConfig | None = None,
    seed: int = 0,
) -> list[BenchmarkRow]:
    """Time initial and streaming fits across dataset sizes."""
    if repeats < 1:
        raise ValueError("repeats must be at least 1")
    if config is None:
        config = MrDMDConfig()
    rows = []
    for total in sizes:
        data = _benchmark_signal(n_sensors, int(total), seed)
        initial_s, partial_s = benchmark_dataset(data, chunk, repeats, config)
        rows.append(
            BenchmarkRow(
                dataset=f"synthetic-{n_sensors}x{total}",
                n_sensors=n_sensors,
                total_timesteps=int(total),
                initial_fit_s=initial_s,
                partial_fit_s=partial_s,
            )
        )
    return rows


def format_table(rows) -> str:
    """Fixed-width table with one line per dataset size."""
    header = ("Dataset", "N", "T", "Initial Fit (s)", "Partial Fit (s)")
    cells = [header]
    for row in rows:
        cells.append(
            (
                row.dataset,
                str(row.n_sensors),
                str(row.total_timesteps),
                f"{row.initial_fit_s:.4f}",
                f"{row.partial_fit_s:.4f}",
            )
        )
    widths = [max(len(line[i]) for line in cells) for i in range(len(header))]
    lines = []
    for line in cells:
        lines.append(
            "  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip()
        )
    return "\n".join(lines)


def write_benchmark_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["dataset", "n_sensors", "total_timesteps", "initial_fit_s", "partial_fit_s"]
        )
        for row in rows:
            writer.writerow(
                [
                    row.dataset,
                    row.n_sensors,
                    row.total_timesteps,
                    repr(row.initial_fit_s),
                    repr(row.partial_fit_s),
                ]
            )
