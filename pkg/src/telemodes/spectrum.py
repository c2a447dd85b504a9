"""Per-mode frequency and power, and selection of modes by band and floor.

Every retained mode across the tree gets one spectrum point. Frequencies are
in hertz of real elapsed time — the subsampling stride of each window was
already folded into the continuous exponents when the window was fit, so a
mode's frequency means the same thing at every level.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .mrdmd import MrDMDTree, iter_nodes, node_at

TWO_PI = 2.0 * np.pi

#: Selection of modes: node path -> retained mode indices, ascending.
ModeSelection = dict[str, tuple[int, ...]]


@dataclass(frozen=True)
class SpectrumPoint:
    """One retained mode's place in the frequency-power plane.

    ``growth`` is the real part of the continuous exponent (1/seconds):
    negative decays, positive grows. ``node_path`` and ``mode_index`` locate
    the mode in the tree for round trips back to reconstruction filters.
    """

    node_path: str
    mode_index: int
    frequency_hz: float
    power: float
    growth: float
    level: int

    def __post_init__(self) -> None:
        if self.mode_index < 0:
            raise ValueError("mode_index must be non-negative")
        if self.frequency_hz < 0:
            raise ValueError("frequency_hz must be non-negative")
        if self.power < 0:
            raise ValueError("power must be non-negative")
        if self.level < 1:
            raise ValueError("levels are 1-based")


def mode_frequency(psi: complex) -> float:
    """Oscillation frequency in Hz of a continuous exponent (Δt already applied)."""
    return abs(complex(psi).imag) / TWO_PI


def mode_power(phi: np.ndarray) -> float:
    """Squared 2-norm of a mode shape: its energy across all sensors."""
    phi = np.asarray(phi)
    return float(np.real(np.vdot(phi, phi)))


def spectrum_of(tree: MrDMDTree) -> list[SpectrumPoint]:
    """One point per retained mode per node, in depth-first node order.

    Modes with non-finite exponents (annihilated by the discrete-to-continuous
    map) carry no dynamics and are skipped. Superseded payloads on demoted
    nodes are not part of the live decomposition and contribute nothing.
    """
    points: list[SpectrumPoint] = []
    for path, node in iter_nodes(tree):
        for index in range(node.dmd.rank):
            psi = node.dmd.exponents[index]
            if not np.isfinite(psi):
                continue
            points.append(
                SpectrumPoint(
                    node_path=path,
                    mode_index=index,
                    frequency_hz=mode_frequency(psi),
                    power=mode_power(node.dmd.modes[:, index]),
                    growth=float(psi.real),
                    level=node.level,
                )
            )
    return points


def _resolve_floor(power_floor: float | str, powers: np.ndarray) -> float:
    """Absolute floor, or a percentile of the in-band powers ("90%" keeps the top decile)."""
    if isinstance(power_floor, str):
        text = power_floor.strip()
        if not text.endswith("%"):
            raise ValueError(
                f"power floor must be a number or a percentile like '90%', got {power_floor!r}"
            )
        rank = float(text[:-1])
        if not 0.0 <= rank <= 100.0:
            raise ValueError("percentile must lie in [0, 100]")
        if powers.size == 0:
            return 0.0
        return float(np.quantile(powers, rank / 100.0))
    floor = float(power_floor)
    if floor < 0:
        raise ValueError("power floor must be non-negative")
    return floor


def filter_modes(
    tree: MrDMDTree,
    f_min: float = 0.0,
    f_max: float = np.inf,
    power_floor: float | str = 0.0,
) -> ModeSelection:
    """Select (node, mode) pairs inside a frequency band and above a power floor.

    The result maps node paths to kept mode indices and plugs directly into
    reconstruction and into per-sensor magnitude aggregation. A percentile
    floor is resolved against the in-band powers. An empty selection is legal
    (a warning, not an error): downstream consumers treat it as "nothing to
    show".
    """
    if not 0.0 <= f_min <= f_max:
        raise ValueError("need 0 <= f_min <= f_max")
    points = spectrum_of(tree)
    in_band = [pt for pt in points if f_min <= pt.frequency_hz <= f_max]
    floor = _resolve_floor(power_floor, np.array([pt.power for pt in in_band]))
    selection: ModeSelection = {}
    for pt in in_band:
        if pt.power >= floor:
            selection.setdefault(pt.node_path, ())
            selection[pt.node_path] = selection[pt.node_path] + (pt.mode_index,)
    if not selection:
        warnings.warn("mode filter selected no modes", RuntimeWarning, stacklevel=2)
    return selection


def selection_size(selection: Mapping[str, tuple[int, ...]]) -> int:
    return sum(len(indices) for indices in selection.values())


def write_spectrum_csv(points: list[SpectrumPoint], path) -> None:
    """Tabular export, one row per mode, in the canonical depth-first order."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["level", "node_path", "mode_index", "frequency_hz", "power", "growth"]
        )
        for pt in points:
            writer.writerow(
                [
                    pt.level,
                    pt.node_path,
                    pt.mode_index,
                    repr(pt.frequency_hz),
                    repr(pt.power),
                    repr(pt.growth),
                ]
            )


def read_spectrum_csv(path) -> list[SpectrumPoint]:
    """Inverse of write_spectrum_csv."""
    points: list[SpectrumPoint] = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        for row in reader:
            points.append(
                SpectrumPoint(
                    node_path=row["node_path"],
                    mode_index=int(row["mode_index"]),
                    frequency_hz=float(row["frequency_hz"]),
                    power=float(row["power"]),
                    growth=float(row["growth"]),
                    level=int(row["level"]),
                )
            )
    return points


def plot_spectrum(points: list[SpectrumPoint], path, *, title: str | None = None) -> None:
    """Static power-vs-frequency scatter, one color per tree level."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))
    levels = sorted({pt.level for pt in points})
    cmap = plt.get_cmap("viridis")
    for i, level in enumerate(levels):
        freqs = [pt.frequency_hz for pt in points if pt.level == level]
        powers = [pt.power for pt in points if pt.level == level]
        color = cmap(i / max(1, len(levels) - 1))
        ax.scatter(freqs, powers, s=18, color=color, label=f"level {level}")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("mode power")
    ax.set_yscale("symlog", linthresh=1e-12)
    if title:
        ax.set_title(title)
    if levels:
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


# node_at is re-exported so selection consumers can resolve paths without
# reaching into the tree module.
__all__ = [
    "ModeSelection",
    "SpectrumPoint",
    "mode_frequency",
    "mode_power",
    "spectrum_of",
    "filter_modes",
    "selection_size",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "plot_spectrum",
    "node_at",
]
