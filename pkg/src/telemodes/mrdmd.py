"""Recursive multiresolution decomposition of sensor time series.

Separates dynamics scale by scale. Each window keeps only the modes that
oscillate slowly relative to the window length, subtracts their reconstruction
at full temporal resolution, and hands the residual to two child windows.
The result is a binary tree whose deeper nodes hold progressively faster,
shorter-lived structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator, Mapping, Sequence

import numpy as np

from .dmd import (
    DMDResult,
    RankDeficiencyError,
    _resolve_rank,
    dmd_from_factors,
    reconstruct,
    slow_mode_indices,
)
from .store import SensorMatrix
from .svd import SVDFactors, truncated_svd

#: Narrowest window that still gets a genuine fit; anything narrower becomes a
#: zero-mode node and the recursion does not descend past it.
MIN_WINDOW = 4

#: Samples kept per cycle at the slow-threshold rate: four times Nyquist.
SAMPLES_PER_CYCLE = 8

#: Minimum fraction of a window's Frobenius norm a subsampled fit must
#: explain for its retention to stand. Content folded into the slow band by
#: subsampling matches the window only at the subsampled points, so its
#: full-resolution subtraction leaves the energy essentially untouched (or
#: grows it); genuine slow structure removes its own — larger — share.
GUARD_MARGIN = 0.02


@dataclass(frozen=True)
class MrDMDConfig:
    """Knobs for the recursive fit.

    ``rank_policy`` is per node: ``"svht"`` (noise-adaptive hard threshold),
    ``"full"``, or an explicit integer rank. ``split_ratio`` places the split
    point; 0.5 halves each window, the left child taking the extra column when
    the width is odd. ``cache_all_levels`` retains a streaming cache on every
    node instead of the root alone (more memory, only useful to callers that
    restart updates from an interior window).
    """

    max_levels: int = 4
    max_cycles: int = 2
    rank_policy: int | str = "svht"
    split_ratio: float = 0.5
    cache_all_levels: bool = False

    def __post_init__(self) -> None:
        if self.max_levels < 1:
            raise ValueError("max_levels must be at least 1")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be at least 1")
        if not 0.0 < self.split_ratio < 1.0:
            raise ValueError("split_ratio must lie strictly between 0 and 1")
        _resolve_rank(self.rank_policy)


@dataclass(frozen=True)
class LevelCache:
    """Subsampled snapshot history retained so a window can keep growing.

    ``factors`` is the running SVD of every subsampled column except the last
    (the data half of the shifted pair). ``columns`` keeps the subsampled
    snapshots themselves: the shifted counterpart and the first snapshot must
    stay exactly available when the factors are later extended, and at the
    root's stride they are a small fraction of the original data.
    ``data_norm`` is the Frobenius norm of the full-resolution data this
    window was fit on, accumulated across streaming updates.
    """

    stride: int
    columns: np.ndarray
    factors: SVDFactors
    data_norm: float

    def __post_init__(self) -> None:
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if self.columns.ndim != 2:
            raise ValueError("cached columns must be a 2-d array")
        if self.factors.n_cols != self.columns.shape[1] - 1:
            raise ValueError("cached factors must cover all but the last column")
        if self.data_norm < 0:
            raise ValueError("data_norm must be non-negative")


@dataclass(frozen=True)
class MrDMDNode:
    """One window of the decomposition.

    ``dmd`` holds only modes that pass the slow test at this node's ``rho``,
    expressed in original time units. ``children`` is empty or a pair that
    partitions ``[t_start, t_end)`` exactly. ``superseded`` appears after a
    streaming update demotes a former root: the stale slow payload is kept for
    inspection and drift accounting but contributes nothing to reconstruction.
    """

    level: int
    t_start: int
    t_end: int
    stride: int
    rho: float
    dmd: DMDResult
    children: tuple["MrDMDNode", ...] = ()
    svd_cache: LevelCache | None = None
    superseded: DMDResult | None = None

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError("levels are 1-based")
        if not 0 <= self.t_start < self.t_end:
            raise ValueError("window must be non-empty with t_start >= 0")
        if self.stride < 1:
            raise ValueError("stride must be at least 1")
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if len(self.children) not in (0, 2):
            raise ValueError("a node has either no children or exactly two")
        if self.children:
            left, right = self.children
            if (
                left.t_start != self.t_start
                or left.t_end != right.t_start
                or right.t_end != self.t_end
            ):
                raise ValueError("children must partition the parent window")
            if left.level != self.level + 1 or right.level != self.level + 1:
                raise ValueError("children must sit one level below the parent")

    @property
    def window_len(self) -> int:
        return self.t_end - self.t_start

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class MrDMDTree:
    """Finished decomposition: root node plus the fit-wide bookkeeping."""

    root: MrDMDNode
    config: MrDMDConfig
    sensor_ids: tuple[str, ...]
    total_timesteps: int
    delta_t: float

    def __post_init__(self) -> None:
        if self.root.level != 1:
            raise ValueError("root must sit at level 1")
        if self.root.t_start != 0 or self.root.t_end != self.total_timesteps:
            raise ValueError("root window must span the full timeline")
        if self.root.dmd.n_sensors != len(self.sensor_ids):
            raise ValueError("sensor_ids disagree with the mode row count")
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")

    @property
    def n_sensors(self) -> int:
        return len(self.sensor_ids)


def rho_for_window(window_len: int, max_cycles: int) -> float:
    """Slow-mode threshold for a window, in cycles per original time step.

    A mode is "slow" for the window when it completes at most ``max_cycles``
    oscillations over the window's length.
    """
    if window_len < 2:
        raise ValueError("window_len must be at least 2")
    if max_cycles < 1:
        raise ValueError("max_cycles must be at least 1")
    return max_cycles / window_len


def stride_for_rho(rho: float) -> int:
    """Largest subsampling step that keeps 8 samples per threshold-rate cycle."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    return max(1, math.floor(1.0 / (SAMPLES_PER_CYCLE * rho)))


def split_offset(width: int, split_ratio: float) -> int:
    """Column index where a window of ``width`` splits into two children.

    The left child absorbs the extra column when the split is uneven; both
    children are always non-empty.
    """
    if width < 2:
        raise ValueError("cannot split a window narrower than 2")
    return min(width - 1, max(1, math.ceil(split_ratio * width)))


def _dmd_with_rank_fallback(
    factors: SVDFactors, y: np.ndarray, delta_t: float, x0: np.ndarray
) -> DMDResult | None:
    """Projected-operator fit that degrades instead of failing on flat windows.

    Residual windows deep in the tree can be numerically rank-deficient (all
    structure already explained above). Retrying at the numerical rank keeps
    whatever is genuinely there; a window with no signal at all yields None.
    """
    try:
        return dmd_from_factors(factors, y, delta_t, x0=x0)
    except RankDeficiencyError:
        sigma = factors.sigma
        if sigma.size == 0 or sigma[0] <= 0.0:
            return None
        tol = np.finfo(np.float64).eps * max(factors.n_rows, factors.n_cols) * sigma[0]
        keep = int(np.count_nonzero(sigma > tol))
        if keep == 0:
            return None
        trimmed = SVDFactors(
            u=factors.u[:, :keep],
            sigma=sigma[:keep],
            v=factors.v[:, :keep],
            updates=factors.updates,
        )
        return dmd_from_factors(trimmed, y, delta_t, x0=x0)


def _rescale_to_original_units(result: DMDResult, delta_t: float) -> DMDResult:
    """Express a fit made on subsampled snapshots per original time step.

    The continuous exponents are stride-invariant already; only the discrete
    eigenvalues change, to one original step of evolution each.
    """
    finite = np.isfinite(result.exponents)
    lam = np.zeros(result.rank, dtype=np.complex128)
    lam[finite] = np.exp(result.exponents[finite] * delta_t)
    return DMDResult(
        modes=result.modes,
        eigenvalues=lam.astype(np.complex128),
        exponents=result.exponents,
        amplitudes=result.amplitudes,
        delta_t=delta_t,
    )


def fit_node(
    window: np.ndarray,
    level: int,
    t_start: int,
    t_end: int,
    config: MrDMDConfig,
    delta_t: float = 1.0,
    *,
    keep_cache: bool = False,
) -> tuple[MrDMDNode, np.ndarray]:
    """Fit one window: slow modes in, residual out.

    The window is subsampled at the stride matched to its slow threshold, the
    operator is fit on the subsampled shifted pair with the correspondingly
    longer effective time step, and only modes passing the slow test survive.
    Their reconstruction is evaluated at every original time point so the
    returned residual is dense. Windows narrower than ``MIN_WINDOW`` get a
    zero-mode node and pass through unchanged.

    Windows at the recursion floor (``level >= max_levels``, below the root)
    are the last chance to explain anything: they fit at full temporal
    resolution and keep every mode the rank policy retains, instead of
    filtering by the slow test. Without this, dynamics faster than the
    deepest window's threshold would be silently discarded — and worse,
    subsampling would fold them onto wrong frequencies.

    Subsampled (non-floor) fits carry an energy guard: content faster than
    the subsampled grid resolves can fold into the slow band and masquerade
    as a slow mode, and subtracting such an impostor corrupts every child
    window. A retention that shrinks the window's energy by less than
    ``GUARD_MARGIN`` is dropped and the window passed through for deeper,
    finer-grained levels to explain.
    """
    width = t_end - t_start
    if width < 1:
        raise ValueError("window must be non-empty")
    if window.ndim != 2 or window.shape[1] != width:
        raise ValueError("window shape disagrees with the index range")
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")

    n_sensors = window.shape[0]
    rho = config.max_cycles / width
    terminal = level >= config.max_levels and level > 1
    stride = 1 if terminal else stride_for_rho(rho)

    if width < MIN_WINDOW:
        node = MrDMDNode(
            level=level,
            t_start=t_start,
            t_end=t_end,
            stride=stride,
            rho=rho,
            dmd=DMDResult.empty(n_sensors, delta_t),
        )
        return node, np.array(window, dtype=np.float64, copy=True)

    sub = np.ascontiguousarray(window[:, ::stride], dtype=np.float64)
    rank, use_svht = _resolve_rank(config.rank_policy)
    factors = truncated_svd(sub[:, :-1], rank=rank, use_svht=use_svht)
    raw = _dmd_with_rank_fallback(factors, sub[:, 1:], stride * delta_t, sub[:, 0])

    if raw is None:
        node_dmd = DMDResult.empty(n_sensors, delta_t)
    elif terminal:
        node_dmd = _rescale_to_original_units(raw, delta_t)
    else:
        rescaled = _rescale_to_original_units(raw, delta_t)
        node_dmd = rescaled.select(slow_mode_indices(rescaled, rho))

    cache = None
    if keep_cache:
        cache = LevelCache(
            stride=stride,
            columns=sub.copy(),
            factors=factors,
            data_norm=float(np.linalg.norm(window)),
        )

    times = np.arange(width, dtype=np.float64) * delta_t
    residual = np.asarray(window, dtype=np.float64) - reconstruct(node_dmd, times)
    if not terminal and node_dmd.rank > 0:
        if np.linalg.norm(residual) > np.linalg.norm(window) * (1.0 - GUARD_MARGIN):
            node_dmd = DMDResult.empty(n_sensors, delta_t)
            residual = np.array(window, dtype=np.float64, copy=True)

    node = MrDMDNode(
        level=level,
        t_start=t_start,
        t_end=t_end,
        stride=stride,
        rho=rho,
        dmd=node_dmd,
        svd_cache=cache,
    )
    return node, residual


def _fit_recursive(
    values: np.ndarray,
    level: int,
    t_start: int,
    t_end: int,
    config: MrDMDConfig,
    delta_t: float,
) -> MrDMDNode:
    keep_cache = level == 1 or config.cache_all_levels
    node, residual = fit_node(
        values, level, t_start, t_end, config, delta_t, keep_cache=keep_cache
    )
    width = t_end - t_start
    if level >= config.max_levels or width < MIN_WINDOW:
        return node
    offset = split_offset(width, config.split_ratio)
    left = _fit_recursive(
        residual[:, :offset], level + 1, t_start, t_start + offset, config, delta_t
    )
    right = _fit_recursive(
        residual[:, offset:], level + 1, t_start + offset, t_end, config, delta_t
    )
    return replace(node, children=(left, right))


def mrdmd_fit(data: SensorMatrix, config: MrDMDConfig | None = None) -> MrDMDTree:
    """Decompose a sensor matrix into the full multiresolution tree.

    Deterministic: the same data and configuration always produce the same
    tree, down to the fixed sign and phase conventions of the factorizations.
    """
    if config is None:
        config = MrDMDConfig()
    if data.n_snapshots < MIN_WINDOW:
        raise ValueError(f"need at least {MIN_WINDOW} snapshots to fit")
    root = _fit_recursive(
        np.asarray(data.values, dtype=np.float64),
        level=1,
        t_start=0,
        t_end=data.n_snapshots,
        config=config,
        delta_t=data.delta_t,
    )
    return MrDMDTree(
        root=root,
        config=config,
        sensor_ids=data.sensor_ids,
        total_timesteps=data.n_snapshots,
        delta_t=data.delta_t,
    )


def _walk(node: MrDMDNode, path: str) -> Iterator[tuple[str, MrDMDNode]]:
    yield path, node
    for index, child in enumerate(node.children):
        yield from _walk(child, f"{path}.{index}")


def iter_nodes(tree: MrDMDTree) -> Iterator[tuple[str, MrDMDNode]]:
    """Depth-first walk over (path, node) pairs, parents before children.

    Paths are dotted child indices rooted at "0": the root is "0", its left
    child "0.0", that child's right child "0.0.1", and so on. The order is
    deterministic and is the canonical ordering for spectrum export.
    """
    yield from _walk(tree.root, "0")


def node_at(tree: MrDMDTree, path: str) -> MrDMDNode:
    """Resolve a dotted path produced by iter_nodes back to its node."""
    parts = path.split(".")
    if parts[0] != "0":
        raise KeyError(f"unknown node path: {path!r}")
    node = tree.root
    for part in parts[1:]:
        if part not in ("0", "1") or node.is_leaf:
            raise KeyError(f"unknown node path: {path!r}")
        node = node.children[int(part)]
    return node


def leaf_windows(tree: MrDMDTree) -> list[tuple[int, int]]:
    """Leaf (t_start, t_end) windows in timeline order."""
    return [(n.t_start, n.t_end) for _, n in iter_nodes(tree) if n.is_leaf]


def max_level(tree: MrDMDTree) -> int:
    return max(node.level for _, node in iter_nodes(tree))


def mrdmd_reconstruct(
    tree: MrDMDTree,
    t_start: int = 0,
    t_end: int | None = None,
    selection: Mapping[str, Sequence[int]] | None = None,
) -> np.ndarray:
    """Sum every node's slow reconstruction over a timeline range.

    Each node contributes on the intersection of its window with the range,
    evaluated in window-local time. With ``selection`` (a mapping from node
    path to kept mode indices, as produced by the mode filter), only the
    listed modes of the listed nodes contribute. Superseded payloads never
    contribute.
    """
    if t_end is None:
        t_end = tree.total_timesteps
    if not 0 <= t_start <= t_end <= tree.total_timesteps:
        raise ValueError("range must lie within the fitted timeline")
    out = np.zeros((tree.n_sensors, t_end - t_start), dtype=np.float64)
    if t_start == t_end:
        return out
    for path, node in iter_nodes(tree):
        lo = max(t_start, node.t_start)
        hi = min(t_end, node.t_end)
        if lo >= hi or node.dmd.rank == 0:
            continue
        mask: Sequence[int] | None = None
        if selection is not None:
            kept = selection.get(path)
            if kept is None or len(kept) == 0:
                continue
            mask = kept
        times = (np.arange(lo, hi, dtype=np.float64) - node.t_start) * tree.delta_t
        out[:, lo - t_start : hi - t_start] += reconstruct(
            node.dmd, times, mode_mask=mask
        )
    return out
