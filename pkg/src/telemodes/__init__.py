"""Streaming multiresolution modal analysis for HPC telemetry.

The pipeline: ingest sensor matrices (`store`), decompose them into a
multiresolution tree of dynamic modes (`dmd`, `mrdmd`), extend the tree as
new snapshots stream in (`svd`, `incremental`), then turn the result into
operator-facing artifacts — spectra (`spectrum`), per-sensor z-scores
(`zscore`), rack topologies (`racklayout`), and a static dashboard bundle
(`bundle`, `server`). `cli` ties the stages together.
"""

from .bench import (
    BenchmarkRow,
    benchmark_dataset,
    format_table,
    run_benchmark,
    write_benchmark_csv,
)
from .bundle import (
    BUNDLE_FILES,
    BundleError,
    build_bundle,
    load_schema,
    validate_bundle,
)
from .dmd import (
    DEAD_EXPONENT,
    SLOW_RATE_TOLERANCE,
    DMDResult,
    RankDeficiencyError,
    amplitudes,
    dmd_from_factors,
    fit_dmd,
    oscillation_rates,
    reconstruct,
    slow_mode_indices,
)
from .incremental import (
    DEFAULT_DRIFT_FRACTION,
    DriftReport,
    drift_check,
    partial_fit,
    reconstruction_gap,
)
from .mrdmd import (
    GUARD_MARGIN,
    MIN_WINDOW,
    SAMPLES_PER_CYCLE,
    LevelCache,
    MrDMDConfig,
    MrDMDNode,
    MrDMDTree,
    fit_node,
    rho_for_window,
    iter_nodes,
    leaf_windows,
    max_level,
    mrdmd_fit,
    mrdmd_reconstruct,
    node_at,
    split_offset,
    stride_for_rho,
)
from .racklayout import (
    AISLE,
    NODE_ID_PATTERN,
    IndexRange,
    LayoutError,
    LayoutSpec,
    NodeAddress,
    PlacedNode,
    enumerate_nodes,
    layout_bounds,
    parse_layout,
    parse_node_id,
    render_layout_string,
)
from .server import make_server, serve_forever
from .spectrum import (
    ModeSelection,
    SpectrumPoint,
    filter_modes,
    mode_frequency,
    mode_power,
    plot_spectrum,
    read_spectrum_csv,
    selection_size,
    spectrum_of,
    write_spectrum_csv,
)
from .store import (
    IngestError,
    ModeSpec,
    SensorMatrix,
    SnapshotPair,
    concat,
    generate_synthetic,
    ingest_csv,
    load_sensor_map,
    replay_chunks,
    shift_pair,
    window,
    write_csv,
)
from .svd import (
    SVDFactors,
    incremental_svd_update,
    orthonormality_drift,
    svht_rank,
    truncated_svd,
)
from .treeio import TreeFileError, load_tree, save_tree
from .zscore import (
    AGGREGATIONS,
    BASELINE_EDGE,
    CLASS_NAMES,
    HIGH_EDGE,
    LOW_EDGE,
    BaselineSpec,
    ZScoreReport,
    classify,
    read_zscore_csv,
    select_baseline,
    sensor_magnitudes,
    write_zscore_csv,
    zscores,
)

__version__ = "0.1.0"

__all__ = [
    "AGGREGATIONS",
    "AISLE",
    "BASELINE_EDGE",
    "BUNDLE_FILES",
    "BaselineSpec",
    "BenchmarkRow",
    "BundleError",
    "CLASS_NAMES",
    "DEAD_EXPONENT",
    "DEFAULT_DRIFT_FRACTION",
    "DMDResult",
    "DriftReport",
    "GUARD_MARGIN",
    "HIGH_EDGE",
    "IndexRange",
    "IngestError",
    "LOW_EDGE",
    "LayoutError",
    "LayoutSpec",
    "LevelCache",
    "MIN_WINDOW",
    "ModeSelection",
    "ModeSpec",
    "MrDMDConfig",
    "MrDMDNode",
    "MrDMDTree",
    "NODE_ID_PATTERN",
    "NodeAddress",
    "PlacedNode",
    "RankDeficiencyError",
    "SAMPLES_PER_CYCLE",
    "SLOW_RATE_TOLERANCE",
    "SVDFactors",
    "SensorMatrix",
    "SnapshotPair",
    "SpectrumPoint",
    "TreeFileError",
    "ZScoreReport",
    "amplitudes",
    "benchmark_dataset",
    "build_bundle",
    "classify",
    "concat",
    "dmd_from_factors",
    "drift_check",
    "enumerate_nodes",
    "filter_modes",
    "fit_dmd",
    "fit_node",
    "format_table",
    "generate_synthetic",
    "incremental_svd_update",
    "ingest_csv",
    "iter_nodes",
    "layout_bounds",
    "leaf_windows",
    "load_schema",
    "load_sensor_map",
    "load_tree",
    "make_server",
    "max_level",
    "mode_frequency",
    "mode_power",
    "mrdmd_fit",
    "mrdmd_reconstruct",
    "node_at",
    "orthonormality_drift",
    "oscillation_rates",
    "parse_layout",
    "parse_node_id",
    "partial_fit",
    "plot_spectrum",
    "read_spectrum_csv",
    "read_zscore_csv",
    "reconstruct",
    "reconstruction_gap",
    "render_layout_string",
    "replay_chunks",
    "rho_for_window",
    "run_benchmark",
    "save_tree",
    "select_baseline",
    "selection_size",
    "sensor_magnitudes",
    "serve_forever",
    "shift_pair",
    "slow_mode_indices",
    "spectrum_of",
    "split_offset",
    "stride_for_rho",
    "svht_rank",
    "truncated_svd",
    "validate_bundle",
    "window",
    "write_benchmark_csv",
    "write_csv",
    "write_spectrum_csv",
    "write_zscore_csv",
    "zscores",
]
