"""Command-line pipeline: fit, stream updates, exports, benchmark, serving.

Subcommands: ``synth``, ``fit``, ``partial-fit``, ``spectrum``, ``zscore``,
``export-ui``, ``serve``, ``benchmark``. Global flags (``--config``,
``--seed``, ``--out``) come before the subcommand name. Exit codes: 0 on
success, 2 on error, 3 when a command finished but selected nothing to
report.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .bench import (
    DEFAULT_CHUNK,
    DEFAULT_REPEATS,
    DEFAULT_SENSORS,
    DEFAULT_SIZES,
    format_table,
    run_benchmark,
    write_benchmark_csv,
)
from .bundle import BundleError, build_bundle
from .incremental import partial_fit
from .mrdmd import MrDMDConfig, mrdmd_fit, mrdmd_reconstruct, node_at
from .racklayout import LayoutError, enumerate_nodes, parse_layout
from .server import serve_forever
from .spectrum import filter_modes, plot_spectrum, spectrum_of, write_spectrum_csv
from .store import (
    IngestError,
    ModeSpec,
    generate_synthetic,
    ingest_csv,
    load_sensor_map,
    window,
    write_csv,
)
from .treeio import TreeFileError, load_tree, save_tree
from .zscore import (
    AGGREGATIONS,
    BaselineSpec,
    read_zscore_csv,
    select_baseline,
    sensor_magnitudes,
    write_zscore_csv,
    zscores,
)

__all__ = ["RunConfig", "load_run_config", "main"]

EXIT_OK = 0
EXIT_ERROR = 2
EXIT_EMPTY = 3


@dataclass(frozen=True)
class RunConfig:
    """One place for every pipeline tunable; JSON-loadable, flag-overridable.

    ``drift_threshold=None`` keeps the streaming default (1% of the
    accumulated data norm); ``f_max=None`` means unbounded.
    """

    max_levels: int = 4
    max_cycles: float = 2.0
    rank_policy: int | str = "svht"
    split_ratio: float = 0.5
    drift_threshold: float | None = None
    f_min: float = 0.0
    f_max: float | None = None
    power_floor: float | str = 0.0
    aggregation: str = "sum_abs"
    baseline_band: tuple[float, float] | None = None
    baseline_ids: tuple[str, ...] | None = None
    layout: str | None = None
    sensor_map: str | None = None
    out_dir: str = "out"

    def mrdmd_config(self) -> MrDMDConfig:
        return MrDMDConfig(
            max_levels=self.max_levels,
            max_cycles=self.max_cycles,
            rank_policy=self.rank_policy,
            split_ratio=self.split_ratio,
        )

    def band(self) -> tuple[float, float]:
        return self.f_min, math.inf if self.f_max is None else self.f_max

    def baseline_spec(self) -> BaselineSpec:
        if self.baseline_ids is not None:
            return BaselineSpec(explicit_ids=tuple(self.baseline_ids))
        if self.baseline_band is not None:
            low, high = self.baseline_band
            return BaselineSpec(band_low=low, band_high=high)
        return BaselineSpec()


def load_run_config(path) -> RunConfig:
    """Read a RunConfig from JSON, rejecting unknown keys."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"{path}: unknown config keys: {', '.join(unknown)}")
    if "baseline_band" in raw and raw["baseline_band"] is not None:
        band = raw["baseline_band"]
        if not (isinstance(band, (list, tuple)) and len(band) == 2):
            raise ValueError(f"{path}: baseline_band must be [low, high]")
        raw["baseline_band"] = (float(band[0]), float(band[1]))
    if "baseline_ids" in raw and raw["baseline_ids"] is not None:
        raw["baseline_ids"] = tuple(str(s) for s in raw["baseline_ids"])
    if "rank_policy" in raw and isinstance(raw["rank_policy"], str):
        raw["rank_policy"] = parse_rank_policy(raw["rank_policy"])
    return RunConfig(**raw)


def parse_rank_policy(text: str) -> int | str:
    if text in ("svht", "full"):
        return text
    try:
        return int(text)
    except ValueError:
        raise ValueError(
            f"invalid rank policy {text!r}: expected 'svht', 'full', or an integer"
        ) from None


def _parse_power_floor(text: str) -> float | str:
    if text.endswith("%"):
        return text
    return float(text)


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    """Fold command-line flags (when present) over the config-file values."""
    updates = {}
    for name in (
        "max_levels",
        "max_cycles",
        "rank_policy",
        "split_ratio",
        "drift_threshold",
        "f_min",
        "f_max",
        "power_floor",
        "aggregation",
        "layout",
        "sensor_map",
    ):
        value = getattr(args, name, None)
        if value is not None:
            updates[name] = value
    if getattr(args, "band_low", None) is not None or getattr(
        args, "band_high", None
    ) is not None:
        low = args.band_low if args.band_low is not None else -math.inf
        high = args.band_high if args.band_high is not None else math.inf
        updates["baseline_band"] = (low, high)
        updates["baseline_ids"] = None
    if getattr(args, "baseline_ids", None) is not None:
        updates["baseline_ids"] = tuple(
            s.strip() for s in args.baseline_ids.split(",") if s.strip()
        )
    if args.out is not None:
        updates["out_dir"] = args.out
    return replace(config, **updates)


def _out_path(config: RunConfig, name: str) -> Path:
    root = Path(config.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    return root / name


def _print(line: str) -> None:
    print(line, flush=True)


# ---------------------------------------------------------------------------
# synth


_DEFAULT_MODES = (
    (0.001, 1.0, 0.0),
    (0.05, 0.5, 0.0),
)


def _parse_mode_flag(text: str):
    parts = text.split(":")
    if not 2 <= len(parts) <= 4:
        raise ValueError(
            f"invalid --mode {text!r}: expected freq:amp[:growth[:phase]]"
        )
    freq, amp = float(parts[0]), float(parts[1])
    growth = float(parts[2]) if len(parts) > 2 else 0.0
    phase = float(parts[3]) if len(parts) > 3 else 0.0
    return freq, amp, growth, phase


def cmd_synth(config: RunConfig, args) -> int:
    rng = np.random.default_rng(args.seed)
    specs = []
    raw_modes = args.mode if args.mode else [f"{f}:{a}:{g}" for f, a, g in _DEFAULT_MODES]
    for text in raw_modes:
        freq, amp, growth, phase = _parse_mode_flag(str(text))
        pattern = rng.standard_normal(args.sensors) + 1j * rng.standard_normal(
            args.sensors
        )
        specs.append(
            ModeSpec(
                pattern=pattern,
                frequency_hz=freq,
                growth_rate=growth,
                amplitude=amp,
                phase=phase,
            )
        )
    data, _ = generate_synthetic(
        args.sensors,
        args.steps,
        specs,
        noise_sigma=args.noise,
        delta_t=args.delta_t,
        seed=args.seed + 1,
    )
    csv_path = Path(args.csv_out) if args.csv_out else _out_path(config, "synthetic.csv")
    write_csv(data, csv_path)
    _print(f"wrote {data.n_sensors} sensors x {data.n_snapshots} steps to {csv_path}")

    if args.map_out or config.layout is not None:
        if config.layout is None:
            raise ValueError("--map-out needs a layout (--layout or config)")
        nodes = enumerate_nodes(parse_layout(config.layout))
        categories = [c.strip() for c in args.categories.split(",") if c.strip()]
        if not categories:
            raise ValueError("--categories must name at least one category")
        mapping = {
            sensor_id: {
                "node": nodes[i % len(nodes)].address.id,
                "category": categories[i % len(categories)],
            }
            for i, sensor_id in enumerate(data.sensor_ids)
        }
        map_path = (
            Path(args.map_out) if args.map_out else _out_path(config, "sensor_map.json")
        )
        with open(map_path, "w", encoding="utf-8") as fh:
            json.dump(mapping, fh, indent=2, sort_keys=True)
            fh.write("\n")
        _print(f"wrote sensor map for {len(mapping)} sensors to {map_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# fit / partial-fit


def cmd_fit(config: RunConfig, args) -> int:
    data = ingest_csv(args.data)
    t0 = time.perf_counter()
    tree = mrdmd_fit(data, config.mrdmd_config())
    elapsed = time.perf_counter() - t0
    recon = mrdmd_reconstruct(tree)
    gap = float(np.linalg.norm(recon - data.values))
    norm = float(np.linalg.norm(data.values))
    tree_path = Path(args.tree_out) if args.tree_out else _out_path(config, "tree.tm")
    save_tree(tree, tree_path)
    rel = gap / norm if norm > 0 else 0.0
    _print(f"fit {data.n_sensors} sensors x {data.n_snapshots} steps")
    _print(f"reconstruction gap: {gap:.6e} ({rel:.3e} of data norm)")
    _print(f"fit time: {elapsed:.3f} s")
    _print(f"tree written to {tree_path}")
    return EXIT_OK


def cmd_partial_fit(config: RunConfig, args) -> int:
    tree = load_tree(args.tree)
    chunk = ingest_csv(args.chunk, delta_t=tree.delta_t)
    t0 = time.perf_counter()
    updated, report = partial_fit(tree, chunk, threshold=config.drift_threshold)
    elapsed = time.perf_counter() - t0
    tree_path = Path(args.tree_out) if args.tree_out else Path(args.tree)
    save_tree(updated, tree_path)
    flag = "exceeded" if report.exceeded else "within threshold"
    _print(
        f"appended {chunk.n_snapshots} steps "
        f"(timeline now {updated.total_timesteps})"
    )
    _print(
        f"drift: {report.frobenius_diff:.6e} vs threshold "
        f"{report.threshold:.6e} ({flag})"
    )
    _print(f"update time: {elapsed:.3f} s")
    _print(f"tree written to {tree_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# spectrum / zscore


def cmd_spectrum(config: RunConfig, args) -> int:
    tree = load_tree(args.tree)
    f_min, f_max = config.band()
    with warnings.catch_warnings():
        # the empty-selection warning is reported once, on stderr, below
        warnings.simplefilter("ignore", RuntimeWarning)
        selection = filter_modes(
            tree, f_min=f_min, f_max=f_max, power_floor=config.power_floor
        )
    points = [
        p
        for p in spectrum_of(tree)
        if p.node_path in selection and p.mode_index in selection[p.node_path]
    ]
    csv_path = (
        Path(args.csv_out) if args.csv_out else _out_path(config, "spectrum.csv")
    )
    write_spectrum_csv(points, csv_path)
    _print(f"wrote {len(points)} spectrum rows to {csv_path}")
    plot_path = (
        Path(args.plot_out) if args.plot_out else _out_path(config, "spectrum.png")
    )
    plot_spectrum(points, plot_path)
    _print(f"wrote spectrum plot to {plot_path}")
    if not points:
        print("warning: mode filter selected no modes", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def _parse_window_flag(text: str, total: int):
    parts = text.rsplit(":", 2)
    if len(parts) != 3:
        raise ValueError(f"invalid --window {text!r}: expected NAME:START:END")
    name, start, end = parts[0], int(parts[1]), int(parts[2])
    if not name:
        raise ValueError(f"invalid --window {text!r}: empty name")
    if not 0 <= start < end <= total:
        raise ValueError(
            f"invalid --window {text!r}: need 0 <= start < end <= {total}"
        )
    return name, start, end


def _restrict_selection(tree, selection, t_start: int, t_end: int):
    """Keep only modes from nodes whose window overlaps [t_start, t_end)."""
    kept = {}
    for path, indices in selection.items():
        node = node_at(tree, path)
        if node.t_start < t_end and node.t_end > t_start:
            kept[path] = indices
    return kept


def cmd_zscore(config: RunConfig, args) -> int:
    tree = load_tree(args.tree)
    data = ingest_csv(args.data, delta_t=tree.delta_t)
    if data.sensor_ids != tree.sensor_ids:
        raise ValueError("data sensors do not match the fitted tree")
    sensor_map = load_sensor_map(config.sensor_map) if config.sensor_map else None
    f_min, f_max = config.band()
    with warnings.catch_warnings():
        # empty windows are reported individually, on stderr, below
        warnings.simplefilter("ignore", RuntimeWarning)
        selection = filter_modes(
            tree, f_min=f_min, f_max=f_max, power_floor=config.power_floor
        )
    windows = args.window if args.window else [f"full:0:{data.n_snapshots}"]
    spec = config.baseline_spec()
    wrote_any = False
    for text in windows:
        name, start, end = _parse_window_flag(text, data.n_snapshots)
        piece = window(data, start, end)
        restricted = _restrict_selection(tree, selection, start, end)
        if not restricted:
            print(
                f"warning: window {name!r}: mode filter selected no modes",
                file=sys.stderr,
            )
            continue
        baseline = select_baseline(piece, spec)
        magnitudes = sensor_magnitudes(
            tree, restricted, aggregation=config.aggregation
        )
        report = zscores(magnitudes, baseline, selection=restricted)
        csv_path = _out_path(config, f"zscore_{name}.csv")
        write_zscore_csv(report, tree.sensor_ids, csv_path, sensor_map=sensor_map)
        _print(
            f"window {name} [{start},{end}): baseline {report.n_baseline} "
            f"sensors, wrote {csv_path}"
        )
        wrote_any = True
    return EXIT_OK if wrote_any else EXIT_EMPTY


# ---------------------------------------------------------------------------
# export-ui / serve


def _load_annotation_files(paths):
    hardware: set[str] = set()
    jobs: dict[str, set[str]] = {}
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if not isinstance(doc, dict):
            raise ValueError(f"{path}: annotations must be a JSON object")
        unknown = sorted(set(doc) - {"hardware_errors", "jobs"})
        if unknown:
            raise ValueError(f"{path}: unknown annotation keys: {', '.join(unknown)}")
        errors = doc.get("hardware_errors", [])
        if not isinstance(errors, list):
            raise ValueError(f"{path}: hardware_errors must be a list")
        hardware.update(str(n) for n in errors)
        job_map = doc.get("jobs", {})
        if not isinstance(job_map, dict):
            raise ValueError(f"{path}: jobs must be an object of name -> id list")
        for job, ids in job_map.items():
            if not isinstance(ids, list):
                raise ValueError(f"{path}: job {job!r} must map to a list of ids")
            jobs.setdefault(str(job), set()).update(str(n) for n in ids)
    return {
        "hardware_errors": sorted(hardware),
        "jobs": {name: sorted(ids) for name, ids in jobs.items()},
    }


def _parse_zscore_flag(text: str):
    parts = text.split(":", 3)
    if len(parts) != 4:
        raise ValueError(
            f"invalid --zscore {text!r}: expected NAME:START:END:CSV_PATH"
        )
    name, start, end, path = parts[0], int(parts[1]), int(parts[2]), parts[3]
    if not name:
        raise ValueError(f"invalid --zscore {text!r}: empty window name")
    return {"name": name, "t_start": start, "t_end": end, "rows": read_zscore_csv(path)}


def cmd_export_ui(config: RunConfig, args) -> int:
    tree = load_tree(args.tree)
    if config.layout is None:
        raise ValueError("export-ui needs a layout string (--layout or config)")
    layout = parse_layout(config.layout)
    zscore_windows = [_parse_zscore_flag(str(text)) for text in args.zscore]
    annotations = (
        _load_annotation_files(args.annotations) if args.annotations else None
    )
    data = ingest_csv(args.data, delta_t=tree.delta_t) if args.data else None
    bundle_dir = (
        Path(args.bundle_out) if args.bundle_out else _out_path(config, "bundle")
    )
    written = build_bundle(
        tree,
        layout,
        zscore_windows,
        bundle_dir,
        annotations=annotations,
        data=data,
    )
    for stem in sorted(written):
        _print(f"wrote {written[stem]}")
    _print(f"bundle validated against schema in {bundle_dir}")
    return EXIT_OK


def cmd_serve(config: RunConfig, args) -> int:
    serve_forever(
        args.bundle_dir, port=args.port, host=args.host, ui_dir=args.ui
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# benchmark


def cmd_benchmark(config: RunConfig, args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(",") if s.strip())
    if not sizes:
        raise ValueError("--sizes must list at least one T")
    rows = run_benchmark(
        sizes=sizes,
        n_sensors=args.sensors,
        chunk=args.chunk,
        repeats=args.repeats,
        config=config.mrdmd_config(),
        seed=args.seed,
    )
    _print(format_table(rows))
    if args.csv_out:
        write_benchmark_csv(rows, args.csv_out)
        _print(f"wrote benchmark rows to {args.csv_out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_rank_flags(sub) -> None:
    sub.add_argument("--max-levels", type=int, dest="max_levels")
    sub.add_argument("--max-cycles", type=float, dest="max_cycles")
    sub.add_argument("--rank", type=parse_rank_policy, dest="rank_policy")
    sub.add_argument("--split-ratio", type=float, dest="split_ratio")


def _add_filter_flags(sub) -> None:
    sub.add_argument("--f-min", type=float, dest="f_min")
    sub.add_argument("--f-max", type=float, dest="f_max")
    sub.add_argument("--power-floor", type=_parse_power_floor, dest="power_floor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="telemodes",
        description="Streaming multiresolution modal analysis for HPC telemetry.",
    )
    parser.add_argument("--config", help="JSON run-configuration file")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--out", help="output directory (default 'out')")
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("synth", help="generate a synthetic telemetry CSV")
    sub.add_argument("--sensors", type=int, default=64)
    sub.add_argument("--steps", type=int, default=512)
    sub.add_argument("--noise", type=float, default=0.05)
    sub.add_argument("--delta-t", type=float, default=1.0, dest="delta_t")
    sub.add_argument(
        "--mode",
        action="append",
        help="freq:amp[:growth[:phase]] (repeatable; default two scales)",
    )
    sub.add_argument("--layout", help="layout string for the sensor map")
    sub.add_argument("--categories", default="temperature")
    sub.add_argument("--csv-out", dest="csv_out")
    sub.add_argument("--map-out", dest="map_out")
    sub.set_defaults(func=cmd_synth)

    sub = commands.add_parser("fit", help="fit a multiresolution tree from CSV")
    sub.add_argument("data", help="telemetry CSV")
    sub.add_argument("--tree-out", dest="tree_out")
    _add_rank_flags(sub)
    sub.set_defaults(func=cmd_fit)

    sub = commands.add_parser("partial-fit", help="append a chunk to a fitted tree")
    sub.add_argument("tree", help="tree file from fit")
    sub.add_argument("chunk", help="CSV with the new snapshots")
    sub.add_argument("--threshold", type=float, dest="drift_threshold")
    sub.add_argument("--tree-out", dest="tree_out")
    sub.set_defaults(func=cmd_partial_fit)

    sub = commands.add_parser("spectrum", help="export the mode spectrum")
    sub.add_argument("tree")
    sub.add_argument("--csv-out", dest="csv_out")
    sub.add_argument("--plot-out", dest="plot_out")
    _add_filter_flags(sub)
    sub.set_defaults(func=cmd_spectrum)

    sub = commands.add_parser("zscore", help="export per-sensor z-scores")
    sub.add_argument("tree")
    sub.add_argument("--data", required=True, help="raw CSV (baseline selection)")
    sub.add_argument("--map", dest="sensor_map", help="sensor map JSON")
    sub.add_argument("--band-low", type=float, dest="band_low")
    sub.add_argument("--band-high", type=float, dest="band_high")
    sub.add_argument(
        "--baseline-ids", dest="baseline_ids", help="comma-separated sensor ids"
    )
    sub.add_argument("--aggregation", choices=AGGREGATIONS, dest="aggregation")
    sub.add_argument(
        "--window",
        action="append",
        help="NAME:START:END (repeatable; default the full timeline)",
    )
    _add_filter_flags(sub)
    sub.set_defaults(func=cmd_zscore)

    sub = commands.add_parser("export-ui", help="write the dashboard bundle")
    sub.add_argument("tree")
    sub.add_argument(
        "--zscore",
        action="append",
        required=True,
        help="NAME:START:END:CSV_PATH (repeatable)",
    )
    sub.add_argument("--layout")
    sub.add_argument(
        "--annotations",
        action="append",
        help="JSON with hardware_errors / jobs (repeatable)",
    )
    sub.add_argument("--data", help="raw CSV to include measured series")
    sub.add_argument("--bundle-out", dest="bundle_out")
    sub.set_defaults(func=cmd_export_ui)

    sub = commands.add_parser("serve", help="serve a bundle over HTTP")
    sub.add_argument("bundle_dir")
    sub.add_argument("--port", type=int, default=8787)
    sub.add_argument("--host", default="127.0.0.1")
    sub.add_argument("--ui", help="static dashboard directory")
    sub.set_defaults(func=cmd_serve)

    sub = commands.add_parser("benchmark", help="time initial vs streaming fits")
    sub.add_argument("--sizes", default=",".join(str(s) for s in DEFAULT_SIZES))
    sub.add_argument("--sensors", type=int, default=DEFAULT_SENSORS)
    sub.add_argument("--chunk", type=int, default=DEFAULT_CHUNK)
    sub.add_argument("--repeats", type=int, default=DEFAULT_REPEATS)
    sub.add_argument("--csv-out", dest="csv_out")
    _add_rank_flags(sub)
    sub.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_run_config(args.config) if args.config else RunConfig()
        config = _apply_overrides(config, args)
        return args.func(config, args)
    except (
        IngestError,
        LayoutError,
        TreeFileError,
        BundleError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
