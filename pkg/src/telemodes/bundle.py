"""Dashboard bundle: six JSON documents a rack UI renders without a backend.

A bundle directory holds ``meta.json`` (timeline, config, table of contents),
``layout.json`` (the floor grid), ``zscores.json`` (per analysis window, per
category, per rack node: score, display class, magnitude), ``series.json``
(per rack node and category: reconstructed — and optionally raw — time
series), ``spectrum.json`` (the mode table) and ``annotations.json``
(hardware-error and job-allocation node sets). Every document validates
against the published schema, every referenced node id must exist in the
layout, and building is deterministic: the same inputs produce byte-identical
files.

Sensors are tied to rack nodes through the z-score export rows (sensor id,
node id, category); a node's displayed score and series aggregate its member
sensors by plain mean.
"""

from __future__ import annotations

import json
from importlib.resources import files as _package_files
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .mrdmd import MrDMDTree, mrdmd_reconstruct
from .racklayout import (
    LayoutSpec,
    enumerate_nodes,
    layout_bounds,
    render_layout_string,
)
from .spectrum import spectrum_of
from .store import SensorMatrix
from .zscore import classify

BUNDLE_FILES = (
    "meta.json",
    "layout.json",
    "zscores.json",
    "series.json",
    "spectrum.json",
    "annotations.json",
)

SCHEMA_RESOURCE = "schemas/ui_bundle.schema.json"


class BundleError(ValueError):
    """A bundle that cannot be built or does not satisfy its contract."""


def load_schema() -> dict:
    text = _package_files("telemodes").joinpath(SCHEMA_RESOURCE).read_text()
    return json.loads(text)


def _dump(document: dict, path: Path) -> None:
    path.write_text(
        json.dumps(document, sort_keys=True, separators=(",", ":")) + "\n"
    )


def layout_document(layout: LayoutSpec) -> dict:
    width, height = layout_bounds(layout)
    ranges = {
        "rows": layout.rows,
        "racks": layout.racks,
        "cabinets": layout.cabinets,
        "slots": layout.slots,
        "blades": layout.blades,
        "nodes": layout.nodes,
    }
    return {
        "system": layout.system_name,
        "spec_string": render_layout_string(layout),
        "grid": {"width": width, "height": height},
        "tiers": {name: {"lo": r.lo, "hi": r.hi} for name, r in ranges.items()},
        "alignments": {
            "row": layout.row_align,
            "col": layout.col_align,
            "cabinet": layout.cabinet_align,
            "slot": layout.slot_align,
            "blade": layout.blade_align,
        },
        "nodes": [
            {"id": p.address.id, "x": p.x, "y": p.y} for p in enumerate_nodes(layout)
        ],
    }


def _coerce_rows(rows: Sequence[Mapping[str, str]], window_name: str) -> list[dict]:
    coerced = []
    for row in rows:
        try:
            coerced.append(
                {
                    "sensor_id": row["sensor_id"],
                    "node_id": row["node_id"],
                    "category": row["category"],
                    "magnitude": float(row["magnitude"]),
                    "z": float(row["z"]),
                }
            )
        except (KeyError, ValueError) as exc:
            raise BundleError(
                f"window {window_name!r}: malformed z-score row {dict(row)}: {exc}"
            ) from None
    return coerced


def build_bundle(
    tree: MrDMDTree,
    layout: LayoutSpec,
    zscore_windows: Sequence[Mapping],
    out_dir,
    annotations: Mapping | None = None,
    data: SensorMatrix | None = None,
) -> dict[str, Path]:
    """Assemble and write a bundle directory; returns the written paths.

    ``zscore_windows`` is a sequence of {name, t_start, t_end, rows} where
    rows follow the z-score export columns. ``data``, when given, must be the
    raw matrix behind the tree and adds raw series next to the reconstructed
    ones. Node ids in scores and annotations must exist in the layout.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    layout_doc = layout_document(layout)
    known_ids = {entry["id"] for entry in layout_doc["nodes"]}
    sensor_index = {sid: i for i, sid in enumerate(tree.sensor_ids)}

    # z-scores: aggregate member sensors per (window, category, rack node).
    windows_doc = []
    window_meta = []
    membership: dict[tuple[str, str], set[str]] = {}
    for win in zscore_windows:
        name = str(win["name"])
        t_start, t_end = int(win["t_start"]), int(win["t_end"])
        if not 0 <= t_start < t_end <= tree.total_timesteps:
            raise BundleError(
                f"window {name!r}: [{t_start}, {t_end}) outside the fitted "
                f"timeline of {tree.total_timesteps} steps"
            )
        rows = _coerce_rows(win["rows"], name)
        grouped: dict[str, dict[str, list]] = {}
        for row in rows:
            node_id = row["node_id"]
            if not node_id:
                continue  # sensor without a home on the rack floor
            if node_id not in known_ids:
                raise BundleError(
                    f"window {name!r}: node id {node_id!r} not in the layout"
                )
            if row["sensor_id"] not in sensor_index:
                raise BundleError(
                    f"window {name!r}: sensor {row['sensor_id']!r} not in the tree"
                )
            category = row["category"] or "uncategorized"
            grouped.setdefault(category, {}).setdefault(node_id, []).append(row)
            membership.setdefault((node_id, category), set()).add(row["sensor_id"])
        categories_doc = {}
        for category, nodes in grouped.items():
            cells = {}
            for node_id, node_rows in nodes.items():
                mean_z = float(np.mean([r["z"] for r in node_rows]))
                cells[node_id] = {
                    "z": mean_z,
                    "class": classify(mean_z),
                    "value": float(np.mean([r["magnitude"] for r in node_rows])),
                }
            categories_doc[category] = cells
        windows_doc.append(
            {
                "name": name,
                "t_start": t_start,
                "t_end": t_end,
                "categories": categories_doc,
            }
        )
        window_meta.append({"name": name, "t_start": t_start, "t_end": t_end})

    # series: mean over member sensors, reconstructed always, raw if provided.
    recon = mrdmd_reconstruct(tree)
    if data is not None and data.sensor_ids != tree.sensor_ids:
        raise BundleError("raw data's sensor ids differ from the tree's")
    series_nodes: dict[str, dict] = {}
    for (node_id, category), sensor_ids in sorted(membership.items()):
        indices = [sensor_index[sid] for sid in sorted(sensor_ids)]
        entry: dict = {"recon": [float(v) for v in recon[indices].mean(axis=0)]}
        if data is not None:
            entry["raw"] = [float(v) for v in data.values[indices].mean(axis=0)]
        series_nodes.setdefault(node_id, {})[category] = entry

    annotations = annotations or {}
    hardware = sorted(set(annotations.get("hardware_errors", ())))
    jobs_in = annotations.get("jobs", {})
    for node_id in hardware:
        if node_id not in known_ids:
            raise BundleError(f"hardware_errors: node id {node_id!r} not in the layout")
    jobs = {}
    for job, node_ids in jobs_in.items():
        for node_id in node_ids:
            if node_id not in known_ids:
                raise BundleError(
                    f"job {job!r}: node id {node_id!r} not in the layout"
                )
        jobs[str(job)] = sorted(set(node_ids))

    categories = sorted(
        {category for win in windows_doc for category in win["categories"]}
    )
    meta_doc = {
        "format_version": 1,
        "system": layout.system_name,
        "total_timesteps": tree.total_timesteps,
        "delta_t": tree.delta_t,
        "config": {
            "max_levels": tree.config.max_levels,
            "max_cycles": tree.config.max_cycles,
            "rank_policy": tree.config.rank_policy,
            "split_ratio": tree.config.split_ratio,
        },
        "categories": categories,
        "windows": window_meta,
        "files": {
            "layout": "layout.json",
            "zscores": "zscores.json",
            "series": "series.json",
            "spectrum": "spectrum.json",
            "annotations": "annotations.json",
        },
    }
    spectrum_doc = {
        "points": [
            {
                "level": pt.level,
                "node_path": pt.node_path,
                "mode_index": pt.mode_index,
                "frequency_hz": pt.frequency_hz,
                "power": pt.power,
                "growth": pt.growth,
            }
            for pt in spectrum_of(tree)
        ]
    }

    documents = {
        "meta.json": meta_doc,
        "layout.json": layout_doc,
        "zscores.json": {"windows": windows_doc},
        "series.json": {"delta_t": tree.delta_t, "nodes": series_nodes},
        "spectrum.json": spectrum_doc,
        "annotations.json": {"hardware_errors": hardware, "jobs": jobs},
    }
    paths = {}
    for filename, document in documents.items():
        path = out / filename
        _dump(document, path)
        paths[filename] = path
    validate_bundle(out)
    return paths


def validate_bundle(bundle_dir) -> dict[str, dict]:
    """Check a bundle directory against the schema and cross-file invariants.

    Returns the parsed documents keyed by filename; raises BundleError with
    the first violation found.
    """
    import jsonschema

    bundle_dir = Path(bundle_dir)
    schema = load_schema()
    documents: dict[str, dict] = {}
    for filename in BUNDLE_FILES:
        path = bundle_dir / filename
        if not path.exists():
            raise BundleError(f"missing bundle file: {filename}")
        try:
            documents[filename] = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise BundleError(f"{filename}: invalid JSON: {exc}") from None
        member = filename.removesuffix(".json")
        sub_schema = {"$ref": f"#/$defs/{member}", "$defs": schema["$defs"]}
        validator = jsonschema.Draft202012Validator(sub_schema)
        errors = sorted(validator.iter_errors(documents[filename]), key=str)
        if errors:
            first = errors[0]
            location = "/".join(str(part) for part in first.absolute_path)
            raise BundleError(f"{filename}: at {location!r}: {first.message}")

    known_ids = {entry["id"] for entry in documents["layout.json"]["nodes"]}
    total = documents["meta.json"]["total_timesteps"]

    for win in documents["zscores.json"]["windows"]:
        if not 0 <= win["t_start"] < win["t_end"] <= total:
            raise BundleError(
                f"zscores.json: window {win['name']!r} outside the timeline"
            )
        for category, cells in win["categories"].items():
            for node_id in cells:
                if node_id not in known_ids:
                    raise BundleError(
                        f"zscores.json: node id {node_id!r} not in the layout"
                    )
    for node_id in documents["series.json"]["nodes"]:
        if node_id not in known_ids:
            raise BundleError(f"series.json: node id {node_id!r} not in the layout")
    ann = documents["annotations.json"]
    for node_id in ann["hardware_errors"]:
        if node_id not in known_ids:
            raise BundleError(
                f"annotations.json: node id {node_id!r} not in the layout"
            )
    for job, node_ids in ann["jobs"].items():
        for node_id in node_ids:
            if node_id not in known_ids:
                raise BundleError(
                    f"annotations.json: job {job!r} references unknown "
                    f"node id {node_id!r}"
                )
    return documents
