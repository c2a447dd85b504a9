"""Regenerate the dashboard's test fixture bundles.

Two bundles are produced with the telemodes pipeline:

* ``flip48``   — 48 nodes, two categories, two windows whose temperature
  pattern swaps hot and cool halves between windows; raw series included.
* ``machine1408`` — the full 1408-node reference layout, same two-window
  flip, reconstruction series only (keeps the fixture a few MB).

The z-score tables are crafted rather than measured so the window-to-window
flip is exact: every temperature row in the "hot" half scores high and the
other half low, then the halves trade places in the second window. The CSVs
still go through the ordinary export path, so everything else (schema,
aggregation, referential checks) is the production code's doing.

Run from the repository root with the package installed:

    python3 frontend/scripts/make_fixtures.py
"""

from __future__ import annotations

import csv
import json
import pathlib
import shutil
import subprocess
import sys

from telemodes import classify, parse_node_id

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures"

LAYOUT48 = "demo 1 2 row0-1:0-2 2 c:0-1 1 s:0-1 1 b:0 n:0-1"
LAYOUT1408 = "xc40 1 2 row0-1:0-10 2 c:0-7 1 s:0-7 1 b:0 n:0"


def run(*argv: str) -> None:
    print("$", " ".join(argv))
    subprocess.run(argv, check=True)


def temperature_z(row: int, cabinet: int, hot_row: int) -> float:
    if row == hot_row:
        return 2.3 + 0.15 * cabinet
    return -1.7 - 0.15 * cabinet


def power_z(rack: int, slot: int) -> float:
    return 0.8 * (rack % 2) - 0.4 + 0.05 * slot


def write_window_csv(path: pathlib.Path, sensor_map: dict, hot_row: int) -> None:
    # The synthesizer assigns sensor i to node i % N, so the first half of
    # the sensor ids covers every node once and the second half covers it
    # again. Categorizing by half (rather than trusting the synthesizer's
    # round-robin, which parity-locks on even node counts) gives every node
    # one temperature sensor and one power sensor.
    ordered = sorted(sensor_map)
    half = len(ordered) // 2
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["sensor_id", "node_id", "category", "magnitude", "z", "class"])
        for i, sensor_id in enumerate(ordered):
            entry = sensor_map[sensor_id]
            address = parse_node_id(entry["node"])
            if i < half:
                category = "temperature"
                z = temperature_z(address.row, address.cabinet, hot_row)
            else:
                category = "power"
                z = power_z(address.rack, address.slot)
            magnitude = 20.0 + 2.0 * z
            writer.writerow(
                [sensor_id, entry["node"], category,
                 repr(magnitude), repr(z), classify(z)]
            )


def annotations_for(sensor_map: dict) -> dict:
    nodes = sorted({entry["node"] for entry in sensor_map.values()})
    return {
        "hardware_errors": [nodes[0], nodes[len(nodes) // 2]],
        "jobs": {
            "climate-17": nodes[1:5],
            "fluid-9": nodes[-3:-1],
        },
    }


def build(name: str, layout: str, sensors: int, steps: int, *,
          with_raw: bool, seed: int) -> None:
    work = FIXTURES / f"_work_{name}"
    out = FIXTURES / name
    shutil.rmtree(work, ignore_errors=True)
    shutil.rmtree(out, ignore_errors=True)
    work.mkdir(parents=True)

    half = steps // 2
    run(sys.executable, "-m", "telemodes.cli", "--seed", str(seed), "--out", str(work),
        "synth", "--sensors", str(sensors), "--steps", str(steps),
        "--layout", layout, "--categories", "temperature,power",
        "--map-out", str(work / "sensor_map.json"))
    run(sys.executable, "-m", "telemodes.cli", "--out", str(work),
        "fit", str(work / "synthetic.csv"), "--max-levels", "3")

    sensor_map = json.loads((work / "sensor_map.json").read_text())
    write_window_csv(work / "z_first.csv", sensor_map, hot_row=0)
    write_window_csv(work / "z_second.csv", sensor_map, hot_row=1)
    (work / "annotations.json").write_text(json.dumps(annotations_for(sensor_map)))

    argv = [sys.executable, "-m", "telemodes.cli", "--out", str(work),
            "export-ui", str(work / "tree.tm"),
            "--zscore", f"hot-first:0:{half}:{work / 'z_first.csv'}",
            "--zscore", f"hot-second:{half}:{steps}:{work / 'z_second.csv'}",
            "--layout", layout,
            "--annotations", str(work / "annotations.json"),
            "--bundle-out", str(out)]
    if with_raw:
        argv += ["--data", str(work / "synthetic.csv")]
    run(*argv)

    shutil.rmtree(work)
    size = sum(f.stat().st_size for f in out.iterdir())
    print(f"{name}: {size / 1e6:.2f} MB in {out}")


def main() -> None:
    build("flip48", LAYOUT48, sensors=96, steps=160, with_raw=True, seed=31)
    build("machine1408", LAYOUT1408, sensors=2816, steps=48, with_raw=False, seed=67)


if __name__ == "__main__":
    main()
