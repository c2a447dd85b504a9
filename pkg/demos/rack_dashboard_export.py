"""Full pipeline: synthetic floor telemetry to a served dashboard bundle.

Generates telemetry for a 48-node demo floor, fits a tree, scores two
analysis windows, exports the six-document bundle, and serves it locally.
Everything goes through the same command-line entry points you would use on
real data.

Run:  python demos/rack_dashboard_export.py
"""

import json
import sys
import threading
import urllib.request
from pathlib import Path

from telemodes.cli import main
from telemodes.server import make_server

LAYOUT = "demo 1 2 row0-1:0-2 2 c:0-1 1 s:0-1 1 b:0 n:0-1"  # 48 nodes
OUT = Path("demo_run")


def run(argv: list[str]) -> None:
    print(f"$ telemodes {' '.join(argv)}")
    code = main(argv)
    if code != 0:
        sys.exit(f"step failed with exit code {code}")


run(
    [
        "--seed", "42", "--out", str(OUT),
        "synth", "--sensors", "96", "--steps", "1024", "--noise", "0.1",
        "--layout", LAYOUT,
        "--map-out", str(OUT / "sensor_map.json"),
        "--categories", "temperature,power",
    ]
)
run(["--out", str(OUT), "fit", str(OUT / "synthetic.csv"), "--max-levels", "4"])
run(
    [
        "--out", str(OUT),
        "zscore", str(OUT / "tree.tm"),
        "--data", str(OUT / "synthetic.csv"),
        "--map", str(OUT / "sensor_map.json"),
        "--window", "first-half:0:512",
        "--window", "second-half:512:1024",
    ]
)

annotations = OUT / "annotations.json"
annotations.write_text(
    json.dumps(
        {
            "hardware_errors": ["r0-0c0s0b0n0"],
            "jobs": {"climate-sim": ["r0-1c0s0b0n0", "r0-1c0s0b0n1"]},
        },
        indent=2,
    )
)
run(
    [
        "--out", str(OUT),
        "export-ui", str(OUT / "tree.tm"),
        "--zscore", f"first-half:0:512:{OUT / 'zscore_first-half.csv'}",
        "--zscore", f"second-half:512:1024:{OUT / 'zscore_second-half.csv'}",
        "--layout", LAYOUT,
        "--annotations", str(annotations),
        "--data", str(OUT / "synthetic.csv"),
    ]
)

server = make_server(OUT / "bundle", port=0)
host, port = server.server_address
thread = threading.Thread(target=server.serve_forever, daemon=True)
thread.start()
print(f"\nbundle served at http://{host}:{port}/bundle/meta")
with urllib.request.urlopen(f"http://{host}:{port}/bundle/meta") as resp:
    meta = json.load(resp)
print(f"  system: {meta['system']}")
print(f"  windows: {[w['name'] for w in meta['windows']]}")
print(f"  categories: {meta['categories']}")
server.shutdown()
server.server_close()
print(f"\nartifacts left in {OUT}/ — point `telemodes serve {OUT}/bundle` at them")
