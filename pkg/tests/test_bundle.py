"""Dashboard bundle assembly: schema validity, determinism, referential checks."""

from __future__ import annotations

import json

import pytest

from telemodes import (
    BUNDLE_FILES,
    BundleError,
    MrDMDConfig,
    build_bundle,
    mrdmd_fit,
    parse_layout,
    validate_bundle,
)
from tests.conftest import make_planted_system

LAYOUT = parse_layout("demo 1 2 row0-0:0-1 2 c:0-0 1 s:0-0 1 b:0 n:0-1")
# four rack nodes, two sensors each
NODE_IDS = [
    "r0-0c0s0b0n0",
    "r0-0c0s0b0n1",
    "r0-1c0s0b0n0",
    "r0-1c0s0b0n1",
]


def make_rows(sensor_ids, z_values=None):
    rows = []
    for i, sid in enumerate(sensor_ids):
        z = 0.0 if z_values is None else z_values[i]
        rows.append(
            {
                "sensor_id": sid,
                "node_id": NODE_IDS[i // 2],
                "category": "temperature" if i % 2 == 0 else "power",
                "magnitude": float(1.0 + i),
                "z": float(z),
            }
        )
    return rows


@pytest.fixture(scope="module")
def fitted():
    data, _ = make_planted_system(p=8, r=4, t=200, seed=5)
    return data, mrdmd_fit(data, MrDMDConfig(max_levels=2))


def windows_for(data):
    rows = make_rows(data.sensor_ids)
    return [
        {"name": "early", "t_start": 0, "t_end": 100, "rows": rows},
        {"name": "late", "t_start": 100, "t_end": 200, "rows": rows},
    ]


class TestBuild:
    def test_all_files_written_and_valid(self, fitted, tmp_path):
        data, tree = fitted
        paths = build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "b")
        assert set(paths) == set(BUNDLE_FILES)
        docs = validate_bundle(tmp_path / "b")
        assert set(docs) == set(BUNDLE_FILES)
        assert docs["meta.json"]["total_timesteps"] == 200
        assert docs["meta.json"]["categories"] == ["power", "temperature"]
        assert [w["name"] for w in docs["meta.json"]["windows"]] == ["early", "late"]

    def test_byte_identical_across_builds(self, fitted, tmp_path):
        data, tree = fitted
        windows = windows_for(data)
        ann = {"hardware_errors": [NODE_IDS[3]], "jobs": {"climate": NODE_IDS[:2]}}
        build_bundle(tree, LAYOUT, windows, tmp_path / "one", annotations=ann, data=data)
        build_bundle(tree, LAYOUT, windows, tmp_path / "two", annotations=ann, data=data)
        for filename in BUNDLE_FILES:
            a = (tmp_path / "one" / filename).read_bytes()
            b = (tmp_path / "two" / filename).read_bytes()
            assert a == b, filename

    def test_cell_aggregates_member_sensors(self, fitted, tmp_path):
        data, tree = fitted
        # both temperature sensors of the first node: z = 1.0 and 3.0 -> mean 2.0
        rows = [
            {
                "sensor_id": data.sensor_ids[0],
                "node_id": NODE_IDS[0],
                "category": "temperature",
                "magnitude": 10.0,
                "z": 1.0,
            },
            {
                "sensor_id": data.sensor_ids[1],
                "node_id": NODE_IDS[0],
                "category": "temperature",
                "magnitude": 20.0,
                "z": 3.0,
            },
        ]
        build_bundle(
            tree,
            LAYOUT,
            [{"name": "w", "t_start": 0, "t_end": 200, "rows": rows}],
            tmp_path / "b",
        )
        doc = json.loads((tmp_path / "b" / "zscores.json").read_text())
        cell = doc["windows"][0]["categories"]["temperature"][NODE_IDS[0]]
        assert cell["z"] == 2.0
        assert cell["class"] == "elevated"
        assert cell["value"] == 15.0

    def test_series_mean_of_members_and_raw_toggle(self, fitted, tmp_path):
        data, tree = fitted
        from telemodes import mrdmd_reconstruct

        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "no_raw")
        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "raw", data=data)
        bare = json.loads((tmp_path / "no_raw" / "series.json").read_text())
        rich = json.loads((tmp_path / "raw" / "series.json").read_text())
        entry = bare["nodes"][NODE_IDS[0]]["temperature"]
        assert "raw" not in entry
        assert "raw" in rich["nodes"][NODE_IDS[0]]["temperature"]
        # temperature member of the first node is sensor 0 alone
        recon = mrdmd_reconstruct(tree)
        assert entry["recon"] == pytest.approx(recon[0].tolist())
        raw_series = rich["nodes"][NODE_IDS[0]]["temperature"]["raw"]
        assert raw_series == pytest.approx(data.values[0].tolist())

    def test_unhomed_sensor_skipped(self, fitted, tmp_path):
        data, tree = fitted
        rows = make_rows(data.sensor_ids)
        rows[0] = dict(rows[0], node_id="")
        build_bundle(
            tree,
            LAYOUT,
            [{"name": "w", "t_start": 0, "t_end": 200, "rows": rows}],
            tmp_path / "b",
        )
        doc = json.loads((tmp_path / "b" / "zscores.json").read_text())
        assert NODE_IDS[0] not in doc["windows"][0]["categories"]["temperature"]

    def test_blank_category_becomes_uncategorized(self, fitted, tmp_path):
        data, tree = fitted
        rows = [dict(make_rows(data.sensor_ids)[0], category="")]
        build_bundle(
            tree,
            LAYOUT,
            [{"name": "w", "t_start": 0, "t_end": 200, "rows": rows}],
            tmp_path / "b",
        )
        doc = json.loads((tmp_path / "b" / "zscores.json").read_text())
        assert "uncategorized" in doc["windows"][0]["categories"]

    def test_empty_annotations_default(self, fitted, tmp_path):
        data, tree = fitted
        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "b", annotations=None)
        doc = json.loads((tmp_path / "b" / "annotations.json").read_text())
        assert doc == {"hardware_errors": [], "jobs": {}}


class TestRejections:
    def test_unknown_node_id_named(self, fitted, tmp_path):
        data, tree = fitted
        rows = [dict(make_rows(data.sensor_ids)[0], node_id="r9-9c9s9b9n9")]
        with pytest.raises(BundleError, match="r9-9c9s9b9n9"):
            build_bundle(
                tree,
                LAYOUT,
                [{"name": "w", "t_start": 0, "t_end": 200, "rows": rows}],
                tmp_path / "b",
            )

    def test_unknown_sensor_named(self, fitted, tmp_path):
        data, tree = fitted
        rows = [dict(make_rows(data.sensor_ids)[0], sensor_id="ghost")]
        with pytest.raises(BundleError, match="ghost"):
            build_bundle(
                tree,
                LAYOUT,
                [{"name": "w", "t_start": 0, "t_end": 200, "rows": rows}],
                tmp_path / "b",
            )

    def test_window_outside_timeline(self, fitted, tmp_path):
        data, tree = fitted
        bad = [{"name": "w", "t_start": 0, "t_end": 999, "rows": []}]
        with pytest.raises(BundleError, match="outside the fitted timeline"):
            build_bundle(tree, LAYOUT, bad, tmp_path / "b")

    def test_inverted_window(self, fitted, tmp_path):
        data, tree = fitted
        bad = [{"name": "w", "t_start": 50, "t_end": 50, "rows": []}]
        with pytest.raises(BundleError):
            build_bundle(tree, LAYOUT, bad, tmp_path / "b")

    def test_malformed_row(self, fitted, tmp_path):
        data, tree = fitted
        rows = [{"sensor_id": data.sensor_ids[0], "node_id": NODE_IDS[0]}]
        with pytest.raises(BundleError, match="malformed z-score row"):
            build_bundle(
                tree,
                LAYOUT,
                [{"name": "w", "t_start": 0, "t_end": 200, "rows": rows}],
                tmp_path / "b",
            )

    def test_hardware_annotation_checked(self, fitted, tmp_path):
        data, tree = fitted
        with pytest.raises(BundleError, match="hardware_errors.*nope"):
            build_bundle(
                tree,
                LAYOUT,
                windows_for(data),
                tmp_path / "b",
                annotations={"hardware_errors": ["nope"]},
            )

    def test_job_annotation_checked(self, fitted, tmp_path):
        data, tree = fitted
        with pytest.raises(BundleError, match="job 'climate'"):
            build_bundle(
                tree,
                LAYOUT,
                windows_for(data),
                tmp_path / "b",
                annotations={"jobs": {"climate": ["nope"]}},
            )

    def test_foreign_raw_data_rejected(self, fitted, tmp_path):
        data, tree = fitted
        other, _ = make_planted_system(p=8, r=2, t=200, seed=99)
        renamed = type(data)(
            sensor_ids=tuple(f"x{i}" for i in range(8)),
            timestamps=other.timestamps,
            values=other.values,
            delta_t=other.delta_t,
        )
        with pytest.raises(BundleError, match="sensor ids differ"):
            build_bundle(
                tree, LAYOUT, windows_for(data), tmp_path / "b", data=renamed
            )


class TestValidate:
    def test_missing_file(self, fitted, tmp_path):
        data, tree = fitted
        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "b")
        (tmp_path / "b" / "spectrum.json").unlink()
        with pytest.raises(BundleError, match="missing bundle file: spectrum.json"):
            validate_bundle(tmp_path / "b")

    def test_schema_violation_reported(self, fitted, tmp_path):
        data, tree = fitted
        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "b")
        meta_path = tmp_path / "b" / "meta.json"
        doc = json.loads(meta_path.read_text())
        doc["total_timesteps"] = "two hundred"
        meta_path.write_text(json.dumps(doc))
        with pytest.raises(BundleError, match="meta.json"):
            validate_bundle(tmp_path / "b")

    def test_tampered_node_id_caught(self, fitted, tmp_path):
        data, tree = fitted
        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "b")
        z_path = tmp_path / "b" / "zscores.json"
        doc = json.loads(z_path.read_text())
        cats = doc["windows"][0]["categories"]
        cats["temperature"]["r8-8c8s8b8n8"] = {
            "z": 0.0,
            "class": "baseline",
            "value": 1.0,
        }
        z_path.write_text(json.dumps(doc))
        with pytest.raises(BundleError, match="r8-8c8s8b8n8"):
            validate_bundle(tmp_path / "b")

    def test_invalid_json_reported(self, fitted, tmp_path):
        data, tree = fitted
        build_bundle(tree, LAYOUT, windows_for(data), tmp_path / "b")
        (tmp_path / "b" / "annotations.json").write_text("{not json")
        with pytest.raises(BundleError, match="invalid JSON"):
            validate_bundle(tmp_path / "b")
