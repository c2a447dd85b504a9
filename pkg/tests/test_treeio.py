"""Binary tree container: round trips, version checks, corruption handling."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
import pytest

from telemodes import (
    MrDMDConfig,
    SensorMatrix,
    TreeFileError,
    iter_nodes,
    load_tree,
    mrdmd_fit,
    mrdmd_reconstruct,
    partial_fit,
    save_tree,
)
from telemodes.treeio import FORMAT_VERSION, MAGIC
from tests.conftest import make_planted_system


@pytest.fixture(scope="module")
def fitted():
    data, _ = make_planted_system(p=10, r=4, t=300, seed=17)
    return data, mrdmd_fit(data, MrDMDConfig(max_levels=3))


class TestRoundTrip:
    def test_structure_and_arrays_identical(self, fitted, tmp_path):
        _, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        back = load_tree(path)
        assert back.config == tree.config
        assert back.sensor_ids == tree.sensor_ids
        assert back.total_timesteps == tree.total_timesteps
        assert back.delta_t == tree.delta_t
        for (pa, na), (pb, nb) in zip(iter_nodes(tree), iter_nodes(back)):
            assert pa == pb
            assert (na.level, na.t_start, na.t_end) == (nb.level, nb.t_start, nb.t_end)
            assert (na.stride, na.rho) == (nb.stride, nb.rho)
            npt.assert_array_equal(na.dmd.modes, nb.dmd.modes)
            npt.assert_array_equal(na.dmd.eigenvalues, nb.dmd.eigenvalues)
            npt.assert_array_equal(na.dmd.exponents, nb.dmd.exponents)
            npt.assert_array_equal(na.dmd.amplitudes, nb.dmd.amplitudes)

    def test_reconstruction_identical(self, fitted, tmp_path):
        _, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        npt.assert_array_equal(mrdmd_reconstruct(load_tree(path)), mrdmd_reconstruct(tree))

    def test_cache_round_trips_and_supports_streaming(self, fitted, tmp_path):
        data, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        back = load_tree(path)
        cache = back.root.svd_cache
        assert cache is not None
        npt.assert_array_equal(cache.columns, tree.root.svd_cache.columns)
        assert cache.stride == tree.root.svd_cache.stride
        assert cache.data_norm == tree.root.svd_cache.data_norm

        more, _ = make_planted_system(p=10, r=4, t=80, seed=18)


        chunk = SensorMatrix(
            sensor_ids=tree.sensor_ids,
            timestamps=np.arange(300.0, 380.0),
            values=more.values[:, :80],
            delta_t=1.0,
        )
        from_disk, _ = partial_fit(back, chunk)
        in_memory, _ = partial_fit(tree, chunk)
        npt.assert_array_equal(
            mrdmd_reconstruct(from_disk), mrdmd_reconstruct(in_memory)
        )

    def test_without_cache_smaller_but_frozen(self, fitted, tmp_path):
        data, tree = fitted
        with_cache = tmp_path / "a.tm"
        without = tmp_path / "b.tm"
        save_tree(tree, with_cache)
        save_tree(tree, without, include_cache=False)
        assert without.stat().st_size < with_cache.stat().st_size
        back = load_tree(without)
        assert back.root.svd_cache is None
        chunk_vals = np.zeros((10, 8))


        chunk = SensorMatrix(
            sensor_ids=tree.sensor_ids,
            timestamps=np.arange(300.0, 308.0),
            values=chunk_vals,
            delta_t=1.0,
        )
        with pytest.raises(ValueError, match="cached factors"):
            partial_fit(back, chunk)

    def test_superseded_payload_round_trips(self, fitted, tmp_path):
        data, tree = fitted


        chunk = SensorMatrix(
            sensor_ids=tree.sensor_ids,
            timestamps=np.arange(300.0, 364.0),
            values=np.asarray(data.values[:, :64]),
            delta_t=1.0,
        )
        updated, _ = partial_fit(tree, chunk)
        path = tmp_path / "u.tm"
        save_tree(updated, path)
        back = load_tree(path)
        left = back.root.children[0]
        assert left.superseded is not None
        npt.assert_array_equal(
            left.superseded.modes, updated.root.children[0].superseded.modes
        )


class TestFileFormat:
    def test_magic_and_version_present(self, fitted, tmp_path):
        _, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        head = path.read_bytes()[: len(MAGIC)]
        assert head == MAGIC

    def test_wrong_magic_rejected(self, fitted, tmp_path):
        _, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        raw = bytearray(path.read_bytes())
        raw[0] ^= 0xFF
        path.write_bytes(bytes(raw))
        with pytest.raises(TreeFileError):
            load_tree(path)

    def test_future_version_rejected(self, fitted, tmp_path):
        _, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        raw = bytearray(path.read_bytes())
        # version field sits right after the magic, little-endian u32
        offset = len(MAGIC)
        raw[offset : offset + 4] = (FORMAT_VERSION + 1).to_bytes(4, "little")
        path.write_bytes(bytes(raw))
        with pytest.raises(TreeFileError, match="version"):
            load_tree(path)

    def test_truncated_file_rejected(self, fitted, tmp_path):
        _, tree = fitted
        path = tmp_path / "t.tm"
        save_tree(tree, path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) // 2])
        with pytest.raises(TreeFileError):
            load_tree(path)

    def test_not_a_tree_file(self, tmp_path):
        path = tmp_path / "garbage.tm"
        path.write_bytes(b"hello world, definitely not a tree")
        with pytest.raises(TreeFileError):
            load_tree(path)
