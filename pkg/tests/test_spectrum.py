"""Frequency/power accounting and band selection over fitted trees."""

from __future__ import annotations

import numpy as np
import numpy.testing as npt
import pytest

from telemodes import (
    MrDMDConfig,
    SpectrumPoint,
    filter_modes,
    mode_frequency,
    mode_power,
    mrdmd_fit,
    plot_spectrum,
    read_spectrum_csv,
    selection_size,
    spectrum_of,
    window,
    write_spectrum_csv,
)


@pytest.fixture(scope="module")
def fitted(two_scale_clean):
    return mrdmd_fit(window(two_scale_clean, 0, 512), MrDMDConfig(max_levels=3))


class TestUnits:
    def test_one_hertz(self):
        """A continuous exponent of 2*pi*i radians/second is exactly 1 Hz."""
        assert mode_frequency(2j * np.pi) == pytest.approx(1.0, abs=1e-15)

    def test_frequency_sign_insensitive(self):
        assert mode_frequency(-2j * np.pi) == mode_frequency(2j * np.pi)

    def test_power_three_four_five(self):
        assert mode_power(np.array([3.0, 4.0])) == pytest.approx(25.0, abs=1e-12)

    def test_power_complex_vector(self):
        assert mode_power(np.array([3.0j, 4.0])) == pytest.approx(25.0, abs=1e-12)


class TestSpectrumOf:
    def test_conjugate_pairs_share_frequency_and_power(self, fitted):
        points = spectrum_of(fitted)
        assert points, "fitted tree retained no modes"
        by_node: dict[str, list[SpectrumPoint]] = {}
        for pt in points:
            by_node.setdefault(pt.node_path, []).append(pt)
        for path, pts in by_node.items():
            oscillating = [p for p in pts if p.frequency_hz > 1e-12]
            for p in oscillating:
                partners = [
                    q
                    for q in oscillating
                    if q is not p
                    and abs(q.frequency_hz - p.frequency_hz) < 1e-9
                    and abs(q.power - p.power) < 1e-6 * max(p.power, 1.0)
                ]
                assert partners, f"unpaired mode at {path}: {p.frequency_hz} Hz"

    def test_powers_match_mode_norms(self, fitted):
        from telemodes import node_at

        for pt in spectrum_of(fitted):
            phi = node_at(fitted, pt.node_path).dmd.modes[:, pt.mode_index]
            assert pt.power == pytest.approx(
                float(np.sum(np.abs(phi) ** 2)), rel=1e-12
            )

    def test_point_validation(self):
        with pytest.raises(ValueError):
            SpectrumPoint("0", 0, -1.0, 1.0, 0.0, 1)
        with pytest.raises(ValueError):
            SpectrumPoint("0", -1, 1.0, 1.0, 0.0, 1)
        with pytest.raises(ValueError):
            SpectrumPoint("0", 0, 1.0, 1.0, 0.0, 0)


class TestFilterModes:
    def test_band_edges_inclusive(self, fitted):
        points = spectrum_of(fitted)
        f0 = points[0].frequency_hz
        sel = filter_modes(fitted, f_min=f0, f_max=f0)
        assert points[0].mode_index in sel.get(points[0].node_path, ())

    def test_power_floor_absolute(self, fitted):
        points = spectrum_of(fitted)
        cut = float(np.median([p.power for p in points]))
        sel = filter_modes(fitted, power_floor=cut)
        for pt in points:
            kept = pt.node_path in sel and pt.mode_index in sel[pt.node_path]
            assert kept == (pt.power >= cut)

    def test_percentile_floor(self, fitted):
        sel = filter_modes(fitted, power_floor="90%")
        n_all = len(spectrum_of(fitted))
        n_kept = selection_size(sel)
        assert 1 <= n_kept <= max(1, int(np.ceil(0.15 * n_all)))

    def test_empty_selection_warns(self, fitted):
        with pytest.warns(RuntimeWarning, match="no modes"):
            sel = filter_modes(fitted, f_min=10.0, f_max=20.0)
        assert sel == {}

    def test_band_validation(self, fitted):
        with pytest.raises(ValueError):
            filter_modes(fitted, f_min=2.0, f_max=1.0)
        with pytest.raises(ValueError):
            filter_modes(fitted, power_floor=-1.0)
        with pytest.raises(ValueError):
            filter_modes(fitted, power_floor="150%")
        with pytest.raises(ValueError):
            filter_modes(fitted, power_floor="abc")


class TestExport:
    def test_csv_round_trip(self, fitted, tmp_path):
        points = spectrum_of(fitted)
        path = tmp_path / "spec.csv"
        write_spectrum_csv(points, path)
        back = read_spectrum_csv(path)
        assert len(back) == len(points)
        for orig, rt in zip(points, back):
            assert rt.node_path == orig.node_path
            assert rt.mode_index == orig.mode_index
            assert rt.frequency_hz == orig.frequency_hz
            assert rt.power == orig.power
            assert rt.level == orig.level

    def test_plot_written(self, fitted, tmp_path):
        path = tmp_path / "spec.png"
        plot_spectrum(spectrum_of(fitted), path)
        assert path.exists()
        assert path.stat().st_size > 1000

    def test_plot_handles_empty(self, tmp_path):
        path = tmp_path / "empty.png"
        plot_spectrum([], path)
        assert path.exists()


def test_selection_size():
    assert selection_size({"0": (0, 1), "0.1": (2,)}) == 3
    assert selection_size({}) == 0
