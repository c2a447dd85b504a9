"""Shared fixtures: planted linear systems and the two-scale synthetic."""

from __future__ import annotations

import numpy as np
import pytest

from telemodes import ModeSpec, SensorMatrix, generate_synthetic

# Collected (name, passed, detail) triples from the acceptance tests, printed
# as one line each after the run so the verdicts survive output capture.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"{verdict} {name}: {detail}")


def make_planted_system(
    p: int, r: int, t: int, seed: int, spread: float = 0.05
) -> tuple[SensorMatrix, np.ndarray]:
    """Noiseless data from a diagonalizable linear map with known spectrum.

    Eigenvalues come in conjugate pairs on (or just off) the unit circle,
    plus one real eigenvalue when r is odd, so the data is real and the
    planted spectrum is recoverable exactly. Returns the matrix and the
    discrete eigenvalues.
    """
    rng = np.random.default_rng(seed)
    lam = []
    n_pairs = r // 2
    for k in range(n_pairs):
        theta = (0.2 + 0.5 * k / max(n_pairs, 1) + 0.05 * rng.random()) * np.pi
        radius = 1.0 + spread * (rng.random() - 0.5)
        lam.append(radius * np.exp(1j * theta))
        lam.append(radius * np.exp(-1j * theta))
    if r % 2:
        lam.append(np.array(0.9 + 0.09 * rng.random(), dtype=np.complex128))
    lam = np.array(lam, dtype=np.complex128)

    half = rng.standard_normal((p, n_pairs)) + 1j * rng.standard_normal((p, n_pairs))
    cols = []
    for k in range(n_pairs):
        cols.append(half[:, k])
        cols.append(half[:, k].conj())
    if r % 2:
        cols.append(rng.standard_normal(p).astype(np.complex128))
    phi = np.stack(cols, axis=1)

    amps = []
    for k in range(n_pairs):
        a = 0.5 + rng.random() + 1j * (rng.random() - 0.5)
        amps.append(a)
        amps.append(a.conjugate())
    if r % 2:
        amps.append(complex(0.5 + rng.random()))
    amps = np.array(amps, dtype=np.complex128)

    powers = lam[None, :] ** np.arange(t)[:, None]  # t x r
    values = np.real((phi * amps) @ powers.T)
    matrix = SensorMatrix(
        sensor_ids=tuple(f"s{i:04d}" for i in range(p)),
        timestamps=np.arange(t, dtype=np.float64),
        values=values,
        delta_t=1.0,
    )
    return matrix, lam


def two_scale_modes(p: int, seed: int = 7) -> list[ModeSpec]:
    """Slow 0.001 and fast 0.05 cycles/step travelling-wave components."""
    rng = np.random.default_rng(seed)

    def pattern():
        return rng.standard_normal(p) + 1j * rng.standard_normal(p)

    return [
        ModeSpec(pattern=pattern(), frequency_hz=0.001, amplitude=1.0),
        ModeSpec(pattern=pattern(), frequency_hz=0.05, amplitude=0.6),
    ]


@pytest.fixture(scope="session")
def two_scale_clean() -> SensorMatrix:
    data, _ = generate_synthetic(200, 2000, two_scale_modes(200), noise_sigma=0.0)
    return data


@pytest.fixture(scope="session")
def planted_small() -> tuple[SensorMatrix, np.ndarray]:
    return make_planted_system(p=30, r=4, t=256, seed=3)
