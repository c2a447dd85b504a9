"""Extend a fitted tree chunk by chunk and watch the drift reports.

The first phase streams more of the same two-wave signal: drift stays near
the noise floor. The second phase switches the machine room to a different
regime — new spatial pattern, new rate, bigger amplitude — and the report
flags it on the first chunk that contains it.

A fixed rank keeps the root's retained basis the same size on every update,
so the drift numbers compare like with like; with automatic rank selection a
borderline mode can pop in or out of the retention and register as drift of
its own.

Run:  python demos/streaming_updates.py
"""

import numpy as np

from telemodes import (
    ModeSpec,
    MrDMDConfig,
    generate_synthetic,
    mrdmd_fit,
    partial_fit,
    window,
)

P = 64
INITIAL, CHUNK = 1024, 256

rng = np.random.default_rng(1)


def wave(freq: float, amplitude: float) -> ModeSpec:
    return ModeSpec(
        pattern=rng.standard_normal(P) + 1j * rng.standard_normal(P),
        frequency_hz=freq,
        amplitude=amplitude,
    )


calm = [wave(0.001, 1.0), wave(0.05, 0.5)]
storm = [wave(0.008, 2.5)]

# one continuous calm realization, delivered in chunks like a live feed,
# then a discontinuous regime change
calm_data, _ = generate_synthetic(P, INITIAL + 3 * CHUNK, calm, noise_sigma=0.05, seed=2)
storm_data, _ = generate_synthetic(
    P, 2 * CHUNK, storm, noise_sigma=0.05, seed=3, t0=float(INITIAL + 3 * CHUNK)
)

print(f"initial fit on {INITIAL} steps")
tree = mrdmd_fit(
    window(calm_data, 0, INITIAL), MrDMDConfig(max_levels=3, rank_policy=4)
)
threshold = 0.15 * float(np.linalg.norm(calm_data.values[:, :INITIAL]))


def feed(chunk) -> None:
    global tree
    tree, report = partial_fit(tree, chunk, threshold=threshold)
    flag = "REGIME CHANGE?" if report.exceeded else "steady"
    print(
        f"  t={tree.total_timesteps:4d}  drift {report.frobenius_diff:8.1f} "
        f"(threshold {report.threshold:.1f})  {flag}"
    )


print("\nphase 1: three chunks of the same regime")
for i in range(3):
    feed(window(calm_data, INITIAL + i * CHUNK, INITIAL + (i + 1) * CHUNK))

print("\nphase 2: the signal changes underneath us")
for i in range(2):
    feed(window(storm_data, i * CHUNK, (i + 1) * CHUNK))

print(f"\nfinal timeline: {tree.total_timesteps} steps, all still one tree")
