"""Exact dynamic mode decomposition of a shifted snapshot pair.

The best-fit one-step operator is never materialized: its eigendecomposition
is recovered from the truncated SVD of the first snapshot matrix, giving
spatial modes, discrete eigenvalues, continuous-time exponents, and initial
amplitudes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .store import SnapshotPair
from .svd import SVDFactors, truncated_svd

# Continuous exponent recorded for a zero eigenvalue (nilpotent direction);
# such modes are dropped from reconstruction.
DEAD_EXPONENT = complex(-np.inf, 0.0)

RankPolicy = "int | str"  # explicit rank, "svht", or "full"


class RankDeficiencyError(ValueError):
    """X has a zero singular value inside the retained rank; lower the rank."""


@dataclass(frozen=True)
class DMDResult:
    """Modes with their discrete eigenvalues, exponents, and amplitudes.

    ``exponents[i] = log(eigenvalues[i]) / delta_t`` (principal branch);
    real input data yields a spectrum closed under conjugation.
    """

    modes: np.ndarray
    eigenvalues: np.ndarray
    exponents: np.ndarray
    amplitudes: np.ndarray
    delta_t: float

    def __post_init__(self):
        r = self.eigenvalues.shape[0]
        if self.modes.ndim != 2 or self.modes.shape[1] != r:
            raise ValueError("modes must have one column per eigenvalue")
        if self.exponents.shape != (r,) or self.amplitudes.shape != (r,):
            raise ValueError("exponents and amplitudes must match eigenvalue count")
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")

    @property
    def rank(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def n_sensors(self) -> int:
        return self.modes.shape[0]

    @classmethod
    def empty(cls, n_sensors: int, delta_t: float) -> "DMDResult":
        z = np.zeros(0, dtype=np.complex128)
        return cls(
            modes=np.zeros((n_sensors, 0), dtype=np.complex128),
            eigenvalues=z,
            exponents=z.copy(),
            amplitudes=z.copy(),
            delta_t=delta_t,
        )

    def select(self, indices) -> "DMDResult":
        """Sub-result keeping only the given mode indices."""
        idx = np.asarray(indices, dtype=int)
        return DMDResult(
            modes=self.modes[:, idx],
            eigenvalues=self.eigenvalues[idx],
            exponents=self.exponents[idx],
            amplitudes=self.amplitudes[idx],
            delta_t=self.delta_t,
        )


def _resolve_rank(policy) -> tuple[int | None, bool]:
    if policy == "svht":
        return None, True
    if policy == "full":
        return None, False
    if isinstance(policy, (int, np.integer)) and not isinstance(policy, bool):
        return int(policy), False
    raise ValueError(f"rank policy must be 'svht', 'full', or an int, got {policy!r}")


def _fix_mode_phase(phi: np.ndarray) -> np.ndarray:
    """Rotate each mode so its largest-magnitude entry is real positive."""
    if phi.shape[1] == 0:
        return phi
    lead = np.argmax(np.abs(phi), axis=0)
    pivots = phi[lead, np.arange(phi.shape[1])]
    mags = np.abs(pivots)
    rot = np.where(mags > 0, np.conj(pivots) / np.where(mags > 0, mags, 1.0), 1.0)
    return phi * rot


def amplitudes(modes: np.ndarray, x0: np.ndarray) -> np.ndarray:
    """Least-squares coefficients a with ``modes @ a ~= x0``."""
    if modes.shape[1] == 0:
        return np.zeros(0, dtype=np.complex128)
    a, *_ = np.linalg.lstsq(modes, x0.astype(np.complex128), rcond=None)
    return a


def dmd_from_factors(
    factors: SVDFactors, y: np.ndarray, delta_t: float, x0: np.ndarray | None = None
) -> DMDResult:
    """Eigendecomposition of the projected operator given SVD factors of X.

    Shared by the batch path (factors freshly decomposed) and the streaming
    path (factors maintained by incremental updates). Amplitudes are fit
    against ``x0``; default is X's first column as represented by the factors.
    """
    sigma = factors.sigma
    if sigma.size == 0:
        raise RankDeficiencyError("rank-deficient X within truncation")
    tol = np.finfo(np.float64).eps * max(factors.n_rows, factors.n_cols) * sigma[0]
    if np.any(sigma <= tol):
        raise RankDeficiencyError("rank-deficient X within truncation")

    v_sinv = factors.v / sigma
    atilde = factors.u.T @ y @ v_sinv
    lam, w = np.linalg.eig(atilde)
    lam = lam.astype(np.complex128)
    phi = ((y @ v_sinv) @ w).astype(np.complex128)

    order = np.lexsort((np.angle(lam), -np.abs(lam)))
    lam = lam[order]
    phi = _fix_mode_phase(phi[:, order])

    psi = np.where(
        lam == 0,
        DEAD_EXPONENT,
        np.log(np.where(lam == 0, 1.0, lam)) / delta_t,
    )
    if x0 is None:
        x0 = (factors.u * sigma) @ factors.v[0, :]
    return DMDResult(
        modes=phi,
        eigenvalues=lam,
        exponents=psi,
        amplitudes=amplitudes(phi, x0),
        delta_t=delta_t,
    )


def fit_dmd(pair: SnapshotPair, delta_t: float, rank_policy="svht") -> DMDResult:
    """Exact DMD of a snapshot pair at the given sampling interval."""
    if pair.x.shape[1] < 1:
        raise ValueError("snapshot pair must have at least one column")
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")
    rank, use_svht = _resolve_rank(rank_policy)
    factors = truncated_svd(pair.x, rank=rank, use_svht=use_svht)
    return dmd_from_factors(factors, pair.y, delta_t, x0=pair.x[:, 0])


def reconstruct(
    r: DMDResult, times: np.ndarray, mode_mask=None
) -> np.ndarray:
    """Evaluate ``sum_i phi_i * exp(psi_i t) * a_i`` at the given seconds.

    ``times`` are relative to the fit's first snapshot. ``mode_mask`` is an
    index set; default all modes. Dead (zero-eigenvalue) modes are skipped.
    The real part is returned.
    """
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    if not np.all(np.isfinite(times)):
        raise ValueError("times must be finite")
    if mode_mask is None:
        idx = np.arange(r.rank)
    else:
        idx = np.asarray(sorted(mode_mask), dtype=int)
        if idx.size and (idx.min() < 0 or idx.max() >= r.rank):
            raise ValueError("mode_mask index out of range")
    idx = idx[np.isfinite(r.exponents[idx].real)]
    if idx.size == 0:
        return np.zeros((r.n_sensors, times.shape[0]))
    dyn = np.exp(np.outer(r.exponents[idx], times)) * r.amplitudes[idx, None]
    return (r.modes[:, idx] @ dyn).real


def oscillation_rates(r: DMDResult) -> np.ndarray:
    """Per-mode oscillation rate in cycles per time step, from discrete eigenvalues."""
    lam = r.eigenvalues
    safe = np.where(lam == 0, 1.0, lam)
    return np.abs(np.log(safe).imag) / (2.0 * np.pi)


#: Relative slack on the slow-mode threshold. A window of length L resolves
#: frequency only to a fraction of 1/L, so content oscillating exactly at the
#: threshold rate comes back from a noisy fit slightly above or below it;
#: an eighth of the threshold keeps such content on the inclusive side.
SLOW_RATE_TOLERANCE = 0.125


def slow_mode_indices(r: DMDResult, rho: float) -> np.ndarray:
    """Indices of modes oscillating at most ``rho`` cycles per time step.

    Inclusive, with ``SLOW_RATE_TOLERANCE`` relative slack: a mode planted
    exactly at the threshold rate survives estimation error.
    """
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    return np.flatnonzero(oscillation_rates(r) <= rho * (1.0 + SLOW_RATE_TOLERANCE))
