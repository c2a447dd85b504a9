"""Truncated SVD with hard-threshold rank selection and column-append updates.

All factorizations are real; complex arithmetic only enters downstream in the
eigendecomposition. A fixed sign convention (largest-magnitude entry of every
left singular vector made positive) keeps repeated decompositions comparable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

REORTHO_EVERY = 50
REORTHO_DRIFT = 1e-8


@dataclass(frozen=True)
class SVDFactors:
    """Truncated factors ``u @ diag(sigma) @ v.T`` of a P x M matrix.

    ``u`` is P x r and ``v`` is M x r, both column-orthonormal; ``sigma`` is
    non-increasing and nonnegative. ``updates`` counts incremental appends
    applied since the batch decomposition (drives re-orthonormalization).
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray
    updates: int = 0

    def __post_init__(self):
        if self.u.ndim != 2 or self.v.ndim != 2 or self.sigma.ndim != 1:
            raise ValueError("u and v must be matrices, sigma a vector")
        r = self.sigma.shape[0]
        if self.u.shape[1] != r or self.v.shape[1] != r:
            raise ValueError("u, sigma, v disagree on rank")
        if np.any(self.sigma < 0) or np.any(np.diff(self.sigma) > 0):
            raise ValueError("sigma must be non-increasing and nonnegative")

    @property
    def rank(self) -> int:
        return self.sigma.shape[0]

    @property
    def n_rows(self) -> int:
        return self.u.shape[0]

    @property
    def n_cols(self) -> int:
        return self.v.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.sigma) @ self.v.T


def _fix_signs(u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Make each u column's largest-magnitude entry positive; flip v to match."""
    if u.shape[1] == 0:
        return u, v
    lead = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[lead, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, v * signs


def svht_rank(sigma: np.ndarray, p: int, m: int) -> int:
    """Rank cut from the optimal hard threshold for unknown noise level.

    Counts singular values strictly above ``omega(beta) * median(sigma)`` with
    ``beta = min(p, m) / max(p, m)`` and the cubic fit
    ``omega(beta) = 0.56 b^3 - 0.95 b^2 + 1.82 b + 1.43``; clamped to >= 1.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    if sigma.size == 0:
        raise ValueError("empty singular value list")
    if p < 1 or m < 1:
        raise ValueError("matrix dimensions must be >= 1")
    beta = min(p, m) / max(p, m)
    omega = 0.56 * beta**3 - 0.95 * beta**2 + 1.82 * beta + 1.43
    tau = omega * float(np.median(sigma))
    return max(int(np.sum(sigma > tau)), 1)


def truncated_svd(
    x: np.ndarray, rank: int | None = None, use_svht: bool = False
) -> SVDFactors:
    """Best rank-r factors of ``x``.

    r is the explicit ``rank`` when given, else the hard-threshold rank when
    ``use_svht``, else full ``min(P, M)``.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError("x must be a non-empty 2-D matrix")
    if not np.all(np.isfinite(x)):
        raise ValueError("x contains non-finite entries")
    p, m = x.shape
    u, sigma, vt = np.linalg.svd(x, full_matrices=False)
    if rank is not None:
        if not 1 <= rank <= min(p, m):
            raise ValueError(f"rank {rank} outside [1, {min(p, m)}]")
        r = rank
    elif use_svht:
        r = svht_rank(sigma, p, m)
    else:
        r = min(p, m)
    u, v = _fix_signs(u[:, :r], vt[:r, :].T)
    return SVDFactors(u=u, sigma=sigma[:r], v=v)


def orthonormality_drift(f: SVDFactors) -> float:
    """Frobenius departure of u and v from column orthonormality."""
    r = f.rank
    eye = np.eye(r)
    return float(
        max(
            np.linalg.norm(f.u.T @ f.u - eye),
            np.linalg.norm(f.v.T @ f.v - eye),
        )
    )


def _residual_basis(
    resid: np.ndarray, scale: float
) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the residual's numerical column space.

    Returns (q, r) with ``resid ~= q @ r``; directions whose pivoted-QR
    diagonal falls below the noise floor of ``scale`` are discarded so that
    appends inside the current span add no spurious rank.
    """
    p, k = resid.shape
    q_full, r_full, perm = scipy.linalg.qr(resid, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r_full))
    tol = np.finfo(np.float64).eps * max(p, k) * scale
    q_rank = int(np.sum(diag > tol))
    r_unperm = np.zeros((q_rank, k))
    r_unperm[:, perm] = r_full[:q_rank, :]
    return q_full[:, :q_rank], r_unperm


def incremental_svd_update(
    f: SVDFactors,
    new_cols: np.ndarray,
    max_rank: int | None = None,
    use_svht: bool = False,
) -> SVDFactors:
    """Factors of ``[X | new_cols]`` without re-decomposing X.

    Projects the new columns onto span(u), orthonormalizes the residual,
    decomposes the small (r+q) x (r+K) core, rotates the factors, then
    re-truncates per ``max_rank`` / ``use_svht`` (no truncation by default).
    Every REORTHO_EVERY updates, u is re-orthonormalized when its drift
    exceeds REORTHO_DRIFT.
    """
    c = np.asarray(new_cols, dtype=np.float64)
    if c.ndim == 1:
        c = c[:, None]
    if c.shape[0] != f.n_rows:
        raise ValueError(
            f"new columns have {c.shape[0]} rows, factors have {f.n_rows}"
        )
    if not np.all(np.isfinite(c)):
        raise ValueError("new columns contain non-finite entries")
    k = c.shape[1]
    if k == 0:
        return f

    r = f.rank
    proj = f.u.T @ c
    resid = c - f.u @ proj
    col_norms = np.linalg.norm(c, axis=0)
    scale = max(float(f.sigma[0]) if r else 0.0, float(col_norms.max(initial=0.0)))
    if scale == 0.0:
        scale = 1.0
    q, r_resid = _residual_basis(resid, scale)
    # The residual lives in the orthogonal complement of span(u), so at most
    # n_rows - r directions can be genuine; QR's pivoting orders the columns
    # by size, making a plain truncation keep the right ones.
    cap = f.n_rows - r
    if q.shape[1] > cap:
        q = q[:, :cap]
        r_resid = r_resid[:cap, :]
    q_rank = q.shape[1]

    core = np.zeros((r + q_rank, r + k))
    core[:r, :r] = np.diag(f.sigma)
    core[:r, r:] = proj
    core[r:, r:] = r_resid
    uc, sigma, vct = np.linalg.svd(core, full_matrices=False)
    vc = vct.T

    u = np.hstack([f.u, q]) @ uc
    v = np.vstack([f.v @ vc[:r, :], vc[r:, :]])

    updates = f.updates + 1
    if updates % REORTHO_EVERY == 0:
        drift = np.linalg.norm(u.T @ u - np.eye(u.shape[1]))
        if drift > REORTHO_DRIFT:
            qu, ru = np.linalg.qr(u)
            u2, sigma2, v2t = np.linalg.svd(ru * sigma)
            u = qu @ u2
            sigma = sigma2
            v = v @ v2t.T

    if max_rank is not None:
        keep = min(max_rank, sigma.shape[0])
    elif use_svht:
        keep = svht_rank(sigma, f.n_rows, f.n_cols + k)
    else:
        keep = sigma.shape[0]
    u, v = _fix_signs(u[:, :keep], v[:, :keep])
    return SVDFactors(u=u, sigma=sigma[:keep], v=v, updates=updates)
