"""Pure-Python (numpy) reference implementations of the hot kernels.

The compiled module _kernels mirrors these signatures exactly; backend.py
picks whichever is available (or whichever LPEQUIV_BACKEND demands). Keep
the two in numerical lockstep: both accumulate in C double precision, and
the batch tests pin them together to tight relative tolerance.
"""
from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def affine_power_sums(
    origin: np.ndarray,
    basis: np.ndarray,
    coeffs: np.ndarray,
    p: float,
    zero_tol: float,
) -> np.ndarray:
    """sum_i |origin_i + (basis @ c)_i|^p for each coefficient row c.

    origin: (m,), basis: (m, d), coeffs: (k, d) -> (k,). zero_tol is an
    absolute magnitude threshold supplied by the caller: for p = 0 the sum
    counts entries above it; for p > 0 entries at or below it contribute
    exactly 0 instead of |noise|^p, which for small p would otherwise turn
    rounding residue at a vanished coordinate into an O(1) term. Pass 0.0
    to evaluate the raw power sum.
    """
    pts = np.abs(origin[None, :] + coeffs @ basis.T)
    if p == 0.0:
        return (pts > zero_tol).sum(axis=1).astype(float)
    if zero_tol > 0.0:
        pts = np.where(pts > zero_tol, pts, 0.0)
    return (pts**p).sum(axis=1)


def sparsity_ratio_max(
    vectors: np.ndarray, p: float, t: int, zero_rel: float
) -> tuple[int, float]:
    """Largest (top-t weight) / (remaining weight) over a batch of vectors.

    Each row v gets per-entry weights w_i = |v_i|^p (or, for p = 0, the
    indicator of |v_i| > zero_rel * max_j |v_j|). The row's ratio is the
    sum of its t largest weights over the sum of the rest: 0 when the top
    block is empty-weight, +inf when the tail weight vanishes while the
    top does not. Returns (row index of the maximum, maximum ratio);
    ties keep the first row.
    """
    k, m = vectors.shape
    t = int(t)
    if t <= 0:
        return 0, 0.0
    t = min(t, m)
    av = np.abs(vectors)
    if p == 0.0:
        thresh = zero_rel * av.max(axis=1, keepdims=True)
        w = (av > thresh).astype(float)
    else:
        w = av**p
    part = -np.partition(-w, t - 1, axis=1)
    top = part[:, :t].sum(axis=1)
    rest = np.maximum(w.sum(axis=1) - top, 0.0)
    best_idx = 0
    best = -1.0
    for i in range(k):
        if top[i] <= 0.0:
            r = 0.0
        elif rest[i] <= 0.0:
            r = np.inf
        else:
            r = top[i] / rest[i]
        if r > best:
            best = r
            best_idx = i
    return best_idx, float(best)
