"""Select the hot-kernel implementation.

The compiled extension (lpequiv._kernels, Cython) is used when present;
otherwise the numpy reference (lpequiv._kernels_py) takes over with
identical semantics. Set LPEQUIV_BACKEND=python or LPEQUIV_BACKEND=compiled
to force a choice. A bad value, or forcing "compiled" when the extension is
not built, is reported as a ParameterError on first use (ensure_ready) so
that importing the package never fails outright.
"""
from __future__ import annotations

import os

import numpy as np

from .errors import ParameterError


def _select():
    """Return (implementation module or None, deferred error or None)."""
    choice = os.environ.get("LPEQUIV_BACKEND", "").strip().lower()
    if choice not in ("", "python", "compiled"):
        return None, ParameterError(
            f"LPEQUIV_BACKEND={choice!r}: use 'python' or 'compiled'"
        )
    if choice == "python":
        from . import _kernels_py as impl

        return impl, None
    try:
        from . import _kernels as impl  # type: ignore[attr-defined]
    except ImportError:
        if choice == "compiled":
            return None, ParameterError(
                "LPEQUIV_BACKEND=compiled but the compiled extension is not "
                "built; reinstall the package or unset LPEQUIV_BACKEND"
            )
        from . import _kernels_py as impl

    return impl, None


_impl, _deferred_error = _select()

BACKEND: str = _impl.BACKEND_NAME if _impl is not None else "unavailable"


def ensure_ready() -> None:
    """Raise the deferred backend-selection error, if any."""
    if _deferred_error is not None:
        raise _deferred_error


def affine_power_sums(
    origin: np.ndarray,
    basis: np.ndarray,
    coeffs: np.ndarray,
    p: float,
    zero_tol: float,
) -> np.ndarray:
    """Batch sum_i |origin_i + (basis @ c)_i|^p; p = 0 counts entries whose
    magnitude exceeds the absolute threshold zero_tol."""
    ensure_ready()
    origin = np.ascontiguousarray(origin, dtype=float)
    basis = np.ascontiguousarray(basis, dtype=float)
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    if coeffs.ndim == 1:
        # 1-d input: a batch of scalars when the chart is 1-d, else one point
        coeffs = coeffs[:, None] if basis.shape[1] == 1 else coeffs[None, :]
    return np.asarray(
        _impl.affine_power_sums(origin, basis, coeffs, float(p), float(zero_tol))
    )


def sparsity_ratio_max(
    vectors: np.ndarray, p: float, t: int, zero_rel: float
) -> tuple[int, float]:
    """Batch max over rows of (sum of t largest |v_i|^p) / (sum of rest);
    first row wins ties. Returns (row index, ratio)."""
    ensure_ready()
    vectors = np.ascontiguousarray(vectors, dtype=float)
    if vectors.ndim == 1:
        vectors = vectors[None, :]
    idx, val = _impl.sparsity_ratio_max(vectors, float(p), int(t), float(zero_rel))
    return int(idx), float(val)
