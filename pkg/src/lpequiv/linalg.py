"""Dense linear-algebra primitives for desk-scale problems (n, m <= ~30).

Provides the domain types (SensingProblem, KernelBasis, Tolerances) and the
basic operations every other module builds on: quasi-norms, Gram
eigenvalues, the minimum-norm solution, an orthonormal kernel basis,
supports, and restricted least squares.

Eigenvalues come from a cyclic Jacobi diagonalization of the smaller Gram
matrix (AA^T, since m > n always holds here); rank, the smallest positive
eigenvalue, and the kernel dimension are all derived from the same
eigenvalue threshold so they stay mutually consistent.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AssumptionViolationError,
    NumericalError,
    ParameterError,
    ProblemFormatError,
    RankDeficiencyError,
)

DEFAULT_SEED = 0x5EED


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds used across the toolkit.

    zero_thresh_rel: entries with |x_i| <= zero_thresh_rel * max|x| count
        as zero.
    eig_tol: Jacobi convergence when all off-diagonals <= eig_tol * lam_max.
    rank_rel_tol: eigenvalues <= rank_rel_tol * lam_max count as zero.
    solver_eq_tol: two solutions are equal when max-abs difference is below.
    residual_tol: a support is consistent when the least-squares residual
        2-norm is below residual_tol * (1 + ||b||_2).
    """

    zero_thresh_rel: float = 1e-8
    eig_tol: float = 1e-12
    rank_rel_tol: float = 1e-10
    solver_eq_tol: float = 1e-6
    residual_tol: float = 1e-8

    def __post_init__(self):
        for name in (
            "zero_thresh_rel",
            "eig_tol",
            "rank_rel_tol",
            "solver_eq_tol",
            "residual_tol",
        ):
            if not getattr(self, name) > 0:
                raise ParameterError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class AffineParametrization:
    """A solution-set chart x(c) = origin + basis @ c attached to a problem.

    Built-in example problems carry their hand-derived charts so emitted
    curves use the same axes as the source figures instead of an arbitrary
    orthonormal rotation. basis columns need not be orthonormal.
    """

    origin: np.ndarray
    basis: np.ndarray

    def __post_init__(self):
        origin = _readonly(self.origin)
        basis = _readonly(self.basis)
        if origin.ndim != 1 or basis.ndim != 2 or basis.shape[0] != origin.shape[0]:
            raise ProblemFormatError("parametrization shapes are inconsistent")
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "basis", basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


@dataclass(frozen=True, eq=False)
class SensingProblem:
    """An underdetermined system Ax = b with n equations and m > n unknowns."""

    A: np.ndarray
    b: np.ndarray
    name: str = "problem"
    tol: Tolerances = DEFAULT_TOL
    parametrization: AffineParametrization | None = None

    def __post_init__(self):
        try:
            A = np.array(self.A, dtype=float)
            b = np.array(self.b, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ProblemFormatError(f"non-numeric problem data: {exc}") from None
        if A.ndim != 2:
            raise ProblemFormatError("A must be a 2-d matrix")
        if b.ndim != 1:
            raise ProblemFormatError("b must be a 1-d vector")
        if not (np.isfinite(A).all() and np.isfinite(b).all()):
            raise ProblemFormatError("problem data must be finite")
        n, m = A.shape
        if b.shape[0] != n:
            raise ProblemFormatError(
                f"b has length {b.shape[0]} but A has {n} rows"
            )
        if n < 1:
            raise ProblemFormatError("A needs at least one row")
        if m < 3:
            raise ProblemFormatError(f"m = {m} < 3: system too small")
        if m <= n:
            raise ProblemFormatError(
                f"m = {m} <= n = {n}: system is not underdetermined"
            )
        if float(np.abs(b).max()) == 0.0:
            raise AssumptionViolationError("b is the zero vector")
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "b", _readonly(b))
        # full row rank under the eigenvalue threshold
        vals, _ = jacobi_eigensystem(self.A @ self.A.T, self.tol.eig_tol)
        if vals[0] <= 0 or int((vals > self.tol.rank_rel_tol * vals[0]).sum()) < n:
            raise RankDeficiencyError(
                f"A does not have full row rank {n} under the rank tolerance"
            )
        if self.parametrization is not None:
            pz = self.parametrization
            scale = 1.0 + float(np.abs(self.b).max())
            if (
                pz.origin.shape[0] != m
                or np.abs(self.A @ pz.origin - self.b).max() > 1e-8 * scale
                or (pz.dim and np.abs(self.A @ pz.basis).max() > 1e-8 * scale)
            ):
                raise ProblemFormatError("parametrization does not solve Ax = b")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True, eq=False)
class KernelBasis:
    """Orthonormal basis N (m x d) of Ker(A)."""

    N: np.ndarray
    d: int

    def __post_init__(self):
        object.__setattr__(self, "N", _readonly(self.N))


def jacobi_eigensystem(
    S: np.ndarray, eig_tol: float = DEFAULT_TOL.eig_tol, max_sweeps: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (values, vectors) with values nonincreasing and S @ vectors ==
    vectors @ diag(values). Converged when every off-diagonal magnitude is
    at most eig_tol times the largest diagonal magnitude; raises
    NumericalError if that does not happen within max_sweeps sweeps.
    """
    a = np.array(S, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ParameterError("eigensolver needs a square matrix")
    k = a.shape[0]
    a = (a + a.T) / 2.0
    v = np.eye(k)
    if k == 1:
        return a[0, :1].copy(), v
    iu = np.triu_indices(k, 1)
    for _ in range(max_sweeps):
        scale = float(np.abs(np.diagonal(a)).max())
        if float(np.abs(a[iu]).max()) <= eig_tol * scale:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 if theta == 0.0 else np.sign(theta) / (
                    abs(theta) + np.hypot(theta, 1.0)
                )
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise NumericalError(
            f"eigensolver did not converge within {max_sweeps} sweeps"
        )
    vals = np.diagonal(a).copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def quasi_norm(x: np.ndarray, p: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """||x||_p: the count of nonzeros for p = 0 (relative zero threshold),
    (sum |x_i|^p)^(1/p) for 0 < p <= 1, the Euclidean norm for p = 2."""
    x = np.asarray(x, dtype=float)
    if p == 0.0:
        return float(len(support(x, tol)))
    if 0.0 < p <= 1.0:
        if not x.size:
            return 0.0
        power_sum = np.float64((np.abs(x) ** p).sum())
        # the root overflows for tiny p with more than one nonzero entry;
        # report the mathematically faithful +inf instead of raising
        with np.errstate(over="ignore"):
            return float(power_sum ** np.float64(1.0 / p))
    if p == 2.0:
        return float(np.linalg.norm(x))
    raise ParameterError(f"p = {p} outside [0, 1] and not 2")


def support(x: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> frozenset[int]:
    """Indices i with |x_i| > zero_thresh_rel * max_j |x_j| (0-based)."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return frozenset()
    mx = float(np.abs(x).max())
    if mx == 0.0:
        return frozenset()
    return frozenset(np.flatnonzero(np.abs(x) > tol.zero_thresh_rel * mx).tolist())


def gram_eigenvalues(
    problem: SensingProblem, tol: Tolerances | None = None
) -> np.ndarray:
    """All m eigenvalues of A^T A, nonincreasing.

    Computed on the smaller Gram AA^T (the nonzero spectrum is shared) and
    padded with zeros; entries at or below rank_rel_tol * lam_max are
    reported as exactly 0, so exactly rank(A) entries are positive.
    """
    tol = tol or problem.tol
    vals, _ = jacobi_eigensystem(problem.A @ problem.A.T, tol.eig_tol)
    vals = np.where(vals > tol.rank_rel_tol * vals[0], vals, 0.0)
    return np.concatenate([vals, np.zeros(problem.m - problem.n)])


def min_norm_solution(
    problem: SensingProblem, tol: Tolerances | None = None
) -> np.ndarray:
    """The Euclidean-smallest solution A^T (AA^T)^{-1} b of Ax = b."""
    A, b = problem.A, problem.b
    try:
        y = np.linalg.solve(A @ A.T, b)
    except np.linalg.LinAlgError as exc:
        raise RankDeficiencyError(f"AA^T is numerically singular: {exc}") from None
    return A.T @ y


def kernel_basis(
    problem: SensingProblem, tol: Tolerances | None = None
) -> KernelBasis:
    """Orthonormal basis of Ker(A).

    Starts from the eigenvectors of A^T A whose eigenvalues fall at or
    below the rank threshold, then applies one exact projection off the
    row space (N <- N - A^T (AA^T)^{-1} A N) and re-orthonormalizes, which
    pushes ||A N|| from the Jacobi threshold down to machine precision.
    Column signs are normalized (largest-magnitude entry positive) so the
    basis is reproducible across runs.
    """
    tol = tol or problem.tol
    A = problem.A
    vals, vecs = jacobi_eigensystem(A.T @ A, tol.eig_tol)
    null_mask = vals <= tol.rank_rel_tol * vals[0]
    d = int(null_mask.sum())
    if d == 0:
        return KernelBasis(N=np.zeros((problem.m, 0)), d=0)
    N = vecs[:, null_mask]
    N = N - A.T @ np.linalg.solve(A @ A.T, A @ N)
    N, _ = np.linalg.qr(N)
    for j in range(d):
        i = int(np.argmax(np.abs(N[:, j])))
        if N[i, j] < 0:
            N[:, j] = -N[:, j]
    if np.abs(N.T @ N - np.eye(d)).max() > 1e-10:
        raise NumericalError("kernel basis lost orthonormality")
    return KernelBasis(N=N, d=d)


def restricted_least_squares(
    problem: SensingProblem, S
) -> tuple[np.ndarray, float]:
    """Least squares on the column subset S: min ||A_S z - b||_2.

    Returns (coefficients in the order of sorted(S), residual 2-norm); the
    minimum-norm coefficient vector when A_S is rank-deficient.
    """
    idx = sorted(set(int(i) for i in S))
    if not idx:
        raise ParameterError("support set is empty")
    if idx[0] < 0 or idx[-1] >= problem.m:
        raise ParameterError(f"support indices out of range 0..{problem.m - 1}")
    As = problem.A[:, idx]
    z, *_ = np.linalg.lstsq(As, problem.b, rcond=None)
    residual = float(np.linalg.norm(As @ z - problem.b))
    return z, residual


def embed_on_support(coeffs: np.ndarray, S, m: int) -> np.ndarray:
    """Scatter coefficients (ordered by sorted support) into a length-m vector."""
    x = np.zeros(m)
    x[sorted(set(int(i) for i in S))] = coeffs
    return x
