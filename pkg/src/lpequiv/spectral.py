"""Spectral descriptors of the sensing matrix.

lambda_ratio is the conditioning number that drives the analytic threshold:
largest over smallest positive eigenvalue of A^T A. spark is the smallest
number of linearly dependent columns. restricted_frame_bounds gives the
extreme eigenvalues of A_S^T A_S over all column subsets of a fixed size,
and disjoint_cross_term_check stress-tests the cross-correlation inequality
|<A z1, A z2>| <= (w^2 - u^2)/2 * ||z1|| ||z2|| for disjointly supported
vectors against those bounds.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import ParameterError, SizeGuardError
from .linalg import (
    DEFAULT_SEED,
    SensingProblem,
    Tolerances,
    gram_eigenvalues,
    jacobi_eigensystem,
)


@dataclass(frozen=True)
class SpectralSummary:
    """Eigenvalue-level description of A."""

    lambda_max: float
    lambda_min_plus: float
    lambda_ratio: float
    rank: int
    gram_eigenvalues: tuple[float, ...]
    spark: int | None = None

    def __post_init__(self):
        if self.spark is not None and not (2 <= self.spark <= len(self.gram_eigenvalues) + 1):
            raise ParameterError(f"spark {self.spark} outside [2, m + 1]")


@dataclass(frozen=True)
class FrameBounds:
    """Extremal eigenvalues of A_S^T A_S over all supports S of size s."""

    s: int
    u_sq: float
    w_sq: float
    attaining_support_lower: tuple[int, ...]
    attaining_support_upper: tuple[int, ...]

    def __post_init__(self):
        if not (0.0 <= self.u_sq <= self.w_sq):
            raise ParameterError(
                f"frame bounds out of order: u^2 = {self.u_sq}, w^2 = {self.w_sq}"
            )


def lambda_ratio(problem: SensingProblem, tol: Tolerances | None = None) -> float:
    """lambda_max(A^T A) / lambda_min_plus(A^T A) (>= 1)."""
    tol = tol or problem.tol
    vals = gram_eigenvalues(problem, tol)
    pos = vals[vals > 0.0]
    return float(pos[0] / pos[-1])


def spark(
    problem: SensingProblem,
    max_m: int = 20,
    tol: Tolerances | None = None,
) -> int:
    """Smallest number of linearly dependent columns of A.

    Enumerates column subsets by increasing size (2 .. n + 1); a subset is
    dependent when the smallest eigenvalue of its Gram falls at or below
    the rank threshold. Full column rank on every size-n subset forces
    spark = n + 1. Guarded to m <= max_m since the enumeration is
    exponential in m.
    """
    tol = tol or problem.tol
    if problem.m > max_m:
        raise SizeGuardError(
            f"spark enumeration needs m <= {max_m}, got m = {problem.m}"
        )
    A = problem.A
    n = problem.n
    for size in range(2, n + 1):
        for S in combinations(range(problem.m), size):
            sub = A[:, S]
            vals, _ = jacobi_eigensystem(sub.T @ sub, tol.eig_tol)
            if vals[-1] <= tol.rank_rel_tol * vals[0]:
                return size
    return n + 1


def restricted_frame_bounds(
    problem: SensingProblem,
    s: int,
    tol: Tolerances | None = None,
    max_subsets: int = 10**6,
) -> FrameBounds:
    """Exact u^2 = min, w^2 = max of eig(A_S^T A_S) over all |S| = s.

    Supports are scanned in lexicographic order and strict comparisons keep
    the first attaining support for each bound. Guarded to at most
    max_subsets subsets.
    """
    tol = tol or problem.tol
    s = int(s)
    if not (1 <= s <= problem.m):
        raise ParameterError(f"subset size s = {s} outside 1..{problem.m}")
    if comb(problem.m, s) > max_subsets:
        raise SizeGuardError(
            f"C({problem.m}, {s}) = {comb(problem.m, s)} exceeds the "
            f"{max_subsets} subset guard"
        )
    A = problem.A
    u_sq = np.inf
    w_sq = -np.inf
    arg_lo: tuple[int, ...] = ()
    arg_hi: tuple[int, ...] = ()
    for S in combinations(range(problem.m), s):
        sub = A[:, S]
        vals, _ = jacobi_eigensystem(sub.T @ sub, tol.eig_tol)
        if vals[-1] < u_sq:
            u_sq = float(vals[-1])
            arg_lo = S
        if vals[0] > w_sq:
            w_sq = float(vals[0])
            arg_hi = S
    return FrameBounds(
        s=s,
        u_sq=max(u_sq, 0.0),
        w_sq=w_sq,
        attaining_support_lower=arg_lo,
        attaining_support_upper=arg_hi,
    )


@dataclass(frozen=True)
class CrossTermCheck:
    """Result of the randomized disjoint-support cross-correlation test."""

    s: int
    trials: int
    bound_coefficient: float
    max_ratio: float
    max_slack: float
    worst_pair: tuple[tuple[int, ...], tuple[int, ...]]
    holds: bool


def disjoint_cross_term_check(
    problem: SensingProblem,
    s: int,
    trials: int = 500,
    seed: int = DEFAULT_SEED,
    slack_tol: float = 1e-10,
) -> CrossTermCheck:
    """Randomized check of |<A z1, A z2>| <= (w^2 - u^2)/2 ||z1|| ||z2||.

    z1, z2 are random vectors with disjoint supports of sizes up to s each;
    the frame bounds are taken at level 2s (the combined support size).
    Requires 2s <= m so disjoint supports exist.
    """
    s = int(s)
    if s < 1:
        raise ParameterError("support size s must be >= 1")
    if 2 * s > problem.m:
        raise ParameterError(
            f"need 2s <= m for disjoint supports; got s = {s}, m = {problem.m}"
        )
    fb = restricted_frame_bounds(problem, 2 * s)
    coeff = (fb.w_sq - fb.u_sq) / 2.0
    rng = np.random.default_rng(seed)
    A = problem.A
    max_ratio = 0.0
    worst: tuple[tuple[int, ...], tuple[int, ...]] = ((), ())
    for _ in range(int(trials)):
        k1 = int(rng.integers(1, s + 1))
        k2 = int(rng.integers(1, s + 1))
        perm = rng.permutation(problem.m)
        S1 = tuple(sorted(int(i) for i in perm[:k1]))
        S2 = tuple(sorted(int(i) for i in perm[k1 : k1 + k2]))
        z1 = np.zeros(problem.m)
        z2 = np.zeros(problem.m)
        z1[list(S1)] = rng.standard_normal(k1)
        z2[list(S2)] = rng.standard_normal(k2)
        denom = float(np.linalg.norm(z1) * np.linalg.norm(z2))
        if denom == 0.0:
            continue
        ratio = abs(float((A @ z1) @ (A @ z2))) / denom
        if ratio > max_ratio:
            max_ratio = ratio
            worst = (S1, S2)
    return CrossTermCheck(
        s=s,
        trials=int(trials),
        bound_coefficient=coeff,
        max_ratio=max_ratio,
        max_slack=max_ratio - coeff,
        worst_pair=worst,
        holds=max_ratio <= coeff + slack_tol,
    )


def spectral_summary(
    problem: SensingProblem,
    tol: Tolerances | None = None,
    spark_max_m: int = 20,
) -> SpectralSummary:
    """Bundle eigenvalue data with spark (omitted above the size guard)."""
    tol = tol or problem.tol
    vals = gram_eigenvalues(problem, tol)
    pos = vals[vals > 0.0]
    try:
        spk: int | None = spark(problem, max_m=spark_max_m, tol=tol)
    except SizeGuardError:
        spk = None
    return SpectralSummary(
        lambda_max=float(pos[0]),
        lambda_min_plus=float(pos[-1]),
        lambda_ratio=float(pos[0] / pos[-1]),
        rank=int(pos.size),
        gram_eigenvalues=tuple(float(v) for v in vals),
        spark=spk,
    )
