"""The analytic equivalence threshold and null-space diagnostics.

Core quantity: a threshold p* = p*(A, b) in (0, 1] such that for every
exponent 0 < p < p*, the lp-quasinorm minimizer over {x : Ax = b} is
provably the unique sparsest (l0) solution. The threshold is

    p* = max(h(S*), h(T)),   h(x) = ln((x + 1) / x) / ln(C),

where S* is the support size of the minimum-norm solution, T is an
integer ceiling depending only on the row count m, and C > 1 aggregates
the Gram conditioning ratio lambda = lambda_max / lambda_min_plus of
A^T A with m. Since h is strictly decreasing, the max is attained at
min(S*, T); the implementation computes the threshold by both routes and
cross-checks them.

Also here: the null-space constant (largest top-t / tail ratio of
|v|^p-weights over kernel vectors v), whose being < 1 is the null-space
property at order t, plus sparsity diagnostics that relate spark, the
integer ceiling, and restricted frame bounds to the guarantee.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import backend
from .errors import (
    InexactRegimeError,
    NumericalError,
    ParameterError,
    SizeGuardError,
)
from .linalg import (
    DEFAULT_SEED,
    KernelBasis,
    SensingProblem,
    Tolerances,
    gram_eigenvalues,
    kernel_basis,
    min_norm_solution,
    support,
)
from .spectral import lambda_ratio, restricted_frame_bounds, spark

_SQRT2P1_HALF = (math.sqrt(2.0) + 1.0) / 2.0
NSP_STRICT_SLACK = 1e-12


def _log_base_constant(m: int, lam: float) -> float:
    """C(m, lambda) = (sqrt(2)+1)/2 * [(lam-1)(m-3)/2 + lam + sqrt(1/2)]."""
    if m < 3:
        raise ParameterError(f"m = {m} < 3")
    if lam < 1.0:
        raise ParameterError(f"conditioning ratio {lam} < 1")
    return _SQRT2P1_HALF * ((lam - 1.0) * (m - 3.0) / 2.0 + lam + math.sqrt(0.5))


def h_of_x(x: float, m: int, lam: float) -> float:
    """h(x) = ln((x + 1) / x) / ln(C(m, lam)), strictly decreasing in x.

    Any p below h(t) makes the order-t tail factor f_bound(t, p) drop
    below 1, which is what the equivalence argument needs.
    """
    if x < 1.0:
        raise ParameterError(f"h is defined for x >= 1, got {x}")
    c = _log_base_constant(m, lam)
    return math.log((x + 1.0) / x) / math.log(c)


def t_bound(m: int) -> int:
    """Largest sparsity order covered by the conditioning argument alone:
    floor((m - 2.5) / 2) + 1."""
    if m < 3:
        raise ParameterError(f"m = {m} < 3")
    return int(math.floor((m - 2.5) / 2.0)) + 1


def s_star(problem: SensingProblem, tol: Tolerances | None = None) -> int:
    """Support size of the minimum-norm solution A^T (AA^T)^{-1} b."""
    tol = tol or problem.tol
    return len(support(min_norm_solution(problem), tol))


def h_star(p: float, t: int, m: int, lam: float) -> float:
    """Order-t contraction factor of the equivalence argument:

    h*(p, t) = (sqrt(2)+1)/2 * (t/(t+1))^(1/p)
               * [(lam-1)(m-2-t)/(2t) + (lam + sqrt(1/(t+1))) / sqrt(t)].

    When h*(p, t) < 1 the lp minimizer cannot move off the sparsest
    support at order t. Requires t >= 1 and m >= t + 2 (the factor
    compares a size-t block against the remaining m - t - 2 tail).
    """
    t = int(t)
    if t < 1:
        raise ParameterError(f"sparsity order t = {t} < 1")
    if m < t + 2:
        raise ParameterError(f"need m >= t + 2, got m = {m}, t = {t}")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p = {p} outside (0, 1]")
    if lam < 1.0:
        raise ParameterError(f"conditioning ratio {lam} < 1")
    tail = (lam - 1.0) * (m - 2.0 - t) / (2.0 * t)
    tail += (lam + math.sqrt(1.0 / (t + 1.0))) / math.sqrt(t)
    return _SQRT2P1_HALF * (t / (t + 1.0)) ** (1.0 / p) * tail


def f_bound(t: float, p: float, m: int, lam: float) -> float:
    """Simplified envelope f(t, p) = (t/(t+1))^(1/p) * C(m, lam).

    Dominates h_star for every integer t >= 1 and satisfies the exact
    duality f(x, h(x)) = 1: h is the inverse of f in p at level 1.
    Increasing in t, decreasing in p.
    """
    if t < 1.0:
        raise ParameterError(f"t = {t} < 1")
    if not 0.0 < p <= 1.0:
        raise ParameterError(f"p = {p} outside (0, 1]")
    c = _log_base_constant(m, lam)
    return (t / (t + 1.0)) ** (1.0 / p) * c


@dataclass(frozen=True)
class NscBudget:
    """Sampling effort for the inexact (kernel dimension >= 2) regime."""

    points_per_plane: int = 4096
    polish_sweeps: int = 100
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.points_per_plane < 8:
            raise ParameterError("points_per_plane must be >= 8")
        if self.polish_sweeps < 0:
            raise ParameterError("polish_sweeps must be >= 0")


DEFAULT_BUDGET = NscBudget()


@dataclass(frozen=True, eq=False)
class NscEstimate:
    """Null-space constant at (p, t): max over kernel vectors v of
    (sum of t largest |v_i|^p) / (sum of the rest).

    exact is True when the kernel is at most one-dimensional (the ratio
    is scale-invariant, so a single direction decides it); otherwise the
    value is a sampled lower estimate. witness_kernel_vector attains the
    reported value.
    """

    p: float
    t: int
    value: float
    exact: bool
    witness_kernel_vector: np.ndarray

    def __post_init__(self):
        w = np.array(self.witness_kernel_vector, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "witness_kernel_vector", w)


def _ratio_of(vector: np.ndarray, p: float, t: int, zero_rel: float) -> float:
    _, val = backend.sparsity_ratio_max(
        np.asarray(vector, dtype=float)[None, :], p, t, zero_rel
    )
    return val


def nsc_from_kernel(
    kernel: KernelBasis,
    p: float,
    t: int,
    budget: NscBudget | None = None,
    tol: Tolerances | None = None,
) -> NscEstimate:
    """Null-space constant over span(kernel.N).

    d = 0: trivially 0 (no nonzero kernel vectors). d = 1: exact, from
    the single direction. d >= 2: dense low-discrepancy circles in every
    coordinate 2-plane of the coefficient sphere (plus a random batch
    when d >= 3), followed by shrinking-step coordinate ascent.
    """
    budget = budget or DEFAULT_BUDGET
    tol = tol or Tolerances()
    if not (p == 0.0 or 0.0 < p <= 1.0):
        raise ParameterError(f"p = {p} outside {{0}} and (0, 1]")
    t = int(t)
    if t < 0:
        raise ParameterError(f"sparsity order t = {t} < 0")
    N, d = kernel.N, kernel.d
    m = N.shape[0]
    if t > m - 1:
        raise ParameterError(f"t = {t} leaves no tail entries (m = {m})")
    zr = tol.zero_thresh_rel
    if d == 0:
        return NscEstimate(
            p=p, t=t, value=0.0, exact=True, witness_kernel_vector=np.zeros(m)
        )
    if d == 1:
        v = N[:, 0]
        return NscEstimate(
            p=p, t=t, value=_ratio_of(v, p, t, zr), exact=True,
            witness_kernel_vector=v.copy(),
        )
    rng = np.random.default_rng(budget.seed)
    k = budget.points_per_plane
    best_val = -1.0
    best_c = np.zeros(d)
    for (i, j) in combinations(range(d), 2):
        jitter = float(rng.random())
        theta = 2.0 * np.pi * (np.arange(k) + jitter) / k
        coeffs = np.zeros((k, d))
        coeffs[:, i] = np.cos(theta)
        coeffs[:, j] = np.sin(theta)
        idx, val = backend.sparsity_ratio_max(coeffs @ N.T, p, t, zr)
        if val > best_val:
            best_val = val
            best_c = coeffs[idx]
    if d >= 3:
        extra = rng.standard_normal((k, d))
        extra /= np.linalg.norm(extra, axis=1, keepdims=True)
        idx, val = backend.sparsity_ratio_max(extra @ N.T, p, t, zr)
        if val > best_val:
            best_val = val
            best_c = extra[idx]
    # the ratio peaks (for small p, jumps) where kernel entries vanish;
    # seed those kinks exactly: directions annihilating any d-1 entries
    kinks = []
    for rows in combinations(range(m), d - 1):
        _, _, vh = np.linalg.svd(N[list(rows), :])
        kinks.append(vh[-1])
    kink_arr = np.array(kinks)
    idx, val = backend.sparsity_ratio_max(kink_arr @ N.T, p, t, zr)
    if val > best_val:
        best_val = val
        best_c = kink_arr[idx]
    c = best_c.copy()
    val = best_val
    delta = 0.25
    for _ in range(budget.polish_sweeps):
        if delta < 1e-10 or not np.isfinite(val):
            break
        improved = False
        for axis in range(d):
            for sign in (1.0, -1.0):
                cand = c.copy()
                cand[axis] += sign * delta
                nrm = float(np.linalg.norm(cand))
                if nrm == 0.0:
                    continue
                cand /= nrm
                r = _ratio_of(N @ cand, p, t, zr)
                if r > val:
                    val = r
                    c = cand
                    improved = True
        if not improved:
            delta /= 2.0
    # |.|^p is non-Lipschitz at 0, so near a kink the batch-evaluated ratio
    # and the witness's own ratio can drift apart at the last few digits;
    # report the value the witness itself attains so it reproduces exactly
    witness = N @ c
    value = _ratio_of(witness, p, t, zr)
    if np.isfinite(val) and np.isfinite(value) and abs(value - val) > 1e-6 * max(1.0, abs(val)):
        raise NumericalError("null-space constant search lost its witness")
    return NscEstimate(
        p=p, t=t, value=value, exact=False, witness_kernel_vector=witness
    )


def nsc_estimate(
    problem: SensingProblem,
    p: float,
    t: int,
    budget: NscBudget | None = None,
) -> NscEstimate:
    """Null-space constant of Ker(A) at exponent p and order t."""
    return nsc_from_kernel(
        kernel_basis(problem), p, t, budget=budget, tol=problem.tol
    )


@dataclass(frozen=True, eq=False)
class NspCheck:
    """Null-space property verdict at (p, t): holds iff the null-space
    constant is strictly below 1 (with slack NSP_STRICT_SLACK)."""

    p: float
    t: int
    value: float
    holds: bool
    exact: bool
    witness_kernel_vector: np.ndarray
    top_weight: float
    tail_weight: float


def _split_weights(
    v: np.ndarray, p: float, t: int, zero_rel: float
) -> tuple[float, float]:
    av = np.abs(np.asarray(v, dtype=float))
    if p == 0.0:
        w = (av > zero_rel * av.max()).astype(float) if av.size else av
    else:
        w = av**p
    w = np.sort(w)[::-1]
    t = min(int(t), w.size)
    return float(w[:t].sum()), float(w[t:].sum())


def nsp_check(
    problem: SensingProblem,
    p: float,
    t: int | None = None,
    x_star: np.ndarray | None = None,
    budget: NscBudget | None = None,
) -> NspCheck:
    """Does the null-space property of order t hold at exponent p?

    Pass the order directly, or pass a candidate solution x_star to use
    its support size as the order (x_star must satisfy Ax = b within the
    residual tolerance). When the kernel is multi-dimensional the verdict
    rests on a sampled estimate: a False is then a certified failure
    (the witness is explicit), a True is evidence, not proof.
    """
    if (t is None) == (x_star is None):
        raise ParameterError("pass exactly one of t and x_star")
    if x_star is not None:
        x_star = np.asarray(x_star, dtype=float)
        if x_star.shape != (problem.m,):
            raise ParameterError(f"x_star must have length {problem.m}")
        resid = float(np.linalg.norm(problem.A @ x_star - problem.b))
        bound = problem.tol.residual_tol * (1.0 + float(np.linalg.norm(problem.b)))
        if resid > bound:
            raise ParameterError(
                f"x_star does not solve the system: residual {resid:.3e}"
            )
        t = len(support(x_star, problem.tol))
    est = nsc_estimate(problem, p, int(t), budget=budget)
    top, tail = _split_weights(
        est.witness_kernel_vector, p, est.t, problem.tol.zero_thresh_rel
    )
    return NspCheck(
        p=p,
        t=est.t,
        value=est.value,
        holds=bool(est.value < 1.0 - NSP_STRICT_SLACK),
        exact=est.exact,
        witness_kernel_vector=est.witness_kernel_vector,
        top_weight=top,
        tail_weight=tail,
    )


@dataclass(frozen=True)
class KernelSparsityDiagnostics:
    """How the kernel's sparsity relates to recovery order t.

    every_2t_columns_independent: spark > 2t, the classical uniqueness
        condition (None when the spark enumeration was size-guarded).
    order_within_conditioning_ceiling: t <= t_bound(m).
    min_kernel_l0: sparsest nonzero kernel vector's support size (= spark).
    """

    t: int
    spark: int | None
    t_bound: int
    every_2t_columns_independent: bool | None
    order_within_conditioning_ceiling: bool
    min_kernel_l0: int | None


def kernel_sparsity_diagnostics(
    problem: SensingProblem, t: int, spark_max_m: int = 20
) -> KernelSparsityDiagnostics:
    """Evaluate the order-t sparsity conditions; spark == 2t + 1 threshold."""
    t = int(t)
    if t < 1:
        raise ParameterError(f"sparsity order t = {t} < 1")
    tb = t_bound(problem.m)
    try:
        spk: int | None = spark(problem, max_m=spark_max_m)
    except SizeGuardError:
        spk = None
    return KernelSparsityDiagnostics(
        t=t,
        spark=spk,
        t_bound=tb,
        every_2t_columns_independent=None if spk is None else bool(spk >= 2 * t + 1),
        order_within_conditioning_ceiling=bool(t <= tb),
        min_kernel_l0=spk,
    )


@dataclass(frozen=True)
class DownwardClosedProbe:
    """NSP holds on a downward-closed set of exponents (empirical probe)."""

    t: int
    p_values: tuple[float, ...]
    holds_flags: tuple[bool, ...]
    downward_closed: bool


def nsp_downward_closed_probe(
    problem: SensingProblem, t: int, p_grid
) -> DownwardClosedProbe:
    """Check {p : NSP(p, t) holds} is a prefix of the ascending grid.

    Only meaningful in the exact regime, so the kernel must be
    one-dimensional; otherwise the sampled estimates could fake a
    violation and InexactRegimeError is raised.
    """
    kb = kernel_basis(problem)
    if kb.d > 1:
        raise InexactRegimeError(
            "monotonicity probe needs an exactly computable null-space "
            f"constant (kernel dimension 1), got dimension {kb.d}"
        )
    ps = sorted(float(p) for p in p_grid)
    if not ps:
        raise ParameterError("empty exponent grid")
    flags = []
    for p in ps:
        est = nsc_from_kernel(kb, p, int(t), tol=problem.tol)
        flags.append(bool(est.value < 1.0 - NSP_STRICT_SLACK))
    closed = all(
        flags[i] or not flags[i + 1] for i in range(len(flags) - 1)
    )
    return DownwardClosedProbe(
        t=int(t),
        p_values=tuple(ps),
        holds_flags=tuple(flags),
        downward_closed=closed,
    )


@dataclass(frozen=True)
class Diagnostic:
    """A named boolean check with supporting data; value None = not
    computable under the active size guards."""

    value: bool | None
    witness: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """The analytic threshold and everything that went into it.

    p_star = max(h_s_star, h_t_bound), clamped to 1 (clamped flag set) in
    the degenerate case. t_actual / l0_unique come from the brute-force
    l0 solve when it ran. diagnostics holds the four named checks keyed
    corollary3a_holds, corollary3b_holds, nsp_order_t_holds_at_p0,
    lemma1_u_positive; these are advisory and may each be None.
    """

    lam: float
    s_star: int
    t_bound: int
    h_s_star: float
    h_t_bound: float
    p_star: float
    clamped: bool
    t_actual: int | None
    l0_unique: bool | None
    diagnostics: dict[str, Diagnostic]

    def __post_init__(self):
        if not 0.0 < self.p_star <= 1.0:
            raise NumericalError(f"p* = {self.p_star} outside (0, 1]")
        raw = max(self.h_s_star, self.h_t_bound)
        if self.clamped:
            if not (raw > 1.0 and self.p_star == 1.0):
                raise NumericalError("clamp flag inconsistent with threshold")
        elif self.p_star != raw:
            raise NumericalError("p* must equal max(h(S*), h(T)) exactly")
        # h is strictly decreasing: larger argument, smaller value
        if (self.s_star - self.t_bound) * (self.h_t_bound - self.h_s_star) < 0:
            raise NumericalError("h values violate monotonicity in the order")


def p_star(
    problem: SensingProblem,
    budget: NscBudget | None = None,
    with_l0: bool = True,
) -> EquivalenceReport:
    """Compute the equivalence threshold p*(A, b) and its diagnostics.

    The threshold itself needs only the Gram conditioning ratio and the
    minimum-norm support size. With with_l0 (default), the brute-force
    sparsest solution is also computed so the report can state the true
    sparsity t_actual, whether it is unique, and the four advisory
    checks at order t_actual. Size guards never fail the threshold; they
    only turn diagnostics into None.
    """
    tol = problem.tol
    m = problem.m
    lam = lambda_ratio(problem, tol)
    ss = s_star(problem, tol)
    tb = t_bound(m)
    h_ss = h_of_x(ss, m, lam)
    h_tb = h_of_x(tb, m, lam)
    raw = max(h_ss, h_tb)
    # independent route: strict monotonicity puts the max at the smaller order
    alt = h_of_x(min(ss, tb), m, lam)
    if abs(raw - alt) > 1e-12 * max(1.0, abs(raw)):
        raise NumericalError(
            f"threshold cross-check failed: {raw!r} vs {alt!r}"
        )
    clamped = raw > 1.0
    diagnostics: dict[str, Diagnostic] = {}
    t_actual: int | None = None
    l0_unique: bool | None = None
    guard_note = None
    if with_l0:
        from .solvers import solve_l0  # deferred: solvers imports this module

        try:
            sol = solve_l0(problem)
            t_actual = len(sol.support)
            l0_unique = sol.unique
        except SizeGuardError as exc:
            guard_note = str(exc)
    if t_actual is not None:
        ksd = None
        try:
            ksd = kernel_sparsity_diagnostics(problem, t_actual)
        except SizeGuardError as exc:
            diagnostics["corollary3a_holds"] = Diagnostic(
                value=None, witness={"reason": str(exc)}
            )
        if ksd is not None:
            diagnostics["corollary3a_holds"] = Diagnostic(
                value=ksd.every_2t_columns_independent,
                witness={
                    "spark": ksd.spark,
                    "required": 2 * t_actual + 1,
                    "t": t_actual,
                },
            )
        diagnostics["corollary3b_holds"] = Diagnostic(
            value=bool(t_actual <= tb),
            witness={"t": t_actual, "t_bound": tb},
        )
        nsp0 = nsp_check(problem, 0.0, t=t_actual, budget=budget)
        diagnostics["nsp_order_t_holds_at_p0"] = Diagnostic(
            value=nsp0.holds,
            witness={
                "nsc": nsp0.value,
                "exact": nsp0.exact,
                "top_weight": nsp0.top_weight,
                "tail_weight": nsp0.tail_weight,
            },
        )
        s_frame = min(2 * t_actual, m)
        try:
            fb = restricted_frame_bounds(problem, s_frame)
            top = float(gram_eigenvalues(problem, tol)[0])
            diagnostics["lemma1_u_positive"] = Diagnostic(
                value=bool(fb.u_sq > tol.rank_rel_tol * top),
                witness={"s": s_frame, "u_sq": fb.u_sq, "w_sq": fb.w_sq},
            )
        except SizeGuardError as exc:
            diagnostics["lemma1_u_positive"] = Diagnostic(
                value=None, witness={"reason": str(exc)}
            )
    else:
        reason = guard_note or "l0 solve skipped"
        for key in (
            "corollary3a_holds",
            "corollary3b_holds",
            "nsp_order_t_holds_at_p0",
            "lemma1_u_positive",
        ):
            diagnostics[key] = Diagnostic(value=None, witness={"reason": reason})
    return EquivalenceReport(
        lam=lam,
        s_star=ss,
        t_bound=tb,
        h_s_star=h_ss,
        h_t_bound=h_tb,
        p_star=1.0 if clamped else raw,
        clamped=clamped,
        t_actual=t_actual,
        l0_unique=l0_unique,
        diagnostics=diagnostics,
    )
