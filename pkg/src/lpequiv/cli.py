"""Command-line interface.

Subcommands: pstar, solve-l0, solve-lp, nsc, curve, verify, diagnose.
Every run emits a report envelope {tool_version, problem_name, command,
config_echo, result, diagnostics} as JSON (or, for curve, optionally CSV
rows). Output is byte-identical for identical configuration and seed: no
timestamps, sorted keys, and deterministic float rendering.

Exit codes: 0 success; 2 usage, format, or parameter errors; 3 violated
model assumptions (zero b, rank deficiency, numerical failure); 4 the
sparsest solution was detected to be non-unique; 5 a size guard refused
an enumeration.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, backend
from .equivalence import (
    EquivalenceReport,
    NscBudget,
    NscEstimate,
    kernel_sparsity_diagnostics,
    nsc_estimate,
    p_star,
)
from .errors import NonUniqueSolutionError, ProblemFormatError, ToolkitError
from .examples import builtin_problem
from .linalg import (
    DEFAULT_SEED,
    SensingProblem,
    Tolerances,
    kernel_basis,
)
from .solvers import (
    SparseSolution,
    VerificationReport,
    equivalence_verify,
    lp_curve,
    solve_l0,
    solve_lp_exact,
    solve_lp_grid,
)
from .spectral import restricted_frame_bounds, spectral_summary

_P_REQUIRED = {"solve-lp", "nsc", "curve"}


@dataclass(frozen=True)
class CommandConfig:
    """Validated invocation: exactly one input source; exponent present
    for the subcommands that need one; grid only where it means something."""

    command: str
    input: str | None
    example: int | None
    p: float | None
    t: int | None
    grid: tuple[tuple[float, float, int], ...] | None
    seed: int
    tol_zero: float | None
    output: str | None
    fmt: str

    def __post_init__(self):
        if (self.input is None) == (self.example is None):
            raise ProblemFormatError("exactly one of --input and --example")
        if self.command in _P_REQUIRED and self.p is None:
            raise ProblemFormatError(f"{self.command} requires --p")
        if self.command == "nsc" and self.t is None:
            raise ProblemFormatError("nsc requires --t")
        if self.command == "curve" and not self.grid:
            raise ProblemFormatError("curve requires --grid")
        if self.fmt == "csv" and self.command != "curve":
            raise ProblemFormatError("--format csv is only available for curve")


def _parse_grid(text: str) -> tuple[tuple[float, float, int], ...]:
    axes = []
    for part in text.split(","):
        pieces = part.split(":")
        if len(pieces) != 3:
            raise argparse.ArgumentTypeError(
                f"axis {part!r} is not min:max:count"
            )
        try:
            lo, hi, cnt = float(pieces[0]), float(pieces[1]), int(pieces[2])
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"axis {part!r}: {exc}") from None
        if cnt < 1 or hi < lo:
            raise argparse.ArgumentTypeError(
                f"axis {part!r} needs max >= min and count >= 1"
            )
        axes.append((lo, hi, cnt))
    return tuple(axes)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpequiv",
        description=(
            "Analytic threshold p* below which lp-minimization provably "
            "recovers the unique sparsest solution, with brute-force "
            "solvers and null-space diagnostics to verify it"
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "pstar": "compute the equivalence threshold p*(A, b) and diagnostics",
        "solve-l0": "sparsest solution by exhaustive support enumeration",
        "solve-lp": "lp minimizer (exact enumeration, lattice cross-check)",
        "nsc": "null-space constant at a given exponent and order",
        "curve": "objective samples over the solution-set chart",
        "verify": "full equivalence verification across an exponent sweep",
        "diagnose": "spectral and kernel-sparsity diagnostics",
    }
    for name, help_text in specs.items():
        sp = sub.add_parser(name, help=help_text)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", help="problem file (.json or .csv)")
        src.add_argument(
            "--example", type=int, choices=(1, 2), help="built-in example"
        )
        sp.add_argument("--p", type=float, help="exponent in (0, 1] (0 allowed for nsc)")
        sp.add_argument("--t", type=int, help="sparsity order")
        sp.add_argument(
            "--grid",
            type=_parse_grid,
            help="chart axes as min:max:count[,min:max:count]",
        )
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument(
            "--tol-zero",
            type=float,
            dest="tol_zero",
            help="override the relative zero threshold",
        )
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument(
            "--format",
            dest="fmt",
            choices=("json", "csv"),
            default="json",
            help="csv applies to curve only",
        )
    return parser


def parse_problem(path: str, tol: Tolerances | None = None) -> SensingProblem:
    """Load a problem from JSON ({'A': [[...]], 'b': [...], 'name'?}) or
    CSV (matrix rows, blank line, right-hand-side row)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc}") from None
    lower = path.lower()
    kwargs = {"tol": tol} if tol is not None else {}
    looks_json = (
        lower.endswith(".json")
        or (not lower.endswith(".csv") and text.lstrip().startswith("{"))
    )
    if looks_json:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProblemFormatError(f"invalid JSON in {path}: {exc}") from None
        if not isinstance(doc, dict) or "A" not in doc or "b" not in doc:
            raise ProblemFormatError(f"{path}: JSON problem needs keys 'A' and 'b'")
        name = doc.get("name", "problem")
        if not isinstance(name, str):
            raise ProblemFormatError(f"{path}: 'name' must be a string")
        return SensingProblem(A=doc["A"], b=doc["b"], name=name, **kwargs)
    lines = [ln.strip() for ln in text.splitlines()]
    try:
        split = lines.index("")
    except ValueError:
        raise ProblemFormatError(
            f"{path}: CSV needs a blank line between the matrix and b"
        ) from None
    matrix_rows = [ln for ln in lines[:split] if ln]
    vector_rows = [ln for ln in lines[split + 1 :] if ln]
    if not matrix_rows or len(vector_rows) != 1:
        raise ProblemFormatError(
            f"{path}: expected matrix rows, a blank line, then one b row"
        )
    try:
        A = [[float(v) for v in ln.split(",")] for ln in matrix_rows]
        b = [float(v) for v in vector_rows[0].split(",")]
    except ValueError as exc:
        raise ProblemFormatError(f"{path}: non-numeric entry: {exc}") from None
    widths = {len(row) for row in A}
    if len(widths) != 1:
        raise ProblemFormatError(f"{path}: matrix rows have differing lengths")
    return SensingProblem(A=A, b=b, name="problem", **kwargs)


def _load_problem(cfg: CommandConfig) -> SensingProblem:
    tol = None
    if cfg.tol_zero is not None:
        tol = Tolerances(zero_thresh_rel=cfg.tol_zero)
    if cfg.example is not None:
        problem = builtin_problem(cfg.example)
        if tol is not None:
            problem = SensingProblem(
                A=problem.A,
                b=problem.b,
                name=problem.name,
                tol=tol,
                parametrization=problem.parametrization,
            )
        return problem
    return parse_problem(cfg.input, tol)


def _clean(value):
    """Make a payload JSON-safe and deterministic: numpy scalars/arrays to
    native types, non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value:
            return "NaN"
        if value == float("inf"):
            return "Infinity"
        if value == float("-inf"):
            return "-Infinity"
        return value
    return value


def _solution_payload(sol: SparseSolution) -> dict:
    return {
        "x": list(sol.x),
        "support": list(sol.support),
        "p": sol.p,
        "objective": sol.objective,
        "unique": sol.unique,
        "competitors": [list(c) for c in sol.competitors],
        "info": sol.info,
    }


def _equivalence_payload(rep: EquivalenceReport) -> dict:
    return {
        "lambda_ratio": rep.lam,
        "s_star": rep.s_star,
        "t_bound": rep.t_bound,
        "h_s_star": rep.h_s_star,
        "h_t_bound": rep.h_t_bound,
        "p_star": rep.p_star,
        "clamped": rep.clamped,
        "t_actual": rep.t_actual,
        "l0_unique": rep.l0_unique,
        "diagnostics": {
            name: {"value": diag.value, "witness": diag.witness}
            for name, diag in rep.diagnostics.items()
        },
    }


def _nsc_payload(est: NscEstimate) -> dict:
    return {
        "p": est.p,
        "t": est.t,
        "value": est.value,
        "exact": est.exact,
        "witness_kernel_vector": list(est.witness_kernel_vector),
    }


def _verify_payload(rep: VerificationReport) -> dict:
    return {
        "l0": _solution_payload(rep.l0),
        "equivalence": _equivalence_payload(rep.equivalence),
        "checks": [
            {
                "p": c.p,
                "within_guarantee": c.within_guarantee,
                "matches_l0": c.matches_l0,
                "lp_unique": c.lp_unique,
                "grid_consistent": c.grid_consistent,
                "objective": c.objective,
                "passed": c.passed,
            }
            for c in rep.checks
        ],
        "all_pass_within_guarantee": rep.all_pass_within_guarantee,
    }


def _note(code: str, severity: str, message: str, witness=None) -> dict:
    note = {"code": code, "severity": severity, "message": message}
    if witness is not None:
        note["witness"] = witness
    return note


def _envelope(problem, cfg: CommandConfig, result, notes) -> dict:
    return {
        "tool_version": __version__,
        "problem_name": problem.name if problem is not None else None,
        "command": cfg.command,
        "config_echo": {
            "command": cfg.command,
            "input": cfg.input,
            "example": cfg.example,
            "p": cfg.p,
            "t": cfg.t,
            "grid": [list(a) for a in cfg.grid] if cfg.grid else None,
            "seed": cfg.seed,
            "tol_zero": cfg.tol_zero,
            "format": cfg.fmt,
        },
        "result": result,
        "diagnostics": notes,
    }


def render_json(doc) -> str:
    return json.dumps(_clean(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


def emit_csv(points, dim: int) -> str:
    """Curve rows: 't,objective' (1-d chart) or 's,t,objective' (2-d),
    row-major, 12 significant digits, newline-terminated."""
    header = "t,objective" if dim == 1 else "s,t,objective"
    lines = [header]
    for pt in points:
        cells = [f"{v:.12g}" for v in pt.params] + [f"{pt.objective:.12g}"]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cmd_pstar(problem, cfg, notes):
    report = p_star(problem, budget=NscBudget(seed=cfg.seed))
    if report.clamped:
        notes.append(
            _note("pstar-clamped", "warning", "analytic threshold clamped to 1")
        )
    exit_code = 0
    if report.l0_unique is False:
        notes.append(
            _note(
                "l0-non-unique",
                "error",
                "the sparsest solution is not unique; the guarantee is void",
            )
        )
        exit_code = 4
    return _equivalence_payload(report), exit_code


def _cmd_solve_l0(problem, cfg, notes):
    sol = solve_l0(problem)
    if sol.unique is False:
        notes.append(
            _note(
                "l0-non-unique",
                "warning",
                "multiple sparsest solutions; reporting the first, rest as competitors",
            )
        )
    return _solution_payload(sol), 0


def _cmd_solve_lp(problem, cfg, notes):
    exact = solve_lp_exact(problem, cfg.p)
    payload = {"exact": _solution_payload(exact), "lattice": None}
    if kernel_basis(problem).d <= 3:
        lattice = solve_lp_grid(problem, cfg.p)
        payload["lattice"] = _solution_payload(lattice)
        agree = float(np.abs(lattice.x - exact.x).max()) <= problem.tol.solver_eq_tol
        payload["routes_agree"] = agree
        if not agree:
            notes.append(
                _note(
                    "route-disagreement",
                    "warning",
                    "enumeration and lattice routes returned different minimizers",
                )
            )
    else:
        notes.append(
            _note(
                "lattice-skipped",
                "info",
                "kernel dimension above 3; lattice cross-check skipped",
            )
        )
    return payload, 0


def _cmd_nsc(problem, cfg, notes):
    est = nsc_estimate(problem, cfg.p, cfg.t, budget=NscBudget(seed=cfg.seed))
    if not est.exact:
        notes.append(
            _note(
                "nsc-sampled",
                "info",
                "kernel dimension above 1: value is a sampled lower estimate",
            )
        )
    return _nsc_payload(est), 0


def _cmd_curve(problem, cfg, notes):
    if problem.parametrization is None:
        notes.append(
            _note(
                "chart-fallback",
                "info",
                "no chart attached: using minimum-norm origin and orthonormal kernel",
            )
        )
    points = lp_curve(problem, cfg.p, cfg.grid)
    dim = len(cfg.grid)
    payload = {
        "axes": [list(a) for a in cfg.grid],
        "points": [
            {"params": list(pt.params), "objective": pt.objective} for pt in points
        ],
    }
    return payload, 0, points, dim


def _cmd_verify(problem, cfg, notes):
    try:
        report = equivalence_verify(problem, budget=NscBudget(seed=cfg.seed))
    except NonUniqueSolutionError as exc:
        sol = solve_l0(problem)
        notes.append(_note("l0-non-unique", "error", str(exc)))
        return {"l0": _solution_payload(sol)}, 4
    if not report.all_pass_within_guarantee:
        notes.append(
            _note(
                "guarantee-violated",
                "error",
                "an exponent within the guarantee failed verification",
            )
        )
    return _verify_payload(report), 0


def _cmd_diagnose(problem, cfg, notes):
    summary = spectral_summary(problem)
    t = cfg.t
    if t is None:
        try:
            t = len(solve_l0(problem).support)
        except ToolkitError:
            from .equivalence import t_bound as _tb

            t = _tb(problem.m)
            notes.append(
                _note(
                    "t-defaulted",
                    "info",
                    f"l0 solve unavailable; diagnosing at the ceiling t = {t}",
                )
            )
    ksd = kernel_sparsity_diagnostics(problem, t)
    if summary.spark is None:
        notes.append(
            _note("spark-guarded", "info", "matrix too wide for spark enumeration")
        )
    s_frame = min(2 * t, problem.m)
    fb = restricted_frame_bounds(problem, s_frame)
    payload = {
        "spectral": {
            "lambda_max": summary.lambda_max,
            "lambda_min_plus": summary.lambda_min_plus,
            "lambda_ratio": summary.lambda_ratio,
            "rank": summary.rank,
            "gram_eigenvalues": list(summary.gram_eigenvalues),
            "spark": summary.spark,
        },
        "kernel_sparsity": {
            "t": ksd.t,
            "spark": ksd.spark,
            "t_bound": ksd.t_bound,
            "every_2t_columns_independent": ksd.every_2t_columns_independent,
            "order_within_conditioning_ceiling": ksd.order_within_conditioning_ceiling,
            "min_kernel_l0": ksd.min_kernel_l0,
        },
        "frame_bounds": {
            "s": fb.s,
            "u_sq": fb.u_sq,
            "w_sq": fb.w_sq,
            "attaining_support_lower": list(fb.attaining_support_lower),
            "attaining_support_upper": list(fb.attaining_support_upper),
        },
    }
    return payload, 0


def run(cfg: CommandConfig) -> tuple[str, int]:
    """Execute one validated command; returns (rendered output, exit code)."""
    backend.ensure_ready()
    problem = _load_problem(cfg)
    notes: list[dict] = []
    points = None
    dim = 0
    if cfg.command == "pstar":
        result, code = _cmd_pstar(problem, cfg, notes)
    elif cfg.command == "solve-l0":
        result, code = _cmd_solve_l0(problem, cfg, notes)
    elif cfg.command == "solve-lp":
        result, code = _cmd_solve_lp(problem, cfg, notes)
    elif cfg.command == "nsc":
        result, code = _cmd_nsc(problem, cfg, notes)
    elif cfg.command == "curve":
        result, code, points, dim = _cmd_curve(problem, cfg, notes)
    elif cfg.command == "verify":
        result, code = _cmd_verify(problem, cfg, notes)
    elif cfg.command == "diagnose":
        result, code = _cmd_diagnose(problem, cfg, notes)
    else:  # pragma: no cover - argparse restricts the choices
        raise ProblemFormatError(f"unknown command {cfg.command}")
    if cfg.fmt == "csv":
        return emit_csv(points, dim), code
    return render_json(_envelope(problem, cfg, result, notes)), code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = CommandConfig(
            command=args.command,
            input=args.input,
            example=args.example,
            p=args.p,
            t=args.t,
            grid=args.grid,
            seed=args.seed,
            tol_zero=args.tol_zero,
            output=args.output,
            fmt=args.fmt,
        )
        text, code = run(cfg)
    except ToolkitError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.exit_code
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
