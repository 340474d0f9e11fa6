"""End-to-end command-line tests run through subprocess.

Covers the report envelope (schema-validated for every subcommand), the
exit-code contract, byte-for-byte determinism of repeated runs, the CSV
curve format, and the --output / --tol-zero / --version plumbing.
"""
import json
import os
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

REPO = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SCHEMA = json.load(open(os.path.join(REPO, "docs", "report_schema.json")))


def run_cli(*args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "lpequiv.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def run_json(*args):
    proc = run_cli(*args)
    assert proc.returncode == 0, proc.stderr
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, SCHEMA)
    return doc


# ---------------------------------------------------------------- success paths


def test_pstar_envelope_example1():
    doc = run_json("pstar", "--example", "1")
    assert doc["command"] == "pstar"
    assert doc["problem_name"] == "example-1"
    res = doc["result"]
    assert res["p_star"] == pytest.approx(0.2292776385857917, rel=1e-12)
    assert res["lambda_ratio"] == pytest.approx(11.214982790567035, rel=1e-12)
    assert res["s_star"] == 4 and res["t_bound"] == 1
    assert res["l0_unique"] is True
    assert set(res["diagnostics"]) == {
        "corollary3a_holds",
        "corollary3b_holds",
        "lemma1_u_positive",
        "nsp_order_t_holds_at_p0",
    }


def test_solve_l0_envelope():
    doc = run_json("solve-l0", "--example", "2")
    res = doc["result"]
    assert res["support"] == [0, 1]
    assert np.allclose(res["x"], [1.0, 0.5, 0.0, 0.0, 0.0], atol=1e-9)
    assert res["unique"] is True


def test_solve_lp_envelope_routes_agree():
    doc = run_json("solve-lp", "--example", "1", "--p", "0.2")
    res = doc["result"]
    assert res["routes_agree"] is True
    assert np.allclose(res["exact"]["x"], [0.6, 0.7, 0.0, 0.0], atol=1e-8)
    assert res["lattice"]["info"]["kink_seeds"] >= 1


def test_nsc_envelope_exact_flag():
    doc = run_json("nsc", "--example", "1", "--p", "0.5", "--t", "1")
    res = doc["result"]
    assert res["exact"] is True
    assert 0.0 < res["value"] < 1.0
    assert len(res["witness_kernel_vector"]) == 4


def test_curve_json_envelope():
    doc = run_json("curve", "--example", "1", "--p", "0.1", "--grid=-1:1:3")
    pts = doc["result"]["points"]
    assert [pt["params"] for pt in pts] == [[-1.0], [0.0], [1.0]]
    assert pts[1]["objective"] == pytest.approx(1.9151613116254942, rel=1e-12)


def test_verify_envelope():
    doc = run_json("verify", "--example", "2")
    res = doc["result"]
    assert res["all_pass_within_guarantee"] is True
    assert res["equivalence"]["p_star"] == pytest.approx(
        0.12493083611035663, rel=1e-12
    )
    assert all(c["passed"] for c in res["checks"] if c["within_guarantee"])


def test_diagnose_envelope():
    doc = run_json("diagnose", "--example", "1")
    res = doc["result"]
    assert res["spectral"]["spark"] == 4
    assert res["kernel_sparsity"]["t"] == 2  # defaults to the l0 support size
    assert res["frame_bounds"]["s"] == 4
    assert res["frame_bounds"]["u_sq"] == 0.0


def test_version_flag():
    proc = run_cli("--version")
    assert proc.returncode == 0
    assert proc.stdout.strip()


# ---------------------------------------------------------------- exit code 2


def test_missing_p_rejected():
    proc = run_cli("solve-lp", "--example", "1")
    assert proc.returncode == 2
    assert "requires --p" in proc.stderr


def test_both_input_and_example_rejected(tmp_path):
    path = tmp_path / "prob.json"
    path.write_text('{"A": [[1,0,0,1],[0,1,0,1],[0,0,1,1]], "b": [1,1,1]}')
    proc = run_cli("pstar", "--input", str(path), "--example", "1")
    assert proc.returncode == 2


def test_invalid_example_rejected():
    proc = run_cli("pstar", "--example", "3")
    assert proc.returncode == 2


def test_malformed_json_rejected(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"A": [[1,2],')
    proc = run_cli("pstar", "--input", str(path))
    assert proc.returncode == 2
    assert "invalid JSON" in proc.stderr


def test_ragged_csv_rejected(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("1,2,3,4\n1,2,3\n5,6,7,8\n\n1,2,3\n")
    proc = run_cli("pstar", "--input", str(path))
    assert proc.returncode == 2
    assert "differing lengths" in proc.stderr


def test_square_matrix_rejected(tmp_path):
    path = tmp_path / "square.json"
    path.write_text('{"A": [[1,0,0],[0,1,0],[0,0,1]], "b": [1,1,1]}')
    proc = run_cli("solve-l0", "--input", str(path))
    assert proc.returncode == 2


def test_short_vectors_rejected(tmp_path):
    path = tmp_path / "short.json"
    path.write_text('{"A": [[1,0],[0,1]], "b": [1,1]}')
    proc = run_cli("solve-l0", "--input", str(path))
    assert proc.returncode == 2


def test_csv_format_limited_to_curve():
    proc = run_cli("pstar", "--example", "1", "--format", "csv")
    assert proc.returncode == 2
    assert "curve" in proc.stderr


def test_curve_requires_grid():
    proc = run_cli("curve", "--example", "1", "--p", "0.1")
    assert proc.returncode == 2
    assert "--grid" in proc.stderr


def test_bad_grid_syntax_rejected():
    proc = run_cli("curve", "--example", "1", "--p", "0.1", "--grid=-1:1")
    assert proc.returncode == 2


# ------------------------------------------------------------- exit codes 3-5


def test_zero_rhs_exit3(tmp_path):
    path = tmp_path / "zero_b.json"
    path.write_text('{"A": [[1,0,0,1],[0,1,0,1],[0,0,1,1]], "b": [0,0,0]}')
    proc = run_cli("pstar", "--input", str(path))
    assert proc.returncode == 3


def test_rank_deficient_exit3(tmp_path):
    path = tmp_path / "rankdef.json"
    path.write_text('{"A": [[1,2,3,4],[1,2,3,4],[0,1,0,1]], "b": [1,1,1]}')
    proc = run_cli("pstar", "--input", str(path))
    assert proc.returncode == 3


NON_UNIQUE = '{"A": [[1,0,1,0],[0,1,0,1]], "b": [1,1]}'


def test_non_unique_pstar_exit4(tmp_path):
    # four distinct 2-sparse solutions: the guarantee is void
    path = tmp_path / "tie.json"
    path.write_text(NON_UNIQUE)
    proc = run_cli("pstar", "--input", str(path))
    assert proc.returncode == 4
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, SCHEMA)
    codes = [note["code"] for note in doc["diagnostics"]]
    assert "l0-non-unique" in codes


def test_non_unique_verify_exit4(tmp_path):
    path = tmp_path / "tie.json"
    path.write_text(NON_UNIQUE)
    proc = run_cli("verify", "--input", str(path))
    assert proc.returncode == 4
    doc = json.loads(proc.stdout)
    jsonschema.validate(doc, SCHEMA)
    assert doc["result"]["l0"]["unique"] is False


def test_size_guard_exit5(tmp_path):
    rng = np.random.default_rng(11)
    a = rng.uniform(-1.0, 1.0, size=(10, 25))
    b = a @ rng.uniform(-1.0, 1.0, size=25)
    path = tmp_path / "wide.json"
    path.write_text(json.dumps({"A": a.tolist(), "b": b.tolist()}))
    proc = run_cli("solve-l0", "--input", str(path))
    assert proc.returncode == 5
    assert "guard" in proc.stderr.lower() or "support" in proc.stderr.lower()


# ------------------------------------------------------------- determinism


def test_pstar_byte_determinism():
    first = run_cli("pstar", "--example", "2")
    second = run_cli("pstar", "--example", "2")
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


def test_curve_csv_byte_determinism():
    args = ("curve", "--example", "2", "--p", "0.05", "--format", "csv",
            "--grid=-1:1:9,-1:1:9")
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout


# ------------------------------------------------------------- CSV contract


def test_curve_csv_golden_rows():
    proc = run_cli("curve", "--example", "1", "--p", "0.1", "--format", "csv",
                   "--grid=-2:2:5")
    assert proc.returncode == 0
    assert proc.stdout.endswith("\n")
    lines = proc.stdout.splitlines()
    assert lines[0] == "t,objective"
    assert lines[1:] == [
        "-2,4.25673186618",
        "-1,4.04548567788",
        "0,1.91516131163",
        "1,4.17685045439",
        "2,4.40783594163",
    ]


def test_curve_csv_two_axes_header_and_roundtrip():
    from lpequiv import builtin_problem, lp_curve

    grid = ((-1.0, 1.0, 3), (-1.0, 1.0, 3))
    proc = run_cli("curve", "--example", "2", "--p", "0.3", "--format", "csv",
                   "--grid=-1:1:3,-1:1:3")
    assert proc.returncode == 0
    lines = proc.stdout.splitlines()
    assert lines[0] == "s,t,objective"
    assert len(lines) == 10
    points = lp_curve(builtin_problem(2), 0.3, grid)
    for line, pt in zip(lines[1:], points):
        cells = [float(v) for v in line.split(",")]
        assert cells[:2] == pytest.approx(list(pt.params), abs=1e-12)
        # 12 significant digits round-trip against recomputation
        assert cells[2] == pytest.approx(pt.objective, rel=1e-9)


def test_curve_minimum_at_origin():
    proc = run_cli("curve", "--example", "1", "--p", "0.15", "--format", "csv",
                   "--grid=-2:2:4001")
    rows = [line.split(",") for line in proc.stdout.splitlines()[1:]]
    best = min(rows, key=lambda cells: float(cells[1]))
    assert float(best[0]) == pytest.approx(0.0, abs=1e-12)


# ------------------------------------------------------------- plumbing


def test_output_file_matches_stdout(tmp_path):
    out = tmp_path / "report.json"
    direct = run_cli("pstar", "--example", "1")
    routed = run_cli("pstar", "--example", "1", "--output", str(out))
    assert routed.returncode == 0
    assert routed.stdout == ""
    assert out.read_text() == direct.stdout


def test_tol_zero_overrides_support_threshold():
    doc = run_json("solve-l0", "--example", "1", "--tol-zero", "0.9")
    # with a coarse zero threshold the 0.6 entry no longer counts as support
    assert doc["result"]["support"] == [1]


def test_config_echo_reflects_arguments():
    doc = run_json("nsc", "--example", "2", "--p", "0.0", "--t", "2",
                   "--seed", "77")
    echo = doc["config_echo"]
    assert echo["example"] == 2
    assert echo["p"] == 0.0
    assert echo["t"] == 2
    assert echo["seed"] == 77
    assert echo["input"] is None
