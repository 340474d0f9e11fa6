"""Hot-kernel semantics and compiled/python backend parity."""
from __future__ import annotations

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from lpequiv import _kernels_py as kpy

try:
    from lpequiv import _kernels as kc
except ImportError:  # pragma: no cover - exercised on pure-python installs
    kc = None

BACKENDS = [kpy] + ([kc] if kc is not None else [])
IDS = ["python"] + (["compiled"] if kc is not None else [])


def _run_cli(args, env_extra=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run(
        [sys.executable, "-m", "lpequiv.cli", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def _c(a):
    return np.ascontiguousarray(np.asarray(a, dtype=float))


# ----------------------------------------------------------------- semantics


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_affine_power_sums_matches_direct_numpy(impl):
    rng = np.random.default_rng(99)
    for m, d in ((4, 1), (5, 2), (7, 3)):
        origin = _c(rng.normal(size=m))
        basis = _c(rng.normal(size=(m, d)))
        coeffs = _c(rng.normal(size=(20, d)))
        for p in (0.1, 0.5, 1.0):
            got = np.asarray(impl.affine_power_sums(origin, basis, coeffs, p, 0.0))
            want = np.abs(origin[None, :] + coeffs @ basis.T) ** p
            assert np.allclose(got, want.sum(axis=1), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_affine_power_sums_counting(impl):
    origin = _c([1.0, 0.0, -0.5])
    basis = _c([[1.0], [0.0], [0.0]])
    coeffs = _c([[0.0], [-1.0]])
    got = np.asarray(impl.affine_power_sums(origin, basis, coeffs, 0.0, 1e-8))
    # point 0 -> [1, 0, -0.5] has 2 entries above the threshold
    # point 1 -> [0, 0, -0.5] has 1
    assert got.tolist() == [2.0, 1.0]


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_affine_power_sums_snap_threshold(impl):
    # entries within the snap tolerance count as exact zeros for p > 0,
    # so rounding residue at a kink cannot masquerade as an O(1) term
    origin = _c([1.0, 1e-15, 0.25])
    basis = _c([[1.0], [1.0], [1.0]])
    coeffs = _c([[0.0]])
    raw = float(np.asarray(impl.affine_power_sums(origin, basis, coeffs, 0.01, 0.0))[0])
    snapped = float(
        np.asarray(impl.affine_power_sums(origin, basis, coeffs, 0.01, 1e-12))[0]
    )
    want = 1.0 + 0.25**0.01
    assert snapped == pytest.approx(want, rel=1e-14)
    assert raw > snapped + 0.5  # |1e-15|^0.01 is ~0.7, visibly polluting


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_ratio_max_hand_values(impl):
    rows = _c([[3.0, 1.0, 1.0, 1.0], [1.0, 1.0, 1.0, 1.0]])
    idx, val = impl.sparsity_ratio_max(rows, 1.0, 1, 1e-8)
    assert idx == 0
    assert val == pytest.approx(1.0, rel=1e-15)  # 3 / (1+1+1)


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_ratio_max_edge_rules(impl):
    rows = _c([[1.0, 2.0, 3.0]])
    idx, val = impl.sparsity_ratio_max(rows, 0.5, 0, 1e-8)
    assert (idx, val) == (0, 0.0)  # empty index set
    idx, val = impl.sparsity_ratio_max(_c([[0.0, 0.0, 0.0]]), 1.0, 1, 1e-8)
    assert val == 0.0  # all-zero row contributes nothing
    idx, val = impl.sparsity_ratio_max(_c([[1.0, 1.0, 0.0]]), 0.5, 2, 1e-8)
    assert val == np.inf  # the tail is exactly zero


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_ratio_max_first_row_wins_ties(impl):
    rows = _c([[1.0, 2.0, 4.0], [1.0, 2.0, 4.0], [0.1, 0.1, 0.1]])
    idx, _ = impl.sparsity_ratio_max(rows, 1.0, 1, 1e-8)
    assert idx == 0


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_ratio_max_counting_threshold_is_relative(impl):
    rows = _c([[1.0, 1e-9, 0.5]])
    _, val = impl.sparsity_ratio_max(rows, 0.0, 1, 1e-8)
    # 1e-9 is below 1e-8 * max|row| = 1e-8, so only two entries count
    assert val == pytest.approx(1.0, rel=1e-15)


# ------------------------------------------------------------------- parity


@pytest.mark.skipif(kc is None, reason="compiled extension not built")
def test_backend_parity_power_sums():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        m = int(rng.integers(3, 9))
        d = int(rng.integers(1, 4))
        origin = _c(rng.normal(size=m))
        basis = _c(rng.normal(size=(m, d)))
        coeffs = _c(rng.normal(size=(int(rng.integers(1, 40)), d)))
        for p in (0.0, 0.3, 0.7, 1.0):
            for ztol in (0.0, 1e-8):
                a = np.asarray(kpy.affine_power_sums(origin, basis, coeffs, p, ztol))
                b = np.asarray(kc.affine_power_sums(origin, basis, coeffs, p, ztol))
                assert np.allclose(a, b, rtol=1e-12, atol=1e-13)


@pytest.mark.skipif(kc is None, reason="compiled extension not built")
def test_backend_parity_ratio_values():
    rng = np.random.default_rng(4048)
    for _ in range(20):
        m = int(rng.integers(3, 9))
        rows = _c(rng.normal(size=(int(rng.integers(1, 60)), m)))
        for p in (0.0, 0.4, 1.0):
            for t in (1, 2, m - 1):
                _, va = kpy.sparsity_ratio_max(rows, p, t, 1e-8)
                _, vb = kc.sparsity_ratio_max(rows, p, t, 1e-8)
                if va == np.inf or vb == np.inf:
                    assert va == vb
                else:
                    # the subtraction total - top amplifies rounding by the
                    # ratio itself, so the parity tolerance scales with it
                    rel = 1e-12 * (1.0 + max(abs(va), abs(vb)))
                    assert va == pytest.approx(vb, rel=rel, abs=1e-13)


def test_readonly_inputs_accepted():
    # frozen problem arrays are read-only; both backends must accept them
    from lpequiv import backend

    origin = _c([1.0, 2.0, 3.0])
    basis = _c([[1.0], [0.5], [-1.0]])
    origin.setflags(write=False)
    basis.setflags(write=False)
    out = backend.affine_power_sums(origin, basis, np.array([0.5]), 0.5, 1e-8)
    assert out.shape == (1,)


# ------------------------------------------------------- selection via env


def test_env_selects_python_backend():
    proc = subprocess.run(
        [sys.executable, "-c", "import lpequiv; print(lpequiv.BACKEND)"],
        capture_output=True,
        text=True,
        env={**os.environ, "LPEQUIV_BACKEND": "python"},
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "python"


@pytest.mark.skipif(kc is None, reason="compiled extension not built")
def test_env_selects_compiled_backend():
    proc = subprocess.run(
        [sys.executable, "-c", "import lpequiv; print(lpequiv.BACKEND)"],
        capture_output=True,
        text=True,
        env={**os.environ, "LPEQUIV_BACKEND": "compiled"},
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "compiled"


def test_env_invalid_value_is_clean_cli_error():
    proc = _run_cli(["pstar", "--example", "1"], {"LPEQUIV_BACKEND": "bogus"})
    assert proc.returncode == 2
    assert "LPEQUIV_BACKEND" in proc.stderr
    assert "Traceback" not in proc.stderr


@pytest.mark.skipif(kc is None, reason="compiled extension not built")
def test_cli_results_numerically_equal_across_backends():
    outs = {}
    for name in ("python", "compiled"):
        proc = _run_cli(
            ["pstar", "--example", "2"], {"LPEQUIV_BACKEND": name}
        )
        assert proc.returncode == 0, proc.stderr
        outs[name] = json.loads(proc.stdout)
    a, b = outs["python"]["result"], outs["compiled"]["result"]
    for key in ("p_star", "lambda_ratio", "h_s_star", "h_t_bound"):
        assert a[key] == b[key]  # closed-form path: bit-identical
    assert a["diagnostics"].keys() == b["diagnostics"].keys()
    for key in a["diagnostics"]:
        assert a["diagnostics"][key]["value"] == b["diagnostics"][key]["value"]
