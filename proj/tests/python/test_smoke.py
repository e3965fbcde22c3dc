"""Smoke tests for the python bindings and the CLI."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

mafd = pytest.importorskip("mafd")

CLI = os.environ.get("MAFD_CLI")


def test_grid_and_restrict():
    grid = mafd.unit_square_grid(0.25)
    assert grid.nx == 4 and grid.ny == 4
    assert grid.num_interior == 9
    assert grid.num_boundary == 16
    vals = mafd.restrict(lambda x, y: x + 2 * y, grid)
    assert vals.shape == (5, 5)
    assert vals[4, 4] == pytest.approx(3.0)


def test_stencil_bases():
    bases = mafd.stencil_bases(2)
    assert len(bases) == 4
    assert ((1, 0), (0, 1)) in bases
    for a1, a2 in bases:
        assert a1[0] * a2[0] + a1[1] * a2[1] == 0


def test_ma_apply_on_paraboloid():
    grid = mafd.unit_square_grid(1.0 / 16.0)
    v = mafd.restrict(lambda x, y: 0.5 * (x * x + y * y), grid)
    m = mafd.ma_apply(grid, v, epsilon=0.0)
    assert m[8, 8] == pytest.approx(1.0, abs=1e-12)
    assert mafd.is_discrete_convex(grid, v)


def test_poisson_round_trip():
    grid = mafd.unit_square_grid(1.0 / 32.0)
    z = mafd.restrict(lambda x, y: x * (1 - x) * y * (1 - y), grid)
    rhs = np.zeros_like(z)
    h2 = (1.0 / 32.0) ** 2
    rhs[1:-1, 1:-1] = (
        z[2:, 1:-1] + z[:-2, 1:-1] + z[1:-1, 2:] + z[1:-1, :-2] - 4 * z[1:-1, 1:-1]
    ) / h2
    back = mafd.poisson_solve(grid, rhs)
    assert np.max(np.abs(back - z)) < 1e-12
    assert mafd.inv_norm_estimate(grid) <= 0.125


def test_solve_quadratic():
    result = mafd.solve("quadratic", 1.0 / 32.0, tol=1e-10)
    assert result.converged
    assert mafd.max_error_vs_exact("quadratic", result) <= 1e-8
    sol = result.solution
    assert sol.shape == (33, 33)


def test_solve_two_dirac_matches_library_fixed_point():
    result = mafd.solve("two_dirac", 1.0 / 8.0)
    assert result.converged
    err = mafd.max_error_vs_exact("two_dirac", result)
    assert err == pytest.approx(0.2014, rel=5e-3)


def test_measures():
    grid = mafd.unit_square_grid(1.0 / 16.0)
    f = mafd.build_rhs("two_dirac", grid)
    assert f.sum() * (1.0 / 16.0) ** 2 == pytest.approx(math.pi, abs=1e-12)
    assert mafd.reference_measure("two_dirac", 0.05, 0.3, 0.45, 0.7) == pytest.approx(
        math.pi / 2
    )
    assert mafd.c0_bound(grid) == pytest.approx((1 - 1 / 16.0) ** 2, abs=1e-14)


def test_problem_catalog():
    names = mafd.problem_names()
    assert set(names) == {"two_dirac", "quadratic", "smooth_radial", "single_cone"}
    assert mafd.exact_solution("two_dirac", 0.5, 0.75) == pytest.approx(0.25)


@pytest.mark.skipif(CLI is None, reason="MAFD_CLI not set")
class TestCli:
    def run(self, *args, cwd):
        return subprocess.run(
            [CLI, *args], cwd=cwd, capture_output=True, text=True, timeout=300
        )

    def test_solve_writes_artifacts_and_is_deterministic(self, tmp_path):
        out1 = tmp_path / "a"
        out2 = tmp_path / "b"
        for out in (out1, out2):
            proc = self.run(
                "solve", "--problem", "quadratic", "--h", "1/32", "--method",
                "precond", "--mu", "50", "--tol", "1e-10", "--out", str(out),
                cwd=tmp_path,
            )
            assert proc.returncode == 0, proc.stderr
        for name in ("solution.csv", "residuals.csv"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
        summary = json.loads((out1 / "summary.json").read_text())
        assert summary["schema"] == 1
        assert summary["converged"] is True
        assert summary["max_error"] <= 1e-8

    def test_solve_with_file_initial_guess(self, tmp_path):
        first = tmp_path / "first"
        proc = self.run(
            "solve", "--problem", "quadratic", "--h", "1/8", "--tol", "1e-10",
            "--out", str(first), cwd=tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        second = tmp_path / "second"
        proc = self.run(
            "solve", "--problem", "quadratic", "--h", "1/8", "--tol", "1e-10",
            "--init", f"file:{first / 'solution.csv'}", "--out", str(second),
            cwd=tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        summary = json.loads((second / "summary.json").read_text())
        assert summary["converged"] is True
        assert summary["iterations"] <= 1

    def test_solve_rejects_bad_h(self, tmp_path):
        proc = self.run(
            "solve", "--problem", "quadratic", "--h", "0.3", "--out", str(tmp_path),
            cwd=tmp_path,
        )
        assert proc.returncode == 1
        assert "h must divide domain side" in proc.stderr

    def test_study_table(self, tmp_path):
        proc = self.run(
            "study", "--problem", "quadratic", "--h-list", "1/8,1/16", "--tol",
            "1e-10", "--out", str(tmp_path), cwd=tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        table = (tmp_path / "table.csv").read_text()
        assert table.splitlines()[0] == "h,iterations,converged,max_error,residual,wall_time_ms"
        assert len(table.splitlines()) == 3

    def test_verify_laplacian_norm(self, tmp_path):
        proc = self.run(
            "verify", "--suite", "laplacian-norm", "--h-list", "1/16,1/32,1/64",
            "--out", str(tmp_path), cwd=tmp_path,
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["pass"] is True

    def test_verify_ellipticity(self, tmp_path):
        proc = self.run(
            "verify", "--suite", "ellipticity", "--trials", "200", "--seed", "7",
            "--out", str(tmp_path), cwd=tmp_path,
        )
        assert proc.returncode == 0, proc.stderr

    def test_verify_crash_writes_partial_report(self, tmp_path):
        proc = self.run(
            "verify", "--suite", "measure-convergence", "--h-list", "0.3",
            "--out", str(tmp_path), cwd=tmp_path,
        )
        assert proc.returncode == 3
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["crashed"] is True
        assert report["pass"] is False
