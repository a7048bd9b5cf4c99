"""End-to-end acceptance checks, one test per criterion, in order."""

import filecmp
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from zerosum import arithmetic as ar
from zerosum import euler
from zerosum import explicit_formula as ef
from zerosum import interpolation as ip
from zerosum import lfunctions as lf
from zerosum import relations as rel
from zerosum import testfn
from zerosum import zeros as zz
from zerosum.cli import EXIT_SKIPPED

# pinned tolerances
EF_TOL = 1e-6
EF_HEIGHT = 500.0
EF_SECONDS = 60.0
EF_LABELS = ("zeta", "4.3", "5.2", "7.3")
ZERO_MATCH = 1e-6
ALGEBRA_TOL = 1e-10
ALGEBRA_SAMPLES = 500
LOCAL_TOL = 1e-8
LOCAL_SPECS = 20
LOCAL_K = 200
INTERP_CHI_TOL = 1e-9
INTERP_TAU_TOL = 1e-9
INTERP_DELTA_TOL = 1e-8
SLOPE_MAX = 0.15
CONTROL_TOL = 1e-8
J_REL_TOL = 0.05
J_SECONDS = 120.0
TENSOR_TOL = 1e-10
IDENTITY_TOL = 1e-5
IDENTITY_HEIGHT = 300.0
LINNIK_BOUND = 5.0
X_GRID = [0.1, 0.05, 0.02, 0.01]
LINNIK_GRID = [0.1, 0.03, 0.01, 0.003, 0.001]


@pytest.fixture(scope="module")
def h():
    return testfn.bump(2.5, 1)


def test_01_explicit_formula_balance(h):
    for label in EF_LABELS:
        start = time.perf_counter()
        rep = ef.verify(lf.from_label(label), h, zz.ZeroStore(), EF_TOL, EF_HEIGHT)
        elapsed = time.perf_counter() - start
        print(f"{label}: disc={rep.discrepancy:.3g} budget={rep.budget:.3g} "
              f"zeros={rep.zeros_used} {elapsed:.1f}s")
        assert rep.discrepancy <= EF_TOL
        assert rep.budget >= rep.discrepancy
        assert rep.passed
        assert elapsed <= EF_SECONDS


def test_02_zero_finder_integrity(zeta_reference):
    found = np.array([r.gamma for r in zz.find_zeros_zeta(100)])
    expected = zz.count_by_argument_principle(lf.zeta_function(), 100)
    assert expected == 29
    assert found.size == expected
    assert np.max(np.abs(found - zeta_reference[:found.size])) <= ZERO_MATCH


def test_03_euler_algebra_oracles():
    rng = np.random.default_rng(7)
    worst = 0.0
    for i in range(ALGEBRA_SAMPLES):
        rank = int(rng.integers(1, 6))
        p = int(ar.primes_upto(50)[i % 15])
        roots = np.exp(2j * np.pi * rng.uniform(size=rank)) * rng.uniform(0.2, 1.0, rank)
        f = euler.LocalFactor.from_roots(p, roots)
        phi = euler.dirichlet_from_local(f, rank + 3)
        back = euler.local_from_dirichlet(p, phi[1:], rank)
        worst = max(worst, np.max(np.abs(np.array(back.c) - np.array(f.c))))
        pw = euler.power_sum_coeffs(f, 8)
        worst = max(worst, np.max(np.abs(pw - euler.newton_power_sums(f.roots, 8))))
        spec = euler.EulerProductSpec.from_dict(rank, {p: f})
        c2 = f.c[1] if rank >= 2 else 0.0
        lam2 = euler.lambda_phi(spec, p * p)
        worst = max(worst, abs(lam2 - (phi[1] ** 2 + 2 * c2) * math.log(p)))
    print(f"worst deviation {worst:.3g}")
    assert worst <= ALGEBRA_TOL


def test_04_local_explicit_formula():
    rng = np.random.default_rng(11)
    h = testfn.bump(0.9, 0.6)  # support contains u = 1, so the m = 0 term is exercised
    worst = 0.0
    for _ in range(LOCAL_SPECS):
        rank = int(rng.integers(1, 6))
        factors = {p: euler.LocalFactor.from_roots(p, np.exp(2j * np.pi * rng.uniform(size=rank)))
                   for p in (2, 3, 5)}
        spec = euler.EulerProductSpec.from_dict(rank, factors)
        for p in (2, 3, 5):
            lattice, _, _ = ef.local_zero_sum(spec, h, p, LOCAL_K)
            other = ef.local_W(spec, h, p) + ef.local_correction(spec, h, p)
            worst = max(worst, abs(lattice - other))
    print(f"worst two-route gap {worst:.3g}")
    assert worst <= LOCAL_TOL


def test_05_interpolation_contracts():
    for label in ("3.2", "4.3", "5.2", "7.3"):
        assert ip.phi_chi(ar.character_from_label(label)).integer_error(100) <= INTERP_CHI_TOL
    tau = ar.ramanujan_tau(2000)
    assert ip.fourier_interp(tau, 0.5).integer_error(30) <= INTERP_TAU_TOL
    phi = ip.phi_delta(4000)
    assert phi.integer_error(20) <= INTERP_DELTA_TOL


def test_06_character_relation_bounded(h, store):
    chi = ar.character_from_label("4.3")
    rep = rel.theorem1_compare(lf.dirichlet_function(chi), ip.phi_chi(chi), h, X_GRID, store)
    print(f"residuals {[f'{r:.3g}' for r in rep.residual]} slope {rep.fitted_order:.3f}")
    assert rep.fitted_order <= SLOPE_MAX
    control = rel.theorem1_compare(lf.zeta_function(), ip.constant_one(), h, X_GRID, store)
    assert max(control.residual) <= CONTROL_TOL


def test_07_j_term_limit(h):
    start = time.perf_counter()
    rep = rel.theorem5_check(h, [1e-2, 1e-3, 1e-4])
    elapsed = time.perf_counter() - start
    print(f"relative error {rep.extra['relative_error_min_x']:.3g} in {elapsed:.1f}s")
    assert rep.extra["relative_error_min_x"] <= J_REL_TOL
    assert elapsed <= J_SECONDS


def test_08_tensor_decompositions(h):
    spec = euler.delta_spec(int(h.b / 1e-3) + 2)
    for x in (1e-2, 1e-3):
        d = rel.tensor_decompositions(spec, spec, h, x)
        assert max(d["split_12"], d["split_21"], d["lambda_p2"]) <= TENSOR_TOL


def test_09_rank_one_identity(store):
    chi = ar.character_from_label("4.3")
    phi = ip.phi_chi(chi)
    rep = ef.theorem7_identity(lf.dirichlet_function(chi), phi, testfn.bump(3.5, 2.4, 2), store,
                               IDENTITY_HEIGHT, IDENTITY_TOL, phi.oscillation)
    print(f"disc {rep.discrepancies[0]:.3g} budget {rep.budget:.3g}")
    assert rep.budget <= IDENTITY_TOL
    assert rep.discrepancies[0] <= rep.budget
    assert rep.passed


def test_10_linnik_relation_bounded(store):
    rep = rel.linnik_classic(ar.character_from_label("4.3"), LINNIK_GRID, store)
    ratio = rep.extra["ratio_to_log2"]
    print(f"residual/log^2 x {[f'{r:.3g}' for r in ratio]}; "
          f"max/min {rep.extra['max_over_min_ratio']:.3g}")
    assert max(ratio) <= LINNIK_BOUND
    assert ratio[-1] <= ratio[0]  # not growing as x -> 0


def test_11_report_is_deterministic(tmp_path):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        proc = subprocess.run([sys.executable, "-m", "zerosum.cli", "report", "--out", str(d)],
                              capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
    assert filecmp.cmp(dirs[0] / "report.json", dirs[1] / "report.json", shallow=False)
    report = json.loads((dirs[0] / "report.json").read_text())
    assert report["relations"]["thm6"]["status"] == "SKIPPED"
    assert report["relations"]["thm8"]["status"] == "SKIPPED"
    proc = subprocess.run([sys.executable, "-m", "zerosum.cli", "relation", "thm6",
                           "--out", str(tmp_path / "c")], capture_output=True, text=True)
    assert proc.returncode == EXIT_SKIPPED
