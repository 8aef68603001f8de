"""Acceptance criteria, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports its measured values.
Seeds are fixed up front and never tuned.
"""
import time

import numpy as np
import pytest
from scipy.stats import norm

from maxstab.cli import main
from maxstab.data import ReplicateMatrix, Scale, SiteGrid
from maxstab.diagnostic import SubsetFamily, run_diagnostic, sample_subsets
from maxstab.margins import fit_gumbel_location
from maxstab.simulate import SimConfig, simulate, simulate_gauss_copula, simulate_logistic
from maxstab.simulate import simulate_smith
from maxstab.taildep import eta_for_subsets

DESK_GRID = SiteGrid.regular(5)
DESK_K = (2, 3, 4, 25)
N_REPEAT = 10


def record(report, name, passed, detail):
    report.append((name, bool(passed), detail))
    assert passed, detail


def mean_mu(matrix, k, count, seed):
    family = sample_subsets(matrix.m, k, count, seed)
    maxima = matrix.values[:, family.as_array()].max(axis=2)
    return np.mean([fit_gumbel_location(maxima[:, j], k).mu_clamped
                    for j in range(len(family))])


def desk_runs(model):
    """Ten seeded desk-scale repetitions: data seed 1000+r, test seed 2000+r."""
    runs = []
    for r in range(N_REPEAT):
        y = simulate(SimConfig(model, n_rep=500, seed=1000 + r), DESK_GRID)
        runs.append({k: run_diagnostic(y, k, count=100, n_boot=200, seed=2000 + r)
                     for k in DESK_K})
    return runs


# -- 1 ---------------------------------------------------------------------------

def test_ac1_logistic_location(acceptance_report):
    t0 = time.perf_counter()
    alpha = 0.7
    y = simulate_logistic(100, alpha, 1000, seed=1)
    got = {k: mean_mu(y, k, 100, seed=10 + k) for k in (2, 3, 4)}
    # brute-force check of the oracle itself: Pr(max <= t) = exp(-k^alpha e^-t)
    big = simulate_logistic(4, alpha, 50_000, seed=11).values
    mc_err = max(abs(np.mean(big[:, :k].max(axis=1) <= t) - np.exp(-k**alpha * np.exp(-t)))
                 for k in (2, 3, 4) for t in (-0.5, 0.5, 1.5))
    elapsed = time.perf_counter() - t0
    errs = {k: abs(got[k] - alpha * np.log(k)) for k in got}
    ok = max(errs.values()) <= 0.05 and mc_err < 0.01 and elapsed < 60
    detail = ", ".join(f"k={k} mean={got[k]:.4f} target={alpha * np.log(k):.4f}" for k in got)
    record(acceptance_report, "AC1 logistic mu oracle", ok,
           f"{detail}; oracle MC err={mc_err:.4f}; {elapsed:.1f}s")


# -- 2 ---------------------------------------------------------------------------

def test_ac2_smith_pair_location(acceptance_report):
    t0 = time.perf_counter()
    cases = {1.0: np.log(2 * norm.cdf(0.5)), 2.0: np.log(2 * norm.cdf(1.0)),
             0.0: 0.0, 50.0: np.log(2)}
    got = {}
    for i, h in enumerate(cases):
        y = simulate_smith(SiteGrid([[0.0, 0.0], [h, 0.0]], allow_coincident=True),
                           np.eye(2), 5000, seed=20 + i)
        got[h] = fit_gumbel_location(y.values.max(axis=1), 2).mu_clamped
    elapsed = time.perf_counter() - t0
    ok = all(abs(got[h] - cases[h]) <= 0.05 for h in cases) and elapsed < 120
    detail = ", ".join(f"h={h:g} mu={got[h]:.4f} target={cases[h]:.4f}" for h in cases)
    record(acceptance_report, "AC2 Smith pair mu oracle", ok, f"{detail}; {elapsed:.1f}s")


# -- 3 ---------------------------------------------------------------------------

def test_ac3_null_behaviour(acceptance_report):
    t0 = time.perf_counter()
    parts, ok = [], True
    for model in ("smith", "logistic"):
        runs = desk_runs(model)
        primary = {k: runs[0][k].coverage for k in DESK_K}
        fires = {k: sum(run[k].reject for run in runs) for k in DESK_K}
        fires_any = sum(any(run[k].reject for k in DESK_K) for run in runs)
        good_reps = sum(all(run[k].coverage >= 0.9 for k in DESK_K) for run in runs)
        ok &= min(primary.values()) >= 0.9 and max(fires.values()) <= 2
        parts.append(
            f"{model}: coverage(rep0)=" + "/".join(f"{primary[k]:.3f}" for k in DESK_K)
            + f", reps with all coverage>=0.9: {good_reps}/{N_REPEAT}"
            + ", rejections per k=" + "/".join(str(fires[k]) for k in DESK_K)
            + f", any k: {fires_any}/{N_REPEAT}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    record(acceptance_report, "AC3 null behaviour", ok, "; ".join(parts) + f"; {elapsed:.0f}s")


# -- 4 ---------------------------------------------------------------------------

def test_ac4_power(acceptance_report):
    t0 = time.perf_counter()
    runs = desk_runs("gauss")
    rejected = sum(run[25].reject for run in runs)
    increasing = sum(run[2].max_abs_diff < run[4].max_abs_diff < run[25].max_abs_diff
                     for run in runs)
    elapsed = time.perf_counter() - t0
    ok = rejected >= 9 and increasing >= 8 and elapsed < 600
    record(acceptance_report, "AC4 power", ok,
           f"k=25 rejected {rejected}/{N_REPEAT}, max_abs_diff increasing "
           f"{increasing}/{N_REPEAT}; {elapsed:.0f}s")


# -- 5 ---------------------------------------------------------------------------

def test_ac5_eta_discrimination(acceptance_report):
    t0 = time.perf_counter()
    n, pair = 10**5, SubsetFamily(2, 2, ((0, 1),))
    rho = 0.5
    smith = simulate_smith([[0.0, 0.0], [1.0, 0.0]], np.eye(2), n, seed=51)
    gauss = simulate_gauss_copula([[0.0, 0.0], [-np.log(rho), 0.0]], 1.0, n, seed=52,
                                  corr_param="range")
    indep = ReplicateMatrix(np.random.default_rng(53).gumbel(size=(n, 2)), Scale.GUMBEL)
    eta = {name: eta_for_subsets(y, pair, 0.05)[0].eta
           for name, y in (("smith", smith), ("gauss", gauss), ("indep", indep))}
    elapsed = time.perf_counter() - t0
    ok = (eta["smith"] >= 0.9 and 0.68 <= eta["gauss"] <= 0.82
          and 0.45 <= eta["indep"] <= 0.55 and elapsed < 180)
    record(acceptance_report, "AC5 eta discrimination", ok,
           ", ".join(f"{k}={v:.3f}" for k, v in eta.items()) + f"; {elapsed:.1f}s")


# -- 6 ---------------------------------------------------------------------------

def _grid_argmax(y, step=1e-5):
    def loglik(mu):
        r = y[None, :] - mu[:, None]
        return (-r - np.exp(-r)).sum(axis=1)
    coarse = np.linspace(y.min() - 1, y.max() + 1, 4001)
    c = coarse[np.argmax(loglik(coarse))]
    width = coarse[1] - coarse[0]
    fine = np.arange(c - width, c + width, step)
    return fine[np.argmax(loglik(fine))]


def test_ac6_estimator_correctness(acceptance_report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(60)
    worst, clamp_ok = 0.0, True
    for _ in range(100):
        y = rng.gumbel(loc=rng.uniform(-3, 3), size=rng.integers(1, 200))
        k = int(rng.integers(1, 30))
        est = fit_gumbel_location(y, k)
        worst = max(worst, abs(est.mu_hat - _grid_argmax(y)))
        clamp_ok &= 0.0 <= est.mu_clamped <= np.log(k)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-4 and clamp_ok and elapsed < 10
    record(acceptance_report, "AC6 estimator correctness", ok,
           f"max |closed form - grid| = {worst:.2e}, clamping ok={clamp_ok}; {elapsed:.1f}s")


# -- 7 ---------------------------------------------------------------------------

@pytest.mark.parametrize("model", ["smith", "logistic", "gauss"])
def test_ac7_reproducibility(acceptance_report, tmp_path, monkeypatch, model):
    # identical relative paths so the echoed config lines match too
    for threads in ("1", "8"):
        run_dir = tmp_path / f"t{threads}"
        run_dir.mkdir()
        monkeypatch.chdir(run_dir)
        assert main(["simulate", "--model", model, "--n-rep", "500", "--grid", "5x5",
                     "--seed", "1000", "--threads", threads, "--out", "data.csv"]) == 0
        assert main(["diagnose", "--data", "data.csv", "--k", "2,3,4,m", "--subsets", "100",
                     "--boot", "200", "--seed", "2000", "--threads", threads,
                     "--out", "diag"]) == 0
        assert main(["eta", "--data", "data.csv", "--k", "2", "--subsets", "20",
                     "--seed", "3000", "--threads", threads, "--out", "eta"]) == 0
    files = sorted(p.relative_to(tmp_path / "t1") for p in (tmp_path / "t1").rglob("*")
                   if p.suffix in (".csv", ".json"))
    differ = [str(f) for f in files
              if (tmp_path / "t1" / f).read_bytes() != (tmp_path / "t8" / f).read_bytes()]
    record(acceptance_report, f"AC7 reproducibility ({model})", not differ and len(files) > 5,
           f"{len(files)} files compared, differing: {differ or 'none'}")
