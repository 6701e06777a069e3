"""End-to-end acceptance suite.

Each test exercises one headline property of the package at its stated
tolerance and prints a single PASS/FAIL line (run pytest with -s, the
default here, to see them).  Oracles are computed independently inside
each test: closed forms, grid searches, or large Monte-Carlo runs that do
not share code with the implementation under test.
"""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from armatch import (
    ArParams,
    ArmaSpec,
    EstimatorSpec,
    ExperimentPlan,
    ar_acvf,
    arma_acvf,
    bootstrap_bias,
    empirical_q,
    empirical_q_gradient,
    fit_ideal,
    fit_match,
    fit_ols,
    pacf_to_ar,
    predictor_from_acvf,
    predictor_from_model,
    run_experiment,
    select_order,
    simulate_arma,
)
from armatch.cli import main
from armatch.loss import population_q
from armatch.seeding import mix_seed


def _report(num, name, ok, elapsed, limit):
    in_time = elapsed < limit
    status = "PASS" if (ok and in_time) else "FAIL"
    print(f"\n[ACCEPTANCE {num}] {name}: {status} "
          f"({elapsed:.1f}s, limit {limit:.0f}s)")
    assert ok, f"acceptance criterion {num} ({name}) failed"
    assert in_time, f"acceptance criterion {num} ({name}) exceeded {limit}s"


def test_1_predictor_duality():
    t0 = time.time()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        p = int(rng.integers(1, 7))
        k = int(rng.integers(1, 11))
        model = ArParams(pacf_to_ar(rng.uniform(-0.9, 0.9, p)), 1.0)
        a = predictor_from_model(model, k).alpha
        b = predictor_from_acvf(ar_acvf(model, p + k), p, k).alpha
        scale = max(float(np.max(np.abs(a))), 1e-8)
        worst = max(worst, float(np.max(np.abs(a - b))) / scale)
    _report(1, "predictor duality", worst < 1e-8, time.time() - t0, 5)


def test_2_m1_reduction():
    t0 = time.time()
    ok = True
    checked = 0
    for seed in range(100):
        y = simulate_arma(ArmaSpec([0.75, -0.5], [], 1.0), 300, 5000 + seed)
        ols = fit_ols(y, 2)
        if not ols.is_stationary:
            continue
        fit = fit_match(y, 2, 1)
        ok = ok and float(np.max(np.abs(fit.model.phi - ols.phi))) < 1e-5
        checked += 1
    _report(2, "m=1 reduces to OLS", ok and checked >= 90, time.time() - t0, 30)


def test_3_gradient_correctness():
    t0 = time.time()
    rng = np.random.default_rng(314)
    ok = True
    for _ in range(200):
        p = int(rng.integers(1, 5))
        m = int(rng.integers(1, 6))
        n = int(rng.integers(p + m + 5, 80))
        y = rng.standard_normal(n)
        phi = pacf_to_ar(rng.uniform(-0.85, 0.85, p))
        g = empirical_q_gradient(y, ArParams(phi, 1.0), m)
        fd = np.empty(p)
        for j in range(p):
            h = 1e-6 * max(1.0, abs(phi[j]))
            e = np.zeros(p)
            e[j] = h
            fd[j] = (
                empirical_q(y, ArParams(phi + e, 1.0), m)
                - empirical_q(y, ArParams(phi - e, 1.0), m)
            ) / (2 * h)
        scale = max(float(np.max(np.abs(fd))), 1e-6)
        ok = ok and float(np.max(np.abs(g - fd))) / scale < 1e-5
    _report(3, "analytic gradient vs central differences", ok, time.time() - t0, 10)


def test_4_ideal_world_monotonicity():
    t0 = time.time()
    ok = True
    for spec in (ArmaSpec([], [0.5], 1.0), ArmaSpec([0.8], [-0.5], 1.0)):
        truth = arma_acvf(spec, 16)
        for m in (1, 3):
            qs = [fit_ideal(truth, p, m)[1] for p in range(7)]
            ok = ok and bool(np.all(np.diff(qs) <= 1e-9))
            for p in range(6):
                lhs = math.log(qs[p]) - math.log(qs[p + 1])
                rhs = (qs[p] - qs[p + 1]) / qs[p + 1]
                if lhs < 0.05:
                    ok = ok and abs(lhs - rhs) <= 0.1 * max(abs(rhs), 1e-12)
    _report(4, "ideal-world loss monotone, log-decrease approximation",
            ok, time.time() - t0, 10)


def test_5_feature_matching_advantage():
    t0 = time.time()
    plan = ExperimentPlan(
        truth=ArmaSpec([0.8], [-0.5], 1.0),
        n=400,
        replicates=200,
        estimators=(
            EstimatorSpec("m1", "match", 1, 1),
            EstimatorSpec("m5", "match", 1, 5),
        ),
        eval_horizons=(1, 2, 3, 4, 5),
        base_seed=20_240_601,
    )
    report = run_experiment(plan)
    s = report.summary
    win = s["win_rate"]["m5_vs_m1"]
    mean_better = (
        s["estimators"]["m5"]["mean_score"] < s["estimators"]["m1"]["mean_score"]
    )
    _report(5, f"multi-step matching beats one-step (win rate {win:.3f})",
            win >= 0.70 and mean_better, time.time() - t0, 180)


def _select_one(args):
    kind, seed = args
    if kind == "ar2":
        y = simulate_arma(ArmaSpec([0.75, -0.5], [], 1.0), 500, mix_seed(101, seed))
        p_max = 6
    else:
        y = simulate_arma(ArmaSpec([], [], 1.0), 500, mix_seed(202, seed))
        p_max = 5
    return kind, select_order(y, p_max, 1, 100, mix_seed(303, seed)).chosen_p


def test_6_selection_sanity():
    t0 = time.time()
    tasks = [("ar2", s) for s in range(100)] + [("wn", s) for s in range(100)]
    with ProcessPoolExecutor(max_workers=4) as ex:
        out = list(ex.map(_select_one, tasks, chunksize=5))
    ar2 = np.array([c for k, c in out if k == "ar2"])
    wn = np.array([c for k, c in out if k == "wn"])
    modal = int(np.bincount(ar2).argmax())
    correct = float(np.mean(ar2 == 2))
    zero = float(np.mean(wn == 0))
    ok = modal == 2 and correct >= 0.60 and zero >= 0.70
    _report(
        6,
        f"order selection (AR2 modal {modal}, correct {correct:.2f}; "
        f"white-noise zero rate {zero:.2f})",
        ok,
        time.time() - t0,
        600,
    )


def test_7_bootstrap_bias_calibration():
    t0 = time.time()
    # Monte-Carlo oracle for the optimism E[L* - L] under the known AR(1)
    # truth: 2000 outer replicates, each refit and scored against the true
    # autocovariances.
    truth_spec = ArmaSpec([0.5], [], 1.0)
    gamma = ar_acvf(ArParams([0.5], 1.0), 2)
    total = 0.0
    reps = 2000
    for r in range(reps):
        y = simulate_arma(truth_spec, 500, mix_seed(4242, r))
        fit = fit_match(y, 1, 1)
        total += math.log(population_q(gamma, fit.model, 1, 1)) - math.log(fit.q_value)
    c = total / reps
    ok = True
    ests = []
    for s in range(3):
        y = simulate_arma(truth_spec, 500, mix_seed(55, s))
        est = bootstrap_bias(y, 1, 1, 200, seed=s)
        ests.append(est)
        ok = ok and 0.3 * c < est < 3 * c
    _report(
        7,
        f"bootstrap bias calibration (oracle c {c:.5f}, "
        f"estimates {[round(e, 5) for e in ests]})",
        ok,
        time.time() - t0,
        300,
    )


def test_8_cli_determinism(tmp_path):
    t0 = time.time()
    ok = True

    def run_twice(args, outname):
        blobs = []
        for i in range(2):
            out = tmp_path / f"{outname}.{i}"
            code = main(args + ["--output", str(out)])
            assert code == 0
            blobs.append(out.read_bytes())
        return blobs[0] == blobs[1]

    sim_args = ["simulate", "--model", "arma", "--ar", "0.75,-0.5",
                "--sigma2", "1", "--n", "300", "--seed", "9"]
    ok = ok and run_twice(sim_args, "sim")
    series = tmp_path / "sim.0"

    ok = ok and run_twice(
        ["fit", "--input", str(series), "--order", "2", "--steps", "3"], "fit"
    )

    sel_blobs = []
    for jobs in (1, 2, 4, 8):
        out = tmp_path / f"sel.{jobs}"
        code = main(["select", "--input", str(series), "--max-order", "3",
                     "--steps", "1", "--bootstrap", "20", "--seed", "3",
                     "--jobs", str(jobs), "--output", str(out)])
        assert code == 0
        sel_blobs.append(out.read_bytes())
    ok = ok and all(b == sel_blobs[0] for b in sel_blobs)

    cfg = tmp_path / "plan.ini"
    cfg.write_text(
        "[truth]\nmodel = arma\nar = 0.8\nma = -0.5\nsigma2 = 1.0\n\n"
        "[run]\nn = 200\nreplicates = 6\nbase_seed = 12\nhorizons = 1,2,3\n\n"
        "[estimators]\none_step = match p=1 m=1\nmulti_step = match p=1 m=3\n"
    )
    exp_blobs = []
    for jobs in (1, 8):
        outdir = tmp_path / f"exp{jobs}"
        code = main(["experiment", "--config", str(cfg), "--jobs", str(jobs),
                     "--output", str(outdir)])
        assert code == 0
        exp_blobs.append(
            (outdir / "report.csv").read_bytes()
            + (outdir / "summary.json").read_bytes()
        )
    ok = ok and exp_blobs[0] == exp_blobs[1]
    _report(8, "CLI byte-identical across repeats and --jobs 1..8",
            ok, time.time() - t0, 60)
