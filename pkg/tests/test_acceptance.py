"""Acceptance criteria 1-13, one test each.

Every test prints a single ``PASS``/``FAIL`` line (shown even without ``-s``)
before asserting, so ``pytest -v`` output doubles as the acceptance report.
"""

import math
import time

import numpy as np
import pytest

from enolab.divdiff import table_equals_primitive_oracle
from enolab.eno import eno_batch
from enolab.experiments import (
    MONOTONICITY_PERTURBATIONS,
    ExperimentSpec,
    convergence_table,
    run_sin4,
)
from enolab.fvm import (
    SchemeConfig,
    burgers,
    entropy_residual_batch,
    evolve_batch,
    riemann_shock_position,
    solve,
    tecno_flux,
)
from enolab.mesh import CONSTANT, GridFunction, build_uniform_mesh, random_interfaces, random_mesh, sample_averages
from enolab.stability import (
    UPPER_BOUNDS,
    box_plus_sine,
    check_eno_tv,
    check_shock_monotonicity,
    conjecture_chain_suite,
    fit_order,
    random_suite,
    worst_case,
)

SUITE_TRIALS = 100_000


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


@pytest.fixture(scope="module")
def suite():
    start = time.perf_counter()
    res = {(k, mesh): random_suite(k, SUITE_TRIALS, n=32, seed=2024, mesh=mesh)
           for k in range(1, 7) for mesh in ("uniform", "random")}
    return res, time.perf_counter() - start


def test_criterion_01_sharp_bounds(verdict):
    start = time.perf_counter()
    ratios = {k: worst_case(k, 1e-10)[1] for k in range(1, 7)}
    elapsed = time.perf_counter() - start
    errs = {k: abs(ratios[k] - float(UPPER_BOUNDS[k])) / float(UPPER_BOUNDS[k]) for k in ratios}
    ok = max(errs.values()) <= 1e-6 and elapsed < 1.0
    detail = ", ".join(f"k={k}: {ratios[k]:.9g}" for k in ratios)
    verdict(1, ok, f"{detail}; max rel err {max(errs.values()):.2e}; {elapsed:.2f}s")


def test_criterion_02_sign_property(suite, verdict):
    res, elapsed = suite
    bad = sum(res[key]["sign"].violation_count for key in res)
    trials = sum(res[key]["sign"].trials for key in res)
    verdict(2, bad == 0 and elapsed < 60.0, f"{trials} vectors, {bad} violations, {elapsed:.1f}s for the suite")


def test_criterion_03_upper_bound(suite, verdict):
    res, _ = suite
    worst = {k: res[(k, "uniform")]["upper_bound"].max_stat for k in range(1, 7)}
    ok = all(worst[k] <= float(UPPER_BOUNDS[k]) * (1 + 1e-10) for k in worst)
    ok = ok and all(res[(k, "uniform")]["upper_bound"].passed for k in worst)
    verdict(3, ok, ", ".join(f"k={k}: max ratio {worst[k]:.6g} <= {float(UPPER_BOUNDS[k]):.6g}" for k in worst))


def test_criterion_04_jump_formula(suite, verdict):
    res, _ = suite
    bad = sum(res[key]["jump_formula"].violation_count for key in res)
    err = max(res[key]["jump_formula"].max_stat for key in res)
    verdict(4, bad == 0, f"{bad} mismatches, max relative deviation {err:.2e}")


def test_criterion_05_divided_difference_oracle(verdict):
    rng = np.random.default_rng(5)
    bad = 0
    for _ in range(1000):
        u = GridFunction(random_mesh(0.0, 1.0, 32, rng), rng.uniform(-1, 1, 32))
        bad += not table_equals_primitive_oracle(u, max_level=8, rtol=1e-12)
    verdict(5, bad == 0, f"1000 random vectors, levels 0..8, {bad} mismatches")


def test_criterion_06_accuracy_order(verdict):
    start = time.perf_counter()
    ns = [32, 64, 128, 256, 512]
    orders = {}
    for k in range(1, 6):
        h, e = convergence_table("sinx", k, ns)
        orders[k] = fit_order(h, e)
    elapsed = time.perf_counter() - start
    ok = all(orders[k] >= k - 0.3 for k in orders) and elapsed < 10.0
    verdict(6, ok, ", ".join(f"k={k}: {orders[k]:.2f}" for k in orders) + f"; {elapsed:.2f}s")


def test_criterion_07_tvd_and_max_principle(verdict):
    rng = np.random.default_rng(7)
    n = 64
    x = build_uniform_mesh(0.0, 1.0, n).interfaces
    cfg = SchemeConfig(order=2, flux="godunov", integrator="forward-euler", cfl=0.5)
    _, tv, linf = evolve_batch(rng.uniform(-1, 1, (100, n)), x, cfg, burgers(), 200)
    tv_inc = float(np.max(np.diff(tv, axis=0)))
    linf_inc = float(np.max(np.diff(linf, axis=0)))
    ok = tv_inc <= 1e-12 and linf_inc <= 1e-12
    verdict(7, ok, f"100 runs x 200 steps: max TV increase {tv_inc:.2e}, max L-inf increase {linf_inc:.2e}")


def test_criterion_08_k2_chain(verdict):
    res = conjecture_chain_suite(10_000, n=64, seed=8)
    counts = {key: res[key].violation_count for key in ("a", "b", "c")}
    verdict(8, sum(counts.values()) == 0, f"10000 vectors, violations {counts}")


def test_criterion_09_tecno_entropy(verdict):
    law = burgers()
    rng = np.random.default_rng(9)
    n = 32
    worst = -math.inf
    for k in (2, 3, 4):
        cfg = SchemeConfig(order=k, flux="tecno")
        v = rng.uniform(-1, 1, (1000, n))
        worst = max(worst, float(entropy_residual_batch(v, build_uniform_mesh(0, 1, n).interfaces, cfg, law).max()))
        x = random_interfaces(0.0, 1.0, n, rng, size=1000)
        worst = max(worst, float(entropy_residual_batch(v, x, cfg, law).max()))

    # without diffusion the flux is entropy conservative: the residual vanishes
    v = rng.uniform(-1, 1, (1000, n))
    x = random_interfaces(0.0, 1.0, n, rng, size=1000)
    b = eno_batch(v, x, 3)
    F, c, Q, _ = tecno_flux(b, law, c_min=0.0, c_max=0.0)
    F[:, 0], Q[:, 0] = F[:, -1], Q[:, -1]
    w = np.diff(x, axis=-1)
    resid = 2 * v * (-(F[:, 1:] - F[:, :-1]) / w) + (Q[:, 1:] - Q[:, :-1]) / w
    cellwise = float(np.abs(resid).max())
    total = float(np.abs((resid * w).sum(axis=1)).max())
    ok = worst <= 1e-12 and cellwise <= 1e-12 and total <= 1e-12 and np.all(c == 0)
    verdict(9, ok, f"max residual {worst:.2e} (k=2,3,4); c=0: cellwise {cellwise:.2e}, global {total:.2e}")


def test_criterion_10_shock_monotonicity(verdict):
    ns = [8, 16, 32, 64, 128, 256, 512, 1024]
    found = {}
    ok = True
    for k in (3, 4):
        for name, w in MONOTONICITY_PERTURBATIONS.items():
            for size in (1.0, -1.0):
                rep = check_shock_monotonicity(w, 0.1234, size, k, ns)
                n0 = rep.details["n0"]
                found[(k, name, size)] = n0
                ok = ok and rep.passed and n0 is not None and n0 <= 256
    n0s = sorted({v for v in found.values() if v is not None})
    verdict(10, ok, f"{len(found)} cases monotone from n0 in {n0s} up to n=1024")


def test_criterion_11_eno_tv(verdict):
    ns = [32, 64, 128, 256, 512]
    orders = {}
    ok = True
    for k in range(1, 5):
        rep = check_eno_tv(box_plus_sine(), k, ns)
        orders[k] = rep.details["order"]
        ok = ok and rep.passed and orders[k] >= k - 0.5
    verdict(11, ok, ", ".join(f"k={k}: order {orders[k]:.2f}" for k in orders))


def test_criterion_12_sin4_growth(tmp_path, verdict):
    res = run_sin4(ExperimentSpec("sin4-instability"), str(tmp_path))
    s = res.summary
    ok = res.passed and s["growth_near_zero"] >= 2.0 and s["linf_max"] < 2.0
    ok = ok and {0, 3} <= set(s["offsets_near_zero"])
    verdict(12, ok, f"growth {s['growth_near_zero']:.4f}, max |v| {s['linf_max']:.4f}, "
                    f"offsets near 0/pi {s['offsets_near_zero']}")


def test_criterion_13_shock_transport(verdict):
    n = 200
    mesh = build_uniform_mesh(-1.0, 2.0, n)
    u0 = sample_averages(lambda x: (x < 0) * 1.0, mesh, boundary=CONSTANT, breakpoints=(0.0,))
    run = solve(u0, SchemeConfig(order=1, flux="godunov", t_end=1.0), burgers())
    pos = riemann_shock_position(run.final, 1.0, 0.0)
    err = abs(pos - 0.5)
    verdict(13, err <= 2 * mesh.dx_max, f"shock at {pos:.5f}, exact 0.5, error {err / mesh.dx_max:.3f} dx")
