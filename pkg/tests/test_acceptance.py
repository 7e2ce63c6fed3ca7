"""Acceptance suite: one test per criterion, each printing a PASS line with
its measured margin and runtime. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from ldp_sampler.continuous import (
    ContinuousClass,
    mixture_density,
    optimal_density,
    optimal_put_continuous,
    utility_loss,
)
from ldp_sampler.distributions import MixGenConfig, envelope_class, random_mixture
from ldp_sampler.divergence import builtin_generator, pmf_divergence
from ldp_sampler.finite import (
    FiniteParams,
    baseline_put_uniform,
    mollifier_sample,
    optimal_pmf,
    optimal_put,
)
from ldp_sampler.harness import ExperimentConfig, run_gaussmix
from ldp_sampler.numerics import (
    DEFAULT_QUAD,
    Interval,
    ToleranceBand,
    derived_rng,
    quadrature_nodes,
    random_simplex,
)
from ldp_sampler.continuous import Density1D

EPS_GRID = (0.1, 0.5, 1.0, 2.0, 5.0)
THREE = ("KL", "TV", "SqHellinger")


def report(num, detail):
    print(f"\nACCEPTANCE {num} PASS — {detail}")


def put_direct(k, eps, g):
    """Independent evaluation of the finite trade-off formula."""
    ee = math.exp(eps)
    hit = (ee / (ee + k - 1)) * float(g((ee + k - 1) / ee))
    miss = ((k - 1) / (ee + k - 1)) * g.f_at_zero.value
    return hit + miss


def test_criterion_1_exact_put_formulas():
    params = FiniteParams(2, math.log(3.0))
    tv, kl = builtin_generator("TV"), builtin_generator("KL")
    optimal_put(params, tv)  # warm up before timing
    t0 = time.perf_counter()
    got_tv = optimal_put(params, tv).as_float()
    got_kl = optimal_put(params, kl).as_float()
    elapsed = time.perf_counter() - t0
    assert abs(got_tv - 0.25) <= 1e-12
    assert abs(got_kl - math.log(4.0 / 3.0)) <= 1e-12
    assert abs(got_tv - put_direct(2, math.log(3.0), tv)) <= 1e-12
    assert abs(got_kl - put_direct(2, math.log(3.0), kl)) <= 1e-12
    assert elapsed < 1e-3
    report(1, f"TV={got_tv!r}, KL={got_kl!r}, runtime {elapsed * 1e6:.1f} us")


def test_criterion_2_finite_dominance():
    t0 = time.perf_counter()
    min_margin = math.inf
    for k, eps, name in itertools.product((5, 10, 20, 100), EPS_GRID, THREE):
        params = FiniteParams(k, eps)
        g = builtin_generator(name)
        margin = baseline_put_uniform(params, g).as_float() - optimal_put(params, g).as_float()
        min_margin = min(min_margin, margin)
        assert margin > 1e-12, f"no strict gap at k={k}, eps={eps}, f={name}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    report(2, f"60 grid points, min margin {min_margin:.3e}, runtime {elapsed:.3f} s")


def test_criterion_3_achievability_consistency():
    t0 = time.perf_counter()
    worst_gap = 0.0
    for k in range(2, 11):
        for eps in (0.1, 1.0, 5.0):
            params = FiniteParams(k, eps)
            for name in ("TV", "KL"):
                g = builtin_generator(name)
                best_val, best_idx = -math.inf, -1
                for i in range(k + 1000):
                    if i < k:
                        p = np.zeros(k)
                        p[i] = 1.0
                    else:
                        p = random_simplex(derived_rng(1000 + k, i), k)
                    q, _ = optimal_pmf(params, p)
                    val = pmf_divergence(g, p, q).as_float()
                    if val > best_val:
                        best_val, best_idx = val, i
                gap = abs(best_val - optimal_put(params, g).as_float())
                worst_gap = max(worst_gap, gap)
                assert gap <= 1e-6
                assert best_idx < k, f"max not at a point mass for k={k}, eps={eps}, f={name}"
    elapsed = time.perf_counter() - t0
    assert elapsed < 30.0
    report(3, f"k=2..10 x 3 eps x 2 f, worst |empirical-exact| {worst_gap:.2e}, runtime {elapsed:.1f} s")


def test_criterion_4_projection_optimality():
    t0 = time.perf_counter()
    gens = [builtin_generator(n) for n in ("KL", "TV", "SqHellinger", "ChiSq")]
    rng = derived_rng(4000, 0)
    checked = 0
    min_slack = math.inf
    for k, eps in (((2, 0.4)), ((3, 0.8)), ((4, 1.5)), ((5, 3.0))):
        params = FiniteParams(k, eps)
        for _ in range(50):
            p = random_simplex(rng, k)
            q_star, _ = optimal_pmf(params, p)
            d_star = {g.name: pmf_divergence(g, p, q_star).as_float() for g in gens}
            for _ in range(200):
                q = mollifier_sample(params, rng)
                for g in gens:
                    slack = pmf_divergence(g, p, q).as_float() - d_star[g.name]
                    min_slack = min(min_slack, slack)
                    assert slack >= -1e-9
                    checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    report(4, f"{checked} comparisons, min slack {min_slack:.2e}, zero violations, runtime {elapsed:.1f} s")


def test_criterion_5_continuous_exact_case():
    h = Density1D.uniform(Interval(0.0, 1.0))
    cls = ContinuousClass(0.0, 2.0, h, math.log(2.0))
    p = Density1D(Interval(0.0, 1.0), lambda x: np.where(x < 0.5, 2.0, 0.0))
    q = optimal_density(cls, p)
    assert abs(q.r - 1.5) <= 1e-8
    vals = q(np.array([0.25, 0.75]))
    assert abs(vals[0] - 4.0 / 3.0) <= 1e-8
    assert abs(vals[1] - 2.0 / 3.0) <= 1e-8
    tv_loss = utility_loss(cls, p, q, builtin_generator("TV")).as_float()
    kl_loss = utility_loss(cls, p, q, builtin_generator("KL")).as_float()
    assert abs(tv_loss - 1.0 / 3.0) <= 1e-8
    assert abs(kl_loss - math.log(1.5)) <= 1e-8
    assert abs(tv_loss - optimal_put_continuous(cls, builtin_generator("TV")).as_float()) <= 1e-8
    assert abs(kl_loss - optimal_put_continuous(cls, builtin_generator("KL")).as_float()) <= 1e-8
    report(5, f"r={q.r!r}, q=({vals[0]!r}, {vals[1]!r}), TV={tv_loss!r}, KL={kl_loss!r}")


def test_criterion_6_gaussmix_sandwich(tmp_path):
    t0 = time.perf_counter()
    env = envelope_class()
    worst_slack = -math.inf

    # paired (eps, seed) runs: per-instance sandwich against the class cap
    for eps, seed in zip(EPS_GRID, (1, 2, 3, 4, 5)):
        cfg = ExperimentConfig(mode="gaussmix", eps_grid=(eps,), N=100, K=10,
                               k0=2.0, seed=seed, timing=False,
                               out_path=str(tmp_path / f"gm_{seed}"))
        run_gaussmix(cfg)
        dump = json.loads((tmp_path / f"gm_{seed}_instances.json").read_text())
        cls = ContinuousClass(0.0, env.c2, env.h, eps)
        caps = {n: optimal_put_continuous(cls, builtin_generator(n)).as_float() for n in THREE}
        assert len(dump["losses"]) == 100 * len(THREE)
        for entry in dump["losses"]:
            slack = entry["proposed"] - entry["mixture_Qdagger"]
            worst_slack = max(worst_slack, slack)
            assert entry["proposed"] <= entry["mixture_Qdagger"] + 1e-6
            assert entry["mixture_Qdagger"] <= caps[entry["divergence"]] + 1e-6

    # fixed corpus (seed=1) across the eps grid: TV empirical max strictly decreasing
    cfg = ExperimentConfig(mode="gaussmix", eps_grid=EPS_GRID, N=100, K=10, k0=2.0,
                           seed=1, timing=False, out_path=str(tmp_path / "gm_grid"))
    rows = run_gaussmix(cfg)
    tv_max = [r.value.value for r in rows
              if r.divergence == "TV" and r.mechanism == "proposed"]
    assert len(tv_max) == len(EPS_GRID)
    assert all(a > b for a, b in zip(tv_max, tv_max[1:]))
    elapsed = time.perf_counter() - t0
    assert elapsed < 600.0
    report(6, f"1500 sandwich checks, worst proposed-minus-mixture {worst_slack:.2e}; "
              f"TV maxima {['%.4f' % v for v in tv_max]}; runtime {elapsed:.1f} s")


def test_criterion_7_privacy_invariants():
    t0 = time.perf_counter()
    pairs = 0
    worst_excess = -math.inf

    # finite mechanism at its default 1e-9 band
    band_f = ToleranceBand(1e-9, 1e-9)
    rng = derived_rng(7000, 0)
    for k, eps in ((2, 0.5), (5, 1.0), (10, 5.0)):
        params = FiniteParams(k, eps)
        eps_eff = band_f.effective_eps(eps)
        outs = []
        for _ in range(20):
            p = random_simplex(rng, k)
            q, r = optimal_pmf(params, p, band_f)
            raw_mass = float(np.maximum(p / r, params.lower).sum())
            assert band_f.lo <= raw_mass <= band_f.hi
            outs.append(q)
        for a, b in itertools.combinations(outs, 2):
            for x, y in ((a, b), (b, a)):
                excess = float(np.max(x / y)) - math.exp(eps_eff)
                worst_excess = max(worst_excess, excess)
                assert excess <= 1e-6
                pairs += 1

    # continuous mechanisms at a tight band
    env = envelope_class()
    band_c = ToleranceBand(1e-10, 1e-10)
    x_grid, _ = quadrature_nodes(env.h.support, DEFAULT_QUAD)
    cfg = MixGenConfig(K=10, k0=2.0, seed=70)
    for eps in (0.5, 2.0):
        cls = ContinuousClass(0.0, env.c2, env.h, eps)
        eps_eff = band_c.effective_eps(eps)
        star_vals, mix_vals = [], []
        for i in range(8):
            p = random_mixture(cfg, i).density()
            q_star = optimal_density(cls, p, band_c)
            assert band_c.lo <= q_star.raw_mass <= band_c.hi
            star_vals.append(np.asarray(q_star(x_grid)))
            mix_vals.append(np.asarray(mixture_density(cls, p)(x_grid)))
        for vals, budget in ((star_vals, eps_eff), (mix_vals, eps)):
            for a, b in itertools.combinations(vals, 2):
                for x, y in ((a, b), (b, a)):
                    excess = float(np.max(x / y)) - math.exp(budget)
                    worst_excess = max(worst_excess, excess)
                    assert excess <= 1e-6
                    pairs += 1
    assert pairs >= 500
    elapsed = time.perf_counter() - t0
    report(7, f"{pairs} ordered pairs, worst ratio excess {worst_excess:.2e}, runtime {elapsed:.1f} s")


def test_criterion_8_lipschitz_property():
    t0 = time.perf_counter()
    violations = 0

    rng = derived_rng(8000, 0)
    for _ in range(200):
        k = int(rng.integers(2, 15))
        eps = float(rng.uniform(0.2, 4.0))
        params = FiniteParams(k, eps)
        p1, p2 = random_simplex(rng, k), random_simplex(rng, k)
        q1, r1 = optimal_pmf(params, p1)
        q2, r2 = optimal_pmf(params, p2)
        lhs = 0.5 * float(np.abs(q1 - q2).sum())
        rhs = (2.0 / max(r1, r2)) * 0.5 * float(np.abs(p1 - p2).sum())
        if lhs > rhs + 1e-6:
            violations += 1

    env = envelope_class()
    x, w = quadrature_nodes(env.h.support, DEFAULT_QUAD)
    cfg = MixGenConfig(K=10, k0=2.0, seed=80)
    cont_pairs = 0
    for eps in (0.5, 2.0):
        cls = ContinuousClass(0.0, env.c2, env.h, eps)
        clipped = [optimal_density(cls, random_mixture(cfg, i).density())
                   for i in range(8)]
        originals = [random_mixture(cfg, i).density() for i in range(8)]
        for i, j in itertools.combinations(range(8), 2):
            if cont_pairs >= 50:
                break
            lhs = 0.5 * float(w @ np.abs(np.asarray(clipped[i](x)) - np.asarray(clipped[j](x))))
            tv_in = 0.5 * float(w @ np.abs(np.asarray(originals[i](x)) - np.asarray(originals[j](x))))
            rhs = (2.0 / max(clipped[i].r, clipped[j].r)) * tv_in
            cont_pairs += 1
            if lhs > rhs + 1e-6:
                violations += 1
    elapsed = time.perf_counter() - t0
    assert violations == 0
    assert cont_pairs >= 50
    report(8, f"200 finite + {cont_pairs} continuous pairs, zero violations, runtime {elapsed:.1f} s")


def test_criterion_9_limit_behaviors():
    # near-zero budget: outputs collapse to uniform
    rng = derived_rng(9000, 0)
    worst_dev = 0.0
    for k in (2, 5, 10, 50):
        params = FiniteParams(k, 1e-6)
        for _ in range(10):
            q, _ = optimal_pmf(params, random_simplex(rng, k))
            worst_dev = max(worst_dev, float(np.abs(q - 1.0 / k).max()))
            assert worst_dev < 1e-5

    # high budget, c1=0: continuous TV cap vanishes
    env = envelope_class()
    cls = ContinuousClass(0.0, env.c2, env.h, 20.0)
    tv_cap = optimal_put_continuous(cls, builtin_generator("TV")).as_float()
    assert tv_cap < 1e-6

    # monotone along both grid axes
    for name in THREE:
        g = builtin_generator(name)
        for k in (2, 10, 100):
            vals = [optimal_put(FiniteParams(k, e), g).as_float() for e in EPS_GRID]
            assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        for eps in EPS_GRID:
            vals = [optimal_put(FiniteParams(k, eps), g).as_float() for k in range(2, 101)]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    report(9, f"uniform-limit max deviation {worst_dev:.2e}, TV cap at eps=20 {tv_cap:.2e}, grids monotone")
