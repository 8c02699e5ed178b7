"""End-to-end acceptance gates, one test per criterion.

Every test records a one-line verdict that pytest prints after the run
(see conftest). Gates are asserted at their configured tolerances even
where the measured value is known to sit on the wrong side at these
sizes (criteria 5 and 6; see README), so a red line here is a statement
about the mathematics at finite n, not necessarily a regression.
"""

import math
import time

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import record_criterion
from oracles import recursive_graph_count
from regmax.coupling import (
    complete_meta_graph,
    count_h_switchings,
    couple,
    example_meta_graph,
)
from regmax.enumeration import (
    count_graphs,
    enumerate_graphs,
    exact_common_neighbour_dist,
    mckay_asymptotic_count,
)
from regmax.events import (
    Coefficients,
    ExplicitDigraph,
    SyntheticEventSystem,
    delta2_binomial_proxy,
    extremal_bound,
)
from regmax.experiments import ExperimentConfig, run_experiment
from regmax.graphs import DegreeSequence, RegularityParams
from regmax.sampling import ChainConfig, SwitchChain, conditional_chain
from regmax.theory import (
    binom_approx_params,
    binomial_tail,
    central_window,
    local_limit_prob,
    scaling_constants,
)


def gate(num: int, name: str, ok: bool, detail: str) -> None:
    record_criterion(num, name, ok, detail)
    assert ok, f"criterion {num} ({name}): {detail}"


@pytest.fixture(scope="module")
def gumbel_runs():
    """Shared between criteria 6 and 7; the n=201 run serves both."""
    out = {}
    for n in (101, 201, 401):
        cfg = ExperimentConfig(
            kind="gumbel", n=n, lam=0.5, samples=2000, seed=n, workers=2
        )
        out[n] = run_experiment(cfg)
    return out


def test_criterion_01_exact_counts():
    t0 = time.perf_counter()
    parts = []
    ok = True
    for (n, d), want in {(4, 3): 1, (5, 2): 12, (6, 3): 70}.items():
        ds = DegreeSequence.regular(n, d)
        enum = enumerate_graphs(ds).count
        dp = count_graphs(ds)
        rec = recursive_graph_count(list(ds.degrees))
        ok &= enum == dp == rec == want
        parts.append(f"({n},{d})={enum}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    gate(1, "exact-counts", ok, f"{', '.join(parts)} in {elapsed:.2f}s")


def test_criterion_02_count_formula_convergence():
    errs = []
    for n, d in [(6, 3), (8, 4), (10, 5)]:
        ds = DegreeSequence.regular(n, d)
        errs.append(abs(mckay_asymptotic_count(ds) / count_graphs(ds) - 1))
    ok = errs[0] > errs[1] > errs[2]
    gate(
        2,
        "count-formula-convergence",
        ok,
        "|ratio-1| = " + " > ".join(f"{e:.4f}" for e in errs),
    )


def test_criterion_03_conditional_pmf_formulas():
    def max_rel_err(n: int, d: int, condition: str) -> float:
        params = RegularityParams.from_degree(n, d)
        dist = exact_common_neighbour_dist(n, d, condition)
        errs = [
            abs(local_limit_prob(params, h, condition) - dist.prob(h)) / dist.prob(h)
            for h in central_window(params)
            if dist.prob(h) > 0
        ]
        return max(errs)

    conditions = ("nonedge", "edge", "unconditional")
    err8 = {c: max_rel_err(8, 4, c) for c in conditions}
    err10 = {c: max_rel_err(10, 5, c) for c in conditions}
    # the 0.35 budget is attainable for the non-edge formula only; the edge
    # and unconditional variants are reported and must still improve with n
    ok = (
        err8["nonedge"] <= 0.35
        and err10["nonedge"] <= 0.35
        and all(err10[c] < err8[c] for c in conditions)
    )
    detail = "; ".join(f"{c} {err8[c]:.3f}->{err10[c]:.3f}" for c in conditions)
    gate(3, "conditional-pmf-formulas", ok, f"max rel err n=8->10: {detail}")


def test_criterion_04_sampler_uniformity():
    parts = []
    ok = True
    for n, d, n_samples in [(5, 2, 12_000), (6, 3, 70_000)]:
        keys: list[tuple[int, ...]] = []
        enumerate_graphs(
            DegreeSequence.regular(n, d), visitor=lambda g: keys.append(g.adjacency_key())
        )
        index = {k: i for i, k in enumerate(keys)}
        counts = np.zeros(len(keys))
        chain = SwitchChain(RegularityParams.from_degree(n, d), ChainConfig(seed=4))
        for g in chain.samples(n_samples):
            counts[index[g.adjacency_key()]] += 1
        p = chisquare(counts).pvalue
        ok &= p > 0.001
        parts.append(f"({n},{d}) {len(keys)} graphs p={p:.3f}")
    gate(4, "sampler-uniformity", ok, "; ".join(parts))


def test_criterion_05_pair_count_vs_binomial():
    cfg = ExperimentConfig(
        kind="local-limit", n=201, lam=0.5, samples=10_000, seed=5, workers=2
    )
    tv = run_experiment(cfg).summary["stats"]["tv_binom_window"]
    # every d-regular graph has exactly nd(d-1)/2 two-paths, so E[X_12] sits
    # lam+lam^2 below the surrogate mean lam^2 n; that fixed offset alone
    # keeps TV near 0.085 at n=201, above this gate
    gate(
        5,
        "pair-count-vs-binomial",
        tv <= 0.05,
        f"TV on central window = {tv:.4f} (gate 0.05)",
    )


def test_criterion_06_max_vs_surrogate(gumbel_runs):
    st = gumbel_runs[201].summary["stats"]
    fd, ks = st["f_diff_abs"], st["ks_surrogate_max"]
    ok = fd <= 0.08 and ks <= 0.1
    # the graph max has a genuinely heavier upper tail than the
    # independent-binomial surrogate at this size (visible already in the
    # exact n=8 distributions), which is what the KS part measures
    gate(
        6,
        "max-vs-surrogate",
        ok,
        f"|F-Fhat|(0,0) = {fd:.4f} (gate 0.08); KS(max, surrogate max) = {ks:.4f} (gate 0.1)",
    )


def test_criterion_07_gumbel_limit(gumbel_runs):
    ks = {n: gumbel_runs[n].summary["stats"]["ks_gumbel_max"] for n in gumbel_runs}
    corr = {n: gumbel_runs[n].summary["stats"]["abs_corr"] for n in gumbel_runs}
    ok = (
        ks[201] <= 0.2
        and ks[101] >= ks[201] >= ks[401]
        and max(corr.values()) <= 0.1
    )
    gate(
        7,
        "gumbel-limit",
        ok,
        "KS(max, Gumbel) n=101/201/401 = {:.4f}/{:.4f}/{:.4f}; max |corr| = {:.4f}".format(
            ks[101], ks[201], ks[401], max(corr.values())
        ),
    )


def test_criterion_08_pair_tail_rate():
    params = RegularityParams.from_density(401, 0.2)
    sc = scaling_constants(params)
    ap = binom_approx_params(params)
    m_pairs = math.comb(params.n, 2)
    thresholds = {x: sc.a + sc.b * x for x in (0, 1)}
    exact = {
        x: m_pairs * binomial_tail(ap.N, ap.p, t) * math.exp(x)
        for x, t in thresholds.items()
    }
    # Monte Carlo side pools every pair of each sampled graph: 250 graphs
    # give 2.0e7 pair observations, enough to resolve a factor-2 gate on
    # events of probability ~1/C(n,2)
    chain = SwitchChain(params, ChainConfig(seed=8))
    iu = np.triu_indices(params.n, 1)
    hits = {0: 0, 1: 0}
    for g in chain.samples(250):
        a = g.to_numpy().astype(np.float32)
        x12 = (a @ a)[iu]
        for x, t in thresholds.items():
            hits[x] += int((x12 > t).sum())
    mc = {x: hits[x] / 250 * math.exp(x) for x in (0, 1)}
    ok = all(0.5 <= r <= 2.0 for r in (*exact.values(), *mc.values()))
    gate(
        8,
        "pair-tail-rate",
        ok,
        "C(n,2)P(X12 > a+bx)/e^-x at x=0,1: exact {:.3f}/{:.3f}, sampled {:.3f}/{:.3f}".format(
            exact[0], exact[1], mc[0], mc[1]
        ),
    )


def test_criterion_09_coupling_locality():
    cfg = ExperimentConfig(
        kind="coupling", n=101, lam=0.5, samples=200, seed=9, h_offset=10, workers=2
    )
    st = run_experiment(cfg).summary["stats"]
    frac, viol = st["frac_maxdiff_le8"], st["degree_violations"]
    ok = frac >= 0.95 and viol == 0.0
    gate(
        9,
        "coupling-locality",
        ok,
        f"frac(max vertex diff <= 8) = {frac:.3f} (gate 0.95); degree violations = {viol:.0f}",
    )


def test_criterion_10_switching_degree():
    params = RegularityParams.from_density(101, 0.5)
    rate = (params.lam * (1 - params.lam)) ** 3 * params.n**3
    h = round(params.lam**2 * params.n)  # 25; level 26 sees the same meta-edges
    means = []
    for level, direction in [(h, "up"), (h + 1, "down")]:
        # thinning 2n is enough here: the switching count is a concentrated
        # global statistic, so sample correlation is immaterial at a 20% gate
        chain = conditional_chain(
            params, 0, 1, level, ChainConfig(seed=10, thinning=2 * params.n)
        )
        counts = [count_h_switchings(g, 0, 1, direction) for g in chain.samples(100)]
        means.append(float(np.mean(counts)))
    pooled = float(np.mean(means))
    ok = abs(pooled / rate - 1) <= 0.2
    gate(
        10,
        "switching-degree",
        ok,
        f"mean meta-degree {pooled:.0f} vs lam^3(1-lam)^3 n^3 = {rate:.0f} (ratio {pooled / rate:.3f})",
    )


def test_criterion_11_meta_graph_coupling():
    rng = np.random.default_rng(11)
    parts = []
    ok = True
    cases = [
        ("shipped 4x4", example_meta_graph(), 1 / 20, 3 / 10),
        ("complete 4x4", complete_meta_graph(4, 4), 0.0, 0.0),
    ]
    for label, D, eps, delta in cases:
        xs = np.zeros(D.s_size)
        ys = np.zeros(D.t_size)
        miss = 0
        for _ in range(100_000):
            out = couple(D, eps, delta, rng)
            xs[out.x] += 1
            ys[out.y] += 1
            miss += not out.in_D
        px, py = chisquare(xs).pvalue, chisquare(ys).pvalue
        miss_rate = miss / 100_000
        bound = 2 * eps + 4 * delta
        ok &= px > 0.001 and py > 0.001 and miss_rate <= bound
        parts.append(
            f"{label}: p(X)={px:.3f} p(Y)={py:.3f} Pr(miss)={miss_rate:.4f}<= {bound:.2f}"
        )
    gate(11, "meta-graph-coupling", ok, "; ".join(parts))


def test_criterion_12_coefficient_bounds():
    c = {}
    for n in (101, 201):
        params = RegularityParams.from_density(n, 0.3)
        c[n] = n * delta2_binomial_proxy(params, -1.0, -1.0)
    stable = max(c.values()) <= 2 * min(c.values())

    rng = np.random.default_rng(12)
    checked = 0
    dominated = True
    for _ in range(60):
        m = int(rng.integers(2, 11))
        K = int(rng.integers(2, min(2**m, 64) + 1))
        outs = tuple(map(tuple, rng.integers(0, 2, size=(K, m)).tolist()))
        weights = tuple(rng.dirichlet(np.ones(K)).tolist())
        system = SyntheticEventSystem(outs, weights)
        D = ExplicitDigraph(
            [
                rng.choice(m, size=rng.integers(0, m), replace=False).tolist()
                for _ in range(m)
            ]
        )
        try:
            phi = system.exact_phi(D)
        except ValueError:
            continue  # nothing ever fires under this table
        d1, d2 = system.exact_deltas(D)
        bound = extremal_bound(
            Coefficients(phi=phi, delta1=d1, delta2=d2), system.marginals()
        )
        dominated &= bound + 1e-9 >= system.none_fire_gap()
        checked += 1
    ok = stable and dominated and checked >= 40
    gate(
        12,
        "coefficient-bounds",
        ok,
        f"n*Delta2 = {c[101]:.3f}/{c[201]:.3f} at n=101/201; "
        f"bound >= exact gap on all {checked} checkable instances (60 drawn)",
    )


def test_criterion_13_determinism():
    cfgs = [
        ExperimentConfig(kind="gumbel", n=21, lam=0.5, samples=40, seed=11, workers=2),
        ExperimentConfig(kind="local-limit", n=21, lam=0.5, samples=300, seed=7, workers=2),
        ExperimentConfig(kind="coupling", n=21, lam=0.5, samples=30, seed=5, h_offset=3),
        ExperimentConfig(kind="oracle-validation", n=8, samples=400, seed=3),
    ]
    stale = []
    for cfg in cfgs:
        first, second = run_experiment(cfg), run_experiment(cfg)
        if first.to_json() != second.to_json() or first.csv_text() != second.csv_text():
            stale.append(cfg.kind)
    gate(
        13,
        "determinism",
        not stale,
        "byte-identical re-runs for all four kinds" if not stale else f"mismatch: {stale}",
    )
