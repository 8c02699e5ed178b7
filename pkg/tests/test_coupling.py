from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from oracles import (
    brute_force_switchings,
    couple_marginals,
    exact_couple_distribution,
    prob_not_in_D,
)
from regmax import coupling as coupling_mod
from regmax.coupling import (
    BipartiteMetaGraph,
    SwitchingTriple,
    apply_switching,
    complete_meta_graph,
    couple,
    couple_step,
    couple_to_h,
    count_h_switchings,
    example_meta_graph,
    good_sets,
    h_switchings,
    mean_switching_degree,
    sample_h_switching,
)
from regmax.graphs import LabelledGraph, RegularityParams, common_neighbours
from regmax.sampling import ChainConfig, sample_conditional
from regmax.stats import chi_square


class TestMetaGraph:
    def test_validation(self):
        with pytest.raises(ValueError, match="nonempty"):
            BipartiteMetaGraph(0, 3, ())
        with pytest.raises(ValueError, match="outside"):
            BipartiteMetaGraph(2, 2, ((0, 2),))
        with pytest.raises(ValueError, match="duplicate"):
            BipartiteMetaGraph(2, 2, ((0, 0), (0, 0)))
        with pytest.raises(ValueError, match="labels"):
            BipartiteMetaGraph(2, 2, ((0, 0),), labels=("a", "b"))

    def test_shipped_instances(self):
        D = example_meta_graph()
        ds, dt = D.degrees()
        assert list(ds) == [4, 3, 3, 2]
        assert list(dt) == [3, 3, 3, 3]
        assert D.size == 12
        assert (3, 0) in D.edge_set and (3, 1) not in D.edge_set
        K = complete_meta_graph(3, 5)
        assert K.size == 15
        assert all(deg == 5 for deg in K.degrees()[0])


def test_good_sets_thresholds():
    D = example_meta_graph()
    s_good, t_good = good_sets(D, 0.05)
    assert s_good == {0, 1, 2}  # degree 2 < 0.95 * 3
    assert t_good == {0, 1, 2, 3}
    s_good, _ = good_sets(D, 0.5)
    assert s_good == {0, 1, 2, 3}


class TestCouple:
    def test_precondition(self):
        D = example_meta_graph()
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="good-set"):
            couple(D, eps=0.05, delta=0.1, rng=rng)  # needs delta >= 1/4

    def test_oracle_tree_frozen_values(self):
        # exact expansion of the seven steps on the shipped instance
        D = example_meta_graph()
        joint = exact_couple_distribution(D, Fraction(1, 20), Fraction(3, 10))
        mx, my = couple_marginals(joint, D)
        assert all(q == Fraction(1, 4) for q in mx)  # uniformity is exact
        assert all(q == Fraction(1, 4) for q in my)
        assert prob_not_in_D(joint, D) == Fraction(7073, 38400)
        assert max(joint.values()) == Fraction(1321, 15360)
        # joint cap: 1/|D| + 2/((1-delta)|S||T|)
        cap = Fraction(1, 12) + 2 / (Fraction(7, 10) * 16)
        assert max(joint.values()) <= cap

    def test_mc_matches_oracle_tree(self):
        D = example_meta_graph()
        joint = exact_couple_distribution(D, Fraction(1, 20), Fraction(3, 10))
        rng = np.random.default_rng(42)
        n_runs = 20_000
        counts = Counter()
        labelled = 0
        for _ in range(n_runs):
            out = couple(D, 0.05, 0.3, rng)
            counts[(out.x, out.y)] += 1
            if out.label is not None:
                assert out.in_D  # label only on the kept meta-edge
                labelled += 1
        keys = sorted(joint)
        _, pval = chi_square(
            [counts.get(k, 0) for k in keys],
            [float(joint[k]) * n_runs for k in keys],
        )
        assert pval > 0.001
        assert labelled > 0
        # empirical miss rate within MC noise of the exact value
        miss = sum(c for k, c in counts.items() if k not in D.edge_set) / n_runs
        assert abs(miss - 7073 / 38400) < 0.01

    def test_complete_bipartite_never_misses(self):
        # eps = 0 makes every Bernoulli parameter exactly 1
        K = complete_meta_graph(4, 4)
        rng = np.random.default_rng(7)
        for _ in range(2000):
            out = couple(K, 0.0, 0.0, rng)
            assert out.in_D
            assert out.label is None  # instance carries no labels


def petersen() -> LabelledGraph:
    outer = [(k, (k + 1) % 5) for k in range(5)]
    inner = [(5 + k, 5 + (k + 2) % 5) for k in range(5)]
    spokes = [(k, k + 5) for k in range(5)]
    return LabelledGraph.from_edges(10, outer + inner + spokes)


class TestSwitchings:
    @pytest.mark.parametrize("pair", [(0, 1), (0, 2), (3, 8)])
    @pytest.mark.parametrize("direction", ["up", "down"])
    def test_enumeration_matches_set_algebra(self, pair, direction):
        g = petersen()
        i, j = pair
        got = {(t.u, t.v, t.w) for t, _ in h_switchings(g, i, j, direction)}
        assert got == brute_force_switchings(g, i, j, direction)
        assert count_h_switchings(g, i, j, direction) == len(got)

    def test_on_conditional_sample(self):
        p = RegularityParams.from_degree(12, 5)
        g = sample_conditional(p, 0, 1, 2, ChainConfig(seed=3, burn_in=500))
        for direction in ("up", "down"):
            got = {(t.u, t.v, t.w) for t, _ in h_switchings(g, 0, 1, direction)}
            assert got == brute_force_switchings(g, 0, 1, direction)

    def test_moves_level_and_preserves_degrees(self):
        g = petersen()
        before = common_neighbours(g, 0, 2)  # = 1
        for triple, moved in h_switchings(g, 0, 2, "down"):
            assert common_neighbours(moved, 0, 2) == before - 1
            assert moved.degrees() == g.degrees()
            moved.validate()

    def test_up_down_involution(self):
        g = petersen()
        for triple, up in h_switchings(g, 0, 2, "up"):
            restored = apply_switching(up, 0, 2, triple, "down")
            assert restored == g

    def test_sample_uniform_over_triples(self):
        g = petersen()
        triples = {(t.u, t.v, t.w) for t, _ in h_switchings(g, 0, 2, "up")}
        rng = np.random.default_rng(0)
        n_draws = 200 * len(triples)
        counts = Counter()
        for _ in range(n_draws):
            t = sample_h_switching(g, 0, 2, "up", rng)
            counts[(t.u, t.v, t.w)] += 1
        assert set(counts) == triples
        _, pval = chi_square(
            [counts[t] for t in sorted(triples)],
            np.full(len(triples), n_draws / len(triples)),
        )
        assert pval > 0.001

    def test_sample_returns_none_when_empty(self):
        # C5: pair (0,2) shares one neighbour and has no eligible v below
        cycle = LabelledGraph.from_edges(5, [(k, (k + 1) % 5) for k in range(5)])
        rng = np.random.default_rng(0)
        assert h_switchings(cycle, 0, 2, "down") == []
        assert sample_h_switching(cycle, 0, 2, "down", rng) is None

    def test_direction_validation(self):
        g = petersen()
        with pytest.raises(ValueError, match="direction"):
            h_switchings(g, 0, 2, "sideways")
        with pytest.raises(ValueError, match="direction"):
            apply_switching(g, 0, 2, SwitchingTriple(1, 3, 6), "sideways")
        with pytest.raises(ValueError, match="direction"):
            mean_switching_degree(RegularityParams.from_degree(8, 4), 2, "sideways")


def test_mean_switching_degree_frozen():
    p = RegularityParams.from_degree(101, 50)
    assert mean_switching_degree(p, 25, "up") == pytest.approx(25**2 * 24.75)
    assert mean_switching_degree(p, 25, "down") == pytest.approx(25 * 24 * 24.75)
    # both sit within 15% of the cubic rate at the central level
    cubic = p.lam**3 * (1 - p.lam) ** 3 * p.n**3
    for direction in ("up", "down"):
        assert abs(mean_switching_degree(p, 25, direction) / cubic - 1) < 0.15


class TestCoupleStep:
    def test_moves_one_level(self):
        p = RegularityParams.from_degree(21, 10)
        g = sample_conditional(p, 0, 1, 5, ChainConfig(seed=2, burn_in=400))
        rng = np.random.default_rng(3)
        out, w, via_meta = couple_step(g, 0, 1, "up", rng)
        assert common_neighbours(out, 0, 1) == 6
        assert set(out.degrees().degrees) == {10}
        if via_meta:
            assert isinstance(w, int) and 0 <= w < 21 and w not in (0, 1)
        else:
            assert w is None

    def test_target_bounds(self):
        p = RegularityParams.from_degree(8, 4)
        g = sample_conditional(p, 0, 1, 0, ChainConfig(seed=1, burn_in=100))
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError, match="target"):
            couple_step(g, 0, 1, "down", rng)

    def test_empty_switchings_fall_back(self, monkeypatch):
        p = RegularityParams.from_degree(21, 10)
        g = sample_conditional(p, 0, 1, 5, ChainConfig(seed=4, burn_in=400))
        # starve only the coupling attempt; the fallback chain needs the real one
        real = coupling_mod.sample_h_switching
        first = [True]

        def stub(*args, **kwargs):
            if first[0]:
                first[0] = False
                return None
            return real(*args, **kwargs)

        monkeypatch.setattr(coupling_mod, "sample_h_switching", stub)
        rng = np.random.default_rng(5)
        out, w, via_meta = couple_step(
            g, 0, 1, "up", rng, cfg=ChainConfig(seed=0, burn_in=300)
        )
        assert not via_meta and w is None
        assert common_neighbours(out, 0, 1) == 6

    def test_eps_one_always_rejects(self):
        p = RegularityParams.from_degree(21, 10)
        g = sample_conditional(p, 0, 1, 5, ChainConfig(seed=6, burn_in=400))
        rng = np.random.default_rng(7)
        out, w, via_meta = couple_step(
            g, 0, 1, "up", rng, eps=1.0, cfg=ChainConfig(seed=0, burn_in=300)
        )
        assert not via_meta and w is None
        assert common_neighbours(out, 0, 1) == 6


class TestCoupleToH:
    def test_zero_distance(self):
        p = RegularityParams.from_degree(16, 5)
        g = sample_conditional(p, 0, 1, 2, ChainConfig(seed=8, burn_in=300))
        rng = np.random.default_rng(9)
        out, rep = couple_to_h(g, 0, 1, 2, rng)
        assert out == g
        assert rep.steps == 0 and rep.max_vertex_diff == 0 and rep.degree_ok

    def test_short_walk_diff_report(self):
        p = RegularityParams.from_degree(21, 10)
        g = sample_conditional(p, 0, 1, 4, ChainConfig(seed=10, burn_in=400))
        rng = np.random.default_rng(11)
        out, rep = couple_to_h(g, 0, 1, 7, rng, cfg=ChainConfig(seed=0, burn_in=300))
        assert common_neighbours(out, 0, 1) == 7
        assert rep.steps == 3
        assert rep.degree_ok
        assert len(rep.w_labels) == rep.steps - rep.fallbacks
        # diff report equals a direct set comparison of the neighbourhoods
        for k in range(21):
            if k in (0, 1):
                continue
            diff = len(set(g.neighbours(k)) ^ set(out.neighbours(k)))
            assert rep.vertex_diffs.get(k, 0) == diff
        assert rep.max_vertex_diff == max(rep.vertex_diffs.values(), default=0)

    def test_walk_down(self):
        p = RegularityParams.from_degree(21, 10)
        g = sample_conditional(p, 0, 1, 7, ChainConfig(seed=12, burn_in=400))
        rng = np.random.default_rng(13)
        out, rep = couple_to_h(g, 0, 1, 4, rng, cfg=ChainConfig(seed=0, burn_in=300))
        assert common_neighbours(out, 0, 1) == 4
        assert rep.steps == 3 and not rep.independent

    def test_far_start_goes_independent(self):
        # |x0 - h| beyond sqrt(n) log n forces a fresh conditional sample
        p = RegularityParams.from_degree(101, 50)
        rng = np.random.default_rng(np.random.SeedSequence(14))
        from regmax.sampling import initial_regular_graph

        g = initial_regular_graph(p)  # circulant: X_01 = 48
        assert common_neighbours(g, 0, 1) == 48
        while common_neighbours(g, 0, 1) > 1:
            t = sample_h_switching(g, 0, 1, "down", rng)
            g = apply_switching(g, 0, 1, t, "down")
        out, rep = couple_to_h(
            g, 0, 1, 48, rng, cfg=ChainConfig(seed=0, burn_in=2000, thinning=100)
        )
        assert rep.independent and rep.steps == 0
        assert common_neighbours(out, 0, 1) == 48
        assert rep.degree_ok

    def test_target_bounds(self):
        p = RegularityParams.from_degree(16, 5)
        g = sample_conditional(p, 0, 1, 2, ChainConfig(seed=15, burn_in=300))
        rng = np.random.default_rng(16)
        with pytest.raises(ValueError, match="h_target"):
            couple_to_h(g, 0, 1, 6, rng)


def test_w_label_collision_rate_stays_low():
    # alternating steps at the central level; no vertex should dominate as w
    p = RegularityParams.from_degree(21, 10)
    g = sample_conditional(p, 0, 1, 5, ChainConfig(seed=17, burn_in=400))
    rng = np.random.default_rng(18)
    labels = Counter()
    steps = 0
    for _ in range(200):
        for direction in ("up", "down"):
            g, w, via_meta = couple_step(
                g, 0, 1, direction, rng, cfg=ChainConfig(seed=0, burn_in=300)
            )
            steps += 1
            if via_meta:
                labels[w] += 1
    assert sum(labels.values()) > 300  # meta path dominates
    assert max(labels.values()) / sum(labels.values()) <= 5 / 21
