import numpy as np
import pytest
from scipy import stats as sps

from regmax.stats import bootstrap_ci, chi_square, dequantize, ks_distance, ks_two_sample


def test_ks_distance_matches_scipy():
    rng = np.random.default_rng(1)
    for sample in (rng.random(257), rng.normal(size=100)):
        cdf = sps.norm.cdf
        expected = sps.kstest(sample, cdf).statistic
        assert ks_distance(sample, cdf) == pytest.approx(expected, abs=1e-12)


def test_ks_distance_tiny_and_empty():
    assert ks_distance([0.5], lambda x: x) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ks_distance([], lambda x: x)


def test_ks_two_sample_matches_scipy():
    rng = np.random.default_rng(2)
    a = rng.normal(size=300)
    b = rng.normal(0.3, 1.1, size=211)
    assert ks_two_sample(a, b) == pytest.approx(
        sps.ks_2samp(a, b).statistic, abs=1e-12
    )
    # ties across samples (lattice data) still handled exactly
    ia = rng.integers(0, 5, size=100)
    ib = rng.integers(0, 5, size=80)
    assert ks_two_sample(ia, ib) == pytest.approx(
        sps.ks_2samp(ia, ib).statistic, abs=1e-12
    )


def test_chi_square_matches_scipy():
    obs = [18, 25, 17, 20, 20]
    exp = [20.0] * 5
    stat, p = chi_square(obs, exp)
    ref = sps.chisquare(obs, exp)
    assert stat == pytest.approx(ref.statistic)
    assert p == pytest.approx(ref.pvalue)


def test_chi_square_input_guards():
    with pytest.raises(ValueError, match="empty"):
        chi_square([], [])
    with pytest.raises(ValueError, match="mismatch"):
        chi_square([1, 2], [1.5])
    with pytest.raises(ValueError, match="positive"):
        chi_square([1, 2], [0.0, 3.0])
    with pytest.raises(ValueError, match="totals"):
        chi_square([10, 10], [5.0, 5.0])


def test_bootstrap_ci_basics():
    rng = np.random.default_rng(3)
    vals = rng.normal(size=400)
    lo, hi = bootstrap_ci(vals, np.mean, rng)
    assert lo < vals.mean() < hi
    assert hi - lo < 0.3
    lo, hi = bootstrap_ci(np.full(50, 2.5), np.mean, rng)
    assert (lo, hi) == (2.5, 2.5)
    with pytest.raises(ValueError):
        bootstrap_ci([], np.mean, rng)


def test_bootstrap_ci_resamples_rows():
    rng = np.random.default_rng(4)
    pairs = np.column_stack([np.arange(100.0), np.arange(100.0)])

    def paired_stat(rows):
        assert rows.shape[1] == 2
        assert np.all(rows[:, 0] == rows[:, 1])  # rows must stay intact
        return rows[:, 0].mean()

    lo, hi = bootstrap_ci(pairs, paired_stat, rng, n_boot=50)
    assert lo < 49.5 < hi


def test_dequantize_range_and_ks():
    rng = np.random.default_rng(5)
    ints = rng.integers(0, 10, size=5000)
    smeared = dequantize(ints, rng)
    assert np.all(smeared >= ints) and np.all(smeared < ints + 1)
    # jittered uniform lattice is uniform on [0, 10)
    assert ks_distance(smeared, lambda x: min(max(x / 10, 0.0), 1.0)) < 0.03
