import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from collgram.assoc import DocumentProfile, make_profile
from collgram.errors import AlignmentError, DegenerateSample, InsufficientPairs
from collgram.stats import (
    betainc,
    bonferroni_threshold,
    cohens_d,
    compare_sets,
    default_m,
    group_summary,
    paired_t_test,
    sign_proportion,
    t_cdf,
)


def normal_cdf(x):
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def closed_df1(t):
    return 0.5 + math.atan(t) / math.pi


def closed_df2(t):
    return 0.5 * (1.0 + t / math.sqrt(2.0 + t * t))


def profiles(values, prefix="d"):
    """Profiles whose three indices all equal the given values."""
    return [DocumentProfile(f"{prefix}{i:03d}", 10, 10, 1, 1, v, v, v) for i, v in enumerate(values)]


class TestTCdf:
    @pytest.mark.parametrize("t", [-30, -5, -1, -0.3, 0, 0.3, 1, 3.4641, 5, 30])
    def test_closed_forms(self, t):
        assert abs(t_cdf(t, 1) - closed_df1(t)) <= 1e-10
        assert abs(t_cdf(t, 2) - closed_df2(t)) <= 1e-10

    def test_examples(self):
        assert t_cdf(0, 7) == 0.5
        assert t_cdf(1, 1) == pytest.approx(0.75, abs=1e-12)
        assert t_cdf(3.464102, 2) == pytest.approx(0.962910, abs=1e-6)

    @pytest.mark.parametrize("df", [1, 2, 3, 4, 7, 19, 49, 120, 5000])
    def test_against_scipy(self, df):
        for t in np.linspace(-12, 12, 97):
            assert t_cdf(float(t), df) == pytest.approx(sps.t.cdf(t, df), abs=1e-12)

    @given(st.floats(-50, 50), st.integers(1, 500))
    def test_symmetry(self, t, df):
        assert abs(t_cdf(t, df) + t_cdf(-t, df) - 1.0) <= 1e-12

    @given(st.floats(-20, 20), st.floats(0, 5), st.integers(1, 300))
    def test_monotone(self, t, step, df):
        assert t_cdf(t + step, df) >= t_cdf(t, df)

    @pytest.mark.parametrize("df", [100, 150, 1000])
    def test_normal_limit(self, df):
        for t in np.linspace(-4, 4, 81):
            assert abs(t_cdf(float(t), df) - normal_cdf(float(t))) <= 2e-3

    def test_betainc_edges(self):
        assert betainc(2, 3, 0.0) == 0.0
        assert betainc(2, 3, 1.0) == 1.0
        assert betainc(2, 3, 0.4) == pytest.approx(sps.beta.cdf(0.4, 2, 3), abs=1e-14)


class TestPairedT:
    def test_example(self):
        r = paired_t_test([0, 0, 0], [1, 2, 3])
        assert r.t_stat == pytest.approx(2 * math.sqrt(3), abs=1e-12)
        assert round(r.t_stat, 6) == 3.464102
        assert r.df == 2
        closed_p = 1 - r.t_stat / math.sqrt(2 + r.t_stat ** 2)
        assert r.p_two_tailed == pytest.approx(closed_p, abs=1e-12)
        assert r.p_two_tailed == pytest.approx(0.074180, abs=1e-6)

    def test_identical(self):
        r = paired_t_test([1.5, 2, 7], [1.5, 2, 7])
        assert (r.t_stat, r.p_two_tailed) == (0.0, 1.0)

    def test_swap(self):
        x, y = [1, 4, 2, 8], [2, 3, 5, 9]
        a, b = paired_t_test(x, y), paired_t_test(y, x)
        assert a.t_stat == -b.t_stat and a.p_two_tailed == b.p_two_tailed

    def test_against_scipy(self):
        rng = np.random.default_rng(5)
        for n in (2, 3, 10, 40):
            x, y = rng.normal(size=n), rng.normal(0.3, size=n)
            ref = sps.ttest_rel(y, x)
            r = paired_t_test(x.tolist(), y.tolist())
            assert r.t_stat == pytest.approx(ref.statistic, rel=1e-12)
            assert r.p_two_tailed == pytest.approx(ref.pvalue, rel=1e-9, abs=1e-15)

    def test_drops_missing(self):
        r = paired_t_test([0, None, 0, 0], [1, 5, 2, 3])
        assert r.df == 2

    def test_insufficient(self):
        with pytest.raises(InsufficientPairs, match="insufficient pairs"):
            paired_t_test([1, None], [2, 3])

    def test_degenerate(self):
        with pytest.raises(DegenerateSample, match="degenerate paired sample"):
            paired_t_test([1, 2, 3], [2, 3, 4])


class TestEffectSizes:
    def test_cohens_d(self):
        assert cohens_d([0, 0, 0], [1, 2, 3]) == 2.0
        assert cohens_d([4, 5], [4, 5]) == 0.0
        with pytest.raises(DegenerateSample):
            cohens_d([0, 0, 0], [2, 2, 2])

    def test_d_times_sqrt_n_is_t(self):
        x, y = [3.0, 1, 4, 1, 5], [9.0, 2, 6, 5, 3]
        assert cohens_d(x, y) * math.sqrt(5) == pytest.approx(paired_t_test(x, y).t_stat)

    @pytest.mark.parametrize("diffs, expected", [
        ([1, 2, -1], 2 / 3),
        ([0.5, 2, 3], 1.0),
        ([-0.5, -2, -3], 1.0),
        ([1, -1], 0.5),
        ([2, 0, 1, -0.5], 2.5 / 4),
        ([10, -1, -1], 1 / 3),  # mean driven by one large difference
    ])
    def test_sign_proportion(self, diffs, expected):
        assert sign_proportion([0] * len(diffs), diffs) == pytest.approx(expected)

    def test_bonferroni(self):
        assert bonferroni_threshold(0.05, 18) == 0.05 / 18
        assert math.floor(bonferroni_threshold(0.05, 18) * 1e4) / 1e4 == 0.0027
        assert round(bonferroni_threshold(0.05, 18), 6) == 0.002778
        assert bonferroni_threshold(0.05, 1) == 0.05
        assert bonferroni_threshold(0.01, 2) == 0.005


class TestCompareSets:
    def test_shape(self):
        sets = {k: profiles(np.arange(5.0) + i) for i, k in enumerate(["h", "ms", "dl", "gg"])}
        sets["h"] = profiles([0.0, 3, 1, 2, 9])
        matrices = compare_sets(sets)
        assert [m.index_name for m in matrices] == ["pct_high_mi", "pct_high_t", "ratio"]
        for m in matrices:
            assert len(m.cells) == 6
            assert m.bonferroni_m == 18 == default_m(4)
            assert m.threshold == 0.05 / 18
            assert list(m.cells) == [("h", "ms"), ("h", "dl"), ("h", "gg"),
                                     ("ms", "dl"), ("ms", "gg"), ("dl", "gg")]

    def test_identical_sets(self):
        vals = [1.0, 4.0, 2.5]
        matrices = compare_sets({"a": profiles(vals), "b": profiles(vals)})
        for m in matrices:
            c = m.cell("a", "b")
            assert (c.t_stat, c.p_two_tailed, c.significant) == (0.0, 1.0, False)
            assert m.bonferroni_m == 3

    def test_shift_detected(self):
        rng = np.random.default_rng(11)
        base = rng.uniform(5, 15, size=30)
        shifted = base + 1.0 + rng.uniform(-0.4, 0.4, size=30)
        mi = compare_sets({"A": profiles(base), "B": profiles(shifted)}, m=18)[0]
        c = mi.cell("A", "B")
        diffs = shifted - base
        # brute force: t from numpy, p from scipy
        t = diffs.mean() / (diffs.std(ddof=1) / math.sqrt(30))
        assert c.t_stat == pytest.approx(t, rel=1e-12)
        assert c.p_two_tailed == pytest.approx(2 * sps.t.sf(abs(t), 29), rel=1e-9)
        assert c.mean_diff == pytest.approx(diffs.mean())
        assert c.significant and c.prop_effect == 1.0 and c.n == 30

    def test_ratio_drops_pairwise(self):
        a = [make_profile(f"d{i}", 10, 10, hm, 2) for i, hm in enumerate([1, 2, 0, 4, 5])]
        b = [make_profile(f"d{i}", 10, 10, hm, 3) for i, hm in enumerate([2, 2, 3, 0, 1])]
        mi, t, ratio = compare_sets({"a": a, "b": b})
        assert mi.cell("a", "b").dropped_pairs == 0
        assert ratio.cell("a", "b").dropped_pairs == 2
        assert ratio.cell("a", "b").n == 3

    def test_unscored_document_dropped_everywhere(self):
        a = profiles([1.0, 2, 3, 4])
        b = profiles([2.0, 2, 5, 4.5])
        b[1] = make_profile(b[1].doc_id, 4, 0, 0, 0)
        for m in compare_sets({"a": a, "b": b}):
            assert m.cell("a", "b").dropped_pairs == 1

    def test_degenerate_cell_is_nan(self):
        a, b = profiles([1.0, 2, 3]), profiles([2.0, 3, 4])
        c = compare_sets({"a": a, "b": b})[0].cell("a", "b")
        assert math.isnan(c.t_stat) and not c.significant

    def test_alignment_by_doc_id(self):
        a = profiles([1.0, 2, 3, 4])
        b = list(reversed(profiles([1.5, 2.1, 3.9, 4.2])))
        c = compare_sets({"a": a, "b": b})[0].cell("a", "b")
        assert c.mean_diff == pytest.approx((0.5 + 0.1 + 0.9 + 0.2) / 4)

    def test_misalignment(self):
        a = profiles([1.0, 2, 3])
        b = profiles([1.0, 2])
        with pytest.raises(AlignmentError, match="d002"):
            compare_sets({"a": a, "b": b})

    @given(st.lists(st.floats(0, 100), min_size=3, max_size=30), st.randoms(use_true_random=False))
    @settings(max_examples=100)
    def test_antisymmetry(self, xs, rnd):
        ys = [x + rnd.uniform(-5, 5) for x in xs]
        ab = compare_sets({"a": profiles(xs), "b": profiles(ys)})[0].cell("a", "b")
        ba = compare_sets({"b": profiles(ys), "a": profiles(xs)})[0].cell("b", "a")
        if math.isnan(ab.t_stat):
            return
        assert ab.t_stat == -ba.t_stat and ab.mean_diff == -ba.mean_diff
        assert ab.cohens_d == -ba.cohens_d
        assert ab.p_two_tailed == ba.p_two_tailed and ab.prop_effect == ba.prop_effect


def test_group_summary():
    mean, se, n = group_summary([1.0, None, 2.0, 3.0])
    assert (mean, n) == (2.0, 3)
    assert se == pytest.approx(1 / math.sqrt(3))
    assert math.isnan(group_summary([None])[0])
