"""Closed-form quantities checked against frozen high-precision values."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from thatstream.adwin import CutInspection, adwin_epsilon
from thatstream.evaluation import ConfusionCounts, accuracy, kappa, random_accuracy
from thatstream.tree import SplitCriterion, entropy, gini, hoeffding_bound, impurity, partition_merit

REL = 1e-9

# Frozen from the mpmath oracle (40 digits); the oracle is re-run below.
ENTROPY_25_75 = 0.8112781244591328
IG_EXAMPLE = 0.3112781244591328
HOEFFDING_1_005_1000 = 0.03870227560204949
ADWIN_EPS_100_100 = 0.3111325119819836
ADWIN_EPS_1_1 = 1.6651092223153955


def test_frozen_values_match_oracle():
    assert oracles.entropy([0.25, 0.75]) == pytest.approx(ENTROPY_25_75, rel=1e-15)
    assert oracles.info_gain([6, 2], [[4, 0], [2, 2]]) == pytest.approx(IG_EXAMPLE, rel=1e-15)
    assert oracles.hoeffding(1, 0.05, 1000) == pytest.approx(HOEFFDING_1_005_1000, rel=1e-15)
    assert oracles.adwin_eps(100, 100, 0.05) == pytest.approx(ADWIN_EPS_100_100, rel=1e-15)
    assert oracles.adwin_eps(1, 1, 0.5) == pytest.approx(ADWIN_EPS_1_1, rel=1e-15)


class TestEntropy:
    def test_uniform(self):
        assert entropy([0.5, 0.5]) == 1.0

    def test_pure(self):
        assert entropy([1.0, 0.0]) == 0.0

    def test_quarter(self):
        assert entropy([0.25, 0.75]) == pytest.approx(ENTROPY_25_75, rel=REL)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            entropy([1.2, -0.2])

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            entropy([0.5, 0.4])

    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6).filter(lambda v: sum(v) > 1e-6))
    def test_range_and_oracle(self, raw):
        p = np.array(raw) / sum(raw)
        p = p / p.sum()
        h = entropy(p)
        assert -1e-12 <= h <= math.log2(len(p)) + 1e-12
        assert h == pytest.approx(oracles.entropy(p), rel=1e-9, abs=1e-12)


class TestGini:
    def test_uniform(self):
        assert gini([0.5, 0.5]) == 0.5

    def test_pure(self):
        assert gini([1.0, 0.0]) == 0.0

    def test_quarter(self):
        assert gini([0.25, 0.75]) == pytest.approx(0.375, rel=REL)
        assert oracles.gini([0.25, 0.75]) == pytest.approx(0.375, rel=1e-15)

    @given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6).filter(lambda v: sum(v) > 1e-6))
    def test_range(self, raw):
        p = np.array(raw) / sum(raw)
        p = p / p.sum()
        assert -1e-12 <= gini(p) <= 1 - 1 / len(p) + 1e-12


class TestMerit:
    def test_perfect_nominal_split_info_gain(self):
        assert partition_merit([5, 5], [[5, 0], [0, 5]], SplitCriterion.INFO_GAIN) == 1.0

    def test_independent_attribute(self):
        assert partition_merit([6, 4], [[3, 2], [3, 2]], SplitCriterion.GINI) == 0.0
        assert partition_merit([6, 4], [[3, 2], [3, 2]], SplitCriterion.INFO_GAIN) == 0.0

    def test_hand_example(self):
        got = partition_merit([6, 2], [[4, 0], [2, 2]], SplitCriterion.INFO_GAIN)
        assert got == pytest.approx(IG_EXAMPLE, rel=REL)

    def test_empty_child_contributes_nothing(self):
        a = partition_merit([6, 2], [[4, 0], [2, 2], [0, 0]], SplitCriterion.INFO_GAIN)
        assert a == pytest.approx(IG_EXAMPLE, rel=REL)

    @given(st.lists(st.tuples(st.integers(0, 50), st.integers(0, 50)), min_size=2, max_size=5))
    def test_nonnegative_and_matches_oracle(self, children):
        parent = np.sum(children, axis=0)
        if parent.sum() == 0:
            return
        for crit in SplitCriterion:
            m = partition_merit(parent, children, crit)
            assert m >= 0.0
            # a split can never remove more than the parent's impurity
            assert m <= impurity(parent, crit) + 1e-12
        assert partition_merit(parent, children, SplitCriterion.INFO_GAIN) == pytest.approx(
            max(0.0, oracles.info_gain(list(parent), [list(c) for c in children])), abs=1e-12
        )


class TestHoeffdingBound:
    def test_hand_value(self):
        assert hoeffding_bound(1.0, 0.05, 1000) == pytest.approx(HOEFFDING_1_005_1000, rel=REL)

    def test_delta_one_is_zero(self):
        assert hoeffding_bound(1.0, 1.0, 10) == 0.0

    @given(st.floats(0.01, 5.0), st.floats(1e-6, 0.99), st.integers(1, 10**6))
    def test_halving_by_quadrupling(self, r, delta, n):
        # eps(2n) = eps(n) / sqrt 2
        assert hoeffding_bound(r, delta, 2 * n) == pytest.approx(hoeffding_bound(r, delta, n) / math.sqrt(2), rel=1e-12)

    @given(st.floats(1e-6, 0.98), st.floats(1e-6, 0.98), st.integers(1, 5000))
    def test_monotone_in_delta(self, d1, d2, n):
        lo, hi = sorted((d1, d2))
        assert hoeffding_bound(1.0, lo, n) >= hoeffding_bound(1.0, hi, n)

    @pytest.mark.parametrize("args", [(0.0, 0.5, 10), (1.0, 0.0, 10), (1.0, 1.5, 10), (1.0, 0.5, 0)])
    def test_preconditions(self, args):
        with pytest.raises(ValueError):
            hoeffding_bound(*args)


class TestAdwinEpsilon:
    def test_hand_values(self):
        assert adwin_epsilon(100, 100, 0.05) == pytest.approx(ADWIN_EPS_100_100, rel=REL)
        assert adwin_epsilon(1, 1, 0.5) == pytest.approx(ADWIN_EPS_1_1, rel=REL)

    def test_inspection_fields(self):
        c = CutInspection.of(100, 20.0, 100, 80.0, 0.05)
        assert c.m == 50.0
        assert c.delta_prime == pytest.approx(2.5e-4, rel=REL)
        assert c.n0 + c.n1 == 200
        assert c.epsilon == pytest.approx(ADWIN_EPS_100_100, rel=REL)
        assert c.cut  # |0.2 - 0.8| = 0.6 >= 0.311

    def test_quadrupling_shrinks(self):
        assert adwin_epsilon(400, 400, 0.05) < adwin_epsilon(100, 100, 0.05)

    @given(st.integers(1, 10**5), st.integers(1, 10**5), st.floats(1e-6, 0.99))
    def test_matches_oracle(self, n0, n1, delta):
        assert adwin_epsilon(n0, n1, delta) == pytest.approx(oracles.adwin_eps(n0, n1, delta), rel=1e-9)

    @pytest.mark.parametrize("args", [(0, 5, 0.1), (5, 0, 0.1), (5, 5, 0.0), (5, 5, 1.0)])
    def test_preconditions(self, args):
        with pytest.raises(ValueError):
            adwin_epsilon(*args)


class TestMetrics:
    def test_accuracy_examples(self):
        assert accuracy(ConfusionCounts(1000, 1000, 0, 0)) == 1.0
        assert accuracy(ConfusionCounts(500, 500, 500, 500)) == 0.5
        assert accuracy(ConfusionCounts(940, 940, 60, 60)) == pytest.approx(0.94, rel=REL)

    def test_accuracy_empty(self):
        with pytest.raises(ValueError):
            accuracy(ConfusionCounts())

    def test_kappa_perfect(self):
        c = ConfusionCounts(tp=1000, tn=1000)
        assert random_accuracy(c) == 0.5
        assert kappa(c) == 1.0

    def test_kappa_always_positive(self):
        c = ConfusionCounts(tp=1000, fp=1000)
        assert accuracy(c) == 0.5
        assert random_accuracy(c) == 0.5
        assert kappa(c) == 0.0

    def test_kappa_degenerate_is_missing(self):
        assert kappa(ConfusionCounts(tp=10)) is None

    @given(st.integers(0, 500), st.integers(0, 500))
    def test_balanced_identity(self, tp, fp):
        # marginals all T/2: tp + fn = tn + fp and tp + fp = tn + fn  =>  tn = tp, fn = fp
        c = ConfusionCounts(tp=tp, tn=tp, fp=fp, fn=fp)
        if c.total == 0:
            return
        assert kappa(c) == pytest.approx(2 * accuracy(c) - 1, abs=1e-12)

    @given(st.integers(0, 300), st.integers(0, 300), st.integers(0, 300), st.integers(0, 300))
    def test_kappa_matches_oracle(self, tp, tn, fp, fn):
        c = ConfusionCounts(tp, tn, fp, fn)
        if c.total == 0:
            return
        k = kappa(c)
        if k is None:
            assert random_accuracy(c) == pytest.approx(1.0)
        else:
            assert -1.0 - 1e-12 <= k <= 1.0 + 1e-12
            assert k == pytest.approx(oracles.kappa(tp, tn, fp, fn), rel=1e-9, abs=1e-12)
