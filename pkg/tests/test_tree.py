import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from thatstream.evaluation import prequential_eval
from thatstream.pmu import PMU_SCHEMA
from thatstream.stream import AttributeSpec, Instance, Schema, SchemaError
from thatstream.tree import (
    HoeffdingTree,
    HtConfig,
    Leaf,
    SplitCriterion,
    SplitNode,
    SplitTest,
    SufficientStats,
    suggest_numeric_splits,
)
from thatstream.tree.hoeffding import DELTA_FLOOR


def f_osc_stream(n=2000, seed=0, flip_at=None):
    """PMU-shaped instances where the class is oscillation iff f_osc > 3."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(n):
        f = rng.uniform(0.0, 6.0)
        x = [f, rng.uniform(10, 100), rng.normal(1, 0.02), rng.normal(1, 0.05), rng.normal(10, 5)]
        label = 0 if f > 3.0 else 1
        if flip_at is not None and t >= flip_at:
            label = 1 - label
        out.append(Instance(x, label))
    return out


def train_all(tree, instances):
    for inst in instances:
        tree.train(inst)
    return tree


class TestConfig:
    def test_defaults(self):
        c = HtConfig()
        assert (c.delta, c.tau, c.criterion) == (0.2, 0.05, SplitCriterion.GINI)
        assert c.adwin_delta == 0.002

    @pytest.mark.parametrize("kw", [{"delta": -0.1}, {"delta": 1.1}, {"tau": -1}, {"n_min": 0},
                                    {"adwin_delta": 0.0}, {"max_depth": -1}, {"criterion": "bogus"}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            HtConfig(**kw)

    def test_delta_endpoints_clamped(self):
        assert HtConfig(delta=0.0).effective_delta == DELTA_FLOOR
        assert HtConfig(delta=1.0).effective_delta == 1.0 - DELTA_FLOOR
        assert HtConfig(delta=0.3).effective_delta == 0.3

    def test_criterion_aliases(self):
        assert HtConfig(criterion="entropy").criterion is SplitCriterion.INFO_GAIN


class TestPredict:
    def test_empty_tree(self):
        label, dist = HoeffdingTree(PMU_SCHEMA).predict(Instance([0.1, 1, 1, 1, 1], 0))
        assert label == 0
        np.testing.assert_array_equal(dist, [0.5, 0.5])

    def test_majority_leaf(self):
        tree = HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=1000))
        x = [0.1, 1, 1, 1, 1]
        for label in [0] * 9 + [1]:
            tree.train(Instance(x, label))
        label, dist = tree.predict(Instance(x, 1))
        assert label == 0
        np.testing.assert_allclose(dist, [0.9, 0.1])

    def test_schema_mismatch(self):
        tree = HoeffdingTree(PMU_SCHEMA)
        with pytest.raises(SchemaError):
            tree.predict(Instance([1.0, 2.0], 0))
        with pytest.raises(SchemaError):
            tree.train(Instance([1.0] * 5, 7))


@pytest.fixture(scope="module")
def grown():
    data = f_osc_stream()
    return train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(delta=0.2, n_min=200)), data), data


class TestInduction:
    def test_root_splits_on_f_osc(self, grown):
        tree, _ = grown
        assert isinstance(tree.root, SplitNode)
        assert tree.root.test.attribute == 0
        assert 2.5 < tree.root.test.threshold < 3.5

    def test_training_set_accuracy(self, grown):
        tree, data = grown
        acc = np.mean([tree.predict(i)[0] == i.label for i in data])
        assert acc >= 0.95

    def test_predicts_concept(self, grown):
        tree, _ = grown
        assert tree.predict(Instance([5.0, 50, 1, 1, 10], 0))[0] == 0

    def test_single_class_never_splits(self):
        data = [Instance(i.values, 1) for i in f_osc_stream(1500)]
        tree = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=10)), data)
        assert isinstance(tree.root, Leaf)
        assert tree.n_splits == 0

    def test_gini_and_entropy_pick_same_root(self):
        data = f_osc_stream()
        roots = []
        for crit in SplitCriterion:
            tree = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=200, criterion=crit)), data)
            roots.append(tree.root.test.attribute)
        assert roots[0] == roots[1] == 0

    def test_reordered_attributes_same_choice(self):
        perm = [3, 0, 4, 1, 2]
        schema = Schema(tuple(PMU_SCHEMA.attributes[p] for p in perm), PMU_SCHEMA.class_labels)
        data = f_osc_stream()
        moved = [Instance(i.values[perm], i.label) for i in data]
        a = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=200)), data)
        b = train_all(HoeffdingTree(schema, HtConfig(n_min=200)), moved)
        assert perm[b.root.test.attribute] == a.root.test.attribute
        assert b.root.test.threshold == pytest.approx(a.root.test.threshold)

    def test_max_depth(self):
        tree = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(max_depth=1, n_min=20)), f_osc_stream(3000))
        assert tree.depth <= 1

    def test_size_grows_except_at_resets(self):
        tree = HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=20))
        size, resets = tree.n_nodes, tree.n_resets
        for inst in f_osc_stream(4000, flip_at=2000):
            tree.train(inst)
            if tree.n_resets == resets:
                assert tree.n_nodes >= size
            size, resets = tree.n_nodes, tree.n_resets

    def test_deterministic(self):
        data = f_osc_stream(1000)
        a = train_all(HoeffdingTree(PMU_SCHEMA), data).dump()
        b = train_all(HoeffdingTree(PMU_SCHEMA), data).dump()
        assert a == b


class TestDriftAdaptation:
    def test_label_flip(self):
        tree = HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=200))
        data = f_osc_stream(4000, seed=1, flip_at=2000)
        first_reset = None
        for t, inst in enumerate(data):
            if tree.train(inst) and t >= 2000 and first_reset is None:
                first_reset = t
        assert first_reset is not None and first_reset < 2500

        tree = HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=200))
        recs = prequential_eval(tree, data, 500, timed=False)
        assert recs[-1].windowed_accuracy >= 0.9

    def test_error_drop_does_not_reset(self):
        # learning makes the root's error fall sharply; that must not wipe the tree
        tree = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=50)), f_osc_stream(3000))
        assert tree.n_resets == 0
        assert tree.n_splits >= 1

    def test_reset_replaces_with_empty_leaf(self):
        tree = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=200)), f_osc_stream(2000, seed=2))
        assert isinstance(tree.root, SplitNode)
        flipped = [Instance(i.values, 1 - i.label) for i in f_osc_stream(600, seed=3)]
        for inst in flipped:
            if tree.train(inst):
                break
        assert tree.n_resets >= 1


class TestSuggestions:
    def test_separated_gaussians(self, rng):
        stats = SufficientStats(Schema((AttributeSpec("x"),), ("a", "b")))
        for _ in range(300):
            stats.update(np.array([rng.normal(0.0, 1.0)]), 0)
            stats.update(np.array([rng.normal(10.0, 1.0)]), 1)
        sugg = stats.numeric_suggestions(0, 10)
        assert len(sugg) == 10
        best = max(sugg, key=lambda s: stats.merit(SplitTest(0, s.threshold), SplitCriterion.GINI))
        assert 2.0 < best.threshold < 8.0
        for s in sugg:
            np.testing.assert_allclose(s.left + s.right, stats.w[0])

    def test_degenerate_range(self):
        w = np.array([4.0, 2.0])
        assert suggest_numeric_splits(w, np.ones(2), np.zeros(2), np.ones(2), np.ones(2)) == []

    def test_one_class_zero_merit(self, rng):
        stats = SufficientStats(Schema((AttributeSpec("x"),), ("a", "b")))
        for _ in range(100):
            stats.update(np.array([rng.normal()]), 0)
        for s in stats.numeric_suggestions(0):
            assert stats.merit(SplitTest(0, s.threshold), SplitCriterion.INFO_GAIN) == 0.0

    def test_unknown_attribute(self):
        stats = SufficientStats(PMU_SCHEMA)
        with pytest.raises(IndexError):
            stats.merit(SplitTest(9, 1.0), SplitCriterion.GINI)

    def test_observer_invariants(self, rng):
        stats = SufficientStats(PMU_SCHEMA)
        for _ in range(200):
            stats.update(rng.normal(size=5), int(rng.integers(2)), float(rng.integers(1, 3)))
        assert stats.n_seen == stats.class_counts.sum()
        assert np.all(stats.m2 >= -1e-9)
        assert np.all(stats.lo <= stats.hi)


NOMINAL = Schema(
    tuple(AttributeSpec.nominal(f"a{j}", ["x", "y", "z"]) for j in range(3)),
    ("p", "q"),
)


@given(
    st.lists(
        st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 1)),
        min_size=2, max_size=60,
    )
)
def test_greedy_root_matches_exhaustive_gain(rows):
    """n_min=1 and delta at its ceiling force a split at the first impure
    check; the chosen attribute must carry the batch-optimal gain."""
    tree = HoeffdingTree(NOMINAL, HtConfig(n_min=1, delta=1.0, criterion="info_gain"))
    seen = []
    for *x, y in rows:
        tree.train(Instance(x, y))
        seen.append((x, y))
        if isinstance(tree.root, SplitNode):
            break
    if not isinstance(tree.root, SplitNode):
        return
    xs = [r[0] for r in seen]
    ys = [r[1] for r in seen]
    best = oracles.best_nominal_attribute(xs, ys, [3, 3, 3])
    classes = sorted(set(ys))

    def gain(a):
        kids = [[sum(1 for r, l in zip(xs, ys) if r[a] == v and l == c) for c in classes] for v in range(3)]
        return oracles.info_gain([ys.count(c) for c in classes], kids)

    assert gain(tree.root.test.attribute) == pytest.approx(gain(best), abs=1e-9)
    assert tree.root.test.threshold is None
    assert len(tree.root.children) == 3


def test_dump_format():
    tree = train_all(HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=200)), f_osc_stream())
    lines = tree.dump().splitlines()
    assert lines[0].startswith("split f_osc <= ")
    assert lines[1].startswith("  [<= ")
    assert all("counts=[" in line and "adwin=" in line for line in lines)
