"""Hoeffding tree with per-node ADWIN error monitors."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..adwin import DEFAULT_DELTA, Adwin
from ..stream import Instance, Schema, SchemaError
from .criteria import SplitCriterion, hoeffding_bound
from .stats import SplitTest, SufficientStats

DELTA_FLOOR = 1e-9


@dataclass(frozen=True)
class HtConfig:
    """Learner knobs.

    ``delta`` accepts the closed range [0, 1]; it is clamped to
    ``[1e-9, 1 - 1e-9]`` before use so the bound stays finite and non-zero.
    """

    delta: float = 0.2
    tau: float = 0.05
    n_min: int = 10
    criterion: SplitCriterion = SplitCriterion.GINI
    adwin_delta: float = DEFAULT_DELTA
    max_depth: int | None = None
    n_candidates: int = 10

    def __post_init__(self):
        object.__setattr__(self, "criterion", SplitCriterion.parse(self.criterion))
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")
        if self.n_min < 1:
            raise ValueError("n_min must be >= 1")
        if not 0.0 < self.adwin_delta < 1.0:
            raise ValueError("adwin_delta must be in (0, 1)")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be >= 0")
        if self.n_candidates < 1:
            raise ValueError("n_candidates must be >= 1")

    @property
    def effective_delta(self) -> float:
        return min(max(self.delta, DELTA_FLOOR), 1.0 - DELTA_FLOOR)

    def with_(self, **changes) -> HtConfig:
        return replace(self, **changes)


class Leaf:
    __slots__ = ("stats", "monitor", "depth", "last_eval")

    def __init__(self, schema: Schema, depth: int, adwin_delta: float, prior=None):
        self.stats = SufficientStats(schema, prior)
        self.monitor = Adwin(adwin_delta)
        self.depth = depth
        self.last_eval = self.stats.n_seen


class SplitNode:
    __slots__ = ("test", "children", "monitor", "depth", "class_counts")

    def __init__(self, test: SplitTest, children: list, monitor: Adwin, depth: int, class_counts):
        self.test = test
        self.children = children
        self.monitor = monitor
        self.depth = depth
        self.class_counts = class_counts

    def branch(self, values: np.ndarray) -> int:
        v = values[self.test.attribute]
        if self.test.threshold is None:
            return int(v)
        return 0 if v <= self.test.threshold else 1


class HoeffdingTree:
    """Incremental decision tree for one schema.

    Training an instance routes it to a leaf, feeds the 0/1 error of the
    tree's pre-update prediction to the ADWIN monitor of every node on the
    path, and replaces the shallowest node whose monitor cut its window
    with a raised error estimate by an empty leaf. Then the leaf is
    updated and, every ``n_min`` instances, considered for a split.
    """

    def __init__(self, schema: Schema, config: HtConfig | None = None):
        self.schema = schema
        self.config = config or HtConfig()
        self.root = self._new_leaf(0)
        self.n_splits = 0
        self.n_resets = 0
        self.n_trained = 0
        self._range = self.config.criterion.merit_range(schema.n_classes)

    def _new_leaf(self, depth: int, prior=None) -> Leaf:
        return Leaf(self.schema, depth, self.config.adwin_delta, prior)

    def _check(self, inst: Instance) -> None:
        if inst.values.shape[0] != self.schema.n_attributes or not 0 <= inst.label < self.schema.n_classes:
            raise SchemaError("instance does not match the tree schema")

    # -- routing ---------------------------------------------------------------

    def leaf_for(self, values: np.ndarray) -> Leaf:
        node = self.root
        while type(node) is SplitNode:
            node = node.children[node.branch(values)]
        return node

    def _path(self, values: np.ndarray) -> tuple[list, list[int]]:
        nodes, branches = [], []
        node = self.root
        while type(node) is SplitNode:
            b = node.branch(values)
            nodes.append(node)
            branches.append(b)
            node = node.children[b]
        nodes.append(node)
        return nodes, branches

    def _replace(self, nodes: list, branches: list[int], index: int, new) -> None:
        if index == 0:
            self.root = new
        else:
            nodes[index - 1].children[branches[index - 1]] = new

    # -- public API ------------------------------------------------------------

    def predict(self, inst: Instance) -> tuple[int, np.ndarray]:
        """Majority class of the reached leaf and its class distribution."""
        self._check(inst)
        stats = self.leaf_for(inst.values).stats
        return stats.predict(), stats.distribution()

    def train(self, inst: Instance) -> bool:
        """Learn from one instance. Returns True if a monitor reset a subtree."""
        self._check(inst)
        nodes, branches = self._path(inst.values)
        leaf = nodes[-1]
        err = 0.0 if leaf.stats.predict() == inst.label else 1.0
        reset_at = -1
        for i, node in enumerate(nodes):
            before = node.monitor.estimate
            changed, _ = node.monitor.add(err)
            # only a rise in error counts as drift; a drop means the node improved
            if changed and reset_at < 0 and node.monitor.estimate > before:
                reset_at = i
        if reset_at >= 0:
            leaf = self._new_leaf(nodes[reset_at].depth)
            self._replace(nodes, branches, reset_at, leaf)
            nodes = nodes[: reset_at + 1]
            nodes[-1] = leaf
            self.n_resets += 1
        leaf.stats.update(inst.values, inst.label, inst.weight)
        self.n_trained += 1
        cfg = self.config
        if leaf.stats.n_seen - leaf.last_eval >= cfg.n_min:
            leaf.last_eval = leaf.stats.n_seen
            if not leaf.stats.is_pure():
                self._attempt_split(leaf, nodes, branches)
        return reset_at >= 0

    def _attempt_split(self, leaf: Leaf, nodes: list, branches: list[int]) -> bool:
        cfg = self.config
        if cfg.max_depth is not None and leaf.depth >= cfg.max_depth:
            return False
        cands = leaf.stats.best_splits(cfg.criterion, cfg.n_candidates)
        if not cands:
            return False
        cands.sort(key=lambda c: -c.merit)  # stable: lowest attribute index wins ties
        best = cands[0]
        if best.merit <= 0.0:
            return False
        second = max(cands[1].merit, 0.0) if len(cands) > 1 else 0.0
        eps = hoeffding_bound(self._range, cfg.effective_delta, leaf.stats.n_seen)
        if not (best.merit - second > eps or eps < cfg.tau):
            return False
        self._split(leaf, best.test, best.child_counts, nodes, branches)
        return True

    def _split(self, leaf: Leaf, test: SplitTest, child_counts, nodes, branches) -> SplitNode:
        children = [self._new_leaf(leaf.depth + 1, prior=c) for c in child_counts]
        node = SplitNode(test, children, leaf.monitor, leaf.depth, leaf.stats.class_counts.copy())
        self._replace(nodes, branches, len(nodes) - 1, node)
        self.n_splits += 1
        return node

    # -- introspection ---------------------------------------------------------

    def iter_nodes(self):
        """Depth-first (pre-order) traversal yielding ``(node, branch_label)``."""
        stack = [(self.root, "")]
        while stack:
            node, label = stack.pop()
            yield node, label
            if type(node) is SplitNode:
                labels = self._branch_labels(node)
                for child, lab in reversed(list(zip(node.children, labels))):
                    stack.append((child, lab))

    def _branch_labels(self, node: SplitNode) -> list[str]:
        t = node.test
        if t.threshold is None:
            return [f"= {v}" for v in self.schema.attributes[t.attribute].values]
        return [f"<= {t.threshold:.10g}", f"> {t.threshold:.10g}"]

    @property
    def n_nodes(self) -> int:
        return sum(1 for _ in self.iter_nodes())

    @property
    def n_leaves(self) -> int:
        return sum(1 for n, _ in self.iter_nodes() if type(n) is Leaf)

    @property
    def depth(self) -> int:
        return max(n.depth for n, _ in self.iter_nodes())

    def used_attributes(self) -> set[int]:
        return {n.test.attribute for n, _ in self.iter_nodes() if type(n) is SplitNode}

    def dump(self) -> str:
        """Text dump, one node per line, two spaces of indent per depth level."""
        lines = []
        for node, label in self.iter_nodes():
            pad = "  " * node.depth + (f"[{label}] " if label else "")
            if type(node) is SplitNode:
                name = self.schema.attributes[node.test.attribute].name
                test = name if node.test.threshold is None else f"{name} <= {node.test.threshold:.10g}"
                counts = node.class_counts
                kind = f"split {test}"
            else:
                counts = node.stats.class_counts
                kind = "leaf"
            c = "[" + ", ".join(f"{x:.10g}" for x in counts) + "]"
            lines.append(f"{pad}{kind} counts={c} adwin={node.monitor.width}")
        return "\n".join(lines) + "\n"
