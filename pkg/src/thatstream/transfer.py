"""Supervised transfer of a trained tree to a new signature.

The target starts as a deep copy of the source. Each instance the target
misclassifies gets a local repair: the leaf it reaches is replaced by a
test on a queued attribute (one the tree does not use yet) at the
instance's own value. The instance's side leads to a new leaf of its
class; the old leaf is kept on the other side.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .evaluation import EvalRecord, prequential_eval
from .stream import Instance, Schema, StreamSource
from .tree import HoeffdingTree, HtConfig, SplitNode, SplitTest

SINGLE_PASS = "single-pass"
LITERAL = "literal"


def build_attribute_queue(tree: HoeffdingTree, schema: Schema | None = None) -> list[int]:
    """Attributes not tested by any internal node, in schema order."""
    schema = schema or tree.schema
    used = tree.used_attributes()
    return [i for i in range(schema.n_attributes) if i not in used]


@dataclass
class Graft:
    attribute: int
    value: float
    label: int
    instance_index: int


@dataclass
class TransferSession:
    """Transfer state for one target signature.

    With ``learn=True`` every instance is first passed to the target's
    ordinary training (leaf statistics, splits, drift monitors) and the
    graft check runs afterwards; with ``learn=False`` the target only
    changes through grafts.

    In single-pass mode the queue head moves on after every graft, and
    once the queue is empty misclassified instances are only counted.
    """

    source: HoeffdingTree
    learn: bool = False
    mode: str = SINGLE_PASS
    target: HoeffdingTree = field(init=False)
    queue: list[int] = field(init=False)
    grafts: list[Graft] = field(init=False, default_factory=list)
    instances_seen: int = 0
    misclassified: int = 0
    unrepaired: int = 0
    _head: int = 0

    def __post_init__(self):
        if self.source is None:
            raise ValueError("transfer needs a trained source tree; train a fresh tree instead")
        if self.mode not in (SINGLE_PASS, LITERAL):
            raise ValueError(f"unknown transfer mode {self.mode!r}")
        self.target = copy.deepcopy(self.source)
        self.queue = build_attribute_queue(self.target)

    @property
    def grafts_made(self) -> int:
        return len(self.grafts)

    @property
    def current_attribute(self) -> int | None:
        return self.queue[self._head] if self._head < len(self.queue) else None

    def predict(self, inst: Instance) -> tuple[int, np.ndarray]:
        return self.target.predict(inst)

    def train(self, inst: Instance) -> bool:
        """Process one instance in single-pass mode; True if a graft was made."""
        if self.learn:
            self.target.train(inst)
        grafted = self._visit(inst, self.current_attribute)
        if grafted:
            self._head += 1
        return grafted

    def _visit(self, inst: Instance, attribute: int | None) -> bool:
        self.instances_seen += 1
        if self.target.predict(inst)[0] == inst.label:
            return False
        self.misclassified += 1
        if attribute is None:
            self.unrepaired += 1
            return False
        self.graft(inst, attribute)
        return True

    def replay(self, instances: Sequence[Instance]) -> None:
        """Literal schedule: one full pass over ``instances`` per queued attribute."""
        for attribute in self.queue:
            for inst in instances:
                if self.learn:
                    self.target.train(inst)
                self._visit(inst, attribute)
        self._head = len(self.queue)

    def graft(self, inst: Instance, attribute: int) -> SplitNode:
        tree = self.target
        nodes, branches = tree._path(inst.values)
        leaf = nodes[-1]
        value = float(inst.values[attribute])
        new_leaf = tree._new_leaf(leaf.depth + 1)
        new_leaf.stats.class_counts[inst.label] = 1.0
        new_leaf.last_eval = new_leaf.stats.n_seen
        spec = tree.schema.attributes[attribute]
        if spec.is_nominal:
            children = []
            for v in range(len(spec.values)):
                if v == int(value):
                    children.append(new_leaf)
                else:
                    kept = copy.deepcopy(leaf) if children.count(leaf) else leaf
                    children.append(kept)
            test = SplitTest(attribute, None)
        else:
            children = [new_leaf, leaf]
            test = SplitTest(attribute, value)
        node = SplitNode(test, children, type(leaf.monitor)(tree.config.adwin_delta), leaf.depth,
                         leaf.stats.class_counts.copy())
        for child in children:
            if child is not new_leaf:
                _deepen(child)
        tree._replace(nodes, branches, len(nodes) - 1, node)
        self.grafts.append(Graft(attribute, value, inst.label, self.instances_seen - 1))
        return node


def _deepen(node) -> None:
    node.depth += 1
    if type(node) is SplitNode:
        for child in node.children:
            _deepen(child)


@dataclass
class TransferResult:
    target: HoeffdingTree
    session: TransferSession


def transfer_train(
    source: HoeffdingTree,
    s_prime: Iterable[Instance],
    mode: str = LITERAL,
    learn: bool = False,
) -> TransferResult:
    """Adapt ``source`` to ``s_prime``; the source is never modified.

    ``mode=LITERAL`` replays ``s_prime`` once per queued attribute (it is
    materialized); ``mode=SINGLE_PASS`` reads it once.
    """
    session = TransferSession(source, learn=learn, mode=mode)
    if mode == LITERAL:
        session.replay(list(s_prime))
    else:
        for inst in s_prime:
            session.train(inst)
    return TransferResult(session.target, session)


@dataclass
class ChainResult:
    tree: HoeffdingTree
    records: list[list[EvalRecord]]
    sessions: list[TransferSession]


def transfer_chain(
    signatures: Sequence[StreamSource | Iterable[Instance]],
    config: HtConfig | None = None,
    schema: Schema | None = None,
    window_size: int | None = 500,
    learn: bool = True,
    timed: bool = True,
    evaluate: Callable[[object, Iterable[Instance]], list[EvalRecord]] | None = None,
) -> ChainResult:
    """Train on the first signature, then transfer through the rest.

    Every stage is scored with ``evaluate(model, stream)`` (prequential
    over ``window_size`` by default) using single-pass transfer, giving
    one list of records per signature.
    """
    if not signatures:
        raise ValueError("transfer_chain needs at least one signature")
    if evaluate is None:
        def evaluate(model, stream):
            return prequential_eval(model, stream, window_size, timed=timed)
    schema = schema or signatures[0].schema
    tree = HoeffdingTree(schema, config)
    records = [evaluate(tree, signatures[0])]
    sessions = []
    for stream in signatures[1:]:
        session = TransferSession(tree, learn=learn, mode=SINGLE_PASS)
        records.append(evaluate(session, stream))
        sessions.append(session)
        tree = session.target
    return ChainResult(tree, records, sessions)
