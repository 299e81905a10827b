"""Online bagging (OzaBag) over Hoeffding trees."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .stream import Instance, Schema, SchemaError
from .tree import HoeffdingTree, HtConfig

_BATCH = 1024


class OzaBag:
    """Ensemble of ``k`` trees, each trained with Poisson(``lam``) weights.

    Every member draws from its own generator spawned from ``seed``, so a
    member's weights never depend on the others. ``weight_source`` replaces
    the sampler with ``f(member_index) -> int`` (used by tests).
    """

    def __init__(
        self,
        schema: Schema,
        config: HtConfig | None = None,
        k: int = 5,
        seed: int = 0,
        lam: float = 1.0,
        weight_source: Callable[[int], int] | None = None,
    ):
        if k < 1:
            raise ValueError("ensemble size must be >= 1")
        if lam <= 0:
            raise ValueError("lam must be positive")
        self.schema = schema
        self.config = config or HtConfig()
        self.lam = float(lam)
        self.seed = int(seed)
        self.members = [HoeffdingTree(schema, self.config) for _ in range(k)]
        self._rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(self.seed).spawn(k)]
        self._draws = [np.empty(0, dtype=np.int64) for _ in range(k)]
        self._pos = [0] * k
        self._weight_source = weight_source

    @property
    def k(self) -> int:
        return len(self.members)

    def draw(self, member: int) -> int:
        """Next Poisson weight for ``member``."""
        if self._weight_source is not None:
            return int(self._weight_source(member))
        pos = self._pos[member]
        draws = self._draws[member]
        if pos >= draws.shape[0]:
            draws = self._draws[member] = self._rngs[member].poisson(self.lam, _BATCH)
            pos = 0
        self._pos[member] = pos + 1
        return int(draws[pos])

    def train(self, inst: Instance) -> None:
        if inst.values.shape[0] != self.schema.n_attributes:
            raise SchemaError("instance does not match the ensemble schema")
        for i, member in enumerate(self.members):
            w = self.draw(i)
            if w > 0:
                member.train(inst if w == 1 and inst.weight == 1.0 else inst.with_weight(inst.weight * w))

    def predict(self, inst: Instance) -> tuple[int, np.ndarray]:
        """Unweighted majority vote; ties go to the lowest label index."""
        votes = np.zeros(self.schema.n_classes)
        for member in self.members:
            votes[member.predict(inst)[0]] += 1.0
        return int(np.argmax(votes)), votes / self.k
