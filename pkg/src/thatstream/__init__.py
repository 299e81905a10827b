"""Streaming oscillation-event detection with adaptive Hoeffding trees.

The main entry points are :class:`HoeffdingTree` (per-node ADWIN drift
monitors), :func:`transfer_chain` for carrying a tree across signatures,
the :class:`OzaBag` baseline, the PMU signature generator and the
prequential evaluators.
"""

from ._backend import BACKEND
from .adwin import Adwin, NaiveAdwin, adwin_epsilon
from .evaluation import (
    ConfusionCounts,
    EvalRecord,
    Summary,
    accuracy,
    holdout_eval,
    interleaved_eval,
    kappa,
    prequential_eval,
    random_accuracy,
    summarize,
)
from .ozabag import OzaBag
from .pmu import NO_DRIFT, PMU_SCHEMA, SIGNATURES, DriftSpec, SignatureSpec, generate_dataset, generate_signature
from .stream import AttributeSpec, CsvStream, Instance, ListStream, Schema, SchemaError, parse_csv_stream, write_csv_stream
from .transfer import TransferSession, build_attribute_queue, transfer_chain, transfer_train
from .tree import HoeffdingTree, HtConfig, SplitCriterion

__version__ = "0.1.0"


def warm_up() -> None:
    """Compile the numba kernels (no-op cost on the numpy backend).

    Call before timing anything so JIT compilation is not billed to the
    first model that happens to run.
    """
    from .pmu import SignatureStream

    spec = SignatureSpec((1.0, 2.0), 10.0, n_per_class=60)
    tree = HoeffdingTree(PMU_SCHEMA, HtConfig(n_min=10))
    for inst in SignatureStream(spec, NO_DRIFT):
        tree.predict(inst)
        tree.train(inst)
    NaiveAdwin().add(0.0)


__all__ = [
    "Adwin",
    "AttributeSpec",
    "BACKEND",
    "ConfusionCounts",
    "CsvStream",
    "DriftSpec",
    "EvalRecord",
    "HoeffdingTree",
    "HtConfig",
    "Instance",
    "ListStream",
    "NaiveAdwin",
    "OzaBag",
    "PMU_SCHEMA",
    "SIGNATURES",
    "Schema",
    "SchemaError",
    "SignatureSpec",
    "SplitCriterion",
    "Summary",
    "TransferSession",
    "accuracy",
    "adwin_epsilon",
    "build_attribute_queue",
    "generate_dataset",
    "generate_signature",
    "holdout_eval",
    "interleaved_eval",
    "kappa",
    "parse_csv_stream",
    "prequential_eval",
    "random_accuracy",
    "summarize",
    "transfer_chain",
    "transfer_train",
    "warm_up",
    "write_csv_stream",
]
