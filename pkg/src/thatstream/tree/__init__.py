from .criteria import SplitCriterion, entropy, gini, hoeffding_bound, impurity, partition_merit
from .hoeffding import HoeffdingTree, HtConfig, Leaf, SplitNode
from .stats import SplitTest, SufficientStats, ThresholdSuggestion, suggest_numeric_splits

__all__ = [
    "HoeffdingTree",
    "HtConfig",
    "Leaf",
    "SplitCriterion",
    "SplitNode",
    "SplitTest",
    "SufficientStats",
    "ThresholdSuggestion",
    "entropy",
    "gini",
    "hoeffding_bound",
    "impurity",
    "partition_merit",
    "suggest_numeric_splits",
]
