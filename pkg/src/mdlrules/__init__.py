"""Compact probabilistic rule lists for multiclass classification, selected by MDL."""
from .data import Dataset, FoldPlan, RawTable, binarize, load_csv, make_folds
from .encoding import (data_code_length, model_code_length, plugin_block_code_length,
                       relative_compression, total_code_length, universal_integer_code_length)
from .kernels import BACKEND
from .mining import CandidateSet, mine, remove_redundant
from .rulelist import Rule, RuleList, cover, estimate_theta
from .search import FitConfig, fit, learn

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CandidateSet", "Dataset", "FitConfig", "FoldPlan", "RawTable", "Rule",
    "RuleList", "binarize", "cover", "data_code_length", "estimate_theta", "fit", "learn",
    "load_csv", "make_folds", "mine", "model_code_length", "plugin_block_code_length",
    "relative_compression", "remove_redundant", "total_code_length",
    "universal_integer_code_length",
]
