"""Robust locality-aware regression for labeled-data feature extraction."""

from rlar._kernels import HAVE_COMPILED
from rlar.data import (
    CorruptionSpec,
    DataError,
    LabeledDataset,
    SplitSpec,
    inject_outliers,
    load_csv,
    normalize_min_max,
    stratified_split,
)
from rlar.solver import FitTrace, HyperParams, NumericalError, RlarModel, fit, transform

__version__ = "0.1.0"

__all__ = [
    "CorruptionSpec",
    "DataError",
    "FitTrace",
    "HAVE_COMPILED",
    "HyperParams",
    "LabeledDataset",
    "NumericalError",
    "RlarModel",
    "SplitSpec",
    "fit",
    "inject_outliers",
    "load_csv",
    "normalize_min_max",
    "stratified_split",
    "transform",
    "__version__",
]
