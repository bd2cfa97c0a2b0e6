"""Greedy barycentric rational fitting with first- and second-order structure."""

from .core import (
    DataSet,
    DataTriple,
    FitTrace,
    IterationRecord,
    SecondOrderBarycentric,
    UnstructuredBarycentric,
    eval_second_order,
    eval_unstructured,
)
from .algorithms import FitConfig, fit, fit_aaa, fit_lso_aaa, fit_nso_aaa, fit_so_aaa
from .metrics import error_report, morscore

__all__ = [
    "DataSet", "DataTriple", "FitTrace", "IterationRecord",
    "SecondOrderBarycentric", "UnstructuredBarycentric",
    "eval_second_order", "eval_unstructured",
    "FitConfig", "fit", "fit_aaa", "fit_lso_aaa", "fit_nso_aaa", "fit_so_aaa",
    "error_report", "morscore",
]
