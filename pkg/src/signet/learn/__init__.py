"""Classifiers for signed link prediction."""

import numpy as np

from ..errors import DimensionMismatch
from .logistic import LogisticModel, coefficient_report, fit_logistic, sigmoid
from .rule import DEFAULT_RULE, UNDETERMINED, DecisionRule, decide, decide_all
from .tree import ForestModel, TreeModel, best_split, fit_forest, fit_tree

MODEL_FORMAT = "signet-model"
MODEL_VERSION = 1

__all__ = [
    "DecisionRule",
    "DEFAULT_RULE",
    "ForestModel",
    "LogisticModel",
    "TreeModel",
    "UNDETERMINED",
    "best_split",
    "coefficient_report",
    "decide",
    "decide_all",
    "fit_forest",
    "fit_logistic",
    "fit_tree",
    "model_from_dict",
    "model_to_dict",
    "predict_proba",
    "sigmoid",
]


def predict_proba(model, X):
    """Positive-link probability for each row (a 1-D row gives a scalar)."""
    arr = np.asarray(X, dtype=float)
    single = arr.ndim == 1
    rows = np.atleast_2d(arr)
    width = len(model.weights) if isinstance(model, LogisticModel) else None
    if width is not None and rows.shape[1] != width:
        raise DimensionMismatch(f"model has {width} features, rows have {rows.shape[1]}")
    p = model.predict_proba(rows)
    return float(p[0]) if single else p


def model_to_dict(model, **extra):
    doc = {"format": MODEL_FORMAT, "version": MODEL_VERSION, "model": model.to_dict()}
    doc.update(extra)
    return doc


def model_from_dict(doc):
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError("not a signet model document")
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')}")
    body = doc["model"]
    kind = body["kind"]
    if kind == "logistic":
        return LogisticModel.from_dict(body)
    if kind == "tree":
        return TreeModel.from_dict(body)
    if kind == "forest":
        return ForestModel.from_dict(body)
    raise ValueError(f"unknown model kind {kind!r}")
