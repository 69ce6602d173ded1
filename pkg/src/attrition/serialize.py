"""Versioned JSON documents for trained models."""

from __future__ import annotations

import json
from dataclasses import asdict
from typing import Any

import numpy as np

from attrition.ensemble import AdaBoostModel, AdaBoostParams, ForestModel, ForestParams
from attrition.errors import AttritionError
from attrition.svm import Scaler, SvmModel
from attrition.trees import CartParams, Leaf, Split, Stump, Tree

FORMAT = "attrition-model"
VERSION = 1


class ModelFormatError(AttritionError, ValueError):
    module = "serialize"


def _stump(s: Stump) -> dict:
    return {
        "feature_index": s.feature_index,
        "threshold": s.threshold,
        "polarity": s.polarity,
        "degenerate": s.degenerate,
        "constant": s.constant,
    }


def _node(node) -> dict:
    if isinstance(node, Leaf):
        return {"label": node.label, "counts": list(node.counts)}
    return {
        "feature_index": node.feature_index,
        "threshold": node.threshold,
        "left": _node(node.left),
        "right": _node(node.right),
    }


def _load_node(doc: dict):
    if "label" in doc:
        return Leaf(int(doc["label"]), tuple(float(c) for c in doc["counts"]))
    return Split(int(doc["feature_index"]), float(doc["threshold"]), _load_node(doc["left"]), _load_node(doc["right"]))


def model_to_dict(model, feature_names=None, extra: dict | None = None) -> dict:
    doc: dict[str, Any] = {"format": FORMAT, "version": VERSION}
    if isinstance(model, AdaBoostModel):
        doc["kind"] = "adaboost"
        doc["params"] = asdict(model.params)
        doc["n_features"] = model.n_features
        doc["stop_reason"] = model.stop_reason
        doc["alphas"] = list(model.alphas)
        doc["errors"] = list(model.errors)
        doc["stumps"] = [_stump(s) for s in model.stumps]
    elif isinstance(model, ForestModel):
        doc["kind"] = "forest"
        doc["params"] = asdict(model.params)
        doc["n_features"] = model.n_features
        doc["tree_seeds"] = list(model.tree_seeds)
        doc["trees"] = [_node(t.root) for t in model.trees]
    elif isinstance(model, SvmModel):
        doc["kind"] = "svm"
        doc["n_features"] = model.n_features
        doc["kernel"] = model.kernel
        doc["C"] = model.C
        doc["bias"] = model.bias
        doc["converged"] = model.converged
        doc["iterations"] = model.iterations
        doc["scaler"] = {"means": model.scaler.means.tolist(), "stds": model.scaler.stds.tolist()}
        if model.kernel == "linear":
            doc["weights"] = model.weights.tolist()
        else:
            doc["gamma"] = model.gamma
            doc["support_vectors"] = model.support_vectors.tolist()
            doc["dual_coef"] = model.dual_coef.tolist()
    else:
        raise ModelFormatError(f"cannot serialize {type(model).__name__}")
    if feature_names is not None:
        doc["feature_names"] = list(feature_names)
    if extra:
        doc.update(extra)
    return doc


def model_from_dict(doc: dict):
    if doc.get("format") != FORMAT:
        raise ModelFormatError("not an attrition model document")
    if doc.get("version") != VERSION:
        raise ModelFormatError(f"unsupported model document version {doc.get('version')!r}")
    try:
        kind = doc["kind"]
        d = int(doc["n_features"])
        if kind == "adaboost":
            stumps = tuple(Stump(n_features=d, **s) for s in doc["stumps"])
            return AdaBoostModel(
                stumps, tuple(doc["alphas"]), AdaBoostParams(**doc["params"]), d,
                tuple(doc.get("errors", ())), doc.get("stop_reason", "n_estimators"),
            )
        if kind == "forest":
            p = dict(doc["params"])
            p["cart"] = CartParams(**p["cart"])
            trees = tuple(Tree(_load_node(t), d) for t in doc["trees"])
            return ForestModel(trees, tuple(doc["tree_seeds"]), ForestParams(**p), d)
        if kind == "svm":
            scaler = Scaler(np.array(doc["scaler"]["means"]), np.array(doc["scaler"]["stds"]))
            common = dict(C=doc["C"], converged=doc["converged"], iterations=doc["iterations"])
            if doc["kernel"] == "linear":
                return SvmModel("linear", doc["bias"], scaler, d, weights=np.array(doc["weights"]), **common)
            return SvmModel(
                "rbf", doc["bias"], scaler, d,
                support_vectors=np.array(doc["support_vectors"]).reshape(-1, d),
                dual_coef=np.array(doc["dual_coef"]), gamma=doc["gamma"], **common,
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from exc
    raise ModelFormatError(f"unknown model kind {doc.get('kind')!r}")


def dumps(model, feature_names=None, extra=None) -> str:
    return json.dumps(model_to_dict(model, feature_names, extra), indent=1) + "\n"


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not JSON: {exc}") from exc
    return model_from_dict(doc), doc
