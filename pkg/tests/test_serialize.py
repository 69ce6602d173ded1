import json

import numpy as np
import pytest

from attrition.dataset import Dataset
from attrition.ensemble import AdaBoostParams, ForestParams, train_adaboost, train_forest
from attrition.serialize import ModelFormatError, dumps, loads, model_to_dict
from attrition.svm import SvmParams, train_svm


@pytest.fixture(scope="module")
def data():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(90, 3))
    y = (X[:, 0] + 0.3 * rng.normal(size=90) > 0).astype(np.int64)
    return Dataset(X, y, ("a", "b", "c"))


TRAINERS = {
    "adaboost": lambda d: train_adaboost(d, AdaBoostParams(20, 0.5)),
    "forest": lambda d: train_forest(d, ForestParams(5, seed=2)),
    "svm_linear": lambda d: train_svm(d, SvmParams()),
    "svm_rbf": lambda d: train_svm(d, SvmParams(kernel="rbf", gamma_policy="explicit", gamma=0.5)),
}


@pytest.mark.parametrize("kind", sorted(TRAINERS))
def test_round_trip_preserves_scores(data, kind):
    model = TRAINERS[kind](data)
    text = dumps(model, data.feature_names, {"name": kind})
    restored, doc = loads(text)
    assert doc["name"] == kind and doc["feature_names"] == ["a", "b", "c"]
    assert np.array_equal(restored.score(data.features), model.score(data.features))
    assert np.array_equal(restored.predict(data.features), model.predict(data.features))
    # a second trip is byte-identical
    assert dumps(restored, data.feature_names, {"name": kind}) == text


def test_rejects_foreign_documents(data):
    with pytest.raises(ModelFormatError):
        loads("not json")
    with pytest.raises(ModelFormatError):
        loads(json.dumps({"format": "other"}))
    doc = model_to_dict(TRAINERS["adaboost"](data))
    doc["version"] = 99
    with pytest.raises(ModelFormatError):
        loads(json.dumps(doc))
    doc["version"] = 1
    del doc["stumps"]
    with pytest.raises(ModelFormatError):
        loads(json.dumps(doc))
    with pytest.raises(ModelFormatError):
        model_to_dict(object())
