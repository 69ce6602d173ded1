
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from attrition.errors import TreeError
from oracles import brute_stump
from attrition.trees import CartParams, Leaf, Split, Stump, gini, train_cart, train_stump, tree_predict

def test_separable_stump():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0, 0, 1, 1])
    stump, err = train_stump(X, y, np.full(4, 0.25))
    assert err == 0.0
    assert 1.0 < stump.threshold < 2.0
    assert stump.predict(X).tolist() == [0, 0, 1, 1]

def test_degenerate_stump_predicts_heavier_class():
    X = np.array([[5.0], [5.0]])
    stump, err = train_stump(X, np.array([0, 1]), np.array([0.9, 0.1]))
    assert stump.degenerate and stump.constant == 0
    assert err == pytest.approx(0.1)
    assert stump.predict(X).tolist() == [0, 0]

def test_stump_rejects_bad_weights():
    X = np.array([[0.0], [1.0]])
    with pytest.raises(TreeError):
        train_stump(X, np.array([0, 1]), np.array([0.5, 0.6]))
    with pytest.raises(TreeError):
        train_stump(X, np.array([0, 1]), np.array([1.0]))

@st.composite
def weighted_instance(draw):
    n = draw(st.integers(2, 12))
    d = draw(st.integers(1, 4))
    X = np.array(draw(st.lists(st.lists(st.integers(0, 5), min_size=d, max_size=d), min_size=n, max_size=n)), float)
    y = np.array(draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    raw = np.array(draw(st.lists(st.integers(1, 20), min_size=n, max_size=n)), float)
    return X, y, raw / raw.sum()

@settings(max_examples=200, deadline=None)
@given(weighted_instance())
def test_stump_matches_brute_force(inst):
    X, y, w = inst
    stump, err = train_stump(X, y, w)
    oracle = brute_stump(X, y, w)
    if oracle is None:
        assert stump.degenerate
        return
    e, f, t, pol = oracle
    assert err == pytest.approx(e, abs=1e-9)
    assert (stump.feature_index, stump.polarity) == (f, pol)
    assert stump.threshold == pytest.approx(t)
    # weighted error of the returned stump agrees with what it reports
    assert float(w[stump.predict(X) != y].sum()) == pytest.approx(err, abs=1e-9)

def test_gini_values():
    assert gini([2, 2]) == 0.5
    assert gini([4, 0]) == 0.0
    assert gini([0, 0]) == 0.0
    assert gini([1, 2]) == pytest.approx(1 - (1 / 9 + 4 / 9))

def test_cart_pure_node_is_leaf():
    tree = train_cart(np.array([[1.0], [2.0], [3.0]]), np.array([1, 1, 1]))
    assert isinstance(tree.root, Leaf) and tree.root.label == 1

def test_depth_one_cart_is_the_gini_stump():
    X = np.array([[0.0, 5], [1, 4], [2, 3], [3, 2], [4, 1]])
    y = np.array([0, 0, 1, 1, 1])
    tree = train_cart(X, y, params=CartParams(max_depth=1))
    assert isinstance(tree.root, Split)
    assert (tree.root.feature_index, tree.root.threshold) == (0, 1.5)
    stump, _ = train_stump(X, y, np.full(5, 0.2))
    assert tree.predict(X).tolist() == stump.predict(X).tolist()

def test_full_tree_memorizes_distinct_rows():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(60, 3))
    y = rng.integers(0, 2, 60)
    y[:2] = [0, 1]
    tree = train_cart(X, y)
    assert np.array_equal(tree.predict(X), y)
    assert tree.n_leaves() <= 60

def test_row_on_threshold_goes_left():
    tree = train_cart(np.array([[0.0], [2.0]]), np.array([0, 1]))
    assert tree.root.threshold == 1.0
    assert tree_predict(tree, [1.0]) == 0
    assert tree_predict(tree, [1.0000001]) == 1

def test_leaf_tie_goes_to_class_zero():
    tree = train_cart(np.array([[1.0], [1.0]]), np.array([1, 0]))
    assert isinstance(tree.root, Leaf) and tree.root.label == 0

def _impurity(tree, X, y):
    # weighted Gini of the leaves, as a fraction of rows
    leaf_of = {}
    def walk(node, rows):
        if isinstance(node, Leaf):
            leaf_of[id(node)] = rows
            return
        left = X[rows, node.feature_index] <= node.threshold
        walk(node.left, rows[left])
        walk(node.right, rows[~left])
    walk(tree.root, np.arange(len(y)))
    return sum(len(r) * gini(np.bincount(y[r], minlength=2)) for r in leaf_of.values()) / len(y)

@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_every_split_reduces_impurity(seed):
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 4, size=(30, 3)).astype(float)
    y = rng.integers(0, 2, 30)
    previous = gini(np.bincount(y, minlength=2))
    for depth in (1, 2, 3):
        tree = train_cart(X, y, params=CartParams(max_depth=depth))
        now = _impurity(tree, X, y)
        assert now <= previous + 1e-12
        previous = now

def test_feature_subset_deterministic_per_seed():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(80, 9))
    y = (X[:, 0] + X[:, 4] > 0).astype(int)
    a = train_cart(X, y, params=CartParams(features_per_split="sqrt", seed=7))
    b = train_cart(X, y, params=CartParams(features_per_split="sqrt", seed=7))
    assert a == b
    assert CartParams(features_per_split="sqrt").resolve_features(30) == 5

def test_subset_fallback_still_splits():
    # only feature 2 is informative; with one feature per split the tree must still find it
    X = np.array([[1.0, 1, 0], [1, 1, 1], [1, 1, 2], [1, 1, 3]])
    y = np.array([0, 0, 1, 1])
    for seed in range(5):
        tree = train_cart(X, y, params=CartParams(features_per_split=1, seed=seed))
        assert np.array_equal(tree.predict(X), y)

def test_cart_errors():
    with pytest.raises(TreeError):
        CartParams(max_depth=0)
    with pytest.raises(TreeError):
        CartParams(features_per_split="log2")
    with pytest.raises(TreeError):
        train_cart(np.ones((3, 2)), np.array([0, 1]))
    tree = train_cart(np.array([[0.0, 1], [1, 0]]), np.array([0, 1]))
    with pytest.raises(TreeError):
        tree_predict(tree, [1.0, 2.0, 3.0])
    with pytest.raises(TreeError):
        tree.predict(np.ones((2, 5)))

def test_stump_manual_polarity():
    s = Stump(1, 0.5, -1, 2)
    assert s.predict(np.array([[9, 0.0], [9, 1.0]])).tolist() == [1, 0]
