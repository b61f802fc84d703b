"""Regression forests and the two-stage quality model.

Trees are stored flattened: node i splits on ``feature[i]`` at ``threshold[i]``
(samples with x <= threshold go left) or is a leaf when ``feature[i] == -1``,
in which case ``value[i]`` is its prediction.
"""
import logging
import math
from concurrent import futures
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from srqa.core.constants import (DEFAULT_TREES, DEFAULT_MIN_LEAF, DEFAULT_SUBSAMPLE, SPLIT_VARIANCE_FLOOR,
                                 LAMBDA_RIDGE, SCORE_MIN, SCORE_MAX, MODEL_KINDS, LOCAL_FEATURE_DIM,
                                 GLOBAL_FEATURE_DIM, FEATURE_DIM, EMPTY_DATA_ERROR, TREE_COUNT_ERROR,
                                 FEATURE_DIM_ERROR, NON_FINITE_FEATURES_ERROR, TOO_FEW_ROWS_ERROR, MODEL_KIND_ERROR,
                                 LENGTH_MISMATCH_ERROR)
from srqa.errors import ForestError, ParameterError

logger = logging.getLogger(__name__)

LEAF = -1

BLOCK_SLICES = {
    "local": slice(0, LOCAL_FEATURE_DIM),
    "global": slice(LOCAL_FEATURE_DIM, LOCAL_FEATURE_DIM + GLOBAL_FEATURE_DIM),
    "spatial": slice(LOCAL_FEATURE_DIM + GLOBAL_FEATURE_DIM, FEATURE_DIM),
    "all": slice(0, FEATURE_DIM),
}
KIND_BLOCKS = {
    "two_stage": ("local", "global", "spatial"),
    "concat": ("all",),
    "local": ("local",),
    "global": ("global",),
    "spatial": ("spatial",),
}


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    @property
    def node_count(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of X."""
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[nodes] != LEAF
        while np.any(active):
            current = nodes[active]
            goes_left = X[rows[active], self.feature[current]] <= self.threshold[current]
            nodes[active] = np.where(goes_left, self.left[current], self.right[current])
            active = self.feature[nodes] != LEAF
        return nodes

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]


@dataclass(frozen=True)
class Forest:
    trees: Tuple[Tree, ...]
    feature_dim: int

    def __len__(self):
        return len(self.trees)


@dataclass(frozen=True)
class ForestParams:
    min_leaf: int = DEFAULT_MIN_LEAF
    max_features: Optional[int] = None
    subsample: float = DEFAULT_SUBSAMPLE
    bootstrap: bool = True

    def features_per_split(self, feature_dim: int) -> int:
        if self.max_features is not None:
            return max(1, min(self.max_features, feature_dim))
        return int(math.ceil(math.sqrt(feature_dim)))

    def to_dict(self):
        return {"min_leaf": self.min_leaf, "max_features": self.max_features,
                "subsample": self.subsample, "bootstrap": self.bootstrap}


@dataclass(frozen=True)
class TrainedForest:
    forest: Forest
    oob_predictions: np.ndarray
    oob_fallback: int


@dataclass(frozen=True)
class LambdaFit:
    weights: np.ndarray
    intercept: float
    ridge: bool


@dataclass(frozen=True)
class TwoStageModel:
    kind: str
    forests: Tuple[Forest, ...]
    weights: np.ndarray
    intercept: float = 0.0
    train_meta: Dict = field(default_factory=dict)

    @property
    def blocks(self) -> Tuple[str, ...]:
        return KIND_BLOCKS[self.kind]


@dataclass(frozen=True)
class QualityPrediction:
    raw: float
    score: float
    per_forest: np.ndarray


def seed_sequence(seed) -> np.random.SeedSequence:
    return seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)


def _best_split_on_feature(x: np.ndarray, y: np.ndarray, min_leaf: int, node_term: float):
    order = np.argsort(x, kind="mergesort")
    xs, ys = x[order], y[order]
    n = len(ys)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    left_sum = np.cumsum(ys)[:-1]
    left_sq = np.cumsum(ys * ys)[:-1]
    right_sum = ys.sum() - left_sum
    right_sq = (ys * ys).sum() - left_sq
    var_left = np.maximum(left_sq / n_left - (left_sum / n_left) ** 2, SPLIT_VARIANCE_FLOOR)
    var_right = np.maximum(right_sq / n_right - (right_sum / n_right) ** 2, SPLIT_VARIANCE_FLOOR)
    gain = node_term - n_left * np.log(var_left) - n_right * np.log(var_right)
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not np.any(valid):
        return None
    gain = np.where(valid, gain, -np.inf)
    position = int(np.argmax(gain))
    lower, upper = xs[position], xs[position + 1]
    threshold = 0.5 * (lower + upper)
    if not lower <= threshold < upper:
        threshold = lower
    return float(gain[position]), float(threshold)


def _find_split(X: np.ndarray, y: np.ndarray, params: ForestParams, rng: np.random.Generator):
    n, dim = X.shape
    variance = max(float(np.var(y)), SPLIT_VARIANCE_FLOOR)
    node_term = n * math.log(variance)
    order = rng.permutation(dim)
    candidates = params.features_per_split(dim)
    # fall back to the unsampled features only when the sampled ones yield nothing
    for chunk in (order[:candidates], order[candidates:]):
        best = None
        for feature in chunk:
            found = _best_split_on_feature(X[:, feature], y, params.min_leaf, node_term)
            if found is not None and found[0] > 0 and (best is None or found[0] > best[0]):
                best = (found[0], int(feature), found[1])
        if best is not None:
            return best
    return None


def _leaf_value(y: np.ndarray) -> float:
    return float(y[0]) if np.ptp(y) == 0 else float(y.mean())


def grow_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, rng: np.random.Generator) -> Tree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        for column, default in ((feature, LEAF), (threshold, 0.0), (left, LEAF), (right, LEAF), (value, 0.0)):
            column.append(default)
        return len(feature) - 1

    stack = [(new_node(), np.arange(len(y)))]
    while stack:
        node, rows = stack.pop()
        targets = y[rows]
        value[node] = _leaf_value(targets)
        if len(rows) < 2 * params.min_leaf or np.ptp(targets) == 0:
            continue
        split = _find_split(X[rows], targets, params, rng)
        if split is None:
            continue
        _, split_feature, split_threshold = split
        goes_left = X[rows, split_feature] <= split_threshold
        feature[node], threshold[node] = split_feature, split_threshold
        left[node], right[node] = new_node(), new_node()
        stack.append((right[node], rows[~goes_left]))
        stack.append((left[node], rows[goes_left]))

    return Tree(feature=np.array(feature, dtype=np.int64), threshold=np.array(threshold, dtype=np.float64),
                left=np.array(left, dtype=np.int64), right=np.array(right, dtype=np.int64),
                value=np.array(value, dtype=np.float64))


def _sample_rows(count: int, params: ForestParams, rng: np.random.Generator) -> np.ndarray:
    if not params.bootstrap:
        return np.arange(count)
    size = max(1, int(round(params.subsample * count)))
    return rng.integers(0, count, size=size)


def _build_tree(X: np.ndarray, y: np.ndarray, params: ForestParams, seed: np.random.SeedSequence):
    rng = np.random.default_rng(seed)
    rows = _sample_rows(len(y), params, rng)
    return grow_tree(X[rows], y[rows], params, rng), rows


def _validate_training(X: np.ndarray, y: np.ndarray, trees: int, params: ForestParams) -> None:
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ForestError(EMPTY_DATA_ERROR)
    if len(y) != X.shape[0]:
        raise ForestError(LENGTH_MISMATCH_ERROR.format(left=X.shape[0], right=len(y)))
    if trees < 1:
        raise ForestError(TREE_COUNT_ERROR.format(trees=trees))
    if params.min_leaf < 1 or not 0 < params.subsample <= 1:
        raise ParameterError(f"invalid forest parameters: {params.to_dict()}")
    if X.shape[0] < 2 * params.min_leaf:
        raise ForestError(TOO_FEW_ROWS_ERROR.format(minimum=2 * params.min_leaf, count=X.shape[0]))
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ForestError(NON_FINITE_FEATURES_ERROR)


def train_forest_oob(X, y, trees: int = DEFAULT_TREES, params: ForestParams = None, seed=0,
                     threads: int = 1) -> TrainedForest:
    """Train a forest and return it with its out-of-bag predictions.

    Rows that every tree saw during training (always the case without
    bootstrap) fall back to the in-sample forest prediction.
    """
    params = params or ForestParams()
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    _validate_training(X, y, trees, params)

    seeds = seed_sequence(seed).spawn(trees)
    built = [None] * trees
    if threads > 1 and trees > 1:
        with futures.ProcessPoolExecutor(max_workers=threads) as pool:
            pending = {pool.submit(_build_tree, X, y, params, seeds[index]): index for index in range(trees)}
            for done in futures.as_completed(pending):
                built[pending[done]] = done.result()
    else:
        built = [_build_tree(X, y, params, seeds[index]) for index in range(trees)]

    oob_sum = np.zeros(len(y))
    oob_count = np.zeros(len(y), dtype=np.int64)
    for tree, rows in built:
        unseen = np.ones(len(y), dtype=bool)
        unseen[rows] = False
        if np.any(unseen):
            oob_sum[unseen] += tree.predict(X[unseen])
            oob_count[unseen] += 1

    forest = Forest(trees=tuple(tree for tree, _ in built), feature_dim=X.shape[1])
    missing = oob_count == 0
    oob = np.divide(oob_sum, np.maximum(oob_count, 1))
    if np.any(missing):
        oob[missing] = predict_forest_batch(forest, X[missing])
    logger.info(f"Trained forest of {trees} trees on {X.shape[0]}x{X.shape[1]} "
                f"({int(missing.sum())} rows without out-of-bag estimate)")
    return TrainedForest(forest=forest, oob_predictions=oob, oob_fallback=int(missing.sum()))


def train_forest(X, y, trees: int = DEFAULT_TREES, params: ForestParams = None, seed=0,
                 threads: int = 1) -> Forest:
    return train_forest_oob(X, y, trees, params, seed, threads).forest


def _check_inputs(forest: Forest, X: np.ndarray) -> None:
    if X.shape[1] != forest.feature_dim:
        raise ForestError(FEATURE_DIM_ERROR.format(expected=forest.feature_dim, actual=X.shape[1]))
    if not np.all(np.isfinite(X)):
        raise ForestError(NON_FINITE_FEATURES_ERROR)


def predict_forest_batch(forest: Forest, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    _check_inputs(forest, X)
    total = np.zeros(X.shape[0])
    for tree in forest.trees:
        total += tree.predict(X)
    return total / len(forest.trees)


def predict_forest(forest: Forest, x) -> float:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ForestError(FEATURE_DIM_ERROR.format(expected=forest.feature_dim, actual=x.shape))
    return float(predict_forest_batch(forest, x[np.newaxis, :])[0])


def fit_lambda(yhat, y) -> LambdaFit:
    """Least-squares weights (plus intercept) combining per-forest predictions.

    A rank-deficient design is solved with a 1e-6 ridge and flagged.
    """
    yhat = np.asarray(yhat, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if yhat.ndim == 1:
        yhat = yhat[:, np.newaxis]
    if yhat.shape[0] != len(y):
        raise ForestError(LENGTH_MISMATCH_ERROR.format(left=yhat.shape[0], right=len(y)))
    if len(y) < 3:
        raise ForestError(TOO_FEW_ROWS_ERROR.format(minimum=3, count=len(y)))
    design = np.column_stack([yhat, np.ones(len(y))])
    ridge = np.linalg.matrix_rank(design) < design.shape[1]
    if ridge:
        logger.warning("Rank-deficient forest predictions, fitting weights with ridge term")
        gram = design.T @ design + LAMBDA_RIDGE * np.eye(design.shape[1])
        solution = linalg.solve(gram, design.T @ y, assume_a="pos")
    else:
        solution = linalg.lstsq(design, y)[0]
    return LambdaFit(weights=solution[:-1], intercept=float(solution[-1]), ridge=bool(ridge))


def _feature_matrix(X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != FEATURE_DIM:
        raise ForestError(FEATURE_DIM_ERROR.format(expected=FEATURE_DIM, actual=X.shape[1]))
    return X


def train_two_stage(X, y, trees: int = DEFAULT_TREES, params: ForestParams = None, seed=0,
                    kind: str = "two_stage", threads: int = 1) -> TwoStageModel:
    if kind not in MODEL_KINDS:
        raise ParameterError(MODEL_KIND_ERROR.format(kind=kind))
    params = params or ForestParams()
    X = _feature_matrix(X)
    y = np.asarray(y, dtype=np.float64).ravel()

    root = seed_sequence(seed)
    seeds = root.spawn(len(KIND_BLOCKS[kind]))
    trained = [train_forest_oob(X[:, BLOCK_SLICES[block]], y, trees, params, seeds[index], threads)
               for index, block in enumerate(KIND_BLOCKS[kind])]
    forests = tuple(result.forest for result in trained)
    meta = {"trees": trees, "seed": {"entropy": root.entropy, "spawn_key": list(root.spawn_key)},
            "params": params.to_dict(), "rows": int(len(y)),
            "oob_fallback": [result.oob_fallback for result in trained], "ridge": False}

    if len(forests) == 1:
        return TwoStageModel(kind=kind, forests=forests, weights=np.ones(1), intercept=0.0, train_meta=meta)

    fit = fit_lambda(np.column_stack([result.oob_predictions for result in trained]), y)
    meta["ridge"] = fit.ridge
    logger.info(f"Combination weights {fit.weights.tolist()} intercept {fit.intercept:.4f}")
    return TwoStageModel(kind=kind, forests=forests, weights=fit.weights, intercept=fit.intercept, train_meta=meta)


def forest_predictions(model: TwoStageModel, X) -> np.ndarray:
    """n x m matrix of each forest's prediction on its own feature block."""
    X = _feature_matrix(X)
    return np.column_stack([predict_forest_batch(forest, X[:, BLOCK_SLICES[block]])
                            for forest, block in zip(model.forests, model.blocks)])


def clamp_score(raw):
    return np.clip(raw, SCORE_MIN, SCORE_MAX)


def predict_quality_batch(model: TwoStageModel, X) -> Tuple[np.ndarray, np.ndarray]:
    """Raw combined scores and the per-forest matrix for every row of X."""
    per_forest = forest_predictions(model, X)
    return per_forest @ model.weights + model.intercept, per_forest


def predict_quality(model: TwoStageModel, features) -> QualityPrediction:
    values = features.as_array() if hasattr(features, "as_array") else np.asarray(features, dtype=np.float64)
    if values.ndim != 1:
        raise ForestError(FEATURE_DIM_ERROR.format(expected=FEATURE_DIM, actual=values.shape))
    raw, per_forest = predict_quality_batch(model, values[np.newaxis, :])
    return QualityPrediction(raw=float(raw[0]), score=float(clamp_score(raw[0])), per_forest=per_forest[0])


def save_model(model: TwoStageModel, path) -> None:
    from srqa.core.schemas import dump_model
    dump_model(model, path)
    logger.info(f"Saved {model.kind} model to {path}")


def load_model(path) -> TwoStageModel:
    from srqa.core.schemas import read_model
    return read_model(path)
