"""Ranking metrics, empirical sensitivity audits, and node classification."""

from __future__ import annotations

import dataclasses
from typing import Mapping, Sequence

import numpy as np
from scipy.stats import rankdata

from private_ppr.dp import RngStream
from private_ppr.graph import Graph, with_edge_toggled
from private_ppr.pushflow import CapConfig, Mode, PPRConfig, push_flow, push_flow_cap


def _pair(truth, pred) -> tuple[np.ndarray, np.ndarray]:
    truth = np.asarray(truth, dtype=np.float64)
    pred = np.asarray(pred, dtype=np.float64)
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {pred.shape}")
    return truth, pred


def top_k(scores, k: int, exclude: int | None = None) -> np.ndarray:
    """Node ids of the ``k`` highest scores; ties go to the smaller id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = np.asarray(scores, dtype=np.float64)
    ids = np.arange(len(scores))
    if exclude is not None:
        ids = ids[ids != exclude]
    # lexsort: last key is primary
    order = np.lexsort((ids, -scores[ids]))
    return ids[order[:k]]


def recall_at_k(truth, pred, k: int, source: int | None = None) -> float:
    truth, pred = _pair(truth, pred)
    hits = np.intersect1d(top_k(truth, k, source), top_k(pred, k, source))
    return len(hits) / k


def ndcg(truth, pred, k: int, source: int | None = None) -> float:
    """NDCG@k with raw truth scores as gains and a ``log2(rank + 1)`` discount."""
    truth, pred = _pair(truth, pred)
    if np.any(truth < 0):
        raise ValueError("truth scores must be nonnegative")
    ranked = top_k(pred, k, source)
    ideal = top_k(truth, k, source)
    discount = 1.0 / np.log2(np.arange(2, k + 2))
    idcg = float(truth[ideal] @ discount[: len(ideal)])
    if idcg == 0.0:
        return 1.0
    return float(truth[ranked] @ discount[: len(ranked)]) / idcg


def spearman_rho(truth, pred) -> float:
    """Pearson correlation of average-tie ranks."""
    truth, pred = _pair(truth, pred)
    if len(truth) < 2:
        raise ValueError("need at least two entries")
    rt, rp = rankdata(truth), rankdata(pred)
    rt -= rt.mean()
    rp -= rp.mean()
    denom = np.sqrt((rt @ rt) * (rp @ rp))
    if denom == 0.0:
        raise ValueError("Spearman correlation is undefined for constant input")
    return float(rt @ rp / denom)


def l1_similarity(truth, pred) -> float:
    truth, pred = _pair(truth, pred)
    return 1.0 - float(np.abs(truth - pred).sum())


def _toggle_candidates(graph: Graph, source: int, mode: Mode, toggle: str) -> np.ndarray:
    n = graph.n
    u, v = np.triu_indices(n, k=1)
    keep = np.ones(len(u), dtype=bool)
    if mode is Mode.JOINT:
        keep &= (u != source) & (v != source)
    if toggle != "any":
        present = np.asarray(graph.adjacency[u, v]).ravel() > 0
        keep &= present if toggle == "remove" else ~present
    return np.stack([u[keep], v[keep]], axis=1)


def empirical_sensitivity(
    algorithm: str,
    graph: Graph,
    source: int,
    trials: int,
    mode: Mode | str,
    rng: RngStream,
    cfg: PPRConfig = PPRConfig(),
    sigma: float | None = None,
    toggle: str = "any",
) -> float:
    """Largest observed ``||p(G) - p(G')||_1`` over random single-edge toggles.

    Args:
      algorithm: ``"push"`` or ``"push-cap"`` (the noise-free cores).
      graph: base graph.
      source: source node.
      trials: number of sampled neighbors ``G'``.
      mode: joint mode only toggles pairs not containing ``source``.
      rng: stream for picking pairs.
      cfg: PPR configuration.
      sigma: sensitivity parameter, required for ``"push-cap"``.
      toggle: ``"any"``, ``"add"`` (non-edges only) or ``"remove"`` (edges only).

    Returns:
      The maximum L1 distance observed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    mode = Mode(mode)
    if algorithm == "push":
        run = lambda g: push_flow(g, source, cfg)  # noqa: E731
    elif algorithm == "push-cap":
        if sigma is None:
            raise ValueError("push-cap needs sigma")
        cap = CapConfig(sigma, mode)
        run = lambda g: push_flow_cap(g, source, cfg, cap)  # noqa: E731
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    pairs = _toggle_candidates(graph, source, mode, toggle)
    if len(pairs) == 0:
        raise ValueError("no toggleable node pair for this graph, source and mode")
    picks = rng.generator().integers(0, len(pairs), size=trials)
    base = run(graph)
    worst = 0.0
    for i in picks.tolist():
        u, v = pairs[i]
        worst = max(worst, float(np.abs(base - run(with_edge_toggled(graph, int(u), int(v)))).sum()))
    return worst


@dataclasses.dataclass(frozen=True)
class ClassifierConfig:
    learning_rate: float = 0.1
    iterations: int = 500
    l2: float = 1e-4
    standardize: bool = True


@dataclasses.dataclass(frozen=True)
class LabeledNodes:
    """Multi-label node annotations: ``labels[v]`` is the set of label ids of node ``v``."""

    labels: Sequence[frozenset[int]]

    @classmethod
    def from_single(cls, labels: Sequence[int]) -> LabeledNodes:
        return cls([frozenset([int(x)]) for x in labels])

    @classmethod
    def from_mapping(cls, mapping: Mapping[int, set[int]], n: int) -> LabeledNodes:
        return cls([frozenset(mapping.get(v, ())) for v in range(n)])

    def indicator(self, num_labels: int) -> np.ndarray:
        y = np.zeros((len(self.labels), num_labels))
        for v, labs in enumerate(self.labels):
            y[v, list(labs)] = 1.0
        return y


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def train_one_vs_rest(x: np.ndarray, y: np.ndarray, cfg: ClassifierConfig) -> tuple[np.ndarray, np.ndarray]:
    """Full-batch gradient descent on L2-regularised logistic loss, one column of ``y`` per classifier."""
    m, dim = x.shape
    weights = np.zeros((dim, y.shape[1]))
    bias = np.zeros(y.shape[1])
    for _ in range(cfg.iterations):
        err = _sigmoid(x @ weights + bias) - y
        weights -= cfg.learning_rate * (x.T @ err / m + cfg.l2 * weights)
        bias -= cfg.learning_rate * err.mean(axis=0)
    return weights, bias


def node_classification_micro_f1(
    embeddings: np.ndarray,
    labels: LabeledNodes,
    train_fraction: float,
    seed: int,
    cfg: ClassifierConfig = ClassifierConfig(),
) -> float:
    """Micro-F1 of a one-vs-rest logistic classifier on a random node split.

    Each test node is assigned its ``l`` highest-scoring labels, where ``l``
    is its true label count. Labels missing from the training split get a
    classifier that never fires.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be in (0, 1)")
    x = np.asarray(embeddings, dtype=np.float64)
    num_labels = 1 + max((max(l) for l in labels.labels if l), default=-1)
    if num_labels < 2:
        raise ValueError("need at least two labels")
    y = labels.indicator(num_labels)
    n = len(x)
    perm = np.random.default_rng(seed).permutation(n)
    n_train = max(1, min(n - 1, int(round(train_fraction * n))))
    train, test = perm[:n_train], perm[n_train:]
    if cfg.standardize:
        mu = x[train].mean(axis=0)
        sd = x[train].std(axis=0)
        sd[sd == 0] = 1.0
        x = (x - mu) / sd
    weights, bias = train_one_vs_rest(x[train], y[train], cfg)
    scores = x[test] @ weights + bias
    scores[:, y[train].sum(axis=0) == 0] = -np.inf
    tp = fp = fn = 0
    for row, truth in zip(scores, y[test]):
        count = int(truth.sum())
        if count == 0:
            continue
        chosen = np.lexsort((np.arange(num_labels), -row))[:count]
        predicted = np.zeros(num_labels, dtype=bool)
        predicted[chosen[np.isfinite(row[chosen])]] = True
        actual = truth > 0
        tp += int((predicted & actual).sum())
        fp += int((predicted & ~actual).sum())
        fn += int((~predicted & actual).sum())
    if tp == 0:
        return 0.0
    return 2 * tp / (2 * tp + fp + fn)
