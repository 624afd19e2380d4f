"""Joint-DP baselines: edge flipping (randomized response) and naive Laplace."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from private_ppr.dp import RngStream, sample_laplace
from private_ppr.graph import Graph, GraphError
from private_ppr.pushflow import PPRConfig, push_flow

MAX_FLIP_NODES = 20_000


def flip_probability(epsilon: float) -> float:
    """Probability ``2 / (1 + e^(eps/2))`` that an adjacency bit is resampled."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return float(2.0 * expit(-epsilon / 2.0))


def randomized_response_bits(
    bits: np.ndarray, flip_p: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Resamples each bit with a fair coin with probability ``flip_p``.

    Returns ``(new_bits, resampled)``. A resampled bit may keep its value.
    """
    resampled = rng.random(len(bits)) < flip_p
    coins = rng.random(len(bits)) < 0.5
    return np.where(resampled, coins, bits), resampled


def randomized_response_graph(
    graph: Graph, source: int, epsilon: float, rng: RngStream, max_nodes: int = MAX_FLIP_NODES
) -> Graph:
    """Applies randomized response to every pair ``{u, v}`` with ``u, v != source``.

    Pairs are enumerated row by row (``u < v``), so this costs Theta(n^2) time;
    graphs above ``max_nodes`` are refused. Edges at ``source`` are kept as is.
    """
    n = graph.n
    if n > max_nodes:
        raise GraphError(
            f"edge flipping enumerates all Theta(n^2) node pairs; n={n} exceeds the limit of {max_nodes}"
        )
    flip_p = flip_probability(epsilon)
    gen = rng.generator()
    src_u, src_v = [], []
    for u in range(n - 1):
        if u == source:
            continue
        cols = np.arange(u + 1, n)
        bits = np.zeros(len(cols), dtype=bool)
        bits[graph.neighbors(u)[graph.neighbors(u) > u] - (u + 1)] = True
        new_bits, _ = randomized_response_bits(bits, flip_p, gen)
        new_bits[cols == source] = bits[cols == source]
        kept = cols[new_bits]
        src_u.append(np.full(len(kept), u))
        src_v.append(kept)
    right = graph.neighbors(source)
    right = right[right > source]
    src_u.append(np.full(len(right), source))
    src_v.append(right)
    edges = np.stack([np.concatenate(src_u), np.concatenate(src_v)], axis=1)
    return Graph.from_edges(n, edges, labels=graph.labels)


def baseline_dp_ppr(graph: Graph, source: int, epsilon: float, cfg: PPRConfig, rng: RngStream) -> np.ndarray:
    """Non-private push flow on the edge-flipped graph."""
    if graph.degrees[source] < 1:
        raise ValueError(f"source {source} has degree 0")
    return push_flow(randomized_response_graph(graph, source, epsilon, rng), source, cfg)


def naive_laplace_ppr(graph: Graph, source: int, epsilon: float, cfg: PPRConfig, rng: RngStream) -> np.ndarray:
    """Push flow plus Lap(1/epsilon) on every entry."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return push_flow(graph, source, cfg) + sample_laplace(1.0 / epsilon, rng, size=graph.n)
