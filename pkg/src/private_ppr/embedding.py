"""Signed-hash InstantEmbedding of PPR vectors and its private variants."""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from private_ppr.dp import DPParams, RngStream, dp_sparsify, sample_laplace, sparsify_threshold
from private_ppr.graph import Graph
from private_ppr.pushflow import CapConfig, PPRConfig, push_flow_cap

# splitmix64 finalizer constants
MIX_MULT_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_MULT_2 = np.uint64(0x94D049BB133111EB)


def mix64(x: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer on a uint64 array (wrapping arithmetic)."""
    z = np.asarray(x, dtype=np.uint64).copy()
    z ^= z >> np.uint64(30)
    z *= MIX_MULT_1
    z ^= z >> np.uint64(27)
    z *= MIX_MULT_2
    z ^= z >> np.uint64(31)
    return z


@dataclasses.dataclass(frozen=True)
class HashConfig:
    """Bucket hash ``V -> [0, k)`` and sign hash ``V -> {-1, +1}``.

    bucket(v) = mix64(bucket_seed ^ v) mod k; sign(v) = -1 if bit 63 of
    mix64(sign_seed ^ v) is set, else +1.
    """

    k: int = 256
    bucket_seed: int = 0x5EED0001
    sign_seed: int = 0x5EED0002

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"embedding dimension must be >= 1, got {self.k}")

    def buckets(self, nodes: np.ndarray) -> np.ndarray:
        keyed = np.uint64(self.bucket_seed) ^ np.asarray(nodes, dtype=np.uint64)
        return (mix64(keyed) % np.uint64(self.k)).astype(np.int64)

    def signs(self, nodes: np.ndarray) -> np.ndarray:
        keyed = np.uint64(self.sign_seed) ^ np.asarray(nodes, dtype=np.uint64)
        top = mix64(keyed) >> np.uint64(63)
        return 1.0 - 2.0 * top.astype(np.float64)


def log_contributions(p: np.ndarray, n: int) -> np.ndarray:
    """``max(ln(p_v n), 0)`` per entry; negative entries count as 0."""
    scaled = np.clip(np.asarray(p, dtype=np.float64), 0.0, None) * n
    out = np.zeros_like(scaled)
    big = scaled > 1.0
    out[big] = np.log(scaled[big])
    return out


def instant_embedding(p: np.ndarray, n: int, hc: HashConfig) -> np.ndarray:
    """Hashes ``max(ln(p_v n), 0)`` into ``k`` signed buckets."""
    p = np.asarray(p, dtype=np.float64)
    if len(p) != n:
        raise ValueError(f"PPR vector has length {len(p)}, expected {n}")
    contrib = log_contributions(p, n)
    nodes = np.flatnonzero(contrib)
    w = np.zeros(hc.k)
    np.add.at(w, hc.buckets(nodes), hc.signs(nodes) * contrib[nodes])
    return w


def embedding_sensitivity_bound(p: np.ndarray, p_prime: np.ndarray, n: int) -> float:
    """Upper bound ``m ln(1 + ||p - p'||_1 n / m)`` on the embedding's L1 change.

    ``m`` is the number of entries where the vectors differ.
    """
    p = np.asarray(p, dtype=np.float64)
    p_prime = np.asarray(p_prime, dtype=np.float64)
    if p.shape != p_prime.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {p_prime.shape}")
    diff = p - p_prime
    m = int(np.count_nonzero(diff))
    if m == 0:
        return 0.0
    return m * math.log1p(float(np.abs(diff).sum()) * n / m)


def dp_embedding(
    graph: Graph, source: int, cfg: PPRConfig, sigma: float, hc: HashConfig, dp: DPParams, rng: RngStream
) -> np.ndarray:
    """Embedding of the capped PPR vector plus Lap(sigma n / eps) per coordinate."""
    p = push_flow_cap(graph, source, cfg, CapConfig(sigma, dp.mode))
    w = instant_embedding(p, graph.n, hc)
    return w + sample_laplace(sigma * graph.n / dp.epsilon, rng, size=hc.k)


def sparse_embedding_noise_scale(support_size: int, sigma: float, n: int, epsilon0: float) -> float:
    if support_size == 0:
        return 0.0
    return support_size * math.log1p(sigma * n / support_size) / epsilon0


def dp_embedding_sparse(
    graph: Graph, source: int, cfg: PPRConfig, sigma: float, dp: DPParams, hc: HashConfig, rng: RngStream
) -> np.ndarray:
    """DP embedding via a privately sparsified PPR vector.

    Half the budget picks the support; the rest pays for noise scaled to the
    support size, which is smaller than the dense ``sigma n`` bound when
    ``sigma n`` is large relative to the support.
    """
    eps0 = dp.epsilon / 2.0
    n = graph.n
    p_hat = push_flow_cap(graph, source, cfg, CapConfig(sigma, dp.mode))
    support = dp_sparsify(p_hat, sigma, eps0, sparsify_threshold(sigma, eps0, n), rng.derive("support"))
    p = np.zeros(n)
    p[support] = p_hat[support]
    w = instant_embedding(p, n, hc)
    scale = sparse_embedding_noise_scale(len(support), sigma, n, eps0)
    if scale == 0.0:
        return w
    return w + sample_laplace(scale, rng.derive("values"), size=hc.k)
