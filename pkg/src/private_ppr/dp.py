"""Laplace noise and the differentially private PPR mechanisms.

Every mechanism is "deterministic core + independent Laplace noise", so with
noise switched off (``epsilon`` huge) it reduces to the core algorithm.

Joint mode protects, for the user at ``source``, every edge not incident to
``source``; it is the per-output variant where each user sees only their own
vector, which is weaker than joint DP over the tuple of all other outputs.
"""

from __future__ import annotations

import dataclasses
import math
import zlib

import numpy as np

from private_ppr.graph import Graph
from private_ppr.pushflow import CapConfig, Mode, PPRConfig, push_flow, push_flow_cap


@dataclasses.dataclass(frozen=True)
class RngStream:
    """Replayable random stream keyed by a master seed and a stream id.

    The stream id is ``(tag, source, trial)``; identical keys always give the
    same draws, and distinct keys give independent ones.
    """

    seed: int
    tag: str = ""
    source: int = 0
    trial: int = 0

    def generator(self) -> np.random.Generator:
        key = (zlib.crc32(self.tag.encode("utf-8")), self.source, self.trial)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))

    def derive(self, tag: str) -> RngStream:
        return dataclasses.replace(self, tag=f"{self.tag}/{tag}")


@dataclasses.dataclass(frozen=True)
class DPParams:
    epsilon: float
    mode: Mode = Mode.JOINT
    delta: float = 0.01  # only used for tail-bound statements, never by a mechanism

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        object.__setattr__(self, "mode", Mode(self.mode))


def _open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniform draws on (0, 1): zeros are redrawn."""
    u = rng.random(size)
    while True:
        zero = u == 0.0
        if not zero.any():
            return u
        u[zero] = rng.random(int(zero.sum()))


def laplace_from_uniform(scale: float, u: np.ndarray) -> np.ndarray:
    """Inverse CDF of Lap(scale) applied to ``u`` in (-1/2, 1/2)."""
    return -scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def sample_laplace(scale: float, rng: RngStream | np.random.Generator, size=None):
    """Draws Lap(scale) by inverse-CDF sampling, one uniform per variate.

    Returns a float when ``size`` is None, else an array.
    """
    if not scale > 0:
        raise ValueError(f"Laplace scale must be positive, got {scale}")
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    u = 0.5 - _open_uniform(gen, 1 if size is None else size)
    y = laplace_from_uniform(scale, u)
    return float(y[0]) if size is None else y


def high_degree_sensitivity(alpha: float, min_degree: int, mode: Mode) -> float:
    """Sensitivity of uncapped push flow on graphs with minimum degree ``min_degree``."""
    mode = Mode(mode)
    power = 2 if mode is Mode.JOINT else 1
    return 2.0 * (1.0 - alpha) / (alpha * min_degree**power)


def dp_push_flow(graph: Graph, source: int, cfg: PPRConfig, dp: DPParams, min_degree: int, rng: RngStream) -> np.ndarray:
    """Uncapped push flow plus Laplace noise, private only under a degree promise.

    The promise that every graph in the data universe has minimum degree at
    least ``min_degree`` is checked on the input; a graph breaking it is
    refused since the noise calibration would not hold.
    """
    if min_degree < 1:
        raise ValueError("min_degree promise must be >= 1")
    if graph.min_degree < min_degree:
        raise ValueError(
            f"graph has minimum degree {graph.min_degree} < promised {min_degree}; refusing to release"
        )
    p = push_flow(graph, source, cfg)
    scale = high_degree_sensitivity(cfg.alpha, min_degree, dp.mode) / dp.epsilon
    return p + sample_laplace(scale, rng, size=graph.n)


def dp_push_flow_cap(graph: Graph, source: int, cfg: PPRConfig, sigma: float, dp: DPParams, rng: RngStream) -> np.ndarray:
    """Capped push flow plus Lap(sigma/epsilon) on every one of the n entries."""
    p = push_flow_cap(graph, source, cfg, CapConfig(sigma, dp.mode))
    return p + sample_laplace(sigma / dp.epsilon, rng, size=graph.n)


def sparsify_probabilities(p: np.ndarray, sigma: float, epsilon: float, gamma: float) -> np.ndarray:
    """Inclusion probability of every index in :func:`dp_sparsify`."""
    for name, value in (("sigma", sigma), ("epsilon", epsilon), ("gamma", gamma)):
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    gap = (epsilon / sigma) * (gamma - np.asarray(p, dtype=np.float64))
    below = gap >= 0  # p_i <= gamma
    return np.where(below, 0.5 * np.exp(-np.abs(gap)), 1.0 - 0.5 * np.exp(-np.abs(gap)))


def dp_sparsify(p: np.ndarray, sigma: float, epsilon: float, gamma: float, rng: RngStream) -> np.ndarray:
    """Picks an epsilon-DP set of (likely large) indices of ``p``.

    Index ``i`` joins independently with probability
    ``exp(-(eps/sigma)(gamma - p_i)) / 2`` if ``p_i <= gamma`` and
    ``1 - exp((eps/sigma)(gamma - p_i)) / 2`` otherwise, i.e. iff
    ``p_i + Lap(sigma/eps) > gamma``.

    Returns:
      Sorted array of retained indices.
    """
    prob = sparsify_probabilities(p, sigma, epsilon, gamma)
    u = rng.generator().random(len(prob))
    return np.flatnonzero(u < prob)


def sparsify_threshold(sigma: float, epsilon: float, n: int) -> float:
    return 3.0 * sigma / epsilon * math.log(n)


@dataclasses.dataclass(frozen=True)
class SparseVector:
    """Length-``n`` vector stored as sorted ``(index, value)`` pairs; absent entries are 0."""

    n: int
    indices: np.ndarray
    values: np.ndarray

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.n)
        out[self.indices] = self.values
        return out

    @property
    def nnz(self) -> int:
        return len(self.indices)

    def entries(self) -> list[tuple[int, float]]:
        return list(zip(self.indices.tolist(), self.values.tolist()))


def dp_sparse_ppr(graph: Graph, source: int, cfg: PPRConfig, sigma: float, dp: DPParams, rng: RngStream) -> SparseVector:
    """Sparse DP PPR: a private support followed by Laplace noise on it.

    Half the budget selects the support with :func:`dp_sparsify` at threshold
    ``gamma = (3 sigma / eps0) ln n``, the other half pays for
    Lap(sigma/eps0) noise on the retained entries (``eps0 = eps/2``).
    """
    eps0 = dp.epsilon / 2.0
    p_hat = push_flow_cap(graph, source, cfg, CapConfig(sigma, dp.mode))
    gamma = sparsify_threshold(sigma, eps0, graph.n)
    support = dp_sparsify(p_hat, sigma, eps0, gamma, rng.derive("support"))
    noise = sample_laplace(sigma / eps0, rng.derive("values"), size=len(support))
    return SparseVector(graph.n, support, p_hat[support] + noise)
