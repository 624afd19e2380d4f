"""Approximate Personalized PageRank by synchronous push rounds.

All algorithms use the lazy random walk ``W = (I + D^-1 A) / 2`` and teleport
probability ``alpha`` in that convention. A non-lazy teleport probability
``a`` corresponds to the lazy ``a / (2 - a)`` (0.15 -> ~0.081).
"""

from __future__ import annotations

import dataclasses
import enum
import math

import numpy as np

from private_ppr.graph import Graph


class Mode(str, enum.Enum):
    JOINT = "joint"
    NON_JOINT = "non-joint"


def rounds_from_precision(alpha: float, xi: float) -> int:
    """Number of push rounds ``ceil(ln(1/xi) / alpha)``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not 0.0 < xi <= 1.0:
        raise ValueError(f"xi must be in (0, 1], got {xi}")
    return math.ceil(math.log(1.0 / xi) / alpha)


def lazy_alpha(nonlazy_alpha: float) -> float:
    return nonlazy_alpha / (2.0 - nonlazy_alpha)


@dataclasses.dataclass(frozen=True)
class PPRConfig:
    alpha: float = 0.08
    xi: float = math.exp(-8.0)  # 100 rounds at alpha=0.08

    def __post_init__(self):
        rounds_from_precision(self.alpha, self.xi)

    @property
    def rounds(self) -> int:
        return rounds_from_precision(self.alpha, self.xi)

    @classmethod
    def from_rounds(cls, alpha: float, rounds: int) -> PPRConfig:
        """Picks ``xi = exp(-alpha * rounds)`` so that exactly ``rounds`` rounds run."""
        cfg = cls(alpha=alpha, xi=math.exp(-alpha * rounds))
        if cfg.rounds != rounds:
            # ceil() may land one off from float rounding; nudge xi inward.
            cfg = cls(alpha=alpha, xi=math.exp(-alpha * (rounds - 0.5)))
        assert cfg.rounds == rounds
        return cfg


@dataclasses.dataclass(frozen=True)
class CapConfig:
    sigma: float
    mode: Mode = Mode.JOINT

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        object.__setattr__(self, "mode", Mode(self.mode))

    def threshold(self, alpha: float) -> float:
        """Per-edge cap ``T_u`` shared by every capped node."""
        return self.sigma / (2.0 * (2.0 - alpha))

    def thresholds(self, n: int, source: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
        """Returns ``(T, capped)``; ``capped[v]`` is False where ``T_v`` is unbounded."""
        t = np.full(n, self.threshold(alpha))
        capped = np.ones(n, dtype=bool)
        if self.mode is Mode.JOINT:
            capped[source] = False
            t[source] = 0.0  # never read
        return t, capped


@dataclasses.dataclass
class PushState:
    """Working state after a round. ``h`` and ``f`` stay zero for uncapped runs."""

    round: int
    p: np.ndarray
    r: np.ndarray
    h: np.ndarray
    f: np.ndarray
    frontier: np.ndarray  # bool mask of nodes that have held residual

    def copy(self) -> PushState:
        return PushState(self.round, self.p.copy(), self.r.copy(), self.h.copy(), self.f.copy(), self.frontier.copy())


def _check_source(graph: Graph, source: int) -> None:
    if not 0 <= source < graph.n:
        raise ValueError(f"source {source} out of range for n={graph.n}")
    if graph.degrees[source] < 1:
        raise ValueError(f"source {source} has degree 0")


def _inverse_degrees(graph: Graph) -> np.ndarray:
    deg = graph.degrees.astype(np.float64)
    inv = np.zeros_like(deg)
    np.divide(1.0, deg, out=inv, where=deg > 0)
    return inv


def _spread(graph: Graph, pushed: np.ndarray, half_keep: float) -> tuple[np.ndarray, np.ndarray]:
    """Splits pushed flow: ``half_keep * x`` stays, ``half_keep * x / d`` goes to each neighbor.

    Returns ``(retained, received)``. Both push algorithms go through here so
    their float operations match exactly when no cap binds.
    """
    retained = half_keep * pushed
    share = retained / np.maximum(graph.degrees, 1)
    received = graph.adjacency @ share
    return retained, received


def _initial_state(graph: Graph, source: int) -> PushState:
    n = graph.n
    r = np.zeros(n)
    r[source] = 1.0
    frontier = np.zeros(n, dtype=bool)
    frontier[source] = True
    return PushState(0, np.zeros(n), r, np.zeros(n), np.zeros(n), frontier)


def _grow_frontier(graph: Graph, frontier: np.ndarray, pushers: np.ndarray) -> np.ndarray:
    touched = graph.adjacency @ pushers.astype(np.float64)
    return frontier | (touched > 0)


def push_flow(graph: Graph, source: int, cfg: PPRConfig, trace: list[PushState] | None = None) -> np.ndarray:
    """Synchronous push-flow approximate PPR.

    Every round, each node with residual ``r_v`` moves ``alpha * r_v`` into
    its estimate, keeps ``(1 - alpha)/2 * r_v`` and sends
    ``(1 - alpha)/2 * r_v / d(v)`` to each neighbor. After
    ``ceil(ln(1/xi)/alpha)`` rounds the residual has L1 norm at most ``xi``.

    Args:
      graph: input graph; ``source`` must have degree >= 1.
      source: source node id.
      cfg: teleport probability and precision.
      trace: if given, a copy of the state after every round (round 0 included)
        is appended.

    Returns:
      The approximate PPR vector (nonnegative, L1 norm <= 1).
    """
    _check_source(graph, source)
    alpha = cfg.alpha
    half_keep = (1.0 - alpha) / 2.0
    state = _initial_state(graph, source)
    if trace is not None:
        trace.append(state.copy())
    for i in range(1, cfg.rounds + 1):
        pushed = state.r
        state.p = state.p + alpha * pushed
        retained, received = _spread(graph, pushed, half_keep)
        state.frontier = _grow_frontier(graph, state.frontier, pushed > 0)
        state.f = pushed
        state.r = retained + received
        state.round = i
        if trace is not None:
            trace.append(state.copy())
    return state.p


def push_flow_cap(
    graph: Graph, source: int, cfg: PPRConfig, cap: CapConfig, trace: list[PushState] | None = None
) -> np.ndarray:
    """Push flow with per-node caps on the cumulative pushed flow.

    Node ``v`` may push at most ``d(v) * T_v`` in total, with
    ``T_v = sigma / (2 (2 - alpha))``; in joint mode the source is uncapped.
    This bounds the L1 change of the output under one edge toggle by
    ``sigma`` (joint mode: edges not touching the source). On graphs with
    minimum degree at least ``max(1/(alpha T_s), sqrt(1/(alpha T_u)))`` no cap
    ever binds and the result equals :func:`push_flow` bit for bit.
    """
    _check_source(graph, source)
    alpha = cfg.alpha
    half_keep = (1.0 - alpha) / 2.0
    t, capped = cap.thresholds(graph.n, source, alpha)
    budget = graph.degrees * t
    state = _initial_state(graph, source)
    if trace is not None:
        trace.append(state.copy())
    for i in range(1, cfg.rounds + 1):
        room = np.maximum(budget - state.h, 0.0)
        f = np.where(capped, np.minimum(state.r, room), state.r)
        state.h = state.h + f
        remaining = state.r - f
        state.p = state.p + alpha * f
        retained, received = _spread(graph, f, half_keep)
        state.frontier = _grow_frontier(graph, state.frontier, f > 0)
        state.f = f
        state.r = remaining + retained + received
        state.round = i
        if trace is not None:
            trace.append(state.copy())
    return state.p


def power_iteration_ppr(
    graph: Graph, source: int, alpha: float, tol: float = 1e-12, max_iters: int = 1_000_000
) -> np.ndarray:
    """Exact PPR by iterating ``p <- alpha e_s + (1 - alpha) p W`` to a fixed point.

    Stops once successive iterates differ by at most ``tol`` in L1.
    """
    _check_source(graph, source)
    if not tol > 0:
        raise ValueError("tol must be positive")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    inv_deg = _inverse_degrees(graph)
    adj = graph.adjacency
    e_s = np.zeros(graph.n)
    e_s[source] = 1.0
    p = e_s.copy()
    change = math.inf
    for _ in range(max_iters):
        walked = 0.5 * p + 0.5 * (adj @ (p * inv_deg))
        nxt = alpha * e_s + (1.0 - alpha) * walked
        change = float(np.abs(nxt - p).sum())
        p = nxt
        if change <= tol:
            return p
    raise RuntimeError(f"power iteration did not converge in {max_iters} iterations (last change {change:.3e})")
