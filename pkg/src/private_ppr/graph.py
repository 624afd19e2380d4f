"""Immutable undirected simple graphs in CSR adjacency form."""

from __future__ import annotations

import dataclasses
import io
import logging
from collections import defaultdict
from typing import IO, Iterable, Sequence

import numpy as np
import scipy.sparse as sps

logger = logging.getLogger(__name__)


class GraphError(ValueError):
    """Raised for invalid graph construction or malformed input."""


class EdgeListParseError(GraphError):
    def __init__(self, line_number: int, line: str):
        super().__init__(f"line {line_number}: expected two node labels, got {line!r}")
        self.line_number = line_number


@dataclasses.dataclass(frozen=True)
class EdgeListFormat:
    comment: str = "#"
    delimiter: str | None = None  # None splits on any whitespace


class Graph:
    """Undirected simple graph with sorted adjacency lists.

    Nodes are dense ids in ``[0, n)``. ``labels[i]`` is the external label of
    node ``i``; generated graphs label nodes by their id.
    """

    __slots__ = ("indptr", "indices", "degrees", "labels", "_adjacency")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, labels: Sequence[str] | None = None):
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        n = len(indptr) - 1
        if labels is None:
            labels = [str(i) for i in range(n)]
        if len(labels) != n:
            raise GraphError(f"got {len(labels)} labels for {n} nodes")
        indptr.setflags(write=False)
        indices.setflags(write=False)
        degrees = np.diff(indptr)
        degrees.setflags(write=False)
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "labels", tuple(labels))
        object.__setattr__(self, "_adjacency", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (np.array(self.indptr), np.array(self.indices), self.labels))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]], labels: Sequence[str] | None = None) -> Graph:
        """Builds a graph from undirected edges; duplicates and self-loops must already be gone."""
        edge_arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if len(edge_arr) and (edge_arr.min() < 0 or edge_arr.max() >= n):
            raise GraphError("edge endpoint out of range")
        if np.any(edge_arr[:, 0] == edge_arr[:, 1]):
            raise GraphError("self-loops are not allowed")
        rows = np.concatenate([edge_arr[:, 0], edge_arr[:, 1]])
        cols = np.concatenate([edge_arr[:, 1], edge_arr[:, 0]])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        if len(rows) > 1 and np.any((rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])):
            raise GraphError("duplicate edges are not allowed")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(indptr, cols, labels)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edges(self) -> np.ndarray:
        """Returns an ``(m, 2)`` array of edges with ``u < v``, sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        mask = rows < self.indices
        return np.stack([rows[mask], self.indices[mask]], axis=1)

    @property
    def adjacency(self) -> sps.csr_matrix:
        """Float64 CSR adjacency matrix (cached)."""
        if self._adjacency is None:
            data = np.ones(len(self.indices), dtype=np.float64)
            mat = sps.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
            object.__setattr__(self, "_adjacency", mat)
        return self._adjacency

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.num_edges})"


def load_edge_list(source: IO[bytes] | IO[str] | str | bytes, fmt: EdgeListFormat = EdgeListFormat()) -> Graph:
    """Parses an undirected edge list.

    Labels are remapped to dense ids in order of first appearance. Duplicate
    edges (in either direction) and self-loops are dropped with a warning.

    Args:
      source: a path, raw bytes/str content, or an open text or binary stream.
      fmt: comment prefix and token delimiter.

    Returns:
      The parsed graph; ``graph.labels`` holds the label of every dense id.
    """
    if isinstance(source, bytes):
        stream = io.StringIO(source.decode("utf-8"))
    elif isinstance(source, str):
        stream = open(source, encoding="utf-8")
    else:
        stream = source
    ids: dict[str, int] = {}
    seen: set[tuple[int, int]] = set()
    dup = loops = 0
    try:
        for line_number, raw in enumerate(stream, start=1):
            line = raw.decode("utf-8") if isinstance(raw, bytes) else raw
            line = line.strip()
            if not line or line.startswith(fmt.comment):
                continue
            tokens = line.split(fmt.delimiter)
            if len(tokens) != 2:
                raise EdgeListParseError(line_number, line)
            u = ids.setdefault(tokens[0], len(ids))
            v = ids.setdefault(tokens[1], len(ids))
            if u == v:
                loops += 1
                continue
            key = (u, v) if u < v else (v, u)
            if key in seen:
                dup += 1
                continue
            seen.add(key)
    finally:
        if isinstance(source, str):
            stream.close()
    if not seen:
        raise GraphError("edge list contains no edges")
    if dup or loops:
        logger.warning("dropped %d duplicate edges and %d self-loops", dup, loops)
    return Graph.from_edges(len(ids), sorted(seen), labels=list(ids))


def write_edge_list(graph: Graph, stream: IO[str]) -> None:
    for u, v in graph.edges():
        stream.write(f"{graph.labels[u]} {graph.labels[v]}\n")


def write_label_map(graph: Graph, stream: IO[str]) -> None:
    for i, label in enumerate(graph.labels):
        stream.write(f"{label}\t{i}\n")


def make_clique(node_count: int) -> Graph:
    if node_count < 2:
        raise GraphError("a clique needs at least 2 nodes")
    u, v = np.triu_indices(node_count, k=1)
    return Graph.from_edges(node_count, np.stack([u, v], axis=1))


def make_random_regular(node_count: int, degree: int, seed: int, max_attempts: int = 100) -> Graph:
    """Samples a simple ``degree``-regular graph.

    Uses the pairing model where stubs are matched at random and pairs that
    would form a self-loop or repeated edge are rejected and re-paired
    (Steger-Wormald). Whole attempts restart when the leftover stubs admit no
    valid pair.
    """
    if degree >= node_count or degree < 0:
        raise GraphError("degree must be in [0, node_count)")
    if (node_count * degree) % 2:
        raise GraphError("node_count * degree must be even")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        edges = _try_pairing(node_count, degree, rng)
        if edges is not None:
            return Graph.from_edges(node_count, sorted(edges))
    raise GraphError(f"no simple {degree}-regular graph after {max_attempts} attempts; try another seed")


def _try_pairing(n: int, d: int, rng: np.random.Generator) -> set[tuple[int, int]] | None:
    edges: set[tuple[int, int]] = set()
    stubs = np.repeat(np.arange(n), d)
    while len(stubs):
        rng.shuffle(stubs)
        leftover: dict[int, int] = defaultdict(int)
        for a, b in stubs.reshape(-1, 2).tolist():
            if a > b:
                a, b = b, a
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                leftover[a] += 1
                leftover[b] += 1
        if leftover and not _has_valid_pair(edges, leftover):
            return None
        stubs = np.array([v for v in sorted(leftover) for _ in range(leftover[v])], dtype=np.int64)
    return edges


def _has_valid_pair(edges: set[tuple[int, int]], leftover: dict[int, int]) -> bool:
    nodes = sorted(leftover)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if (a, b) not in edges:
                return True
    return False


def make_sbm(block_sizes: Sequence[int], p_in: float, p_out: float, seed: int) -> tuple[Graph, np.ndarray]:
    """Two-or-more block stochastic block model. Returns the graph and each node's block."""
    rng = np.random.default_rng(seed)
    blocks = np.repeat(np.arange(len(block_sizes)), block_sizes)
    n = len(blocks)
    u, v = np.triu_indices(n, k=1)
    prob = np.where(blocks[u] == blocks[v], p_in, p_out)
    keep = rng.random(len(u)) < prob
    return Graph.from_edges(n, np.stack([u[keep], v[keep]], axis=1)), blocks


def with_edge_toggled(graph: Graph, u: int, v: int) -> Graph:
    """Returns a copy of ``graph`` with edge ``(u, v)`` added if absent, removed if present."""
    if u == v:
        raise GraphError("cannot toggle a self-loop")
    if not (0 <= u < graph.n and 0 <= v < graph.n):
        raise GraphError("node id out of range")
    a, b = (u, v) if u < v else (v, u)
    edges = graph.edges()
    hit = (edges[:, 0] == a) & (edges[:, 1] == b)
    if hit.any():
        edges = edges[~hit]
    else:
        edges = np.concatenate([edges, [[a, b]]])
    return Graph.from_edges(graph.n, edges, labels=graph.labels)
