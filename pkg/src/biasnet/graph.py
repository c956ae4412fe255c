"""Immutable attributed graph used throughout the package.

Nodes are dense integers ``0..n-1``; every node carries a group label,
``0`` for the majority and ``1`` for the minority.  Edges are stored once,
as ``(i, j)`` with ``i < j``, in lexicographically sorted order.  That order
is the canonical edge order every other module relies on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

MAJORITY = 0
MINORITY = 1


class GraphError(ValueError):
    """Raised when graph input violates the simple-graph contract."""


@dataclass(frozen=True)
class GroupStats:
    n: int
    n_edges: int
    counts: tuple[int, int]
    intra_majority: int
    intra_minority: int
    inter: int

    @property
    def minority_fraction(self) -> float:
        return self.counts[MINORITY] / self.n if self.n else 0.0


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph with binary node labels.

    Use :func:`from_edges` to build one; the constructor assumes its inputs
    are already canonical.
    """

    n: int
    edges: np.ndarray  # (E, 2) int64, rows sorted, i < j
    labels: np.ndarray  # (n,) int8
    _indptr: np.ndarray = field(repr=False)
    _indices: np.ndarray = field(repr=False)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def degree(self, i: int) -> int:
        self._check_node(i)
        return int(self._indptr[i + 1] - self._indptr[i])

    def neighbors(self, i: int) -> set[int]:
        self._check_node(i)
        return set(self._indices[self._indptr[i]:self._indptr[i + 1]].tolist())

    def neighbor_array(self, i: int) -> np.ndarray:
        """Sorted neighbor ids of ``i`` as a read-only view."""
        self._check_node(i)
        return self._indices[self._indptr[i]:self._indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        self._check_node(i)
        self._check_node(j)
        nb = self.neighbor_array(i)
        pos = np.searchsorted(nb, j)
        return bool(pos < len(nb) and nb[pos] == j)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}

    def subgraph_edges(self, keep: np.ndarray) -> Graph:
        """Same nodes and labels, keeping only edges where ``keep`` is true."""
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != (self.n_edges,):
            raise GraphError("edge mask length does not match edge count")
        return _build(self.n, self.edges[keep], self.labels)

    def with_labels(self, labels: Sequence[int]) -> Graph:
        labels = _check_labels(self.n, labels)
        return Graph(self.n, self.edges, labels, self._indptr, self._indices)

    def _check_node(self, i: int) -> None:
        if not 0 <= i < self.n:
            raise GraphError(f"node id {i} out of range [0, {self.n})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.labels, other.labels)
        )

    __hash__ = None  # type: ignore[assignment]


def _check_labels(n: int, labels: Sequence[int]) -> np.ndarray:
    arr = np.asarray(labels)
    if arr.shape != (n,):
        raise GraphError(f"expected {n} labels, got {arr.size}")
    valid = (arr == MAJORITY) | (arr == MINORITY)
    if not valid.all():
        raise GraphError(f"label {arr[~valid][0].item()!r} is not 0 or 1")
    arr = arr.astype(np.int8)
    arr.setflags(write=False)
    return arr


def _build(n: int, edges: np.ndarray, labels: np.ndarray) -> Graph:
    # edges must already be canonical (i < j, sorted, unique)
    edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
    both = np.concatenate([edges, edges[:, ::-1]])
    order = np.lexsort((both[:, 1], both[:, 0]))
    both = both[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(both[:, 0], minlength=n), out=indptr[1:])
    indices = both[:, 1].copy()
    for a in (edges, indptr, indices):
        a.setflags(write=False)
    return Graph(n, edges, labels, indptr, indices)


def canonical_edges(n: int, edge_list: Iterable[tuple[int, int]]) -> np.ndarray:
    """Validate pairs and return them as a sorted ``(E, 2)`` array with i < j.

    Raises :class:`GraphError` naming the first out-of-range id, self-loop or
    duplicate pair.
    """
    arr = np.array([tuple(e) for e in edge_list], dtype=np.int64).reshape(-1, 2)
    if arr.size == 0:
        return arr
    bad = (arr < 0) | (arr >= n)
    if bad.any():
        row = int(np.nonzero(bad.any(axis=1))[0][0])
        raise GraphError(f"pair {tuple(arr[row].tolist())} has a node id outside [0, {n})")
    loops = arr[:, 0] == arr[:, 1]
    if loops.any():
        row = int(np.nonzero(loops)[0][0])
        raise GraphError(f"self-loop {tuple(arr[row].tolist())}")
    canon = np.sort(arr, axis=1)
    order = np.lexsort((canon[:, 1], canon[:, 0]))
    canon = canon[order]
    dup = np.all(canon[1:] == canon[:-1], axis=1)
    if dup.any():
        row = int(np.nonzero(dup)[0][0])
        raise GraphError(f"duplicate pair {tuple(canon[row].tolist())}")
    return canon


def from_edges(n: int, edge_list: Iterable[tuple[int, int]], labels: Sequence[int]) -> Graph:
    """Build a :class:`Graph` from an edge list and a per-node label list.

    Parameters
    ----------
    n : int
        Number of nodes.
    edge_list : iterable of (int, int)
        Unordered node pairs. Self-loops and repeated pairs (in either
        orientation) are rejected.
    labels : sequence of int
        One label in ``{0, 1}`` per node.
    """
    if n < 0:
        raise GraphError("node count must be non-negative")
    labels = _check_labels(n, labels)
    return _build(n, canonical_edges(n, edge_list), labels)


def group_stats(g: Graph) -> GroupStats:
    counts = np.bincount(g.labels, minlength=2)
    if g.n_edges:
        la = g.labels[g.edges[:, 0]]
        lb = g.labels[g.edges[:, 1]]
        intra_maj = int(np.sum((la == MAJORITY) & (lb == MAJORITY)))
        intra_min = int(np.sum((la == MINORITY) & (lb == MINORITY)))
    else:
        intra_maj = intra_min = 0
    return GroupStats(
        n=g.n,
        n_edges=g.n_edges,
        counts=(int(counts[MAJORITY]), int(counts[MINORITY])),
        intra_majority=intra_maj,
        intra_minority=intra_min,
        inter=g.n_edges - intra_maj - intra_min,
    )
