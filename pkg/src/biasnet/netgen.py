"""Homophilic preferential attachment (Barabási–Albert with group bias).

An arriving node ``u`` attaches to ``m`` distinct existing nodes.  Target
``t`` is chosen with weight ``h[l_u, l_t] * d_t`` where the symmetric
homophily matrix has ``h`` on the diagonal and ``1 - h`` off it.  Targets are
drawn one at a time and the weights renormalised after each pick.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import MINORITY, Graph, _build, _check_labels

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GenParams:
    n: int
    m: int
    f: float
    h: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if not (isinstance(self.n, (int, np.integer)) and self.n > self.m):
            raise ValueError(f"n must be an integer greater than m={self.m}, got {self.n!r}")
        if not 0.0 <= self.f <= 1.0:
            raise ValueError(f"minority fraction f must lie in [0, 1], got {self.f}")
        if not 0.0 <= self.h <= 1.0:
            raise ValueError(f"homophily h must lie in [0, 1], got {self.h}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    @property
    def expected_edges(self) -> int:
        m = self.m
        return m * (m + 1) // 2 + m * (self.n - m - 1)


def minority_count(n: int, f: float) -> int:
    # round half up; Python's round() would send 2.5 to 2
    return int(np.floor(f * n + 0.5))


def label_assignment(n: int, f: float, seed: int | np.random.Generator) -> np.ndarray:
    """Labels with exactly ``round(f * n)`` minority nodes at shuffled positions."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"minority fraction f must lie in [0, 1], got {f}")
    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=np.int8)
    labels[: minority_count(n, f)] = MINORITY
    rng.shuffle(labels)
    return labels


def homophily_matrix(h: float) -> np.ndarray:
    return np.array([[h, 1.0 - h], [1.0 - h, h]])


def generate(params: GenParams, *, return_fallbacks: bool = False):
    """Grow a homophilic scale-free graph.

    The first ``m + 1`` nodes form a complete seed graph; every later node
    adds exactly ``m`` edges, so the result has
    ``C(m+1, 2) + m * (n - m - 1)`` edges.

    Parameters
    ----------
    params : GenParams
        Size, attachment count, minority fraction, homophily and seed.
    return_fallbacks : bool
        Also return how many target picks fell back to uniform sampling
        because every remaining candidate had zero weight (only possible for
        ``h`` in {0, 1}).

    Returns
    -------
    Graph, or (Graph, int) when ``return_fallbacks`` is set.
    """
    n, m = params.n, params.m
    rng = np.random.default_rng(params.seed)
    labels = label_assignment(n, params.f, rng)
    hmat = homophily_matrix(params.h)

    edges = np.empty((params.expected_edges, 2), dtype=np.int64)
    seed_nodes = m + 1
    iu, ju = np.triu_indices(seed_nodes, k=1)
    n_seed = len(iu)
    edges[:n_seed, 0] = iu
    edges[:n_seed, 1] = ju
    pos = n_seed

    deg = np.zeros(n, dtype=np.float64)
    deg[:seed_nodes] = m
    # affinity[a][t] = h[a, l_t], precomputed for both arriving labels
    affinity = hmat[:, labels]
    fallbacks = 0

    for u in range(seed_nodes, n):
        w = affinity[labels[u], :u] * deg[:u]
        remaining = np.ones(u, dtype=bool)
        for _ in range(m):
            cs = np.cumsum(w)
            total = cs[-1]
            if total > 0.0:
                t = int(np.searchsorted(cs, rng.random() * total, side="right"))
                # guards against t == u when rounding puts the draw at total
                t = min(t, u - 1)
                while w[t] == 0.0:
                    t -= 1
            else:
                fallbacks += 1
                t = int(rng.choice(np.flatnonzero(remaining)))
            w[t] = 0.0
            remaining[t] = False
            edges[pos] = (t, u)
            pos += 1
            deg[t] += 1
        deg[u] = m

    if fallbacks:
        log.debug("generate: %d uniform fallback picks (h=%s)", fallbacks, params.h)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    g = _build(n, edges[order], _check_labels(n, labels))
    return (g, fallbacks) if return_fallbacks else g
