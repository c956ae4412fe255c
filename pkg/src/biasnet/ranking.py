"""Degree rankings and minority representation in their top ranks."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import MAJORITY, MINORITY, Graph

log = logging.getLogger(__name__)

DEFAULT_K_MIN = 11


@dataclass(frozen=True, eq=False)
class RankingResult:
    order: np.ndarray  # node ids, rank 0 first
    degrees: np.ndarray  # degree of order[r]
    tie_seed: int

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class CcdfCurve:
    """Fraction of each group's nodes with degree strictly above ``x``.

    ``curves[group][x]`` for integer ``x`` in ``0..max_degree``.  Groups
    without any node are left out and listed in ``missing``.
    """

    curves: dict[int, np.ndarray]
    missing: tuple[int, ...] = field(default=())

    def at(self, group: int, x: float) -> float:
        curve = self.curves[group]
        if x < 0:
            return 1.0
        if x >= len(curve):
            return 0.0
        return float(curve[int(np.floor(x))])


def default_k(n: int) -> int:
    """``max(1, round(0.01 * n))``, the "top 1%" cut."""
    return max(1, int(np.floor(0.01 * n + 0.5)))


def degree_ranking(g: Graph, tie_seed: int) -> RankingResult:
    """Rank nodes by degree, highest first, breaking ties with a seeded shuffle.

    Nodes are first put in a random order drawn from ``tie_seed`` and then
    stably sorted by descending degree, so equal-degree nodes keep their
    shuffled relative order.
    """
    rng = np.random.default_rng(tie_seed)
    perm = rng.permutation(g.n)
    deg = g.degrees
    order = perm[np.argsort(-deg[perm], kind="stable")]
    return RankingResult(order=order, degrees=deg[order], tie_seed=int(tie_seed))


def _minority_prefix(r: RankingResult, labels: np.ndarray) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (len(r),):
        raise ValueError("labels do not match the ranking size")
    return np.cumsum(labels[r.order] == MINORITY)


def topk_minority_fraction(r: RankingResult, labels: np.ndarray, k: int) -> float:
    n = len(r)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    labels = np.asarray(labels)
    return float(np.count_nonzero(labels[r.order[:k]] == MINORITY)) / k


def minority_fraction_curve(
    r: RankingResult, labels: np.ndarray, k_min: int = DEFAULT_K_MIN, k_max: int | None = None
) -> list[tuple[int, float]]:
    """Top-k minority fraction for every ``k`` in ``[k_min, k_max]``.

    Very small ``k`` is dominated by tie-breaking noise, so ``k_min`` must
    exceed 10.
    """
    n = len(r)
    if k_max is None:
        k_max = n
    if not 10 < k_min <= k_max <= n:
        raise ValueError(f"need 10 < k_min <= k_max <= n, got k_min={k_min}, k_max={k_max}, n={n}")
    prefix = _minority_prefix(r, labels)
    ks = np.arange(k_min, k_max + 1)
    return [(int(k), float(c) / k) for k, c in zip(ks, prefix[ks - 1])]


def group_ccdf(g: Graph) -> CcdfCurve:
    deg = g.degrees
    max_deg = int(deg.max()) if g.n else 0
    xs = np.arange(max_deg + 1)
    curves: dict[int, np.ndarray] = {}
    missing = []
    for group in (MAJORITY, MINORITY):
        d = np.sort(deg[g.labels == group])
        if not len(d):
            missing.append(group)
            log.warning("group %d has no nodes; CCDF omitted", group)
            continue
        # count of degrees > x is len - (number <= x)
        above = len(d) - np.searchsorted(d, xs, side="right")
        curves[group] = above / len(d)
    return CcdfCurve(curves=curves, missing=tuple(missing))
