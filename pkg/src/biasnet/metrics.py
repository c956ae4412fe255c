"""Summary statistics of the label partition: modularity and assortativity."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, group_stats

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartitionReport:
    n: int
    n_edges: int
    minority_fraction: float
    modularity: float
    assortativity: float
    assortativity_degenerate: bool = False

    def format(self, digits: int = 3) -> str:
        return "\n".join(
            [
                f"nodes\t{self.n}",
                f"edges\t{self.n_edges}",
                f"f\t{self.minority_fraction:.{digits}f}",
                f"Q_mod\t{self.modularity:.{digits}f}",
                f"A\t{self.assortativity:.{digits}f}"
                + ("\t(degenerate: one group holds all endpoints)" if self.assortativity_degenerate else ""),
            ]
        )


def mixing_matrix(g: Graph) -> np.ndarray:
    """Symmetric 2x2 fraction-of-endpoints matrix ``e[a, b]``.

    Each undirected edge contributes both orientations, so the matrix sums to
    one and its row sums are the endpoint shares per group.
    """
    if g.n_edges == 0:
        raise GraphError("mixing matrix needs at least one edge")
    la = g.labels[g.edges[:, 0]]
    lb = g.labels[g.edges[:, 1]]
    e = np.zeros((2, 2))
    np.add.at(e, (la, lb), 1.0)
    np.add.at(e, (lb, la), 1.0)
    return e / e.sum()


def label_modularity(g: Graph) -> float:
    """Modularity of the fixed label partition (no optimisation)."""
    e = mixing_matrix(g)
    a = e.sum(axis=1)
    return float(np.trace(e) - np.sum(a * a))


def _assortativity(g: Graph) -> tuple[float, bool]:
    e = mixing_matrix(g)
    a = e.sum(axis=1)
    b = e.sum(axis=0)
    ab = float(np.sum(a * b))
    denom = 1.0 - ab
    if denom <= 0.0:
        return 0.0, True
    return (float(np.trace(e)) - ab) / denom, False


def attribute_assortativity(g: Graph) -> float:
    """Newman's categorical assortativity of the node labels.

    Returns 0 when all edge endpoints carry the same label, where the
    coefficient is undefined.
    """
    r, degenerate = _assortativity(g)
    if degenerate:
        log.warning("assortativity undefined: all edge endpoints in one group; reporting 0")
    return r


def edge_fraction_retained(latent: Graph, observed: Graph) -> float:
    if latent.n_edges == 0:
        raise GraphError("latent graph has no edges")
    if observed.n_edges:
        extra = observed.edge_set() - latent.edge_set()
        if extra:
            raise GraphError(f"observed edge {min(extra)} is not in the latent graph")
    return observed.n_edges / latent.n_edges


def partition_report(g: Graph) -> PartitionReport:
    stats = group_stats(g)
    r, degenerate = _assortativity(g)
    return PartitionReport(
        n=g.n,
        n_edges=g.n_edges,
        minority_fraction=stats.minority_fraction,
        modularity=label_modularity(g),
        assortativity=r,
        assortativity_degenerate=degenerate,
    )
