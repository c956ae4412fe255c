"""Edge-omission noise models.

Every model assigns each latent edge a retain probability; an observed graph
keeps each edge independently with that probability.  Four families exist:

* ``Baseline``   constant probability ``p``
* ``Attribute``  lookup ``omega[l_i, l_j]`` by endpoint labels
  (``OmegaPreset`` builds the intra/inter/majority/minority matrices)
* ``Jaccard``    ``J**alpha`` with ``J`` the Jaccard similarity of the
  endpoints' neighbourhoods, each node counted in its own neighbourhood
* ``Centrality`` ``D**alpha`` with ``D`` the min-max normalised
  ``log(d_i) + log(d_j)`` over all edges

Jaccard and centrality accept ``inverse=True`` which swaps the base for
``1 - base``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Any, Iterator, Mapping, Union

import numpy as np

from .graph import Graph, GraphError

PRESET_KINDS = ("intra", "inter", "majority", "minority")
STRUCTURE_KINDS = ("jaccard", "inverse_jaccard", "centrality", "inverse_centrality")
NOISE_TYPES = ("baseline",) + PRESET_KINDS + STRUCTURE_KINDS


class NoiseSpecError(ValueError):
    pass


def _check_prob(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise NoiseSpecError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class Baseline:
    p: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _check_prob("p", self.p))

    type_name = "baseline"
    param_name = "p"

    @property
    def param_value(self) -> float:
        return self.p


@dataclass(frozen=True)
class Attribute:
    """Retain probability looked up from a symmetric label-pair matrix."""

    omega: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        arr = np.asarray(self.omega, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.size == 0:
            raise NoiseSpecError("omega must be a non-empty square matrix")
        if not np.array_equal(arr, arr.T):
            raise NoiseSpecError("omega must be symmetric")
        if ((arr < 0) | (arr > 1)).any() or np.isnan(arr).any():
            raise NoiseSpecError("omega entries must lie in [0, 1]")
        object.__setattr__(self, "omega", tuple(tuple(map(float, row)) for row in arr))

    type_name = "attribute"
    param_name = "omega"

    @property
    def param_value(self) -> float:
        return float("nan")

    def matrix(self) -> np.ndarray:
        return np.asarray(self.omega)


@dataclass(frozen=True)
class OmegaPreset:
    """The four two-group matrices used in the experiments.

    ``rho`` is the retain probability of the targeted edges, ``other`` that
    of all remaining edges.  Label 0 is the majority, label 1 the minority.
    """

    kind: str
    rho: float
    other: float = 0.9

    def __post_init__(self) -> None:
        if self.kind not in PRESET_KINDS:
            raise NoiseSpecError(f"unknown preset {self.kind!r}; expected one of {PRESET_KINDS}")
        object.__setattr__(self, "rho", _check_prob("rho", self.rho))
        object.__setattr__(self, "other", _check_prob("other", self.other))

    param_name = "rho"

    @property
    def type_name(self) -> str:
        return self.kind

    @property
    def param_value(self) -> float:
        return self.rho

    def to_attribute(self) -> Attribute:
        return _preset_attribute(self.kind, self.rho, self.other)


@functools.lru_cache(maxsize=256)
def _preset_attribute(kind: str, r: float, o: float) -> Attribute:
    omega = {
        "intra": ((r, o), (o, r)),
        "inter": ((o, r), (r, o)),
        "majority": ((r, r), (r, o)),
        "minority": ((o, r), (r, r)),
    }[kind]
    return Attribute(omega)


@dataclass(frozen=True)
class Jaccard:
    alpha: float
    inverse: bool = False

    def __post_init__(self) -> None:
        if not float(self.alpha) >= 0.0:
            raise NoiseSpecError(f"alpha must be >= 0, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    param_name = "alpha"

    @property
    def type_name(self) -> str:
        return "inverse_jaccard" if self.inverse else "jaccard"

    @property
    def param_value(self) -> float:
        return self.alpha


@dataclass(frozen=True)
class Centrality:
    alpha: float
    inverse: bool = False

    def __post_init__(self) -> None:
        if not float(self.alpha) >= 0.0:
            raise NoiseSpecError(f"alpha must be >= 0, got {self.alpha}")
        object.__setattr__(self, "alpha", float(self.alpha))

    param_name = "alpha"

    @property
    def type_name(self) -> str:
        return "inverse_centrality" if self.inverse else "centrality"

    @property
    def param_value(self) -> float:
        return self.alpha


NoiseSpec = Union[Baseline, Attribute, OmegaPreset, Jaccard, Centrality]


def make_spec(noise_type: str, value: float, other: float | None = None) -> NoiseSpec:
    """Build a spec from its type name and its single free parameter."""
    if noise_type == "baseline":
        return Baseline(value)
    if noise_type in PRESET_KINDS:
        return OmegaPreset(noise_type, value) if other is None else OmegaPreset(noise_type, value, other)
    if noise_type in ("jaccard", "inverse_jaccard"):
        return Jaccard(value, inverse=noise_type.startswith("inverse"))
    if noise_type in ("centrality", "inverse_centrality"):
        return Centrality(value, inverse=noise_type.startswith("inverse"))
    raise NoiseSpecError(f"unknown noise type {noise_type!r}")


def param_name_for(noise_type: str) -> str:
    if noise_type == "baseline":
        return "p"
    if noise_type in PRESET_KINDS:
        return "rho"
    if noise_type in STRUCTURE_KINDS:
        return "alpha"
    raise NoiseSpecError(f"unknown noise type {noise_type!r}")


def spec_from_dict(d: Mapping[str, Any]) -> NoiseSpec:
    """Parse ``{"type": ..., "p"|"rho"|"alpha": x, "other": y}``."""
    try:
        noise_type = d["type"]
    except KeyError:
        raise NoiseSpecError("noise spec needs a 'type' field") from None
    name = param_name_for(noise_type)
    if name not in d:
        raise NoiseSpecError(f"noise type {noise_type!r} needs parameter {name!r}")
    other = d.get("other")
    if other is not None and noise_type not in PRESET_KINDS:
        raise NoiseSpecError(f"'other' only applies to {PRESET_KINDS}")
    return make_spec(noise_type, d[name], other)


def spec_to_dict(spec: NoiseSpec) -> dict[str, Any]:
    if isinstance(spec, Attribute):
        raise NoiseSpecError("a raw omega matrix has no serialized form")
    out: dict[str, Any] = {"type": spec.type_name, spec.param_name: spec.param_value}
    if isinstance(spec, OmegaPreset):
        out["other"] = spec.other
    return out


@dataclass(frozen=True, eq=False)
class RetainProbabilities:
    """Per-edge retain probabilities aligned with a graph's canonical edges."""

    edges: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, pair: tuple[int, int]) -> float:
        i, j = sorted(pair)
        row = np.flatnonzero((self.edges[:, 0] == i) & (self.edges[:, 1] == j))
        if not len(row):
            raise KeyError(pair)
        return float(self.values[row[0]])

    def items(self) -> Iterator[tuple[tuple[int, int], float]]:
        for (a, b), p in zip(self.edges.tolist(), self.values.tolist()):
            yield (a, b), p

    def as_dict(self) -> dict[tuple[int, int], float]:
        return dict(self.items())


def _require_edge(g: Graph, i: int, j: int) -> None:
    if not g.has_edge(i, j):
        raise GraphError(f"({i}, {j}) is not an edge")


def jaccard_similarity(g: Graph, i: int, j: int) -> float:
    """Jaccard similarity of ``{i} ∪ N(i)`` and ``{j} ∪ N(j)`` for an edge."""
    _require_edge(g, i, j)
    ni = g.neighbor_array(i)
    nj = g.neighbor_array(j)
    common = len(np.intersect1d(ni, nj, assume_unique=True))
    # i and j both sit in both augmented neighbourhoods
    inter = common + 2
    union = (len(ni) + 1) + (len(nj) + 1) - inter
    return inter / union


def common_neighbor_counts(g: Graph) -> np.ndarray:
    """Number of shared neighbours of the endpoints of every edge.

    Walks the neighbour list of the lower-degree endpoint and looks each
    neighbour up in the sorted CSR key array, so the cost is
    ``sum(min(d_u, d_v))`` lookups.
    """
    deg = g.degrees
    u, v = g.edges[:, 0], g.edges[:, 1]
    swap = deg[u] > deg[v]
    a = np.where(swap, v, u)
    b = np.where(swap, u, v)
    counts = deg[a]
    total = int(counts.sum())
    edge_idx = np.repeat(np.arange(g.n_edges), counts)
    offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    w = g._indices[np.repeat(g._indptr[a], counts) + offsets]
    n = np.int64(g.n)
    # CSR rows and the columns inside each row are sorted, so keys are too
    keys = np.repeat(np.arange(g.n, dtype=np.int64), deg) * n + g._indices
    query = b[edge_idx] * n + w
    pos = np.minimum(np.searchsorted(keys, query), len(keys) - 1)
    found = keys[pos] == query
    return np.bincount(edge_idx[found], minlength=g.n_edges)


def jaccard_all(g: Graph) -> np.ndarray:
    """Augmented-neighbourhood Jaccard similarity for every edge, canonical order."""
    if g.n_edges == 0:
        return np.zeros(0)
    u, v = g.edges[:, 0], g.edges[:, 1]
    deg = g.degrees
    # i and j both sit in both augmented neighbourhoods
    inter = common_neighbor_counts(g) + 2.0
    union = deg[u] + deg[v] + 2.0 - inter
    return inter / union


def _log_degree_sums(g: Graph) -> np.ndarray:
    deg = g.degrees.astype(np.float64)
    # log of the product keeps equal products bit-identical
    return np.log(deg[g.edges[:, 0]] * deg[g.edges[:, 1]])


def centrality_all(g: Graph) -> np.ndarray:
    """Min-max normalised log-degree sum per edge; all ones if every edge ties."""
    if g.n_edges == 0:
        return np.zeros(0)
    s = _log_degree_sums(g)
    lo, hi = s.min(), s.max()
    if hi == lo:
        return np.ones_like(s)
    return np.clip((s - lo) / (hi - lo), 0.0, 1.0)


def centrality_score(g: Graph, i: int, j: int) -> float:
    _require_edge(g, i, j)
    i, j = sorted((i, j))
    row = np.flatnonzero((g.edges[:, 0] == i) & (g.edges[:, 1] == j))[0]
    return float(centrality_all(g)[row])


def _power(base: np.ndarray, alpha: float) -> np.ndarray:
    # numpy already gives 0.0 ** 0 == 1, which keeps alpha=0 an identity
    return np.power(base, alpha)


def retain_probs(g: Graph, spec: NoiseSpec) -> RetainProbabilities:
    """Retain probability for every edge of ``g`` under ``spec``.

    Probabilities come from the latent graph alone and are returned in the
    graph's canonical edge order.
    """
    if isinstance(spec, Baseline):
        values = np.full(g.n_edges, spec.p)
    elif isinstance(spec, (Attribute, OmegaPreset)):
        attr = spec.to_attribute() if isinstance(spec, OmegaPreset) else spec
        omega = attr.matrix()
        if g.n and int(g.labels.max()) >= omega.shape[0]:
            raise NoiseSpecError(
                f"label {int(g.labels.max())} has no row in a {omega.shape[0]}x{omega.shape[0]} omega"
            )
        values = omega[g.labels[g.edges[:, 0]], g.labels[g.edges[:, 1]]]
    elif isinstance(spec, Jaccard):
        base = jaccard_all(g)
        values = _power(1.0 - base if spec.inverse else base, spec.alpha)
    elif isinstance(spec, Centrality):
        base = centrality_all(g)
        values = _power(1.0 - base if spec.inverse else base, spec.alpha)
    else:
        raise NoiseSpecError(f"unsupported noise spec {spec!r}")
    values = np.ascontiguousarray(values, dtype=np.float64)
    values.setflags(write=False)
    return RetainProbabilities(g.edges, values)


def apply_noise(g: Graph, probs: RetainProbabilities, seed: int | np.random.Generator) -> Graph:
    """Sample an observed graph: keep edge ``e`` with probability ``probs[e]``.

    One uniform draw per edge is consumed in canonical edge order, so the
    result depends only on the graph, the probabilities and the seed.
    """
    if probs.edges is not g.edges and not np.array_equal(probs.edges, g.edges):
        raise GraphError("retain probabilities do not match the graph's edge set")
    rng = np.random.default_rng(seed)
    keep = rng.random(g.n_edges) < probs.values
    return g.subgraph_edges(keep)


def expected_retained(probs: RetainProbabilities) -> float:
    return float(math.fsum(probs.values.tolist()))


def retained_variance(probs: RetainProbabilities) -> float:
    """Variance of the retained-edge count (sum of independent Bernoullis)."""
    v = probs.values
    return float(np.sum(v * (1.0 - v)))
