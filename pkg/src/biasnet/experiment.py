"""Seeded Monte Carlo sweeps over noise grids.

For every replicate a latent graph is generated (or the dataset graph is
reused), every noise grid point perturbs that same latent graph, and the
observed graph is ranked by degree.  Every random stream is derived from the
master seed and the work item's coordinates, so results do not depend on the
order in which workers finish.
"""

from __future__ import annotations

import hashlib
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from itertools import groupby
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph
from .netgen import GenParams, generate
from .noise import NoiseSpec, apply_noise, make_spec, param_name_for, retain_probs
from .ranking import degree_ranking, topk_minority_fraction

log = logging.getLogger(__name__)

NO_NOISE = "no_noise"
DEFAULT_RHO_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))
DEFAULT_ALPHA_GRID = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)
THREADS_ENV = "BIASNET_THREADS"


def derive_seed(master: int, replicate: int, grid_point: int, stage: str) -> int:
    """Mix the inputs into a 64-bit seed with BLAKE2b.

    Pure function of its arguments, so seeds never depend on scheduling.
    """
    msg = f"{int(master)}|{int(replicate)}|{int(grid_point)}|{stage}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class NoiseGrid:
    type: str
    values: tuple[float, ...]
    other: float | None = None

    def __post_init__(self) -> None:
        if not self.values:
            raise ValueError(f"noise grid {self.type!r} has no values")
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        # builds (and so validates) every spec up front
        self.specs()

    @property
    def param_name(self) -> str:
        return param_name_for(self.type)

    def specs(self) -> list[NoiseSpec]:
        return [make_spec(self.type, v, self.other) for v in self.values]


@dataclass(frozen=True)
class GeneratorSource:
    n: int
    m: int
    f: float
    h: tuple[float, ...]
    seed: int | None = None

    def params(self, h: float, seed: int) -> GenParams:
        return GenParams(n=self.n, m=self.m, f=self.f, h=h, seed=seed)


@dataclass(frozen=True)
class DatasetSource:
    edges: Path
    labels: Path
    name: str
    minority: str | None = None


@dataclass(frozen=True)
class SweepConfig:
    source: GeneratorSource | DatasetSource
    noise: tuple[NoiseGrid, ...] = ()
    replicates: int = 10
    k: tuple[int | str, ...] = ()
    master_seed: int = 0
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if isinstance(self.source, GeneratorSource):
            if not self.source.h:
                raise ValueError("generator source needs at least one h value")
            for h in self.source.h:
                # validates n, m, f, h together before any work starts
                self.source.params(h, 0)

    def grid_points(self) -> list[NoiseSpec | None]:
        """Index 0 is the no-noise point; the rest follow the grid order."""
        points: list[NoiseSpec | None] = [None]
        for grid in self.noise:
            points.extend(grid.specs())
        return points


@dataclass(frozen=True)
class SweepRecord:
    noise_type: str
    param_name: str
    param_value: float | None
    h_or_dataset: str
    replicate: int
    seed: int
    k: int
    latent_edges: int
    retained_edges: int
    topk_minority_fraction: float

    def to_row(self) -> list[str]:
        return [
            self.noise_type,
            self.param_name,
            "" if self.param_value is None else repr(float(self.param_value)),
            self.h_or_dataset,
            str(self.replicate),
            str(self.seed),
            str(self.k),
            str(self.latent_edges),
            str(self.retained_edges),
            repr(float(self.topk_minority_fraction)),
        ]

    @classmethod
    def from_row(cls, row: dict[str, str]) -> SweepRecord:
        return cls(
            noise_type=row["noise_type"],
            param_name=row["param_name"],
            param_value=float(row["param_value"]) if row["param_value"] else None,
            h_or_dataset=row["h_or_dataset"],
            replicate=int(row["replicate"]),
            seed=int(row["seed"]),
            k=int(row["k"]),
            latent_edges=int(row["latent_edges"]),
            retained_edges=int(row["retained_edges"]),
            topk_minority_fraction=float(row["topk_minority_fraction"]),
        )


CSV_COLUMNS = tuple(f.name for f in fields(SweepRecord))
METRICS = ("topk_minority_fraction", "retained_edges")


def resolve_k(spec: int | str, n: int) -> int:
    """Turn an absolute ``k`` or a percentage string like ``"1%"`` into a count."""
    if isinstance(spec, str):
        if not spec.endswith("%"):
            raise ValueError(f"k must be an integer or a percentage, got {spec!r}")
        share = float(spec[:-1]) / 100.0
        k = max(1, int(math.floor(share * n + 0.5)))
    else:
        k = int(spec)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for n={n}")
    return k


def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class _Item:
    source_index: int
    source_label: str
    replicate: int
    grid_point: int
    spec: NoiseSpec | None
    seed: int
    ks: tuple[int, ...]


def evaluate(latent: Graph, spec: NoiseSpec | None, item_seed: int, ks: Sequence[int]) -> tuple[Graph, list[float]]:
    """Perturb ``latent`` under ``spec`` and return the top-k minority fractions."""
    if spec is None:
        observed = latent
    else:
        probs = retain_probs(latent, spec)
        observed = apply_noise(latent, probs, derive_seed(item_seed, 0, 0, "noise"))
    ranking = degree_ranking(observed, derive_seed(item_seed, 0, 0, "rank"))
    return observed, [topk_minority_fraction(ranking, observed.labels, k) for k in ks]


def _run_item(latent: Graph, item: _Item) -> list[tuple[tuple[int, ...], SweepRecord]]:
    observed, fracs = evaluate(latent, item.spec, item.seed, item.ks)
    spec = item.spec
    return [
        ((item.source_index, item.grid_point, item.replicate, ki), SweepRecord(
            noise_type=NO_NOISE if spec is None else spec.type_name,
            param_name="" if spec is None else spec.param_name,
            param_value=None if spec is None else spec.param_value,
            h_or_dataset=item.source_label,
            replicate=item.replicate,
            seed=item.seed,
            k=k,
            latent_edges=latent.n_edges,
            retained_edges=observed.n_edges,
            topk_minority_fraction=frac,
        ))
        for ki, (k, frac) in enumerate(zip(item.ks, fracs))
    ]


def _run_chunk(args: tuple[Graph, list[_Item]]) -> list[tuple[tuple[int, ...], SweepRecord]]:
    latent, items = args
    out = []
    for item in items:
        out.extend(_run_item(latent, item))
    return out


def _format_h(h: float) -> str:
    return repr(float(h))


def _latent_graphs(cfg: SweepConfig, pool: ProcessPoolExecutor | None) -> list[tuple[int, str, int, Graph]]:
    """(source index, source label, replicate, latent graph) in canonical order."""
    src = cfg.source
    if isinstance(src, DatasetSource):
        from .io import load_dataset

        g = load_dataset(src.edges, src.labels, minority=src.minority).graph
        return [(0, src.name, r, g) for r in range(cfg.replicates)]

    gen_master = cfg.master_seed if src.seed is None else src.seed
    jobs = []
    for hi, h in enumerate(src.h):
        for r in range(cfg.replicates):
            jobs.append((hi, _format_h(h), r, src.params(h, derive_seed(gen_master, r, hi, "generate"))))
    params = [j[3] for j in jobs]
    graphs = list(pool.map(generate, params)) if pool else [generate(p) for p in params]
    return [(hi, label, r, g) for (hi, label, r, _), g in zip(jobs, graphs)]


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list[SweepRecord]:
    """Run every (source, replicate, grid point) and return records in canonical order.

    Records are ordered by source (h value or dataset), then grid point
    (no-noise first, then the noise grids in config order), then replicate,
    then ``k`` in config order.  Output is identical for any worker count.
    """
    workers = worker_count(workers)
    points = cfg.grid_points()
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        latents = _latent_graphs(cfg, pool)
        chunks = []
        for si, label, r, g in latents:
            ks = tuple(resolve_k(k, g.n) for k in (cfg.k or ("1%",)))
            items = [
                _Item(si, label, r, gp, spec, derive_seed(cfg.master_seed, r, gp, f"item/{si}"), ks)
                for gp, spec in enumerate(points)
            ]
            chunks.append((g, items))
        log.info("sweep: %d latent graphs x %d grid points, %d workers", len(latents), len(points), workers)
        results = list(pool.map(_run_chunk, chunks)) if pool else [_run_chunk(c) for c in chunks]
    finally:
        if pool:
            pool.shutdown()

    keyed = [kr for chunk in results for kr in chunk]
    # pool.map already preserves order; sorting makes the contract explicit
    keyed.sort(key=lambda kr: kr[0])
    return [rec for _, rec in keyed]


@dataclass(frozen=True)
class Aggregate:
    noise_type: str
    param_name: str
    param_value: float | None
    h_or_dataset: str
    k: int
    metric: str
    count: int
    mean: float
    min: float
    max: float
    std: float


AGGREGATE_COLUMNS = tuple(f.name for f in fields(Aggregate))


def _group_key(rec: SweepRecord):
    pv = -math.inf if rec.param_value is None else rec.param_value
    return (rec.h_or_dataset, rec.noise_type, rec.param_name, pv, rec.k)


def aggregate(records: Iterable[SweepRecord], metrics: Sequence[str] = METRICS) -> list[Aggregate]:
    """Mean, envelope and sample standard deviation per grid point and metric.

    Groups are keyed by (source, noise type, parameter, k) and returned in
    sorted key order, so the result does not depend on record order.
    """
    ordered = sorted(records, key=lambda r: (_group_key(r), r.replicate, r.seed))
    if not ordered:
        raise ValueError("no records to aggregate")
    out = []
    for _, grp in groupby(ordered, key=_group_key):
        grp = list(grp)
        head = grp[0]
        for metric in metrics:
            vals = np.array([getattr(r, metric) for r in grp], dtype=float)
            out.append(
                Aggregate(
                    noise_type=head.noise_type,
                    param_name=head.param_name,
                    param_value=head.param_value,
                    h_or_dataset=head.h_or_dataset,
                    k=head.k,
                    metric=metric,
                    count=len(vals),
                    mean=float(np.mean(vals)),
                    min=float(vals.min()),
                    max=float(vals.max()),
                    std=float(np.std(vals, ddof=1)) if len(vals) > 1 else 0.0,
                )
            )
    return out
