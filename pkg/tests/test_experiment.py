import io
import random

import pytest

from biasnet.experiment import (
    NO_NOISE,
    GeneratorSource,
    NoiseGrid,
    SweepConfig,
    SweepRecord,
    aggregate,
    derive_seed,
    resolve_k,
    run_sweep,
    worker_count,
)
from biasnet.io import write_records


def small_cfg(**kw):
    base = dict(
        source=GeneratorSource(n=200, m=3, f=0.1, h=(0.5,)),
        noise=(NoiseGrid("baseline", (1.0,)),),
        replicates=3,
        k=(2,),
        master_seed=7,
    )
    base.update(kw)
    return SweepConfig(**base)


def test_derive_seed():
    assert derive_seed(1, 2, 3, "noise") == derive_seed(1, 2, 3, "noise")
    assert derive_seed(1, 2, 3, "noise") != derive_seed(1, 3, 3, "noise")
    assert derive_seed(1, 2, 3, "generate") != derive_seed(1, 2, 3, "noise")
    assert 0 <= derive_seed(2**63, 0, 0, "x") < 2**64
    seeds = {derive_seed(0, r, gp, "noise") for r in range(100) for gp in range(100)}
    assert len(seeds) == 10_000


def test_identity_noise_matches_no_noise():
    recs = run_sweep(small_cfg(), workers=1)
    assert len(recs) == (1 + 1) * 3
    by_rep = {}
    for rec in recs:
        assert rec.retained_edges == rec.latent_edges
        by_rep.setdefault(rec.replicate, []).append(rec)
    for reps in by_rep.values():
        assert {r.noise_type for r in reps} == {NO_NOISE, "baseline"}
    # latent graphs differ across replicates but are shared across grid points
    latent = {r.replicate: r.latent_edges for r in recs}
    assert len(latent) == 3


def test_record_cardinality():
    grids = tuple(NoiseGrid(t, (0.1, 0.3, 0.5, 0.7, 0.9)) for t in ("intra", "inter", "majority", "minority"))
    recs = run_sweep(small_cfg(noise=grids, replicates=10, k=(2,)), workers=1)
    assert len(recs) == 4 * 5 * 10 + 10


def test_cardinality_multiple_k_and_h():
    cfg = small_cfg(
        source=GeneratorSource(n=150, m=2, f=0.2, h=(0.2, 0.8)),
        noise=(NoiseGrid("jaccard", (0.0, 1.0)), NoiseGrid("baseline", (0.5,))),
        replicates=2,
        k=(1, 5, "10%"),
    )
    recs = run_sweep(cfg, workers=1)
    assert len(recs) == 2 * (3 + 1) * 2 * 3
    assert {r.k for r in recs} == {1, 5, 15}
    assert all(r.retained_edges <= r.latent_edges for r in recs)


def _csv(recs):
    buf = io.StringIO()
    write_records(buf, recs)
    return buf.getvalue()


def test_rerun_identical():
    cfg = small_cfg(noise=(NoiseGrid("inter", (0.2, 0.6)), NoiseGrid("centrality", (1.0,))))
    assert _csv(run_sweep(cfg, workers=1)) == _csv(run_sweep(cfg, workers=1))


def test_parallel_matches_serial():
    cfg = small_cfg(noise=(NoiseGrid("intra", (0.3,)), NoiseGrid("inverse_jaccard", (2.0,))), replicates=4)
    assert _csv(run_sweep(cfg, workers=1)) == _csv(run_sweep(cfg, workers=3))


def test_config_validation():
    with pytest.raises(ValueError):
        small_cfg(replicates=0)
    with pytest.raises(ValueError):
        NoiseGrid("inter", ())
    with pytest.raises(ValueError):
        NoiseGrid("inter", (1.5,))
    with pytest.raises(ValueError):
        small_cfg(source=GeneratorSource(n=3, m=3, f=0.1, h=(0.5,)))


def test_resolve_k():
    assert resolve_k("1%", 2000) == 20
    assert resolve_k("1%", 10000) == 100
    assert resolve_k("1%", 30) == 1
    assert resolve_k(5, 10) == 5
    with pytest.raises(ValueError):
        resolve_k(11, 10)
    with pytest.raises(ValueError):
        resolve_k("top", 10)


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("BIASNET_THREADS", "3")
    assert worker_count() == 3
    assert worker_count(2) == 2


def _rec(value, replicate, noise="inter", pv=0.5):
    return SweepRecord(noise, "rho", pv, "0.5", replicate, replicate, 2, 100, 90, value)


def test_aggregate_single():
    (agg,) = aggregate([_rec(0.3, 0)], ["topk_minority_fraction"])
    assert agg.mean == agg.min == agg.max == 0.3
    assert agg.std == 0.0


def test_aggregate_values():
    (agg,) = aggregate([_rec(0.2, 0), _rec(0.4, 1)], ["topk_minority_fraction"])
    assert agg.mean == pytest.approx(0.3)
    assert (agg.min, agg.max) == (0.2, 0.4)
    assert agg.std == pytest.approx(0.1414213562373095)
    assert agg.min <= agg.mean <= agg.max


def test_aggregate_permutation_invariant():
    recs = [_rec(v / 10, i, pv=pv) for i, v in enumerate(range(10)) for pv in (0.1, 0.9)]
    shuffled = recs[:]
    random.Random(3).shuffle(shuffled)
    assert aggregate(recs) == aggregate(shuffled)


def test_aggregate_empty():
    with pytest.raises(ValueError):
        aggregate([])
