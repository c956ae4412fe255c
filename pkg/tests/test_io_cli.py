import csv
import json
import re

import numpy as np
import pytest

from biasnet.cli import main
from biasnet.experiment import CSV_COLUMNS, SweepRecord
from biasnet.graph import from_edges
from biasnet.io import (
    ConfigError,
    DataError,
    load_config,
    load_dataset,
    load_records,
    parse_config,
    save_records,
    write_edge_list,
    write_labels,
)
from biasnet.netgen import GenParams, generate
from biasnet.plot import plot_sweep


def _write(path, text):
    path.write_text(text)
    return path


def test_generate_write_read_round_trip(tmp_path):
    g = generate(GenParams(n=150, m=2, f=0.2, h=0.3, seed=4))
    write_edge_list(tmp_path / "g.edges", g)
    write_labels(tmp_path / "g.labels", g)
    ds = load_dataset(tmp_path / "g.edges", tmp_path / "g.labels")
    assert ds.graph == g
    assert not ds.remapped


def test_string_ids_and_labels(tmp_path):
    e = _write(tmp_path / "e.txt", "# comment\nalice bob\nbob\tcarol\ncarol carol\nbob alice\n")
    lab = _write(tmp_path / "l.txt", "alice f\nbob m\ncarol m\ndave f\n")
    ds = load_dataset(e, lab)
    assert ds.node_ids == ["alice", "bob", "carol", "dave"]
    assert ds.report.self_loops == 1
    assert ds.report.duplicates == 1
    assert ds.report.label_only_nodes == 1
    # first-seen label "f" is the majority
    assert ds.graph.labels.tolist() == [0, 1, 1, 0]
    assert ds.graph.n_edges == 2
    flipped = load_dataset(e, lab, minority="f")
    assert flipped.graph.labels.tolist() == [1, 0, 0, 1]
    assert ds.remapped


@pytest.mark.parametrize(
    "edges, labels, match",
    [
        ("0 1\n", "0 0\n", "no label"),
        ("0 1\n", "0 a\n1 b\n2 c\n", "two distinct"),
        ("0 1\n", "0 0\n1 1\n0 1\n", "conflicting"),
        ("0\n", "0 0\n", "two node ids"),
        ("0 1\n", "0 0 x\n1 1\n", "node_id label"),
    ],
)
def test_bad_inputs(tmp_path, edges, labels, match):
    e = _write(tmp_path / "e", edges)
    lab = _write(tmp_path / "l", labels)
    with pytest.raises(DataError, match=match):
        load_dataset(e, lab)


def test_minority_override_must_exist(tmp_path):
    e = _write(tmp_path / "e", "0 1\n")
    lab = _write(tmp_path / "l", "0 a\n1 b\n")
    with pytest.raises(DataError):
        load_dataset(e, lab, minority="z")


def test_outputs_end_with_newline(tmp_path):
    g = from_edges(3, [], [0, 1, 0])
    write_edge_list(tmp_path / "x.edges", g)
    assert (tmp_path / "x.edges").read_text().endswith("\n")
    save_records(tmp_path / "r.csv", [SweepRecord("inter", "rho", 0.3, "0.5", 0, 1, 2, 10, 5, 0.5)])
    text = (tmp_path / "r.csv").read_text()
    assert text.endswith("\n")
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert text.splitlines()[1] == "inter,rho,0.3,0.5,0,1,2,10,5,0.5"


# -- CLI ------------------------------------------------------------------------

def _gen(tmp_path, *extra, name="g"):
    args = ["generate", "--n", "100", "--m", "2", "--f", "0.1", "--h", "0.5", "--seed", "7"]
    return main(args + ["--out-prefix", str(tmp_path / name), *extra])


def test_cli_generate(tmp_path, capsys):
    assert _gen(tmp_path) == 0
    assert _gen(tmp_path, name="h") == 0
    a = (tmp_path / "g.edges").read_bytes()
    assert a == (tmp_path / "h.edges").read_bytes()
    assert (tmp_path / "g.labels").read_bytes() == (tmp_path / "h.labels").read_bytes()
    ds = load_dataset(tmp_path / "g.edges", tmp_path / "g.labels")
    assert ds.graph.n == 100
    assert ds.graph == generate(GenParams(n=100, m=2, f=0.1, h=0.5, seed=7))


def test_cli_generate_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["generate", "--n", "100", "--m", "2", "--f", "1.5", "--h", "0.5", "--out-prefix", str(tmp_path / "g")])
    assert exc.value.code == 1
    assert main(["generate", "--n", "2", "--m", "2", "--f", "0.1", "--h", "0.5", "--out-prefix", str(tmp_path / "g")]) == 1


def _io_args(tmp_path, name="g"):
    return ["--edges", str(tmp_path / f"{name}.edges"), "--labels", str(tmp_path / f"{name}.labels")]


def test_cli_perturb_identity(tmp_path, capsys):
    _gen(tmp_path)
    out = tmp_path / "obs.edges"
    rc = main(["perturb", *_io_args(tmp_path), "--noise", "baseline", "--p", "1.0", "--seed", "3", "--out", str(out)])
    assert rc == 0
    assert out.read_text() == (tmp_path / "g.edges").read_text()
    stdout = capsys.readouterr().out
    assert "latent_edges\t197" in stdout
    assert "retained_edges\t197" in stdout


def test_cli_perturb_inter_rate(tmp_path, capsys):
    n = 400
    # complete bipartite between 20 minority and 20 majority nodes plus intra edges
    edges = [(i, j) for i in range(20) for j in range(20, 40)] + [(i, i + 1) for i in range(40, n - 1)]
    labels = [1] * 20 + [0] * (n - 20)
    g = from_edges(n, edges, labels)
    write_edge_list(tmp_path / "b.edges", g)
    write_labels(tmp_path / "b.labels", g)
    kept = 0
    seeds = 30
    for s in range(seeds):
        out = tmp_path / f"o{s}.edges"
        assert main(["perturb", *_io_args(tmp_path, "b"), "--noise", "inter", "--rho", "0.3", "--seed", str(s), "--out", str(out)]) == 0
        obs = load_dataset(out, tmp_path / "b.labels").graph
        kept += sum(1 for a, b in obs.edge_set() if labels[a] != labels[b])
    total = 400 * seeds
    rate = kept / total
    assert abs(rate - 0.3) < 3 * np.sqrt(0.3 * 0.7 / total)


@pytest.mark.parametrize(
    "flags, code",
    [
        (["--noise", "jaccard"], 1),
        (["--noise", "inter", "--p", "0.3"], 1),
        (["--noise", "laplace", "--alpha", "1"], 1),
        (["--noise", "inter", "--rho", "1.4"], 1),
    ],
)
def test_cli_perturb_usage_errors(tmp_path, flags, code):
    _gen(tmp_path)
    out = tmp_path / "o.edges"
    try:
        rc = main(["perturb", *_io_args(tmp_path), *flags, "--out", str(out)])
    except SystemExit as exc:
        rc = exc.code
    assert rc == code


def test_cli_data_error(tmp_path):
    rc = main(["stats", "--edges", str(tmp_path / "missing"), "--labels", str(tmp_path / "missing")])
    assert rc == 2


def test_cli_rank(tmp_path, capsys):
    g = from_edges(5, [(0, 1), (0, 2), (0, 3), (1, 2)], [1, 0, 0, 0, 0])
    write_edge_list(tmp_path / "r.edges", g)
    write_labels(tmp_path / "r.labels", g)
    assert main(["rank", *_io_args(tmp_path, "r"), "--k", "1"]) == 0
    assert "topk_minority_fraction\t1" in capsys.readouterr().out
    assert main(["rank", *_io_args(tmp_path, "r"), "--k", "9"]) == 1


def test_cli_rank_curves(tmp_path, capsys):
    _gen(tmp_path)
    curve, ccdf = tmp_path / "curve.csv", tmp_path / "ccdf.csv"
    assert main(["rank", *_io_args(tmp_path), "--seed", "2", "--curve", str(curve), "--ccdf", str(ccdf)]) == 0
    rows = list(csv.reader(curve.open()))
    assert rows[0] == ["k", "minority_fraction"]
    assert rows[1][0] == "11" and rows[-1][0] == "100"
    assert float(rows[-1][1]) == pytest.approx(0.1)
    crow = list(csv.reader(ccdf.open()))
    assert crow[0] == ["x", "majority", "minority"]
    assert float(crow[-1][1]) == 0.0


def test_cli_stats(tmp_path, capsys):
    g = from_edges(4, [(0, 2), (0, 3), (1, 2), (1, 3)], [0, 0, 1, 1])
    write_edge_list(tmp_path / "k.edges", g)
    write_labels(tmp_path / "k.labels", g)
    assert main(["stats", *_io_args(tmp_path, "k")]) == 0
    out = capsys.readouterr().out
    assert "f\t0.500" in out
    assert "Q_mod\t-0.500" in out
    assert "A\t-1.000" in out


# -- config, sweep, plot ----------------------------------------------------------

def _config(tmp_path, **over):
    doc = {
        "graph": {"generate": {"n": 120, "m": 2, "f": 0.2, "h": 0.5}},
        "noise": [{"type": "inter", "values": [0.3, 0.9]}, {"type": "jaccard", "values": [0, 2]}],
        "replicates": 2,
        "k": [3],
        "master_seed": 1,
        "out": "sweep.csv",
    }
    doc.update(over)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return path


def test_config_parse(tmp_path):
    cfg = load_config(_config(tmp_path))
    assert cfg.source.h == (0.5,)
    assert cfg.out == tmp_path / "sweep.csv"
    assert [g.type for g in cfg.noise] == ["inter", "jaccard"]


@pytest.mark.parametrize(
    "over",
    [
        {"replicates": 0},
        {"graph": {}},
        {"graph": {"generate": {"n": 10, "m": 2, "f": 0.1, "h": 0.5}, "dataset": {"edges": "e", "labels": "l"}}},
        {"noise": [{"type": "inter", "values": []}]},
        {"noise": [{"type": "sideways", "values": [0.1]}]},
        {"noise": [{"type": "inter", "values": [1.5]}]},
        {"k": ["top"]},
        {"bogus": 1},
    ],
)
def test_config_rejects(tmp_path, over):
    with pytest.raises(ConfigError):
        load_config(_config(tmp_path, **over))


def test_dataset_config(tmp_path):
    g = generate(GenParams(n=80, m=2, f=0.3, h=0.2, seed=1))
    write_edge_list(tmp_path / "d.edges", g)
    write_labels(tmp_path / "d.labels", g)
    cfg = parse_config(
        {
            "graph": {"dataset": {"edges": "d.edges", "labels": "d.labels"}},
            "noise": [{"type": "minority", "values": [0.5]}],
            "replicates": 3,
            "master_seed": 0,
        },
        tmp_path,
    )
    assert cfg.source.name == "d"
    from biasnet.experiment import run_sweep

    recs = run_sweep(cfg, workers=1)
    assert len(recs) == 2 * 3
    assert {r.h_or_dataset for r in recs} == {"d"}
    assert all(r.latent_edges == g.n_edges and r.k == 1 for r in recs)


def test_cli_sweep_and_plot(tmp_path, capsys):
    cfg = _config(tmp_path)
    agg = tmp_path / "agg.csv"
    assert main(["sweep", "--config", str(cfg), "--threads", "1", "--aggregate", str(agg)]) == 0
    first = (tmp_path / "sweep.csv").read_bytes()
    assert main(["sweep", "--config", str(cfg), "--threads", "2"]) == 0
    assert (tmp_path / "sweep.csv").read_bytes() == first
    recs = load_records(tmp_path / "sweep.csv")
    assert len(recs) == (4 + 1) * 2
    assert agg.read_text().startswith("noise_type,param_name,param_value,h_or_dataset,k,metric")

    assert main(["plot", "--csv", str(tmp_path / "sweep.csv"), "--out-dir", str(tmp_path / "figs")]) == 0
    svgs = sorted(p.name for p in (tmp_path / "figs").iterdir())
    assert svgs == [
        "inter__retained_edges.svg",
        "inter__topk_minority_fraction.svg",
        "jaccard__retained_edges.svg",
        "jaccard__topk_minority_fraction.svg",
    ]
    for name in svgs:
        text = (tmp_path / "figs" / name).read_text()
        assert text.count("<polyline") == 1
        assert text.count("<polygon") == 1
        assert text.endswith("</svg>\n")


def test_plot_one_polyline_per_series(tmp_path):
    recs = []
    for h in ("0.1", "0.9"):
        for pv in (0.2, 0.8):
            for rep in range(2):
                recs.append(SweepRecord("intra", "rho", pv, h, rep, rep, 5, 100, 60, 0.1 * rep))
        recs.append(SweepRecord("no_noise", "", None, h, 0, 0, 5, 100, 100, 0.1))
    (path, _) = plot_sweep(recs, tmp_path)
    text = path.read_text()
    assert len(re.findall(r"<polyline", text)) == 2
    assert 'stroke-dasharray' in text


def test_plot_rejects_bad_csv(tmp_path):
    bad = _write(tmp_path / "bad.csv", "a,b\n1,2\n")
    assert main(["plot", "--csv", str(bad), "--out-dir", str(tmp_path / "o")]) == 2
    empty = _write(tmp_path / "empty.csv", "")
    assert main(["plot", "--csv", str(empty), "--out-dir", str(tmp_path / "o")]) == 2
    header_only = _write(tmp_path / "h.csv", ",".join(CSV_COLUMNS) + "\n")
    assert main(["plot", "--csv", str(header_only), "--out-dir", str(tmp_path / "o")]) == 2
