"""Reading and writing edge lists, label files, sweep configs and sweep CSVs."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO

import jsonschema
import numpy as np

from .experiment import (
    AGGREGATE_COLUMNS,
    CSV_COLUMNS,
    Aggregate,
    DatasetSource,
    GeneratorSource,
    NoiseGrid,
    SweepConfig,
    SweepRecord,
)
from .graph import Graph, from_edges
from .noise import NOISE_TYPES

log = logging.getLogger(__name__)


class DataError(ValueError):
    """Malformed or inconsistent input data."""


@dataclass(frozen=True)
class IngestReport:
    raw_pairs: int
    self_loops: int
    duplicates: int
    label_only_nodes: int

    def summary(self) -> str:
        return (
            f"read {self.raw_pairs} pairs; dropped {self.self_loops} self-loops and "
            f"{self.duplicates} duplicate pairs; {self.label_only_nodes} labelled nodes without edges"
        )


@dataclass(frozen=True)
class Dataset:
    graph: Graph
    node_ids: list[str]  # node_ids[internal id] = id in the input files
    report: IngestReport

    @property
    def remapped(self) -> bool:
        return self.node_ids != [str(i) for i in range(len(self.node_ids))]


def _data_lines(path: Path) -> Iterable[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line.split()


def read_edge_pairs(path: str | Path) -> list[tuple[str, str]]:
    """``u v`` pairs (tab or space separated) with ids kept as strings."""
    pairs = []
    for lineno, parts in _data_lines(Path(path)):
        if len(parts) < 2:
            raise DataError(f"{path}:{lineno}: expected two node ids, got {' '.join(parts)!r}")
        pairs.append((parts[0], parts[1]))
    return pairs


def read_label_pairs(path: str | Path) -> list[tuple[str, str]]:
    rows = []
    for lineno, parts in _data_lines(Path(path)):
        if len(parts) != 2:
            raise DataError(f"{path}:{lineno}: expected 'node_id label', got {' '.join(parts)!r}")
        rows.append((parts[0], parts[1]))
    return rows


def _label_codes(raw: Sequence[str], minority: str | None) -> dict[str, int]:
    distinct = list(dict.fromkeys(raw))
    if len(distinct) > 2:
        raise DataError(f"expected at most two distinct labels, found {len(distinct)}: {distinct[:5]}")
    if minority is not None:
        if minority not in distinct and distinct:
            raise DataError(f"minority label {minority!r} does not occur in the label file")
        return {lab: int(lab == minority) for lab in distinct}
    if set(distinct) <= {"0", "1"}:
        return {lab: int(lab) for lab in distinct}
    # first-seen label is the majority
    return {lab: i for i, lab in enumerate(distinct)}


def _order_ids(ids: Iterable[str]) -> list[str]:
    unique = list(dict.fromkeys(ids))
    try:
        return sorted(unique, key=int)
    except ValueError:
        return unique


def load_dataset(edges_path: str | Path, labels_path: str | Path, minority: str | None = None) -> Dataset:
    """Read an edge list and a label file into a dense-id :class:`Graph`.

    Self-loops and repeated pairs are dropped and counted.  All-integer ids
    are ordered numerically, other ids by first appearance; labelled nodes
    that never occur in the edge list become isolated nodes.
    """
    pairs = read_edge_pairs(edges_path)
    label_rows = read_label_pairs(labels_path)

    labels_by_id: dict[str, str] = {}
    for node, lab in label_rows:
        if labels_by_id.setdefault(node, lab) != lab:
            raise DataError(f"node {node!r} has conflicting labels {labels_by_id[node]!r} and {lab!r}")
    codes = _label_codes(list(labels_by_id.values()), minority)

    edge_ids = [x for pair in pairs for x in pair]
    node_ids = _order_ids(edge_ids + list(labels_by_id))
    index = {node: i for i, node in enumerate(node_ids)}
    unlabeled = [x for x in dict.fromkeys(edge_ids) if x not in labels_by_id]
    if unlabeled:
        raise DataError(f"{len(unlabeled)} nodes have no label, e.g. {unlabeled[0]!r}")

    seen: set[tuple[int, int]] = set()
    clean = []
    loops = dups = 0
    for u, v in pairs:
        a, b = index[u], index[v]
        if a == b:
            loops += 1
            continue
        key = (a, b) if a < b else (b, a)
        if key in seen:
            dups += 1
            continue
        seen.add(key)
        clean.append(key)

    labels = [codes[labels_by_id[node]] for node in node_ids]
    graph = from_edges(len(node_ids), clean, labels)
    edge_nodes = set(edge_ids)
    report = IngestReport(
        raw_pairs=len(pairs),
        self_loops=loops,
        duplicates=dups,
        label_only_nodes=sum(1 for node in labels_by_id if node not in edge_nodes),
    )
    if loops or dups:
        log.warning("%s: %s", edges_path, report.summary())
    return Dataset(graph, node_ids, report)


def _ids(g: Graph, node_ids: Sequence[str] | None) -> Sequence[str]:
    return node_ids if node_ids is not None else [str(i) for i in range(g.n)]


def write_edge_list(path: str | Path, g: Graph, node_ids: Sequence[str] | None = None) -> None:
    ids = _ids(g, node_ids)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# {g.n} nodes, {g.n_edges} edges\n")
        for a, b in g.edges.tolist():
            fh.write(f"{ids[a]}\t{ids[b]}\n")


def write_labels(path: str | Path, g: Graph, node_ids: Sequence[str] | None = None) -> None:
    ids = _ids(g, node_ids)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# node\tlabel (1 = minority)\n")
        for i, lab in enumerate(g.labels.tolist()):
            fh.write(f"{ids[i]}\t{lab}\n")


def write_id_map(path: str | Path, node_ids: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# internal\toriginal\n")
        for i, node in enumerate(node_ids):
            fh.write(f"{i}\t{node}\n")


# -- sweep config -----------------------------------------------------------

_NUM = {"type": "number"}
CONFIG_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["graph", "replicates", "master_seed"],
    "additionalProperties": False,
    "properties": {
        "graph": {
            "type": "object",
            "minProperties": 1,
            "maxProperties": 1,
            "additionalProperties": False,
            "properties": {
                "generate": {
                    "type": "object",
                    "required": ["n", "m", "f", "h"],
                    "additionalProperties": False,
                    "properties": {
                        "n": {"type": "integer", "minimum": 2},
                        "m": {"type": "integer", "minimum": 1},
                        "f": {"type": "number", "minimum": 0, "maximum": 1},
                        "h": {
                            "oneOf": [
                                {"type": "number", "minimum": 0, "maximum": 1},
                                {
                                    "type": "array",
                                    "minItems": 1,
                                    "items": {"type": "number", "minimum": 0, "maximum": 1},
                                },
                            ]
                        },
                        "seed": {"type": "integer", "minimum": 0},
                    },
                },
                "dataset": {
                    "type": "object",
                    "required": ["edges", "labels"],
                    "additionalProperties": False,
                    "properties": {
                        "edges": {"type": "string"},
                        "labels": {"type": "string"},
                        "name": {"type": "string"},
                        "minority": {"type": "string"},
                    },
                },
            },
        },
        "noise": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["type", "values"],
                "additionalProperties": False,
                "properties": {
                    "type": {"enum": list(NOISE_TYPES)},
                    "values": {"type": "array", "minItems": 1, "items": _NUM},
                    "other": {"type": "number", "minimum": 0, "maximum": 1},
                },
            },
        },
        "replicates": {"type": "integer", "minimum": 1},
        "k": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {"type": "integer", "minimum": 1},
                    {"type": "string", "pattern": r"^[0-9]+(\.[0-9]+)?%$"},
                ]
            },
        },
        "master_seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
    },
}


class ConfigError(ValueError):
    pass


def parse_config(doc: dict[str, Any], base_dir: str | Path = ".") -> SweepConfig:
    """Validate a config document and build a :class:`SweepConfig`.

    Dataset and output paths are resolved relative to ``base_dir``.
    """
    try:
        jsonschema.validate(doc, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(map(str, exc.absolute_path)) or "<root>"
        raise ConfigError(f"config invalid at {where}: {exc.message}") from None

    base = Path(base_dir)
    graph = doc["graph"]
    try:
        if "generate" in graph:
            gen = graph["generate"]
            h = gen["h"] if isinstance(gen["h"], list) else [gen["h"]]
            source: GeneratorSource | DatasetSource = GeneratorSource(
                n=gen["n"], m=gen["m"], f=gen["f"], h=tuple(float(x) for x in h), seed=gen.get("seed")
            )
        else:
            ds = graph["dataset"]
            edges = base / ds["edges"]
            source = DatasetSource(
                edges=edges,
                labels=base / ds["labels"],
                name=ds.get("name", edges.stem),
                minority=ds.get("minority"),
            )
        noise = tuple(NoiseGrid(g["type"], tuple(g["values"]), g.get("other")) for g in doc.get("noise", []))
        return SweepConfig(
            source=source,
            noise=noise,
            replicates=doc["replicates"],
            k=tuple(doc.get("k", ())),
            master_seed=doc["master_seed"],
            out=base / doc["out"] if "out" in doc else None,
        )
    except ValueError as exc:
        raise ConfigError(f"config invalid: {exc}") from None


def load_config(path: str | Path) -> SweepConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return parse_config(doc, path.parent)


# -- sweep CSV ----------------------------------------------------------------

def write_records(fh: TextIO, records: Iterable[SweepRecord]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow(rec.to_row())


def save_records(path: str | Path, records: Iterable[SweepRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_records(fh, records)


def load_records(path: str | Path) -> list[SweepRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty CSV")
        if tuple(reader.fieldnames) != CSV_COLUMNS:
            raise DataError(f"{path}: unexpected columns {reader.fieldnames}")
        try:
            records = [SweepRecord.from_row(row) for row in reader]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{path}: malformed row ({exc})") from None
    if not records:
        raise DataError(f"{path}: no records")
    return records


def save_aggregates(path: str | Path, aggs: Iterable[Aggregate]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS)
        for a in aggs:
            row = []
            for name in AGGREGATE_COLUMNS:
                v = getattr(a, name)
                row.append("" if v is None else repr(v) if isinstance(v, float) else str(v))
            writer.writerow(row)


def save_curve(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
