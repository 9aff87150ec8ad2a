"""Plain-text formats for graphs, attributes, labels, fits and curves.

Every writer emits a canonical ordering so that ``save(load(f))`` reproduces
``f`` byte for byte.

Edge list::

    nodes=5 directed=0
    0<TAB>1

Undirected graphs store each link once with ``src <= dst``.

Attributes::

    nodes=5 attrs=3
    0<TAB>2<TAB>1

Labels::

    nodes=5 communities=2
    0<TAB>0
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .em import FitResult
from .model import (AttributeMatrix, ModelParams, Partition, SparseGraph, build_attributes,
                    build_graph)

FIT_VERSION = "1"
FIT_MAGIC = "gnan-fit"


class FormatError(ValueError):
    pass


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _read_body(path, header_keys):
    """Parse the ``key=value`` header and return (header dict, [(lineno, fields)])."""
    header = None
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if header is None:
                try:
                    header = dict(tok.split("=", 1) for tok in line.split())
                except ValueError:
                    raise FormatError(f"{path}:{lineno}: malformed header {line!r}") from None
                missing = [k for k in header_keys if k not in header]
                if missing:
                    raise FormatError(f"{path}:{lineno}: header lacks {', '.join(missing)}")
                continue
            rows.append((lineno, line.split()))
    if header is None:
        raise FormatError(f"{path}: missing header line")
    return header, rows


def _ints(path, lineno, fields, n):
    if len(fields) != n:
        raise FormatError(f"{path}:{lineno}: expected {n} fields, got {len(fields)}")
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise FormatError(f"{path}:{lineno}: non-integer field in {fields}") from None


def _header_int(path, header, key):
    try:
        v = int(header[key])
    except ValueError:
        raise FormatError(f"{path}: header {key}={header[key]!r} is not an integer") from None
    if v < 0:
        raise FormatError(f"{path}: header {key} is negative")
    return v


def load_edge_list(path) -> SparseGraph:
    header, rows = _read_body(path, ("nodes", "directed"))
    n = _header_int(path, header, "nodes")
    if header["directed"] not in ("0", "1"):
        raise FormatError(f"{path}: directed must be 0 or 1")
    edges = []
    for lineno, fields in rows:
        i, j = _ints(path, lineno, fields, 2)
        if not (0 <= i < n and 0 <= j < n):
            raise FormatError(f"{path}:{lineno}: edge ({i}, {j}) out of range for {n} nodes")
        edges.append((i, j))
    return build_graph(n, edges, directed=header["directed"] == "1")


def save_edge_list(graph: SparseGraph, path) -> None:
    e = graph.edges
    if not graph.directed:
        e = e[e[:, 0] <= e[:, 1]]
    with open(path, "w") as fh:
        fh.write(f"nodes={graph.n_nodes} directed={int(graph.directed)}\n")
        fh.writelines(f"{i}\t{j}\n" for i, j in e.tolist())


def load_attributes(path) -> AttributeMatrix:
    header, rows = _read_body(path, ("nodes", "attrs"))
    n = _header_int(path, header, "nodes")
    k = _header_int(path, header, "attrs")
    triples = []
    seen = set()
    for lineno, fields in rows:
        i, a, v = _ints(path, lineno, fields, 3)
        if not (0 <= i < n and 0 <= a < k):
            raise FormatError(f"{path}:{lineno}: entry ({i}, {a}) out of range")
        if v < 1:
            raise FormatError(f"{path}:{lineno}: value {v} must be positive (zeros are implicit)")
        if (i, a) in seen:
            raise FormatError(f"{path}:{lineno}: duplicate entry ({i}, {a})")
        seen.add((i, a))
        triples.append((i, a, v))
    return build_attributes(n, k, triples)


def save_attributes(attrs: AttributeMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"nodes={attrs.n_nodes} attrs={attrs.n_attrs}\n")
        fh.writelines(f"{i}\t{a}\t{v}\n" for i, a, v in
                      zip(attrs.nodes.tolist(), attrs.attrs.tolist(), attrs.values.tolist()))


def load_labels(path) -> Partition:
    header, rows = _read_body(path, ("nodes", "communities"))
    n = _header_int(path, header, "nodes")
    c = _header_int(path, header, "communities")
    labels = np.full(n, -1, dtype=np.int64)
    for lineno, fields in rows:
        i, lab = _ints(path, lineno, fields, 2)
        if not 0 <= i < n:
            raise FormatError(f"{path}:{lineno}: node {i} out of range for {n} nodes")
        if not 0 <= lab < c:
            raise FormatError(f"{path}:{lineno}: label {lab} outside [0, {c})")
        if labels[i] >= 0:
            raise FormatError(f"{path}:{lineno}: node {i} labelled twice")
        labels[i] = lab
    if (labels < 0).any():
        raise FormatError(f"{path}: {int((labels < 0).sum())} of {n} nodes have no label")
    return Partition(labels, c)


def save_labels(partition: Partition, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"nodes={partition.n_nodes} communities={partition.n_communities}\n")
        fh.writelines(f"{i}\t{lab}\n" for i, lab in enumerate(partition.labels.tolist()))


def save_matrix(m, path) -> None:
    m = np.atleast_2d(np.asarray(m, dtype=float))
    with open(path, "w") as fh:
        fh.write(f"rows={m.shape[0]} cols={m.shape[1]}\n")
        for row in m:
            fh.write("\t".join(_fmt(v) for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    header, rows = _read_body(path, ("rows", "cols"))
    r, c = _header_int(path, header, "rows"), _header_int(path, header, "cols")
    if len(rows) != r:
        raise FormatError(f"{path}: expected {r} rows, found {len(rows)}")
    out = np.empty((r, c))
    for k, (lineno, fields) in enumerate(rows):
        if len(fields) != c:
            raise FormatError(f"{path}:{lineno}: expected {c} values")
        out[k] = [float(f) for f in fields]
    return out


# -- fitted models ---------------------------------------------------------

def save_fit(result: FitResult, path) -> None:
    p = result.params
    lines = [
        f"{FIT_MAGIC} version={FIT_VERSION}",
        f"nodes={p.n_nodes}",
        f"communities={p.n_communities}",
        f"attrs={p.n_attrs}",
        f"converged={int(result.converged)}",
        f"iterations={result.iterations_used}",
        f"restart_index={result.restart_index}",
        "restart_bounds=" + " ".join(_fmt(v) for v in result.restart_bounds),
        "bound_trace=" + " ".join(_fmt(v) for v in result.bound_trace),
    ]
    for name, m in (("membership", p.membership), ("behavior", p.behavior),
                    ("profile", p.profile)):
        lines.append(f"[{name}] {m.shape[0]} {m.shape[1]}")
        lines.extend(" ".join(_fmt(v) for v in row) for row in m)
    Path(path).write_text("\n".join(lines) + "\n")


def load_fit(path) -> FitResult:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise FormatError(f"{path}: empty fit file")
    head = lines[0].split()
    if not head or head[0] != FIT_MAGIC:
        raise FormatError(f"{path}: not a fit file")
    if head[1:] != [f"version={FIT_VERSION}"]:
        raise FormatError(f"{path}: unsupported fit version {' '.join(head[1:])!r}")
    meta = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith("["):
        key, _, value = lines[pos].partition("=")
        meta[key] = value
        pos += 1
    blocks = {}
    while pos < len(lines):
        tag, r, c = lines[pos].split()
        r, c = int(r), int(c)
        rows = lines[pos + 1:pos + 1 + r]
        if len(rows) != r:
            raise FormatError(f"{path}: truncated block {tag}")
        m = np.array([[float(v) for v in row.split()] for row in rows]).reshape(r, c)
        blocks[tag.strip("[]")] = m
        pos += 1 + r
    try:
        params = ModelParams(blocks["membership"], blocks["behavior"], blocks["profile"])
        trace = tuple(float(v) for v in meta["bound_trace"].split())
        restart_bounds = tuple(float(v) for v in meta["restart_bounds"].split())
        return FitResult(params, trace, meta["converged"] == "1", int(meta["iterations"]),
                         int(meta["restart_index"]), restart_bounds)
    except KeyError as exc:
        raise FormatError(f"{path}: missing field {exc}") from None


# -- curves ----------------------------------------------------------------

def emit_curve(records, path) -> None:
    """Write ``(x, mean, stddev)`` rows as CSV with a fixed header."""
    rows = [tuple(float(v) for v in rec) for rec in records]
    for rec in rows:
        if len(rec) != 3:
            raise ValueError(f"curve record {rec} must have 3 fields")
        if not all(math.isfinite(v) for v in rec):
            raise ValueError(f"non-finite value in curve record {rec}")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "mean", "stddev"])
        w.writerows([[_fmt(v) for v in rec] for rec in rows])


def load_curve(path) -> list:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["x", "mean", "stddev"]:
            raise FormatError(f"{path}: bad curve header")
        return [tuple(float(v) for v in row) for row in reader]


# -- datasets --------------------------------------------------------------

@dataclass(frozen=True)
class Dataset:
    graph: SparseGraph
    attrs: AttributeMatrix
    labels: Partition | None = None
    name: str = ""

    def __post_init__(self):
        n = self.graph.n_nodes
        if self.attrs.n_nodes != n or (self.labels is not None and self.labels.n_nodes != n):
            raise ValueError("dataset members disagree on the number of nodes")


EDGES_FILE, ATTRS_FILE, LABELS_FILE = "edges.tsv", "attrs.tsv", "labels.tsv"


def save_dataset(ds: Dataset, directory) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    save_edge_list(ds.graph, d / EDGES_FILE)
    save_attributes(ds.attrs, d / ATTRS_FILE)
    if ds.labels is not None:
        save_labels(ds.labels, d / LABELS_FILE)
    return d


def load_dataset(directory) -> Dataset:
    """Load ``edges.tsv`` plus optional ``attrs.tsv`` and ``labels.tsv`` from a directory."""
    d = Path(directory)
    if not (d / EDGES_FILE).is_file():
        raise FileNotFoundError(f"{d / EDGES_FILE} not found")
    graph = load_edge_list(d / EDGES_FILE)
    if (d / ATTRS_FILE).is_file():
        attrs = load_attributes(d / ATTRS_FILE)
    else:
        attrs = build_attributes(graph.n_nodes, 0, [])
    labels = load_labels(d / LABELS_FILE) if (d / LABELS_FILE).is_file() else None
    if attrs.n_nodes != graph.n_nodes or (labels is not None and labels.n_nodes != graph.n_nodes):
        raise FormatError(f"{d}: files disagree on the number of nodes")
    return Dataset(graph, attrs, labels, d.name)
