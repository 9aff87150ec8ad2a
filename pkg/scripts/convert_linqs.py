#!/usr/bin/env python3
"""Convert a LINQS-style citation dataset (``.content`` + ``.cites``) to a dataset directory.

``.content`` lines are ``<id> <0/1 word flags...> <class>``; ``.cites`` lines
are ``<cited id> <citing id>``. Citations to ids missing from ``.content`` are
dropped. The graph is stored undirected. Word and class names are written to
``attr_names.txt`` and ``class_names.txt``.

    python3 scripts/convert_linqs.py raw/cora/cora.content raw/cora/cora.cites data/cora
"""

import argparse
import sys
from pathlib import Path

from gnan import io
from gnan.model import Partition, build_attributes, build_graph


def convert(content: Path, cites: Path, out: Path, directed: bool = False) -> io.Dataset:
    ids, rows, classes = {}, [], []
    for line in content.read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] in ids:
            raise ValueError(f"duplicate node id {parts[0]}")
        ids[parts[0]] = len(ids)
        rows.append([int(v) for v in parts[1:-1]])
        classes.append(parts[-1])
    if len({len(r) for r in rows}) > 1:
        raise ValueError("rows of .content have different lengths")
    k = len(rows[0]) if rows else 0
    triples = [(i, a, v) for i, r in enumerate(rows) for a, v in enumerate(r) if v]
    edges, dropped = [], 0
    for line in cites.read_text().splitlines():
        parts = line.split()
        if len(parts) != 2:
            continue
        cited, citing = parts
        if cited in ids and citing in ids:
            edges.append((ids[citing], ids[cited]))
        else:
            dropped += 1
    names = sorted(set(classes))
    labels = Partition([names.index(c) for c in classes], len(names))
    n = len(ids)
    ds = io.Dataset(build_graph(n, edges, directed), build_attributes(n, k, triples), labels,
                    out.name)
    io.save_dataset(ds, out)
    (out / "attr_names.txt").write_text("".join(f"w{a}\n" for a in range(k)))
    (out / "class_names.txt").write_text("".join(f"{c}\n" for c in names))
    print(f"{out}: {n} nodes, {ds.graph.n_links} links, {k} attributes, {len(names)} classes, "
          f"{dropped} dangling citations dropped")
    return ds


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("content", type=Path)
    ap.add_argument("cites", type=Path)
    ap.add_argument("out", type=Path)
    ap.add_argument("--directed", action="store_true")
    args = ap.parse_args(argv)
    convert(args.content, args.cites, args.out, args.directed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
