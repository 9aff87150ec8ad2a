#!/usr/bin/env python3
"""Convert the Lazega lawyers friendship data to a dataset directory.

Inputs are the whitespace separated ``ELfriend.dat`` (71 x 71 0/1 matrix) and
``ELattr.dat`` (one row per lawyer: id, status, gender, office, seniority,
age, practice, law school), plus a labels file with one community per line
for the nodes kept. Friendship is symmetrized; nodes 44 and 47 (1-based) are
isolated and removed. Attributes are one-hot coded, with age and seniority
binned into three levels each; names go to ``attr_names.txt`` as ``group=value``.

    python3 scripts/convert_lazega.py ELfriend.dat ELattr.dat labels.txt data/lazega
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from gnan import io
from gnan.model import Partition, attributes_from_dense, build_graph

COLUMNS = ("status", "gender", "office", "seniority", "age", "practice", "lawschool")
BINS = {"seniority": ((5, 10), ("1-4", "5-9", ">=10")),
        "age": ((36, 46), ("<=35", "36-45", ">=46"))}
DROP = (44, 47)


def one_hot(table):
    cols, names = [], []
    for j, name in enumerate(COLUMNS):
        v = table[:, j]
        if name in BINS:
            cuts, values = BINS[name]
            v = np.digitize(v, cuts)
            levels = range(len(values))
        else:
            levels = sorted(set(v.tolist()))
            values = [f"{int(x)}" for x in levels]
        for lev, label in zip(levels, values):
            cols.append(v == lev)
            names.append(f"{name}={label}")
    return np.column_stack(cols).astype(int), names


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawTextHelpFormatter)
    ap.add_argument("friends", type=Path)
    ap.add_argument("attrs", type=Path)
    ap.add_argument("labels", type=Path)
    ap.add_argument("out", type=Path)
    args = ap.parse_args(argv)

    a = np.loadtxt(args.friends, dtype=int)
    table = np.loadtxt(args.attrs)[:, 1:1 + len(COLUMNS)]
    keep = np.setdiff1d(np.arange(a.shape[0]), np.array(DROP) - 1)
    a = a[np.ix_(keep, keep)]
    table = table[keep]
    x, names = one_hot(table)
    labels = np.loadtxt(args.labels, dtype=int)
    if labels.size != keep.size:
        raise SystemExit(f"{labels.size} labels for {keep.size} nodes")
    n = keep.size
    graph = build_graph(n, np.argwhere(a > 0), directed=False)
    labels = labels - labels.min()
    ds = io.Dataset(graph, attributes_from_dense(x), Partition(labels, int(labels.max()) + 1),
                    "lazega")
    io.save_dataset(ds, args.out)
    (args.out / "attr_names.txt").write_text("".join(f"{s}\n" for s in names))
    print(f"{args.out}: {n} nodes, {graph.n_links} links, {len(names)} attributes")
    return 0


if __name__ == "__main__":
    sys.exit(main())
