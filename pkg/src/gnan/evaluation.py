"""Partition metrics and attribute interpretation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Partition, SparseGraph


def hard_assign(membership) -> Partition:
    """argmax community per node; ties go to the lowest index."""
    T = np.asarray(membership, dtype=float)
    return Partition(np.argmax(T, axis=1), T.shape[1])


@dataclass(frozen=True)
class ConfusionCounts:
    counts: np.ndarray  # (C_true, C_pred)

    @property
    def true_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def pred_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def confusion_counts(truth: Partition, predicted: Partition) -> ConfusionCounts:
    if truth.n_nodes != predicted.n_nodes:
        raise ValueError(f"partitions cover {truth.n_nodes} and {predicted.n_nodes} nodes")
    ct, cp = truth.n_communities, predicted.n_communities
    flat = np.bincount(truth.labels * cp + predicted.labels, minlength=ct * cp)
    return ConfusionCounts(flat.reshape(ct, cp))


def _plogp_sum(sizes: np.ndarray, n: int) -> float:
    s = sizes[sizes > 0].astype(float)
    return float(np.sum(s * np.log(s / n)))


def nmi(truth: Partition, predicted: Partition) -> float:
    """Normalized mutual information, arithmetic-mean normalization.

    ``-2 sum N_ij log(N N_ij / (N_i N_j)) / (sum N_i log(N_i/N) + sum N_j log(N_j/N))``
    over nonempty communities, natural log. If either side has a single
    nonempty community the score is 1 when both do and 0 otherwise.
    """
    cc = confusion_counts(truth, predicted)
    n = cc.total
    if n == 0:
        raise ValueError("empty partition")
    a, b = cc.true_sizes, cc.pred_sizes
    if np.count_nonzero(a) <= 1 or np.count_nonzero(b) <= 1:
        return 1.0 if np.count_nonzero(a) == np.count_nonzero(b) else 0.0
    i, j = np.nonzero(cc.counts)
    nij = cc.counts[i, j].astype(float)
    num = -2.0 * np.sum(nij * np.log(n * nij / (a[i].astype(float) * b[j])))
    den = _plogp_sum(a, n) + _plogp_sum(b, n)
    return float(np.clip(num / den, 0.0, 1.0))


def modularity(graph: SparseGraph, partition: Partition) -> float:
    """Modularity Q of the undirected view of ``graph``.

    ``Q = sum_r [ e_r / m - (d_r / 2m)^2 ]`` with ``m`` undirected links,
    ``e_r`` links inside community ``r`` and ``d_r`` its total degree.
    """
    if partition.n_nodes != graph.n_nodes:
        raise ValueError(f"partition covers {partition.n_nodes} nodes, graph has {graph.n_nodes}")
    e = graph.edges
    # undirected view: each unordered pair once
    und = np.unique(np.sort(e, axis=1), axis=0) if e.size else e
    m = und.shape[0]
    if m == 0:
        raise ValueError("modularity is undefined for an edgeless graph")
    lab = partition.labels
    C = partition.n_communities
    lu, lv = lab[und[:, 0]], lab[und[:, 1]]
    inside = np.bincount(lu[lu == lv], minlength=C).astype(float)
    deg = np.bincount(lu, minlength=C) + np.bincount(lv, minlength=C)
    return float(np.sum(inside / m - (deg / (2.0 * m)) ** 2))


@dataclass(frozen=True)
class AttributeReport:
    ranking: tuple      # per community: tuple of (attr, phi) sorted by phi descending
    threshold: float

    def selected(self, community: int) -> list:
        return [(k, v) for k, v in self.ranking[community] if v > self.threshold]

    def format(self, names=None, top: int | None = None) -> str:
        lines = []
        for r, ranked in enumerate(self.ranking):
            bold = {k for k, _ in self.selected(r)}
            shown = ranked if top is None else ranked[:top]
            lines.append(f"community {r}: {len(bold)} attribute(s) above {self.threshold:g}")
            for k, v in shown:
                name = names[k] if names is not None else str(k)
                mark = "*" if k in bold else " "
                lines.append(f"  {mark} {name}\t{v:.4f}")
        return "\n".join(lines)


def top_attributes(profile, threshold: float = 0.1) -> AttributeReport:
    """Rank attributes per community by phi (stable for ties)."""
    P = np.asarray(profile, dtype=float)
    ranking = []
    for row in P:
        order = np.argsort(-row, kind="stable")
        ranking.append(tuple((int(k), float(row[k])) for k in order))
    return AttributeReport(tuple(ranking), float(threshold))
