"""Core data types: sparse directed graphs, sparse count attributes, GNAN parameters."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp


class Mode(str, enum.Enum):
    """Which data terms enter the likelihood."""

    BOTH = "both"
    LINKS = "links"
    ATTRS = "attrs"

    @property
    def uses_links(self) -> bool:
        return self is not Mode.ATTRS

    @property
    def uses_attrs(self) -> bool:
        return self is not Mode.LINKS

    @classmethod
    def parse(cls, value: "Mode | str") -> "Mode":
        if isinstance(value, Mode):
            return value
        aliases = {
            "both": cls.BOTH, "links+attrs": cls.BOTH, "link+attr": cls.BOTH,
            "links": cls.LINKS, "links-only": cls.LINKS, "link": cls.LINKS,
            "attrs": cls.ATTRS, "attrs-only": cls.ATTRS, "attr": cls.ATTRS,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown mode {value!r}") from None


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _incidence(rows: np.ndarray, n_rows: int, weights: np.ndarray) -> sp.csr_matrix:
    cols = np.arange(rows.size)
    return sp.csr_matrix((weights, (rows, cols)), shape=(n_rows, rows.size))


@dataclass(frozen=True)
class SparseGraph:
    """Directed 0/1 adjacency stored as a lexicographically sorted edge array.

    Undirected graphs hold both orientations of every edge, so ``n_pairs``
    counts ordered pairs and ``n_links`` counts undirected links.
    """

    n_nodes: int
    edges: np.ndarray  # (M, 2) int64, sorted, unique
    directed: bool = True

    @property
    def src(self) -> np.ndarray:
        return self.edges[:, 0]

    @property
    def dst(self) -> np.ndarray:
        return self.edges[:, 1]

    @property
    def n_pairs(self) -> int:
        return int(self.edges.shape[0])

    @property
    def n_links(self) -> int:
        if self.directed:
            return self.n_pairs
        loops = int(np.count_nonzero(self.src == self.dst))
        return (self.n_pairs - loops) // 2 + loops

    @cached_property
    def source_incidence(self) -> sp.csr_matrix:
        """(N, M) 0/1 matrix selecting each edge's source; row sums are out-degrees."""
        return _incidence(self.src, self.n_nodes, np.ones(self.n_pairs))

    @cached_property
    def target_incidence(self) -> sp.csr_matrix:
        return _incidence(self.dst, self.n_nodes, np.ones(self.n_pairs))

    def out_degree(self) -> np.ndarray:
        return np.bincount(self.src, minlength=self.n_nodes)

    def in_degree(self) -> np.ndarray:
        return np.bincount(self.dst, minlength=self.n_nodes)

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n_nodes, self.n_nodes), dtype=np.int64)
        a[self.src, self.dst] = 1
        return a

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseGraph):
            return NotImplemented
        return (self.n_nodes == other.n_nodes and self.directed == other.directed
                and np.array_equal(self.edges, other.edges))

    __hash__ = None  # type: ignore[assignment]


def build_graph(n_nodes: int, edge_list, directed: bool = True) -> SparseGraph:
    """Validate, deduplicate and sort an edge list; symmetrize when undirected."""
    n_nodes = int(n_nodes)
    if n_nodes < 0:
        raise ValueError(f"negative node count {n_nodes}")
    edges = np.asarray(list(edge_list) if not isinstance(edge_list, np.ndarray) else edge_list,
                       dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= n_nodes):
        bad = edges[(edges < 0).any(1) | (edges >= n_nodes).any(1)][0]
        raise ValueError(f"edge ({bad[0]}, {bad[1]}) out of range for {n_nodes} nodes")
    if not directed:
        edges = np.concatenate([edges, edges[:, ::-1]])
    edges = np.unique(edges, axis=0) if edges.size else np.empty((0, 2), dtype=np.int64)
    return SparseGraph(n_nodes, _frozen(edges), bool(directed))


@dataclass(frozen=True)
class AttributeMatrix:
    """N x K sparse matrix of positive integer counts, entries sorted by (node, attr)."""

    n_nodes: int
    n_attrs: int
    nodes: np.ndarray
    attrs: np.ndarray
    values: np.ndarray

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    @cached_property
    def node_incidence(self) -> sp.csr_matrix:
        """(N, nnz) matrix carrying each entry's value in its node's row."""
        return _incidence(self.nodes, self.n_nodes, self.values.astype(float))

    @cached_property
    def attr_incidence(self) -> sp.csr_matrix:
        return _incidence(self.attrs, self.n_attrs, self.values.astype(float))

    def to_dense(self) -> np.ndarray:
        x = np.zeros((self.n_nodes, self.n_attrs), dtype=np.int64)
        x[self.nodes, self.attrs] = self.values
        return x

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributeMatrix):
            return NotImplemented
        return (self.n_nodes == other.n_nodes and self.n_attrs == other.n_attrs
                and np.array_equal(self.nodes, other.nodes)
                and np.array_equal(self.attrs, other.attrs)
                and np.array_equal(self.values, other.values))

    __hash__ = None  # type: ignore[assignment]


def build_attributes(n_nodes: int, n_attrs: int, triples) -> AttributeMatrix:
    """Build an AttributeMatrix from ``(node, attr, value)`` triples.

    Duplicate keys and non-positive values are rejected; zeros are implicit.
    """
    if n_nodes < 0 or n_attrs < 0:
        raise ValueError("negative dimension")
    t = np.asarray(list(triples) if not isinstance(triples, np.ndarray) else triples,
                   dtype=np.int64).reshape(-1, 3)
    nodes, attrs, values = t[:, 0], t[:, 1], t[:, 2]
    if t.size:
        if nodes.min() < 0 or nodes.max() >= n_nodes or attrs.min() < 0 or attrs.max() >= n_attrs:
            raise ValueError("attribute entry index out of range")
        if values.min() < 1:
            raise ValueError("attribute values must be positive integers (zeros are implicit)")
    order = np.lexsort((attrs, nodes))
    nodes, attrs, values = nodes[order], attrs[order], values[order]
    if nodes.size > 1:
        dup = (np.diff(nodes) == 0) & (np.diff(attrs) == 0)
        if dup.any():
            k = int(np.argmax(dup))
            raise ValueError(f"duplicate attribute entry ({nodes[k]}, {attrs[k]})")
    return AttributeMatrix(int(n_nodes), int(n_attrs), _frozen(nodes), _frozen(attrs),
                           _frozen(values))


def attributes_from_dense(x) -> AttributeMatrix:
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if (x < 0).any() or not np.all(np.equal(np.mod(x, 1), 0)):
        raise ValueError("attributes must be nonnegative integers")
    nodes, attrs = np.nonzero(x)
    return build_attributes(x.shape[0], x.shape[1],
                            np.column_stack([nodes, attrs, x[nodes, attrs]]))


def normalize_rows(matrix) -> np.ndarray:
    """Scale each row of a nonnegative matrix to sum to one."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if (m < 0).any() or not np.isfinite(m).all():
        raise ValueError("matrix must be finite and nonnegative")
    s = m.sum(axis=1)
    if m.shape[1] and (s <= 0).any():
        raise ValueError(f"row {int(np.argmax(s <= 0))} has zero sum")
    if m.shape[1] == 0:
        return m.copy()
    return m / s[:, None]


def _check_simplex_rows(name: str, m: np.ndarray) -> None:
    if not np.isfinite(m).all() or (m < 0).any():
        raise ValueError(f"{name} must be finite and nonnegative")
    if m.shape[1] == 0:
        return
    err = np.abs(m.sum(axis=1) - 1.0)
    tol = 1e-12 * m.shape[1]
    if (err > max(tol, 4 * np.finfo(float).eps)).any():
        raise ValueError(f"{name} rows must sum to 1 (max error {err.max():.3g})")


@dataclass(frozen=True)
class ModelParams:
    """Membership T (N x C), connectivity behavior Theta (C x N), attribute profile Phi (C x K)."""

    membership: np.ndarray
    behavior: np.ndarray
    profile: np.ndarray
    validate: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        T = np.asarray(self.membership, dtype=float)
        B = np.asarray(self.behavior, dtype=float)
        P = np.asarray(self.profile, dtype=float)
        if T.ndim != 2 or B.ndim != 2 or P.ndim != 2:
            raise ValueError("parameters must be 2-D")
        n, c = T.shape
        if B.shape != (c, n):
            raise ValueError(f"behavior shape {B.shape} does not match membership {T.shape}")
        if P.shape[0] != c:
            raise ValueError(f"profile has {P.shape[0]} rows, expected {c}")
        if self.validate:
            _check_simplex_rows("membership", T)
            _check_simplex_rows("behavior", B)
            _check_simplex_rows("profile", P)
        object.__setattr__(self, "membership", _frozen(T))
        object.__setattr__(self, "behavior", _frozen(B))
        object.__setattr__(self, "profile", _frozen(P))

    @property
    def n_nodes(self) -> int:
        return self.membership.shape[0]

    @property
    def n_communities(self) -> int:
        return self.membership.shape[1]

    @property
    def n_attrs(self) -> int:
        return self.profile.shape[1]

    def permuted(self, perm) -> "ModelParams":
        """Relabel communities: new community ``r`` is old community ``perm[r]``."""
        perm = np.asarray(perm)
        return ModelParams(self.membership[:, perm], self.behavior[perm], self.profile[perm])


@dataclass(frozen=True)
class Responsibilities:
    """Per-edge and per-attribute-entry community posteriors.

    Rows of ``edge_resp`` align with ``graph.edges``; rows of ``attr_resp``
    align with the attribute entries. A term dropped by the fitting mode is
    stored as a ``(0, C)`` array.
    """

    edge_resp: np.ndarray
    attr_resp: np.ndarray

    @property
    def n_communities(self) -> int:
        return self.edge_resp.shape[1]


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray
    n_communities: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if labels.size == 0:
            raise ValueError("partition must cover at least one node")
        if labels.min() < 0 or labels.max() >= self.n_communities:
            raise ValueError(f"labels must lie in [0, {self.n_communities})")
        object.__setattr__(self, "labels", _frozen(labels))
        object.__setattr__(self, "n_communities", int(self.n_communities))

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        labels = np.asarray(labels, dtype=np.int64)
        return cls(labels, int(labels.max()) + 1 if labels.size else 0)

    @property
    def n_nodes(self) -> int:
        return int(self.labels.size)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.n_communities)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n_communities == other.n_communities and np.array_equal(self.labels, other.labels)

    __hash__ = None  # type: ignore[assignment]
