"""Planted block-structure graphs and community-dependent Bernoulli attributes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import AttributeMatrix, Partition, SparseGraph, build_attributes, build_graph


@dataclass(frozen=True)
class BlockMatrix:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValueError("block matrix must be square")
        if not ((p >= 0) & (p <= 1)).all():
            raise ValueError("edge probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_blocks(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class DependencyMatrix:
    probs: np.ndarray

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2:
            raise ValueError("dependency matrix must be 2-D")
        if not ((p >= 0) & (p <= 1)).all():
            raise ValueError("attribute probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def n_blocks(self) -> int:
        return self.probs.shape[0]

    @property
    def n_attrs(self) -> int:
        return self.probs.shape[1]


def _check_prob(name, v):
    if not 0 <= v <= 1:
        raise ValueError(f"{name}={v} is not a probability")


def planted_community(n_blocks: int, omega: float, lam: float) -> BlockMatrix:
    """Assortative planted partition: ``omega`` on the diagonal, ``lam`` elsewhere."""
    _check_prob("omega", omega)
    _check_prob("lambda", lam)
    if omega < lam:
        raise ValueError(f"omega={omega} must be >= lambda={lam}")
    p = np.full((n_blocks, n_blocks), float(lam))
    np.fill_diagonal(p, omega)
    return BlockMatrix(p)


def planted_disassortative(lam1: float) -> BlockMatrix:
    """Three blocks whose members link mostly outside their own block."""
    if not lam1 > 0.05:
        raise ValueError(f"lambda1={lam1} must exceed 0.05")
    if lam1 + 0.1 > 1:
        raise ValueError(f"lambda1={lam1} pushes an entry above 1")
    a, b, c = lam1, lam1 + 0.05, lam1 + 0.1
    return BlockMatrix([[0.05, a, c],
                        [a, 0.03, b],
                        [c, b, 0.02]])


def planted_mixture(omega1: float, omega2: float, omega3: float, omega4: float,
                    lam: float) -> BlockMatrix:
    """Five blocks: a bipartite pair (0, 1), a community (2), a core (3) with periphery (4)."""
    for name, v in [("omega1", omega1), ("omega2", omega2), ("omega3", omega3),
                    ("omega4", omega4), ("lambda", lam)]:
        _check_prob(name, v)
    p = np.full((5, 5), float(lam))
    p[0, 1] = p[1, 0] = omega1
    p[2, 2] = omega2
    p[3, 3] = omega3
    p[3, 4] = p[4, 3] = omega4
    p[0, 0] = p[1, 1] = p[4, 4] = 0.0
    return BlockMatrix(p)


def planted_labels(block_sizes) -> Partition:
    sizes = np.asarray(block_sizes, dtype=np.int64)
    if sizes.size == 0 or (sizes <= 0).any():
        raise ValueError("block sizes must be positive")
    return Partition(np.repeat(np.arange(sizes.size), sizes), sizes.size)


def sbm_sample(block_sizes, blocks: BlockMatrix, rng: np.random.Generator
               ) -> tuple[SparseGraph, Partition]:
    """Undirected SBM draw without self-loops; nodes ordered block by block."""
    sizes = np.asarray(block_sizes, dtype=np.int64)
    if sizes.size != blocks.n_blocks:
        raise ValueError(f"{sizes.size} block sizes for a {blocks.n_blocks}-block matrix")
    part = planted_labels(sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    pieces = []
    for r in range(sizes.size):
        for s in range(r, sizes.size):
            hit = rng.random((sizes[r], sizes[s])) < blocks.probs[r, s]
            if r == s:
                hit = np.triu(hit, k=1)
            i, j = np.nonzero(hit)
            pieces.append(np.column_stack([i + offsets[r], j + offsets[s]]))
    edges = np.concatenate(pieces) if pieces else np.empty((0, 2), dtype=np.int64)
    return build_graph(int(offsets[-1]), edges, directed=False), part


def attr_sample(block_sizes, deps: DependencyMatrix, rng: np.random.Generator) -> AttributeMatrix:
    """x_ik ~ Bernoulli(deps[block(i), k]) independently."""
    labels = planted_labels(block_sizes).labels
    if deps.n_blocks != int(labels.max()) + 1:
        raise ValueError("dependency matrix rows do not match the number of blocks")
    hit = rng.random((labels.size, deps.n_attrs)) < deps.probs[labels]
    i, k = np.nonzero(hit)
    return build_attributes(labels.size, deps.n_attrs, np.column_stack([i, k, np.ones_like(i)]))


def dependency_design(n_blocks: int, strong_per_block: int = 10, p_strong=0.9,
                      p_noise: float = 0.1, extra_noise_attrs: int = 0,
                      strong_mask=None) -> DependencyMatrix:
    """Community/attribute dependency layout.

    By default block ``r`` is strong on columns ``[r*s, (r+1)*s)`` with
    ``s = strong_per_block``. ``strong_mask`` (C x K0 booleans) overrides that
    layout, e.g. to let two communities share a strong column range.
    ``p_strong`` may be a scalar or one value per block. ``extra_noise_attrs``
    all-noise columns are appended on the right.
    """
    _check_prob("p_noise", p_noise)
    ps = np.broadcast_to(np.asarray(p_strong, dtype=float), (n_blocks,))
    for v in ps:
        _check_prob("p_strong", v)
    if strong_mask is None:
        mask = np.zeros((n_blocks, n_blocks * strong_per_block), dtype=bool)
        for r in range(n_blocks):
            mask[r, r * strong_per_block:(r + 1) * strong_per_block] = True
    else:
        mask = np.asarray(strong_mask, dtype=bool)
        if mask.ndim != 2 or mask.shape[0] != n_blocks:
            raise ValueError("strong_mask must have one row per block")
    p = np.where(mask, ps[:, None], p_noise)
    p = np.hstack([p, np.full((n_blocks, extra_noise_attrs), float(p_noise))])
    return DependencyMatrix(p)


def noisy_attribute_design() -> DependencyMatrix:
    """Four communities, 40 attributes: 1-2 strong (0.9) on 0-19, 3-4 strong (0.7) on 20-29,
    columns 30-39 noise (0.1) for everyone."""
    mask = np.zeros((4, 30), dtype=bool)
    mask[0:2, 0:20] = True
    mask[2:4, 20:30] = True
    return dependency_design(4, p_strong=[0.9, 0.9, 0.7, 0.7], p_noise=0.1,
                             extra_noise_attrs=10, strong_mask=mask)
