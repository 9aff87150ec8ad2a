"""EM inference for the GNAN node-attribute Poisson model.

Responsibilities are kept only for observed edges and nonzero attribute
entries, so one iteration costs O(M*C + nnz(X)*C).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .model import (AttributeMatrix, Mode, ModelParams, Responsibilities, SparseGraph,
                    normalize_rows)

SMOOTHING = 1e-12


class DegenerateParamsError(ValueError):
    """An observed edge or attribute entry has zero expected rate."""


@dataclass(frozen=True)
class FitConfig:
    n_communities: int
    max_iters: int = 500
    tolerance: float = 1e-6
    init_jitter: float = 0.1
    n_restarts: int = 10
    seed: int = 0
    mode: Mode = Mode.BOTH

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if self.n_communities < 1:
            raise ValueError("n_communities must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0 < self.init_jitter < 0.5:
            raise ValueError("init_jitter must lie in (0, 0.5)")
        if self.n_restarts < 1:
            raise ValueError("n_restarts must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    bound_trace: tuple
    converged: bool
    iterations_used: int
    restart_index: int = 0
    restart_bounds: tuple = field(default=())

    @property
    def final_bound(self) -> float:
        return self.bound_trace[-1]


def _check_dims(params: ModelParams, graph: SparseGraph, attrs: AttributeMatrix) -> None:
    if graph.n_nodes != params.n_nodes or attrs.n_nodes != params.n_nodes:
        raise ValueError("node counts of params, graph and attributes differ")
    if attrs.n_attrs != params.n_attrs:
        raise ValueError(f"params have {params.n_attrs} attributes, data has {attrs.n_attrs}")


def _plogp(p: np.ndarray) -> np.ndarray:
    """Elementwise p*log(p) with 0*log(0) = 0."""
    out = np.zeros_like(p)
    np.log(p, out=out, where=p > 0)
    return p * out


def init_params(n_nodes: int, n_communities: int, n_attrs: int, jitter: float,
                rng: np.random.Generator) -> ModelParams:
    """Entries uniform on [0.5 - jitter, 0.5 + jitter], rows normalized."""
    lo, hi = 0.5 - jitter, 0.5 + jitter
    T = rng.uniform(lo, hi, size=(n_nodes, n_communities))
    B = rng.uniform(lo, hi, size=(n_communities, n_nodes))
    P = rng.uniform(lo, hi, size=(n_communities, n_attrs))
    return ModelParams(normalize_rows(T), normalize_rows(B), normalize_rows(P))


def e_step(params: ModelParams, graph: SparseGraph, attrs: AttributeMatrix,
           mode: Mode | str = Mode.BOTH) -> Responsibilities:
    mode = Mode.parse(mode)
    _check_dims(params, graph, attrs)
    C = params.n_communities
    T = params.membership
    if mode.uses_links:
        q = np.take(T, graph.src, axis=0) * np.take(params.behavior.T, graph.dst, axis=0)
        z = q.sum(axis=1)
        if (z <= 0).any():
            e = int(np.argmax(z <= 0))
            raise DegenerateParamsError(f"zero rate on edge {tuple(graph.edges[e])}")
        q /= z[:, None]
    else:
        q = np.empty((0, C))
    if mode.uses_attrs:
        h = np.take(T, attrs.nodes, axis=0) * np.take(params.profile.T, attrs.attrs, axis=0)
        z = h.sum(axis=1)
        if (z <= 0).any():
            e = int(np.argmax(z <= 0))
            raise DegenerateParamsError(
                f"zero rate on attribute entry ({attrs.nodes[e]}, {attrs.attrs[e]})")
        h /= z[:, None]
    else:
        h = np.empty((0, C))
    return Responsibilities(q, h)


def _normalize_or_uniform(m: np.ndarray) -> np.ndarray:
    """Row-normalize; rows with no mass become uniform."""
    if m.shape[1] == 0:
        return m
    s = m.sum(axis=1)
    out = np.empty_like(m)
    ok = s > 0
    out[ok] = m[ok] / s[ok, None]
    out[~ok] = 1.0 / m.shape[1]
    return out


@dataclass(frozen=True)
class _Stats:
    """Responsibility mass summed per parameter entry, plus the entropy term."""

    tau_links: np.ndarray | None   # (N, C) sum_j a_ij q_ij,r
    tau_attrs: np.ndarray | None   # (N, C) sum_k x_ik h_ik,r
    behavior: np.ndarray | None    # (C, N) sum_i a_ij q_ij,r
    profile: np.ndarray | None     # (C, K) sum_i x_ik h_ik,r
    entropy: float                 # sum a q log q + sum x h log h


def _stats(resp: Responsibilities, graph: SparseGraph, attrs: AttributeMatrix,
           mode: Mode) -> _Stats:
    C = resp.n_communities
    N = graph.n_nodes
    tau_l = tau_a = beh = prof = None
    ent = 0.0
    if mode.uses_links:
        q = resp.edge_resp
        if q.shape != (graph.n_pairs, C):
            raise ValueError("edge responsibilities do not match the graph's edge set")
        tau_l = graph.source_incidence @ q
        beh = (graph.target_incidence @ q).T
        ent += float(np.sum(_plogp(q)))
    if mode.uses_attrs:
        h = resp.attr_resp
        if h.shape != (attrs.nnz, C):
            raise ValueError("attribute responsibilities do not match the attribute entries")
        tau_a = attrs.node_incidence @ h
        prof = (attrs.attr_incidence @ h).T
        ent += float(attrs.values @ _plogp(h).sum(axis=1))
    return _Stats(tau_l, tau_a, beh, prof, ent)


def _maximize(st: _Stats, graph: SparseGraph, attrs: AttributeMatrix, mode: Mode, C: int,
              previous: ModelParams | None) -> ModelParams:
    N, K = graph.n_nodes, attrs.n_attrs
    has_links = mode.uses_links and graph.n_pairs > 0
    has_attrs = mode.uses_attrs and attrs.nnz > 0
    if not (has_links or has_attrs):
        raise ValueError("nothing to fit: no edges or attribute entries for this mode")
    tau_num = np.zeros((N, C))
    if mode.uses_links:
        tau_num += st.tau_links
        behavior = _normalize_or_uniform(st.behavior)
    elif previous is not None:
        behavior = previous.behavior
    else:
        behavior = np.full((C, N), 1.0 / N)
    if mode.uses_attrs:
        tau_num += st.tau_attrs
        profile = _normalize_or_uniform(st.profile)
    elif previous is not None:
        profile = previous.profile
    else:
        profile = np.full((C, K), 1.0 / K) if K else np.empty((C, 0))
    return ModelParams(_normalize_or_uniform(tau_num), behavior, profile)


def m_step(resp: Responsibilities, graph: SparseGraph, attrs: AttributeMatrix,
           mode: Mode | str = Mode.BOTH, previous: ModelParams | None = None) -> ModelParams:
    """Closed-form maximizer of the lower bound given responsibilities.

    In an ablation mode the unused profile matrix is copied from ``previous``
    (uniform when ``previous`` is None). Rows with no responsibility mass
    (isolated nodes, unused communities) are set uniform.
    """
    mode = Mode.parse(mode)
    st = _stats(resp, graph, attrs, mode)
    return _maximize(st, graph, attrs, mode, resp.n_communities, previous)


def smooth(params: ModelParams, delta: float = SMOOTHING) -> ModelParams:
    """Add ``delta`` to every entry and renormalize rows."""
    return ModelParams(normalize_rows(params.membership + delta),
                       normalize_rows(params.behavior + delta),
                       normalize_rows(params.profile + delta))


def _penalty(T: np.ndarray, M: np.ndarray) -> float:
    # sum_{i,j,r} tau_ir m_rj = sum_r (sum_i tau_ir)(sum_j m_rj)
    return float(T.sum(axis=0) @ M.sum(axis=1))


def _bound_from_stats(params: ModelParams, st: _Stats, mode: Mode) -> float:
    # sum_e q_er log(tau_ir theta_rj) splits into per-entry mass times log of each factor
    T = params.membership
    total = -st.entropy
    if mode.uses_links:
        total += float(np.sum(xlogy(st.tau_links, T)) + np.sum(xlogy(st.behavior, params.behavior)))
        total -= _penalty(T, params.behavior)
    if mode.uses_attrs:
        total += float(np.sum(xlogy(st.tau_attrs, T)) + np.sum(xlogy(st.profile, params.profile)))
        total -= _penalty(T, params.profile)
    return total


def lower_bound(params: ModelParams, resp: Responsibilities, graph: SparseGraph,
                attrs: AttributeMatrix, mode: Mode | str = Mode.BOTH) -> float:
    """Jensen lower bound of the log-likelihood at (params, resp)."""
    mode = Mode.parse(mode)
    _check_dims(params, graph, attrs)
    return _bound_from_stats(params, _stats(resp, graph, attrs, mode), mode)


def log_likelihood(params: ModelParams, graph: SparseGraph, attrs: AttributeMatrix,
                   mode: Mode | str = Mode.BOTH) -> float:
    """Poisson log-likelihood up to parameter-free constants."""
    mode = Mode.parse(mode)
    _check_dims(params, graph, attrs)
    T = params.membership
    total = 0.0
    with np.errstate(divide="raise"):
        if mode.uses_links:
            rate = np.einsum("er,er->e", T[graph.src], params.behavior.T[graph.dst])
            try:
                total += float(np.sum(np.log(rate)))
            except FloatingPointError:
                raise DegenerateParamsError("zero expected rate on an observed edge") from None
            total -= _penalty(T, params.behavior)
        if mode.uses_attrs:
            rate = np.einsum("er,er->e", T[attrs.nodes], params.profile.T[attrs.attrs])
            try:
                total += float(np.sum(attrs.values * np.log(rate)))
            except FloatingPointError:
                raise DegenerateParamsError("zero expected rate on an attribute entry") from None
            total -= _penalty(T, params.profile)
    return total


def run_chain(graph: SparseGraph, attrs: AttributeMatrix, config: FitConfig,
              rng: np.random.Generator, init: ModelParams | None = None) -> FitResult:
    """One EM chain: stop when the bound moves by less than the tolerance or at max_iters."""
    mode = config.mode
    params = init if init is not None else init_params(
        graph.n_nodes, config.n_communities, attrs.n_attrs, config.init_jitter, rng)
    resp = e_step(params, graph, attrs, mode)
    bound = lower_bound(params, resp, graph, attrs, mode)
    trace = [bound]
    converged = False
    t = 0
    C = config.n_communities
    for t in range(1, config.max_iters + 1):
        resp = e_step(params, graph, attrs, mode)
        st = _stats(resp, graph, attrs, mode)
        params = smooth(_maximize(st, graph, attrs, mode, C, params))
        new = _bound_from_stats(params, st, mode)
        trace.append(new)
        if abs(new - bound) < config.tolerance:
            converged = True
            break
        bound = new
    return FitResult(params, tuple(trace), converged, t)


def fit_chains(graph: SparseGraph, attrs: AttributeMatrix, config: FitConfig,
               n_workers: int = 1) -> list[FitResult]:
    """Every seeded restart, in restart order."""
    if graph.n_nodes != attrs.n_nodes:
        raise ValueError("graph and attributes disagree on the number of nodes")
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_restarts)

    def one(ss):
        return run_chain(graph, attrs, config, np.random.default_rng(ss))

    if n_workers > 1 and config.n_restarts > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            return list(pool.map(one, seeds))
    return [one(ss) for ss in seeds]


def select_best(chains: list[FitResult]) -> FitResult:
    """Highest final bound wins; ties go to the lowest restart index."""
    finals = tuple(c.final_bound for c in chains)
    best = int(np.argmax(finals))
    c = chains[best]
    return FitResult(c.params, c.bound_trace, c.converged, c.iterations_used, best, finals)


def fit(graph: SparseGraph, attrs: AttributeMatrix, config: FitConfig,
        n_workers: int = 1) -> FitResult:
    """Run ``n_restarts`` seeded EM chains and keep the one with the highest final bound."""
    return select_best(fit_chains(graph, attrs, config, n_workers))
