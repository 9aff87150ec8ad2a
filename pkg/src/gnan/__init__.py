"""GNAN: a generative node-attribute network model for detecting generalized structure."""

from .em import FitConfig, FitResult, e_step, fit, init_params, log_likelihood, lower_bound, m_step
from .evaluation import hard_assign, modularity, nmi, top_attributes
from .model import (AttributeMatrix, Mode, ModelParams, Partition, Responsibilities, SparseGraph,
                    build_attributes, build_graph, normalize_rows)

__all__ = [
    "AttributeMatrix", "FitConfig", "FitResult", "Mode", "ModelParams", "Partition",
    "Responsibilities", "SparseGraph", "build_attributes", "build_graph", "e_step", "fit",
    "hard_assign", "init_params", "log_likelihood", "lower_bound", "m_step", "modularity", "nmi",
    "normalize_rows", "top_attributes",
]
