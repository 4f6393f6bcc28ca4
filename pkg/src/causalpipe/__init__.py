"""causalpipe: observational-to-interventional causal inference pipeline.

Subsystems: immutable causal graphs (graph), structure-learner ensemble
(learners), consensus voting (voting), expert review (review), do-calculus
identification (identify, estimand, proofs), ground-truth SCM oracles (scm),
adjustment estimation with bootstrap (estimate), and the pipeline/CLI/HTTP
layers (dataset, pipeline, cli, service).
"""
from .graph import CausalGraph, GraphError, SeparationQuery, Variable

__version__ = "0.1.0"

__all__ = ["CausalGraph", "GraphError", "SeparationQuery", "Variable", "__version__"]
