"""Approximate distance oracles with witness walks, plus shortest-path applications."""
from .apps import ansc, build_spanner, npsp_additive, npsp_spanner, query_gt1
from .balls import build_near
from .borderline import build_borderline
from .container import build_oracle, load_oracle, save_oracle
from .exact import apsp, exact_shortest_cycle, shortest_cycles
from .graph import Graph, GraphError, degree_reduce, digest, load_graph, random_graph, sssp
from .hierarchy import build_hierarchy, compute_bunches, sample_hierarchy
from .midpoint import build_midpoint
from .tz import ParameterError, build_tz

__all__ = [
    "Graph", "GraphError", "ParameterError", "ansc", "apsp", "build_borderline", "build_hierarchy",
    "build_midpoint", "build_near", "build_oracle", "build_spanner", "build_tz", "compute_bunches",
    "degree_reduce", "digest", "exact_shortest_cycle", "load_graph", "load_oracle", "npsp_additive",
    "npsp_spanner", "query_gt1", "random_graph", "sample_hierarchy", "save_oracle", "shortest_cycles", "sssp",
]
