"""Parallel in-memory graph sampling on a partitioned dataflow engine."""

from .dataflow import Batch, ExecutionContext, PartitionedDataset
from .graph import Graph, degree_dataset, induced_edges, remove_zero_degree, validate_sample
from .graphio import read_edge_list, read_report, write_dot, write_edge_list, write_report
from .metrics import MetricsReport, compare_reports, metrics_report
from .randomwalk import WalkParams, random_walk, random_walk_sample
from .sampling import (
    NeighborhoodDirection,
    SampleConfig,
    keep_decision,
    random_edge_sample,
    random_vertex_neighborhood_sample,
    random_vertex_sample,
    sample,
)

__all__ = [
    "Batch",
    "ExecutionContext",
    "Graph",
    "MetricsReport",
    "NeighborhoodDirection",
    "PartitionedDataset",
    "SampleConfig",
    "WalkParams",
    "compare_reports",
    "degree_dataset",
    "induced_edges",
    "keep_decision",
    "metrics_report",
    "random_edge_sample",
    "random_vertex_neighborhood_sample",
    "random_vertex_sample",
    "random_walk",
    "random_walk_sample",
    "read_edge_list",
    "read_report",
    "remove_zero_degree",
    "sample",
    "validate_sample",
    "write_dot",
    "write_edge_list",
    "write_report",
]
