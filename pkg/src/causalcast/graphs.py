"""Directed signed graphs over named series, and graph-recovery scoring.

A causal graph is a set of directed edges between series names, each edge
carrying a sign (+1 excitatory, -1 inhibitory).  Recovery quality is scored
as binary classification over all ordered pairs of distinct nodes, with
sign agreement examined separately on the correctly detected pairs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    sign: int

    def __post_init__(self):
        if self.source == self.target:
            raise ValueError(f"self-loop on {self.source!r} is not a valid edge")
        if self.sign not in (-1, 1):
            raise ValueError(f"edge sign must be -1 or +1, got {self.sign}")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source, self.target)


@dataclass(frozen=True)
class CausalGraph:
    nodes: tuple[str, ...]
    edges: frozenset[Edge]

    def __post_init__(self):
        nodes = tuple(self.nodes)
        edges = frozenset(self.edges)
        if len(set(nodes)) != len(nodes):
            raise ValueError("node names must be unique")
        known = set(nodes)
        pairs = [e.pair for e in edges]
        if len(set(pairs)) != len(pairs):
            raise ValueError("at most one edge per ordered pair")
        for e in edges:
            if e.source not in known or e.target not in known:
                raise ValueError(f"edge {e.source}->{e.target} references unknown node")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "edges", edges)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    def edge_for(self, source: str, target: str) -> Edge | None:
        for e in self.edges:
            if e.source == source and e.target == target:
                return e
        return None


@dataclass(frozen=True)
class GraphScore:
    """Ordered-pair classification metrics for one predicted graph.

    ``precision`` is reported as 1.0 with ``no_predictions`` set when the
    predicted graph is empty (no false claims were made); ``recall`` is 1.0
    with ``empty_truth`` set when the truth graph has no edges.  The flags
    let aggregators exclude or annotate such trials instead of silently
    averaging in a conventional value.  ``sign_mismatch_rate`` is the
    fraction of true positives whose predicted sign disagrees with the true
    sign, 0.0 when there are no true positives.
    """

    true_positives: int
    false_positives: int
    false_negatives: int
    true_negatives: int
    precision: float
    recall: float
    f1: float
    accuracy: float
    sign_mismatch_rate: float
    no_predictions: bool
    empty_truth: bool


def score_graph(predicted: CausalGraph, truth: CausalGraph) -> GraphScore:
    """Score ``predicted`` against ``truth`` over all ordered node pairs."""
    if set(predicted.nodes) != set(truth.nodes):
        raise ValueError("predicted and truth graphs must share the same node set")
    n = truth.n_nodes
    total_pairs = n * (n - 1)
    pred_pairs = {e.pair: e for e in predicted.edges}
    true_pairs = {e.pair: e for e in truth.edges}

    tp_pairs = pred_pairs.keys() & true_pairs.keys()
    tp = len(tp_pairs)
    fp = len(pred_pairs) - tp
    fn = len(true_pairs) - tp
    tn = total_pairs - tp - fp - fn

    no_predictions = len(pred_pairs) == 0
    empty_truth = len(true_pairs) == 0
    precision = 1.0 if no_predictions else tp / (tp + fp)
    recall = 1.0 if empty_truth else tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0.0 else 2.0 * precision * recall / (precision + recall)
    accuracy = (tp + tn) / total_pairs if total_pairs > 0 else 1.0
    mismatches = sum(1 for pair in tp_pairs if pred_pairs[pair].sign != true_pairs[pair].sign)
    sign_mismatch_rate = mismatches / tp if tp > 0 else 0.0
    return GraphScore(
        true_positives=tp,
        false_positives=fp,
        false_negatives=fn,
        true_negatives=tn,
        precision=precision,
        recall=recall,
        f1=f1,
        accuracy=accuracy,
        sign_mismatch_rate=sign_mismatch_rate,
        no_predictions=no_predictions,
        empty_truth=empty_truth,
    )


def write_truth_csv(path: str | Path, graph: CausalGraph) -> None:
    """Write the true edge set as a source,target,sign sidecar."""
    ordered = sorted(graph.edges, key=lambda e: (e.source, e.target))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(("source", "target", "sign"))
        for e in ordered:
            writer.writerow((e.source, e.target, e.sign))


def read_truth_csv(path: str | Path, nodes: tuple[str, ...]) -> CausalGraph:
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != ("source", "target", "sign"):
            raise ValueError(f"{path}: unexpected truth header {header}")
        edges = [Edge(row[0], row[1], int(row[2])) for row in reader if row]
    return CausalGraph(nodes, frozenset(edges))


def adjacency(graph: CausalGraph) -> np.ndarray:
    """Signed adjacency matrix A[target, source] aligned with node order."""
    index = {name: i for i, name in enumerate(graph.nodes)}
    a = np.zeros((graph.n_nodes, graph.n_nodes))
    for e in graph.edges:
        a[index[e.target], index[e.source]] = e.sign
    return a
