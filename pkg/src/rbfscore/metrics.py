"""Partition quality: modularity and normalised mutual information."""

from __future__ import annotations

import numpy as np

from .exceptions import InputError


def _as_labels(labels, name="labels"):
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size == 0:
        raise InputError(f"{name} must be a non-empty 1-D vector", stage="metrics")
    _, dense = np.unique(labels, return_inverse=True)
    return dense.ravel()


def modularity(graph, labels) -> float:
    """Newman modularity ``Q = sum_s [l_s/m - (d_s/2m)^2]``.

    Parameters
    ----------
    graph : Graph
    labels : array_like of length ``graph.n``
        Any hashable community ids; only the partition matters.
    """
    labels = _as_labels(labels)
    if labels.size != graph.n:
        raise InputError("label vector length differs from node count",
                         stage="metrics")
    m = graph.m
    if m == 0:
        raise InputError("modularity is undefined for a graph without edges",
                         stage="metrics")
    k = labels.max() + 1
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    same = labels[u] == labels[v]
    intra = np.bincount(labels[u][same], minlength=k).astype(float)
    degree_sum = np.bincount(labels, weights=graph.degrees(), minlength=k)
    return float(np.sum(intra / m - (degree_sum / (2.0 * m)) ** 2))


def entropy(labels) -> float:
    labels = _as_labels(labels)
    p = np.bincount(labels) / labels.size
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def mutual_information(a, b) -> float:
    a = _as_labels(a, "a")
    b = _as_labels(b, "b")
    if a.size != b.size:
        raise InputError("partitions have different lengths", stage="metrics")
    n = a.size
    table = np.zeros((a.max() + 1, b.max() + 1))
    np.add.at(table, (a, b), 1.0)
    joint = table / n
    pa = joint.sum(axis=1, keepdims=True)
    pb = joint.sum(axis=0, keepdims=True)
    nz = joint > 0
    return float(np.sum(joint[nz] * np.log(joint[nz] / (pa @ pb)[nz])))


def nmi(a, b) -> float:
    """Mutual information normalised by the arithmetic mean of the entropies.

    Natural logarithms throughout. When both partitions put every node in a
    single group the score is 1; when only one does, the score is 0.
    """
    a = _as_labels(a, "a")
    b = _as_labels(b, "b")
    if a.size != b.size:
        raise InputError("partitions have different lengths", stage="metrics")
    ha, hb = entropy(a), entropy(b)
    if ha == 0.0 and hb == 0.0:
        return 1.0
    mean = 0.5 * (ha + hb)
    score = mutual_information(a, b) / mean
    return float(min(max(score, 0.0), 1.0))
