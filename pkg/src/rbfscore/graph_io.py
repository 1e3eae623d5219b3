"""Reading, validating and representing undirected graphs.

Edge lists are plain text with one edge per line: two whitespace-separated
node tokens and an optional numeric weight that is ignored. Lines that are
blank or start with ``#`` are skipped. Label files use the same layout with
a node token and an integer community id per line.

Nodes are indexed densely in the order they first appear in the edge list.
The index order matters downstream because the RBF weighting embeds nodes
on a line by their index, so it is kept on the :class:`Graph`.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from .exceptions import InputError, ParseError

DEFAULT_MAX_NODES = 20000


@dataclass(frozen=True)
class Graph:
    """An undirected simple graph.

    Attributes
    ----------
    n : int
        Number of nodes.
    edges : ndarray of shape (m, 2)
        Edge endpoints as 0-based indices with ``edges[:, 0] < edges[:, 1]``,
        kept in the order the edges were first read. Read-only.
    node_names : tuple of str
        External token for each node index.
    ground_truth : ndarray of int or None
        Dense community id per node, when known.
    n_duplicates, n_self_loops : int
        How many input lines were dropped for each reason.
    """

    n: int
    edges: np.ndarray
    node_names: tuple = ()
    ground_truth: np.ndarray | None = None
    n_duplicates: int = 0
    n_self_loops: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 1:
            raise InputError("graph must have at least one node", stage="graph")
        if edges.size:
            if edges.min() < 0 or edges.max() >= self.n:
                raise InputError("edge endpoint out of range", stage="graph")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise InputError("self-loops are not allowed", stage="graph")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            edges = np.column_stack([lo, hi])
            keys = lo * self.n + hi
            if np.unique(keys).size != keys.size:
                raise InputError("duplicate edges are not allowed", stage="graph")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

        names = tuple(self.node_names) or tuple(str(i + 1) for i in range(self.n))
        if len(names) != self.n:
            raise InputError("node_names must have one entry per node", stage="graph")
        object.__setattr__(self, "node_names", names)
        object.__setattr__(self, "_index", {name: i for i, name in enumerate(names)})

        if self.ground_truth is not None:
            gt = np.asarray(self.ground_truth, dtype=np.int64)
            if gt.shape != (self.n,):
                raise InputError("ground truth length must equal the node count",
                                 stage="graph")
            if gt.size and gt.min() < 0:
                raise InputError("ground truth labels must be non-negative",
                                 stage="graph")
            gt.setflags(write=False)
            object.__setattr__(self, "ground_truth", gt)

    @property
    def m(self) -> int:
        """Number of edges."""
        return int(self.edges.shape[0])

    def index_of(self, token: str) -> int:
        """Return the node index for an external token, or raise KeyError."""
        return self._index[token]

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edges.ravel(), 1)
        return deg

    def with_ground_truth(self, labels) -> "Graph":
        return replace(self, ground_truth=np.asarray(labels, dtype=np.int64), _index=None)

    @classmethod
    def from_edges(cls, pairs: Iterable, names=None, ground_truth=None) -> "Graph":
        """Build a graph from token pairs, indexing nodes by first appearance.

        Self-loops and repeated edges (in either direction) are dropped and
        counted. A node that occurs only in self-loops is kept as an isolated
        node, indexed after the nodes of kept edges, as are ``names`` not met
        in any edge. ``ground_truth``, if given, maps tokens to labels.
        """
        index: dict = {}
        order = []
        seen = set()
        edges = []
        loop_only = []
        n_dup = n_loop = 0
        for u, v in pairs:
            u, v = str(u), str(v)
            if u == v:
                n_loop += 1
                loop_only.append(u)
                continue
            for tok in (u, v):
                if tok not in index:
                    index[tok] = len(order)
                    order.append(tok)
            i, j = index[u], index[v]
            key = (min(i, j), max(i, j))
            if key in seen:
                n_dup += 1
                continue
            seen.add(key)
            edges.append(key)
        # nodes seen only in self-loops become isolated nodes after the rest
        for tok in loop_only + [str(t) for t in (names or ())]:
            if tok not in index:
                index[tok] = len(order)
                order.append(tok)
        if not order:
            raise InputError("graph has no nodes", stage="parse")
        gt = None
        if ground_truth is not None:
            gt = [ground_truth[tok] for tok in order]
        return cls(n=len(order), edges=np.array(edges, dtype=np.int64).reshape(-1, 2),
                   node_names=tuple(order), ground_truth=gt,
                   n_duplicates=n_dup, n_self_loops=n_loop)


@dataclass(frozen=True)
class AffinityMatrix:
    """Dense 0/1 adjacency matrix with its degree vector."""

    A: np.ndarray
    degrees: np.ndarray
    d_max: float


def _lines(source):
    if isinstance(source, str):
        return io.StringIO(source)
    return source


def parse_edge_list(source) -> Graph:
    """Parse an edge list into a :class:`Graph`.

    Parameters
    ----------
    source : str or iterable of str
        The whole file as a string, or an open text file.

    Returns
    -------
    Graph
        Directed input is read as undirected. Weights in a third column are
        ignored with a single warning.

    Raises
    ------
    ParseError
        On a line with fewer than two tokens, a non-numeric weight, extra
        columns, or when the file contains no edges.
    """
    pairs = []
    weighted = False
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise ParseError("expected two node tokens", line=lineno)
        if len(tokens) > 3:
            raise ParseError(f"expected at most three columns, got {len(tokens)}",
                             line=lineno)
        if len(tokens) == 3:
            try:
                float(tokens[2])
            except ValueError:
                raise ParseError(f"weight {tokens[2]!r} is not numeric",
                                 line=lineno) from None
            weighted = True
        pairs.append((tokens[0], tokens[1]))
    if not pairs:
        raise ParseError("edge list is empty")
    if weighted:
        warnings.warn("edge weights are ignored; the graph is treated as unweighted",
                      stacklevel=2)
    return Graph.from_edges(pairs)


def _read_label_lines(source):
    entries = []
    for lineno, raw in enumerate(_lines(source), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ParseError("expected 'node label'", line=lineno, stage="labels")
        try:
            value = int(tokens[1])
        except ValueError:
            raise ParseError(f"label {tokens[1]!r} is not an integer",
                             line=lineno, stage="labels") from None
        entries.append((lineno, tokens[0], value))
    return entries


def _dense(values):
    distinct = sorted(set(values))
    remap = {v: i for i, v in enumerate(distinct)}
    return np.array([remap[v] for v in values], dtype=np.int64)


def parse_labels(source, graph: Graph) -> np.ndarray:
    """Read a label file and align it with ``graph``'s node indexing.

    Integer labels are relabelled to ``0..k-1`` by increasing value.

    Raises
    ------
    ParseError
        For unknown node tokens, non-integer labels, a node given two
        different labels, or a node with no label.
    """
    labels = _collect_labels(source, graph, add_isolated=False)[1]
    return labels


def _collect_labels(source, graph, add_isolated):
    by_token: dict = {}
    extra = []
    for lineno, tok, value in _read_label_lines(source):
        if tok not in graph._index:
            if not add_isolated:
                raise ParseError(f"unknown node {tok!r}", line=lineno, stage="labels")
            if tok not in by_token:
                extra.append(tok)
        if tok in by_token and by_token[tok] != value:
            raise ParseError(f"node {tok!r} has conflicting labels",
                             line=lineno, stage="labels")
        by_token[tok] = value
    names = list(graph.node_names) + extra
    missing = [tok for tok in names if tok not in by_token]
    if missing:
        raise ParseError(f"node without label: {missing[0]!r}", stage="labels")
    return extra, _dense([by_token[tok] for tok in names])


def attach_labels(graph: Graph, source, add_isolated: bool = False) -> Graph:
    """Return a copy of ``graph`` carrying the labels read from ``source``.

    With ``add_isolated=True``, tokens that never occur in the edge list are
    appended as isolated nodes instead of raising.
    """
    extra, labels = _collect_labels(source, graph, add_isolated)
    if extra:
        graph = Graph(n=graph.n + len(extra), edges=graph.edges,
                      node_names=graph.node_names + tuple(extra),
                      n_duplicates=graph.n_duplicates, n_self_loops=graph.n_self_loops)
    return graph.with_ground_truth(labels)


def affinity(graph: Graph, max_nodes: int = DEFAULT_MAX_NODES) -> AffinityMatrix:
    """Dense symmetric adjacency matrix of ``graph``."""
    if graph.n > max_nodes:
        raise InputError(f"graph has {graph.n} nodes, above the limit of {max_nodes}",
                         stage="affinity")
    A = np.zeros((graph.n, graph.n))
    if graph.m:
        i, j = graph.edges[:, 0], graph.edges[:, 1]
        A[i, j] = 1.0
        A[j, i] = 1.0
    degrees = A.sum(axis=1)
    return AffinityMatrix(A=A, degrees=degrees, d_max=float(degrees.max()))


def serialize_edge_list(graph: Graph) -> str:
    """Write ``graph`` as an edge list using its node tokens.

    Edges are written in stored order, so a graph that was itself parsed or
    built with :meth:`Graph.from_edges` reads back with the same indexing.
    Isolated nodes cannot be expressed in this format and are lost.
    """
    names = graph.node_names
    return "".join(f"{names[i]} {names[j]}\n" for i, j in graph.edges)


def serialize_labels(graph: Graph, labels=None) -> str:
    labels = graph.ground_truth if labels is None else labels
    if labels is None:
        raise InputError("graph has no labels to write", stage="labels")
    return "".join(f"{name} {int(lab)}\n" for name, lab in zip(graph.node_names, labels))


def read_graph(edge_path, label_path=None, add_isolated: bool = False) -> Graph:
    """Read an edge file and an optional label file from disk."""
    with open(edge_path, encoding="utf-8") as fh:
        graph = parse_edge_list(fh)
    if label_path is not None:
        with open(label_path, encoding="utf-8") as fh:
            graph = attach_labels(graph, fh, add_isolated=add_isolated)
    return graph


def permute_nodes(graph: Graph, order) -> Graph:
    """Re-index ``graph`` so that new node ``i`` is old node ``order[i]``.

    Names, ground truth and drop counts travel with the nodes.
    """
    order = np.asarray(order, dtype=np.int64)
    if order.shape != (graph.n,) or not np.array_equal(np.sort(order),
                                                       np.arange(graph.n)):
        raise InputError("order must be a permutation of the node indices",
                         stage="graph")
    new_index = np.empty_like(order)
    new_index[order] = np.arange(graph.n)
    gt = None if graph.ground_truth is None else graph.ground_truth[order]
    return Graph(n=graph.n, edges=new_index[graph.edges],
                 node_names=tuple(graph.node_names[i] for i in order), ground_truth=gt,
                 n_duplicates=graph.n_duplicates, n_self_loops=graph.n_self_loops)
