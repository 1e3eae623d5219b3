"""Locating benchmark networks on disk.

Two networks ship with the package: the six-node ``toy`` graph and Zachary's
``karate`` club. Others are looked up by name as ``<name>.edges`` and
``<name>.labels`` in the directories listed in ``RBFSCORE_DATA``
(``os.pathsep``-separated), so that redistributable copies can be dropped in
without code changes.
"""

from __future__ import annotations

import os
from importlib import resources

from .exceptions import InputError
from .graph_io import Graph, read_graph

DATA_ENV = "RBFSCORE_DATA"


def _bundled_dir():
    return resources.files("rbfscore") / "data"


def search_path() -> list:
    dirs = [p for p in os.environ.get(DATA_ENV, "").split(os.pathsep) if p]
    return dirs + [str(_bundled_dir())]


def find_dataset(name: str):
    """Return ``(edge_path, label_path)`` for ``name``.

    ``label_path`` is None when only the edge list exists.

    Raises
    ------
    InputError
        If no directory on the search path holds ``<name>.edges``.
    """
    for directory in search_path():
        edges = os.path.join(directory, f"{name}.edges")
        if os.path.isfile(edges):
            labels = os.path.join(directory, f"{name}.labels")
            return edges, labels if os.path.isfile(labels) else None
    raise InputError(
        f"dataset {name!r} not found; put {name}.edges and {name}.labels in a "
        f"directory listed in {DATA_ENV}", stage="data")


def load_dataset(name: str, add_isolated: bool = True) -> Graph:
    edges, labels = find_dataset(name)
    return read_graph(edges, labels, add_isolated=add_isolated)


def toy_graph() -> Graph:
    """The six-node, six-edge example graph with its two planted groups."""
    return load_dataset("toy")
