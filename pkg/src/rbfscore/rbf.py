"""Radial basis function weighting of an adjacency matrix.

Nodes are placed on a line at ``linspace(0.001, 1, n)`` in index order and
every edge is weighted by a kernel of the distance between its endpoints.
Non-edges stay zero.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import InputError, NumericalError
from .linalg import CONDITION_FLOOR, condition_number

EMBED_START = 0.001
EMBED_STOP = 1.0


class RbfKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    MQ = "mq"
    IMQ = "imq"

    @classmethod
    def parse(cls, value) -> "RbfKind":
        if isinstance(value, cls):
            return value
        aliases = {"gauss": "gaussian", "multiquadric": "mq",
                   "inverse_multiquadric": "imq", "inverse-multiquadric": "imq"}
        key = str(value).strip().lower()
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InputError(f"unknown RBF kind {value!r}", stage="rbf") from None


# Order used to break ties between kernels in parameter sweeps.
KIND_ORDER = (RbfKind.GAUSSIAN, RbfKind.MQ, RbfKind.IMQ)


@dataclass(frozen=True)
class RbfChoice:
    """A kernel and its shaping parameter ``c``.

    ``c`` must be positive; ``c = 0`` is accepted for the multiquadric, which
    then reduces to the distance itself.
    """

    kind: RbfKind = RbfKind.GAUSSIAN
    c: float = 0.1

    def __post_init__(self):
        kind = RbfKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        c = float(self.c)
        if not np.isfinite(c) or c < 0 or (c == 0 and kind is not RbfKind.MQ):
            raise InputError(f"shaping parameter must be positive, got {self.c!r}",
                             stage="rbf")
        object.__setattr__(self, "c", c)


def rbf_value(choice: RbfChoice, r):
    """Evaluate the kernel at distance(s) ``r``.

    Gaussian ``exp(-r^2/c^2)``, multiquadric ``sqrt(c^2 + r^2)``, inverse
    multiquadric ``1/sqrt(c^2 + r^2)``. Works elementwise on arrays.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise InputError("distances must be non-negative", stage="rbf")
    c = choice.c
    if choice.kind is RbfKind.GAUSSIAN:
        # floor at the smallest normal float so a far-apart edge is weakened
        # but never silently removed from the support
        out = np.maximum(np.exp(-(r * r) / (c * c)), np.finfo(float).tiny)
    elif choice.kind is RbfKind.MQ:
        out = np.sqrt(c * c + r * r)
    else:
        denom = np.sqrt(c * c + r * r)
        if np.any(denom == 0):
            raise NumericalError("inverse multiquadric is undefined at r = c = 0",
                                 stage="rbf")
        out = 1.0 / denom
    return out if out.ndim else float(out)


def embedding(n: int) -> np.ndarray:
    """Equally spaced node positions from 0.001 to 1."""
    if n < 1:
        raise InputError("embedding needs at least one node", stage="rbf")
    return np.linspace(EMBED_START, EMBED_STOP, n)


def distance_matrix(x) -> np.ndarray:
    """Pairwise absolute differences ``|x_i - x_j|``."""
    x = np.asarray(x, dtype=float)
    return np.abs(x[:, None] - x[None, :])


def masked_rbf_matrix(A, choice: RbfChoice) -> np.ndarray:
    """Kernel weights on the support of ``A``: ``W = Phi(r) * A`` entrywise.

    ``A`` may be an :class:`~rbfscore.graph_io.AffinityMatrix` or a plain array.
    """
    A = np.asarray(getattr(A, "A", A), dtype=float)
    n = A.shape[0]
    mask = A != 0
    W = np.zeros_like(A)
    if mask.any():
        r = distance_matrix(embedding(n))
        W[mask] = rbf_value(choice, r[mask]) * A[mask]
    np.fill_diagonal(W, 0.0)
    return W


def default_grid(points: int = 100) -> np.ndarray:
    return np.linspace(0.001, 1.0, points)


@dataclass(frozen=True)
class ShapingSelection:
    """Outcome of :func:`select_shaping_parameter`.

    Attributes
    ----------
    choice : RbfChoice
        The kernel with the selected ``c``.
    W : ndarray
        Masked kernel matrix at the selected ``c``.
    grid : ndarray
    conditions : ndarray
        Condition number of ``W`` at each grid point (``inf`` if singular).
    criterion : str
        ``"condition"`` when some grid point gave a nonsingular matrix;
        ``"range-condition"`` when all were singular and the ranking used
        :func:`range_condition_number` instead.
    scores : ndarray
        The values that were minimised.
    """

    choice: RbfChoice
    W: np.ndarray
    grid: np.ndarray
    conditions: np.ndarray
    criterion: str = "condition"
    scores: np.ndarray = None


def range_condition_number(M) -> float:
    """``max|lambda| / min|lambda|`` over eigenvalues above ``1e-13 max|lambda|``.

    This is the conditioning of ``M`` restricted to its numerical range,
    defined for singular matrices; ``inf`` only for the zero matrix.
    """
    M = np.asarray(M, dtype=float)
    values = np.abs(np.linalg.eigvalsh((M + M.T) / 2.0))
    top = values.max() if values.size else 0.0
    if top == 0.0:
        return float("inf")
    kept = values[values >= CONDITION_FLOOR * top]
    return float(top / kept.min())


def select_shaping_parameter(A, kind, grid=None) -> ShapingSelection:
    """Pick the ``c`` on ``grid`` that minimises the condition number of ``W``.

    Ties go to the smaller ``c``. Adjacency matrices of real networks are
    often singular (two leaves on the same hub already suffice), and then so
    is every masked kernel matrix. In that case the grid is ranked by
    :func:`range_condition_number` instead, and ``criterion`` says so.

    Raises
    ------
    NumericalError
        When ``W`` is the zero matrix at every grid point.
    """
    kind = RbfKind.parse(kind)
    grid = default_grid() if grid is None else np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise InputError("shaping-parameter grid is empty", stage="rbf")
    matrices = [masked_rbf_matrix(A, RbfChoice(kind, c)) for c in grid]
    conditions = np.array([condition_number(W) for W in matrices])
    criterion, scores = "condition", conditions
    if not np.any(np.isfinite(conditions)):
        criterion = "range-condition"
        scores = np.array([range_condition_number(W) for W in matrices])
        if not np.any(np.isfinite(scores)):
            raise NumericalError("kernel matrix is zero at every grid point",
                                 stage="rbf")
    # minimum value, then smallest c among exact ties
    best_value = scores[np.isfinite(scores)].min()
    candidates = np.flatnonzero(scores == best_value)
    best = candidates[np.argmin(grid[candidates])]
    return ShapingSelection(choice=RbfChoice(kind, float(grid[best])), W=matrices[best],
                            grid=grid, conditions=conditions, criterion=criterion,
                            scores=scores)
