"""Seeded k-means with k-means++ initialisation and restarts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError


@dataclass(frozen=True)
class KmeansConfig:
    """Parameters for :func:`kmeans`.

    ``tol`` is a relative tolerance on the decrease of inertia between two
    Lloyd iterations.
    """

    k: int
    restarts: int = 10
    max_iters: int = 300
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise InputError("k must be at least 1", stage="kmeans")
        if self.restarts < 1:
            raise InputError("restarts must be at least 1", stage="kmeans")
        if self.max_iters < 1:
            raise InputError("max_iters must be at least 1", stage="kmeans")


@dataclass(frozen=True)
class KmeansResult:
    labels: np.ndarray
    inertia: float
    centroids: np.ndarray
    n_iter: int
    restart: int


def _sq_dists(X, C):
    # Explicit differences rather than the expanded quadratic form: slower,
    # but exact ties are preserved under reflection of the data.
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kmeans_plus_plus(X, k, rng) -> np.ndarray:
    """Choose ``k`` initial centroids by D^2 sampling."""
    n = X.shape[0]
    centers = [int(rng.integers(n))]
    d2 = _sq_dists(X, X[centers]).min(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        u = rng.random()
        if total > 0:
            idx = int(np.searchsorted(np.cumsum(d2), u * total, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(u * n)
        centers.append(idx)
        d2 = np.minimum(d2, _sq_dists(X, X[[idx]])[:, 0])
    return X[centers].copy()


def lloyd(X, centroids, max_iters=300, tol=1e-6):
    """Run Lloyd iterations from the given centroids.

    Returns
    -------
    labels, centroids, history
        ``history`` lists the inertia after each assignment step.
    """
    C = np.array(centroids, dtype=float, copy=True)
    k = C.shape[0]
    history = []
    labels = None
    for _ in range(max_iters):
        D = _sq_dists(X, C)
        new_labels = np.argmin(D, axis=1)  # ties go to the lowest index
        inertia = float(D[np.arange(len(X)), new_labels].sum())
        history.append(inertia)
        stable = labels is not None and np.array_equal(new_labels, labels)
        labels = new_labels
        if stable:
            break
        if len(history) > 1 and history[-2] - inertia <= tol * history[-2]:
            break
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            owner_dist = ((X - C[labels]) ** 2).sum(axis=1)
            far = int(np.argmax(owner_dist))
            labels[far] = j
            C[j] = X[far]
            counts = np.bincount(labels, minlength=k)
        for j in range(k):
            members = labels == j
            if members.any():
                C[j] = X[members].mean(axis=0)
    return labels, C, history


def kmeans(points, cfg: KmeansConfig) -> KmeansResult:
    """Best of ``cfg.restarts`` k-means runs.

    Each restart draws its k-means++ seeding from an independent stream spawned
    from ``cfg.seed``. The restart with the lowest final inertia wins, the
    earliest restart on ties.

    Raises
    ------
    InputError
        For non-finite points or fewer points than clusters.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if not np.all(np.isfinite(X)):
        raise InputError("k-means input has non-finite entries", stage="kmeans")
    n = X.shape[0]
    if n < cfg.k:
        raise InputError(f"cannot form {cfg.k} clusters from {n} points",
                         stage="kmeans")
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    for restart, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        C0 = kmeans_plus_plus(X, cfg.k, rng)
        labels, C, history = lloyd(X, C0, cfg.max_iters, cfg.tol)
        # inertia of the returned assignment against the returned centroids
        inertia = float(((X - C[labels]) ** 2).sum())
        if best is None or inertia < best.inertia:
            best = KmeansResult(labels=labels, inertia=inertia, centroids=C,
                                n_iter=len(history), restart=restart)
    return best
