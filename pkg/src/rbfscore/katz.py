"""Katz proximity: a decayed sum over walks of every length.

For a weighted matrix ``W`` and decay ``beta`` the proximity is

    K = sum_{p >= 1} (beta W)^p = (I - beta W)^{-1} beta W,

which converges when ``beta * rho(W) < 1``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, InputError, KatzDivergenceError
from .linalg import solve_linear, spectral_radius, symmetrize

DEFAULT_BETA = 0.0025


@dataclass(frozen=True)
class KatzConfig:
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise InputError(f"Katz decay must be positive, got {self.beta!r}",
                             stage="katz")


def check_convergence(W, cfg: KatzConfig) -> float:
    """Return ``rho(W)``, raising if ``beta * rho(W) >= 1``.

    If power iteration does not settle, the largest absolute row sum (an
    upper bound on ``rho``) decides instead.
    """
    try:
        rho = spectral_radius(W)
    except ConvergenceError:
        bound = float(np.abs(W).sum(axis=1).max())
        if cfg.beta * bound < 1.0:
            return bound
        raise
    if cfg.beta * rho >= 1.0:
        raise KatzDivergenceError(
            f"Katz series diverges: beta={cfg.beta:g}, rho(W)={rho:.6g}, "
            f"beta*rho={cfg.beta * rho:.6g} (must be below 1)", stage="katz")
    return rho


def katz(W, cfg: KatzConfig = KatzConfig()) -> np.ndarray:
    """Closed-form Katz matrix, obtained by solving ``(I - beta W) K = beta W``.

    The result is symmetrised to remove round-off asymmetry from the solve.
    """
    W = symmetrize(W, stage="katz")
    check_convergence(W, cfg)
    n = W.shape[0]
    if not np.any(W):
        return np.zeros_like(W)
    bW = cfg.beta * W
    K = solve_linear(np.eye(n) - bW, bW, stage="katz")
    return (K + K.T) / 2.0


def katz_series(W, cfg: KatzConfig = KatzConfig(), terms: int = 200) -> np.ndarray:
    """Truncated walk sum ``sum_{p=1..terms} (beta W)^p`` by repeated products."""
    W = np.asarray(W, dtype=float)
    bW = cfg.beta * W
    power = bW.copy()
    total = bW.copy()
    for _ in range(terms - 1):
        power = power @ bW
        total += power
    return total
