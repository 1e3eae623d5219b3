"""Spectral community detection on ratios of eigenvectors.

Four variants share most of their machinery:

``scoreh+``
    RBF-weighted adjacency, then Katz proximity, then a ridge-regularised
    normalisation, eigen-selection with a weak/strong signal test, ratios of
    eigenvectors and k-means.
``score+``
    The same pipeline run on the plain adjacency matrix.
``score``
    Ratios of the leading eigenvectors of the adjacency matrix itself.
``sc``
    k-means directly on the top eigenvectors of the regularised normalisation.
"""

from __future__ import annotations

import enum
import time
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import InputError, NumericalError
from .graph_io import DEFAULT_MAX_NODES, Graph, affinity
from .katz import KatzConfig, katz
from .kmeans import KmeansConfig, kmeans
from .linalg import EigenBundle, condition_number, eig_symmetric, top_by_magnitude
from .rbf import RbfChoice, masked_rbf_matrix, select_shaping_parameter

DENOMINATOR_FLOOR = 1e-8


class Variant(str, enum.Enum):
    SC = "sc"
    SCORE = "score"
    SCORE_PLUS = "score+"
    SCOREH_PLUS = "scoreh+"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("plus", "+").replace("_", "")
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown algorithm {value!r}", stage="config") from None


class RatioMode(str, enum.Enum):
    RAW = "raw"
    WEIGHTED = "weighted"

    @classmethod
    def parse(cls, value) -> "RatioMode":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        if key == "eigenvalue_weighted":
            key = "weighted"
        try:
            return cls(key)
        except ValueError:
            raise InputError(f"unknown ratio mode {value!r}", stage="config") from None


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of :func:`detect`.

    Attributes
    ----------
    variant : Variant
    k : int
        Number of communities, at least 2.
    sigma : float
        Ridge added to every degree, as a multiple of the largest degree.
    t : float
        Threshold of the weak-signal test, in (0, 1).
    rbf : RbfChoice
        Kernel and shaping parameter. With ``auto_c`` only the kind is used
        and ``c`` is chosen on ``c_grid`` by condition number.
    katz : KatzConfig
    ratio_mode : RatioMode
        ``raw`` divides eigenvectors; ``weighted`` scales each by its
        eigenvalue first.
    ratio_clamp : float or None
        Clip ratio features to ``[-T, T]`` when set.
    restarts, max_iters, kmeans_tol, seed
        Passed to k-means.
    diagnostics : bool
        Compute condition numbers of every stage matrix. Costs one extra
        eigenvalue pass per stage.
    """

    variant: Variant = Variant.SCOREH_PLUS
    k: int = 2
    sigma: float = 0.1
    t: float = 0.1
    rbf: RbfChoice = field(default_factory=RbfChoice)
    auto_c: bool = False
    c_grid: tuple | None = None
    katz: KatzConfig = field(default_factory=KatzConfig)
    ratio_mode: RatioMode = RatioMode.RAW
    ratio_clamp: float | None = None
    restarts: int = 10
    max_iters: int = 300
    kmeans_tol: float = 1e-6
    seed: int = 0
    eig_method: str = "lapack"
    diagnostics: bool = True
    max_nodes: int = DEFAULT_MAX_NODES

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        object.__setattr__(self, "ratio_mode", RatioMode.parse(self.ratio_mode))
        if int(self.k) != self.k or self.k < 2:
            raise InputError(f"k must be an integer of at least 2, got {self.k!r}",
                             stage="config")
        if not 0.0 < self.t < 1.0:
            raise InputError(f"t must lie in (0, 1), got {self.t!r}", stage="config")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise InputError(f"sigma must be non-negative, got {self.sigma!r}",
                             stage="config")
        if self.ratio_clamp is not None and not self.ratio_clamp > 0:
            raise InputError("ratio clamp must be positive", stage="config")
        if self.c_grid is not None:
            object.__setattr__(self, "c_grid", tuple(float(c) for c in self.c_grid))

    def kmeans_config(self, k=None) -> KmeansConfig:
        return KmeansConfig(k=self.k if k is None else k, restarts=self.restarts,
                            max_iters=self.max_iters, tol=self.kmeans_tol, seed=self.seed)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["variant"] = self.variant.value
        out["ratio_mode"] = self.ratio_mode.value
        out["rbf"] = {"kind": self.rbf.kind.value, "c": self.rbf.c}
        out["katz"] = {"beta": self.katz.beta}
        out["c_grid"] = None if self.c_grid is None else list(self.c_grid)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        data = dict(data)
        if "rbf" in data and isinstance(data["rbf"], dict):
            data["rbf"] = RbfChoice(**data["rbf"])
        if "katz" in data and isinstance(data["katz"], dict):
            data["katz"] = KatzConfig(**data["katz"])
        return cls(**data)


@dataclass(frozen=True)
class SignalReport:
    """Outcome of the weak/strong signal test.

    Attributes
    ----------
    eigenvalues : tuple of float
        The largest-magnitude eigenvalues (up to ``k + 3``), decreasing.
    gaps : tuple of float
        ``1 - lambda_j / lambda_{j-1}`` for ``j = k+1, k+2, k+3`` (1-based),
        as far as the spectrum allows; ``nan`` where the denominator is 0.
    ratio : float
        ``lambda_{k+1} / lambda_k`` among the ``k + 1`` largest-magnitude
        eigenvalues, the quantity the test thresholds.
    classification : str
        ``"weak"`` or ``"strong"``.
    k_prime : int
        Number of eigenvectors kept: ``k + 1`` when weak, else ``k``.
    """

    eigenvalues: tuple
    gaps: tuple
    ratio: float
    classification: str
    k_prime: int

    @property
    def weak(self) -> bool:
        return self.classification == "weak"

    def to_dict(self) -> dict:
        return {"eigenvalues": list(self.eigenvalues), "gaps": list(self.gaps),
                "ratio": self.ratio, "classification": self.classification,
                "k_prime": self.k_prime}


def regularized_laplacian(K, sigma: float = 0.1) -> np.ndarray:
    """``(D + sigma d_max I)^{-1/2} K (D + sigma d_max I)^{-1/2}``.

    ``D`` holds the row sums of ``K`` and ``d_max`` is the largest of them.
    """
    K = np.asarray(K, dtype=float)
    if not np.all(np.isfinite(K)):
        raise NumericalError("matrix has non-finite entries", stage="laplacian")
    d = K.sum(axis=1)
    scale = d + sigma * d.max()
    if np.any(scale <= 0):
        raise NumericalError("regularised degree is not positive for some node; "
                             "use sigma > 0 for graphs with isolated nodes",
                             stage="laplacian")
    inv = 1.0 / np.sqrt(scale)
    L = inv[:, None] * K * inv[None, :]
    return (L + L.T) / 2.0


def _top_sorted(values, m):
    keep = np.sort(np.argsort(-np.abs(values), kind="stable")[:m])
    return values[keep]


def classify_signal(eigenvalues, k: int, t: float = 0.1) -> SignalReport:
    """Weak/strong signal test on the largest-magnitude eigenvalues.

    Parameters
    ----------
    eigenvalues : array_like
        The ``m >= k + 1`` largest-magnitude eigenvalues, sorted decreasing.
        Pass ``m = k + 3`` to get all three diagnostic gaps.
    k : int
    t : float

    Notes
    -----
    Gap ``j`` is taken over the ``j`` largest-magnitude eigenvalues sorted
    decreasing, as ``1 - last / second_to_last``. The signal is weak when
    the last two of the ``k + 1`` largest are positive and gap ``k + 1`` is
    at most ``t``. Because each gap uses the list it would be selected
    from, a negative eigenvalue of large magnitude makes the gap exceed 1.
    """
    values = np.asarray(eigenvalues, dtype=float)
    if values.size < k + 1:
        raise InputError(f"signal test needs {k + 1} eigenvalues, got {values.size}",
                         stage="signal")
    head = _top_sorted(values, k + 1)
    lam_k, lam_k1 = head[k - 1], head[k]
    with np.errstate(over="ignore"):
        ratio = float(lam_k1 / lam_k) if lam_k != 0 else float("nan")
    weak = bool(lam_k > 0 and lam_k1 > 0 and ratio >= 1.0 - t)
    gaps = []
    for j in range(k + 1, min(k + 3, values.size) + 1):
        sub = _top_sorted(values, j)
        prev = sub[j - 2]
        with np.errstate(over="ignore"):
            gaps.append(float(1.0 - sub[j - 1] / prev) if prev != 0 else float("nan"))
    return SignalReport(eigenvalues=tuple(float(v) for v in np.sort(values)[::-1]),
                        gaps=tuple(gaps), ratio=ratio,
                        classification="weak" if weak else "strong",
                        k_prime=k + 1 if weak else k)


def ratio_features(values, vectors, mode="raw", clamp=None,
                   floor: float = DENOMINATOR_FLOOR) -> np.ndarray:
    """Divide eigenvectors 2..k' entrywise by the leading one.

    Parameters
    ----------
    values : array_like of shape (k',)
        Eigenvalues, largest first.
    vectors : ndarray of shape (n, k')
    mode : {"raw", "weighted"}
        ``weighted`` multiplies column ``j`` by ``values[j] / values[0]``,
        which is the ratio of eigenvalue-scaled eigenvectors.
    clamp : float, optional
        Clip the result to ``[-clamp, clamp]``.
    floor : float
        Denominator entries smaller than this in magnitude are replaced by
        ``floor`` with the sign of the entry (positive for exact zeros).
    """
    mode = RatioMode.parse(mode)
    values = np.asarray(values, dtype=float)
    vectors = np.asarray(vectors, dtype=float)
    if vectors.ndim != 2 or vectors.shape[1] < 2:
        raise InputError("ratio features need at least two eigenvectors",
                         stage="features")
    lead = vectors[:, 0].copy()
    small = np.abs(lead) < floor
    lead[small] = np.where(lead[small] < 0, -floor, floor)
    F = vectors[:, 1:] / lead[:, None]
    if mode is RatioMode.WEIGHTED:
        F = F * (values[1:] / values[0])
    if clamp is not None:
        F = np.clip(F, -clamp, clamp)
    return F


def component_leading_vector(M, leading) -> np.ndarray:
    """Denominator for the ratio features that stays positive on every component.

    On a connected graph this is ``leading`` itself. When the support of
    ``M`` splits into several components, the leading eigenvector lives on
    one of them and is rounding noise elsewhere, so dividing by it would
    amplify noise. Each component then gets the unit-norm Perron vector of
    its own diagonal block instead; on the component that carries
    ``leading`` this reproduces ``leading`` up to sign.
    """
    M = np.asarray(M, dtype=float)
    count, comp = connected_components(csr_matrix(M != 0), directed=False)
    if count == 1:
        return np.asarray(leading, dtype=float)
    out = np.ones(M.shape[0])
    for c in range(count):
        idx = np.flatnonzero(comp == c)
        if idx.size == 1:
            continue
        _, vecs = np.linalg.eigh(M[np.ix_(idx, idx)])
        out[idx] = np.abs(vecs[:, -1])
    return out


@dataclass
class DetectionResult:
    """Labels and diagnostics from one :func:`detect` run.

    Attributes
    ----------
    labels : ndarray of int
        Community per node, in the graph's node order.
    node_order : tuple of str
        External node tokens in index order. The RBF weighting depends on
        this order, so it is part of the result.
    k_prime : int
        Number of eigenvectors that fed the features.
    signal : SignalReport or None
        Present for the variants that run the weak/strong test.
    rbf : RbfChoice or None
        Kernel actually used (after automatic selection of ``c``).
    condition_numbers : dict
        Stage name to condition number, when diagnostics were requested.
    timings : dict
        Stage name to wall-clock seconds.
    inertia : float
        Final k-means inertia.
    stages : dict or None
        Intermediate matrices, when requested.
    """

    labels: np.ndarray
    node_order: tuple
    variant: Variant
    k: int
    k_prime: int
    signal: SignalReport | None
    rbf: RbfChoice | None
    condition_numbers: dict
    timings: dict
    inertia: float
    stages: dict | None = None


class _Timer:
    def __init__(self):
        self.timings = {}

    def __call__(self, name):
        timer = self

        class _Block:
            def __enter__(self):
                self.start = time.perf_counter()

            def __exit__(self, *exc):
                timer.timings[name] = timer.timings.get(name, 0.0) + (
                    time.perf_counter() - self.start)
                return False

        return _Block()


def _finite(x):
    return float(x) if np.isfinite(x) else float("inf")


def detect(graph: Graph, cfg: PipelineConfig = PipelineConfig(),
           keep_stages: bool = False) -> DetectionResult:
    """Run one community-detection variant on ``graph``.

    Parameters
    ----------
    graph : Graph
    cfg : PipelineConfig
    keep_stages : bool
        Keep the intermediate matrices in ``result.stages``: ``A``, ``W``,
        ``K``, ``L``, ``eigenvalues``, ``eigenvectors`` and ``features``
        (whichever the variant produces).

    Returns
    -------
    DetectionResult
    """
    k = cfg.k
    if k > graph.n:
        raise InputError(f"k={k} exceeds the number of nodes ({graph.n})",
                         stage="config")
    variant = cfg.variant
    timer = _Timer()
    conds = {}
    stages = {} if keep_stages else None

    def note(name, M):
        if keep_stages:
            stages[name] = M
        if cfg.diagnostics and M.ndim == 2:
            with timer("diagnostics"):
                conds[name] = _finite(condition_number(M))

    with timer("affinity"):
        A = affinity(graph, max_nodes=cfg.max_nodes).A
    note("A", A)

    rbf_used = None
    signal = None
    if variant is Variant.SCORE:
        with timer("eigen"):
            bundle = top_by_magnitude(eig_symmetric(A, cfg.eig_method), k)
        k_prime = k
    else:
        if variant is Variant.SCOREH_PLUS:
            with timer("rbf"):
                if cfg.auto_c:
                    sel = select_shaping_parameter(A, cfg.rbf.kind, cfg.c_grid)
                    rbf_used, W = sel.choice, sel.W
                else:
                    rbf_used = cfg.rbf
                    W = masked_rbf_matrix(A, rbf_used)
            note("W", W)
            with timer("katz"):
                K = katz(W, cfg.katz)
            note("K", K)
        else:
            K = A
        with timer("laplacian"):
            L = regularized_laplacian(K, cfg.sigma)
        note("L", L)
        with timer("eigen"):
            full = eig_symmetric(L, cfg.eig_method)
        if variant is Variant.SC:
            # conventional spectral clustering: the k algebraically largest
            bundle = EigenBundle(values=full.values[:k], vectors=full.vectors[:, :k],
                                 selection="algebraic")
            k_prime = k
        else:
            if k + 1 > graph.n:
                raise InputError(f"signal test needs k+1={k + 1} eigenpairs but the "
                                 f"graph has {graph.n} nodes", stage="eigen")
            wide = top_by_magnitude(full, min(k + 3, graph.n))
            with timer("signal"):
                signal = classify_signal(wide.values, k, cfg.t)
            k_prime = signal.k_prime
            head = top_by_magnitude(full, k + 1)
            bundle = EigenBundle(values=head.values[:k_prime],
                                 vectors=head.vectors[:, :k_prime],
                                 selection="by-magnitude")

    if keep_stages:
        stages["eigenvalues"] = bundle.values.copy()
        stages["eigenvectors"] = bundle.vectors.copy()

    with timer("features"):
        if variant is Variant.SC:
            F = bundle.vectors
        else:
            mode = RatioMode.RAW if variant is Variant.SCORE else cfg.ratio_mode
            vectors = bundle.vectors.copy()
            vectors[:, 0] = component_leading_vector(A if variant is Variant.SCORE else L,
                                                     vectors[:, 0])
            F = ratio_features(bundle.values, vectors, mode, cfg.ratio_clamp)
    if keep_stages:
        stages["features"] = F

    with timer("kmeans"):
        km = kmeans(F, cfg.kmeans_config())

    return DetectionResult(labels=km.labels, node_order=graph.node_names,
                           variant=variant, k=k, k_prime=k_prime, signal=signal,
                           rbf=rbf_used, condition_numbers=conds,
                           timings=timer.timings, inertia=km.inertia, stages=stages)
