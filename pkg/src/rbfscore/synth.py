"""Planted-partition graphs and the parameter-sweep / benchmark harness."""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .exceptions import InputError, RbfScoreError
from .graph_io import Graph
from .metrics import modularity, nmi
from .rbf import KIND_ORDER, RbfChoice, RbfKind
from .spectral import PipelineConfig, Variant, detect

THREADS_ENV = "RBF_SCORE_THREADS"


def worker_count() -> int:
    """Worker threads for sweeps: ``RBF_SCORE_THREADS`` or the core count."""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            count = int(value)
        except ValueError:
            raise InputError(f"{THREADS_ENV} must be an integer, got {value!r}",
                             stage="config") from None
        if count < 1:
            raise InputError(f"{THREADS_ENV} must be at least 1", stage="config")
        return count
    return os.cpu_count() or 1


def _map(fn, items):
    items = list(items)
    workers = min(worker_count(), max(len(items), 1))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def derive_seed(*key) -> int:
    """A 32-bit seed determined by a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(x) for x in key]).generate_state(1)[0])


@dataclass(frozen=True)
class PlantedConfig:
    """Planted-partition parameters.

    Attributes
    ----------
    n : int
        Number of nodes.
    k : int
        Number of communities. Sizes are ``n // k`` with the remainder added
        to the last community.
    avg_degree : float
        Target mean degree.
    mu : float
        Probability that an edge leaves its initiating node's community.
    seed : int
    """

    n: int = 200
    k: int = 4
    avg_degree: float = 10.0
    mu: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise InputError("planted graph needs at least two nodes", stage="generate")
        if not 1 <= self.k <= self.n:
            raise InputError("need 1 <= k <= n", stage="generate")
        if not 0.0 <= self.mu <= 1.0:
            raise InputError("mu must lie in [0, 1]", stage="generate")
        if not 0 < self.avg_degree < self.n:
            raise InputError("average degree must lie in (0, n)", stage="generate")

    def block_sizes(self) -> np.ndarray:
        sizes = np.full(self.k, self.n // self.k)
        sizes[-1] += self.n % self.k
        return sizes


def generate_planted(cfg: PlantedConfig, max_tries: int = 1000) -> Graph:
    """Sample a planted-partition graph.

    Nodes are assigned to blocks at random. About ``n * avg_degree / 2``
    edges are drawn, spread as evenly as possible over the nodes that
    initiate them. An edge stays in its initiator's block with probability
    ``1 - mu`` and goes to a uniformly chosen node of another block
    otherwise. Repeated edges are redrawn.

    The returned graph is indexed by first appearance in its (random) edge
    order, the same indexing a reader of the written edge list would
    produce.

    Raises
    ------
    InputError
        When the configuration cannot be realised, e.g. ``mu < 1`` with a
        single-node block or ``mu > 0`` with one block.
    """
    rng = np.random.default_rng(cfg.seed)
    sizes = cfg.block_sizes()
    if cfg.mu < 1 and sizes.min() < 2:
        raise InputError("every block needs two nodes for intra-block edges",
                         stage="generate")
    if cfg.mu > 0 and cfg.k < 2:
        raise InputError("inter-block edges need at least two blocks", stage="generate")
    block = rng.permutation(np.repeat(np.arange(cfg.k), sizes))
    members = [np.flatnonzero(block == b) for b in range(cfg.k)]
    outsiders = [np.flatnonzero(block != b) for b in range(cfg.k)]

    m_target = int(round(cfg.n * cfg.avg_degree / 2.0))
    stubs = np.full(cfg.n, m_target // cfg.n)
    stubs[rng.choice(cfg.n, size=m_target % cfg.n, replace=False)] += 1
    initiators = rng.permutation(np.repeat(np.arange(cfg.n), stubs))

    seen = set()
    edges = []
    for u in initiators:
        b = block[u]
        # the inside/outside decision is made once per edge so that rejected
        # repeats do not bias the mixing fraction
        pool = members[b] if rng.random() >= cfg.mu else outsiders[b]
        for _ in range(max_tries):
            v = int(pool[rng.integers(pool.size)])
            key = (min(u, v), max(u, v))
            if v != u and key not in seen:
                seen.add(key)
                edges.append((int(u), v))
                break
        else:
            raise InputError("could not place an edge without repeats; lower the "
                             "average degree", stage="generate")

    names = [str(i + 1) for i in range(cfg.n)]
    pairs = [(names[u], names[v]) for u, v in edges]
    truth = {names[i]: int(block[i]) for i in range(cfg.n)}
    return Graph.from_edges(pairs, names=names, ground_truth=truth)


def mixing_fraction(graph: Graph, labels=None) -> float:
    """Fraction of edges whose endpoints carry different labels."""
    labels = graph.ground_truth if labels is None else np.asarray(labels)
    if labels is None:
        raise InputError("graph has no labels", stage="metrics")
    if graph.m == 0:
        return 0.0
    u, v = graph.edges[:, 0], graph.edges[:, 1]
    return float(np.mean(labels[u] != labels[v]))


def _objective(graph, labels, objective):
    if objective == "nmi":
        return nmi(graph.ground_truth, labels)
    return modularity(graph, labels)


@dataclass(frozen=True)
class SweepSpec:
    """What a shaping-parameter sweep visits.

    ``grids`` maps each kind to its list of ``c`` values; kinds without an
    entry use ``default_grid``.
    """

    kinds: tuple = (RbfKind.IMQ,)
    default_grid: tuple = tuple(np.linspace(0.001, 0.1, 100))
    grids: dict = field(default_factory=dict)
    objective: str = "nmi"
    repeats: int = 1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kinds", tuple(RbfKind.parse(k) for k in self.kinds))
        object.__setattr__(self, "grids",
                           {RbfKind.parse(k): tuple(float(c) for c in v)
                            for k, v in dict(self.grids).items()})
        if self.objective not in ("nmi", "modularity"):
            raise InputError(f"unknown objective {self.objective!r}", stage="sweep")
        if self.repeats < 1:
            raise InputError("repeats must be at least 1", stage="sweep")

    def grid(self, kind) -> tuple:
        return self.grids.get(RbfKind.parse(kind), tuple(self.default_grid))


@dataclass(frozen=True)
class SweepRow:
    kind: RbfKind
    c: float
    mean: float
    variance: float
    runs: int
    error: str | None = None

    @property
    def missing(self) -> bool:
        return self.runs == 0


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    best: SweepRow | None

    def to_csv(self) -> str:
        lines = ["kind,c,mean,variance,runs,error"]
        for r in self.rows:
            err = "" if r.error is None else r.error.replace(",", ";").replace("\n", " ")
            lines.append(f"{r.kind.value},{r.c!r},{r.mean!r},{r.variance!r},{r.runs},{err}")
        return "\n".join(lines) + "\n"


def sweep(graph: Graph, spec: SweepSpec, base: PipelineConfig = None) -> SweepResult:
    """Score every (kind, c) cell of ``spec`` with the SCOREH+ pipeline.

    Each repeat of a cell uses a k-means seed derived from
    ``(spec.seed, kind index, c index, repeat)``. Cells where every repeat
    fails are kept as missing rows with the error message. The best row has
    the highest mean; ties go to smaller ``c`` and then to the kind order
    Gaussian, MQ, iMQ.
    """
    if spec.objective == "nmi" and graph.ground_truth is None:
        raise InputError("the nmi objective needs ground-truth labels", stage="sweep")
    base = base or PipelineConfig()
    base = replace(base, variant=Variant.SCOREH_PLUS, auto_c=False, diagnostics=False)

    cells = []
    for kind_idx, kind in enumerate(spec.kinds):
        grid = spec.grid(kind)
        if len(grid) == 0:
            raise InputError(f"empty grid for {kind.value}", stage="sweep")
        for c_idx, c in enumerate(grid):
            cells.append((kind_idx, kind, c_idx, float(c)))

    def run(cell):
        kind_idx, kind, c_idx, c = cell
        scores, error = [], None
        for rep in range(spec.repeats):
            seed = derive_seed(spec.seed, kind_idx, c_idx, rep)
            try:
                cfg = replace(base, rbf=RbfChoice(kind, c), seed=seed)
                labels = detect(graph, cfg).labels
                scores.append(_objective(graph, labels, spec.objective))
            except RbfScoreError as exc:
                error = f"{type(exc).__name__}: {exc}"
        if not scores:
            return SweepRow(kind, c, float("nan"), float("nan"), 0, error)
        scores = np.asarray(scores)
        return SweepRow(kind, c, float(scores.mean()), float(scores.var()),
                        len(scores), error)

    rows = tuple(_map(run, cells))
    usable = [r for r in rows if not r.missing]
    best = None
    if usable:
        best = min(usable, key=lambda r: (-r.mean, r.c, KIND_ORDER.index(r.kind)))
    return SweepResult(rows=rows, best=best)


BENCH_COLUMNS = ("n", "mu", "variant", "metric", "mean", "variance", "runtime_seconds")


def benchmark_matrix(configs, variants, repeats: int = 1, base: PipelineConfig = None,
                     k: int = 4, avg_degree: float = 10.0, seed: int = 0,
                     graphs=None) -> list:
    """Run every variant on planted graphs for every ``(n, mu)`` pair.

    Parameters
    ----------
    configs : iterable of (n, mu)
    variants : iterable of Variant or str
    repeats : int
        Planted graphs per ``(n, mu)``; graph ``r`` of config ``i`` is
        generated with the seed derived from ``(seed, i, r)``.
    base : PipelineConfig, optional
        Settings shared by all runs; ``variant``, ``k`` and ``seed`` are
        overridden per run.
    graphs : list of (n, mu, Graph), optional
        Extra labelled graphs to include as-is (for example ingested
        benchmark files); ``repeats`` then varies only the k-means seed.

    Returns
    -------
    list of dict
        One row per (n, mu, variant, metric) with keys :data:`BENCH_COLUMNS`.
        Failed runs are left out of the aggregates; a cell where every run
        failed has ``nan`` mean and variance.
    """
    variants = [Variant.parse(v) for v in variants]
    if not variants:
        return []
    base = base or PipelineConfig()
    base = replace(base, diagnostics=False)

    jobs = []
    for cfg_idx, (n, mu) in enumerate(configs):
        for rep in range(repeats):
            jobs.append(("planted", cfg_idx, int(n), float(mu), rep, None))
    for g_idx, (n, mu, g) in enumerate(graphs or ()):
        for rep in range(repeats):
            jobs.append(("given", g_idx, int(n), float(mu), rep, g))

    def run(job):
        source, idx, n, mu, rep, g = job
        if g is None:
            g = generate_planted(PlantedConfig(n=n, k=k, avg_degree=avg_degree, mu=mu,
                                               seed=derive_seed(seed, idx, rep)))
        k_here = int(g.ground_truth.max()) + 1
        out = []
        for variant in variants:
            cfg = replace(base, variant=variant, k=k_here,
                          seed=derive_seed(seed, idx, rep, 1))
            start = time.perf_counter()
            try:
                labels = detect(g, cfg).labels
                scores = {"nmi": nmi(g.ground_truth, labels),
                          "modularity": modularity(g, labels)}
            except RbfScoreError:
                scores = None
            out.append((source, idx, n, mu, variant, scores, time.perf_counter() - start))
        return out

    results = [row for chunk in _map(run, jobs) for row in chunk]
    rows = []
    keys = []
    for source, idx, n, mu, variant, _, _ in results:
        key = (source, idx, n, mu, variant)
        if key not in keys:
            keys.append(key)
    for key in keys:
        runs = [r for r in results if r[:5] == key]
        runtime = float(np.mean([r[6] for r in runs]))
        for metric in ("nmi", "modularity"):
            vals = np.array([r[5][metric] for r in runs if r[5] is not None])
            mean = float(vals.mean()) if vals.size else float("nan")
            var = float(vals.var()) if vals.size else float("nan")
            rows.append({"n": key[2], "mu": key[3], "variant": key[4].value,
                         "metric": metric, "mean": mean, "variance": var,
                         "runtime_seconds": runtime})
    return rows


def bench_csv(rows) -> str:
    lines = [",".join(BENCH_COLUMNS)]
    for r in rows:
        lines.append(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c])
                              for c in BENCH_COLUMNS))
    return "\n".join(lines) + "\n"
