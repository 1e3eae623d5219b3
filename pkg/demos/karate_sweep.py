"""Shaping-parameter sweep on Zachary's karate club, one line per cell."""

import numpy as np

from rbfscore import SweepSpec, load_dataset, sweep

graph = load_dataset("karate")
spec = SweepSpec(kinds=("gaussian", "mq", "imq"),
                 default_grid=tuple(np.linspace(0.001, 0.1, 10)))
result = sweep(graph, spec)
print(result.to_csv(), end="")
best = result.best
print(f"best: {best.kind.value} c={best.c:.4f} NMI={best.mean:.4f}")
