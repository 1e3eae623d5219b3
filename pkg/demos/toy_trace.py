"""Walk the six-node graph through every stage and print the matrices.

Run with ``python demos/toy_trace.py [c]``. The default width 0.2098 is the
Gaussian width whose adjacent-node weight is 0.404; pass 0.2 to see the
trace at the nominal width instead.
"""

import sys

import numpy as np

from rbfscore import PipelineConfig, RbfChoice, detect, modularity, toy_graph

c = float(sys.argv[1]) if len(sys.argv) > 1 else 0.2098
graph = toy_graph()
result = detect(graph, PipelineConfig(k=2, rbf=RbfChoice("gaussian", c)), keep_stages=True)

np.set_printoptions(precision=4, suppress=True)
for name in ("A", "W", "K", "L"):
    print(f"{name}  (condition number {result.condition_numbers[name]:.4f})")
    print(result.stages[name], end="\n\n")
print("largest-magnitude eigenvalues:", np.array(result.signal.eigenvalues))
print("signal:", result.signal.classification, "k' =", result.k_prime)
print("features:", result.stages["features"].ravel())
print("labels:", result.labels, " modularity:", round(modularity(graph, result.labels), 4))
