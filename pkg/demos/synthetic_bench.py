"""Compare the four variants on planted-partition graphs and print CSV."""

from rbfscore.synth import bench_csv, benchmark_matrix

rows = benchmark_matrix([(200, mu) for mu in (0.15, 0.45, 0.85)],
                        ["sc", "score", "score+", "scoreh+"], repeats=5)
print(bench_csv([r for r in rows if r["metric"] == "nmi"]), end="")
