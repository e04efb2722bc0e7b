"""Compare the compiled and pure-Python LexDijkstra kernels.

    python3 benchmarks/bench_lexdijkstra.py [sizes ...]
"""
import sys

from cyclebench.bench import bench_kernels


def main(argv):
    sizes = [int(a) for a in argv] or [100, 200, 400, 800]
    print(f"{'V':>6} {'E':>6} {'python s':>10} {'cython s':>10} {'speedup':>8} agree")
    for r in bench_kernels(sizes):
        cy = r.get("cython_seconds", float("nan"))
        sp = r.get("speedup", float("nan"))
        print(f"{r['vertices']:>6} {r['edges']:>6} {r['python_seconds']:>10.4f} {cy:>10.4f} {sp:>8.1f} {r['agree']}")


if __name__ == "__main__":
    main(sys.argv[1:])
