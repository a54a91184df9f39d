"""Generate the 20-district covering fixture and its brute-force optimum."""

import json
import math
import random
import sys

import numpy as np


def geometric(n, radius, seed):
    rng = random.Random(seed)
    pts = [(rng.random(), rng.random()) for _ in range(n)]
    return [[1 if i == j or math.dist(pts[i], pts[j]) < radius else 0 for j in range(n)] for i in range(n)]


def brute_force(gamma):
    n = len(gamma)
    # reach[j]: districts covered by a facility at j (column j)
    reach = [sum(1 << i for i in range(n) if gamma[i][j]) for j in range(n)]
    masks = np.arange(1 << n, dtype=np.int64)
    cov = np.zeros_like(masks)
    for j in range(n):
        cov |= np.where((masks >> j) & 1, reach[j], 0)
    full = (1 << n) - 1
    pop = np.zeros_like(masks)
    for j in range(n):
        pop += (masks >> j) & 1
    feasible = cov == full
    best = int(pop[feasible].min())
    count = int((feasible & (pop == best)).sum())
    return {"optimum_openings": best, "optimal_sets": count, "feasible_sets": int(feasible.sum())}


def write_matrix(path, gamma, header):
    with open(path, "w") as f:
        f.write(f"# {header}\n")
        for row in gamma:
            f.write(" ".join(str(v) for v in row) + "\n")


if __name__ == "__main__":
    out = sys.argv[1]
    n, radius, seed = 20, 0.3, 2024
    gamma = geometric(n, radius, seed)
    write_matrix(f"{out}/geo20.txt", gamma, f"random geometric graph, n={n}, radius={radius}, seed={seed}")
    p5 = [[1 if abs(i - j) <= 1 else 0 for j in range(5)] for i in range(5)]
    k4 = [[1] * 4 for _ in range(4)]
    write_matrix(f"{out}/p5.txt", p5, "path on 5 districts")
    write_matrix(f"{out}/k4.txt", k4, "complete graph on 4 districts")
    expected = {name: brute_force(g) for name, g in (("geo20", gamma), ("p5", p5), ("k4", k4))}
    with open(f"{out}/expected.json", "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)
        f.write("\n")
    print(json.dumps(expected, indent=2))
