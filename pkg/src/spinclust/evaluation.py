"""Partition comparison, minimum spanning trees, and synthetic test datasets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import DataMatrix
from .errors import DomainError


def adjusted_rand_index(a, b) -> float:
    """Chance-corrected agreement between two labelings of the same items.

    Computed from the contingency table with exact integer pair counts;
    1.0 for identical partitions, ~0 for independent ones. Returns 1.0 for
    the degenerate case where both partitions are trivial and identical.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 1:
        raise DomainError(f"labelings must be equal-length vectors, got {a.shape} vs {b.shape}")
    n = a.size
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    ka, kb = int(ai.max()) + 1, int(bi.max()) + 1
    table = np.zeros((ka, kb), dtype=np.int64)
    np.add.at(table, (ai, bi), 1)

    def pairs(x) -> int:
        return int(sum(int(v) * (int(v) - 1) // 2 for v in np.ravel(x)))

    sum_ij = pairs(table)
    sum_a = pairs(table.sum(axis=1))
    sum_b = pairs(table.sum(axis=0))
    total = n * (n - 1) // 2
    expected = sum_a * sum_b / total
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:
        return 1.0
    return (sum_ij - expected) / (max_index - expected)


@dataclass
class MstEdgeList:
    """N-1 edges (i, j, weight) spanning all nodes with minimal total weight."""

    edges: list[tuple[int, int, float]]

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def to_dict(self) -> dict:
        return {"kind": "mst",
                "edges": [{"i": i, "j": j, "w": w} for i, j, w in self.edges]}

    def to_dot(self, ids: list[str] | None = None) -> str:
        lines = ["graph mst {"]
        for i, j, w in self.edges:
            a = ids[i] if ids else str(i)
            b = ids[j] if ids else str(j)
            lines.append(f'  "{a}" -- "{b}" [label="{w:.6g}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def minimum_spanning_tree(dist: np.ndarray) -> MstEdgeList:
    """Kruskal's algorithm; ties broken by (weight, i, j) lexicographic order."""
    d = np.asarray(dist, dtype=float)
    n = d.shape[0]
    if d.ndim != 2 or d.shape[1] != n or n < 2:
        raise DomainError("distance matrix must be square with N >= 2")
    iu, ju = np.triu_indices(n, k=1)
    order = sorted(range(iu.size), key=lambda k: (d[iu[k], ju[k]], int(iu[k]), int(ju[k])))
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges: list[tuple[int, int, float]] = []
    for k in order:
        i, j = int(iu[k]), int(ju[k])
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[rj] = ri
            edges.append((i, j, float(d[i, j])))
            if len(edges) == n - 1:
                break
    return MstEdgeList(edges)


def generate_circles(n: int, noise: float = 0.5, seed: int = 0) -> tuple[DataMatrix, np.ndarray]:
    """Two concentric rings of n/2 points each at radii 1.0 and 0.4.

    Points sit at evenly spaced angles; radii are perturbed by Gaussian
    noise of scale 0.1 * noise. Returns the 2-D coordinates and the
    ground-truth ring labels (0 = outer, 1 = inner).
    """
    if n % 2 != 0:
        raise DomainError("n must be even")
    rng = np.random.default_rng(seed)
    half = n // 2
    coords = np.zeros((n, 2))
    labels = np.zeros(n, dtype=int)
    for ring, radius in enumerate((1.0, 0.4)):
        theta = 2.0 * math.pi * np.arange(half) / half
        r = radius + rng.normal(scale=0.1 * noise, size=half)
        sl = slice(ring * half, (ring + 1) * half)
        coords[sl, 0] = r * np.cos(theta)
        coords[sl, 1] = r * np.sin(theta)
        labels[sl] = ring
    return DataMatrix(coords, None), labels


def generate_blobs(n: int, dims: int, sigmas, seed: int = 0) -> tuple[DataMatrix, np.ndarray]:
    """Isotropic Gaussian clusters with per-cluster spreads ``sigmas``.

    Cluster sizes are balanced (first n mod k clusters get one extra point).
    Centers are drawn uniformly in the box [-10*max(sigma), 10*max(sigma)]^dims
    and redrawn until every pair is at least 10*max(sigma) apart, which keeps
    the clusters separable at any dimensionality.
    """
    sigmas = [float(s) for s in sigmas]
    k = len(sigmas)
    if k < 1 or n < k:
        raise DomainError("need at least one sigma and n >= number of clusters")
    if dims < 2:
        raise DomainError("dims must be >= 2")
    rng = np.random.default_rng(seed)
    reach = 10.0 * max(sigmas)
    for _ in range(1000):
        centers = rng.uniform(-reach, reach, size=(k, dims))
        ok = True
        for i in range(k):
            for j in range(i + 1, k):
                if np.linalg.norm(centers[i] - centers[j]) < reach:
                    ok = False
        if ok:
            break
    else:
        raise DomainError("failed to place well-separated centers")

    base, extra = divmod(n, k)
    sizes = [base + (1 if c < extra else 0) for c in range(k)]
    points = []
    labels = []
    for c, (size, sigma) in enumerate(zip(sizes, sigmas)):
        points.append(centers[c] + sigma * rng.normal(size=(size, dims)))
        labels.extend([c] * size)
    return DataMatrix(np.vstack(points), None), np.array(labels, dtype=int)
