"""Agglomerative hierarchical clustering for heatmap row ordering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LINKAGES = ("complete", "average", "single")


@dataclass(frozen=True)
class Merge:
    """One agglomeration step; `left` < `right` are cluster indices.

    Original rows are clusters 0..n-1; the merge at step t creates cluster
    n + t.
    """

    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    n_leaves: int
    merges: tuple[Merge, ...]
    leaf_order: tuple[int, ...]
    linkage: str


def _leaf_order(n: int, merges: tuple[Merge, ...]) -> tuple[int, ...]:
    children = {n + t: (m.left, m.right) for t, m in enumerate(merges)}
    heights = {i: 0.0 for i in range(n)}
    for t, m in enumerate(merges):
        heights[n + t] = m.height

    def walk(c: int) -> list[int]:
        if c < n:
            return [c]
        a, b = sorted(children[c], key=lambda x: (heights[x], x))
        return walk(a) + walk(b)

    return tuple(walk(n + len(merges) - 1))


def hclust(points: np.ndarray, linkage: str = "complete") -> Dendrogram:
    """Agglomerative clustering on Euclidean distances.

    Cluster distances are maintained with the Lance-Williams updates for the
    chosen linkage. Ties between candidate merges break on the smallest
    (left, right) cluster-index pair, so the merge sequence is deterministic.
    Leaf order comes from a depth-first walk that visits the shallower
    subtree first, smaller index first at equal heights.
    """
    if linkage not in LINKAGES:
        raise ValueError(f"linkage must be one of {LINKAGES}, got '{linkage}'")
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("clustering requires an n x p matrix with n >= 2")
    n = X.shape[0]

    dist: dict[tuple[int, int], float] = {}
    for i in range(n):
        for j in range(i + 1, n):
            dist[(i, j)] = float(np.linalg.norm(X[i] - X[j]))
    sizes = {i: 1 for i in range(n)}
    active = set(range(n))
    merges: list[Merge] = []
    next_id = n

    for _ in range(n - 1):
        best_pair = None
        best_d = np.inf
        for pair in sorted(dist):
            d = dist[pair]
            if d < best_d:
                best_d = d
                best_pair = pair
        assert best_pair is not None
        a, b = best_pair
        new = next_id
        next_id += 1
        merges.append(Merge(left=a, right=b, height=best_d, size=sizes[a] + sizes[b]))
        active.discard(a)
        active.discard(b)
        for c in sorted(active):
            d_ac = dist.pop((min(a, c), max(a, c)))
            d_bc = dist.pop((min(b, c), max(b, c)))
            if linkage == "complete":
                d_new = max(d_ac, d_bc)
            elif linkage == "single":
                d_new = min(d_ac, d_bc)
            else:  # average
                d_new = (sizes[a] * d_ac + sizes[b] * d_bc) / (sizes[a] + sizes[b])
            dist[(c, new)] = d_new
        del dist[(a, b)]
        sizes[new] = sizes[a] + sizes[b]
        active.add(new)

    merges_t = tuple(merges)
    return Dendrogram(
        n_leaves=n,
        merges=merges_t,
        leaf_order=_leaf_order(n, merges_t),
        linkage=linkage,
    )
