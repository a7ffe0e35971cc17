"""Strong Pareto dominance, composite 2-D front, knee point, reference rays.

Dominance is tolerance-free: approach i dominates approach j when i is at
least as good on every measure (utility no lower, risk no higher) and
strictly better on at least one. Only the strong notion is implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .model import Block, NormalizedMatrix

_SLOPE_EPS = 1e-12
_KNEE_MIN_DISTANCE = 1e-9


def dominates(u_i, r_i, u_j, r_j) -> bool:
    """True when (u_i, r_i) strongly dominates (u_j, r_j).

    Utility vectors compare componentwise >= and risk vectors <=, with at
    least one strict inequality. Comparisons are exact.
    """
    u_i = np.asarray(u_i, dtype=float)
    u_j = np.asarray(u_j, dtype=float)
    r_i = np.asarray(r_i, dtype=float)
    r_j = np.asarray(r_j, dtype=float)
    if u_i.shape != u_j.shape or r_i.shape != r_j.shape:
        raise ValueError("dominance requires equal-length vectors per block")
    no_worse = bool(np.all(u_i >= u_j) and np.all(r_i <= r_j))
    strictly_better = bool(np.any(u_i > u_j) or np.any(r_i < r_j))
    return no_worse and strictly_better


@dataclass(frozen=True)
class DominanceResult:
    """Pairwise dominance over all rows plus the non-dominated candidate set."""

    labels: tuple[str, ...]
    matrix: np.ndarray  # matrix[i, j] == True iff row i dominates row j
    pareto_ids: frozenset[str]
    candidate_labels: tuple[str, ...]


def pareto_set(nm: NormalizedMatrix, exclude_reference: bool = True) -> DominanceResult:
    """Full-vector Pareto set over all normalized measures.

    The reference (original) row is excluded from candidacy by default; it is
    a benchmark, not a release candidate. The dominance matrix still covers
    every row pair.
    """
    util = nm.block_values(Block.UTILITY)
    risk = nm.block_values(Block.RISK)
    labels = nm.labels
    n = len(labels)
    matrix = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            if i != j:
                matrix[i, j] = dominates(util[i], risk[i], util[j], risk[j])
    candidates = [
        i for i, r in enumerate(nm.rows) if not (exclude_reference and r.is_reference)
    ]
    pareto = frozenset(
        labels[i]
        for i in candidates
        if not any(matrix[j, i] for j in candidates if j != i)
    )
    matrix.setflags(write=False)
    return DominanceResult(
        labels=labels,
        matrix=matrix,
        pareto_ids=pareto,
        candidate_labels=tuple(labels[i] for i in candidates),
    )


@dataclass(frozen=True)
class FrontPoint:
    id: str
    utility: float
    risk: float


@dataclass(frozen=True)
class FrontEdge:
    """Step between consecutive front points; slope is the marginal risk cost."""

    src: str
    dst: str
    d_utility: float
    d_risk: float
    slope: float | None  # None when d_utility is numerically zero


@dataclass(frozen=True)
class CompositeFront:
    points: tuple[FrontPoint, ...]  # sorted by utility ascending
    edges: tuple[FrontEdge, ...]

    @property
    def ids(self) -> frozenset[str]:
        return frozenset(p.id for p in self.points)


def _dominates_2d(a: FrontPoint, b: FrontPoint) -> bool:
    return (
        a.utility >= b.utility
        and a.risk <= b.risk
        and (a.utility > b.utility or a.risk < b.risk)
    )


def composite_front(points: Iterable[tuple[str, float, float]]) -> CompositeFront:
    """Non-dominated subset of composite (utility, risk) points, with edges.

    Points re-enter the dominance check in 2-D composite space, independently
    of the full-vector Pareto set. The front is sorted by utility ascending;
    its risk values are then non-decreasing (staircase property).
    """
    pts = [FrontPoint(str(i), float(u), float(r)) for i, u, r in points]
    front = [
        p
        for p in pts
        if not any(_dominates_2d(q, p) for q in pts if q is not p)
    ]
    front.sort(key=lambda p: (p.utility, p.risk, p.id))
    edges = []
    for a, b in zip(front, front[1:]):
        du = b.utility - a.utility
        dr = b.risk - a.risk
        slope = dr / du if du > _SLOPE_EPS else None
        edges.append(FrontEdge(src=a.id, dst=b.id, d_utility=du, d_risk=dr, slope=slope))
    return CompositeFront(points=tuple(front), edges=tuple(edges))


@dataclass(frozen=True)
class KneePoint:
    """Front point of maximal perpendicular distance from the extreme chord.

    `concave` is True when the knee bows toward the low-risk side of the
    chord, the shape under which the heuristic is meaningful; a knee on a
    front bowing the other way is still reported, tagged concave=False.
    """

    id: str
    distance: float
    concave: bool


def knee_point(
    front: CompositeFront | Sequence[FrontPoint],
    min_distance: float = _KNEE_MIN_DISTANCE,
) -> KneePoint | None:
    """Knee of a 2-D front; None for fewer than 3 points or near-flat fronts."""
    pts = list(front.points if isinstance(front, CompositeFront) else front)
    pts.sort(key=lambda p: (p.utility, p.risk, p.id))
    if len(pts) < 3:
        return None
    a, b = pts[0], pts[-1]
    chord = math.hypot(b.utility - a.utility, b.risk - a.risk)
    if chord < _SLOPE_EPS:
        return None
    best: tuple[float, float, str] | None = None  # (-distance, risk, id)
    best_cross = 0.0
    for p in pts[1:-1]:
        cross = (b.utility - a.utility) * (p.risk - a.risk) - (b.risk - a.risk) * (
            p.utility - a.utility
        )
        dist = abs(cross) / chord
        key = (-dist, p.risk, p.id)
        if best is None or key < best:
            best = key
            best_cross = cross
    assert best is not None
    distance = -best[0]
    if distance < min_distance:
        return None
    # cross > 0 puts the point on the high-risk side of the low-to-high chord
    return KneePoint(id=best[2], distance=distance, concave=best_cross < 0.0)


@dataclass(frozen=True)
class Ray:
    """Slope and straight-line distance from one approach to the reference."""

    id: str
    utility: float
    risk: float
    slope: float | None  # None when the utility displacement is ~0
    l2: float


def rays_to_reference(
    points: Iterable[tuple[str, float, float]], reference: tuple[float, float]
) -> tuple[Ray, ...]:
    """Per approach: (risk delta)/(utility delta) and L2 distance to the reference."""
    u0, r0 = float(reference[0]), float(reference[1])
    rays = []
    for pid, u, r in points:
        du = float(u) - u0
        dr = float(r) - r0
        slope = dr / du if abs(du) >= _SLOPE_EPS else None
        rays.append(
            Ray(id=str(pid), utility=float(u), risk=float(r), slope=slope,
                l2=math.hypot(du, dr))
        )
    return tuple(rays)


@dataclass(frozen=True)
class ParetoResult:
    """Aggregate of the full-vector set, composite front, knee, and rays."""

    dominance: DominanceResult
    front: CompositeFront
    knee: KneePoint | None
    rays: tuple[Ray, ...]
    reference_label: str | None
