"""Shared fixtures and independent oracle helpers for the test suite."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from ruviz.config import StudyConfig
from ruviz.model import (
    ApproachRecord,
    Block,
    ColumnScale,
    Direction,
    MeasureSpec,
    NormalizedMatrix,
    ingest,
)

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def study_config() -> StudyConfig:
    return StudyConfig.from_file(DATA_DIR / "study.json")


@pytest.fixture(scope="session")
def study_csv_bytes() -> bytes:
    return (DATA_DIR / "measures.csv").read_bytes()


@pytest.fixture()
def study_matrix(study_config, study_csv_bytes):
    return ingest(study_csv_bytes, study_config)


def make_specs(n_risk: int, n_utility: int) -> tuple[MeasureSpec, ...]:
    risk = tuple(
        MeasureSpec(f"r{i}", f"risk {i}", Block.RISK, Direction.LOWER)
        for i in range(n_risk)
    )
    util = tuple(
        MeasureSpec(f"u{i}", f"utility {i}", Block.UTILITY, Direction.HIGHER)
        for i in range(n_utility)
    )
    return risk + util


def make_nm(
    values: np.ndarray,
    n_risk: int,
    reference_index: int | None = None,
    datasets: list[str | None] | None = None,
) -> NormalizedMatrix:
    """Wrap a ready-made [0, 1] value matrix as a NormalizedMatrix."""
    values = np.asarray(values, dtype=float)
    n, p = values.shape
    specs = make_specs(n_risk, p - n_risk)
    rows = tuple(
        ApproachRecord(
            id=f"a{i}",
            dataset=None if datasets is None else datasets[i],
            is_reference=i == reference_index,
        )
        for i in range(n)
    )
    scales = tuple(ColumnScale(0.0, 1.0, False, False) for _ in range(p))
    return NormalizedMatrix(specs=specs, rows=rows, values=values, scales=scales)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def oracle_pareto_ids(utilities: list[list[float]], risks: list[list[float]]) -> set[int]:
    """Exhaustive pairwise dominance scan in pure Python."""
    n = len(utilities)
    keep = set()
    for i in range(n):
        dominated = False
        for j in range(n):
            if i == j:
                continue
            no_worse = all(uj >= ui for uj, ui in zip(utilities[j], utilities[i])) and all(
                rj <= ri for rj, ri in zip(risks[j], risks[i])
            )
            strict = any(uj > ui for uj, ui in zip(utilities[j], utilities[i])) or any(
                rj < ri for rj, ri in zip(risks[j], risks[i])
            )
            if no_worse and strict:
                dominated = True
                break
        if not dominated:
            keep.add(i)
    return keep


def oracle_front_ids(points: list[tuple[str, float, float]]) -> set[str]:
    """2-D staircase scan: non-dominated (utility up, risk down) points."""
    keep = set()
    for i, (pid, u, r) in enumerate(points):
        dominated = False
        for j, (_, u2, r2) in enumerate(points):
            if j == i:
                continue
            if u2 >= u and r2 <= r and (u2 > u or r2 < r):
                dominated = True
                break
        if not dominated:
            keep.add(pid)
    return keep


def chi2_quantile_even_df(q: float, df: int) -> float:
    """Chi-square quantile for even df via the closed-form CDF and bisection.

    For even df the CDF is 1 - exp(-x/2) * sum_{j<df/2} (x/2)^j / j!, which
    needs no special functions; bisection to ~1e-12.
    """
    if df % 2 != 0 or df <= 0:
        raise ValueError("closed form requires positive even df")
    m = df // 2

    def cdf(x: float) -> float:
        half = x / 2.0
        s = sum(half**j / math.factorial(j) for j in range(m))
        return 1.0 - math.exp(-half) * s

    lo, hi = 0.0, 1000.0
    for _ in range(200):
        mid = (lo + hi) / 2.0
        if cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2.0


def oracle_hclust(X: np.ndarray, linkage: str) -> list[tuple[int, int, float]]:
    """Naive agglomeration recomputing every cluster distance from the raw
    pairwise distances at each step."""
    n = X.shape[0]
    base = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            base[i, j] = float(np.linalg.norm(X[i] - X[j]))
    members: dict[int, list[int]] = {i: [i] for i in range(n)}
    active = set(range(n))
    merges: list[tuple[int, int, float]] = []
    nxt = n

    def cluster_distance(a: int, b: int) -> float:
        ds = [base[i, j] for i in members[a] for j in members[b]]
        if linkage == "complete":
            return max(ds)
        if linkage == "single":
            return min(ds)
        return sum(ds) / len(ds)

    while len(active) > 1:
        best_pair = None
        best_d = math.inf
        for a in sorted(active):
            for b in sorted(active):
                if a < b:
                    d = cluster_distance(a, b)
                    if d < best_d:
                        best_d = d
                        best_pair = (a, b)
        assert best_pair is not None
        a, b = best_pair
        merges.append((a, b, best_d))
        members[nxt] = members[a] + members[b]
        active.discard(a)
        active.discard(b)
        active.add(nxt)
        nxt += 1
    return merges


def sample_with_exact_cov(n: int, cov: np.ndarray, seed: int) -> np.ndarray:
    """Draw n rows whose sample covariance equals `cov` to machine precision.

    A random Gaussian matrix is centered and orthonormalized, then rotated by
    the Cholesky factor, so the empirical second moments match the target
    exactly while the row configuration stays random.
    """
    cov = np.asarray(cov, dtype=float)
    k = cov.shape[0]
    if n <= k:
        raise ValueError("need n > k")
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(n, k))
    Z -= Z.mean(axis=0)
    Q, _ = np.linalg.qr(Z)
    L = np.linalg.cholesky(cov)
    return math.sqrt(n - 1) * Q[:, :k] @ L.T


def gift_wrap_hull(points: np.ndarray) -> set[tuple[float, float]]:
    """Jarvis-march convex hull vertex set (oracle for the monotone chain)."""
    pts = [tuple(map(float, p)) for p in points]
    uniq = sorted(set(pts))
    if len(uniq) <= 2:
        return set(uniq)
    hull = []
    start = min(uniq)
    point = start
    while True:
        hull.append(point)
        candidate = uniq[0] if uniq[0] != point else uniq[1]
        for q in uniq:
            if q == point:
                continue
            cross = (candidate[0] - point[0]) * (q[1] - point[1]) - (
                candidate[1] - point[1]
            ) * (q[0] - point[0])
            if cross < 0 or (
                cross == 0
                and math.dist(point, q) > math.dist(point, candidate)
            ):
                candidate = q
        point = candidate
        if point == start:
            break
    return set(hull)
