"""PCA machinery: classical fit, orientation, alignment with composites,
blockwise analysis, score/orthogonal-distance diagnostics, a simplified
robust fit, acceptance-region projection, and per-group summaries.

The input is always the min-max normalized measure matrix; no further
z-scoring is applied before decomposition.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .errors import AnalysisError
from .geometry import convex_hull
from .model import Block, MeasureSpec, NormalizedMatrix

_EIGEN_EPS = 1e-12


@dataclass(frozen=True)
class PcaModel:
    """Centered linear model x ~ center + loadings @ scores.

    Loadings are orthonormal columns; eigenvalues are sample variances along
    them, non-increasing. `explained_variance_ratio` is relative to the total
    variance of the fitted data, so it sums to 1 when every rank component is
    retained. Scores hold the projection of each fitted observation.
    """

    center: np.ndarray
    loadings: np.ndarray  # (p, k)
    eigenvalues: np.ndarray  # (k,)
    explained_variance_ratio: np.ndarray  # (k,)
    scores: np.ndarray  # (n, k)
    total_variance: float

    @property
    def k(self) -> int:
        return self.loadings.shape[1]

    @property
    def p(self) -> int:
        return self.loadings.shape[0]

    def transform(self, data: np.ndarray) -> np.ndarray:
        return (np.asarray(data, dtype=float) - self.center) @ self.loadings

    def reconstruct(self, scores: np.ndarray) -> np.ndarray:
        return self.center + np.asarray(scores, dtype=float) @ self.loadings.T


def pca_fit(data: np.ndarray, k: int) -> PcaModel:
    """Classical PCA of an already-normalized matrix via SVD.

    The center is the column-mean vector; eigenvalues are squared singular
    values over (n - 1). Each loading column is sign-fixed so its
    largest-magnitude entry is non-negative, which makes downstream plots
    reproducible. Rank-deficient input reduces the usable component count
    with a warning.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    n, p = X.shape
    if n < 2:
        raise ValueError("PCA requires at least 2 rows")
    k_max = min(n - 1, p)
    if not 1 <= k <= k_max:
        raise ValueError(f"k must be in 1..{k_max}, got {k}")
    mu = X.mean(axis=0)
    Xc = X - mu
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise AnalysisError("PCA undefined: data matrix has no variation")
    rank = int(np.sum(s > max(n, p) * np.finfo(float).eps * s[0]))
    if k > rank:
        warnings.warn(
            f"rank-deficient input: usable components reduced from {k} to {rank}",
            UserWarning,
            stacklevel=2,
        )
        k = rank
    eig_all = s**2 / (n - 1)
    total = float(eig_all.sum())
    loadings = vt[:k].T.copy()
    for j in range(k):
        pivot = int(np.argmax(np.abs(loadings[:, j])))
        if loadings[pivot, j] < 0.0:
            loadings[:, j] = -loadings[:, j]
    scores = Xc @ loadings
    return PcaModel(
        center=mu,
        loadings=loadings,
        eigenvalues=eig_all[:k].copy(),
        explained_variance_ratio=eig_all[:k] / total,
        scores=scores,
        total_variance=total,
    )


def _corr(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    sa = a.std()
    sb = b.std()
    if sa == 0.0 or sb == 0.0:
        return float("nan")
    return float(((a - a.mean()) * (b - b.mean())).mean() / (sa * sb))


def orient(model: PcaModel, utility: np.ndarray, risk: np.ndarray,
           enabled: bool = False) -> PcaModel:
    """Optionally fix component signs against the composite scores.

    When enabled, the first score column is flipped if it correlates
    negatively with composite utility, and the second if it correlates
    negatively with the negated composite risk. Disabled (the default)
    returns the model unchanged, keeping native orientations.
    """
    if not enabled:
        return model
    if model.k < 2:
        raise ValueError("orientation requires k >= 2")
    scores = model.scores.copy()
    loadings = model.loadings.copy()
    if _corr(scores[:, 0], utility) < 0.0:
        scores[:, 0] = -scores[:, 0]
        loadings[:, 0] = -loadings[:, 0]
    if _corr(scores[:, 1], -np.asarray(risk, dtype=float)) < 0.0:
        scores[:, 1] = -scores[:, 1]
        loadings[:, 1] = -loadings[:, 1]
    return replace(model, scores=scores, loadings=loadings)


@dataclass(frozen=True)
class AlignmentReport:
    """How strongly the first component tracks the two composite scores."""

    corr_utility: float
    corr_risk: float
    r2_utility: float
    r2_risk: float
    r2_joint: float
    pc1_explained_variance_ratio: float
    collinear: bool


def alignment(model: PcaModel, utility: np.ndarray, risk: np.ndarray) -> AlignmentReport:
    """Correlate PC1 scores with the composites and regress on both jointly.

    R-squared comes from an intercept + two-regressor least-squares fit; a
    least-squares (pseudoinverse) solution keeps it defined when the two
    composites are collinear, which is flagged.
    """
    t1 = model.scores[:, 0]
    n = t1.shape[0]
    if n < 4:
        raise ValueError("alignment requires at least 4 observations")
    u = np.asarray(utility, dtype=float)
    r = np.asarray(risk, dtype=float)
    if u.shape != (n,) or r.shape != (n,):
        raise ValueError("composite vectors must match the number of score rows")
    rho_u = _corr(t1, u)
    rho_r = _corr(t1, r)
    collinear = abs(_corr(u, r)) > 1.0 - 1e-10 if n > 1 else True
    X = np.column_stack([np.ones(n), u, r])
    beta, *_ = np.linalg.lstsq(X, t1, rcond=None)
    resid = t1 - X @ beta
    sst = float(((t1 - t1.mean()) ** 2).sum())
    if sst == 0.0:
        raise AnalysisError("alignment undefined: first component has no variance")
    r2 = 1.0 - float(resid @ resid) / sst
    return AlignmentReport(
        corr_utility=rho_u,
        corr_risk=rho_r,
        r2_utility=rho_u**2,
        r2_risk=rho_r**2,
        r2_joint=r2,
        pc1_explained_variance_ratio=float(model.explained_variance_ratio[0]),
        collinear=collinear,
    )


@dataclass(frozen=True)
class BlockAxis:
    """One block's first principal axis with per-measure contributions."""

    block: Block
    measure_ids: tuple[str, ...]
    loadings: np.ndarray  # signed, unit norm (or [1.0] for the fallback)
    contributions: np.ndarray  # squared loadings normalized to sum 1
    scores: np.ndarray
    explained_variance_ratio: float | None
    fallback: bool  # True when the block has a single measure


@dataclass(frozen=True)
class BlockwisePca:
    utility: BlockAxis
    risk: BlockAxis


def _block_axis(nm: NormalizedMatrix, block: Block) -> BlockAxis:
    idx = nm.block_indices(block)
    ids = tuple(nm.specs[j].id for j in idx)
    vals = nm.values[:, list(idx)]
    if len(idx) == 1:
        warnings.warn(
            f"{block.value} block has a single measure; its axis is the raw "
            "normalized column",
            UserWarning,
            stacklevel=3,
        )
        return BlockAxis(
            block=block,
            measure_ids=ids,
            loadings=np.array([1.0]),
            contributions=np.array([1.0]),
            scores=vals[:, 0].copy(),
            explained_variance_ratio=None,
            fallback=True,
        )
    model = pca_fit(vals, k=1)
    lam = model.loadings[:, 0]
    contrib = lam**2 / float((lam**2).sum())
    return BlockAxis(
        block=block,
        measure_ids=ids,
        loadings=lam.copy(),
        contributions=contrib,
        scores=model.scores[:, 0].copy(),
        explained_variance_ratio=float(model.explained_variance_ratio[0]),
        fallback=False,
    )


def blockwise_pca(nm: NormalizedMatrix) -> BlockwisePca:
    """Independent one-component PCA per measure block.

    Contributions are squared loadings normalized to sum to one; the signed
    loadings are kept so plots can encode the direction each measure pulls.
    """
    return BlockwisePca(
        utility=_block_axis(nm, Block.UTILITY),
        risk=_block_axis(nm, Block.RISK),
    )


class OutlierFlag(str, Enum):
    REGULAR = "regular"
    GOOD_LEVERAGE = "good_leverage"
    ORTHOGONAL = "orthogonal_outlier"
    BAD_LEVERAGE = "bad_leverage"


def classify_sd_od(sd: float, od: float, sd_cut: float, od_cut: float) -> OutlierFlag:
    """Quadrant classification of one observation's (SD, OD) pair."""
    high_sd = sd > sd_cut
    high_od = od > od_cut
    if high_sd and high_od:
        return OutlierFlag.BAD_LEVERAGE
    if high_sd:
        return OutlierFlag.GOOD_LEVERAGE
    if high_od:
        return OutlierFlag.ORTHOGONAL
    return OutlierFlag.REGULAR


@dataclass(frozen=True)
class SdOdDiagnostics:
    labels: tuple[str, ...] | None
    sd: np.ndarray
    od: np.ndarray
    flags: tuple[OutlierFlag, ...]
    sd_cutoff: float
    od_cutoff: float
    mode: str
    components_used: int


def _madn(x: np.ndarray) -> float:
    med = float(np.median(x))
    return 1.4826 * float(np.median(np.abs(x - med)))


def sd_od(
    model: PcaModel,
    data: np.ndarray,
    od_cut_mode: str = "hubert",
    labels: Sequence[str] | None = None,
) -> SdOdDiagnostics:
    """Score distance and orthogonal distance of each observation.

    SD is the Mahalanobis-style distance of the score vector inside the
    retained component subspace, sqrt(sum t_j^2 / eigenvalue_j); OD is the
    Euclidean length of the reconstruction residual. The SD cutoff is
    sqrt of the chi-square 0.975 quantile at k degrees of freedom. Two OD
    cutoff modes exist:

    - "hubert" (default): (m + s * z_0.975)^(3/2) with m and s the median and
      normalized MAD of OD^(2/3), a scale-free construction;
    - "literal": median(OD) + z_0.975 * normalized MAD of the raw ODs.

    Components with eigenvalue below 1e-12 are dropped from SD with a warning.
    """
    if od_cut_mode not in ("hubert", "literal"):
        raise ValueError(f"unknown od_cut_mode '{od_cut_mode}'")
    X = np.asarray(data, dtype=float)
    scores = model.transform(X)
    usable = model.eigenvalues > _EIGEN_EPS
    n_usable = int(usable.sum())
    if n_usable < model.k:
        warnings.warn(
            f"{model.k - n_usable} component(s) with near-zero eigenvalue "
            "dropped from the score distance",
            UserWarning,
            stacklevel=2,
        )
    if n_usable == 0:
        raise AnalysisError("score distance undefined: all eigenvalues are ~0")
    sd = np.sqrt(
        ((scores[:, usable] ** 2) / model.eigenvalues[usable]).sum(axis=1)
    )
    resid = X - model.center - scores @ model.loadings.T
    od = np.linalg.norm(resid, axis=1)

    z975 = float(stats.norm.ppf(0.975))
    sd_cut = float(np.sqrt(stats.chi2.ppf(0.975, df=n_usable)))
    if od_cut_mode == "hubert":
        od23 = od ** (2.0 / 3.0)
        od_cut = float((np.median(od23) + _madn(od23) * z975) ** 1.5)
    else:
        od_cut = float(np.median(od) + _madn(od) * z975)

    flags = tuple(
        classify_sd_od(float(s), float(o), sd_cut, od_cut) for s, o in zip(sd, od)
    )
    return SdOdDiagnostics(
        labels=tuple(labels) if labels is not None else None,
        sd=sd,
        od=od,
        flags=flags,
        sd_cutoff=sd_cut,
        od_cutoff=od_cut,
        mode=od_cut_mode,
        components_used=n_usable,
    )


def _stahel_donoho_outlyingness(
    Y: np.ndarray, pairs: Iterable[tuple[int, int]]
) -> np.ndarray:
    n = Y.shape[0]
    out = np.zeros(n)
    used = 0
    for i, j in pairs:
        d = Y[i] - Y[j]
        norm = float(np.linalg.norm(d))
        if norm < 1e-12:
            continue
        z = Y @ (d / norm)
        med = float(np.median(z))
        mad = _madn(z)
        if mad < 1e-12:
            continue
        used += 1
        out = np.maximum(out, np.abs(z - med) / mad)
    if used == 0:
        raise AnalysisError(
            "outlyingness undefined: every projection direction was degenerate"
        )
    return out


def robust_pca(data: np.ndarray, k: int, seed: int = 42) -> PcaModel:
    """Outlier-resistant PCA: projection pursuit trimming plus a classical fit.

    Steps: (1) reduce to the affine span of the data, (2) compute
    Stahel-Donoho outlyingness over directions through observation pairs
    (every pair when n <= 50, otherwise 250 seeded draws), (3) run classical
    PCA on the ceil(0.75 n) least-outlying observations, (4) recompute
    scores for all observations against that model. Deterministic for a
    fixed seed.
    """
    X = np.asarray(data, dtype=float)
    if X.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    n, p = X.shape
    if n < 4:
        raise ValueError("robust PCA requires at least 4 rows")

    mu0 = X.mean(axis=0)
    Xc = X - mu0
    _, s, vt = np.linalg.svd(Xc, full_matrices=False)
    if s.size == 0 or s[0] <= 0.0:
        raise AnalysisError("robust PCA undefined: data matrix has no variation")
    rank = int(np.sum(s > max(n, p) * np.finfo(float).eps * s[0]))
    basis = vt[:rank].T
    Y = Xc @ basis

    all_pairs = list(itertools.combinations(range(n), 2))
    if n <= 50:
        pairs = all_pairs
    else:
        rng = np.random.default_rng(seed)
        chosen = rng.choice(len(all_pairs), size=min(250, len(all_pairs)),
                            replace=False)
        pairs = [all_pairs[int(c)] for c in sorted(chosen)]
    outlyingness = _stahel_donoho_outlyingness(Y, pairs)

    h = math.ceil(0.75 * n)
    keep = np.argsort(outlyingness, kind="stable")[:h]
    keep = np.sort(keep)
    subset_k = min(k, h - 1, p)
    if subset_k < 1:
        raise AnalysisError("robust PCA: h-subset too small for any component")
    model = pca_fit(X[keep], subset_k)
    return replace(model, scores=model.transform(X))


@dataclass(frozen=True)
class AcceptancePolygon:
    """Projection of the per-measure acceptance box into the component plane.

    Vertices are the convex hull of the projected box corners, in
    counter-clockwise order, implicitly closed.
    """

    vertices: np.ndarray  # (m, 2)
    thresholds: dict[str, float]


def project_acceptance_region(
    model: PcaModel,
    specs: Sequence[MeasureSpec],
    thresholds: Mapping[str, float],
    seed: int = 42,
) -> AcceptancePolygon:
    """Project the axis-aligned feasibility box into the first two components.

    Per measure the acceptable interval in normalized units is [0, c] for
    risk and [c, 1] for utility. All 2^p corners are projected when p <= 16;
    up to 30 dimensions a seeded sample of 4096 corners plus every
    single-coordinate flip of the two extreme corners is used. Larger p is
    rejected.
    """
    p = len(specs)
    if model.p != p:
        raise ValueError("model dimension does not match the number of measures")
    if model.k < 2:
        raise ValueError("acceptance projection requires a k >= 2 model")
    if p > 30:
        raise ValueError("acceptance region rejected: more than 30 measures")
    ids = [s.id for s in specs]
    unknown = sorted(set(thresholds) - set(ids))
    if unknown:
        raise ValueError(f"thresholds name unknown measure(s): {unknown}")
    resolved: dict[str, float] = {}
    intervals: list[tuple[float, float]] = []
    for spec in specs:
        c = float(thresholds.get(spec.id, 1.0 if spec.block is Block.RISK else 0.0))
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"threshold for '{spec.id}' must be in [0, 1], got {c}")
        resolved[spec.id] = c
        intervals.append((0.0, c) if spec.block is Block.RISK else (c, 1.0))

    los = np.array([iv[0] for iv in intervals])
    his = np.array([iv[1] for iv in intervals])
    if p <= 16:
        corners = np.array(list(itertools.product(*intervals)), dtype=float)
    else:
        rng = np.random.default_rng(seed)
        picks = rng.integers(0, 2, size=(4096, p))
        corners = np.where(picks == 0, los[None, :], his[None, :])
        flips = [los, his]
        for dim in range(p):
            for base in (los, his):
                v = base.copy()
                v[dim] = his[dim] if base is los else los[dim]
                flips.append(v)
        corners = np.vstack([corners, np.array(flips)])

    projected = (corners - model.center) @ model.loadings[:, :2]
    return AcceptancePolygon(vertices=convex_hull(projected), thresholds=resolved)


@dataclass(frozen=True)
class GroupSummary:
    """Centroid plus a dispersion glyph (95% ellipse or convex hull) per group."""

    label: str
    centroid: np.ndarray
    ellipse_axes: np.ndarray | None  # (2, 2): rows are semi-axis vectors
    hull: np.ndarray | None  # fallback when the ellipse is unavailable

    @property
    def kind(self) -> str:
        if self.ellipse_axes is not None:
            return "ellipse"
        if self.hull is not None and len(self.hull) > 1:
            return "hull"
        return "point"


def group_summaries(
    scores: np.ndarray, groups: Sequence[str]
) -> tuple[GroupSummary, ...]:
    """Per-group centroids with 95% normal ellipses, hulls as fallback.

    Groups of at least 3 points with a non-singular 2x2 score covariance get
    an ellipse whose semi-axes are the covariance eigenvectors scaled by
    sqrt(chisq2_0.95 * eigenvalue); degenerate groups fall back to a convex
    hull, singletons to the bare centroid.
    """
    pts = np.asarray(scores, dtype=float)
    if pts.ndim != 2 or pts.shape[1] < 2:
        raise ValueError("group summaries require n x 2 score coordinates")
    pts = pts[:, :2]
    if len(groups) != pts.shape[0]:
        raise ValueError("one group label per score row required")
    chi2_2 = float(stats.chi2.ppf(0.95, df=2))
    out = []
    for g in sorted(set(groups)):
        members = pts[np.array([lbl == g for lbl in groups], dtype=bool)]
        centroid = members.mean(axis=0)
        ellipse = None
        hull = None
        if members.shape[0] >= 3:
            cov = np.cov(members, rowvar=False, ddof=1)
            eigvals, eigvecs = np.linalg.eigh(cov)
            if eigvals.min() > _EIGEN_EPS:
                ellipse = np.stack(
                    [
                        eigvecs[:, 1] * math.sqrt(chi2_2 * eigvals[1]),
                        eigvecs[:, 0] * math.sqrt(chi2_2 * eigvals[0]),
                    ]
                )
            else:
                hull = convex_hull(members)
        elif members.shape[0] == 2:
            hull = convex_hull(members)
        out.append(
            GroupSummary(label=g, centroid=centroid, ellipse_axes=ellipse, hull=hull)
        )
    return tuple(out)
