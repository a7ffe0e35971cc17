"""End-to-end study runner: analysis, JSON artifacts, SVG rendering, manifest.

`run_study` computes every analysis product from a measure matrix and a
configuration; `write_report` serializes them to an output directory with a
manifest of content hashes. All outputs are deterministic for fixed inputs
and seed.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import tempfile
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import __about__
from .composites import CompositeScores, ReliabilityReport, composite_scores, reliability_report
from .config import StudyConfig
from .errors import AnalysisError, ValidationError
from .model import Block, MeasureMatrix, NormalizedMatrix, harmonize_and_normalize
from .multivariate import (
    AcceptancePolygon,
    AlignmentReport,
    BlockwisePca,
    PcaModel,
    SdOdDiagnostics,
    alignment,
    blockwise_pca,
    group_summaries,
    orient,
    pca_fit,
    project_acceptance_region,
    robust_pca,
    sd_od,
)
from .ordering import Dendrogram, hclust
from .pareto import (
    CompositeFront,
    DominanceResult,
    KneePoint,
    ParetoResult,
    Ray,
    composite_front,
    knee_point,
    pareto_set,
    rays_to_reference,
)
from .profiles import AreaTable, PcpLines, RadialProfile, build_pcp, origami_profiles, ranked_areas
from .render import (
    render_biplot,
    render_blockwise,
    render_composite_ru,
    render_dotplot,
    render_heatmap,
    render_origami,
    render_pcp,
    render_rays,
    render_sdod,
)
from .svg import PlotDocument

SVG_ARTIFACTS = (
    "heatmap",
    "dotplot",
    "composite_ru",
    "pcp",
    "origami",
    "biplot",
    "sdod",
    "blockwise",
)
JSON_ARTIFACTS = ("normalized", "pareto", "composite", "pca", "profiles")


@dataclass
class StudyResult:
    """Every analysis product of one study run."""

    config: StudyConfig
    matrix: MeasureMatrix
    nm: NormalizedMatrix
    scores: CompositeScores
    reliability: ReliabilityReport
    pareto: ParetoResult
    dendrogram: Dendrogram
    column_order: tuple[int, ...] | None
    pca_labels: tuple[str, ...]
    pca: PcaModel
    align: AlignmentReport
    diagnostics: SdOdDiagnostics
    blockwise: BlockwisePca
    profiles: tuple[RadialProfile, ...]
    areas: AreaTable
    pcp: PcpLines
    groups: tuple | None
    acceptance: AcceptancePolygon | None
    warnings: tuple[str, ...]

    @property
    def reference_labels(self) -> frozenset[str]:
        return frozenset(r.label for r in self.nm.rows if r.is_reference)


def _candidate_points(nm: NormalizedMatrix, scores: CompositeScores):
    return [
        (row.label, float(scores.utility[i]), float(scores.risk[i]))
        for i, row in enumerate(nm.rows)
        if not row.is_reference
    ]


def run_study(matrix: MeasureMatrix, config: StudyConfig) -> StudyResult:
    """Run the full analysis pipeline over an ingested measure matrix."""
    opts = config.options
    collected: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        nm = harmonize_and_normalize(
            matrix, exclude_reference_from_range=opts.exclude_reference_from_range
        )
        scores = composite_scores(nm)
        reliability = reliability_report(nm)

        dom = pareto_set(nm, exclude_reference=True)
        points = _candidate_points(nm, scores)
        front = composite_front(points)
        knee = knee_point(front)

        ref_rows = [r for r in nm.rows if r.is_reference]
        rays: tuple[Ray, ...] = ()
        reference_label = None
        if ref_rows:
            reference_label = ref_rows[0].label
            candidate_rows = [r for r in nm.rows if not r.is_reference]
            ray_parts = []
            for ref in ref_rows:
                u0, r0 = scores.point(ref.label)
                same_ds = [
                    p for p, row in zip(points, candidate_rows)
                    if row.dataset == ref.dataset
                ]
                ray_parts.extend(rays_to_reference(same_ds, (u0, r0)))
            rays = tuple(ray_parts)
        pareto = ParetoResult(
            dominance=dom, front=front, knee=knee, rays=rays,
            reference_label=reference_label,
        )

        dendrogram = hclust(nm.values, linkage=opts.linkage)
        column_order = None
        if opts.cluster_columns:
            # cluster measures within each block; blocks keep their
            # risk-then-utility order
            column_order = []
            for block in (Block.RISK, Block.UTILITY):
                idx = list(nm.block_indices(block))
                if len(idx) < 2:
                    column_order.extend(idx)
                    continue
                sub = hclust(nm.values[:, idx].T, linkage=opts.linkage)
                column_order.extend(idx[i] for i in sub.leaf_order)

        if opts.pca_exclude_reference:
            fit_idx = [i for i, r in enumerate(nm.rows) if not r.is_reference]
        else:
            fit_idx = list(range(len(nm.rows)))
        pca_labels = tuple(nm.rows[i].label for i in fit_idx)
        fit_values = nm.values[fit_idx]
        n_fit, p = fit_values.shape
        if n_fit < 4 or p < 2:
            raise AnalysisError(
                "the joint PCA pipeline needs at least 4 fitted rows and "
                f"2 measures (got {n_fit} rows, {p} measures)"
            )
        model = pca_fit(fit_values, k=2)
        if model.k < 2:
            raise AnalysisError(
                "joint PCA found only one usable component; the biplot and "
                "diagnostics need rank >= 2 data"
            )
        util_fit = scores.utility[fit_idx]
        risk_fit = scores.risk[fit_idx]
        model = orient(model, util_fit, risk_fit, enabled=opts.orient)
        align = alignment(model, util_fit, risk_fit)

        if opts.robust:
            diag_model = robust_pca(fit_values, k=2, seed=opts.seed)
        else:
            diag_model = model
        diagnostics = sd_od(diag_model, fit_values, od_cut_mode=opts.od_cut_mode,
                            labels=pca_labels)

        bw = blockwise_pca(nm)
        if len(nm.specs) >= 3:
            profs = origami_profiles(nm, r_aux=opts.r_aux)
            areas = ranked_areas(profs)
        else:
            warnings.warn(
                "radial profiles skipped: they need at least 3 measures",
                UserWarning,
            )
            profs = ()
            areas = ranked_areas(())
        pcp = build_pcp(nm, front.ids)

        datasets = {r.dataset for i, r in enumerate(nm.rows) if i in set(fit_idx)}
        groups = None
        if len(datasets) > 1:
            fit_rows = [nm.rows[i] for i in fit_idx]
            groups = group_summaries(
                model.scores[:, :2], [r.dataset or "" for r in fit_rows]
            )

        acceptance = None
        if opts.thresholds is not None:
            unknown = sorted(set(opts.thresholds) - set(config.measure_ids))
            if unknown:
                raise ValidationError(
                    f"options.thresholds: unknown measure id(s) {unknown}"
                )
            acceptance = project_acceptance_region(
                model, nm.specs, opts.thresholds, seed=opts.seed
            )
        collected = [str(w.message) for w in caught]

    return StudyResult(
        config=config,
        matrix=matrix,
        nm=nm,
        scores=scores,
        reliability=reliability,
        pareto=pareto,
        dendrogram=dendrogram,
        column_order=tuple(column_order) if column_order is not None else None,
        pca_labels=pca_labels,
        pca=model,
        align=align,
        diagnostics=diagnostics,
        blockwise=bw,
        profiles=profs,
        areas=areas,
        pcp=pcp,
        groups=groups,
        acceptance=acceptance,
        warnings=tuple(collected),
    )


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def normalized_json(result: StudyResult) -> dict:
    nm = result.nm
    return {
        "approaches": [
            {
                "id": r.id,
                "dataset": r.dataset,
                "is_reference": r.is_reference,
                "label": r.label,
            }
            for r in nm.rows
        ],
        "measures": [
            {
                "id": s.id,
                "display_name": s.display_name,
                "block": s.block.value,
                "direction": s.direction.value,
            }
            for s in nm.specs
        ],
        "values": _jsonable(nm.values),
        "scales": {
            s.id: {
                "raw_min": sc.raw_min,
                "raw_max": sc.raw_max,
                "flipped": sc.flipped,
                "constant": sc.constant,
            }
            for s, sc in zip(nm.specs, nm.scales)
        },
        "row_order": {
            "linkage": result.dendrogram.linkage,
            "leaf_order": list(result.dendrogram.leaf_order),
            "merges": [
                {"left": m.left, "right": m.right, "height": m.height,
                 "size": m.size}
                for m in result.dendrogram.merges
            ],
        },
        "column_order": (
            None if result.column_order is None
            else [nm.specs[j].id for j in result.column_order]
        ),
        "warnings": list(result.warnings),
    }


def pareto_json(result: StudyResult) -> dict:
    pr = result.pareto
    return {
        "pareto_full": sorted(pr.dominance.pareto_ids),
        "pareto_composite": sorted(pr.front.ids),
        "front": [
            {"id": p.id, "utility": p.utility, "risk": p.risk}
            for p in pr.front.points
        ],
        "knee": None if pr.knee is None else pr.knee.id,
        "knee_distance": None if pr.knee is None else pr.knee.distance,
        "knee_concave": None if pr.knee is None else pr.knee.concave,
        "edges": [
            {
                "from": e.src,
                "to": e.dst,
                "d_utility": e.d_utility,
                "d_risk": e.d_risk,
                "slope": e.slope,
            }
            for e in pr.front.edges
        ],
        "rays": [
            {
                "id": ray.id,
                "utility": ray.utility,
                "risk": ray.risk,
                "slope": ray.slope,
                "slope_defined": ray.slope is not None,
                "l2": ray.l2,
            }
            for ray in pr.rays
        ],
        "reference": pr.reference_label,
        "dominance": {
            "labels": list(pr.dominance.labels),
            "matrix": _jsonable(pr.dominance.matrix.astype(int)),
        },
    }


def composite_json(result: StudyResult) -> dict:
    sc = result.scores

    def block_doc(rel):
        return {
            "alpha": _jsonable(rel.alpha),
            "omega": rel.omega,
            "n_items": rel.n_items,
            "verdict": rel.verdict,
            "note": rel.note,
        }

    return {
        "scores": [
            {
                "id": label,
                "utility": float(sc.utility[i]),
                "risk": float(sc.risk[i]),
                "utility_sd": float(sc.utility_sd[i]),
                "risk_sd": float(sc.risk_sd[i]),
            }
            for i, label in enumerate(sc.labels)
        ],
        "reliability": {
            "risk": block_doc(result.reliability.risk),
            "utility": block_doc(result.reliability.utility),
            "caveat": result.reliability.caveat,
        },
    }


def pca_json(result: StudyResult) -> dict:
    model = result.pca
    diag = result.diagnostics
    bw = result.blockwise

    def axis_doc(axis):
        return {
            "measure_ids": list(axis.measure_ids),
            "loadings": _jsonable(axis.loadings),
            "contributions": _jsonable(axis.contributions),
            "scores": _jsonable(axis.scores),
            "explained_variance_ratio": axis.explained_variance_ratio,
            "fallback_single_measure": axis.fallback,
        }

    doc = {
        "labels": list(result.pca_labels),
        "model": {
            "center": _jsonable(model.center),
            "loadings": _jsonable(model.loadings),
            "eigenvalues": _jsonable(model.eigenvalues),
            "explained_variance_ratio": _jsonable(model.explained_variance_ratio),
            "total_variance": model.total_variance,
            "k": model.k,
        },
        "scores": _jsonable(model.scores),
        "alignment": {
            "corr_utility": _jsonable(result.align.corr_utility),
            "corr_risk": _jsonable(result.align.corr_risk),
            "r2_utility": _jsonable(result.align.r2_utility),
            "r2_risk": _jsonable(result.align.r2_risk),
            "r2_joint": _jsonable(result.align.r2_joint),
            "pc1_explained_variance_ratio": result.align.pc1_explained_variance_ratio,
            "collinear_composites": result.align.collinear,
            "includes_reference": not result.config.options.pca_exclude_reference,
        },
        "sd_od": {
            "mode": diag.mode,
            "sd_cutoff": diag.sd_cutoff,
            "od_cutoff": diag.od_cutoff,
            "components_used": diag.components_used,
            "robust": result.config.options.robust,
            "rows": [
                {"id": lbl, "sd": float(s), "od": float(o), "flag": flag.value}
                for lbl, s, o, flag in zip(
                    diag.labels or result.pca_labels, diag.sd, diag.od, diag.flags
                )
            ],
        },
        "blockwise": {"utility": axis_doc(bw.utility), "risk": axis_doc(bw.risk)},
    }
    if result.acceptance is not None:
        doc["acceptance_polygon"] = {
            "vertices": _jsonable(result.acceptance.vertices),
            "thresholds": result.acceptance.thresholds,
        }
    if result.groups is not None:
        doc["groups"] = [
            {
                "label": g.label,
                "centroid": _jsonable(g.centroid),
                "kind": g.kind,
                "ellipse_axes": _jsonable(g.ellipse_axes)
                if g.ellipse_axes is not None
                else None,
                "hull": _jsonable(g.hull) if g.hull is not None else None,
            }
            for g in result.groups
        ]
    return doc


def profiles_json(result: StudyResult) -> dict:
    return {
        "r_aux": result.config.options.r_aux,
        "axis_order": [s.id for s in result.nm.specs],
        "profiles": [
            {
                "id": p.id,
                "angles": _jsonable(p.angles),
                "radii": _jsonable(p.radii),
                "vertices": _jsonable(p.vertices),
                "area_raw": p.area_raw,
                "area_normalized": p.area_normalized,
            }
            for p in result.profiles
        ],
        "areas": [
            {"id": e.id, "area": e.area, "display": e.display}
            for e in result.areas.entries
        ],
        "caveat": result.areas.caveat,
    }


def artifact_jsons(result: StudyResult) -> dict[str, dict]:
    return {
        "normalized": normalized_json(result),
        "pareto": pareto_json(result),
        "composite": composite_json(result),
        "pca": pca_json(result),
        "profiles": profiles_json(result),
    }


def default_origami_panels(result: StudyResult) -> list[tuple[str, ...]]:
    """Pairwise panels over the composite Pareto set, capped at six."""
    ids = [p.id for p in result.pareto.front.points]
    if len(ids) == 1:
        return [(ids[0],)]
    pairs = list(itertools.combinations(ids, 2))
    return [tuple(p) for p in pairs[:6]]


def _render_origami_figure(result: StudyResult) -> PlotDocument:
    if not result.profiles:
        raise AnalysisError(
            "the origami figure needs at least 3 measures; declare more "
            "measures or use the other views"
        )
    block_by_measure = {s.id: s.block for s in result.nm.specs}
    return render_origami(
        result.profiles, default_origami_panels(result), block_by_measure
    )


def render_rays_plot(result: StudyResult) -> PlotDocument:
    if not result.pareto.rays or result.pareto.reference_label is None:
        raise AnalysisError("rays plot unavailable: no reference row")
    ref_label = result.pareto.reference_label
    u0, r0 = result.scores.point(ref_label)
    return render_rays(
        result.pareto.rays,
        (ref_label, u0, r0),
        pareto_ids=result.pareto.front.ids,
    )


def _figure_builders(result: StudyResult) -> dict:
    front_ids = result.pareto.front.ids
    return {
        "heatmap": lambda: render_heatmap(result.nm, result.dendrogram,
                                          front_ids,
                                          column_order=result.column_order),
        "dotplot": lambda: render_dotplot(result.nm),
        "composite_ru": lambda: render_composite_ru(
            result.scores,
            result.pareto.front,
            result.pareto.knee,
            result.reliability,
            reference_labels=result.reference_labels,
        ),
        "pcp": lambda: render_pcp(result.pcp),
        "origami": lambda: _render_origami_figure(result),
        "biplot": lambda: render_biplot(
            result.pca,
            result.nm.specs,
            result.pca_labels,
            pareto_ids=front_ids,
            reference_labels=result.reference_labels,
            acceptance=result.acceptance,
            groups=result.groups,
        ),
        "sdod": lambda: render_sdod(result.diagnostics),
        "blockwise": lambda: render_blockwise(
            result.blockwise,
            result.nm.labels,
            pareto_ids=front_ids,
            reference_labels=result.reference_labels,
        ),
        "rays": lambda: render_rays_plot(result),
    }


def render_all(result: StudyResult) -> dict[str, PlotDocument]:
    """The eight report figures, keyed by artifact name (rays on request)."""
    builders = _figure_builders(result)
    return {name: builders[name]() for name in SVG_ARTIFACTS}


def render_plot(result: StudyResult, kind: str) -> PlotDocument:
    """One figure by artifact name, including the optional rays view."""
    builders = _figure_builders(result)
    if kind not in builders:
        raise ValidationError(
            f"unknown plot kind '{kind}'; expected one of {sorted(builders)}"
        )
    return builders[kind]()


def _dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False,
                      allow_nan=False) + "\n"


def _atomic_write(path: Path, content: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _options_doc(config: StudyConfig) -> dict:
    doc = asdict(config.options)
    # the manifest must not depend on where it is written, so two runs into
    # different directories stay byte-comparable
    doc.pop("out_dir", None)
    doc["reference"] = config.reference_id
    doc["measure_ids"] = list(config.measure_ids)
    return doc


def write_report(result: StudyResult, out_dir: str | Path) -> dict:
    """Write all JSON artifacts and the eight SVGs, plus a hash manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    contents: dict[str, str] = {}
    for name, doc in artifact_jsons(result).items():
        contents[f"{name}.json"] = _dump_json(doc)
    for name, plot in render_all(result).items():
        contents[f"{name}.svg"] = plot.to_svg()

    entries = []
    for name in sorted(contents):
        data = contents[name].encode("utf-8")
        _atomic_write(out / name, contents[name])
        entries.append(
            {
                "name": name,
                "sha256": hashlib.sha256(data).hexdigest(),
                "bytes": len(data),
            }
        )
    manifest = {
        "tool": {"name": __about__.NAME, "version": __about__.VERSION},
        "options": _options_doc(result.config),
        "artifacts": entries,
    }
    _atomic_write(out / "manifest.json", _dump_json(manifest))
    return manifest
