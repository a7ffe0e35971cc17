"""Study configuration: measure declarations, reference approach, run options."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

from .errors import ValidationError
from .model import Block, Direction, MeasureSpec, _validate_specs

OD_CUT_MODES = ("hubert", "literal")
LINKAGES = ("complete", "average", "single")


@dataclass
class StudyOptions:
    """Run options; every field has a documented default echoed into reports."""

    exclude_reference_from_range: bool = False
    orient: bool = False
    od_cut_mode: str = "hubert"
    r_aux: float = 0.1
    linkage: str = "complete"
    seed: int = 42
    robust: bool = False
    pca_exclude_reference: bool = False
    cluster_columns: bool = False
    thresholds: dict[str, float] | None = None
    out_dir: str = "out"

    def validate(self) -> None:
        if self.od_cut_mode not in OD_CUT_MODES:
            raise ValidationError(
                f"options.od_cut_mode: must be one of {OD_CUT_MODES}, "
                f"got '{self.od_cut_mode}'"
            )
        if self.linkage not in LINKAGES:
            raise ValidationError(
                f"options.linkage: must be one of {LINKAGES}, got '{self.linkage}'"
            )
        if not 0.0 < self.r_aux < 1.0:
            raise ValidationError(
                f"options.r_aux: must be in (0, 1), got {self.r_aux}"
            )
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or self.seed < 0:
            raise ValidationError("options.seed: must be a non-negative integer")
        if self.thresholds is not None:
            for mid, c in self.thresholds.items():
                if not isinstance(c, (int, float)) or not 0.0 <= float(c) <= 1.0:
                    raise ValidationError(
                        f"options.thresholds['{mid}']: must be in [0, 1], got {c!r}"
                    )


@dataclass
class StudyConfig:
    """Parsed study configuration; measures are ordered risk block first."""

    measures: tuple[MeasureSpec, ...]
    reference_id: str
    options: StudyOptions = field(default_factory=StudyOptions)

    def __post_init__(self) -> None:
        _validate_specs(self.measures)
        if not self.reference_id:
            raise ValidationError("config.reference: required")
        self.options.validate()
        risk = tuple(s for s in self.measures if s.block is Block.RISK)
        util = tuple(s for s in self.measures if s.block is Block.UTILITY)
        self.measures = risk + util

    @property
    def measure_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.measures)

    @classmethod
    def from_json(cls, text: str) -> "StudyConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config: invalid JSON ({exc})") from None
        if not isinstance(doc, dict):
            raise ValidationError("config: top-level value must be an object")

        raw_measures = doc.get("measures")
        if not isinstance(raw_measures, list) or not raw_measures:
            raise ValidationError("config.measures: required non-empty list")
        specs = []
        for i, m in enumerate(raw_measures):
            if not isinstance(m, dict):
                raise ValidationError(f"config.measures[{i}]: must be an object")
            mid = m.get("id")
            if not isinstance(mid, str) or not mid:
                raise ValidationError(f"config.measures[{i}].id: required string")
            block = m.get("block")
            if block not in ("risk", "utility"):
                raise ValidationError(
                    f"config.measures[{i}].block: must be 'risk' or 'utility', "
                    f"got {block!r}"
                )
            direction = m.get("direction")
            if direction not in ("higher", "lower"):
                raise ValidationError(
                    f"config.measures[{i}].direction: must be 'higher' or 'lower', "
                    f"got {direction!r}"
                )
            specs.append(
                MeasureSpec(
                    id=mid,
                    display_name=str(m.get("display_name", mid)),
                    block=Block(block),
                    direction=Direction(direction),
                )
            )

        reference = doc.get("reference")
        if not isinstance(reference, str) or not reference:
            raise ValidationError("config.reference: required string (approach id)")

        opts_doc = doc.get("options", {})
        if not isinstance(opts_doc, dict):
            raise ValidationError("config.options: must be an object")
        known = {f.name for f in dc_fields(StudyOptions)}
        unknown = sorted(set(opts_doc) - known)
        if unknown:
            raise ValidationError(f"config.options: unknown option(s) {unknown}")
        options = StudyOptions(**opts_doc)

        return cls(measures=tuple(specs), reference_id=reference, options=options)

    @classmethod
    def from_file(cls, path: str | Path) -> "StudyConfig":
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"config: cannot read '{p}' ({exc})") from None
        return cls.from_json(text)


def load_thresholds(path: str | Path) -> dict[str, float]:
    """Read a per-measure acceptance-threshold file ({measure id: cutoff})."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"thresholds: cannot read '{p}' ({exc})") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"thresholds: invalid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise ValidationError("thresholds: must be an object {measure id: cutoff}")
    out = {}
    for mid, c in doc.items():
        if not isinstance(c, (int, float)) or not 0.0 <= float(c) <= 1.0:
            raise ValidationError(f"thresholds['{mid}']: must be in [0, 1], got {c!r}")
        out[str(mid)] = float(c)
    return out
