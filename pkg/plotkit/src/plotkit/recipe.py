"""Figure recipes: a small JSON description of one rendered panel.

A recipe names the sweep scenario it expects, the metric column to draw,
the panel kind, and the axis cosmetics.  Recipes deliberately consume
only columns from the fixed sweep CSV header, so any conforming CSV can
be re-rendered without touching the simulation code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional


class RecipeError(ValueError):
    """Malformed or inconsistent recipe file."""


class SchemaError(ValueError):
    """CSV is missing columns the renderer needs."""


#: columns every sweep CSV must provide
CSV_COLUMNS = (
    "scenario",
    "L",
    "L_A",
    "x",
    "t_or_window",
    "metric",
    "value",
    "value_normalized",
    "stderr",
    "seed",
)

#: panel kinds understood by the renderer
KINDS = ("series", "profile", "transition")


@dataclass(frozen=True)
class FigureRecipe:
    """Declarative description of one figure panel."""

    scenario: str
    kind: str
    metric: str
    normalized: bool = True
    inset_unnormalized: bool = False
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    output: str = "figure.png"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RecipeError(f"unknown panel kind {self.kind!r}; expected one of {KINDS}")
        if not self.scenario:
            raise RecipeError("recipe must name a scenario tag prefix")
        if not self.metric:
            raise RecipeError("recipe must name a metric column value")

    @classmethod
    def from_json(cls, path) -> "FigureRecipe":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise RecipeError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(raw, dict):
            raise RecipeError(f"{path}: recipe must be a JSON object")
        known = {
            "scenario", "kind", "metric", "normalized", "inset_unnormalized",
            "title", "xlabel", "ylabel", "output",
        }
        unknown = sorted(set(raw) - known)
        if unknown:
            raise RecipeError(f"{path}: unknown recipe keys {unknown}")
        missing = sorted(k for k in ("scenario", "kind", "metric") if k not in raw)
        if missing:
            raise RecipeError(f"{path}: missing required keys {missing}")
        return cls(**raw)
