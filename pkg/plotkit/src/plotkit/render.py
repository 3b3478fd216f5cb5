"""Render one figure recipe from a sweep CSV.

The renderer is read-only with respect to the input CSV and produces a
deterministic PNG for a fixed (recipe, CSV) pair: line order, colors,
and PNG metadata are all pinned, and no timestamps are embedded.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

from .recipe import CSV_COLUMNS, FigureRecipe, SchemaError


def load_frame(csv_path) -> pd.DataFrame:
    """Read and validate a sweep CSV."""
    try:
        frame = pd.read_csv(csv_path, dtype={"t_or_window": str, "seed": str})
    except pd.errors.EmptyDataError as exc:
        raise SchemaError(f"{csv_path}: empty CSV") from exc
    missing = sorted(set(CSV_COLUMNS) - set(frame.columns))
    if missing:
        raise SchemaError(f"{csv_path}: missing columns {missing}")
    if frame.empty:
        raise SchemaError(f"{csv_path}: no data rows")
    return frame


def _is_window(cell: str) -> bool:
    return str(cell).startswith("[")


def _select(frame: pd.DataFrame, recipe: FigureRecipe) -> pd.DataFrame:
    sub = frame[
        frame["scenario"].str.startswith(recipe.scenario)
        & (frame["metric"] == recipe.metric)
    ]
    if sub.empty:
        raise SchemaError(
            f"no rows for scenario {recipe.scenario!r}, metric {recipe.metric!r}"
        )
    return sub


def _aggregates(sub: pd.DataFrame) -> pd.DataFrame:
    """Window-averaged rows, preferring realization-aggregated ones."""
    win = sub[sub["t_or_window"].map(_is_window)]
    pooled = win[win["seed"].str.split(":").str[-1].str.contains("-")]
    return pooled if not pooled.empty else win


def _h_of(tag: str) -> float:
    return float(tag.rsplit("h=", 1)[1].rstrip("]"))


def _value_column(recipe: FigureRecipe) -> str:
    return "value_normalized" if recipe.normalized else "value"


def _plot_series(ax, sub, recipe, column):
    pts = sub[~sub["t_or_window"].map(_is_window)].copy()
    if pts.empty:
        raise SchemaError("recipe asks for a time series but the CSV has none")
    pts["t"] = pts["t_or_window"].astype(float)
    keys = sorted(pts.groupby(["scenario", "L", "L_A"]).groups)
    for tag, L, la in keys:
        grp = (
            pts[(pts["scenario"] == tag) & (pts["L"] == L) & (pts["L_A"] == la)]
            .groupby("t", as_index=False)[column]
            .mean()
            .sort_values("t")
        )
        ax.plot(grp["t"], grp[column], label=f"{tag} L={L} L_A={la}")


def _plot_profile(ax, sub, recipe, column):
    if recipe.metric.startswith("D_star."):
        rows = sub.copy()
    else:
        rows = _aggregates(sub).copy()
    if rows.empty:
        raise SchemaError("recipe asks for a profile but the CSV has no averages")
    for (tag, L) in sorted(rows.groupby(["scenario", "L"]).groups):
        grp = rows[(rows["scenario"] == tag) & (rows["L"] == L)].sort_values("x")
        ax.plot(grp["x"], grp[column], marker="o", label=f"{tag} L={L}")


def _plot_transition(ax, sub, recipe, column):
    rows = _aggregates(sub).copy()
    if rows.empty:
        raise SchemaError("recipe asks for a sweep but the CSV has no averages")
    rows["h"] = rows["scenario"].map(_h_of)
    for L in sorted(rows["L"].unique()):
        grp = rows[rows["L"] == L].sort_values("h")
        ax.plot(grp["h"], grp[column], marker="s", label=f"L={L}")


_PANELS = {
    "series": _plot_series,
    "profile": _plot_profile,
    "transition": _plot_transition,
}


def render(recipe: FigureRecipe, csv_path, out_path=None) -> str:
    """Render ``recipe`` from ``csv_path``; returns the written path."""
    frame = load_frame(csv_path)
    sub = _select(frame, recipe)
    out = str(out_path or recipe.output)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    panel = _PANELS[recipe.kind]
    panel(ax, sub, recipe, _value_column(recipe))
    ax.set_title(recipe.title)
    ax.set_xlabel(recipe.xlabel)
    ax.set_ylabel(recipe.ylabel)
    ax.legend(fontsize=7, loc="best")

    if recipe.normalized and recipe.inset_unnormalized:
        inset = ax.inset_axes([0.62, 0.62, 0.34, 0.32])
        panel(inset, sub, recipe, "value")
        inset.tick_params(labelsize=6)

    fig.tight_layout()
    fig.savefig(out, dpi=150, metadata={"Software": "plotkit"})
    plt.close(fig)
    return out
