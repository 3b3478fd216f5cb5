"""Minimal figure rendering for relaxometer sweep CSVs."""

from .recipe import FigureRecipe, RecipeError, SchemaError
from .render import render

__all__ = ["FigureRecipe", "RecipeError", "SchemaError", "render"]
