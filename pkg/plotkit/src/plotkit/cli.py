"""Command line entry point: ``plotkit <recipe.json> <data.csv> -o <out.png>``."""

import argparse
import sys

from .recipe import FigureRecipe, RecipeError, SchemaError
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="Render a sweep CSV with a JSON figure recipe."
    )
    parser.add_argument("recipe", help="recipe JSON file")
    parser.add_argument("csv", help="sweep CSV file")
    parser.add_argument("-o", "--out", default=None, help="output image path")
    args = parser.parse_args(argv)

    try:
        recipe = FigureRecipe.from_json(args.recipe)
        out = render(recipe, args.csv, args.out)
    except (RecipeError, SchemaError, FileNotFoundError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
