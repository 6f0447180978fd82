"""Batch and scripting interface over the engine; also launches the service.

Exit codes: 0 success, 1 infeasible demand, 2 validation error,
3 I/O error, 4 limits exceeded.
"""

from __future__ import annotations

import os
import sys

import click
import numpy as np

from . import ingestion
from .model import (
    DemandVector,
    EngineConfig,
    IngestError,
    LimitExceeded,
    RecipeMatrix,
    StockVector,
    ValidationError,
    format_quantity,
)
from .algebra import component_requirements, max_quantities
from .optimizer import enumerate_variants, plan
from .reporting import export_variants, render_full_report

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_LIMITS = 4


def _read_recipes(path: str) -> RecipeMatrix:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise IngestError("UNREACHABLE", f"cannot read recipe file {path}: {exc}") from exc
    return ingestion.parse_recipes_csv(data)


def _read_stock(spec: str, expected_m: int) -> StockVector:
    return ingestion.load_stock(ingestion.source_from_spec(spec), expected_m)


def _parse_demand(demand: str | None, demand_file: str | None, n: int) -> DemandVector:
    if demand is None and demand_file is None:
        raise click.UsageError("provide --demand or --demand-file")
    if demand_file is not None:
        try:
            with open(demand_file, encoding="utf-8") as fh:
                demand = fh.read().strip()
        except OSError as exc:
            raise IngestError("UNREACHABLE", f"cannot read demand file {demand_file}: {exc}") from exc
    try:
        values = [float(cell) for cell in demand.split(",")]
    except ValueError:
        raise click.UsageError(f"demand {demand!r} is not a comma list of numbers") from None
    vector = DemandVector(np.asarray(values, dtype=np.float64))
    if len(vector) != n:
        raise click.UsageError(f"demand has {len(vector)} values, recipes define {n} products")
    return vector


@click.group()
def cli():
    """Blend planning: requirements, capacity, shortfalls, and production variants."""


@cli.command()
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
def validate(recipes_path: str) -> int:
    """Validate a recipe CSV file."""
    recipes = _read_recipes(recipes_path)
    click.echo(f"OK: {recipes.n} recipes, {recipes.m} components")
    return EXIT_OK


@cli.command()
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
@click.option("--demand", default=None, help="comma list of demanded tonnages")
@click.option("--demand-file", default=None, type=click.Path())
def requirements(recipes_path: str, demand: str | None, demand_file: str | None) -> int:
    """Print component tonnage needed per product for a demand."""
    recipes = _read_recipes(recipes_path)
    demand_vec = _parse_demand(demand, demand_file, recipes.n)
    matrix = component_requirements(recipes, demand_vec)
    click.echo("product," + ",".join(recipes.component_names))
    for name, row in zip(recipes.product_names, matrix.values):
        click.echo(name + "," + ",".join(format_quantity(v) for v in row))
    return EXIT_OK


@cli.command()
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
@click.option("--stock", "stock_spec", required=True, help="stock CSV file, URL, or inline:...")
def capacity(recipes_path: str, stock_spec: str) -> int:
    """Print each product's whole-ton capacity from current stock."""
    recipes = _read_recipes(recipes_path)
    stock = _read_stock(stock_spec, recipes.m)
    caps = max_quantities(recipes, stock)
    for name, value in zip(recipes.product_names, caps.quantities):
        click.echo(f"{name} {value}")
    return EXIT_OK


def _plan_outcome(recipes_path: str, stock_spec: str, demand: str | None, demand_file: str | None):
    recipes = _read_recipes(recipes_path)
    stock = _read_stock(stock_spec, recipes.m)
    demand_vec = _parse_demand(demand, demand_file, recipes.n)
    return recipes, plan(recipes, stock, demand_vec, EngineConfig())


@cli.command("plan")
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
@click.option("--stock", "stock_spec", required=True)
@click.option("--demand", default=None)
@click.option("--demand-file", default=None, type=click.Path())
def plan_cmd(recipes_path: str, stock_spec: str, demand: str | None, demand_file: str | None) -> int:
    """Check a demand against stock; print shortfall or the root choices."""
    recipes, outcome = _plan_outcome(recipes_path, stock_spec, demand, demand_file)
    if not outcome.feasible:
        click.echo("Required blended products cannot be made")
        for name, value in zip(recipes.component_names, outcome.shortfall.required):
            if value > 0:
                click.echo(f"{name} missing {format_quantity(value)}")
        return EXIT_INFEASIBLE
    tree = outcome.tree
    click.echo(
        "remaining: " + " ".join(f"{n}={format_quantity(v)}" for n, v in zip(recipes.component_names, tree.state.remaining))
    )
    from .optimizer import _choices_from_caps

    for choice in _choices_from_caps(tree.root.caps):
        click.echo(f"{choice.option_number}: {recipes.product_names[choice.product]} +{choice.quantity} t")
    return EXIT_OK


@cli.command()
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
@click.option("--stock", "stock_spec", required=True)
@click.option("--demand", default=None)
@click.option("--demand-file", default=None, type=click.Path())
@click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]))
def variants(recipes_path, stock_spec, demand, demand_file, fmt) -> int:
    """Enumerate every locally maximal production variant."""
    recipes, outcome = _plan_outcome(recipes_path, stock_spec, demand, demand_file)
    if not outcome.feasible:
        click.echo("Required blended products cannot be made")
        for name, value in zip(recipes.component_names, outcome.shortfall.required):
            if value > 0:
                click.echo(f"{name} missing {format_quantity(value)}")
        return EXIT_INFEASIBLE
    found = enumerate_variants(outcome.tree, EngineConfig())
    sys.stdout.write(export_variants(found, recipes.product_names, fmt).decode("utf-8"))
    return EXIT_OK


@cli.command()
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
@click.option("--stock", "stock_spec", required=True)
@click.option("--demand", default=None)
@click.option("--demand-file", default=None, type=click.Path())
def report(recipes_path, stock_spec, demand, demand_file) -> int:
    """Print the full per-node iteration report with all variants."""
    recipes, outcome = _plan_outcome(recipes_path, stock_spec, demand, demand_file)
    if not outcome.feasible:
        click.echo("Required blended products cannot be made")
        for name, value in zip(recipes.component_names, outcome.shortfall.required):
            if value > 0:
                click.echo(f"{name} missing {format_quantity(value)}")
        return EXIT_INFEASIBLE
    sys.stdout.write(render_full_report(outcome.tree, EngineConfig()))
    return EXIT_OK


@cli.command()
@click.option("--recipes", "recipes_path", required=True, type=click.Path())
@click.option("--stock-source", "stock_spec", required=True, help="stock CSV file, URL, or inline:...")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--poll-interval", default=ingestion.DEFAULT_POLL_INTERVAL, type=float)
@click.option("--save-recipes", is_flag=True, default=False, help="persist recipe uploads back to the recipe file")
def serve(recipes_path, stock_spec, host, port, poll_interval, save_recipes) -> int:
    """Run the HTTP service for the operator UI."""
    from .service import ServiceConfig
    from .service import serve as run_service

    recipes = _read_recipes(recipes_path)
    env_url = os.environ.get(ingestion.STOCK_URL_ENV)
    if env_url:
        stock_spec = env_url
    source = ingestion.source_from_spec(stock_spec, poll_interval)
    config = ServiceConfig(stock_source=source, snapshot_path=recipes_path if save_recipes else None)
    try:
        run_service(recipes, config, host=host, port=port)
    except OSError as exc:
        raise IngestError("BIND_FAILURE", f"cannot bind {host}:{port}: {exc}") from exc
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """Entry point translating engine errors into documented exit codes."""
    try:
        result = cli.main(args=argv, standalone_mode=False)
        return result if isinstance(result, int) else EXIT_OK
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return EXIT_VALIDATION
    except ValidationError as exc:
        for issue in exc.issues:
            click.echo(str(issue), err=True)
        return EXIT_VALIDATION
    except LimitExceeded as exc:
        click.echo(str(exc), err=True)
        return EXIT_LIMITS
    except IngestError as exc:
        click.echo(str(exc), err=True)
        return EXIT_IO
    except OSError as exc:
        click.echo(str(exc), err=True)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
