"""Blend planning engine: requirements, shortfalls, and production variants."""

from .model import (
    DemandVector,
    EngineConfig,
    Issue,
    PlanNode,
    PlanTree,
    PlanVariant,
    ProductionVector,
    RecipeMatrix,
    RequirementMatrix,
    StockState,
    StockVector,
    ValidationError,
    validate_instance,
    validate_recipes,
)
from .algebra import component_requirements, max_quantities, stock_state
from .ingestion import StockSource, load_stock, parse_recipes_csv, write_recipes_csv
from .optimizer import (
    Choice,
    PlanOutcome,
    Session,
    enumerate_variants,
    expand_node,
    open_session,
    plan,
    session_choose,
    session_totals,
)
from .reporting import export_variants, render_full_report, render_step_report

__all__ = [
    "Choice",
    "DemandVector",
    "EngineConfig",
    "Issue",
    "PlanNode",
    "PlanOutcome",
    "PlanTree",
    "PlanVariant",
    "ProductionVector",
    "RecipeMatrix",
    "RequirementMatrix",
    "Session",
    "StockSource",
    "StockState",
    "StockVector",
    "ValidationError",
    "component_requirements",
    "enumerate_variants",
    "expand_node",
    "export_variants",
    "load_stock",
    "max_quantities",
    "open_session",
    "parse_recipes_csv",
    "plan",
    "render_full_report",
    "render_step_report",
    "session_choose",
    "session_totals",
    "stock_state",
    "validate_instance",
    "validate_recipes",
    "write_recipes_csv",
]

__version__ = "0.1.0"
