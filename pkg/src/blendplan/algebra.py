"""Pure blend algebra: requirements, stock state, and capacity vectors.

All three operations are pure functions of their inputs and safe for
unlimited parallel invocation.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .model import (
    DIMENSION_MISMATCH,
    DemandVector,
    Issue,
    ProductionVector,
    RecipeMatrix,
    RequirementMatrix,
    StockState,
    StockVector,
    ValidationError,
)


def component_requirements(recipes: RecipeMatrix, demand: DemandVector) -> RequirementMatrix:
    """Component tonnage needed per product: result[i][j] = demand[i] * weights[i][j].

    Equivalent to placing the demand on a diagonal and multiplying by the
    recipe matrix, but computed directly.
    """
    if len(demand) != recipes.n:
        raise ValidationError(
            [Issue(DIMENSION_MISMATCH, f"demand has {len(demand)} values, recipes define {recipes.n} products")]
        )
    values = _kernels.requirements_kernel(recipes.weights, demand.quantities)
    return RequirementMatrix(values)


def stock_state(
    requirements: RequirementMatrix, stock: StockVector, tol: float = 1e-9
) -> StockState:
    """Column usage, remaining stock, and shortfall after satisfying requirements.

    negative is true iff some component would end below -tol; required holds
    the missing tonnage (used - stock) for exactly those components.
    """
    if requirements.values.shape[1] != len(stock):
        raise ValidationError(
            [
                Issue(
                    DIMENSION_MISMATCH,
                    f"requirements cover {requirements.values.shape[1]} components, stock has {len(stock)}",
                )
            ]
        )
    used = _kernels.usage_kernel(requirements.values)
    remaining = stock.quantities - used
    short = remaining < -tol
    required = np.where(short, used - stock.quantities, 0.0)
    return StockState(used=used, remaining=remaining, required=required, negative=bool(short.any()))


def max_quantities(recipes: RecipeMatrix, stock: StockVector) -> ProductionVector:
    """Whole-ton capacity per product, each considered alone against stock.

    cap[i] = min over components j with weights[i][j] > 0 of
    floor(stock[j] / weights[i][j]); zero-weight columns impose no bound.
    """
    if len(stock) != recipes.m:
        raise ValidationError(
            [Issue(DIMENSION_MISMATCH, f"stock has {len(stock)} values, recipes use {recipes.m} components")]
        )
    caps = _kernels.caps_kernel(recipes.weights, stock.quantities)
    return ProductionVector(caps)
