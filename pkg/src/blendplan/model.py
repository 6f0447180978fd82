"""Domain types, validation, and error codes shared by every blendplan module.

All value types are immutable after construction (arrays are frozen
read-only), so they can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

# Validation / error codes. Kept as plain strings: they travel through
# exception payloads, CLI exit paths, and JSON error bodies unchanged.
ROW_SUM = "ROW_SUM"
NEGATIVE_WEIGHT = "NEGATIVE_WEIGHT"
ZERO_ROW = "ZERO_ROW"
DUPLICATE_NAME = "DUPLICATE_NAME"
NON_FINITE = "NON_FINITE"
EMPTY_NAME = "EMPTY_NAME"
DIMENSION_MISMATCH = "DIMENSION_MISMATCH"
NEGATIVE_VALUE = "NEGATIVE_VALUE"
RAGGED_ROWS = "RAGGED_ROWS"
PARSE = "PARSE"
UNREACHABLE = "UNREACHABLE"
INVALID_OPTION = "INVALID_OPTION"
SESSION_FINISHED = "SESSION_FINISHED"
SESSION_NOT_FOUND = "SESSION_NOT_FOUND"
LIMIT_EXCEEDED = "LIMIT_EXCEEDED"
VALIDATION = "VALIDATION"
BIND_FAILURE = "BIND_FAILURE"


@dataclass(frozen=True)
class Issue:
    """One violated validation rule, with its location when known."""

    code: str
    message: str
    row: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        where = ""
        if self.row is not None and self.column is not None:
            where = f" (row {self.row}, column {self.column})"
        elif self.row is not None:
            where = f" (row {self.row})"
        return f"{self.code}: {self.message}{where}"


class BlendPlanError(Exception):
    """Base class for all engine errors."""

    code: str = "ERROR"


class ValidationError(BlendPlanError):
    """Raised when input data violates one or more validation rules."""

    code = VALIDATION

    def __init__(self, issues: Sequence[Issue]):
        self.issues: tuple[Issue, ...] = tuple(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class LimitExceeded(BlendPlanError):
    code = LIMIT_EXCEEDED


class InvalidOption(BlendPlanError):
    code = INVALID_OPTION


class SessionFinishedError(BlendPlanError):
    code = SESSION_FINISHED


class SessionNotFound(BlendPlanError):
    code = SESSION_NOT_FOUND


class IngestError(BlendPlanError):
    """I/O-level failure while loading recipes or stock."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


def _frozen_array(values, dtype=np.float64) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


def _check_vector(values: np.ndarray, what: str) -> list[Issue]:
    issues = []
    for idx, v in enumerate(values):
        if not math.isfinite(v):
            issues.append(Issue(NON_FINITE, f"{what} value is not finite", row=idx))
        elif v < 0:
            issues.append(Issue(NEGATIVE_VALUE, f"{what} value is negative", row=idx))
    return issues


@dataclass(frozen=True)
class EngineConfig:
    """Tunable engine limits; defaults are safe for desk-scale plants."""

    row_sum_tolerance: float = 1e-6
    shortfall_tolerance: float = 1e-9
    max_tree_depth: int = 64
    max_variants: int = 100_000

    def __post_init__(self):
        for name in ("row_sum_tolerance", "shortfall_tolerance", "max_tree_depth", "max_variants"):
            if getattr(self, name) <= 0:
                raise ValueError(f"EngineConfig.{name} must be positive")


def recipe_issues(
    product_names: Sequence[str],
    component_names: Sequence[str],
    weights,
    row_sum_tolerance: float = 1e-6,
) -> list[Issue]:
    """Collect every rule violated by candidate recipe data (empty when valid)."""
    issues: list[Issue] = []
    try:
        w = np.asarray(weights, dtype=np.float64)
    except (TypeError, ValueError):
        return [Issue(PARSE, "weights are not numeric")]
    if w.ndim != 2:
        return [Issue(RAGGED_ROWS, "weights are not a rectangular matrix")]
    n, m = w.shape
    if n < 1 or m < 1:
        issues.append(Issue(DIMENSION_MISMATCH, "recipe matrix must have at least one row and one column"))
        return issues
    if len(product_names) != n:
        issues.append(Issue(DIMENSION_MISMATCH, f"expected {n} product names, got {len(product_names)}"))
    if len(component_names) != m:
        issues.append(Issue(DIMENSION_MISMATCH, f"expected {m} component names, got {len(component_names)}"))

    for idx, name in enumerate(product_names):
        if not str(name).strip():
            issues.append(Issue(EMPTY_NAME, "product name is empty", row=idx))
    for idx, name in enumerate(component_names):
        if not str(name).strip():
            issues.append(Issue(EMPTY_NAME, "component name is empty", column=idx))
    seen: dict[str, int] = {}
    for idx, name in enumerate(product_names):
        if name in seen:
            issues.append(Issue(DUPLICATE_NAME, f"duplicate product name {name!r}", row=idx))
        seen[str(name)] = idx
    seen = {}
    for idx, name in enumerate(component_names):
        if name in seen:
            issues.append(Issue(DUPLICATE_NAME, f"duplicate component name {name!r}", column=idx))
        seen[str(name)] = idx

    for i in range(n):
        row_bad = False
        for j in range(m):
            v = w[i, j]
            if not math.isfinite(v):
                issues.append(Issue(NON_FINITE, "weight is not finite", row=i, column=j))
                row_bad = True
            elif v < 0:
                issues.append(Issue(NEGATIVE_WEIGHT, f"weight {v} is negative", row=i, column=j))
                row_bad = True
        if row_bad:
            continue
        row = w[i]
        if not np.any(row > 0):
            issues.append(Issue(ZERO_ROW, "recipe row has no positive weight", row=i))
        total = float(row.sum())
        if abs(total - 1.0) > row_sum_tolerance:
            issues.append(Issue(ROW_SUM, f"recipe row sums to {total:.9g}, expected 1", row=i))
    return issues


@dataclass(frozen=True, eq=False)
class RecipeMatrix:
    """Mass-fraction recipe matrix: row i gives tons of each component per ton of product i."""

    product_names: tuple[str, ...]
    component_names: tuple[str, ...]
    weights: np.ndarray
    row_sum_tolerance: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "product_names", tuple(str(s) for s in self.product_names))
        object.__setattr__(self, "component_names", tuple(str(s) for s in self.component_names))
        object.__setattr__(self, "weights", _frozen_array(self.weights))
        issues = recipe_issues(
            self.product_names, self.component_names, self.weights, self.row_sum_tolerance
        )
        if issues:
            raise ValidationError(issues)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def m(self) -> int:
        return self.weights.shape[1]


def validate_recipes(
    product_names: Sequence[str],
    component_names: Sequence[str],
    weights,
    row_sum_tolerance: float = 1e-6,
) -> RecipeMatrix:
    """Build a RecipeMatrix, raising ValidationError listing every violated rule."""
    return RecipeMatrix(tuple(product_names), tuple(component_names), weights, row_sum_tolerance)


@dataclass(frozen=True, eq=False)
class DemandVector:
    """Demanded tonnages of blended products, one per recipe row."""

    quantities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "quantities", _frozen_array(self.quantities))
        if self.quantities.ndim != 1:
            raise ValidationError([Issue(DIMENSION_MISMATCH, "demand must be a flat vector")])
        issues = _check_vector(self.quantities, "demand")
        if issues:
            raise ValidationError(issues)

    def __len__(self) -> int:
        return self.quantities.shape[0]


@dataclass(frozen=True, eq=False)
class StockVector:
    """Available component tonnages; as_of records when the stock was read."""

    quantities: np.ndarray
    as_of: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "quantities", _frozen_array(self.quantities))
        if self.quantities.ndim != 1:
            raise ValidationError([Issue(DIMENSION_MISMATCH, "stock must be a flat vector")])
        issues = _check_vector(self.quantities, "stock")
        if issues:
            raise ValidationError(issues)

    def __len__(self) -> int:
        return self.quantities.shape[0]


@dataclass(frozen=True, eq=False)
class RequirementMatrix:
    """Tons of component j needed to satisfy the demand for product i."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values))
        if self.values.ndim != 2:
            raise ValidationError([Issue(DIMENSION_MISMATCH, "requirements must be a matrix")])
        if np.any(self.values < 0):
            raise ValidationError([Issue(NEGATIVE_VALUE, "requirement values must be nonnegative")])


@dataclass(frozen=True, eq=False)
class StockState:
    """Component usage, remaining stock, and per-component shortfall for one demand."""

    used: np.ndarray
    remaining: np.ndarray
    required: np.ndarray
    negative: bool

    def __post_init__(self):
        object.__setattr__(self, "used", _frozen_array(self.used))
        object.__setattr__(self, "remaining", _frozen_array(self.remaining))
        object.__setattr__(self, "required", _frozen_array(self.required))


@dataclass(frozen=True, eq=False)
class ProductionVector:
    """Whole-ton production quantities, one per blended product."""

    quantities: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.quantities, dtype=np.int64)
        if np.any(arr < 0):
            raise ValidationError([Issue(NEGATIVE_VALUE, "production quantities must be nonnegative")])
        arr.setflags(write=False)
        object.__setattr__(self, "quantities", arr)

    def __len__(self) -> int:
        return self.quantities.shape[0]


@dataclass(frozen=True, eq=False)
class PlanVariant:
    """One deduplicated leaf of the plan tree.

    totals is demand plus every choice and forced addition along path;
    extras is the integer production added on top of demand.
    """

    totals: np.ndarray
    extras: np.ndarray
    path: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "totals", _frozen_array(self.totals))
        object.__setattr__(self, "extras", _frozen_array(self.extras, dtype=np.int64))
        object.__setattr__(self, "path", tuple((int(p), int(q)) for p, q in self.path))


@dataclass(eq=False)
class PlanNode:
    """One node of the branch-choice tree.

    remaining is the stock after this node's choice and forced additions,
    i.e. the state its children expand from. At a leaf, caps is all zero.
    """

    chosen: tuple[int, int] | None
    remaining: np.ndarray
    forced: np.ndarray
    caps: np.ndarray
    children: list["PlanNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return not self.children and not np.any(self.caps > 0)


@dataclass(eq=False)
class PlanTree:
    """Full branch-choice tree for a feasible demand."""

    recipes: RecipeMatrix
    demand: DemandVector
    stock: StockVector
    requirements: RequirementMatrix
    state: StockState
    root: PlanNode
    leaf_count: int


def validate_instance(recipes: RecipeMatrix, stock, demand) -> list[Issue]:
    """Check dimensional compatibility and value ranges for a planning triple.

    stock and demand may be typed vectors or raw sequences; an empty list
    means the triple is well-formed.
    """
    issues: list[Issue] = []
    stock_q = stock.quantities if isinstance(stock, StockVector) else np.asarray(stock, dtype=np.float64)
    demand_q = demand.quantities if isinstance(demand, DemandVector) else np.asarray(demand, dtype=np.float64)
    if stock_q.ndim != 1 or stock_q.shape[0] != recipes.m:
        issues.append(
            Issue(DIMENSION_MISMATCH, f"stock has {stock_q.size} values, recipes use {recipes.m} components")
        )
    if demand_q.ndim != 1 or demand_q.shape[0] != recipes.n:
        issues.append(
            Issue(DIMENSION_MISMATCH, f"demand has {demand_q.size} values, recipes define {recipes.n} products")
        )
    if stock_q.ndim == 1:
        issues.extend(_check_vector(stock_q, "stock"))
    if demand_q.ndim == 1:
        issues.extend(_check_vector(demand_q, "demand"))
    return issues


def format_quantity(x: float) -> str:
    """Render a tonnage: integers without decimals, else up to 6 significant digits."""
    f = float(x)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return f"{f:.6g}"


def json_number(x) -> int | float:
    """Canonical JSON rendering: integral values become ints."""
    f = float(x)
    if f == int(f) and abs(f) < 1e15:
        return int(f)
    return f
