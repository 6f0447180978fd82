"""Feasibility gate, branch-choice tree, variant enumeration, and stepping sessions.

Tree semantics: at a node, compute each product's whole-ton capacity from
the node's remaining stock. Exactly one positive capacity is applied in
full automatically (a forced addition); two or more become numbered branch
choices; zero positive capacities means the node is a leaf and nothing
more can be produced. Applying a product's full capacity always drives its
own capacity to zero, and stock never increases down a path, so every
branch choice permanently retires at least one product and depth is
bounded by the product count.
"""

from __future__ import annotations

import secrets
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .algebra import component_requirements, stock_state
from .model import (
    DIMENSION_MISMATCH,
    NEGATIVE_VALUE,
    DemandVector,
    EngineConfig,
    InvalidOption,
    Issue,
    LimitExceeded,
    PlanNode,
    PlanTree,
    PlanVariant,
    ProductionVector,
    RecipeMatrix,
    SessionFinishedError,
    StockState,
    StockVector,
    ValidationError,
    validate_instance,
)


@dataclass(frozen=True)
class Choice:
    """A numbered branch option: produce the product's full current capacity."""

    option_number: int
    product: int
    quantity: int


@dataclass(eq=False)
class PlanOutcome:
    """Either a shortfall (demand infeasible) or the full plan tree."""

    shortfall: StockState | None = None
    tree: PlanTree | None = None

    def __post_init__(self):
        if (self.shortfall is None) == (self.tree is None):
            raise ValueError("exactly one of shortfall and tree must be set")

    @property
    def feasible(self) -> bool:
        return self.tree is not None


@dataclass(frozen=True)
class TranscriptEvent:
    """One step-report event recorded while walking a session down the tree."""

    kind: str  # demand | choices | choice | forced | leaf
    product: int | None = None
    quantity: int | None = None
    option: int | None = None
    caps: tuple[int, ...] | None = None


def _as_stock_array(recipes: RecipeMatrix, node_stock) -> np.ndarray:
    q = node_stock.quantities if isinstance(node_stock, StockVector) else np.asarray(node_stock, dtype=np.float64)
    if q.ndim != 1 or q.shape[0] != recipes.m:
        raise ValidationError(
            [Issue(DIMENSION_MISMATCH, f"stock has {q.size} values, recipes use {recipes.m} components")]
        )
    if np.any(q < -_kernels.SNAP):
        raise ValidationError([Issue(NEGATIVE_VALUE, "node stock must be nonnegative")])
    return np.ascontiguousarray(np.maximum(q, 0.0))


def _choices_from_caps(caps: np.ndarray) -> list[Choice]:
    return [
        Choice(option_number=k + 1, product=int(i), quantity=int(caps[i]))
        for k, i in enumerate(np.nonzero(caps > 0)[0])
    ]


def expand_node(recipes: RecipeMatrix, node_stock) -> tuple[ProductionVector, list[Choice]]:
    """Forced additions and branch choices available from a node's stock.

    While exactly one product has positive capacity it is applied in full
    and deducted; the returned choices are the remaining options (empty at
    a leaf), ordered by ascending product index.
    """
    stock = _as_stock_array(recipes, node_stock)
    forced, _, caps = _kernels.expand_kernel(recipes.weights, stock)
    return ProductionVector(forced), _choices_from_caps(caps)


def _build_node(
    weights: np.ndarray,
    chosen: tuple[int, int] | None,
    stock: np.ndarray,
    cfg: EngineConfig,
    depth: int,
    counter: list[int],
) -> PlanNode:
    if depth > cfg.max_tree_depth:
        raise LimitExceeded(f"plan tree exceeded max depth {cfg.max_tree_depth}")
    forced, stock_after, caps = _kernels.expand_kernel(weights, stock)
    node = PlanNode(chosen=chosen, remaining=stock_after, forced=forced, caps=caps)
    positive = np.nonzero(caps > 0)[0]
    if positive.size == 0:
        counter[0] += 1
        if counter[0] > cfg.max_variants:
            raise LimitExceeded(f"plan tree exceeded max variants {cfg.max_variants}")
        return node
    for i in positive:
        q = int(caps[i])
        child_stock = np.maximum(stock_after - q * weights[i], 0.0)
        node.children.append(_build_node(weights, (int(i), q), child_stock, cfg, depth + 1, counter))
    return node


def plan(
    recipes: RecipeMatrix,
    stock: StockVector,
    demand: DemandVector,
    cfg: EngineConfig | None = None,
) -> PlanOutcome:
    """Gate the demand against stock, then build the full branch-choice tree.

    Returns the shortfall state when the demand alone exceeds stock,
    otherwise the tree rooted at the post-demand remaining stock.
    """
    cfg = cfg or EngineConfig()
    issues = validate_instance(recipes, stock, demand)
    if issues:
        raise ValidationError(issues)
    requirements = component_requirements(recipes, demand)
    state = stock_state(requirements, stock, cfg.shortfall_tolerance)
    if state.negative:
        return PlanOutcome(shortfall=state)
    root_stock = np.ascontiguousarray(np.maximum(state.remaining, 0.0))
    counter = [0]
    root = _build_node(recipes.weights, None, root_stock, cfg, 0, counter)
    tree = PlanTree(
        recipes=recipes,
        demand=demand,
        stock=stock,
        requirements=requirements,
        state=state,
        root=root,
        leaf_count=counter[0],
    )
    return PlanOutcome(tree=tree)


def _node_path_entries(node: PlanNode) -> list[tuple[int, int]]:
    entries: list[tuple[int, int]] = []
    if node.chosen is not None:
        entries.append(node.chosen)
    for i in np.nonzero(node.forced > 0)[0]:
        entries.append((int(i), int(node.forced[i])))
    return entries


def enumerate_variants(tree: PlanTree, cfg: EngineConfig | None = None) -> list[PlanVariant]:
    """Collect every leaf's total production, deduplicated and ordered.

    Identical totals reached by different choice orders are merged keeping
    the lexicographically smallest path; the result is ordered by
    descending total tonnage, ties broken by lexicographic totals.
    """
    cfg = cfg or EngineConfig()
    n = tree.recipes.n
    demand_q = tree.demand.quantities
    best_paths: dict[tuple[int, ...], tuple[tuple[int, int], ...]] = {}
    seen = [0]

    def visit(node: PlanNode, path: tuple[tuple[int, int], ...], extras: np.ndarray) -> None:
        for product, qty in _node_path_entries(node):
            path = path + ((product, qty),)
            extras = extras.copy()
            extras[product] += qty
        if not node.children:
            seen[0] += 1
            if seen[0] > cfg.max_variants:
                raise LimitExceeded(f"enumeration exceeded max variants {cfg.max_variants}")
            key = tuple(int(x) for x in extras)
            if key not in best_paths or path < best_paths[key]:
                best_paths[key] = path
            return
        for child in node.children:
            visit(child, path, extras)

    visit(tree.root, (), np.zeros(n, dtype=np.int64))

    def sort_key(item: tuple[tuple[int, ...], tuple[tuple[int, int], ...]]):
        extras = item[0]
        return (-sum(extras), tuple(demand_q[i] + extras[i] for i in range(n)))

    variants = []
    for extras_key, path in sorted(best_paths.items(), key=sort_key):
        extras = np.array(extras_key, dtype=np.int64)
        variants.append(PlanVariant(totals=demand_q + extras, extras=extras, path=path))
    return variants


@dataclass(eq=False)
class Session:
    """A mutable walk down the plan tree, one numbered choice per step.

    Owned by one logical writer at a time; the service layer serializes
    operations per session id.
    """

    id: str
    recipes: RecipeMatrix
    initial_stock: StockVector
    demand: DemandVector
    cfg: EngineConfig
    remaining: np.ndarray
    extras: np.ndarray
    step: int = 0
    choices: list[Choice] = field(default_factory=list)
    finished: bool = False
    transcript: list[TranscriptEvent] = field(default_factory=list)
    history: list[int] = field(default_factory=list)


def _record_expansion(session: Session, forced: np.ndarray, caps: np.ndarray) -> None:
    for i in np.nonzero(forced > 0)[0]:
        session.transcript.append(TranscriptEvent(kind="forced", product=int(i), quantity=int(forced[i])))
    session.extras = session.extras + forced
    session.choices = _choices_from_caps(caps)
    if session.choices:
        session.transcript.append(TranscriptEvent(kind="choices", caps=tuple(int(c) for c in caps)))
        session.finished = False
    else:
        session.transcript.append(TranscriptEvent(kind="leaf"))
        session.finished = True


def open_session(
    recipes: RecipeMatrix,
    stock: StockVector,
    demand: DemandVector,
    cfg: EngineConfig | None = None,
    session_id: str | None = None,
) -> Session | StockState:
    """Start a stepping session, or return the shortfall state when infeasible.

    The session starts at the tree root with any root forced additions
    already applied.
    """
    cfg = cfg or EngineConfig()
    issues = validate_instance(recipes, stock, demand)
    if issues:
        raise ValidationError(issues)
    requirements = component_requirements(recipes, demand)
    state = stock_state(requirements, stock, cfg.shortfall_tolerance)
    if state.negative:
        return state
    root_stock = np.ascontiguousarray(np.maximum(state.remaining, 0.0))
    session = Session(
        id=session_id or secrets.token_urlsafe(16),
        recipes=recipes,
        initial_stock=stock,
        demand=demand,
        cfg=cfg,
        remaining=root_stock,
        extras=np.zeros(recipes.n, dtype=np.int64),
    )
    session.transcript.append(TranscriptEvent(kind="demand"))
    forced, stock_after, caps = _kernels.expand_kernel(recipes.weights, root_stock)
    session.remaining = stock_after
    _record_expansion(session, forced, caps)
    return session


def session_choose(session: Session, option_number: int) -> Session:
    """Apply a numbered choice in full, then any forced additions; advance one step."""
    if session.finished:
        raise SessionFinishedError(f"session {session.id} is finished")
    chosen = next((c for c in session.choices if c.option_number == option_number), None)
    if chosen is None:
        raise InvalidOption(f"option {option_number} is not one of the current choices")
    if session.step + 1 > session.cfg.max_tree_depth:
        raise LimitExceeded(f"session exceeded max depth {session.cfg.max_tree_depth}")
    weights = session.recipes.weights
    stock = np.maximum(session.remaining - chosen.quantity * weights[chosen.product], 0.0)
    stock = np.ascontiguousarray(stock)
    session.extras = session.extras.copy()
    session.extras[chosen.product] += chosen.quantity
    session.step += 1
    session.history.append(option_number)
    session.transcript.append(
        TranscriptEvent(
            kind="choice", product=chosen.product, quantity=chosen.quantity, option=option_number
        )
    )
    forced, stock_after, caps = _kernels.expand_kernel(weights, stock)
    session.remaining = stock_after
    _record_expansion(session, forced, caps)
    return session


def session_totals(session: Session) -> np.ndarray:
    """Demand plus all applied choices and forced additions, per product."""
    return session.demand.quantities + session.extras
