"""Step reports, the full iteration report, and variant exports.

The step report follows one row grammar everywhere: a demand row (step 0,
sub-step 0), "Possible choices:" rows at branch nodes showing each
product's capacity, one row per applied choice or forced addition with its
production delta and running totals, and a terminating all-zero delta row
at every leaf. Rendering a whole tree expands every branch: root branches
become steps 1..k and deeper branches get dotted sub-step labels (option
number prefixes, e.g. "1.1").
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .model import (
    EngineConfig,
    PlanNode,
    PlanTree,
    PlanVariant,
    format_quantity,
    json_number,
)
from .optimizer import (
    Session,
    enumerate_variants,
    open_session,
    session_choose,
)

CHOICES_LABEL = "Possible choices:"


def json_bytes(obj) -> bytes:
    """Compact UTF-8 JSON, byte-identical to what the HTTP layer emits."""
    return json.dumps(obj, ensure_ascii=False, allow_nan=False, indent=None, separators=(",", ":")).encode(
        "utf-8"
    )


@dataclass(frozen=True)
class StepRow:
    """One report row; values holds running totals, or capacities on choices rows."""

    step: int
    label: str
    kind: str  # demand | choice | forced | leaf | choices
    delta: tuple[float, ...] | None
    values: tuple[float, ...]


@dataclass(frozen=True)
class StepReport:
    product_names: tuple[str, ...]
    rows: tuple[StepRow, ...]

    def to_text(self) -> str:
        headers = ["step", "sub step", "P3"] + list(self.product_names)
        cells = [headers]
        for row in self.rows:
            delta = "" if row.delta is None else "[" + " ".join(format_quantity(v) for v in row.delta) + "]"
            cells.append(
                [str(row.step), row.label, delta] + [format_quantity(v) for v in row.values]
            )
        widths = [max(len(line[i]) for line in cells) for i in range(len(headers))]
        lines = ["  ".join(cell.ljust(widths[i]) for i, cell in enumerate(line)).rstrip() for line in cells]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> bytes:
        lines = ["step,sub_step,p3," + ",".join(self.product_names)]
        for row in self.rows:
            delta = "" if row.delta is None else "[" + " ".join(format_quantity(v) for v in row.delta) + "]"
            lines.append(
                ",".join([str(row.step), row.label.rstrip(":"), delta] + [format_quantity(v) for v in row.values])
            )
        return ("\n".join(lines) + "\n").encode("utf-8")

    def to_json_obj(self) -> dict:
        return {
            "products": list(self.product_names),
            "rows": [
                {
                    "step": row.step,
                    "sub_step": row.label,
                    "kind": row.kind,
                    "p3": None if row.delta is None else [json_number(v) for v in row.delta],
                    "values": [json_number(v) for v in row.values],
                }
                for row in self.rows
            ],
        }


def _delta_vector(n: int, product: int, quantity: int) -> tuple[float, ...]:
    delta = [0.0] * n
    delta[product] = float(quantity)
    return tuple(delta)


def _session_rows(session: Session) -> list[StepRow]:
    n = session.recipes.n
    totals = [float(v) for v in session.demand.quantities]
    rows: list[StepRow] = []
    step = 0
    counter = 0
    for event in session.transcript:
        if event.kind == "demand":
            rows.append(
                StepRow(0, "0", "demand", tuple(totals), tuple(totals))
            )
        elif event.kind == "choices":
            rows.append(StepRow(step, CHOICES_LABEL, "choices", None, tuple(float(c) for c in event.caps)))
        elif event.kind == "choice":
            step += 1
            counter = 1
            totals[event.product] += event.quantity
            rows.append(
                StepRow(step, str(counter), "choice", _delta_vector(n, event.product, event.quantity), tuple(totals))
            )
        elif event.kind == "forced":
            counter += 1
            totals[event.product] += event.quantity
            rows.append(
                StepRow(step, str(counter), "forced", _delta_vector(n, event.product, event.quantity), tuple(totals))
            )
        elif event.kind == "leaf":
            counter += 1
            rows.append(StepRow(step, str(counter), "leaf", tuple([0.0] * n), tuple(totals)))
    return rows


def _tree_rows(tree: PlanTree) -> list[StepRow]:
    n = tree.recipes.n
    rows: list[StepRow] = []
    demand = [float(v) for v in tree.demand.quantities]
    rows.append(StepRow(0, "0", "demand", tuple(demand), tuple(demand)))

    def emit_expansion(node: PlanNode, step: int, prefix: str, counter: int, totals: list[float]) -> int:
        """Forced rows, then either the choices row plus child branches or the leaf row."""
        for i in np.nonzero(node.forced > 0)[0]:
            totals[i] += int(node.forced[i])
            label = f"{prefix}{counter}" if not prefix else f"{prefix}.{counter}"
            rows.append(StepRow(step, label, "forced", _delta_vector(n, int(i), int(node.forced[i])), tuple(totals)))
            counter += 1
        if node.children:
            rows.append(StepRow(step, CHOICES_LABEL, "choices", None, tuple(float(c) for c in node.caps)))
            for option, child in enumerate(node.children, start=1):
                child_prefix = f"{prefix}.{option}" if prefix else str(option)
                descend(child, step, child_prefix, totals)
        else:
            label = f"{prefix}{counter}" if not prefix else f"{prefix}.{counter}"
            rows.append(StepRow(step, label, "leaf", tuple([0.0] * n), tuple(totals)))
        return counter

    def descend(node: PlanNode, parent_step: int, prefix: str, totals: list[float]) -> None:
        """Emit one branch choice and everything beneath it."""
        totals = list(totals)
        product, quantity = node.chosen
        if parent_step == 0:
            # root branches become steps 1..k with plain row counters
            step, label_prefix, counter = int(prefix), "", 1
            label = str(counter)
        else:
            step, label_prefix, counter = parent_step, prefix, 1
            label = f"{prefix}.{counter}"
        totals[product] += quantity
        rows.append(StepRow(step, label, "choice", _delta_vector(n, product, quantity), tuple(totals)))
        emit_expansion(node, step, label_prefix, counter + 1, totals)

    root_counter = emit_expansion(tree.root, 0, "", 1, demand)
    return rows


def _replay_variant(tree: PlanTree, variant: PlanVariant) -> Session:
    """Re-walk a variant's path as a session to recover its transcript."""
    session = open_session(tree.recipes, tree.stock, tree.demand, None, session_id="replay")
    entries = list(variant.path)
    applied = 0
    while not session.finished:
        # skip path entries already consumed by forced additions
        while applied < len(entries):
            product, qty = entries[applied]
            match = next(
                (c for c in session.choices if c.product == product and c.quantity == qty), None
            )
            if match is None:
                applied += 1
                continue
            session_choose(session, match.option_number)
            applied += 1
            break
        else:
            break
    return session


def render_step_report(source: Session | PlanTree, variant: PlanVariant | None = None) -> StepReport:
    """Build the step report for a session, a whole plan tree, or one variant's path."""
    if isinstance(source, Session):
        return StepReport(source.recipes.product_names, tuple(_session_rows(source)))
    if variant is not None:
        return StepReport(
            source.recipes.product_names, tuple(_session_rows(_replay_variant(source, variant)))
        )
    return StepReport(source.recipes.product_names, tuple(_tree_rows(source)))


def _format_named(names, values) -> str:
    return ", ".join(f"{name}={format_quantity(v)}" for name, v in zip(names, values))


def render_full_report(tree: PlanTree, cfg: EngineConfig | None = None) -> str:
    """Depth-first dump of every node plus the deduplicated variant list."""
    recipes = tree.recipes
    lines: list[str] = []
    lines.append("products: " + ", ".join(recipes.product_names))
    lines.append("components: " + ", ".join(recipes.component_names))
    lines.append("demand: " + _format_named(recipes.product_names, tree.demand.quantities))
    lines.append("stock: " + _format_named(recipes.component_names, tree.stock.quantities))
    lines.append("component usage for demand: " + _format_named(recipes.component_names, tree.state.used))
    lines.append("")
    lines.append("plan tree (remaining stock, forced additions, capacities per node):")

    def visit(node: PlanNode, depth: int, totals: np.ndarray) -> None:
        totals = totals.astype(np.float64).copy()
        indent = "  " * depth
        if node.chosen is None:
            head = "root"
        else:
            product, qty = node.chosen
            head = f"choice {recipes.product_names[product]} +{qty} t"
        for i in np.nonzero(node.forced > 0)[0]:
            totals[i] += int(node.forced[i])
        if node.chosen is not None:
            totals[node.chosen[0]] += node.chosen[1]
        forced = _format_named(recipes.product_names, node.forced)
        remaining = _format_named(recipes.component_names, node.remaining)
        caps = _format_named(recipes.product_names, node.caps)
        line = f"{indent}{head} | remaining: {remaining} | forced: {forced} | capacity: {caps}"
        if not node.children:
            line += " | leaf totals: " + _format_named(recipes.product_names, totals)
        lines.append(line)
        for child in node.children:
            visit(child, depth + 1, totals)

    visit(tree.root, 0, tree.demand.quantities)
    lines.append("")
    variants = enumerate_variants(tree, cfg)
    lines.append(f"variants ({len(variants)}):")
    for idx, variant in enumerate(variants, start=1):
        path = " -> ".join(f"{recipes.product_names[p]}+{q}" for p, q in variant.path)
        lines.append(
            f"{idx}. {_format_named(recipes.product_names, variant.totals)} (path: {path})"
        )
    return "\n".join(lines) + "\n"


def export_variants(variants: list[PlanVariant], product_names, fmt: str = "csv") -> bytes:
    """Serialize variants as CSV (spreadsheet-openable) or JSON; byte-stable."""
    if fmt == "csv":
        lines = ["variant," + ",".join(product_names)]
        for idx, variant in enumerate(variants, start=1):
            lines.append(str(idx) + "," + ",".join(format_quantity(v) for v in variant.totals))
        return ("\n".join(lines) + "\n").encode("utf-8")
    if fmt == "json":
        payload = [
            {
                "totals": [json_number(v) for v in variant.totals],
                "path": [[int(p), int(q)] for p, q in variant.path],
            }
            for variant in variants
        ]
        return json_bytes(payload)
    raise ValueError(f"unknown export format {fmt!r}")
