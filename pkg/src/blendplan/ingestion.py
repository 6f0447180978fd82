"""Recipe CSV parsing/writing and stock loading from file, inline text, or HTTP feed.

Recipe CSV: one recipe per line, column 1 the product name, remaining
columns the weights. An optional first header line (detected when its
second cell is non-numeric) supplies component names; otherwise components
are named C1..Cm. Comma delimiter, no quoting: names must not contain
commas. Decimal separator is "." regardless of locale.

Stock CSV: a single line of m values, optionally followed by a line
"as_of,<unix-seconds>".
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass

import httpx
import numpy as np

from .model import (
    DIMENSION_MISMATCH,
    EMPTY_NAME,
    NEGATIVE_VALUE,
    PARSE,
    RAGGED_ROWS,
    UNREACHABLE,
    IngestError,
    Issue,
    RecipeMatrix,
    StockVector,
    ValidationError,
    validate_recipes,
)

DEFAULT_POLL_INTERVAL = 10.0
STOCK_URL_ENV = "BLENDPLAN_STOCK_URL"


def _is_number(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def parse_recipes_csv(data: bytes | str, row_sum_tolerance: float = 1e-6) -> RecipeMatrix:
    """Parse recipe CSV text into a validated RecipeMatrix."""
    text = data.decode("utf-8-sig") if isinstance(data, (bytes, bytearray)) else data
    lines = [(idx + 1, line) for idx, line in enumerate(text.splitlines()) if line.strip()]
    if not lines:
        raise ValidationError([Issue(PARSE, "no recipe rows in input")])
    rows = [(lineno, [cell.strip() for cell in line.split(",")]) for lineno, line in lines]

    width = len(rows[0][1])
    issues: list[Issue] = []
    for lineno, cells in rows:
        if len(cells) != width:
            issues.append(
                Issue(RAGGED_ROWS, f"row has {len(cells)} cells, expected {width}", row=lineno)
            )
    if issues:
        raise ValidationError(issues)
    if width < 2:
        raise ValidationError([Issue(PARSE, "each row needs a product name and at least one weight")])

    header_cells = rows[0][1]
    has_header = not _is_number(header_cells[1])
    if has_header:
        component_names = tuple(header_cells[1:])
        data_rows = rows[1:]
    else:
        component_names = tuple(f"C{j + 1}" for j in range(width - 1))
        data_rows = rows
    if not data_rows:
        raise ValidationError([Issue(PARSE, "no recipe data rows after header")])

    product_names: list[str] = []
    weights: list[list[float]] = []
    for lineno, cells in data_rows:
        if not cells[0]:
            issues.append(Issue(EMPTY_NAME, "product name is empty", row=lineno))
        product_names.append(cells[0])
        row: list[float] = []
        for col, cell in enumerate(cells[1:], start=2):
            try:
                row.append(float(cell))
            except ValueError:
                issues.append(
                    Issue(PARSE, f"weight cell {cell!r} is not numeric", row=lineno, column=col)
                )
                row.append(0.0)
        weights.append(row)
    if issues:
        raise ValidationError(issues)
    return validate_recipes(product_names, component_names, weights, row_sum_tolerance)


def _format_weight(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(float(v))


def write_recipes_csv(recipes: RecipeMatrix) -> bytes:
    """Render a RecipeMatrix as CSV; parse_recipes_csv reconstructs it exactly.

    The header line is emitted only when component names differ from the
    default C1..Cm.
    """
    default_names = tuple(f"C{j + 1}" for j in range(recipes.m))
    out: list[str] = []
    if recipes.component_names != default_names:
        out.append("name," + ",".join(recipes.component_names))
    for name, row in zip(recipes.product_names, recipes.weights):
        out.append(name + "," + ",".join(_format_weight(v) for v in row))
    return ("\n".join(out) + "\n").encode("utf-8")


@dataclass(frozen=True)
class StockSource:
    """Where stock levels come from: a CSV file, inline CSV text, or an HTTP feed."""

    kind: str  # file | http-poll | inline
    location: str
    poll_interval: float = DEFAULT_POLL_INTERVAL

    def __post_init__(self):
        if self.kind not in {"file", "http-poll", "inline"}:
            raise ValueError(f"unknown stock source kind {self.kind!r}")
        if self.kind == "http-poll" and self.poll_interval < 1:
            raise ValueError("poll_interval must be at least 1 second")


def source_from_spec(spec: str, poll_interval: float = DEFAULT_POLL_INTERVAL) -> StockSource:
    """Build a StockSource from a CLI-style spec: URL, inline:..., or file path."""
    if spec.startswith(("http://", "https://")):
        return StockSource("http-poll", spec, poll_interval)
    if spec.startswith("inline:"):
        return StockSource("inline", spec[len("inline:"):])
    return StockSource("file", spec)


def parse_stock_csv(text: str) -> tuple[list[float], float | None]:
    lines = [line.strip() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValidationError([Issue(PARSE, "stock file is empty")])
    values: list[float] = []
    for col, cell in enumerate(lines[0].split(","), start=1):
        try:
            values.append(float(cell.strip()))
        except ValueError:
            raise ValidationError(
                [Issue(PARSE, f"stock cell {cell.strip()!r} is not numeric", row=1, column=col)]
            ) from None
    as_of: float | None = None
    if len(lines) > 1:
        tag, _, raw = lines[1].partition(",")
        if tag.strip() != "as_of" or not _is_number(raw.strip()):
            raise ValidationError([Issue(PARSE, "second stock line must be 'as_of,<unix-seconds>'", row=2)])
        as_of = float(raw.strip())
    if len(lines) > 2:
        raise ValidationError([Issue(PARSE, "stock file has extra lines", row=3)])
    return values, as_of


def _stock_vector(values: list[float], as_of: float | None, expected_m: int | None) -> StockVector:
    issues: list[Issue] = []
    if expected_m is not None and len(values) != expected_m:
        issues.append(Issue(DIMENSION_MISMATCH, f"stock has {len(values)} values, expected {expected_m}"))
    for idx, v in enumerate(values):
        if v < 0:
            issues.append(Issue(NEGATIVE_VALUE, f"stock value {v} is negative", column=idx))
    if issues:
        raise ValidationError(issues)
    return StockVector(np.asarray(values, dtype=np.float64), as_of=as_of if as_of is not None else time.time())


def fetch_stock_http(url: str, timeout: float = 5.0) -> tuple[list[float], float | None]:
    """GET a stock snapshot in the service's /stock JSON shape."""
    try:
        resp = httpx.get(url, timeout=timeout)
        resp.raise_for_status()
        body = resp.json()
    except Exception as exc:
        raise IngestError(UNREACHABLE, f"stock feed {url} unreachable: {exc}") from exc
    if not isinstance(body, dict) or "quantities" not in body:
        raise IngestError(UNREACHABLE, f"stock feed {url} returned an unexpected body")
    quantities = [float(v) for v in body["quantities"]]
    as_of = body.get("as_of")
    return quantities, float(as_of) if as_of is not None else None


class StockPoller:
    """Background fetcher for one HTTP stock feed.

    Readers always get a consistent immutable snapshot; on fetch failure
    the last good value is retained with as_of unchanged.
    """

    def __init__(self, url: str, interval: float, timeout: float = 5.0):
        self.url = url
        self.interval = max(1.0, float(interval))
        self.timeout = timeout
        self._snapshot: tuple[list[float], float | None] | None = None
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> "StockPoller":
        # First fetch is synchronous so a bad URL fails fast.
        self._snapshot = fetch_stock_http(self.url, self.timeout)
        self._thread = threading.Thread(target=self._run, name=f"stock-poll:{self.url}", daemon=True)
        self._thread.start()
        return self

    def _run(self) -> None:
        while not self._stop.wait(self.interval):
            try:
                self._snapshot = fetch_stock_http(self.url, self.timeout)
            except IngestError:
                pass  # keep last good snapshot

    def snapshot(self) -> tuple[list[float], float | None]:
        snap = self._snapshot
        if snap is None:
            raise IngestError(UNREACHABLE, f"no snapshot yet from {self.url}")
        return snap

    def stop(self) -> None:
        self._stop.set()
        if self._thread is not None:
            self._thread.join(timeout=self.interval + 1.0)


_pollers: dict[tuple[str, float], StockPoller] = {}
_pollers_lock = threading.Lock()


def _poller_for(source: StockSource) -> StockPoller:
    key = (source.location, source.poll_interval)
    with _pollers_lock:
        poller = _pollers.get(key)
        if poller is None:
            poller = StockPoller(source.location, source.poll_interval).start()
            _pollers[key] = poller
        return poller


def shutdown_pollers() -> None:
    with _pollers_lock:
        for poller in _pollers.values():
            poller.stop()
        _pollers.clear()


def load_stock(source: StockSource, expected_m: int | None) -> StockVector:
    """Load a stock snapshot from the source; http-poll returns the poller's latest."""
    if source.kind == "inline":
        values, as_of = parse_stock_csv(source.location)
    elif source.kind == "file":
        try:
            with open(source.location, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise IngestError(UNREACHABLE, f"cannot read stock file {source.location}: {exc}") from exc
        values, as_of = parse_stock_csv(text)
    elif source.kind == "http-poll":
        values, as_of = _poller_for(source).snapshot()
    else:  # unreachable; StockSource validates kind
        raise ValueError(source.kind)
    return _stock_vector(values, as_of, expected_m)
