/** Editable recipe grid state and client-side row-sum display.
 *
 * The grid validates nothing beyond what it shows: row sums are displayed
 * live as a warning aid, the server stays the authority and its 422
 * responses are surfaced on the offending cells.
 */

import type { RecipesView } from "./types.js";

export interface GridState {
  products: string[];
  components: string[];
  /** cell text as typed; may be transiently non-numeric while editing */
  cells: string[][];
}

export function gridFromRecipes(view: RecipesView): GridState {
  return {
    products: [...view.products],
    components: [...view.components],
    cells: view.weights.map((row) => row.map((w) => String(w))),
  };
}

export function rowSum(cells: string[]): number | null {
  let sum = 0;
  for (const cell of cells) {
    const v = Number(cell);
    if (cell.trim() === "" || Number.isNaN(v)) {
      return null;
    }
    sum += v;
  }
  return sum;
}

export interface RowStatus {
  sum: number | null;
  ok: boolean;
  message: string | null;
}

const ROW_SUM_TOLERANCE = 1e-6;

export function rowStatus(cells: string[]): RowStatus {
  const sum = rowSum(cells);
  if (sum === null) {
    return { sum: null, ok: false, message: "row has a non-numeric cell" };
  }
  if (Math.abs(sum - 1) > ROW_SUM_TOLERANCE) {
    return { sum, ok: false, message: `ROW_SUM: row sums to ${formatSum(sum)}, expected 1` };
  }
  return { sum, ok: true, message: null };
}

function formatSum(sum: number): string {
  return Number.isInteger(sum) ? String(sum) : sum.toPrecision(6).replace(/\.?0+$/, "");
}

export function setCell(grid: GridState, row: number, col: number, value: string): GridState {
  const cells = grid.cells.map((r, i) => (i === row ? r.map((c, j) => (j === col ? value : c)) : r));
  return { ...grid, cells };
}

export function setProductName(grid: GridState, row: number, name: string): GridState {
  const products = grid.products.map((p, i) => (i === row ? name : p));
  return { ...grid, products };
}

export function addRow(grid: GridState, name: string): GridState {
  return {
    ...grid,
    products: [...grid.products, name],
    cells: [...grid.cells, grid.components.map(() => "0")],
  };
}

/** Build the PUT /recipes payload, or null while any cell is non-numeric. */
export function gridToPayload(grid: GridState): RecipesView | null {
  const weights: number[][] = [];
  for (const row of grid.cells) {
    const parsed: number[] = [];
    for (const cell of row) {
      const v = Number(cell);
      if (cell.trim() === "" || Number.isNaN(v)) {
        return null;
      }
      parsed.push(v);
    }
    weights.push(parsed);
  }
  return { products: [...grid.products], components: [...grid.components], weights };
}
