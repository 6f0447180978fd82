import { describe, expect, it } from "vitest";

import {
  addRow,
  gridFromRecipes,
  gridToPayload,
  rowStatus,
  rowSum,
  setCell,
} from "../src/gridModel.js";
import { RECIPES_VIEW } from "./helpers.js";

describe("grid model", () => {
  it("builds editable cells from the service view", () => {
    const grid = gridFromRecipes(RECIPES_VIEW);
    expect(grid.products).toEqual(["BLEND1", "BLEND2"]);
    expect(grid.cells[0]).toEqual(["0.5", "0.5", "0"]);
  });

  it("shows a live ROW_SUM warning when a row stops summing to 1", () => {
    const ok = rowStatus(["0.5", "0.5"]);
    expect(ok.ok).toBe(true);
    expect(ok.sum).toBe(1);

    const warn = rowStatus(["0.5", "0.4"]);
    expect(warn.ok).toBe(false);
    expect(warn.message).toContain("ROW_SUM");
    expect(warn.message).toContain("0.9");
  });

  it("flags non-numeric cells instead of guessing", () => {
    expect(rowSum(["0.5", "abc"])).toBeNull();
    expect(rowStatus(["0.5", ""]).ok).toBe(false);
  });

  it("edits are immutable updates", () => {
    const grid = gridFromRecipes(RECIPES_VIEW);
    const edited = setCell(grid, 0, 1, "0.4");
    expect(grid.cells[0]?.[1]).toBe("0.5");
    expect(edited.cells[0]?.[1]).toBe("0.4");
  });

  it("adding a recipe appends a zero row", () => {
    const grid = addRow(gridFromRecipes(RECIPES_VIEW), "BLEND3");
    expect(grid.products).toHaveLength(3);
    expect(grid.cells[2]).toEqual(["0", "0", "0"]);
  });

  it("builds the PUT payload only when every cell parses", () => {
    const grid = gridFromRecipes(RECIPES_VIEW);
    expect(gridToPayload(grid)).toEqual(RECIPES_VIEW);
    expect(gridToPayload(setCell(grid, 0, 0, "x"))).toBeNull();
  });
});
