/** Control-room operator page: recipe editor, stock panel, demand form,
 * shortfall modal, and the step-wise choice screen.
 *
 * Every quantity shown comes verbatim from a service response; the only
 * client-side computation is the live row-sum display in the recipe grid.
 */

import { ApiClient, ApiHttpError } from "./api.js";
import {
  GridState,
  addRow,
  gridFromRecipes,
  gridToPayload,
  rowStatus,
  setCell,
  setProductName,
} from "./gridModel.js";
import { UiSession, applyChoice, startSession } from "./sessionModel.js";
import type { PlanFeasibleView, SessionView, StockView } from "./types.js";
import { isShortfall } from "./types.js";

export type FileSink = (name: string, content: string, mime: string) => void;

export interface AppConfig {
  api: ApiClient;
  root: HTMLElement;
  document: Document;
  /** stock auto-refresh period; 0 disables polling (tests) */
  stockPollMs?: number;
  /** download hook; defaults to a blob anchor click in the browser */
  deliverFile?: FileSink;
}

interface CellError {
  row: number | null;
  column: number | null;
  text: string;
}

function parseCellErrors(detail: string): CellError[] {
  const out: CellError[] = [];
  for (const part of detail.split(";")) {
    const text = part.trim();
    if (!text) continue;
    const match = /\(row (\d+)(?:, column (\d+))?\)/.exec(text);
    out.push({
      row: match && match[1] !== undefined ? Number(match[1]) : null,
      column: match && match[2] !== undefined ? Number(match[2]) : null,
      text,
    });
  }
  return out;
}

export class BlendPlanApp {
  private readonly api: ApiClient;
  private readonly doc: Document;
  private readonly root: HTMLElement;
  private readonly deliverFile: FileSink;
  private readonly stockPollMs: number;

  grid: GridState | null = null;
  stock: StockView | null = null;
  plan: PlanFeasibleView | null = null;
  session: UiSession | null = null;
  lastDemand: number[] | null = null;
  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private serverErrors: CellError[] = [];

  constructor(config: AppConfig) {
    this.api = config.api;
    this.doc = config.document;
    this.root = config.root;
    this.stockPollMs = config.stockPollMs ?? 10_000;
    this.deliverFile = config.deliverFile ?? ((name, content, mime) => this.blobDownload(name, content, mime));
  }

  private blobDownload(name: string, content: string, mime: string): void {
    const url = URL.createObjectURL(new Blob([content], { type: mime }));
    const anchor = this.doc.createElement("a");
    anchor.href = url;
    anchor.download = name;
    anchor.click();
    URL.revokeObjectURL(url);
  }

  async init(): Promise<void> {
    this.buildSkeleton();
    const [recipes, stock] = await Promise.all([this.api.getRecipes(), this.api.getStock()]);
    this.grid = gridFromRecipes(recipes);
    this.stock = stock;
    this.renderRecipes();
    this.renderStock();
    this.renderDemandForm();
    if (this.stockPollMs > 0) {
      this.pollTimer = setInterval(() => {
        // stock is frozen while a session is open so the plan basis cannot shift
        if (!this.sessionOpen()) {
          void this.refreshStock();
        }
      }, this.stockPollMs);
    }
  }

  dispose(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
    }
  }

  sessionOpen(): boolean {
    return !this.byId("session-section").hidden;
  }

  private byId(id: string): HTMLElement {
    const el = this.doc.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as HTMLElement;
  }

  private buildSkeleton(): void {
    this.root.innerHTML = `
      <h1>Blend planning</h1>
      <section id="recipes-section">
        <h2>Recipes</h2>
        <table id="recipe-grid"></table>
        <div id="recipe-errors" class="errors"></div>
        <button id="add-recipe">Add recipe</button>
        <button id="save-recipes">Save recipes</button>
        <label>Upload CSV <input type="file" id="upload-csv" accept=".csv,text/csv"></label>
      </section>
      <section id="stock-section">
        <h2>Stock</h2>
        <table id="stock-table"></table>
        <div id="stock-asof"></div>
        <button id="refresh-stock">Download available quantities</button>
      </section>
      <section id="demand-section">
        <h2>Demand</h2>
        <div id="demand-inputs"></div>
        <button id="calculate">Calculate the optimal quantities of blended products</button>
        <div id="demand-error" class="errors"></div>
      </section>
      <div id="shortfall-modal" hidden>
        <p>Required blended products cannot be made</p>
        <table id="shortfall-table"></table>
        <button id="close-shortfall">Close</button>
      </div>
      <section id="session-section" hidden>
        <h2>Session <span id="session-step"></span></h2>
        <h3>Components needed</h3>
        <table id="requirements-table"></table>
        <h3>Stock after blending</h3>
        <table id="remaining-table"></table>
        <h3>Possible work variants</h3>
        <ol id="choices-list"></ol>
        <label>Option <input id="option-input" size="4"></label>
        <button id="apply-option">Calculate additional amounts</button>
        <div id="session-error" class="errors"></div>
        <div id="totals-panel" hidden>
          <h3>Total blended products</h3>
          <table id="totals-table"></table>
          <button id="print-report">Print report</button>
          <button id="export-report">Export</button>
          <button id="export-variants">Export all variants</button>
        </div>
        <pre id="report-view" hidden></pre>
        <button id="close-session">Back to planning</button>
      </section>
    `;
    this.byId("add-recipe").addEventListener("click", () => this.onAddRecipe());
    this.byId("save-recipes").addEventListener("click", () => void this.saveRecipes());
    this.byId("refresh-stock").addEventListener("click", () => void this.refreshStock());
    this.byId("calculate").addEventListener("click", () => void this.calculate());
    this.byId("close-shortfall").addEventListener("click", () => {
      this.byId("shortfall-modal").hidden = true;
    });
    this.byId("apply-option").addEventListener("click", () => void this.applyOptionFromInput());
    this.byId("print-report").addEventListener("click", () => void this.printReport());
    this.byId("export-report").addEventListener("click", () => void this.exportReport());
    this.byId("export-variants").addEventListener("click", () => void this.exportAllVariants());
    this.byId("close-session").addEventListener("click", () => this.closeSession());
    const upload = this.byId("upload-csv") as HTMLInputElement;
    upload.addEventListener("change", () => {
      const file = upload.files?.[0];
      if (!file) return;
      void file.text().then((text) => this.uploadCsv(text));
    });
  }

  // ---- recipes -----------------------------------------------------------

  renderRecipes(): void {
    if (!this.grid) return;
    const table = this.byId("recipe-grid");
    table.innerHTML = "";
    const header = this.doc.createElement("tr");
    for (const title of ["product", ...this.grid.components, "row sum"]) {
      const th = this.doc.createElement("th");
      th.textContent = title;
      header.appendChild(th);
    }
    table.appendChild(header);

    this.grid.cells.forEach((row, i) => {
      const tr = this.doc.createElement("tr");
      const nameCell = this.doc.createElement("td");
      const nameInput = this.doc.createElement("input");
      nameInput.value = this.grid?.products[i] ?? "";
      nameInput.setAttribute("data-row", String(i));
      nameInput.addEventListener("input", () => {
        if (this.grid) this.grid = setProductName(this.grid, i, nameInput.value);
      });
      nameCell.appendChild(nameInput);
      tr.appendChild(nameCell);

      row.forEach((cell, j) => {
        const td = this.doc.createElement("td");
        const input = this.doc.createElement("input");
        input.value = cell;
        input.id = `cell-${i}-${j}`;
        input.addEventListener("input", () => this.onCellEdit(i, j, input.value));
        const serverError = this.serverErrors.find((e) => e.row === i && (e.column === null || e.column === j));
        if (serverError) {
          td.className = "cell-error";
          td.title = serverError.text;
        }
        td.appendChild(input);
        tr.appendChild(td);
      });

      const sumCell = this.doc.createElement("td");
      sumCell.id = `row-sum-${i}`;
      this.applyRowStatus(sumCell, i);
      tr.appendChild(sumCell);
      table.appendChild(tr);
    });
  }

  private applyRowStatus(cell: HTMLElement, row: number): void {
    if (!this.grid) return;
    const status = rowStatus(this.grid.cells[row] ?? []);
    cell.textContent = status.sum === null ? "?" : String(status.sum);
    cell.className = status.ok ? "row-sum-ok" : "row-sum-warn";
    cell.title = status.message ?? "";
  }

  onCellEdit(row: number, col: number, value: string): void {
    if (!this.grid) return;
    this.grid = setCell(this.grid, row, col, value);
    const sumCell = this.doc.getElementById(`row-sum-${row}`);
    if (sumCell) this.applyRowStatus(sumCell as HTMLElement, row);
  }

  onAddRecipe(): void {
    if (!this.grid) return;
    this.grid = addRow(this.grid, `BLEND${this.grid.products.length + 1}`);
    this.renderRecipes();
    this.renderDemandForm();
  }

  async saveRecipes(): Promise<void> {
    if (!this.grid) return;
    const errorsBox = this.byId("recipe-errors");
    const payload = gridToPayload(this.grid);
    if (!payload) {
      errorsBox.textContent = "fix non-numeric cells before saving";
      return;
    }
    try {
      await this.api.putRecipesJson(payload);
      this.serverErrors = [];
      errorsBox.textContent = "";
      await this.reloadRecipes();
    } catch (err) {
      if (err instanceof ApiHttpError) {
        this.serverErrors = parseCellErrors(err.detail);
        errorsBox.textContent = err.detail;
        this.renderRecipes();
        return;
      }
      throw err;
    }
  }

  async uploadCsv(text: string): Promise<void> {
    const errorsBox = this.byId("recipe-errors");
    try {
      await this.api.putRecipesCsv(text);
      this.serverErrors = [];
      errorsBox.textContent = "";
      await this.reloadRecipes();
    } catch (err) {
      if (err instanceof ApiHttpError) {
        errorsBox.textContent = err.detail;
        return;
      }
      throw err;
    }
  }

  private async reloadRecipes(): Promise<void> {
    this.grid = gridFromRecipes(await this.api.getRecipes());
    this.renderRecipes();
    this.renderDemandForm();
  }

  // ---- stock --------------------------------------------------------------

  async refreshStock(): Promise<void> {
    this.stock = await this.api.getStock();
    this.renderStock();
  }

  renderStock(): void {
    if (!this.grid || !this.stock) return;
    const table = this.byId("stock-table");
    table.innerHTML = "";
    this.stock.quantities.forEach((qty, j) => {
      const tr = this.doc.createElement("tr");
      const name = this.doc.createElement("td");
      name.textContent = this.grid?.components[j] ?? `C${j + 1}`;
      const value = this.doc.createElement("td");
      value.textContent = String(qty);
      tr.append(name, value);
      table.appendChild(tr);
    });
    const asOf = this.byId("stock-asof");
    asOf.textContent = this.stock.as_of === null ? "" : `as of ${new Date(this.stock.as_of * 1000).toISOString()}`;
  }

  // ---- demand and planning -------------------------------------------------

  renderDemandForm(): void {
    if (!this.grid) return;
    const box = this.byId("demand-inputs");
    box.innerHTML = "";
    this.grid.products.forEach((product, i) => {
      const label = this.doc.createElement("label");
      label.textContent = `${product} `;
      const input = this.doc.createElement("input");
      input.id = `demand-input-${i}`;
      input.value = "0";
      input.size = 6;
      label.appendChild(input);
      box.appendChild(label);
    });
  }

  readDemand(): number[] | null {
    if (!this.grid) return null;
    const values: number[] = [];
    for (let i = 0; i < this.grid.products.length; i++) {
      const input = this.doc.getElementById(`demand-input-${i}`) as HTMLInputElement | null;
      const v = Number(input?.value ?? "");
      if (input === null || input.value.trim() === "" || Number.isNaN(v)) {
        return null;
      }
      values.push(v);
    }
    return values;
  }

  async calculate(): Promise<void> {
    const errorBox = this.byId("demand-error");
    errorBox.textContent = "";
    const demand = this.readDemand();
    if (!demand) {
      errorBox.textContent = "demand values must be numbers";
      return;
    }
    try {
      const planView = await this.api.postPlan(demand);
      if (isShortfall(planView)) {
        this.showShortfall(planView.required);
        return;
      }
      const opened = await this.api.openSession(demand);
      if (isShortfall(opened)) {
        this.showShortfall(opened.required);
        return;
      }
      this.plan = planView;
      this.lastDemand = demand;
      this.session = startSession(opened);
      this.byId("session-section").hidden = false;
      this.byId("report-view").hidden = true;
      this.renderSession();
    } catch (err) {
      if (err instanceof ApiHttpError) {
        errorBox.textContent = `${err.code}: ${err.detail}`;
        return;
      }
      errorBox.textContent = `network error: ${String(err)} (retry)`;
    }
  }

  showShortfall(required: number[]): void {
    const modal = this.byId("shortfall-modal");
    const table = this.byId("shortfall-table");
    table.innerHTML = "";
    required.forEach((value, j) => {
      if (value === 0) return;
      const tr = this.doc.createElement("tr");
      const name = this.doc.createElement("td");
      name.textContent = this.grid?.components[j] ?? `C${j + 1}`;
      const missing = this.doc.createElement("td");
      missing.textContent = String(value);
      tr.append(name, missing);
      table.appendChild(tr);
    });
    modal.hidden = false;
  }

  // ---- session stepping -----------------------------------------------------

  renderSession(): void {
    if (!this.session || !this.plan || !this.grid) return;
    const view = this.session.view;
    this.byId("session-step").textContent = `step ${view.step}`;

    const requirements = this.byId("requirements-table");
    requirements.innerHTML = "";
    const header = this.doc.createElement("tr");
    for (const title of ["product", ...this.grid.components]) {
      const th = this.doc.createElement("th");
      th.textContent = title;
      header.appendChild(th);
    }
    requirements.appendChild(header);
    this.plan.requirements.forEach((row, i) => {
      const tr = this.doc.createElement("tr");
      const name = this.doc.createElement("td");
      name.textContent = this.grid?.products[i] ?? "";
      tr.appendChild(name);
      for (const value of row) {
        const td = this.doc.createElement("td");
        td.textContent = String(value);
        tr.appendChild(td);
      }
      requirements.appendChild(tr);
    });

    const remaining = this.byId("remaining-table");
    remaining.innerHTML = "";
    view.remaining.forEach((value, j) => {
      const tr = this.doc.createElement("tr");
      const name = this.doc.createElement("td");
      name.textContent = this.grid?.components[j] ?? "";
      const td = this.doc.createElement("td");
      td.textContent = String(value);
      tr.append(name, td);
      remaining.appendChild(tr);
    });

    const choices = this.byId("choices-list");
    choices.innerHTML = "";
    for (const choice of view.choices) {
      const li = this.doc.createElement("li");
      li.textContent = `${choice.option}: ${choice.product} +${choice.quantity} t`;
      choices.appendChild(li);
    }

    const totalsPanel = this.byId("totals-panel");
    totalsPanel.hidden = !view.finished;
    if (view.finished) {
      const totals = this.byId("totals-table");
      totals.innerHTML = "";
      view.totals.forEach((value, i) => {
        const tr = this.doc.createElement("tr");
        const name = this.doc.createElement("td");
        name.textContent = this.grid?.products[i] ?? "";
        const td = this.doc.createElement("td");
        td.textContent = String(value);
        tr.append(name, td);
        totals.appendChild(tr);
      });
    }
  }

  async applyOptionFromInput(): Promise<void> {
    const input = this.byId("option-input") as HTMLInputElement;
    const option = Number(input.value);
    if (!Number.isInteger(option)) {
      this.byId("session-error").textContent = "enter an option number";
      return;
    }
    await this.applyOption(option);
  }

  async applyOption(option: number): Promise<void> {
    if (!this.session) return;
    const errorBox = this.byId("session-error");
    errorBox.textContent = "";
    try {
      const view = await this.api.choose(this.session.view.id, option);
      this.session = applyChoice(this.session, option, view);
      this.renderSession();
    } catch (err) {
      if (err instanceof ApiHttpError) {
        errorBox.textContent = `${err.code}: ${err.detail}`;
        return;
      }
      throw err;
    }
  }

  closeSession(): void {
    this.byId("session-section").hidden = true;
    this.session = null;
    this.plan = null;
  }

  // ---- reports and exports ---------------------------------------------------

  async printReport(): Promise<void> {
    if (!this.session) return;
    const text = await this.api.sessionReport(this.session.view.id, "text");
    const view = this.byId("report-view");
    view.textContent = text;
    view.hidden = false;
  }

  async exportReport(): Promise<void> {
    if (!this.session) return;
    const csv = await this.api.sessionReport(this.session.view.id, "csv");
    this.deliverFile("session-report.csv", csv, "text/csv");
  }

  async exportAllVariants(): Promise<void> {
    if (!this.lastDemand) return;
    const csv = await this.api.variantsCsv(this.lastDemand);
    this.deliverFile("variants.csv", csv, "text/csv");
  }
}
