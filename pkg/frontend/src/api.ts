/** Thin typed client for the blendplan HTTP API.
 *
 * The fetch implementation is injectable so tests can intercept transport
 * and assert that every rendered number originated from a service response.
 */

import type {
  ApiErrorBody,
  PlanView,
  RecipesView,
  SessionView,
  ShortfallView,
  StockView,
  VariantsView,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiHttpError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    public readonly detail: string,
  ) {
    super(`${code}: ${detail}`);
  }
}

async function parseError(resp: Response): Promise<ApiHttpError> {
  let body: ApiErrorBody | null = null;
  try {
    body = (await resp.json()) as ApiErrorBody;
  } catch {
    // non-JSON error body; fall through to a generic error
  }
  return new ApiHttpError(resp.status, body?.error ?? "HTTP_ERROR", body?.detail ?? resp.statusText);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      throw await parseError(resp);
    }
    return resp;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.request(path, init);
    return (await resp.json()) as T;
  }

  private postJson<T>(path: string, body: unknown): Promise<T> {
    return this.json<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  getRecipes(): Promise<RecipesView> {
    return this.json<RecipesView>("/recipes");
  }

  putRecipesJson(body: RecipesView): Promise<RecipesView> {
    return this.json<RecipesView>("/recipes", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  putRecipesCsv(csv: string): Promise<RecipesView> {
    return this.json<RecipesView>("/recipes", {
      method: "PUT",
      headers: { "content-type": "text/csv" },
      body: csv,
    });
  }

  getStock(): Promise<StockView> {
    return this.json<StockView>("/stock");
  }

  postPlan(demand: number[]): Promise<PlanView> {
    return this.postJson<PlanView>("/plan", { demand });
  }

  openSession(demand: number[]): Promise<SessionView | ShortfallView> {
    return this.postJson<SessionView | ShortfallView>("/sessions", { demand });
  }

  choose(sessionId: string, option: number): Promise<SessionView> {
    return this.postJson<SessionView>(`/sessions/${sessionId}/choose`, { option });
  }

  async sessionReport(sessionId: string, format: "text" | "csv" | "json"): Promise<string> {
    const resp = await this.request(`/sessions/${sessionId}/report?format=${format}`);
    return await resp.text();
  }

  variants(demand: number[]): Promise<VariantsView | ShortfallView> {
    return this.postJson<VariantsView | ShortfallView>("/variants", { demand });
  }

  async variantsCsv(demand: number[]): Promise<string> {
    const resp = await this.request("/variants?format=csv", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ demand }),
    });
    return await resp.text();
  }
}
