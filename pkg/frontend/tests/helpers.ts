/** Shared test plumbing: a happy-dom document, a transport-intercepting
 * fetch, and the recorded worked-instance service responses. */

import { Window } from "happy-dom";

import type { FetchLike } from "../src/api.js";

export function makeDom(): { document: Document; root: HTMLElement; window: Window } {
  const window = new Window();
  const document = window.document as unknown as Document;
  const root = document.createElement("div");
  root.id = "app";
  document.body.appendChild(root);
  return { document, root, window };
}

export interface Route {
  method: string;
  path: string;
  /** substring that must appear in the request body, if set */
  bodyIncludes?: string;
  status?: number;
  json?: unknown;
  text?: string;
}

export interface RecordedCall {
  method: string;
  path: string;
  body: string | null;
}

export function mockTransport(routes: Route[]): { fetchImpl: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (input, init) => {
    const url = new URL(input, "http://service.test");
    const path = url.pathname + url.search;
    const method = (init?.method ?? "GET").toUpperCase();
    const body = typeof init?.body === "string" ? init.body : null;
    calls.push({ method, path, body });
    const route = routes.find(
      (r) =>
        r.method === method &&
        r.path === path &&
        (r.bodyIncludes === undefined || (body ?? "").includes(r.bodyIncludes)),
    );
    if (!route) {
      return new Response(JSON.stringify({ error: "NOT_FOUND", detail: `no route ${method} ${path}` }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    const payload = route.json !== undefined ? JSON.stringify(route.json) : route.text ?? "";
    return new Response(payload, {
      status: route.status ?? 200,
      headers: { "content-type": route.json !== undefined ? "application/json" : "text/plain" },
    });
  };
  return { fetchImpl, calls };
}

// Worked instance: two blends over three components, stock [10, 9, 5].
export const RECIPES_VIEW = {
  products: ["BLEND1", "BLEND2"],
  components: ["C1", "C2", "C3"],
  weights: [
    [0.5, 0.5, 0],
    [0.2, 0.3, 0.5],
  ],
};

export const STOCK_VIEW = { quantities: [10, 9, 5], as_of: 1700000000 };

export const SHORTFALL_VIEW = { feasible: false, used: [15.5, 17, 7.5], required: [5.5, 8, 2.5] };

export const PLAN_VIEW = {
  feasible: true,
  requirements: [
    [2, 2, 0],
    [0.4, 0.6, 1],
  ],
  remaining: [7.6, 6.4, 4],
  root_choices: [
    { option: 1, product: "BLEND1", quantity: 12 },
    { option: 2, product: "BLEND2", quantity: 8 },
  ],
};

export const SESSION_OPEN_VIEW = {
  id: "s1",
  step: 0,
  totals: [4, 2],
  remaining: [7.6, 6.4, 4],
  choices: [
    { option: 1, product: "BLEND1", quantity: 12 },
    { option: 2, product: "BLEND2", quantity: 8 },
  ],
  finished: false,
};

export const SESSION_DONE_VIEW = {
  id: "s1",
  step: 1,
  totals: [16, 3],
  remaining: [1.4, 0.1, 3.5],
  choices: [],
  finished: true,
};

export const VARIANTS_CSV = "variant,BLEND1,BLEND2\n1,12,10\n2,16,3\n";

export function workedRoutes(): Route[] {
  return [
    { method: "GET", path: "/recipes", json: RECIPES_VIEW },
    { method: "GET", path: "/stock", json: STOCK_VIEW },
    { method: "POST", path: "/plan", bodyIncludes: "[25,15]", json: SHORTFALL_VIEW },
    { method: "POST", path: "/plan", bodyIncludes: "[4,2]", json: PLAN_VIEW },
    { method: "POST", path: "/sessions", bodyIncludes: "[25,15]", json: SHORTFALL_VIEW },
    { method: "POST", path: "/sessions", bodyIncludes: "[4,2]", json: SESSION_OPEN_VIEW },
    { method: "POST", path: "/sessions/s1/choose", bodyIncludes: '"option":1', json: SESSION_DONE_VIEW },
    {
      method: "POST",
      path: "/sessions/s1/choose",
      bodyIncludes: '"option":99',
      status: 422,
      json: { error: "INVALID_OPTION", detail: "option 99 is not one of the current choices" },
    },
    { method: "POST", path: "/variants?format=csv", text: VARIANTS_CSV },
  ];
}

/** Every numeric token in the rendered text must exist somewhere in the
 * recorded service payloads (strings included, so names like C1 count). */
export function numbersIn(value: unknown, sink: Set<string>): void {
  if (typeof value === "number") {
    sink.add(String(value));
    if (Number.isInteger(value)) sink.add(value.toFixed(0));
  } else if (typeof value === "string") {
    for (const match of value.matchAll(/\d+(?:\.\d+)?/g)) {
      sink.add(match[0]);
    }
  } else if (Array.isArray(value)) {
    for (const item of value) numbersIn(item, sink);
  } else if (value && typeof value === "object") {
    for (const item of Object.values(value)) numbersIn(item, sink);
  }
}
