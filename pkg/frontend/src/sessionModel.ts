/** Client-side session state: the latest service view plus the option history.
 *
 * The view is always the most recent service response verbatim; the
 * history exists so a recorded walk can be replayed against a fresh
 * session and must land on identical screens.
 */

import type { ApiClient } from "./api.js";
import type { SessionView, ShortfallView } from "./types.js";
import { isShortfall } from "./types.js";

export interface UiSession {
  view: SessionView;
  history: number[];
}

export function startSession(view: SessionView): UiSession {
  return { view, history: [] };
}

export function applyChoice(session: UiSession, option: number, view: SessionView): UiSession {
  return { view, history: [...session.history, option] };
}

/** Open a fresh session and replay a recorded option history. */
export async function replayHistory(
  api: ApiClient,
  demand: number[],
  history: number[],
): Promise<SessionView> {
  const opened = await api.openSession(demand);
  if (isShortfall(opened)) {
    throw new Error("demand became infeasible during replay");
  }
  let view = opened;
  for (const option of history) {
    view = await api.choose(view.id, option);
  }
  return view;
}
