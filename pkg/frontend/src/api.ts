/** Thin typed client over the documented HTTP API.
 *
 * Every call goes through the injected fetch, so contract tests can serve
 * recorded fixtures without a browser or network.
 */

import type { DecisionKind, DecisionPayload, EvidenceRecord, GalleryEntryView, ReportBundle, RunState } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText;
  try {
    const body = (await response.json()) as { detail?: string; error?: string };
    detail = body.detail ?? body.error ?? detail;
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike = (input, init) => globalThis.fetch(input, init),
    private readonly base: string = "",
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.base + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  createRun(requestText: string, options: Record<string, unknown> = {}): Promise<{ run_id: string }> {
    return this.request("/api/runs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ request_text: requestText, options }),
    });
  }

  getRun(runId: string): Promise<RunState> {
    return this.request(`/api/runs/${runId}`);
  }

  getEvidence(runId: string, after = -1): Promise<{ records: EvidenceRecord[]; next_after: number }> {
    return this.request(`/api/runs/${runId}/evidence?after=${after}`);
  }

  decide(runId: string, checkpointId: string, decision: DecisionKind, payload: DecisionPayload = {}): Promise<RunState> {
    return this.request(`/api/runs/${runId}/checkpoints/${checkpointId}/decision`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ decision, payload }),
    });
  }

  rollback(runId: string, checkpointId: string): Promise<RunState> {
    return this.request(`/api/runs/${runId}/rollback/${checkpointId}`, { method: "POST" });
  }

  getReport(runId: string): Promise<ReportBundle> {
    return this.request(`/api/runs/${runId}/report?format=json`);
  }

  getGallery(): Promise<{ entries: GalleryEntryView[] }> {
    return this.request("/api/gallery");
  }
}

/** The view a given run state should land on. */
export function viewForState(state: RunState): "plan" | "config" | "report" | "progress" | "failed" {
  if (state.status === "failed") return "failed";
  if (state.status === "completed") return "report";
  if (state.status === "awaiting_decision") {
    const pending = state.checkpoints.filter((c) => c.decision === "pending").at(-1);
    if (pending && pending.step_index === 4) return "plan";
    if (pending && pending.step_index === 6) return "config";
    if (pending && pending.step_index === 8) return "report";
  }
  return "progress";
}

export function pendingCheckpoint(state: RunState) {
  return state.checkpoints.filter((c) => c.decision === "pending").at(-1) ?? null;
}
