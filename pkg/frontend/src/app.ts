/** Browser shell: 1s polling while a run is active, optimistic UI disabled —
 * every state change round-trips through the server. */

import { ApiClient, ApiError, pendingCheckpoint, viewForState } from "./api.js";
import {
  configReviewView,
  conflictBanner,
  failedView,
  planReviewView,
  progressView,
  reportPlaceholder,
  reportView,
} from "./views.js";
import type { RunState } from "./types.js";

const POLL_MS = 1000;

class App {
  private api = new ApiClient();
  private runId: string | null = null;
  private timer: number | null = null;
  private root = document.getElementById("app") as HTMLElement;

  start(): void {
    const form = document.getElementById("new-run-form") as HTMLFormElement;
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const requestText = String(data.get("request_text") ?? "").trim();
      if (!requestText) return;
      const interactive = data.get("interactive") === "on";
      const { run_id } = await this.api.createRun(requestText, { auto_approve: !interactive });
      this.runId = run_id;
      this.schedulePoll();
    });
    const params = new URLSearchParams(location.search);
    const existing = params.get("run");
    if (existing) {
      this.runId = existing;
      this.schedulePoll();
    }
  }

  private schedulePoll(): void {
    if (this.timer !== null) window.clearTimeout(this.timer);
    this.timer = window.setTimeout(() => void this.poll(), POLL_MS);
  }

  private async poll(): Promise<void> {
    if (!this.runId) return;
    try {
      const state = await this.api.getRun(this.runId);
      await this.render(state);
      if (state.status === "running" || state.status === "awaiting_decision") {
        this.schedulePoll();
      }
    } catch (error) {
      if (error instanceof ApiError) {
        this.root.insertAdjacentHTML("afterbegin", conflictBanner(error.detail));
      }
      this.schedulePoll();
    }
  }

  private async render(state: RunState): Promise<void> {
    const view = viewForState(state);
    if (view === "plan") {
      this.root.innerHTML = planReviewView(state);
      this.bindPlanActions(state);
    } else if (view === "config") {
      this.root.innerHTML = configReviewView(state);
      this.bindApprove(state);
      this.bindRollback();
    } else if (view === "report") {
      try {
        const bundle = await this.api.getReport(state.run_id);
        this.root.innerHTML = reportView(bundle, state);
        this.bindRollback();
        const checkpoint = pendingCheckpoint(state);
        if (checkpoint) this.bindApprove(state);
      } catch {
        this.root.innerHTML = reportPlaceholder(state);
      }
    } else if (view === "failed") {
      this.root.innerHTML = failedView(state);
    } else {
      this.root.innerHTML = progressView(state);
    }
  }

  private async applyDecision(state: RunState, decision: "approved" | "edited" | "refined", payload: Record<string, unknown> = {}) {
    const checkpoint = pendingCheckpoint(state);
    if (!checkpoint || !this.runId) return;
    try {
      const next = await this.api.decide(this.runId, checkpoint.checkpoint_id, decision, payload);
      await this.render(next);
      this.schedulePoll();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.root.insertAdjacentHTML("afterbegin", conflictBanner(error.detail));
      } else {
        throw error;
      }
    }
  }

  private bindApprove(state: RunState): void {
    document.getElementById("approve")?.addEventListener("click", () => void this.applyDecision(state, "approved"));
  }

  private bindPlanActions(state: RunState): void {
    this.bindApprove(state);
    this.root.querySelectorAll("button[data-action='remove'], button[data-action='move-up']").forEach((button) => {
      button.addEventListener("click", () => {
        const index = Number((button as HTMLButtonElement).dataset.index);
        const plan = structuredClone(state.plan!);
        if ((button as HTMLButtonElement).dataset.action === "remove") {
          plan.items.splice(index, 1);
        } else if (index > 0) {
          [plan.items[index - 1], plan.items[index]] = [plan.items[index], plan.items[index - 1]];
        }
        void this.applyDecision(state, "edited", { plan: { ...plan, intent_snapshot: (state.plan as unknown as { intent_snapshot: unknown }).intent_snapshot } });
      });
    });
    const refine = document.getElementById("refine-form") as HTMLFormElement | null;
    refine?.addEventListener("submit", (event) => {
      event.preventDefault();
      const text = String(new FormData(refine).get("request_text") ?? "").trim();
      if (text) void this.applyDecision(state, "refined", { request_text: text });
    });
    const inject = document.getElementById("inject-form") as HTMLFormElement | null;
    inject?.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(inject);
      void this.applyDecision(state, "edited", {
        inject: {
          name: String(data.get("name")),
          path: String(data.get("path")),
          key_mapping: { input_key: String(data.get("input_key")), target_key: String(data.get("target_key")) },
        },
      });
    });
    void this.fillGalleryPicker(state);
  }

  private async fillGalleryPicker(state: RunState): Promise<void> {
    const picker = document.getElementById("gallery-picker");
    if (!picker) return;
    const { entries } = await this.api.getGallery();
    const present = new Set(state.plan?.items.map((i) => i.display_name));
    picker.innerHTML = entries
      .filter((e) => !present.has(e.id))
      .map((e) => `<button data-add="${e.id}" title="${e.description}">${e.id}</button>`)
      .join(" ");
    picker.querySelectorAll("button[data-add]").forEach((button) => {
      button.addEventListener("click", () => {
        const id = (button as HTMLButtonElement).dataset.add!;
        const entry = entries.find((e) => e.id === id)!;
        const plan = structuredClone(state.plan!);
        plan.items.push({
          display_name: entry.id,
          canonical_id: entry.canonical_repo,
          source: "user",
          relevance_score: 1.0,
          match_tier: "forced",
          justification: "added from gallery at review",
          category_tags: entry.category_tags,
        });
        void this.applyDecision(state, "edited", { plan: { ...plan, intent_snapshot: (state.plan as unknown as { intent_snapshot: unknown }).intent_snapshot } });
      });
    });
  }

  private bindRollback(): void {
    this.root.querySelectorAll("button[data-action='rollback']").forEach((button) => {
      button.addEventListener("click", async () => {
        const checkpointId = (button as HTMLButtonElement).dataset.checkpoint!;
        if (!this.runId || !window.confirm(`Roll back to ${checkpointId}? Later artifacts are discarded.`)) return;
        const state = await this.api.rollback(this.runId, checkpointId);
        await this.render(state);
        this.schedulePoll();
      });
    });
  }
}

new App().start();
