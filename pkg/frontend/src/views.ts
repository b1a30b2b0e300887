/** Pure view renderers: run state / report bundle in, HTML string out.
 * Every displayed number is bound from the API payloads. */

import { barChart, lengthChart, radarChart, sunburstChart } from "./charts.js";
import { pendingCheckpoint } from "./api.js";
import type { ReportBundle, RunState } from "./types.js";

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

export function planReviewView(state: RunState): string {
  const plan = state.plan;
  const checkpoint = pendingCheckpoint(state);
  if (!plan || !checkpoint) {
    return `<section class="panel"><p>No plan awaiting review.</p></section>`;
  }
  const rows = plan.items
    .map(
      (item, index) => `
      <tr data-item="${esc(item.display_name)}">
        <td class="name">${esc(item.display_name)}<div class="muted">${esc(item.canonical_id ?? "unresolved")}</div></td>
        <td><span class="tier tier-${item.match_tier}">${item.match_tier}</span></td>
        <td class="score">${item.relevance_score.toFixed(2)}</td>
        <td>${item.category_tags.map((t) => `<span class="tag">${esc(t)}</span>`).join(" ")}</td>
        <td class="justification">${esc(item.justification)}</td>
        <td class="actions">
          <button data-action="move-up" data-index="${index}" ${index === 0 ? "disabled" : ""}>&uarr;</button>
          <button data-action="remove" data-index="${index}">remove</button>
        </td>
      </tr>`,
    )
    .join("");
  return `
  <section class="panel" id="plan-review" data-checkpoint="${esc(checkpoint.checkpoint_id)}">
    <h2>Benchmark plan review <span class="muted">checkpoint ${esc(checkpoint.checkpoint_id)}</span></h2>
    <p class="muted">Request: ${esc(state.request_text)}</p>
    <table class="plan-table">
      <thead><tr><th>Benchmark</th><th>Tier</th><th>Score</th><th>Tags</th><th>Justification</th><th></th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <div class="controls">
      <button id="approve" data-action="approve">Approve plan</button>
      <details><summary>Add from gallery</summary><div id="gallery-picker"></div></details>
      <details><summary>Inject local benchmark</summary>
        <form id="inject-form">
          <label>Name <input name="name" required /></label>
          <label>Path <input name="path" required placeholder="/data/my-bench.jsonl" /></label>
          <label>Input column <input name="input_key" required /></label>
          <label>Target column <input name="target_key" required /></label>
          <button type="submit">Inject</button>
        </form>
      </details>
      <form id="refine-form">
        <input name="request_text" placeholder="Refine the request..." />
        <button type="submit">Refine</button>
      </form>
    </div>
  </section>`;
}

export function configReviewView(state: RunState): string {
  const checkpoint = pendingCheckpoint(state);
  const infos = state.bench_infos ?? [];
  const rows = infos
    .map(
      (info) => `
      <tr>
        <td>${esc(info.benchmark_id)}</td><td>${esc(info.config_name)}</td><td>${esc(info.split)}</td>
        <td>${esc(info.task_type)}</td><td class="justification">${esc(info.rationale)}</td>
      </tr>`,
    )
    .join("");
  return `
  <section class="panel" id="config-review" data-checkpoint="${esc(checkpoint?.checkpoint_id ?? "")}">
    <h2>Resolved configurations</h2>
    <table class="plan-table">
      <thead><tr><th>Benchmark</th><th>Config</th><th>Split</th><th>Task</th><th>Rationale</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <div class="controls"><button id="approve" data-action="approve">Approve configurations</button></div>
  </section>`;
}

export function reportView(bundle: ReportBundle, state: RunState | null = null): string {
  const radar = bundle.macro.radar;
  const radarRows = Object.keys(radar)
    .map((category) => `<tr><td>${esc(category)}</td><td data-radar="${esc(category)}">${radar[category].toFixed(4)}</td></tr>`)
    .join("");
  const blindSpots = bundle.diagnostic.blind_spots
    .map((s) => `<li><code>${esc(s.token)}</code> &times;${s.count} <span class="muted">${s.examples.map(esc).join(", ")}</span></li>`)
    .join("");
  const cases = bundle.micro
    .map(
      (row, i) => `
      <details class="case-row" data-benchmark="${esc(row.benchmark)}" data-sample="${row.sample_index}">
        <summary>#${i + 1} ${esc(row.benchmark)} sample ${row.sample_index} <span class="muted">${row.failing_metrics.map(esc).join(", ")}</span></summary>
        <dl>
          <dt>Input</dt><dd>${esc(row.input_excerpt)}</dd>
          <dt>Prediction</dt><dd>${esc(row.prediction_excerpt)}</dd>
          <dt>Reference</dt><dd>${esc(row.reference_excerpt)}</dd>
        </dl>
      </details>`,
    )
    .join("");
  const failuresEmpty = Object.keys(bundle.diagnostic.error_histogram).length === 0;
  const balance = bundle.diagnostic.capability_balance;
  return `
  <section class="panel" id="report">
    <h2>Evaluation report <span class="muted">${esc(bundle.metadata.run_id)} / ${esc(bundle.metadata.model_id)}</span></h2>
    <p class="muted">Token usage: ${bundle.metadata.token_usage}</p>
    <div class="charts">
      <figure>${radarChart(radar)}<figcaption>Capability profile</figcaption></figure>
      <figure>${sunburstChart(bundle.macro.sunburst)}<figcaption>Category / benchmark / metric</figcaption></figure>
    </div>
    <table class="radar-table"><thead><tr><th>Category</th><th>Score</th></tr></thead><tbody>${radarRows}</tbody></table>
    <h3>Diagnostics</h3>
    <p>Capability balance (Gini): <strong data-gini>${balance.gini.toFixed(4)}</strong> <span class="muted">${esc(balance.detail ?? "")}</span></p>
    ${failuresEmpty ? '<p class="ok" id="no-failures">No failures.</p>' : ""}
    <div class="charts">
      <figure>${barChart(bundle.diagnostic.error_histogram)}<figcaption>Error classes</figcaption></figure>
      <figure>${lengthChart(bundle.diagnostic.length_stats.correct, bundle.diagnostic.length_stats.incorrect)}<figcaption>Output length: correct vs incorrect</figcaption></figure>
    </div>
    <h3>Blind spots</h3>
    ${blindSpots ? `<ul class="blind-spots">${blindSpots}</ul>` : '<p class="ok">none</p>'}
    <h3>Case inspection</h3>
    ${cases || '<p class="ok">No failing cases.</p>'}
    ${state ? rollbackControls(state) : ""}
  </section>`;
}

export function rollbackControls(state: RunState): string {
  const rows = state.checkpoints
    .map(
      (c) => `
      <tr>
        <td>${esc(c.checkpoint_id)}</td><td>step ${c.step_index}</td><td>${c.decision}</td>
        <td><code class="hash" title="${esc(c.snapshot_hash)}">${esc(c.snapshot_hash.slice(0, 12))}&hellip;</code></td>
        <td><button data-action="rollback" data-checkpoint="${esc(c.checkpoint_id)}">Roll back</button></td>
      </tr>`,
    )
    .join("");
  return `
  <section id="rollback" class="subpanel">
    <h3>Checkpoints</h3>
    <table class="plan-table">
      <thead><tr><th>Checkpoint</th><th>Step</th><th>Decision</th><th>Snapshot</th><th></th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
  </section>`;
}

export function progressView(state: RunState): string {
  return `
  <section class="panel" id="progress">
    <h2>Run ${esc(state.run_id)}</h2>
    <p>Status: <strong>${state.status}</strong> at step ${state.step_index}/8</p>
    <progress max="8" value="${state.step_index}"></progress>
  </section>`;
}

export function failedView(state: RunState): string {
  return `
  <section class="panel error" id="failed">
    <h2>Run failed</h2>
    <p>Stage: <strong>${esc(state.failure ?? "unknown")}</strong> (step ${state.step_index})</p>
  </section>`;
}

export function reportPlaceholder(state: RunState): string {
  return `<section class="panel" id="report-placeholder"><p>Report not available yet (status: ${state.status}).</p></section>`;
}

export function conflictBanner(detail: string): string {
  return `<div class="banner" id="conflict">State changed on the server (${esc(detail)}). Refresh to continue.</div>`;
}
