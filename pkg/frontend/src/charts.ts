/** SVG chart builders. Pure string functions over bundle data series —
 * the UI never recomputes an aggregate. */

import type { LengthStats, SunburstNode } from "./types.js";

const TAU = Math.PI * 2;

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

const PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#b07aa1", "#edc948", "#9c755f"];

export function radarChart(radar: Record<string, number>, size = 320): string {
  const categories = Object.keys(radar);
  const center = size / 2;
  const radius = size / 2 - 46;
  if (categories.length === 0) {
    return `<svg width="${size}" height="${size}" role="img"><text x="${center}" y="${center}">no data</text></svg>`;
  }
  const point = (index: number, value: number): [number, number] => {
    const angle = -Math.PI / 2 + (index / categories.length) * TAU;
    return [center + Math.cos(angle) * radius * value, center + Math.sin(angle) * radius * value];
  };
  const rings = [0.25, 0.5, 0.75, 1.0]
    .map((level) => {
      const pts = categories.map((_, i) => point(i, level).join(",")).join(" ");
      return `<polygon points="${pts}" fill="none" stroke="#ddd" />`;
    })
    .join("");
  const axes = categories
    .map((name, i) => {
      const [x, y] = point(i, 1);
      const [lx, ly] = point(i, 1.18);
      return (
        `<line x1="${center}" y1="${center}" x2="${x}" y2="${y}" stroke="#ccc" />` +
        `<text x="${lx}" y="${ly}" text-anchor="middle" font-size="11" data-category="${esc(name)}">${esc(name)}</text>`
      );
    })
    .join("");
  const valuePoints = categories.map((name, i) => point(i, Math.max(0, Math.min(1, radar[name]))));
  const polygon = `<polygon points="${valuePoints.map((p) => p.join(",")).join(" ")}" fill="#4e79a755" stroke="#4e79a7" stroke-width="2" data-series="radar" />`;
  const markers = categories
    .map((name, i) => {
      const [x, y] = valuePoints[i];
      return `<circle cx="${x}" cy="${y}" r="3" fill="#4e79a7" data-category="${esc(name)}" data-value="${radar[name]}" />`;
    })
    .join("");
  return `<svg width="${size}" height="${size}" viewBox="0 0 ${size} ${size}" role="img" aria-label="capability radar">${rings}${axes}${polygon}${markers}</svg>`;
}

function arcPath(cx: number, cy: number, r0: number, r1: number, a0: number, a1: number): string {
  const p = (r: number, a: number) => [cx + r * Math.cos(a), cy + r * Math.sin(a)];
  const [x0, y0] = p(r1, a0);
  const [x1, y1] = p(r1, a1);
  const [x2, y2] = p(r0, a1);
  const [x3, y3] = p(r0, a0);
  const large = a1 - a0 > Math.PI ? 1 : 0;
  return `M ${x0} ${y0} A ${r1} ${r1} 0 ${large} 1 ${x1} ${y1} L ${x2} ${y2} A ${r0} ${r0} 0 ${large} 0 ${x3} ${y3} Z`;
}

export function sunburstChart(nodes: SunburstNode[], size = 360): string {
  const center = size / 2;
  const leafCount = nodes.reduce((n, node) => n + node.benchmarks.reduce((m, b) => m + Math.max(b.metrics.length, 1), 0), 0);
  if (leafCount === 0) {
    return `<svg width="${size}" height="${size}" role="img"><text x="${center}" y="${center}">no data</text></svg>`;
  }
  const step = TAU / leafCount;
  const paths: string[] = [];
  let cursor = -Math.PI / 2;
  nodes.forEach((node, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    const nodeLeaves = node.benchmarks.reduce((m, b) => m + Math.max(b.metrics.length, 1), 0);
    const nodeEnd = cursor + nodeLeaves * step;
    paths.push(
      `<path d="${arcPath(center, center, 34, 70, cursor, nodeEnd)}" fill="${color}" data-category="${esc(node.category)}"><title>${esc(node.category)}</title></path>`,
    );
    let benchCursor = cursor;
    for (const bench of node.benchmarks) {
      const benchLeaves = Math.max(bench.metrics.length, 1);
      const benchEnd = benchCursor + benchLeaves * step;
      paths.push(
        `<path d="${arcPath(center, center, 72, 112, benchCursor, benchEnd)}" fill="${color}" opacity="0.75" data-benchmark="${esc(bench.benchmark)}"><title>${esc(bench.benchmark)}</title></path>`,
      );
      let metricCursor = benchCursor;
      for (const metric of bench.metrics) {
        const metricEnd = metricCursor + step;
        paths.push(
          `<path d="${arcPath(center, center, 114, 154, metricCursor, metricEnd)}" fill="${color}" opacity="${0.3 + 0.6 * metric.score}" data-metric="${esc(metric.metric)}" data-score="${metric.score}"><title>${esc(bench.benchmark)} / ${esc(metric.metric)}: ${metric.score.toFixed(4)}</title></path>`,
        );
        metricCursor = metricEnd;
      }
      benchCursor = benchEnd;
    }
    cursor = nodeEnd;
  });
  return `<svg width="${size}" height="${size}" viewBox="0 0 ${size} ${size}" role="img" aria-label="score sunburst">${paths.join("")}</svg>`;
}

export function barChart(values: Record<string, number>, width = 320, height = 180): string {
  const keys = Object.keys(values).sort();
  if (keys.length === 0) {
    return `<svg width="${width}" height="${height}" role="img"><text x="10" y="${height / 2}">no failures</text></svg>`;
  }
  const max = Math.max(...keys.map((k) => values[k]), 1);
  const band = width / keys.length;
  const bars = keys
    .map((key, i) => {
      const h = (values[key] / max) * (height - 40);
      const x = i * band + 8;
      return (
        `<rect x="${x}" y="${height - 20 - h}" width="${band - 16}" height="${h}" fill="#e15759" data-class="${esc(key)}" data-count="${values[key]}" />` +
        `<text x="${x + (band - 16) / 2}" y="${height - 6}" font-size="10" text-anchor="middle">${esc(key)}</text>` +
        `<text x="${x + (band - 16) / 2}" y="${height - 26 - h}" font-size="10" text-anchor="middle">${values[key]}</text>`
      );
    })
    .join("");
  return `<svg width="${width}" height="${height}" role="img" aria-label="error histogram">${bars}</svg>`;
}

export function lengthChart(correct: LengthStats | null, incorrect: LengthStats | null, width = 340, height = 180): string {
  const groups: Array<{ name: string; stats: LengthStats; color: string }> = [];
  if (correct) groups.push({ name: "correct", stats: correct, color: "#59a14f" });
  if (incorrect) groups.push({ name: "incorrect", stats: incorrect, color: "#e15759" });
  if (groups.length === 0) {
    return `<svg width="${width}" height="${height}" role="img"><text x="10" y="${height / 2}">no samples</text></svg>`;
  }
  const measures: Array<[string, (s: LengthStats) => number]> = [
    ["mean", (s) => s.mean],
    ["median", (s) => s.median],
    ["p90", (s) => s.p90],
  ];
  const max = Math.max(...groups.flatMap((g) => measures.map(([, f]) => f(g.stats))), 1);
  const band = width / measures.length;
  const parts: string[] = [];
  measures.forEach(([label, f], mi) => {
    groups.forEach((g, gi) => {
      const h = (f(g.stats) / max) * (height - 46);
      const w = (band - 24) / groups.length;
      const x = mi * band + 12 + gi * w;
      parts.push(
        `<rect x="${x}" y="${height - 24 - h}" width="${w - 4}" height="${h}" fill="${g.color}" data-group="${g.name}" data-measure="${label}" data-value="${f(g.stats)}" />`,
      );
    });
    parts.push(`<text x="${mi * band + band / 2}" y="${height - 8}" font-size="10" text-anchor="middle">${label}</text>`);
  });
  const legend = groups
    .map((g, i) => `<text x="${8 + i * 110}" y="12" font-size="10" fill="${g.color}">${g.name} (n=${g.stats.count})</text>`)
    .join("");
  return `<svg width="${width}" height="${height}" role="img" aria-label="length distributions">${legend}${parts.join("")}</svg>`;
}
