/** Wire types mirroring docs/api schemas of the evaluation service. */

export interface PlanItem {
  display_name: string;
  canonical_id: string | null;
  source: "gallery" | "hub" | "user";
  relevance_score: number;
  match_tier: "quality" | "marginal" | "forced";
  justification: string;
  category_tags: string[];
}

export interface BenchmarkPlan {
  items: PlanItem[];
  budget: number;
}

export interface CheckpointRecord {
  checkpoint_id: string;
  step_index: number;
  snapshot_hash: string;
  decision: "pending" | "approved" | "edited" | "refined" | "rolled_back";
  user_note: string | null;
}

export interface BenchInfoView {
  benchmark_id: string;
  config_name: string;
  split: string;
  task_type: string;
  rationale: string;
}

export interface RunState {
  run_id: string;
  request_text: string;
  model_id: string;
  step_index: number;
  status: "running" | "awaiting_decision" | "failed" | "completed" | "rolled_back";
  plan: BenchmarkPlan | null;
  bench_infos: BenchInfoView[] | null;
  checkpoints: CheckpointRecord[];
  token_usage: number;
  failure: string | null;
  report_ref?: string | null;
}

export interface EvidenceRecord {
  index: number;
  step_index: number;
  timestamp: string;
  kind: string;
  payload: Record<string, unknown>;
  state_hash: string;
}

export interface LengthStats {
  mean: number;
  median: number;
  p90: number;
  count: number;
}

export interface SunburstMetric {
  metric: string;
  score: number;
  priority: number;
}

export interface SunburstBenchmark {
  benchmark: string;
  metrics: SunburstMetric[];
}

export interface SunburstNode {
  category: string;
  benchmarks: SunburstBenchmark[];
}

export interface BlindSpot {
  token: string;
  count: number;
  examples: string[];
}

export interface MicroRow {
  benchmark: string;
  sample_index: number;
  input_excerpt: string;
  prediction_excerpt: string;
  reference_excerpt: string;
  failing_metrics: string[];
}

export interface ReportBundle {
  macro: { radar: Record<string, number>; sunburst: SunburstNode[] };
  diagnostic: {
    error_histogram: Record<string, number>;
    analyst_cases: Array<Record<string, unknown>>;
    blind_spots: BlindSpot[];
    length_stats: { correct: LengthStats | null; incorrect: LengthStats | null };
    capability_balance: { gini: number; detail?: string };
  };
  micro: MicroRow[];
  metadata: { run_id: string; model_id: string; started_at?: string; token_usage: number };
}

export interface GalleryEntryView {
  id: string;
  canonical_repo: string;
  category_tags: string[];
  task_type: string;
  description: string;
}

export type DecisionKind = "approved" | "edited" | "refined" | "rolled_back";

export interface DecisionPayload {
  [key: string]: unknown;
}
