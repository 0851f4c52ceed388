// API response shapes (mirror the service's JSON exactly).

export interface HistoryEvent {
  stage: string;
  state: string;
  timestamp: number;
  payload_digest: string;
  duration_ms: number;
}

export interface SessionSummary {
  session_id: string;
  state: string;
  retry_count: number;
  clarification_hint: string | null;
  history: HistoryEvent[];
}

export interface SessionCreated {
  session_id: string;
  state: string;
}

export interface IntentSite {
  name: string;
  location?: string;
  role?: string;
}

export interface IntentJson {
  availability?: string;
  sites: IntentSite[];
  constraints: {
    latency_ms?: number;
    budget_usd?: number;
    disjoint_paths?: number;
    compliance?: string[];
  };
  guidance?: GuidanceHit[];
  standards_cited?: string[];
}

export interface GuidanceHit {
  doc_id: string;
  text: string;
  score: number;
}

export interface PlanStep {
  action: string;
  args: string[];
  cumulative_cost: number;
}

export interface PlanJson {
  steps: PlanStep[];
  total_cost: number;
  feasible: boolean;
  infeasibility_reason: string | null;
  validated: boolean;
}

export interface FiberRoute {
  pair: [string, string];
  fiber_id?: string;
  fiber_type: string;
  length_km?: number | null;
  cost_usd?: number;
  step_refs?: number[];
}

export interface BomLine {
  item_class: string;
  model: string;
  unit_cost_usd: number;
  quantity: number;
  site: string | null;
  step_refs?: number[];
}

export interface ConstraintEntry {
  name: string;
  status: string;
  detail: string;
}

export interface TimelinePhase {
  name: string;
  start_week: number;
  weeks: number;
}

export interface DesignJson {
  verified: boolean;
  degraded: boolean;
  sites: IntentSite[];
  fiber_routes: FiberRoute[];
  equipment?: BomLine[];
  cost_breakdown?: Record<string, number>;
  grand_total_usd?: number;
  timeline_weeks?: number;
  timeline_phases?: TimelinePhase[];
  guidance_applied?: string[];
  constraint_report?: ConstraintEntry[];
  // degraded-mode fields
  limitation_notice?: string;
  educational_feedback?: string;
  topology_style?: string;
  indicative_equipment?: BomLine[];
  indicative_cost_usd?: number;
}
