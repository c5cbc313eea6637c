/** Wire types mirroring the planning service's JSON responses.
 *
 * Money is a decimal string everywhere ("2136.07"); the UI renders those
 * strings verbatim and never derives economic numbers itself.
 */

export interface OptimalResultWire {
  z_star: string;
  enbis_at_optimum: string;
  breach_prob_at_optimum: number;
  expected_loss_no_investment: string;
  bound_ratio: number;
  converged: boolean;
  iterations: number;
}

export interface PlanSegmentWire {
  segment_id: string;
  optimal: OptimalResultWire;
}

export interface PlanWire {
  per_segment: PlanSegmentWire[];
  total_investment: string;
  total_enbis: string;
  aggregate_result: OptimalResultWire;
  aggregate_v_eff: number;
  segmentation_benefit: string;
}

export interface SegmentPayload {
  name: string;
  type: string;
  value: string;
  risk: number;
  vulnerability: number;
}

export interface DocumentWire<P = Record<string, unknown>> {
  id: string;
  kind: string;
  version: number;
  payload: P;
  updated_at: string;
}

export interface EnbisRowWire {
  z: string;
  ebis: string;
  enbis: string;
  breach_prob: number;
  is_optimal: boolean;
}

export interface ParseResultWire {
  source: string;
  normalized: string;
  variables: string[];
}

export interface CheckWire {
  name: string;
  passed: boolean;
  witness: Record<string, unknown> | null;
  detail: string;
}

export interface ValidationReportWire {
  passed: boolean;
  checks: CheckWire[];
  probe_grid: string;
}

export interface ComparisonWire {
  rows: { z: string; breach_probs: number[] }[];
  z_stars: string[];
}

export interface RosiReportWire {
  ale: string;
  risk_reduction: string;
  rosi: number;
  cost_effective: boolean;
  inputs: { aro: number; sle: string; mitigation: number; cost: string };
}

export interface OfferWire {
  id: string;
  name: string;
  attack_types: string[];
  regions: string[];
  price: string;
  leasing_period: string;
  mitigation_ratio: number;
}

export interface RecommendationWire {
  offer: OfferWire;
  score: number;
  rosi_inputs: {
    aro: number | null;
    sle: string | null;
    mitigation: number;
    cost: string;
  };
  rosi_report: RosiReportWire | null;
}

export interface RecommendationsWire {
  budget: string;
  recommendations: RecommendationWire[];
}

export interface BpfConfigWire {
  kind: string;
  alpha?: number;
  weights?: { w_v: number; w_z: number; w_alpha: number };
  expression_source?: string;
}

export interface ApiErrorWire {
  code: string;
  message: string;
  details: Record<string, unknown>;
}
