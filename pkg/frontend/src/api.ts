/** Typed client for the planning service. Responses pass through untouched. */

import type {
  ApiErrorWire,
  BpfConfigWire,
  ComparisonWire,
  DocumentWire,
  EnbisRowWire,
  ParseResultWire,
  PlanWire,
  RecommendationsWire,
  RosiReportWire,
  SegmentPayload,
  ValidationReportWire,
} from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly code: string;
  readonly details: Record<string, unknown>;

  constructor(wire: ApiErrorWire) {
    super(wire.message);
    this.code = wire.code;
    this.details = wire.details ?? {};
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string | null = null,
    private readonly fetchImpl: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (!response.ok) {
      throw new ApiError(payload as ApiErrorWire);
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  listProfiles(): Promise<DocumentWire[]> {
    return this.request("GET", "/profiles");
  }

  createProfile(body: {
    name: string;
    sector?: string;
    revenue?: string;
    employees?: number;
  }): Promise<DocumentWire> {
    return this.request("POST", "/profiles", body);
  }

  addSegment(profileId: string, segment: SegmentPayload): Promise<DocumentWire<SegmentPayload>> {
    return this.request("POST", `/profiles/${profileId}/segments`, segment);
  }

  listSegments(profileId: string): Promise<DocumentWire<SegmentPayload>[]> {
    return this.request("GET", `/profiles/${profileId}/segments`);
  }

  deleteSegment(segmentId: string): Promise<{ deleted: string }> {
    return this.request("DELETE", `/segments/${segmentId}`);
  }

  plan(profileId: string): Promise<PlanWire> {
    return this.request("GET", `/profiles/${profileId}/plan`);
  }

  enbisTable(segmentId: string, extraPoints: string[]): Promise<EnbisRowWire[]> {
    return this.request("POST", `/segments/${segmentId}/enbis-table`, {
      extra_points: extraPoints,
    });
  }

  parseBpf(expression: string): Promise<ParseResultWire> {
    return this.request("POST", "/bpf/parse", { expression });
  }

  validateBpf(body: {
    expression?: string;
    weights?: { w_v: number; w_z: number; w_alpha: number };
  }): Promise<ValidationReportWire> {
    return this.request("POST", "/bpf/validate", body);
  }

  compareBpfs(body: {
    specs: BpfConfigWire[];
    segment?: SegmentPayload;
    segment_id?: string;
    grid?: string[];
  }): Promise<ComparisonWire> {
    return this.request("POST", "/bpf/compare", body);
  }

  recommendations(body: {
    attack_type: string;
    budget?: string;
    segment_id?: string;
    region?: string;
    leasing_period?: string;
    limit?: number;
  }): Promise<RecommendationsWire> {
    return this.request("POST", "/recommendations", body);
  }

  rosi(body: {
    aro: number;
    sle: string;
    mitigation: number;
    cost: string;
  }): Promise<RosiReportWire> {
    return this.request("POST", "/rosi", body);
  }

  importCatalog(content: string, format: "CSV" | "JSON" = "CSV"): Promise<{
    imported: number;
    rejected: { row: number; reason: string }[];
  }> {
    return this.request("POST", "/catalog/import", { content, format });
  }
}
