/** Single-page planner UI: Segments / Investments / BPF / Recommendations.
 *
 * The UI performs no economic computation. Every z*, ENBIS, breach
 * probability, and ROSI figure on screen is lifted verbatim from an API
 * response; money cells carry the raw response string in data-econ so tests
 * can trace each displayed number back to the wire.
 */

import { ApiClient, ApiError } from "./api.js";
import { comparisonChart } from "./chart.js";
import { clear, el, moneyCell } from "./dom.js";
import type {
  ComparisonWire,
  DocumentWire,
  EnbisRowWire,
  PlanWire,
  RecommendationsWire,
  SegmentPayload,
  ValidationReportWire,
} from "./types.js";

export type Tab = "segments" | "investments" | "bpf" | "recommendations";

export interface ViewState {
  profile: DocumentWire | null;
  segments: DocumentWire<SegmentPayload>[];
  plan: PlanWire | null;
  activeTab: Tab;
  enbis: { segmentId: string | null; customs: string[]; rows: EnbisRowWire[] };
  bpf: {
    mode: "weights" | "expression";
    parseError: { message: string; position: number; source: string } | null;
    report: ValidationReportWire | null;
    comparison: ComparisonWire | null;
    labels: string[];
    zStars: string[];
  };
  recommendations: RecommendationsWire | null;
  lastDemandSummary: string;
}

const SEGMENT_TYPES = ["WebServer", "Network", "Database", "Other"];
const ATTACK_TYPES = ["Phishing", "DDoS", "Ransomware", "DataBreach", "Malware", "Insider"];

export class App {
  readonly state: ViewState = {
    profile: null,
    segments: [],
    plan: null,
    activeTab: "segments",
    enbis: { segmentId: null, customs: [], rows: [] },
    bpf: {
      mode: "weights",
      parseError: null,
      report: null,
      comparison: null,
      labels: [],
      zStars: [],
    },
    recommendations: null,
    lastDemandSummary: "",
  };

  private work: Promise<void> = Promise.resolve();

  /** Last asynchronous failure, for tests and debugging; UI shows it too. */
  lastError: unknown = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
  ) {}

  /** Chain a task so tests can await quiescence via whenIdle(). */
  private track(task: () => Promise<void>): Promise<void> {
    this.work = this.work.then(task).catch((error) => {
      this.lastError = error;
      this.showError(error);
    });
    return this.work;
  }

  whenIdle(): Promise<void> {
    return this.work;
  }

  async init(): Promise<void> {
    this.render(); // skeleton first so errors always have somewhere to land
    await this.track(async () => {
      const profiles = await this.api.listProfiles();
      this.state.profile =
        profiles[0] ?? (await this.api.createProfile({ name: "Workspace" }));
      await this.reloadSegmentsAndPlan();
      this.render();
    });
  }

  private async reloadSegmentsAndPlan(): Promise<void> {
    const profile = this.state.profile;
    if (!profile) return;
    this.state.segments = await this.api.listSegments(profile.id);
    this.state.plan =
      this.state.segments.length > 0 ? await this.api.plan(profile.id) : null;
  }

  private showError(error: unknown): void {
    const bar = this.root.querySelector("#error-bar");
    if (!bar) return;
    bar.textContent =
      error instanceof ApiError
        ? `${error.code}: ${error.message}`
        : String((error as Error)?.message ?? error);
    bar.classList.add("visible");
  }

  private clearError(): void {
    const bar = this.root.querySelector("#error-bar");
    if (bar) {
      bar.textContent = "";
      bar.classList.remove("visible");
    }
  }

  switchTab(tab: Tab): void {
    this.state.activeTab = tab;
    this.render();
  }

  // --- rendering --------------------------------------------------------

  render(): void {
    clear(this.root);
    const tabs = el("nav", { class: "tabs" });
    (["segments", "investments", "bpf", "recommendations"] as Tab[]).forEach((tab) => {
      tabs.append(
        el(
          "button",
          {
            class: tab === this.state.activeTab ? "tab active" : "tab",
            "data-testid": `tab-${tab}`,
            onclick: () => this.switchTab(tab),
          },
          tab,
        ),
      );
    });
    const errorBar = el("div", { id: "error-bar", class: "error-bar" });
    const panel = el("main", { id: "panel" });
    this.root.append(el("h1", {}, "secplanner"), tabs, errorBar, panel);

    if (this.state.activeTab === "segments") this.renderSegments(panel);
    else if (this.state.activeTab === "investments") this.renderInvestments(panel);
    else if (this.state.activeTab === "bpf") this.renderBpf(panel);
    else this.renderRecommendations(panel);
  }

  private renderSegments(panel: HTMLElement): void {
    const fieldError = el("div", { id: "segment-form-error", class: "field-error" });
    const form = el(
      "form",
      { id: "segment-form", onsubmit: (event) => { event.preventDefault(); void this.submitSegmentForm(); } },
      el("input", { id: "segment-name", placeholder: "Segment name", required: true }),
      (() => {
        const select = el("select", { id: "segment-type" });
        SEGMENT_TYPES.forEach((t) => select.append(el("option", { value: t }, t)));
        return select;
      })(),
      el("input", { id: "segment-value", placeholder: "Value (USD)" }),
      el("input", { id: "segment-risk", type: "number", min: "0", max: "100", placeholder: "Risk %" }),
      el("input", { id: "segment-vulnerability", type: "number", min: "0", max: "100", placeholder: "Vulnerability %" }),
      el("button", { type: "submit" }, "Add segment"),
      fieldError,
    );

    const table = el("table", { id: "segment-table" });
    table.append(
      el(
        "tr",
        {},
        ...["Name", "Value", "Risk", "Vulnerability", "Expected loss", "z*", "ENBIS*", ""].map(
          (heading) => el("th", {}, heading),
        ),
      ),
    );

    const optimaById = new Map(
      (this.state.plan?.per_segment ?? []).map((entry) => [entry.segment_id, entry.optimal]),
    );
    for (const doc of this.state.segments) {
      const optimal = optimaById.get(doc.id);
      const row = el(
        "tr",
        { "data-testid": `segment-row-${doc.id}`, class: "segment-row" },
        el("td", {}, doc.payload.name),
        moneyCell("td", doc.payload.value),
        el("td", {}, `${doc.payload.risk * 100}%`),
        el("td", {}, `${doc.payload.vulnerability * 100}%`),
        optimal ? moneyCell("td", optimal.expected_loss_no_investment) : el("td", {}, "-"),
        optimal
          ? (() => {
              const cell = moneyCell("td", optimal.z_star);
              cell.setAttribute("data-testid", `zstar-${doc.id}`);
              return cell;
            })()
          : el("td", {}, "-"),
        optimal ? moneyCell("td", optimal.enbis_at_optimum) : el("td", {}, "-"),
        el(
          "td",
          {},
          el(
            "button",
            {
              "data-testid": `delete-${doc.id}`,
              onclick: () => void this.deleteSegment(doc.id),
            },
            "delete",
          ),
        ),
      );
      table.append(row);
    }

    panel.append(el("h2", {}, "Segments"), form, table);

    const plan = this.state.plan;
    if (plan && plan.per_segment.length > 0) {
      panel.append(
        el(
          "div",
          { id: "totals-row", "data-testid": "totals-row", class: "totals" },
          el("span", {}, "Total investment: "),
          moneyCell("strong", plan.total_investment),
          el("span", {}, "  Total ENBIS: "),
          moneyCell("strong", plan.total_enbis),
          el("span", {}, "  Segmentation benefit: "),
          moneyCell("strong", plan.segmentation_benefit),
        ),
      );
    }
  }

  private renderInvestments(panel: HTMLElement): void {
    const select = el("select", { id: "enbis-segment" });
    this.state.segments.forEach((doc) =>
      select.append(
        el(
          "option",
          doc.id === this.state.enbis.segmentId
            ? { value: doc.id, selected: true }
            : { value: doc.id },
          doc.payload.name,
        ),
      ),
    );
    panel.append(
      el("h2", {}, "ENBIS exploration"),
      el(
        "div",
        {},
        select,
        el(
          "button",
          { id: "enbis-load", onclick: () => void this.loadEnbisTable((select as HTMLSelectElement).value) },
          "Load table",
        ),
        el("input", { id: "enbis-custom-z", placeholder: "Custom investment (USD)" }),
        el(
          "button",
          {
            id: "enbis-probe",
            onclick: () => {
              const input = this.root.querySelector<HTMLInputElement>("#enbis-custom-z");
              if (input && input.value.trim()) void this.probeCustomInvestment(input.value.trim());
            },
          },
          "Probe ENBIS",
        ),
      ),
    );

    if (this.state.enbis.rows.length === 0) return;
    const table = el("table", { id: "enbis-table" });
    table.append(
      el("tr", {}, ...["z", "EBIS", "ENBIS", "S(z)", ""].map((h) => el("th", {}, h))),
    );
    for (const row of this.state.enbis.rows) {
      const tr = el(
        "tr",
        row.is_optimal
          ? { class: "enbis-row optimal", "data-testid": "enbis-optimal" }
          : { class: "enbis-row" },
        moneyCell("td", row.z),
        moneyCell("td", row.ebis),
        moneyCell("td", row.enbis),
        el("td", { "data-econ": String(row.breach_prob) }, String(row.breach_prob)),
        el("td", {}, row.is_optimal ? "optimal" : ""),
      );
      table.append(tr);
    }
    panel.append(table);
  }

  private renderBpf(panel: HTMLElement): void {
    const { bpf } = this.state;
    const weightInputs = el(
      "div",
      { id: "bpf-weights", class: bpf.mode === "weights" ? "" : "hidden" },
      el("input", { id: "bpf-wv", value: "1", placeholder: "w_v" }),
      el("input", { id: "bpf-wz", value: "1", placeholder: "w_z" }),
      el("input", { id: "bpf-walpha", value: "1", placeholder: "w_alpha" }),
    );
    const expressionInput = el(
      "textarea",
      { id: "bpf-expression", class: bpf.mode === "expression" ? "" : "hidden" },
      "v / (1 + z / (L * alpha))",
    );

    const modeRadio = (mode: "weights" | "expression", label: string) =>
      el(
        "label",
        {},
        el("input", {
          type: "radio",
          name: "bpf-mode",
          value: mode,
          ...(bpf.mode === mode ? { checked: true } : {}),
          onchange: () => {
            this.state.bpf.mode = mode;
            this.render();
          },
        } as Record<string, string | boolean | ((event: Event) => void)>),
        label,
      );

    panel.append(
      el("h2", {}, "Breach probability function"),
      el("div", {}, modeRadio("weights", "Adjust weights"), modeRadio("expression", "Custom expression")),
      weightInputs,
      expressionInput,
      el("button", { id: "bpf-apply", onclick: () => void this.applyBpf() }, "Validate & compare"),
    );

    if (bpf.parseError) {
      const caret = " ".repeat(bpf.parseError.position) + "^";
      panel.append(
        el(
          "pre",
          { id: "bpf-parse-error", class: "parse-error", "data-testid": "parse-error" },
          `${bpf.parseError.source}\n${caret}\n${bpf.parseError.message}`,
        ),
      );
      return;
    }

    if (bpf.report) {
      const list = el("ul", { id: "bpf-checks" });
      for (const check of bpf.report.checks) {
        const witness =
          !check.passed && check.witness
            ? `  witness: ${JSON.stringify(check.witness)}`
            : "";
        list.append(
          el(
            "li",
            { class: check.passed ? "check pass" : "check fail" },
            `[${check.passed ? "pass" : "FAIL"}] ${check.name}${witness}`,
          ),
        );
      }
      panel.append(
        el(
          "div",
          { id: "bpf-verdict", "data-testid": "bpf-verdict" },
          bpf.report.passed ? "validation PASSED" : "validation FAILED",
        ),
        list,
      );
    }

    if (bpf.comparison) {
      panel.append(comparisonChart(bpf.comparison, bpf.labels));
      const zstars = el("div", { id: "zstar-list", "data-testid": "zstar-list" });
      bpf.labels.forEach((label, index) => {
        zstars.append(
          el("span", {}, `${label} z*: `),
          moneyCell("span", bpf.zStars[index]),
          el("span", {}, "  "),
        );
      });
      panel.append(zstars);
    }
  }

  private renderRecommendations(panel: HTMLElement): void {
    const attackSelect = el("select", { id: "demand-attack" });
    ATTACK_TYPES.forEach((t) => attackSelect.append(el("option", { value: t }, t)));
    const segmentSelect = el("select", { id: "demand-segment" });
    segmentSelect.append(el("option", { value: "" }, "(no segment)"));
    this.state.segments.forEach((doc) =>
      segmentSelect.append(el("option", { value: doc.id }, doc.payload.name)),
    );

    panel.append(
      el("h2", {}, "Protection recommendations"),
      el(
        "form",
        {
          id: "demand-form",
          onsubmit: (event) => {
            event.preventDefault();
            void this.requestRecommendations();
          },
        },
        attackSelect,
        el("input", { id: "demand-budget", placeholder: "Budget (USD, defaults to segment z*)" }),
        segmentSelect,
        el("input", { id: "demand-region", placeholder: "Region (optional)" }),
        el("button", { type: "submit" }, "Get recommendations"),
      ),
    );

    const result = this.state.recommendations;
    if (!result) return;

    if (result.recommendations.length === 0) {
      panel.append(
        el(
          "div",
          { class: "empty-state", "data-testid": "empty-state" },
          `No offers match ${this.state.lastDemandSummary} within budget `,
          moneyCell("span", result.budget),
        ),
      );
      return;
    }

    panel.append(
      el("div", { id: "budget-used" }, "Budget: ", moneyCell("strong", result.budget)),
    );
    for (const rec of result.recommendations) {
      const offerId = rec.offer.id;
      const report = rec.rosi_report;
      const badge = el(
        "span",
        {
          class: report
            ? report.cost_effective
              ? "rosi-badge green"
              : "rosi-badge red"
            : "rosi-badge pending",
          "data-testid": `rosi-badge-${offerId}`,
          ...(report ? { "data-econ": String(report.rosi) } : {}),
        } as Record<string, string>,
        report ? `ROSI ${report.rosi}` : "ROSI pending",
      );
      const aroInput = el("input", {
        id: `rosi-aro-${offerId}`,
        type: "number",
        value: rec.rosi_inputs.aro === null ? "" : String(rec.rosi_inputs.aro),
      });
      const sleInput = el("input", {
        id: `rosi-sle-${offerId}`,
        value: rec.rosi_inputs.sle ?? "",
      });
      const mitigationInput = el("input", {
        id: `rosi-mitigation-${offerId}`,
        type: "number",
        value: String(rec.rosi_inputs.mitigation),
      });
      const costInput = el("input", {
        id: `rosi-cost-${offerId}`,
        value: rec.rosi_inputs.cost,
        readonly: true,
      });
      panel.append(
        el(
          "article",
          { class: "rec-card", "data-testid": `rec-${offerId}` },
          el("h4", {}, `${rec.offer.name} `, badge),
          el(
            "div",
            {},
            el("span", {}, "price: "),
            moneyCell("span", rec.offer.price),
            el("span", {}, ` / ${rec.offer.leasing_period}, score ${rec.score.toFixed(3)}`),
          ),
          el(
            "div",
            { class: "rosi-form" },
            el("label", {}, "ARO ", aroInput),
            el("label", {}, "SLE ", sleInput),
            el("label", {}, "Mitigation ", mitigationInput),
            el("label", {}, "Annual cost ", costInput),
            el(
              "button",
              {
                "data-testid": `rosi-recompute-${offerId}`,
                onclick: () =>
                  void this.recomputeRosi(
                    offerId,
                    Number((aroInput as HTMLInputElement).value),
                    (sleInput as HTMLInputElement).value,
                    Number((mitigationInput as HTMLInputElement).value),
                    (costInput as HTMLInputElement).value,
                  ),
              },
              "Compute ROSI",
            ),
          ),
        ),
      );
    }
  }

  // --- handlers ------------------------------------------------------------

  submitSegmentForm(): Promise<void> {
    const name = this.root.querySelector<HTMLInputElement>("#segment-name")?.value ?? "";
    const type = this.root.querySelector<HTMLSelectElement>("#segment-type")?.value ?? "Other";
    const value = this.root.querySelector<HTMLInputElement>("#segment-value")?.value ?? "";
    const riskPct = Number(this.root.querySelector<HTMLInputElement>("#segment-risk")?.value);
    const vulnPct = Number(
      this.root.querySelector<HTMLInputElement>("#segment-vulnerability")?.value,
    );

    // client-side bounds mirror the server schema: reject before any request
    const problem =
      !name.trim()
        ? "segment name is required"
        : !(Number(value) > 0)
          ? "value must be a positive dollar amount"
          : !(riskPct >= 0 && riskPct <= 100)
            ? "risk must be between 0% and 100%"
            : !(vulnPct >= 0 && vulnPct <= 100)
              ? "vulnerability must be between 0% and 100%"
              : null;
    const errorBox = this.root.querySelector("#segment-form-error");
    if (problem) {
      if (errorBox) errorBox.textContent = problem;
      return Promise.resolve();
    }
    if (errorBox) errorBox.textContent = "";

    return this.track(async () => {
      this.clearError();
      const profile = this.state.profile;
      if (!profile) return;
      try {
        await this.api.addSegment(profile.id, {
          name,
          type,
          value,
          risk: riskPct / 100,
          vulnerability: vulnPct / 100,
        });
      } catch (error) {
        if (error instanceof ApiError && errorBox) {
          errorBox.textContent = `${error.code}: ${error.message}`;
          return;
        }
        throw error;
      }
      await this.reloadSegmentsAndPlan();
      this.render();
    });
  }

  deleteSegment(segmentId: string): Promise<void> {
    return this.track(async () => {
      await this.api.deleteSegment(segmentId);
      await this.reloadSegmentsAndPlan();
      this.render();
    });
  }

  loadEnbisTable(segmentId: string): Promise<void> {
    return this.track(async () => {
      this.state.enbis.segmentId = segmentId;
      this.state.enbis.customs = [];
      this.state.enbis.rows = await this.api.enbisTable(segmentId, []);
      this.render();
    });
  }

  probeCustomInvestment(z: string): Promise<void> {
    return this.track(async () => {
      const { segmentId } = this.state.enbis;
      if (!segmentId) return;
      this.state.enbis.customs.push(z);
      this.state.enbis.rows = await this.api.enbisTable(segmentId, this.state.enbis.customs);
      this.render();
    });
  }

  applyBpf(): Promise<void> {
    return this.track(async () => {
      const { bpf } = this.state;
      bpf.parseError = null;
      bpf.report = null;
      bpf.comparison = null;

      let candidate: { kind: string; weights?: { w_v: number; w_z: number; w_alpha: number }; expression_source?: string };
      let label: string;
      if (bpf.mode === "expression") {
        const source =
          this.root.querySelector<HTMLTextAreaElement>("#bpf-expression")?.value ?? "";
        try {
          await this.api.parseBpf(source);
        } catch (error) {
          if (error instanceof ApiError) {
            bpf.parseError = {
              message: error.message,
              position: Number(error.details["position"] ?? 0),
              source,
            };
            this.render();
            return;
          }
          throw error;
        }
        bpf.report = await this.api.validateBpf({ expression: source });
        candidate = { kind: "Custom", expression_source: source };
        label = "custom";
      } else {
        const weights = {
          w_v: Number(this.root.querySelector<HTMLInputElement>("#bpf-wv")?.value ?? "1"),
          w_z: Number(this.root.querySelector<HTMLInputElement>("#bpf-wz")?.value ?? "1"),
          w_alpha: Number(this.root.querySelector<HTMLInputElement>("#bpf-walpha")?.value ?? "1"),
        };
        bpf.report = await this.api.validateBpf({ weights });
        candidate = { kind: "WeightedDefault", weights };
        label = `weighted (w_z=${weights.w_z})`;
      }

      if (bpf.report.passed) {
        const segment = this.referenceSegment();
        bpf.comparison = await this.api.compareBpfs({
          specs: [{ kind: "DefaultGL" }, candidate],
          segment,
        });
        bpf.labels = ["default", label];
        bpf.zStars = bpf.comparison.z_stars;
      }
      this.render();
    });
  }

  private referenceSegment(): SegmentPayload {
    const first = this.state.segments[0];
    if (first) return first.payload;
    return { name: "reference", type: "Other", value: "100000", risk: 1, vulnerability: 0.5 };
  }

  requestRecommendations(): Promise<void> {
    return this.track(async () => {
      const attack = this.root.querySelector<HTMLSelectElement>("#demand-attack")?.value ?? "Phishing";
      const budget = this.root.querySelector<HTMLInputElement>("#demand-budget")?.value.trim();
      const segmentId = this.root.querySelector<HTMLSelectElement>("#demand-segment")?.value;
      const region = this.root.querySelector<HTMLInputElement>("#demand-region")?.value.trim();
      this.state.lastDemandSummary = `${attack}${region ? " in " + region : ""}`;
      this.state.recommendations = await this.api.recommendations({
        attack_type: attack,
        ...(budget ? { budget } : {}),
        ...(segmentId ? { segment_id: segmentId } : {}),
        ...(region ? { region } : {}),
      });
      this.render();
    });
  }

  recomputeRosi(
    offerId: string,
    aro: number,
    sle: string,
    mitigation: number,
    cost: string,
  ): Promise<void> {
    return this.track(async () => {
      const report = await this.api.rosi({ aro, sle, mitigation, cost });
      const badge = this.root.querySelector(`[data-testid="rosi-badge-${offerId}"]`);
      if (badge) {
        badge.textContent = `ROSI ${report.rosi}`;
        badge.setAttribute("data-econ", String(report.rosi));
        badge.className = report.cost_effective ? "rosi-badge green" : "rosi-badge red";
      }
      const stored = this.state.recommendations?.recommendations.find(
        (rec) => rec.offer.id === offerId,
      );
      if (stored) stored.rosi_report = report;
    });
  }
}
