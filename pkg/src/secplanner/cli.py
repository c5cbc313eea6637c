"""Command-line interface mirroring the HTTP API.

Human-readable tables by default, machine output with --json. Exit codes:
0 success, 1 domain error (including failed BPF validation), 2 usage error.
"""

from __future__ import annotations

import json
from pathlib import Path

import click

from .bpf import (
    ProbeGrid,
    WeightVector,
    compare_bpfs,
    compile_custom,
    validate_bpf,
    weighted_default,
)
from .config import ServiceConfig
from .econ import (
    BpfSpec,
    GridSpec,
    Segment,
    SegmentType,
    enbis_table,
    optimal_investment,
    plan_portfolio,
)
from .errors import SecplannerError
from .expr import parse_bpf
from .money import parse_money, usd
from .recommender import (
    AttackType,
    Demand,
    LeasingPeriod,
    MissingIncidentProfile,
    attach_rosi,
    match_protections,
)
from .rosi import IncidentProfile, rosi as compute_rosi
from .serialize import (
    comparison_json,
    enbis_rows_json,
    estimate_json,
    optimal_result_json,
    plan_json,
    recommendation_json,
    rosi_report_json,
    validation_report_json,
)
from .store import (
    DocumentKind,
    DocumentStore,
    ImportFormat,
    import_catalog,
    offer_from_payload,
    segment_from_document,
)
from .valuation import estimate_value


class DomainGroup(click.Group):
    """Click group that renders domain errors as messages, never stack traces."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except SecplannerError as error:
            click.echo(f"error: {error.message}", err=True)
            ctx.exit(1)


def _emit_json(payload) -> None:
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


data_dir_option = click.option(
    "--data-dir",
    envvar="SECPLANNER_DATA_DIR",
    default="secplanner-data",
    show_default=True,
    help="Document store directory.",
)


@click.group(cls=DomainGroup)
def cli():
    """Cybersecurity investment planning: Gordon-Loeb optima, BPFs, ROSI."""


# --- pure computations -------------------------------------------------------


@cli.group()
def segment():
    """Per-segment investment calculations."""


@segment.command("optimal")
@click.option("--value", required=True, help="Segment value L_i in dollars.")
@click.option("--risk", required=True, type=float, help="Attack probability in [0,1].")
@click.option("--vulnerability", required=True, type=float, help="Success probability in [0,1].")
@click.option("--alpha", default=0.001, show_default=True, type=float)
@click.option("--tol", default=0.01, show_default=True, type=float, help="Dollar tolerance.")
@click.option("--json", "as_json", is_flag=True)
def segment_optimal(value, risk, vulnerability, alpha, tol, as_json):
    """Optimal investment for one segment under the default BPF."""
    seg = Segment(
        name="cli", value=parse_money(value, "value"), risk=risk, vulnerability=vulnerability
    )
    result = optimal_investment(seg, BpfSpec.default(alpha), tol=tol)
    if as_json:
        _emit_json(optimal_result_json(result))
        return
    click.echo("optimal investment")
    click.echo(f"  z*                  {usd(result.z_star)}")
    click.echo(f"  ENBIS at z*         {usd(result.enbis_at_optimum)}")
    click.echo(f"  breach probability  {result.breach_prob_at_optimum:.6f}")
    click.echo(f"  expected loss       {usd(result.expected_loss_no_investment)}")
    click.echo(f"  bound ratio (z*/vL) {result.bound_ratio:.4f}")
    click.echo(f"  converged           {'yes' if result.converged else 'no'}")


@segment.command("enbis-table")
@click.option("--value", required=True)
@click.option("--risk", required=True, type=float)
@click.option("--vulnerability", required=True, type=float)
@click.option("--alpha", default=0.001, show_default=True, type=float)
@click.option("--points", help="Comma-separated investment levels.")
@click.option("--custom", "custom_points", multiple=True, help="Extra investment to probe.")
@click.option("--json", "as_json", is_flag=True)
def segment_enbis_table(value, risk, vulnerability, alpha, points, custom_points, as_json):
    """EBIS/ENBIS exploration grid with the optimal row flagged."""
    seg = Segment(
        name="cli", value=parse_money(value, "value"), risk=risk, vulnerability=vulnerability
    )
    grid = None
    if points:
        grid = GridSpec.of(*(parse_money(p.strip(), "points") for p in points.split(",")))
    extras = [parse_money(p, "custom") for p in custom_points]
    rows = enbis_table(seg, BpfSpec.default(alpha), grid=grid, extra_points=extras)
    if as_json:
        _emit_json(enbis_rows_json(rows))
        return
    click.echo(f"{'z':>14}  {'EBIS':>14}  {'ENBIS':>14}  {'S(z)':>10}  optimal")
    for row in rows:
        marker = "  <== z*" if row.is_optimal else ""
        click.echo(
            f"{usd(row.z):>14}  {usd(row.ebis):>14}  {usd(row.enbis):>14}"
            f"  {row.breach_prob:>10.6f}{marker}"
        )


@cli.command("rosi")
@click.option("--aro", required=True, type=float, help="Incidents per year.")
@click.option("--sle", required=True, help="Loss per incident, dollars.")
@click.option("--mitigation", required=True, type=float, help="Mitigation ratio in [0,1].")
@click.option("--cost", required=True, help="Protection cost, dollars.")
@click.option("--json", "as_json", is_flag=True)
def rosi_command(aro, sle, mitigation, cost, as_json):
    """Return on security investment for one protection."""
    profile = IncidentProfile(aro=aro, sle=parse_money(sle, "sle"))
    report = compute_rosi(profile, mitigation, parse_money(cost, "cost"))
    if as_json:
        _emit_json(rosi_report_json(report))
        return
    click.echo("ROSI report")
    click.echo(f"  ALE             {usd(report.ale)}")
    click.echo(f"  risk reduction  {usd(report.risk_reduction)}")
    click.echo(f"  ROSI            {report.rosi:g}")
    click.echo(f"  cost-effective  {'yes' if report.cost_effective else 'no'}")


# --- BPF tools ---------------------------------------------------------------


@cli.group()
def bpf():
    """Parse, validate, and compare breach probability functions."""


@bpf.command("parse")
@click.option("--expr", required=True, help="Expression over z, v, L, L_i, alpha.")
@click.option("--json", "as_json", is_flag=True)
def bpf_parse(expr, as_json):
    """Check an expression parses; print its normalized form."""
    expression = parse_bpf(expr)
    if as_json:
        _emit_json(
            {
                "source": expression.source,
                "normalized": expression.to_source(),
                "variables": sorted(expression.variables),
            }
        )
        return
    click.echo(f"parsed: {expression.to_source()}")
    click.echo(f"variables: {', '.join(sorted(expression.variables)) or '(none)'}")


@bpf.command("validate")
@click.option("--expr", required=True)
@click.option("--alpha", default=0.001, show_default=True, type=float)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def bpf_validate(ctx, expr, alpha, as_json):
    """Run the probe-based validation checks; exit 1 when a mandatory check fails."""
    report = validate_bpf(parse_bpf(expr), ProbeGrid(alpha=alpha))
    if as_json:
        _emit_json(validation_report_json(report))
    else:
        click.echo(f"BPF validation: {'PASSED' if report.passed else 'FAILED'}")
        click.echo(f"probe: {report.probe_grid}")
        for check in report.checks:
            status = "pass" if check.passed else "FAIL"
            line = f"  [{status}] {check.name}"
            if not check.passed and check.witness is not None:
                witness = ", ".join(f"{k}={v}" for k, v in check.witness.items())
                line += f"  ({witness})"
            click.echo(line)
    if not report.passed:
        ctx.exit(1)


@bpf.command("compare")
@click.option("--expr", "expressions", multiple=True, help="Custom BPF to compare (repeatable).")
@click.option("--wz", type=float, help="Compare a weighted default with this z weight.")
@click.option("--walpha", type=float, help="Weight on alpha for the weighted variant.")
@click.option("--value", default="100000", show_default=True)
@click.option("--risk", default=1.0, show_default=True, type=float)
@click.option("--vulnerability", default=0.5, show_default=True, type=float)
@click.option("--alpha", default=0.001, show_default=True, type=float)
@click.option("--points", help="Comma-separated grid of investments.")
@click.option("--json", "as_json", is_flag=True)
def bpf_compare(expressions, wz, walpha, value, risk, vulnerability, alpha, points, as_json):
    """Compare candidate BPFs against the built-in default on one segment."""
    specs = [BpfSpec.default(alpha)]
    labels = ["default"]
    if wz is not None or walpha is not None:
        weights = WeightVector(w_z=wz or 1.0, w_alpha=walpha or 1.0)
        specs.append(weighted_default(weights, alpha))
        labels.append(f"weighted(w_z={weights.w_z:g}, w_alpha={weights.w_alpha:g})")
    for source in expressions:
        specs.append(compile_custom(source, alpha))
        labels.append(source)
    seg = Segment(
        name="cli", value=parse_money(value, "value"), risk=risk, vulnerability=vulnerability
    )
    grid = None
    if points:
        grid = [parse_money(p.strip(), "points") for p in points.split(",")]
    comparison = compare_bpfs(specs, seg, grid=grid)
    if as_json:
        payload = comparison_json(comparison)
        payload["labels"] = labels
        _emit_json(payload)
        return
    click.echo("  ".join(f"{label:>24}" for label in ["z"] + labels))
    for row in comparison.rows:
        cells = [f"{usd(row.z):>24}"] + [f"{s:>24.6f}" for s in row.breach_probs]
        click.echo("  ".join(cells))
    click.echo("z*: " + "  ".join(f"{label}={usd(z)}" for label, z in zip(labels, comparison.z_stars)))


# --- valuation ---------------------------------------------------------------


@cli.group()
def valuation():
    """Segment value estimation."""


@valuation.command("estimate")
@click.option("--type", "segment_type", required=True,
              type=click.Choice([t.value for t in SegmentType]))
@click.option("--param", "params", multiple=True, help="name=quantity (repeatable).")
@click.option("--json", "as_json", is_flag=True)
def valuation_estimate(segment_type, params, as_json):
    """Estimate a segment's dollar value from the default table."""
    quantities = {}
    for item in params:
        name, _, quantity = item.partition("=")
        if not quantity:
            raise click.UsageError(f"--param expects name=quantity, got {item!r}")
        quantities[name] = quantity
    estimate = estimate_value(segment_type, quantities)
    if as_json:
        _emit_json(estimate_json(estimate))
        return
    for line in estimate.breakdown:
        click.echo(
            f"  {line.parameter:<22} {line.quantity} x {usd(line.rate)} = {usd(line.subtotal)}"
        )
    click.echo(f"  total: {usd(estimate.total)}")


# --- store-backed commands -----------------------------------------------------


@cli.group()
def profile():
    """Business profiles in the document store."""


@profile.command("create")
@click.option("--name", required=True)
@click.option("--sector", default="")
@click.option("--revenue", default="0")
@click.option("--employees", default=0, type=int)
@data_dir_option
@click.option("--json", "as_json", is_flag=True)
def profile_create(name, sector, revenue, employees, data_dir, as_json):
    store = DocumentStore(data_dir)
    doc = store.put_document(
        DocumentKind.PROFILE,
        {"name": name, "sector": sector, "revenue": revenue, "employees": employees,
         "segments": []},
    )
    if as_json:
        _emit_json({"id": doc.id, "version": doc.version})
    else:
        click.echo(f"created profile {doc.id} (version {doc.version})")


@profile.command("list")
@data_dir_option
@click.option("--json", "as_json", is_flag=True)
def profile_list(data_dir, as_json):
    store = DocumentStore(data_dir)
    docs = store.list_documents(DocumentKind.PROFILE)
    if as_json:
        _emit_json([{"id": d.id, "name": d.payload["name"], "version": d.version} for d in docs])
        return
    for doc in docs:
        click.echo(f"{doc.id}  {doc.payload['name']}  ({len(doc.payload.get('segments', []))} segments)")


@segment.command("add")
@click.option("--profile-id", required=True)
@click.option("--name", required=True)
@click.option("--type", "segment_type", default="Other",
              type=click.Choice([t.value for t in SegmentType]))
@click.option("--value", required=True)
@click.option("--risk", required=True, type=float)
@click.option("--vulnerability", required=True, type=float)
@data_dir_option
@click.option("--json", "as_json", is_flag=True)
def segment_add(profile_id, name, segment_type, value, risk, vulnerability, data_dir, as_json):
    """Persist a segment and attach it to a profile."""
    store = DocumentStore(data_dir)
    profile_doc = store.get_document(profile_id, DocumentKind.PROFILE)
    seg_doc = store.put_document(
        DocumentKind.SEGMENT,
        {"name": name, "type": segment_type, "value": value, "risk": risk,
         "vulnerability": vulnerability},
    )
    payload = dict(profile_doc.payload)
    payload["segments"] = list(payload.get("segments", [])) + [seg_doc.id]
    store.put_document(
        DocumentKind.PROFILE, payload, doc_id=profile_id, expected_version=profile_doc.version
    )
    if as_json:
        _emit_json({"id": seg_doc.id, "version": seg_doc.version})
    else:
        click.echo(f"added segment {seg_doc.id} to profile {profile_id}")


@cli.command("plan")
@click.argument("profile_id")
@click.option("--tol", default=0.01, show_default=True, type=float)
@data_dir_option
@click.option("--json", "as_json", is_flag=True)
def plan_command(profile_id, tol, data_dir, as_json):
    """Portfolio plan: per-segment optima and the segmentation benefit."""
    store = DocumentStore(data_dir)
    profile_doc = store.get_document(profile_id, DocumentKind.PROFILE)
    segments = [
        segment_from_document(store.get_document(sid, DocumentKind.SEGMENT))
        for sid in profile_doc.payload.get("segments", [])
    ]
    plan = plan_portfolio(segments, BpfSpec.default(), tol=tol)
    if as_json:
        _emit_json(plan_json(plan))
        return
    names = {
        sid: store.get_document(sid, DocumentKind.SEGMENT).payload["name"]
        for sid in profile_doc.payload.get("segments", [])
    }
    click.echo(f"{'segment':<24} {'z*':>14} {'ENBIS*':>14} {'expected loss':>14}")
    for segment_id, result in plan.per_segment:
        click.echo(
            f"{names.get(segment_id, segment_id):<24} {usd(result.z_star):>14}"
            f" {usd(result.enbis_at_optimum):>14} {usd(result.expected_loss_no_investment):>14}"
        )
    click.echo(f"{'total':<24} {usd(plan.total_investment):>14} {usd(plan.total_enbis):>14}")
    click.echo(f"segmentation benefit: {usd(plan.segmentation_benefit)}")


@cli.command("recommend")
@click.option("--attack", required=True, type=click.Choice([t.value for t in AttackType]))
@click.option("--budget", help="Dollar budget; defaults to the segment's z*.")
@click.option("--segment-id", help="Segment whose optimal investment caps the budget.")
@click.option("--region")
@click.option("--leasing", type=click.Choice([p.value for p in LeasingPeriod]))
@click.option("--limit", default=5, show_default=True, type=int)
@data_dir_option
@click.option("--json", "as_json", is_flag=True)
def recommend(attack, budget, segment_id, region, leasing, limit, data_dir, as_json):
    """Rank catalog protections against a demand and budget."""
    store = DocumentStore(data_dir)
    catalog = [offer_from_payload(d.payload) for d in store.list_documents(DocumentKind.CATALOG)]
    if budget is None:
        if segment_id is None:
            raise click.UsageError("provide --budget or --segment-id")
        seg = segment_from_document(store.get_document(segment_id, DocumentKind.SEGMENT))
        budget = optimal_investment(seg, BpfSpec.default()).z_star
    demand = Demand(
        attack_type=AttackType(attack),
        budget=parse_money(budget, "budget"),
        region=region,
        leasing_period=LeasingPeriod(leasing) if leasing else None,
    )
    recs = match_protections(demand, catalog, limit=limit)
    enriched = []
    for rec in recs:
        try:
            enriched.append(attach_rosi(rec))
        except MissingIncidentProfile:
            enriched.append(rec)
    if as_json:
        _emit_json([recommendation_json(r) for r in enriched])
        return
    if not enriched:
        click.echo("no offers match the demand and budget")
        return
    for rec in enriched:
        rosi_note = (
            f"ROSI {rec.rosi_report.rosi:g} ({'cost-effective' if rec.rosi_report.cost_effective else 'not cost-effective'})"
            if rec.rosi_report
            else "ROSI pending incident inputs"
        )
        click.echo(
            f"{rec.offer.id}  {rec.offer.name}  score={rec.score:.3f}"
            f"  price={usd(rec.offer.price)}/{rec.offer.leasing_period.value}  {rosi_note}"
        )


@cli.group()
def catalog():
    """Protection catalog management."""


@catalog.command("import")
@click.argument("path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--format", "fmt", default="CSV", type=click.Choice(["CSV", "JSON"]),
              show_default=True)
@data_dir_option
@click.option("--json", "as_json", is_flag=True)
def catalog_import(path, fmt, data_dir, as_json):
    """Import protection offers from a CSV or JSON file (upsert by offer id)."""
    store = DocumentStore(data_dir)
    result = import_catalog(store, path, ImportFormat(fmt))
    if as_json:
        _emit_json(
            {
                "imported": result.imported,
                "rejected": [{"row": r.row, "reason": r.reason} for r in result.rejected],
            }
        )
        return
    click.echo(f"imported {result.imported} offers")
    for rejected in result.rejected:
        click.echo(f"  rejected row {rejected.row}: {rejected.reason}")


@cli.command("serve")
@click.option("--port", type=int, default=None, help="Overrides SECPLANNER_PORT.")
@click.option("--host", default=None)
@click.option("--data-dir", default=None, help="Overrides SECPLANNER_DATA_DIR.")
def serve_command(port, host, data_dir):
    """Run the HTTP API."""
    from .service import serve

    overrides = {}
    if port is not None:
        overrides["port"] = port
    if host is not None:
        overrides["host"] = host
    if data_dir is not None:
        overrides["data_dir"] = Path(data_dir)
    serve(ServiceConfig.from_env(**overrides))


def main():
    cli()


if __name__ == "__main__":
    main()
