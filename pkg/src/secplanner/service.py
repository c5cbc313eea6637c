"""HTTP API over the planning engine.

Stateless handlers over a DocumentStore; optimistic versioning mediates write
races. Money crosses the wire as decimal strings. Every domain error maps to
one stable machine-readable code.
"""

from __future__ import annotations

import io
import socket
from typing import Optional

from fastapi import Depends, FastAPI, Header, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .bpf import (
    ProbeGrid,
    compare_bpfs,
    spec_from_config,
    validate_bpf,
    validate_spec,
)
from .config import ServiceConfig
from .econ import (
    BpfKind,
    BpfSpec,
    GridSpec,
    Segment,
    SegmentType,
    enbis_table,
    optimal_investment,
    plan_portfolio,
)
from .errors import InvalidInput, SecplannerError
from .expr import parse_bpf
from .money import money_str, parse_money
from .recommender import (
    AttackType,
    Demand,
    LeasingPeriod,
    attach_rosi,
    match_protections,
    MissingIncidentProfile,
)
from .rosi import IncidentProfile, rosi
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
from .valuation import ValuationTable, estimate_value, override_value


class BindFailure(SecplannerError):
    code = "bind_failure"


class DataDirUnwritable(SecplannerError):
    code = "data_dir_unwritable"


class Unauthorized(SecplannerError):
    code = "unauthorized"


_STATUS_BY_CODE = {
    "not_found": 404,
    "version_conflict": 409,
    "unauthorized": 401,
}


# --- request bodies ----------------------------------------------------------


class ProfileIn(BaseModel):
    name: str
    sector: str = ""
    revenue: float | str = 0.0
    employees: int = 0
    segments: list[str] = Field(default_factory=list)


class SegmentIn(BaseModel):
    name: str
    type: str = SegmentType.OTHER.value
    value: float | str
    risk: float
    vulnerability: float
    valuation_breakdown: Optional[list] = None


class BpfConfigIn(BaseModel):
    kind: str = "DefaultGL"
    alpha: float = 0.001
    weights: Optional[dict[str, float]] = None
    expression_source: Optional[str] = None


class OptimalIn(BaseModel):
    bpf: Optional[BpfConfigIn] = None
    l_total: Optional[float | str] = None
    tol: float = 0.01


class EnbisTableIn(BaseModel):
    points: Optional[list[float | str]] = None
    extra_points: list[float | str] = Field(default_factory=list)
    bpf: Optional[BpfConfigIn] = None
    tol: float = 0.01


class BpfParseIn(BaseModel):
    expression: str


class BpfValidateIn(BaseModel):
    expression: Optional[str] = None
    weights: Optional[dict[str, float]] = None
    alpha: float = 0.001


class BpfCompareIn(BaseModel):
    specs: list[BpfConfigIn]
    segment_id: Optional[str] = None
    segment: Optional[SegmentIn] = None
    grid: Optional[list[float | str]] = None
    tol: float = 0.01


class ValuationEstimateIn(BaseModel):
    segment_type: str
    params: dict[str, float | str] = Field(default_factory=dict)
    override: Optional[float | str] = None


class RecommendationsIn(BaseModel):
    attack_type: str
    budget: Optional[float | str] = None
    segment_id: Optional[str] = None
    region: Optional[str] = None
    leasing_period: Optional[str] = None
    limit: int = 5


class RosiIn(BaseModel):
    aro: float
    sle: float | str
    mitigation: float
    cost: float | str


class CatalogImportIn(BaseModel):
    format: str = "CSV"
    content: str


def create_app(config: ServiceConfig) -> FastAPI:
    store = DocumentStore(config.data_dir)
    app = FastAPI(title="secplanner", version=__version__)

    if config.ui_origin:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.ui_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.exception_handler(SecplannerError)
    async def _domain_error(_request: Request, error: SecplannerError):
        status = _STATUS_BY_CODE.get(error.code, 400)
        return JSONResponse(
            status_code=status,
            content={"code": error.code, "message": error.message, "details": error.details},
        )

    @app.exception_handler(RequestValidationError)
    async def _request_error(_request: Request, error: RequestValidationError):
        first = error.errors()[0] if error.errors() else {}
        field = ".".join(str(part) for part in first.get("loc", ()) if part != "body")
        return JSONResponse(
            status_code=400,
            content={
                "code": "schema_violation",
                "message": f"{field}: {first.get('msg', 'invalid request')}",
                "details": {"field": field},
            },
        )

    async def require_token(authorization: Optional[str] = Header(default=None)):
        if config.token is None:
            return
        if authorization != f"Bearer {config.token}":
            raise Unauthorized("missing or invalid bearer token")

    guarded = {"dependencies": [Depends(require_token)]}

    @app.get("/health")
    async def health():
        return {"status": "ok", "service": "secplanner", "version": __version__}

    # --- profiles and segments ------------------------------------------

    @app.post("/profiles", **guarded)
    async def create_profile(body: ProfileIn):
        doc = store.put_document(DocumentKind.PROFILE, body.model_dump(exclude_none=True))
        return _doc_json(doc)

    @app.get("/profiles", **guarded)
    async def list_profiles():
        return [_doc_json(d) for d in store.list_documents(DocumentKind.PROFILE)]

    @app.get("/profiles/{profile_id}", **guarded)
    async def get_profile(profile_id: str):
        return _doc_json(store.get_document(profile_id, DocumentKind.PROFILE))

    @app.post("/profiles/{profile_id}/segments", **guarded)
    async def add_segment(profile_id: str, body: SegmentIn):
        profile = store.get_document(profile_id, DocumentKind.PROFILE)
        payload = body.model_dump(exclude_none=True)
        segment_doc = store.put_document(DocumentKind.SEGMENT, payload)
        updated = dict(profile.payload)
        updated["segments"] = list(updated.get("segments", [])) + [segment_doc.id]
        store.put_document(
            DocumentKind.PROFILE, updated, doc_id=profile_id, expected_version=profile.version
        )
        return _doc_json(segment_doc)

    @app.get("/profiles/{profile_id}/segments", **guarded)
    async def list_segments(profile_id: str):
        profile = store.get_document(profile_id, DocumentKind.PROFILE)
        docs = [
            store.get_document(segment_id, DocumentKind.SEGMENT)
            for segment_id in profile.payload.get("segments", [])
        ]
        return [_doc_json(d) for d in docs]

    @app.delete("/segments/{segment_id}", **guarded)
    async def delete_segment(segment_id: str):
        store.get_document(segment_id, DocumentKind.SEGMENT)
        for profile in store.list_documents(DocumentKind.PROFILE):
            if segment_id in profile.payload.get("segments", []):
                updated = dict(profile.payload)
                updated["segments"] = [
                    s for s in profile.payload["segments"] if s != segment_id
                ]
                store.put_document(
                    DocumentKind.PROFILE,
                    updated,
                    doc_id=profile.id,
                    expected_version=profile.version,
                )
        store.delete_document(segment_id, DocumentKind.SEGMENT)
        return {"deleted": segment_id}

    @app.get("/profiles/{profile_id}/plan", **guarded)
    async def profile_plan(
        profile_id: str, bpf: Optional[str] = Query(default=None), tol: float = 0.01
    ):
        profile = store.get_document(profile_id, DocumentKind.PROFILE)
        segments = [
            segment_from_document(store.get_document(segment_id, DocumentKind.SEGMENT))
            for segment_id in profile.payload.get("segments", [])
        ]
        spec = _load_bpf_doc(store, bpf)
        plan = plan_portfolio(segments, spec, tol=tol)
        return plan_json(plan)

    # --- per-segment computations -----------------------------------------

    @app.post("/segments/{segment_id}/optimal", **guarded)
    async def segment_optimal(segment_id: str, body: OptimalIn):
        segment = segment_from_document(store.get_document(segment_id, DocumentKind.SEGMENT))
        spec = _spec_from_body(body.bpf)
        l_total = parse_money(body.l_total, "l_total") if body.l_total is not None else None
        result = optimal_investment(segment, spec, l_total, tol=body.tol)
        return optimal_result_json(result)

    @app.post("/segments/{segment_id}/enbis-table", **guarded)
    async def segment_enbis_table(segment_id: str, body: EnbisTableIn):
        segment = segment_from_document(store.get_document(segment_id, DocumentKind.SEGMENT))
        spec = _spec_from_body(body.bpf)
        grid = None
        if body.points:
            grid = GridSpec.of(*(parse_money(z, "points") for z in body.points))
        extra = [parse_money(z, "extra_points") for z in body.extra_points]
        rows = enbis_table(segment, spec, grid=grid, extra_points=extra, tol=body.tol)
        return enbis_rows_json(rows)

    # --- BPF tools ---------------------------------------------------------

    @app.post("/bpf/parse", **guarded)
    async def bpf_parse(body: BpfParseIn):
        expression = parse_bpf(body.expression)
        return {
            "source": expression.source,
            "normalized": expression.to_source(),
            "variables": sorted(expression.variables),
        }

    @app.post("/bpf/validate", **guarded)
    async def bpf_validate(body: BpfValidateIn):
        probe = ProbeGrid(alpha=body.alpha)
        if body.expression is not None:
            report = validate_bpf(parse_bpf(body.expression), probe)
        elif body.weights is not None:
            spec = BpfSpec(
                kind=BpfKind.WEIGHTED_DEFAULT, alpha=body.alpha, weights=dict(body.weights)
            )
            report = validate_spec(spec, probe)
        else:
            report = validate_spec(BpfSpec.default(body.alpha), probe)
        return validation_report_json(report)

    @app.post("/bpf/compare", **guarded)
    async def bpf_compare(body: BpfCompareIn):
        specs = [_spec_from_body(config) for config in body.specs]
        if body.segment is not None:
            segment = _segment_from_body(body.segment)
        elif body.segment_id is not None:
            segment = segment_from_document(
                store.get_document(body.segment_id, DocumentKind.SEGMENT)
            )
        else:
            raise InvalidInput("either segment or segment_id is required")
        grid = [parse_money(z, "grid") for z in body.grid] if body.grid else None
        comparison = compare_bpfs(specs, segment, grid=grid, tol=body.tol)
        return comparison_json(comparison)

    # --- valuation, recommendations, ROSI -----------------------------------

    @app.post("/valuation/estimate", **guarded)
    async def valuation_estimate(body: ValuationEstimateIn):
        table = _load_valuation_table(store)
        estimate = estimate_value(body.segment_type, body.params, table)
        if body.override is not None:
            estimate = override_value(estimate, body.override)
        return estimate_json(estimate)

    @app.post("/recommendations", **guarded)
    async def recommendations(body: RecommendationsIn):
        catalog = [
            offer_from_payload(doc.payload)
            for doc in store.list_documents(DocumentKind.CATALOG)
        ]
        budget = parse_money(body.budget, "budget") if body.budget is not None else None
        if budget is None and body.segment_id is not None:
            segment = segment_from_document(
                store.get_document(body.segment_id, DocumentKind.SEGMENT)
            )
            budget = optimal_investment(segment, BpfSpec.default()).z_star
        if budget is None:
            raise InvalidInput("budget or segment_id is required")
        demand = Demand(
            attack_type=AttackType(body.attack_type),
            budget=budget,
            region=body.region,
            leasing_period=LeasingPeriod(body.leasing_period) if body.leasing_period else None,
        )
        recs = match_protections(demand, catalog, limit=body.limit)
        enriched = []
        for rec in recs:
            try:
                enriched.append(attach_rosi(rec))
            except MissingIncidentProfile:
                enriched.append(rec)
        return {
            "budget": money_str(budget),
            "recommendations": [recommendation_json(r) for r in enriched],
        }

    @app.post("/rosi", **guarded)
    async def rosi_endpoint(body: RosiIn):
        profile = IncidentProfile(aro=body.aro, sle=parse_money(body.sle, "sle"))
        report = rosi(profile, body.mitigation, parse_money(body.cost, "cost"))
        return rosi_report_json(report)

    @app.post("/catalog/import", **guarded)
    async def catalog_import(body: CatalogImportIn):
        result = import_catalog(store, io.StringIO(body.content), ImportFormat(body.format.upper()))
        return {
            "imported": result.imported,
            "rejected": [{"row": r.row, "reason": r.reason} for r in result.rejected],
        }

    return app


def _doc_json(doc) -> dict:
    return {
        "id": doc.id,
        "kind": doc.kind.value,
        "version": doc.version,
        "payload": doc.payload,
        "updated_at": doc.updated_at,
    }


def _spec_from_body(config: Optional[BpfConfigIn]) -> BpfSpec:
    if config is None:
        return BpfSpec.default()
    return spec_from_config(config.model_dump(exclude_none=True))


def _segment_from_body(body: SegmentIn) -> Segment:
    return Segment(
        name=body.name,
        segment_type=SegmentType(body.type),
        value=parse_money(body.value, "value"),
        risk=body.risk,
        vulnerability=body.vulnerability,
    )


def _load_bpf_doc(store: DocumentStore, doc_id: Optional[str]) -> BpfSpec:
    if doc_id is None:
        return BpfSpec.default()
    doc = store.get_document(doc_id, DocumentKind.BPF_CONFIG)
    return spec_from_config(doc.payload)


def _load_valuation_table(store: DocumentStore) -> ValuationTable:
    docs = store.list_documents(DocumentKind.VALUATION_TABLE)
    if not docs:
        return ValuationTable.default()
    return valuation_table_from_payload(docs[0].payload)


def valuation_table_from_payload(payload: dict) -> ValuationTable:
    from decimal import Decimal

    from .valuation import RateEntry

    return ValuationTable(
        entries={
            type_name: tuple(
                RateEntry(
                    parameter=row["parameter"],
                    unit=row["unit"],
                    rate=Decimal(str(row["rate"])),
                    provenance=row["provenance"],
                )
                for row in rows
            )
            for type_name, rows in payload["types"].items()
        }
    )


def serve(config: ServiceConfig):
    """Run the HTTP service until interrupted."""
    import uvicorn

    data_dir = config.data_dir
    try:
        data_dir.mkdir(parents=True, exist_ok=True)
        probe = data_dir / ".write-probe"
        probe.write_text("ok")
        probe.unlink()
    except OSError as error:
        raise DataDirUnwritable(f"data directory {data_dir} is not writable: {error}") from None

    try:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
            sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            sock.bind((config.host, config.port))
    except OSError as error:
        raise BindFailure(f"cannot bind {config.host}:{config.port}: {error}") from None

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
