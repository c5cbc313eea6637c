"""Filesystem document store with optimistic versioning.

One JSON file per document kind, whole-file atomic swaps (write temp,
``os.replace``), a lock per kind to serialize writers, and free concurrent
readers: a reader sees either the old or the new file, never a torn one.
Writes bump the document version by exactly one; a caller holding a stale
``expected_version`` gets a conflict instead of silently clobbering.
"""

from __future__ import annotations

import csv
import io
import json
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Optional, Sequence, TextIO, Union
from uuid import uuid4

import jsonschema

from .econ import Segment, SegmentType
from .errors import SecplannerError
from .money import parse_money
from .recommender import AttackType, IncidentProfile, LeasingPeriod, ProtectionOffer


class NotFound(SecplannerError):
    code = "not_found"


class VersionConflict(SecplannerError):
    code = "version_conflict"


class SchemaViolation(SecplannerError):
    code = "schema_violation"

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}", details={"field": field})
        self.field = field


class UnreadableInput(SecplannerError):
    code = "unreadable_input"


class FormatError(SecplannerError):
    code = "format_error"

    def __init__(self, message: str, row: int):
        super().__init__(f"row {row}: {message}", details={"row": row})
        self.row = row


class DocumentKind(str, Enum):
    PROFILE = "Profile"
    SEGMENT = "Segment"
    BPF_CONFIG = "BpfConfig"
    VALUATION_TABLE = "ValuationTable"
    CATALOG = "Catalog"


@dataclass(frozen=True)
class Document:
    id: str
    kind: DocumentKind
    version: int
    payload: dict
    updated_at: str


_MONEY = {
    "oneOf": [
        {"type": "number", "minimum": 0},
        {"type": "string", "pattern": r"^\d+(\.\d+)?$"},
    ]
}
_PROBABILITY = {"type": "number", "minimum": 0, "maximum": 1}

_SCHEMAS: dict[DocumentKind, dict] = {
    DocumentKind.PROFILE: {
        "type": "object",
        "required": ["name", "sector", "revenue", "employees"],
        "properties": {
            "name": {"type": "string", "minLength": 1},
            "sector": {"type": "string"},
            "revenue": _MONEY,
            "employees": {"type": "integer", "minimum": 0},
            "segments": {"type": "array", "items": {"type": "string"}},
        },
        "additionalProperties": False,
    },
    DocumentKind.SEGMENT: {
        "type": "object",
        "required": ["name", "type", "value", "risk", "vulnerability"],
        "properties": {
            "name": {"type": "string", "minLength": 1},
            "type": {"enum": ["WebServer", "Network", "Database", "Other"]},
            "value": _MONEY,
            "risk": _PROBABILITY,
            "vulnerability": _PROBABILITY,
            "valuation_breakdown": {"type": "array"},
        },
        "additionalProperties": False,
    },
    DocumentKind.BPF_CONFIG: {
        "type": "object",
        "required": ["kind", "alpha"],
        "properties": {
            "kind": {"enum": ["DefaultGL", "WeightedDefault", "Custom"]},
            "alpha": {"type": "number", "exclusiveMinimum": 0},
            "weights": {
                "type": "object",
                "required": ["w_v", "w_z", "w_alpha"],
                "properties": {
                    "w_v": {"type": "number", "exclusiveMinimum": 0},
                    "w_z": {"type": "number", "exclusiveMinimum": 0},
                    "w_alpha": {"type": "number", "exclusiveMinimum": 0},
                },
                "additionalProperties": False,
            },
            "expression_source": {"type": "string", "minLength": 1},
        },
        "additionalProperties": False,
        "allOf": [
            {
                "if": {"properties": {"kind": {"const": "WeightedDefault"}}},
                "then": {"required": ["weights"]},
            },
            {
                "if": {"properties": {"kind": {"const": "Custom"}}},
                "then": {"required": ["expression_source"]},
            },
        ],
    },
    DocumentKind.VALUATION_TABLE: {
        "type": "object",
        "required": ["types"],
        "properties": {
            "types": {
                "type": "object",
                "additionalProperties": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["parameter", "unit", "rate", "provenance"],
                        "properties": {
                            "parameter": {"type": "string", "minLength": 1},
                            "unit": {"type": "string"},
                            "rate": _MONEY,
                            "provenance": {"type": "string", "minLength": 1},
                        },
                        "additionalProperties": False,
                    },
                },
            }
        },
        "additionalProperties": False,
    },
    DocumentKind.CATALOG: {
        "type": "object",
        "required": ["id", "name", "attack_types", "price", "leasing_period", "mitigation_ratio"],
        "properties": {
            "id": {"type": "string", "minLength": 1},
            "name": {"type": "string", "minLength": 1},
            "attack_types": {
                "type": "array",
                "minItems": 1,
                "items": {"enum": [t.value for t in AttackType]},
            },
            "regions": {"type": "array", "items": {"type": "string"}},
            "price": _MONEY,
            "leasing_period": {"enum": ["Monthly", "Annual"]},
            "mitigation_ratio": _PROBABILITY,
            "aro": {"type": "number", "minimum": 0},
            "sle": _MONEY,
        },
        "additionalProperties": False,
    },
}

# money-typed fields that must also be strictly positive after parsing
_POSITIVE_MONEY_FIELDS = {DocumentKind.CATALOG: ("price",)}


def validate_payload(kind: DocumentKind, payload: dict) -> None:
    """Schema-check a payload, raising SchemaViolation with the field path."""
    validator = jsonschema.Draft202012Validator(_SCHEMAS[kind])
    errors = sorted(validator.iter_errors(payload), key=lambda e: list(e.absolute_path))
    if errors:
        error = errors[0]
        path = ".".join(str(part) for part in error.absolute_path) or "(root)"
        raise SchemaViolation(path, error.message)
    for field in _POSITIVE_MONEY_FIELDS.get(kind, ()):
        if field in payload and parse_money(payload[field], field) <= 0.0:
            raise SchemaViolation(field, "must be positive")


class DocumentStore:
    """Append-friendly single-writer-per-kind store over a data directory."""

    def __init__(self, data_dir: Union[str, Path]):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._locks = {kind: threading.Lock() for kind in DocumentKind}

    def _file(self, kind: DocumentKind) -> Path:
        return self.data_dir / f"{kind.value.lower()}s.json"

    def _load(self, kind: DocumentKind) -> dict:
        path = self._file(kind)
        if not path.exists():
            return {"seq": 0, "documents": {}}
        with path.open("r", encoding="utf-8") as handle:
            return json.load(handle)

    def _save(self, kind: DocumentKind, state: dict) -> None:
        path = self._file(kind)
        tmp = path.with_name(f".{path.name}.{uuid4().hex}.tmp")
        with tmp.open("w", encoding="utf-8") as handle:
            json.dump(state, handle, sort_keys=True, indent=1)
        os.replace(tmp, path)

    def put_document(
        self,
        kind: DocumentKind,
        payload: dict,
        doc_id: Optional[str] = None,
        expected_version: Optional[int] = None,
    ) -> Document:
        """Validate and atomically write a document, bumping its version by one."""
        validate_payload(kind, payload)
        if kind is DocumentKind.PROFILE:
            self._check_segment_refs(payload.get("segments", ()))
        doc_id = doc_id or uuid4().hex
        with self._locks[kind]:
            state = self._load(kind)
            existing = state["documents"].get(doc_id)
            current_version = existing["version"] if existing else 0
            if expected_version is not None and expected_version != current_version:
                raise VersionConflict(
                    f"document {doc_id} is at version {current_version}, "
                    f"caller expected {expected_version}",
                    details={"current_version": current_version},
                )
            state["seq"] += 1
            record = {
                "id": doc_id,
                "kind": kind.value,
                "version": current_version + 1,
                "payload": payload,
                "updated_at": datetime.now(timezone.utc).isoformat(),
                "seq": state["seq"],
            }
            state["documents"][doc_id] = record
            self._save(kind, state)
        return _to_document(record)

    def get_document(self, doc_id: str, kind: Optional[DocumentKind] = None) -> Document:
        kinds = [kind] if kind else list(DocumentKind)
        for candidate in kinds:
            record = self._load(candidate)["documents"].get(doc_id)
            if record is not None:
                return _to_document(record)
        raise NotFound(f"document {doc_id!r} not found")

    def list_documents(
        self,
        kind: DocumentKind,
        predicate: Optional[Callable[[Document], bool]] = None,
    ) -> list[Document]:
        """Latest documents of a kind, newest first (stable)."""
        records = self._load(kind)["documents"].values()
        ordered = sorted(records, key=lambda r: (r["updated_at"], r["seq"]), reverse=True)
        documents = [_to_document(record) for record in ordered]
        if predicate is not None:
            documents = [doc for doc in documents if predicate(doc)]
        return documents

    def delete_document(self, doc_id: str, kind: DocumentKind) -> None:
        with self._locks[kind]:
            state = self._load(kind)
            if doc_id not in state["documents"]:
                raise NotFound(f"document {doc_id!r} not found")
            del state["documents"][doc_id]
            self._save(kind, state)

    def _check_segment_refs(self, segment_ids: Sequence[str]) -> None:
        known = set(self._load(DocumentKind.SEGMENT)["documents"])
        for segment_id in segment_ids:
            if segment_id not in known:
                raise SchemaViolation("segments", f"references unknown segment {segment_id!r}")


def _to_document(record: dict) -> Document:
    return Document(
        id=record["id"],
        kind=DocumentKind(record["kind"]),
        version=record["version"],
        payload=record["payload"],
        updated_at=record["updated_at"],
    )


# --- catalog ingestion -------------------------------------------------------

CSV_COLUMNS = (
    "id", "name", "attack_types", "regions", "price",
    "leasing_period", "mitigation_ratio", "aro", "sle",
)


@dataclass(frozen=True)
class RejectedRow:
    row: int
    reason: str


@dataclass(frozen=True)
class ImportResult:
    imported: int
    rejected: tuple[RejectedRow, ...]


class ImportFormat(str, Enum):
    JSON = "JSON"
    CSV = "CSV"


def import_catalog(
    store: DocumentStore,
    source: Union[str, Path, TextIO],
    fmt: ImportFormat = ImportFormat.CSV,
) -> ImportResult:
    """Upsert protection offers from a CSV or JSON stream.

    Keyed on offer id, so re-importing the same file is idempotent (same
    count, no duplicate documents). Invalid rows are reported with their
    1-based row number (CSV row 1 is the header) and written nowhere.
    """
    text = _read_source(source)
    if fmt is ImportFormat.CSV:
        rows = _csv_rows(text)
    else:
        rows = _json_rows(text)

    imported = 0
    rejected: list[RejectedRow] = []
    for row_number, payload in rows:
        try:
            validate_payload(DocumentKind.CATALOG, payload)
            offer_from_payload(payload)  # full domain validation
        except SecplannerError as error:
            rejected.append(RejectedRow(row=row_number, reason=error.message))
            continue
        store.put_document(DocumentKind.CATALOG, payload, doc_id=payload["id"])
        imported += 1
    return ImportResult(imported=imported, rejected=tuple(rejected))


def _read_source(source: Union[str, Path, TextIO]) -> str:
    if isinstance(source, (str, Path)):
        try:
            return Path(source).read_text(encoding="utf-8")
        except OSError as error:
            raise UnreadableInput(f"cannot read {source}: {error}") from None
    try:
        return source.read()
    except (OSError, ValueError) as error:
        raise UnreadableInput(f"cannot read stream: {error}") from None


def _csv_rows(text: str) -> list[tuple[int, dict]]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise FormatError("missing header row", 1) from None
    if tuple(h.strip() for h in header) != CSV_COLUMNS:
        raise FormatError(f"header must be exactly: {','.join(CSV_COLUMNS)}", 1)

    rows = []
    for row_number, cells in enumerate(reader, start=2):
        if not cells or all(not cell.strip() for cell in cells):
            continue
        if len(cells) != len(CSV_COLUMNS):
            raise FormatError(f"expected {len(CSV_COLUMNS)} columns, got {len(cells)}", row_number)
        raw = dict(zip(CSV_COLUMNS, (cell.strip() for cell in cells)))
        payload: dict[str, Any] = {
            "id": raw["id"],
            "name": raw["name"],
            "attack_types": [t for t in raw["attack_types"].split(";") if t],
            "regions": [r for r in raw["regions"].split(";") if r],
            "price": raw["price"],
            "leasing_period": raw["leasing_period"],
        }
        try:
            payload["mitigation_ratio"] = float(raw["mitigation_ratio"])
        except ValueError:
            payload["mitigation_ratio"] = raw["mitigation_ratio"]  # schema reports it
        if raw["aro"]:
            try:
                payload["aro"] = float(raw["aro"])
            except ValueError:
                payload["aro"] = raw["aro"]
        if raw["sle"]:
            payload["sle"] = raw["sle"]
        rows.append((row_number, payload))
    return rows


def _json_rows(text: str) -> list[tuple[int, dict]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise UnreadableInput(f"invalid JSON: {error}") from None
    if not isinstance(data, list):
        raise FormatError("JSON catalog must be an array of offers", 1)
    rows = []
    for index, item in enumerate(data, start=1):
        if not isinstance(item, dict):
            rows.append((index, {"_not_an_object": True}))
        else:
            rows.append((index, item))
    return rows


def segment_from_document(doc: Document) -> Segment:
    """Materialize a Segment document into the econ-core domain type."""
    payload = doc.payload
    return Segment(
        name=payload["name"],
        segment_type=SegmentType(payload["type"]),
        value=parse_money(payload["value"], "value"),
        risk=float(payload["risk"]),
        vulnerability=float(payload["vulnerability"]),
        id=doc.id,
    )


def offer_from_payload(payload: dict) -> ProtectionOffer:
    """Materialize a catalog document payload into a ProtectionOffer."""
    incident = None
    if "aro" in payload and "sle" in payload:
        incident = IncidentProfile(aro=float(payload["aro"]), sle=parse_money(payload["sle"], "sle"))
    return ProtectionOffer(
        id=payload["id"],
        name=payload["name"],
        attack_types=frozenset(AttackType(t) for t in payload["attack_types"]),
        regions=frozenset(payload.get("regions", ())),
        price=parse_money(payload["price"], "price"),
        leasing_period=LeasingPeriod(payload["leasing_period"]),
        mitigation_ratio=float(payload["mitigation_ratio"]),
        default_incident=incident,
    )
