"""Persistence: versioning, round-trips, schema guards, catalog ingestion."""

import io
import json
import threading

import pytest

from secplanner.store import (
    CSV_COLUMNS,
    DocumentKind,
    DocumentStore,
    FormatError,
    ImportFormat,
    NotFound,
    SchemaViolation,
    UnreadableInput,
    VersionConflict,
    import_catalog,
    offer_from_payload,
    segment_from_document,
)

PROFILE = {"name": "Acme", "sector": "retail", "revenue": "2500000.00", "employees": 42,
           "segments": []}
SEGMENT = {"name": "Customers DB", "type": "Database", "value": "150000.00",
           "risk": 0.6, "vulnerability": 0.08}

CSV_HEADER = ",".join(CSV_COLUMNS)
CSV_BODY = "\n".join(
    [
        CSV_HEADER,
        "p1,Phish Shield,Phishing,EU;US,25000,Annual,0.5,3,30000",
        "p2,DDoS Guard,DDoS;Ransomware,,1000,Monthly,0.8,,",
        "p3,Mail Filter,Phishing,US,400,Annual,0.35,2,12000",
    ]
)


def test_new_document_gets_version_one(store):
    doc = store.put_document(DocumentKind.PROFILE, PROFILE)
    assert doc.version == 1
    assert doc.kind is DocumentKind.PROFILE


def test_put_get_round_trip_is_byte_identical(store):
    doc = store.put_document(DocumentKind.SEGMENT, SEGMENT)
    fetched = store.get_document(doc.id, DocumentKind.SEGMENT)
    assert json.dumps(fetched.payload, sort_keys=True) == json.dumps(SEGMENT, sort_keys=True)
    again = store.put_document(DocumentKind.SEGMENT, fetched.payload, doc_id=doc.id)
    assert again.version == 2
    refetched = store.get_document(doc.id)
    assert json.dumps(refetched.payload, sort_keys=True) == json.dumps(SEGMENT, sort_keys=True)


def test_stale_expected_version_conflicts(store):
    doc = store.put_document(DocumentKind.PROFILE, PROFILE)
    store.put_document(DocumentKind.PROFILE, PROFILE, doc_id=doc.id)  # now version 2
    with pytest.raises(VersionConflict) as excinfo:
        store.put_document(DocumentKind.PROFILE, PROFILE, doc_id=doc.id, expected_version=1)
    assert excinfo.value.details["current_version"] == 2


def test_schema_violation_names_field(store):
    bad = dict(SEGMENT, risk=1.2)
    with pytest.raises(SchemaViolation) as excinfo:
        store.put_document(DocumentKind.SEGMENT, bad)
    assert excinfo.value.details["field"] == "risk"


def test_unknown_field_rejected(store):
    with pytest.raises(SchemaViolation):
        store.put_document(DocumentKind.SEGMENT, dict(SEGMENT, extra="nope"))


def test_get_unknown_raises_not_found(store):
    with pytest.raises(NotFound):
        store.get_document("missing")


def test_listing_newest_first(store):
    ids = [store.put_document(DocumentKind.SEGMENT, dict(SEGMENT, name=f"seg {k}")).id
           for k in range(3)]
    listed = store.list_documents(DocumentKind.SEGMENT)
    assert [doc.id for doc in listed] == list(reversed(ids))


def test_profile_segment_references_checked(store):
    with pytest.raises(SchemaViolation) as excinfo:
        store.put_document(DocumentKind.PROFILE, dict(PROFILE, segments=["ghost"]))
    assert excinfo.value.details["field"] == "segments"
    seg = store.put_document(DocumentKind.SEGMENT, SEGMENT)
    doc = store.put_document(DocumentKind.PROFILE, dict(PROFILE, segments=[seg.id]))
    assert doc.payload["segments"] == [seg.id]


def test_delete_document(store):
    doc = store.put_document(DocumentKind.SEGMENT, SEGMENT)
    store.delete_document(doc.id, DocumentKind.SEGMENT)
    with pytest.raises(NotFound):
        store.get_document(doc.id, DocumentKind.SEGMENT)


def test_segment_from_document_materializes(store):
    doc = store.put_document(DocumentKind.SEGMENT, SEGMENT)
    segment = segment_from_document(doc)
    assert segment.value == 150000.0
    assert segment.risk == 0.6
    assert segment.id == doc.id


def test_staged_concurrent_writers_conflict(store):
    doc = store.put_document(DocumentKind.PROFILE, PROFILE)
    barrier = threading.Barrier(2)
    outcomes = []

    def writer(sector):
        barrier.wait()
        try:
            store.put_document(
                DocumentKind.PROFILE, dict(PROFILE, sector=sector),
                doc_id=doc.id, expected_version=1,
            )
            outcomes.append("ok")
        except VersionConflict:
            outcomes.append("conflict")

    threads = [threading.Thread(target=writer, args=(s,)) for s in ("a", "b")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(outcomes) == ["conflict", "ok"]
    assert store.get_document(doc.id).version == 2


def test_concurrent_reads_never_torn(store):
    doc = store.put_document(DocumentKind.SEGMENT, SEGMENT)
    stop = threading.Event()
    errors = []

    def reader():
        while not stop.is_set():
            fetched = store.get_document(doc.id, DocumentKind.SEGMENT)
            if set(fetched.payload) != set(SEGMENT):
                errors.append(fetched.payload)

    thread = threading.Thread(target=reader)
    thread.start()
    for k in range(30):
        store.put_document(DocumentKind.SEGMENT, dict(SEGMENT, name=f"rev {k}"), doc_id=doc.id)
    stop.set()
    thread.join()
    assert errors == []


# --- catalog import ------------------------------------------------------------


def test_csv_import_all_valid(store):
    result = import_catalog(store, io.StringIO(CSV_BODY), ImportFormat.CSV)
    assert result.imported == 3
    assert result.rejected == ()
    offers = {d.id: offer_from_payload(d.payload) for d in store.list_documents(DocumentKind.CATALOG)}
    assert offers["p1"].default_incident.aro == 3
    assert offers["p2"].default_incident is None
    assert offers["p2"].leasing_period.value == "Monthly"


def test_csv_import_rejects_bad_row_with_number(store):
    body = "\n".join(
        [CSV_HEADER, "ok,Fine,Phishing,,100,Annual,0.5,,", "bad,Broken,Phishing,,100,Annual,1.5,,"]
    )
    result = import_catalog(store, io.StringIO(body), ImportFormat.CSV)
    assert result.imported == 1
    assert len(result.rejected) == 1
    assert result.rejected[0].row == 3
    assert "1.5" in result.rejected[0].reason


def test_csv_import_is_idempotent(store):
    first = import_catalog(store, io.StringIO(CSV_BODY), ImportFormat.CSV)
    second = import_catalog(store, io.StringIO(CSV_BODY), ImportFormat.CSV)
    assert (first.imported, second.imported) == (3, 3)
    assert len(store.list_documents(DocumentKind.CATALOG)) == 3


def test_csv_header_is_mandatory(store):
    with pytest.raises(FormatError):
        import_catalog(store, io.StringIO("id,name\n1,x"), ImportFormat.CSV)


def test_csv_wrong_column_count_reports_row(store):
    body = "\n".join([CSV_HEADER, "only,three,cells"])
    with pytest.raises(FormatError) as excinfo:
        import_catalog(store, io.StringIO(body), ImportFormat.CSV)
    assert excinfo.value.details["row"] == 2


def test_json_import(store):
    offers = [
        {"id": "j1", "name": "One", "attack_types": ["Phishing"], "price": "100",
         "leasing_period": "Annual", "mitigation_ratio": 0.4},
        {"id": "j2", "name": "Two", "attack_types": ["Nonsense"], "price": "100",
         "leasing_period": "Annual", "mitigation_ratio": 0.4},
    ]
    result = import_catalog(store, io.StringIO(json.dumps(offers)), ImportFormat.JSON)
    assert result.imported == 1
    assert result.rejected[0].row == 2


def test_unreadable_path():
    store = DocumentStore("/tmp/secplanner-test-store-unreadable")
    with pytest.raises(UnreadableInput):
        import_catalog(store, "/nonexistent/catalog.csv", ImportFormat.CSV)
