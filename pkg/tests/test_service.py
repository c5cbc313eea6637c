"""HTTP API: endpoints, auth, error codes, determinism."""

import pytest
from fastapi.testclient import TestClient

from secplanner.config import ServiceConfig
from secplanner.service import create_app
from secplanner.store import CSV_COLUMNS

SEGMENT = {"name": "Customers DB", "type": "Database", "value": "100000",
           "risk": 1.0, "vulnerability": 0.5}

CSV_BODY = "\n".join(
    [
        ",".join(CSV_COLUMNS),
        "p1,Phish Shield,Phishing,EU;US,25000,Annual,0.5,3,30000",
        "p2,Mail Filter,Phishing,US,400,Annual,0.35,2,12000",
    ]
)


@pytest.fixture
def client(tmp_path):
    app = create_app(ServiceConfig(data_dir=tmp_path / "data"))
    return TestClient(app)


@pytest.fixture
def auth_client(tmp_path):
    app = create_app(ServiceConfig(data_dir=tmp_path / "data", token="sesame"))
    return TestClient(app)


def make_profile_with_segments(client, segments=(SEGMENT,)):
    profile = client.post(
        "/profiles", json={"name": "Acme", "sector": "retail", "revenue": "1000000",
                           "employees": 10}
    ).json()
    created = []
    for segment in segments:
        response = client.post(f"/profiles/{profile['id']}/segments", json=segment)
        assert response.status_code == 200, response.text
        created.append(response.json())
    return profile, created


def test_health(client):
    body = client.get("/health").json()
    assert body["status"] == "ok"
    assert body["service"] == "secplanner"


def test_profile_and_segment_flow(client):
    profile, segments = make_profile_with_segments(client)
    listed = client.get(f"/profiles/{profile['id']}/segments").json()
    assert [s["id"] for s in listed] == [segments[0]["id"]]
    fetched = client.get(f"/profiles/{profile['id']}").json()
    assert fetched["payload"]["segments"] == [segments[0]["id"]]


def test_segment_optimal_endpoint(client):
    _, segments = make_profile_with_segments(client)
    response = client.post(f"/segments/{segments[0]['id']}/optimal", json={"tol": 1e-6})
    body = response.json()
    assert body["z_star"] == "2136.07"
    assert body["enbis_at_optimum"] == "45627.86"
    assert body["converged"] is True


def test_plan_endpoint_money_as_decimal_strings(client):
    profile, _ = make_profile_with_segments(
        client,
        segments=(
            dict(SEGMENT, name="hot", vulnerability=0.8),
            dict(SEGMENT, name="cold", vulnerability=0.2),
        ),
    )
    body = client.get(f"/profiles/{profile['id']}/plan", params={"tol": 1e-6}).json()
    assert body["total_enbis"] == "91714.72"
    assert body["aggregate_result"]["enbis_at_optimum"] == "91255.73"
    assert body["segmentation_benefit"] == "458.99"
    assert body["aggregate_v_eff"] == pytest.approx(0.5)


def test_enbis_table_endpoint(client):
    _, segments = make_profile_with_segments(client)
    response = client.post(
        f"/segments/{segments[0]['id']}/enbis-table",
        json={"points": [0, 1000, 2136.07, 5000], "extra_points": [2000]},
    )
    rows = response.json()
    assert [row["z"] for row in rows] == ["0.00", "1000.00", "2000.00", "2136.07", "5000.00"]
    optimal = [row for row in rows if row["is_optimal"]]
    assert len(optimal) == 1 and optimal[0]["z"] == "2136.07"


def test_delete_segment_detaches_from_profile(client):
    profile, segments = make_profile_with_segments(client)
    response = client.delete(f"/segments/{segments[0]['id']}")
    assert response.status_code == 200
    assert client.get(f"/profiles/{profile['id']}").json()["payload"]["segments"] == []


def test_bpf_parse_validate_compare(client):
    parsed = client.post("/bpf/parse", json={"expression": "v / (1 + z / (L * alpha))"}).json()
    assert sorted(parsed["variables"]) == ["L", "alpha", "v", "z"]

    report = client.post("/bpf/validate", json={"expression": "v + z"}).json()
    assert report["passed"] is False
    failed = {c["name"] for c in report["checks"] if not c["passed"]}
    assert {"range", "monotonicity"} <= failed

    comparison = client.post(
        "/bpf/compare",
        json={
            "specs": [
                {"kind": "DefaultGL"},
                {"kind": "WeightedDefault", "weights": {"w_v": 1, "w_z": 2, "w_alpha": 1}},
            ],
            "segment": SEGMENT,
            "grid": [0, 1000, 5000],
        },
    ).json()
    assert len(comparison["rows"]) == 3
    assert len(comparison["z_stars"]) == 2


def test_bpf_parse_error_payload(client):
    response = client.post("/bpf/parse", json={"expression": "v + q"})
    assert response.status_code == 400
    body = response.json()
    assert body["code"] == "unknown_identifier"
    assert body["details"]["position"] == 4


def test_valuation_estimate_endpoint(client):
    body = client.post(
        "/valuation/estimate",
        json={"segment_type": "Database",
              "params": {"sensitive_records": 1000, "anonymized_records": 20000}},
    ).json()
    assert body["total"] == "151000.00"
    assert body["overridden"] is False


def test_rosi_endpoint_reference_values(client):
    body = client.post(
        "/rosi", json={"aro": 3, "sle": 30000, "mitigation": 0.5, "cost": 25000}
    ).json()
    assert body["rosi"] == 0.8
    assert body["cost_effective"] is False
    flipped = client.post(
        "/rosi", json={"aro": 4, "sle": 30000, "mitigation": 0.5, "cost": 25000}
    ).json()
    assert flipped["rosi"] == pytest.approx(1.4)
    assert flipped["cost_effective"] is True


def test_rosi_responses_byte_identical(client):
    payload = {"aro": 3, "sle": 30000, "mitigation": 0.5, "cost": 25000}
    first = client.post("/rosi", json=payload)
    second = client.post("/rosi", json=payload)
    assert first.content == second.content


def test_catalog_import_and_recommendations(client):
    imported = client.post("/catalog/import", json={"format": "CSV", "content": CSV_BODY}).json()
    assert imported == {"imported": 2, "rejected": []}

    body = client.post(
        "/recommendations", json={"attack_type": "Phishing", "budget": 30000}
    ).json()
    ids = [r["offer"]["id"] for r in body["recommendations"]]
    assert set(ids) == {"p1", "p2"}
    p1 = next(r for r in body["recommendations"] if r["offer"]["id"] == "p1")
    assert p1["rosi_report"]["rosi"] == 0.8


def test_recommendations_budget_defaults_to_segment_optimum(client):
    client.post("/catalog/import", json={"format": "CSV", "content": CSV_BODY})
    _, segments = make_profile_with_segments(client)
    body = client.post(
        "/recommendations",
        json={"attack_type": "Phishing", "segment_id": segments[0]["id"]},
    ).json()
    assert body["budget"] == "2136.07"
    # only the cheap filter fits under z*
    assert [r["offer"]["id"] for r in body["recommendations"]] == ["p2"]


def test_malformed_probability_yields_schema_violation(client):
    _, segments = make_profile_with_segments(client)
    response = client.post(
        "/profiles/does-not-matter/segments", json=dict(SEGMENT, risk=1.2)
    )
    assert response.status_code in (400, 404)
    profile, _ = make_profile_with_segments(client)
    response = client.post(
        f"/profiles/{profile['id']}/segments", json=dict(SEGMENT, risk=1.2)
    )
    assert response.status_code == 400
    assert response.json()["code"] == "schema_violation"
    assert "risk" in response.json()["message"]


def test_version_conflict_maps_to_409(client, tmp_path):
    profile, _ = make_profile_with_segments(client)
    # stage a conflict through the store the service uses
    from secplanner.store import DocumentKind, DocumentStore

    store = DocumentStore(tmp_path / "data")
    doc = store.get_document(profile["id"], DocumentKind.PROFILE)
    with pytest.raises(Exception) as excinfo:
        store.put_document(DocumentKind.PROFILE, doc.payload, doc_id=doc.id,
                           expected_version=doc.version - 1)
    assert excinfo.value.code == "version_conflict"


def test_not_found_maps_to_404(client):
    response = client.post("/segments/ghost/optimal", json={})
    assert response.status_code == 404
    assert response.json()["code"] == "not_found"


def test_token_required_when_configured(auth_client):
    assert auth_client.get("/health").status_code == 200  # health stays open
    denied = auth_client.get("/profiles")
    assert denied.status_code == 401
    allowed = auth_client.get("/profiles", headers={"Authorization": "Bearer sesame"})
    assert allowed.status_code == 200


def test_serve_rejects_busy_port(tmp_path):
    import socket

    from secplanner.service import BindFailure, serve

    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as sock:
        sock.bind(("127.0.0.1", 0))
        sock.listen(1)
        port = sock.getsockname()[1]
        with pytest.raises(BindFailure):
            serve(ServiceConfig(port=port, data_dir=tmp_path / "data"))


def test_serve_rejects_unwritable_data_dir(tmp_path):
    from secplanner.service import DataDirUnwritable, serve

    blocker = tmp_path / "blocker"
    blocker.write_text("a file, not a directory")
    with pytest.raises(DataDirUnwritable):
        serve(ServiceConfig(port=1, data_dir=blocker / "nested"))
