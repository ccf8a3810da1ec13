"""Service session: endpoints, revisions, errors, persistence, HTTP."""

from __future__ import annotations

import json
import threading
import urllib.request

from a2.service import ServiceConfig, Session, serve

from conftest import FIXTURES


def dsl(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def fresh(case: str = "sound.a2", **config) -> Session:
    session = Session(ServiceConfig(**config))
    status, body = session.handle("PUT", "/api/case", {"dsl": dsl(case)})
    assert status == 200, body
    return session


def test_put_case_revision_one():
    session = Session()
    status, body = session.handle("PUT", "/api/case", {"dsl": dsl("minimal.a2")})
    assert status == 200
    assert body["revision"] == 1


def test_get_case_round_trips_nodes():
    session = fresh("sound.a2")
    status, body = session.handle("GET", "/api/case")
    assert status == 200
    assert body["revision"] == 1
    assert body["case"]["top"] == "TC"
    assert {n["id"] for n in body["case"]["nodes"]} == set(session.graph.nodes)


def test_no_case_is_404():
    session = Session()
    for path in ("/api/case", "/api/assessment/validity", "/api/risks", "/api/export/dot"):
        status, body = session.handle("GET", path)
        assert status == 404 and body["code"] == "no-case"


def test_unknown_endpoint_404_and_wrong_method_405():
    session = fresh()
    assert session.handle("GET", "/api/bogus")[0] == 404
    assert session.handle("DELETE", "/api/case")[0] == 405


def test_invalid_case_body_is_422_with_span():
    session = Session()
    status, body = session.handle("PUT", "/api/case", {"dsl": 'case "X" { claim }'})
    assert status == 422
    assert body["code"] == "invalid-case"
    assert body["span"]["line"] == 1
    status, body = session.handle("PUT", "/api/case", {"nope": 1})
    assert status == 400


def test_validity_endpoint_sound_fixture():
    session = fresh("sound.a2")
    status, body = session.handle("GET", "/api/assessment/validity")
    assert status == 200
    assert body["revision"] == 1
    assert body["soundness"] == "sound"
    assert body["assessment"]["values"]["TC"] == "TRUE"
    assert body["active_defeaters"] == []


def test_defeater_lifecycle_with_exoneration_via_api():
    session = fresh("sound.a2")
    status, body = session.handle(
        "POST", "/api/defeaters", {"id": "D1", "targets": "SUBR", "claim": "review is stale"}
    )
    assert status == 200 and body["revision"] == 2

    status, body = session.handle("GET", "/api/assessment/validity")
    assert body["assessment"]["values"]["RC"] == "UNSUPPORTED"
    assert body["assessment"]["causes"]["RC"] == "from-defeater(D1)"
    assert [a["defeater"] for a in body["active_defeaters"]] == ["D1"]
    assert body["soundness"] == "not-sound"

    status, body = session.handle("PATCH", "/api/defeaters/D1", {"status": "refuted"})
    assert status == 200 and body["revision"] == 3

    status, body = session.handle("GET", "/api/assessment/validity")
    assert body["assessment"]["values"]["RC"] == "TRUE"
    assert body["assessment"]["causes"]["RC"] == "exonerated(D1)"
    assert body["active_defeaters"] == []
    assert body["soundness"] == "sound"

    status, body = session.handle("DELETE", "/api/defeaters/D1")
    assert status == 200 and body["revision"] == 4
    assert "D1" not in session.graph.nodes


def test_what_if_ignore_is_pure():
    session = fresh("doubt.a2")
    status, body = session.handle("GET", "/api/assessment/validity", query={"ignore": "D1"})
    assert status == 200
    assert body["assessment"]["values"]["RC"] == "TRUE"  # preview without the doubt
    # nothing mutated
    status, body = session.handle("GET", "/api/assessment/validity")
    assert body["revision"] == 1
    assert body["assessment"]["values"]["RC"] == "UNSUPPORTED"
    status, body = session.handle("GET", "/api/assessment/validity", query={"ignore": "zz"})
    assert status == 404


def test_elicitation_patch_then_measures():
    session = fresh("minimal.a2")
    status, body = session.handle(
        "PATCH",
        "/api/nodes/E1/elicitation",
        {"prior": "neutral", "posterior": "confident"},
    )
    assert status == 200
    assert body["elicit"] == {"prior": "neutral", "posterior": "confident"}
    status, body = session.handle("GET", "/api/nodes/E1/measures", query={"base": "10"})
    assert status == 200
    keynes = [m for m in body["measures"] if m["measure"] == "keynes"][0]
    assert abs(keynes["value"] - 0.2552725051) < 1e-6
    assert body["revision"] == 2


def test_elicitation_validation():
    session = fresh("minimal.a2")
    assert session.handle("PATCH", "/api/nodes/E1/elicitation", {"prior": "sortof"})[0] == 422
    assert session.handle("PATCH", "/api/nodes/E1/elicitation", {"prior": 1.5})[0] == 422
    assert session.handle("PATCH", "/api/nodes/E1/elicitation", {"bogus": 0.5})[0] == 422
    assert session.handle("PATCH", "/api/nodes/zz/elicitation", {"prior": 0.5})[0] == 404
    assert session.handle("PATCH", "/api/nodes/TC/elicitation", {"prior": 0.5})[0] == 422


def test_measures_endpoint_errors():
    session = fresh("sound.a2")
    assert session.handle("GET", "/api/nodes/zz/measures")[0] == 404
    assert session.handle("GET", "/api/nodes/TC/measures")[0] == 422
    assert session.handle("GET", "/api/nodes/ER/measures", query={"base": "1"})[0] == 422


def test_confidence_endpoint():
    session = fresh("sound.a2")
    status, body = session.handle("GET", "/api/assessment/confidence", query={"method": "product"})
    assert status == 200
    assert abs(body["values"]["TC"] - 0.6615) < 1e-9
    status, body = session.handle("GET", "/api/assessment/confidence", query={"method": "doubts"})
    assert abs(body["values"]["TC"] - 0.63) < 1e-9
    assert session.handle("GET", "/api/assessment/confidence", query={"method": "x"})[0] == 422


def test_confidence_unsound_requires_exploratory():
    session = fresh("doubt.a2")
    status, body = session.handle("GET", "/api/assessment/confidence", query={"method": "product"})
    assert status == 422
    status, body = session.handle(
        "GET", "/api/assessment/confidence", query={"method": "product", "exploratory": "1"}
    )
    assert status == 200


def test_override_patch():
    session = fresh("sound.a2")
    status, body = session.handle("PATCH", "/api/nodes/RC/override", {"value": 0.5})
    assert status == 200 and body["revision"] == 2
    status, body = session.handle("GET", "/api/assessment/confidence", query={"method": "product"})
    assert body["provenance"]["RC"] == "overridden"
    assert abs(body["values"]["TC"] - 0.98 * 0.5 * 0.75) < 1e-9
    # clearing restores propagation
    session.handle("PATCH", "/api/nodes/RC/override", {"value": None})
    status, body = session.handle("GET", "/api/assessment/confidence", query={"method": "product"})
    assert body["provenance"]["RC"] == "propagated"
    # leaves cannot be overridden
    assert session.handle("PATCH", "/api/nodes/ER/override", {"value": 0.5})[0] == 422
    assert session.handle("PATCH", "/api/nodes/zz/override", {"value": 0.5})[0] == 404


def test_revision_conflict_409():
    session = fresh("sound.a2")
    status, _ = session.handle(
        "POST", "/api/defeaters", {"targets": "SUBR"}, if_match="1"
    )
    assert status == 200
    status, body = session.handle(
        "POST", "/api/defeaters", {"targets": "SUBI"}, if_match="1"
    )
    assert status == 409 and body["code"] == "revision-conflict"
    assert session.handle("POST", "/api/defeaters", {"targets": "SUBI"}, if_match="x")[0] == 400


def test_defeater_validation():
    session = fresh("sound.a2")
    assert session.handle("POST", "/api/defeaters", {})[0] == 422
    assert session.handle("POST", "/api/defeaters", {"targets": "zz"})[0] == 422
    assert session.handle("PATCH", "/api/defeaters/zz", {"status": "doubt"})[0] == 404
    assert session.handle("PATCH", "/api/defeaters/SUBR", {"status": "doubt"})[0] == 404
    session.handle("POST", "/api/defeaters", {"id": "D1", "targets": "SUBR"})
    assert session.handle("PATCH", "/api/defeaters/D1", {"status": "zz"})[0] == 422
    assert session.handle("POST", "/api/defeaters", {"id": "D1", "targets": "SUBI"})[0] == 422


def test_risks_endpoint():
    session = fresh("residuals.a2")
    status, body = session.handle("GET", "/api/risks")
    assert status == 200
    assert body["gate"]["acceptable"] is True
    assert len(body["entries"]) == 10
    assert body["classes"]["review"]["manageable"] is True


def test_export_dot_endpoint():
    session = fresh("minimal.a2")
    status, text = session.handle("GET", "/api/export/dot")
    assert status == 200
    assert isinstance(text, str) and text.startswith("digraph case {")


def test_reads_are_idempotent():
    session = fresh("sound.a2")
    a = session.handle("GET", "/api/assessment/validity")
    b = session.handle("GET", "/api/assessment/validity")
    assert a == b
    assert session.revision == 1


def test_write_through_persistence_and_restart(tmp_path):
    path = tmp_path / "case.a2"
    path.write_text(dsl("sound.a2"), encoding="utf-8")
    session = Session(ServiceConfig(case_path=str(path)))
    assert session.revision == 1
    session.handle("POST", "/api/defeaters", {"id": "D9", "targets": "SUBR"})
    assert "D9" in path.read_text()

    before = session.handle("GET", "/api/assessment/validity")[1]
    restarted = Session(ServiceConfig(case_path=str(path)))
    after = restarted.handle("GET", "/api/assessment/validity")[1]
    assert before["assessment"] == after["assessment"]
    assert before["soundness"] == after["soundness"]


def test_mutations_are_linearized():
    session = fresh("sound.a2")
    errors = []

    def add(k):
        for i in range(10):
            status, _ = session.handle(
                "POST", "/api/defeaters", {"id": f"T{k}_{i}", "targets": "SUBR"}
            )
            if status != 200:
                errors.append(status)

    threads = [threading.Thread(target=add, args=(k,)) for k in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert session.revision == 41  # 1 + 40 mutations, each applied exactly once
    assert len([d for d in session.graph.defeaters()]) == 40


def test_http_round_trip():
    session = Session()
    server = serve(session, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        host, port = server.server_address[:2]
        base = f"http://{host}:{port}"

        def call(method, path, payload=None, headers=None):
            data = None if payload is None else json.dumps(payload).encode()
            req = urllib.request.Request(base + path, data=data, method=method)
            if data is not None:
                req.add_header("Content-Type", "application/json")
            for k, v in (headers or {}).items():
                req.add_header(k, v)
            try:
                with urllib.request.urlopen(req) as resp:
                    return resp.status, resp.read().decode()
            except urllib.error.HTTPError as e:
                return e.code, e.read().decode()

        status, body = call("PUT", "/api/case", {"dsl": dsl("sound.a2")})
        assert status == 200 and json.loads(body)["revision"] == 1
        status, body = call("GET", "/api/assessment/validity")
        assert status == 200 and json.loads(body)["soundness"] == "sound"
        status, body = call("GET", "/api/export/dot")
        assert status == 200 and body.startswith("digraph")
        # content-type enforcement
        data = json.dumps({"dsl": dsl("minimal.a2")}).encode()
        req = urllib.request.Request(base + "/api/case", data=data, method="PUT")
        req.add_header("Content-Type", "text/plain")
        try:
            with urllib.request.urlopen(req) as resp:
                status = resp.status
        except urllib.error.HTTPError as e:
            status = e.code
        assert status == 400
        # stale If-Match over HTTP
        status, body = call(
            "POST", "/api/defeaters", {"targets": "SUBR"}, headers={"If-Match": "99"}
        )
        assert status == 409
    finally:
        server.shutdown()
        server.server_close()
