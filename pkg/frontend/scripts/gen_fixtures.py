"""Record real service responses into the mock-service fixture bundle.

Replays scripted request sequences against in-process sessions and dumps
the responses, so UI tests compare rendered values against genuine
service payloads. Run from the repository root:

    python3 frontend/scripts/gen_fixtures.py
"""

from __future__ import annotations

import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parents[2]
sys.path.insert(0, str(ROOT / "src"))

from a2.service import ServiceConfig, Session  # noqa: E402

FIXTURES = ROOT / "fixtures"
OUT = ROOT / "frontend" / "test" / "fixtures.json"


def session_for(name: str) -> Session:
    session = Session(ServiceConfig())
    status, body = session.handle(
        "PUT", "/api/case", {"dsl": (FIXTURES / name).read_text(encoding="utf-8")}
    )
    assert status == 200, body
    return session


def ok(session: Session, method: str, path: str, body=None, query=None):
    status, payload = session.handle(method, path, body, query=query or {})
    assert status == 200, (method, path, payload)
    return payload


def scenario_sound() -> dict:
    s = session_for("sound.a2")
    return {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
        "confidence_product": ok(
            s, "GET", "/api/assessment/confidence", query={"method": "product"}
        ),
        "confidence_doubts": ok(
            s, "GET", "/api/assessment/confidence", query={"method": "doubts"}
        ),
        "measures": {
            "ER": ok(s, "GET", "/api/nodes/ER/measures"),
            "EV": ok(s, "GET", "/api/nodes/EV/measures"),
        },
        "risks": ok(s, "GET", "/api/risks"),
    }


def scenario_doubt() -> dict:
    s = session_for("doubt.a2")
    return {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
        "validity_ignore_D1": ok(
            s, "GET", "/api/assessment/validity", query={"ignore": "D1"}
        ),
        "confidence_product_exploratory": ok(
            s,
            "GET",
            "/api/assessment/confidence",
            query={"method": "product", "exploratory": "1"},
        ),
    }


def scenario_exoneration() -> dict:
    # reach it the way the UI does: PATCH the doubt to refuted
    s = session_for("doubt.a2")
    ok(s, "PATCH", "/api/defeaters/D1", {"status": "refuted"})
    return {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
        "confidence_product": ok(
            s, "GET", "/api/assessment/confidence", query={"method": "product"}
        ),
    }


def scenario_eliminative() -> dict:
    s = session_for("eliminative.a2")
    return {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
    }


def scenario_residuals() -> dict:
    s = session_for("residuals.a2")
    return {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
        "risks": ok(s, "GET", "/api/risks"),
    }


def scenario_inconsistent() -> dict:
    s = session_for("inconsistent.a2")
    return {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
        "measures": {"EI": ok(s, "GET", "/api/nodes/EI/measures")},
    }


def scenario_minimal() -> dict:
    s = session_for("minimal.a2")
    out = {
        "case": ok(s, "GET", "/api/case"),
        "validity": ok(s, "GET", "/api/assessment/validity"),
        "measures_before": ok(s, "GET", "/api/nodes/E1/measures"),
    }
    patch = {"prior": "neutral", "posterior": "confident"}
    out["elicit_patch"] = patch
    out["elicit_response"] = ok(s, "PATCH", "/api/nodes/E1/elicitation", patch)
    out["measures_after"] = ok(s, "GET", "/api/nodes/E1/measures")
    out["case_after"] = ok(s, "GET", "/api/case")
    return out


def main() -> None:
    bundle = {
        "scenarios": {
            "sound": scenario_sound(),
            "doubt": scenario_doubt(),
            "exoneration": scenario_exoneration(),
            "eliminative": scenario_eliminative(),
            "residuals": scenario_residuals(),
            "inconsistent": scenario_inconsistent(),
            "minimal": scenario_minimal(),
        }
    }
    OUT.write_text(json.dumps(bundle, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
