"""JSON-over-HTTP service exposing one case session.

The session holds the current graph plus evaluation inputs and a revision
counter that increments on every mutation.  Mutations are serialized by a
lock; reads evaluate against an immutable snapshot, so every evaluation
response reports the revision it was computed against.  Optimistic
concurrency: clients may send ``If-Match: <revision>`` on mutating
requests and get 409 on mismatch.

On every mutation the canonical DSL serialization is written through to
the configured case path, so the case file remains the source of truth
and restarting the service reproduces identical evaluations.

``Session.handle`` is a pure request dispatcher (method, path, body) ->
(status, payload); the stdlib HTTP wrapper only does transport, JSON
decoding, and content-type enforcement.  Error payloads carry
``{"code", "message", "span"?}``.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import re
import threading
from dataclasses import dataclass, field
from typing import Optional

from . import measures as cm
from .caseformat import (
    ELICIT_KEYS,
    LEVEL_NAMES,
    STATUS_NAMES,
    case_to_json_doc,
    parse_case,
    serialize_case,
)
from .confidence import ConfidenceInput, Method, check_overrides, propagate_confidence
from .model import (
    CaseError,
    CaseGraph,
    Defeater,
    DefeaterStatus,
    Evidence,
    Exactness,
    owned_subgraph,
    structural_check,
)
from .report import (
    active_payload,
    assessment_payload,
    confidence_payload,
    measures_payload,
    render_dot,
    risks_payload,
    soundness_payload,
    structural_payload,
)
from .risk import RiskThresholds, categorize, collect_residual_entries, final_gate
from .validity import (
    LeafInputs,
    PreconditionViolated,
    active_defeaters,
    assess_validity,
    soundness_gate,
)

log = logging.getLogger("a2.service")

METHOD_NAMES = {"product": Method.PRODUCT, "doubts": Method.DOUBTS}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, span: Optional[dict] = None):
        self.status = status
        self.code = code
        self.message = message
        self.span = span
        super().__init__(message)

    def payload(self) -> dict:
        out = {"code": self.code, "message": self.message}
        if self.span is not None:
            out["span"] = self.span
        return out


@dataclass
class ServiceConfig:
    case_path: Optional[str] = None
    thresholds: RiskThresholds = field(default_factory=RiskThresholds)
    base: float = cm.DEFAULT_BASE


class Session:
    """One case per service instance; one writer at a time.

    Human concurrence is assumed for every step (dissent is expressed by
    attaching defeaters), matching the interactive workflow; the CLI keeps
    the conservative default instead.
    """

    def __init__(self, config: Optional[ServiceConfig] = None):
        self.config = config or ServiceConfig()
        self.graph: Optional[CaseGraph] = None
        self.revision = 0
        self.leaf_inputs = LeafInputs(concur_all=True)
        self.conf_input = ConfidenceInput()
        self.lock = threading.Lock()
        if self.config.case_path and os.path.exists(self.config.case_path):
            with open(self.config.case_path, encoding="utf-8") as fh:
                text = fh.read()
            result = parse_case(text, filename=self.config.case_path)
            if not result.ok:
                raise CaseError(
                    "cannot load case: " + "; ".join(d.render() for d in result.errors())
                )
            self.graph = result.graph
            self.revision = 1

    # -- state handling ------------------------------------------------

    def _snapshot(self):
        with self.lock:
            return self.graph, self.revision, self.leaf_inputs, self.conf_input

    def _require_graph(self) -> CaseGraph:
        g = self.graph
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded; PUT /api/case first")
        return g

    def _persist(self, g: CaseGraph) -> None:
        path = self.config.case_path
        if not path:
            return
        tmp = path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(serialize_case(g, "dsl"))
        os.replace(tmp, path)

    def _commit(self, g: CaseGraph) -> int:
        self.graph = g
        self.revision += 1
        self._persist(g)
        return self.revision

    @staticmethod
    def _check_revision(if_match, revision: int) -> None:
        if if_match is None:
            return
        try:
            expected = int(if_match)
        except (TypeError, ValueError):
            raise ApiError(400, "bad-if-match", f"If-Match must be a revision number, got {if_match!r}") from None
        if expected != revision:
            raise ApiError(
                409,
                "revision-conflict",
                f"expected revision {expected} but the session is at revision {revision}",
            )

    # -- dispatch --------------------------------------------------------

    ROUTES = (
        ("GET", re.compile(r"/api/case\Z"), "get_case"),
        ("PUT", re.compile(r"/api/case\Z"), "put_case"),
        ("GET", re.compile(r"/api/assessment/validity\Z"), "get_validity"),
        ("GET", re.compile(r"/api/assessment/confidence\Z"), "get_confidence"),
        ("GET", re.compile(r"/api/nodes/(?P<node_id>[^/]+)/measures\Z"), "get_measures"),
        ("PATCH", re.compile(r"/api/nodes/(?P<node_id>[^/]+)/elicitation\Z"), "patch_elicitation"),
        ("PATCH", re.compile(r"/api/nodes/(?P<node_id>[^/]+)/override\Z"), "patch_override"),
        ("PATCH", re.compile(r"/api/defeaters/(?P<node_id>[^/]+)\Z"), "patch_defeater"),
        ("POST", re.compile(r"/api/defeaters\Z"), "post_defeater"),
        ("DELETE", re.compile(r"/api/defeaters/(?P<node_id>[^/]+)\Z"), "delete_defeater"),
        ("GET", re.compile(r"/api/risks\Z"), "get_risks"),
        ("GET", re.compile(r"/api/export/dot\Z"), "export_dot"),
    )

    def handle(
        self,
        method: str,
        path: str,
        body=None,
        *,
        query: Optional[dict] = None,
        if_match=None,
    ):
        """Dispatch one request; returns (status, payload).

        ``payload`` is a JSON-able dict for API routes and a plain string
        for the DOT export.  Never raises for request-level errors.
        """
        query = query or {}
        for route_method, pattern, handler_name in self.ROUTES:
            match = pattern.match(path)
            if match is None:
                continue
            if route_method != method:
                continue
            handler = getattr(self, "_" + handler_name)
            try:
                return handler(body=body, query=query, if_match=if_match, **match.groupdict())
            except ApiError as e:
                return e.status, e.payload()
            except PreconditionViolated as e:
                return 422, {"code": "precondition", "message": str(e)}
            except CaseError as e:
                return 422, {"code": "invalid-case", "message": str(e)}
        if any(pattern.match(path) for _, pattern, _ in self.ROUTES):
            return 405, {"code": "method-not-allowed", "message": f"{method} not allowed on {path}"}
        return 404, {"code": "unknown-endpoint", "message": f"no such endpoint: {method} {path}"}

    # -- case ------------------------------------------------------------

    def _get_case(self, body, query, if_match):
        g, revision, _, _ = self._snapshot()
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded")
        return 200, {"case": case_to_json_doc(g)["case"], "revision": revision}

    def _parse_case_body(self, body) -> CaseGraph:
        if not isinstance(body, dict):
            raise ApiError(400, "malformed-body", "body must be a JSON object")
        if isinstance(body.get("dsl"), str):
            result = parse_case(body["dsl"], format="dsl", filename="<request>")
        elif isinstance(body.get("case"), dict):
            result = parse_case(json.dumps(body), format="json", filename="<request>")
        else:
            raise ApiError(
                400, "malformed-body", "body must carry a 'dsl' string or a 'case' object"
            )
        if not result.ok:
            first = result.errors()[0]
            span = dataclasses.asdict(first.span)
            raise ApiError(422, "invalid-case", first.message, span)
        return result.graph

    def _put_case(self, body, query, if_match):
        with self.lock:
            self._check_revision(if_match, self.revision)
            g = self._parse_case_body(body)
            # drop session inputs that reference nodes gone from the new case
            self.conf_input = ConfidenceInput(
                overrides={k: v for k, v in self.conf_input.overrides.items() if k in g.nodes}
            )
            revision = self._commit(g)
        return 200, {"revision": revision, "nodes": len(g.nodes)}

    # -- assessments -------------------------------------------------------

    def _what_if(self, g: CaseGraph, query) -> CaseGraph:
        ignore = query.get("ignore")
        if not ignore:
            return g
        replacements = {}
        for defeater_id in str(ignore).split(","):
            node = g.nodes.get(defeater_id)
            if not isinstance(node, Defeater):
                raise ApiError(404, "unknown-node", f"no defeater named {defeater_id}")
            replacements[defeater_id] = dataclasses.replace(
                node, status=DefeaterStatus.ADDRESSED
            )
        return g.with_nodes(replacements)

    def _get_validity(self, body, query, if_match):
        g, revision, leaf_inputs, _ = self._snapshot()
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded")
        g = self._what_if(g, query)
        findings = structural_check(g)
        m = None
        active = []
        if not findings:
            m = assess_validity(g, leaf_inputs)
            active = active_defeaters(g, m)
        verdict = soundness_gate(g, m, leaf_inputs, self.config.base)
        payload = {
            "revision": revision,
            "structural_findings": structural_payload(findings),
            "assessment": assessment_payload(m),
            "active_defeaters": active_payload(active),
        }
        payload.update(soundness_payload(verdict))
        return 200, payload

    def _get_confidence(self, body, query, if_match):
        g, revision, leaf_inputs, conf_input = self._snapshot()
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded")
        method_name = str(query.get("method", "product"))
        if method_name not in METHOD_NAMES:
            raise ApiError(
                422, "bad-method", f"method must be 'product' or 'doubts', got {method_name!r}"
            )
        exploratory = str(query.get("exploratory", "")) in ("1", "true", "yes")
        cmap = propagate_confidence(
            g,
            conf_input,
            METHOD_NAMES[method_name],
            exploratory=exploratory,
            leaf_inputs=leaf_inputs,
        )
        payload = confidence_payload(cmap)
        payload["revision"] = revision
        return 200, payload

    def _get_measures(self, body, query, if_match, node_id: str):
        g, revision, _, _ = self._snapshot()
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded")
        node = g.nodes.get(node_id)
        if node is None:
            raise ApiError(404, "unknown-node", f"no node named {node_id}")
        if not isinstance(node, Evidence):
            raise ApiError(422, "not-evidence", f"{node_id} is a {node.node_kind}, not evidence")
        try:
            base = float(query.get("base", self.config.base))
        except ValueError:
            raise ApiError(422, "bad-base", "base must be a number") from None
        if not base > 1.0:
            raise ApiError(422, "bad-base", "base must be > 1")
        if node.elicitation is None or node.elicitation.is_empty():
            payload = measures_payload([], [])
        else:
            payload = measures_payload(
                cm.available_measures(node.elicitation, base),
                cm.cross_check(node.elicitation),
            )
        payload.update({"revision": revision, "node": node_id, "base": base})
        return 200, payload

    # -- mutations ---------------------------------------------------------

    def _patch_elicitation(self, body, query, if_match, node_id: str):
        if not isinstance(body, dict):
            raise ApiError(400, "malformed-body", "body must be a JSON object")
        with self.lock:
            self._check_revision(if_match, self.revision)
            g = self._require_graph()
            node = g.nodes.get(node_id)
            if node is None:
                raise ApiError(404, "unknown-node", f"no node named {node_id}")
            if not isinstance(node, Evidence):
                raise ApiError(
                    422, "not-evidence", f"{node_id} is a {node.node_kind}, not evidence"
                )
            entries = {}
            current = node.elicitation or cm.Elicitation()
            for key in ELICIT_KEYS:
                entries[key] = getattr(current, key)
            for key, value in body.items():
                if key not in ELICIT_KEYS:
                    raise ApiError(
                        422, "bad-elicitation", f"unknown elicitation entry {key!r}"
                    )
                if value is None:
                    entries[key] = None
                elif isinstance(value, str):
                    if value not in LEVEL_NAMES:
                        raise ApiError(
                            422, "bad-elicitation", f"unknown qualitative level {value!r}"
                        )
                    entries[key] = LEVEL_NAMES[value]
                elif isinstance(value, (int, float)) and not isinstance(value, bool):
                    if not 0.0 <= float(value) <= 1.0:
                        raise ApiError(
                            422, "bad-elicitation", f"{key} must lie in [0,1], got {value!r}"
                        )
                    entries[key] = float(value)
                else:
                    raise ApiError(
                        422, "bad-elicitation", f"{key} must be a number, a level name, or null"
                    )
            elicitation = cm.Elicitation(**entries)
            node = dataclasses.replace(
                node, elicitation=None if elicitation.is_empty() else elicitation
            )
            revision = self._commit(g.with_nodes({node_id: node}))
            payload = {
                "revision": revision,
                "node": node_id,
                "elicit": {
                    key: (value.value if isinstance(value, cm.Level) else value)
                    for key, value in elicitation.entries().items()
                },
            }
        return 200, payload

    def _patch_override(self, body, query, if_match, node_id: str):
        if not isinstance(body, dict) or "value" not in body:
            raise ApiError(400, "malformed-body", "body must be an object with a 'value' field")
        value = body["value"]
        with self.lock:
            self._check_revision(if_match, self.revision)
            g = self._require_graph()
            if node_id not in g.nodes:
                raise ApiError(404, "unknown-node", f"no node named {node_id}")
            overrides = dict(self.conf_input.overrides)
            if value is None:
                overrides.pop(node_id, None)
            elif isinstance(value, (int, float)) and not isinstance(value, bool):
                overrides[node_id] = float(value)
            else:
                raise ApiError(422, "bad-override", "'value' must be a number in [0,1] or null")
            candidate = dataclasses.replace(self.conf_input, overrides=overrides)
            if value is not None:
                check_overrides(g, candidate)  # raises PreconditionViolated -> 422
            self.conf_input = candidate
            self.revision += 1
            self._persist(g)
            revision = self.revision
        return 200, {"revision": revision, "node": node_id, "override": value}

    def _patch_defeater(self, body, query, if_match, node_id: str):
        if not isinstance(body, dict):
            raise ApiError(400, "malformed-body", "body must be a JSON object")
        with self.lock:
            self._check_revision(if_match, self.revision)
            g = self._require_graph()
            node = g.nodes.get(node_id)
            if not isinstance(node, Defeater):
                raise ApiError(404, "unknown-node", f"no defeater named {node_id}")
            changes = {}
            for key, value in body.items():
                if key == "status":
                    if not isinstance(value, str) or value not in STATUS_NAMES:
                        raise ApiError(422, "bad-status", f"unknown status {value!r}")
                    changes["status"] = STATUS_NAMES[value]
                elif key == "exactness":
                    if value not in ("exploratory", "exact"):
                        raise ApiError(422, "bad-exactness", f"unknown exactness {value!r}")
                    changes["exactness"] = Exactness(value)
                elif key == "target":
                    if not isinstance(value, str):
                        raise ApiError(422, "bad-target", "'target' must be a node id")
                    changes["target"] = value
                elif key == "claim":
                    if not isinstance(value, str):
                        raise ApiError(422, "bad-claim", "'claim' must be a string")
                    changes["claim_text"] = value
                elif key == "narrative":
                    if not isinstance(value, str):
                        raise ApiError(422, "bad-narrative", "'narrative' must be a string")
                    changes["narrative"] = value
                else:
                    raise ApiError(422, "bad-field", f"unknown defeater field {key!r}")
            node = dataclasses.replace(node, **changes)
            revision = self._commit(g.with_nodes({node_id: node}))
        return 200, {"revision": revision, "defeater": node_id, "status": node.status.value}

    def _post_defeater(self, body, query, if_match):
        if not isinstance(body, dict):
            raise ApiError(400, "malformed-body", "body must be a JSON object")
        target = body.get("targets")
        if not isinstance(target, str):
            raise ApiError(422, "bad-target", "body must carry a 'targets' node id")
        with self.lock:
            self._check_revision(if_match, self.revision)
            g = self._require_graph()
            defeater_id = body.get("id")
            if defeater_id is None:
                k = 1
                while f"D{k}" in g.nodes:
                    k += 1
                defeater_id = f"D{k}"
            if not isinstance(defeater_id, str):
                raise ApiError(422, "bad-id", "'id' must be a string")
            if defeater_id in g.nodes:
                raise ApiError(422, "duplicate-id", f"node {defeater_id} already exists")
            exactness = body.get("exactness", "exploratory")
            if exactness not in ("exploratory", "exact"):
                raise ApiError(422, "bad-exactness", f"unknown exactness {exactness!r}")
            status = body.get("status", "doubt")
            if status not in STATUS_NAMES:
                raise ApiError(422, "bad-status", f"unknown status {status!r}")
            claim_text = body.get("claim", "")
            if not isinstance(claim_text, str):
                raise ApiError(422, "bad-claim", "'claim' must be a string")
            d = Defeater(
                defeater_id,
                target=target,
                claim_text=claim_text,
                exactness=Exactness(exactness),
                status=STATUS_NAMES[status],
            )
            revision = self._commit(g.with_nodes({defeater_id: d}))
        return 200, {"revision": revision, "defeater": defeater_id}

    def _delete_defeater(self, body, query, if_match, node_id: str):
        with self.lock:
            self._check_revision(if_match, self.revision)
            g = self._require_graph()
            node = g.nodes.get(node_id)
            if not isinstance(node, Defeater):
                raise ApiError(404, "unknown-node", f"no defeater named {node_id}")
            keep: set = set()
            if g.top is not None:
                keep |= owned_subgraph(g, g.top)
            for d in g.defeaters():
                if d.id != node_id:
                    keep |= owned_subgraph(g, d.id)
                    keep.add(d.target)
            if node_id in keep:
                raise ApiError(
                    422, "cannot-delete", f"{node_id} is targeted by another defeater"
                )
            removal = (owned_subgraph(g, node_id) | {node_id}) - keep
            try:
                new_graph = g.with_nodes({removed: None for removed in removal})
            except CaseError as e:
                raise ApiError(
                    422,
                    "cannot-delete",
                    f"removing {node_id} leaves the case inconsistent: {e}",
                ) from None
            revision = self._commit(new_graph)
        return 200, {"revision": revision, "removed": sorted(removal)}

    # -- risks and export ----------------------------------------------------

    def _get_risks(self, body, query, if_match):
        g, revision, _, _ = self._snapshot()
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded")
        entries, pending = collect_residual_entries(g)
        result = categorize(entries, self.config.thresholds) if entries else None
        gate = final_gate(entries, self.config.thresholds) if entries else None
        payload = risks_payload(entries, result, gate, pending, self.config.thresholds)
        payload["revision"] = revision
        return 200, payload

    def _export_dot(self, body, query, if_match):
        g, revision, leaf_inputs, conf_input = self._snapshot()
        if g is None:
            raise ApiError(404, "no-case", "no case is loaded")
        m = None
        if not structural_check(g):
            m = assess_validity(g, leaf_inputs)
        cmap = None
        try:
            cmap = propagate_confidence(
                g, conf_input, Method.PRODUCT, exploratory=True, leaf_inputs=leaf_inputs
            )
        except PreconditionViolated:
            cmap = None
        return 200, render_dot(g, m, cmap)


# ---------------------------------------------------------------------------
# HTTP transport
# ---------------------------------------------------------------------------


def serve(session: Session, port: int = 8037, host: str = "127.0.0.1"):
    """Construct the HTTP server; the caller runs serve_forever().
    Port 0 binds an ephemeral port (server.server_address reports it)."""
    from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
    from urllib.parse import parse_qsl, urlsplit

    class Handler(BaseHTTPRequestHandler):
        server_version = "a2"

        def log_message(self, fmt, *args):
            log.debug("%s - %s", self.address_string(), fmt % args)

        def _reply(self, status: int, payload, content_type="application/json"):
            if isinstance(payload, str):
                data = payload.encode("utf-8")
                content_type = "text/vnd.graphviz; charset=utf-8"
            else:
                data = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(data)))
            self._cors()
            self.end_headers()
            self.wfile.write(data)

        def _cors(self):
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, PUT, PATCH, POST, DELETE, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type, If-Match")

        def do_OPTIONS(self):
            self.send_response(204)
            self._cors()
            self.end_headers()

        def _dispatch(self, method: str):
            parts = urlsplit(self.path)
            query = dict(parse_qsl(parts.query))
            body = None
            length = int(self.headers.get("Content-Length") or 0)
            if length:
                content_type = (self.headers.get("Content-Type") or "").split(";")[0].strip()
                if content_type != "application/json":
                    self._reply(
                        400,
                        {
                            "code": "bad-content-type",
                            "message": "request bodies must be application/json",
                        },
                    )
                    return
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError) as e:
                    self._reply(400, {"code": "malformed-body", "message": f"bad JSON: {e}"})
                    return
            status, payload = session.handle(
                method, parts.path, body, query=query, if_match=self.headers.get("If-Match")
            )
            self._reply(status, payload)

        def do_GET(self):
            self._dispatch("GET")

        def do_PUT(self):
            self._dispatch("PUT")

        def do_PATCH(self):
            self._dispatch("PATCH")

        def do_POST(self):
            self._dispatch("POST")

        def do_DELETE(self):
            self._dispatch("DELETE")

    server = ThreadingHTTPServer((host, port), Handler)
    log.info("serving on http://%s:%d", host, server.server_address[1])
    return server
