"""Case DSL and JSON interchange: parsing with diagnostics, serialization.

The DSL is whitespace-insensitive, one ``case`` per file, ``//`` comments
to end of line:

    case "Title" {
      claim TC "the system is safe" top
      assumption W "operators follow procedure" prob 0.95
      residual R1 "sensor model is simplified" likelihood 0.01 consequence 0.1 class "modeling"
      evidence E1 {
        description "unit test campaign";
        assembly "artifacts/e1";
        posterior 0.9;
        accepted true;
        elicit { prior neutral; posterior confident; }
      }
      block decomposition B0 { parent TC; side W; sub S1, S2; justification "split over components"; }
      block incorporation B1 { parent S1; sub E1; justification "tests cover the requirements"; }
      defeater D1 exploratory { targets B0; claim "the split may overlap"; status doubt; }
      subcase SC1 "compiler is trustworthy" external "cases/compiler.a2" assessed true
    }

Parsing is total: malformed input yields error diagnostics (with source
spans), never an exception, and never a graph that violates the model's
invariants.  Serialization is deterministic (nodes sorted by id) and
round-trips: parse(serialize(g)) is isomorphic to g, with qualitative
elicitation levels kept as level names, never numbers.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from typing import Optional

from . import model
from .measures import Elicitation, Level
from .model import (
    Assessment,
    Block,
    BlockKind,
    CaseError,
    CaseGraph,
    Claim,
    Defeater,
    DefeaterStatus,
    Evidence,
    Exactness,
    Mode,
    Node,
    Role,
    Subcase,
    build_graph,
    structural_check,
)

ITEM_KEYWORDS = ("claim", "assumption", "residual", "evidence", "block", "defeater", "subcase")
BLOCK_KINDS = {
    "decomposition": BlockKind.DECOMPOSITION,
    "substitution": BlockKind.SUBSTITUTION,
    "concretion": BlockKind.CONCRETION,
    "calculation": BlockKind.CALCULATION,
    "incorporation": BlockKind.INCORPORATION,
}
KIND_KEYWORDS = {v: k for k, v in BLOCK_KINDS.items()}
ELICIT_KEYS = ("prior", "posterior", "likelihood", "likelihood_not", "marginal")
LEVEL_NAMES = {level.value: level for level in Level}
STATUS_NAMES = {status.value: status for status in DefeaterStatus}
ASSESSED_NAMES = {
    "true": Assessment.TRUE,
    "false": Assessment.FALSE,
    "unsupported": Assessment.UNSUPPORTED,
}
ASSESSED_KEYWORDS = {v: k for k, v in ASSESSED_NAMES.items()}


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int  # 1-based
    column: int  # 1-based
    length: int


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str  # "error" | "warning"
    message: str
    span: SourceSpan

    def render(self) -> str:
        s = self.span
        return f"{s.file}:{s.line}:{s.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class ParseResult:
    graph: Optional[CaseGraph]
    diagnostics: list

    @property
    def ok(self) -> bool:
        return self.graph is not None

    def errors(self) -> list:
        return [d for d in self.diagnostics if d.severity == "error"]


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # ID NUM STRING LBRACE RBRACE SEMI COMMA EOF
    value: str
    line: int
    column: int

    @property
    def length(self) -> int:
        return max(1, len(self.value))


class _LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        self.message, self.line, self.column = message, line, column
        super().__init__(message)


_PUNCT = {"{": "LBRACE", "}": "RBRACE", ";": "SEMI", ",": "COMMA"}


def _tokenize(text: str) -> list:
    tokens: list[_Token] = []
    line, col, i, n = 1, 1, 0, len(text)

    def advance(k: int = 1):
        nonlocal i, line, col
        for _ in range(k):
            if i < n and text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance()
            continue
        if ch == "/" and text[i : i + 2] == "//":
            while i < n and text[i] != "\n":
                advance()
            continue
        if ch in _PUNCT:
            tokens.append(_Token(_PUNCT[ch], ch, line, col))
            advance()
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance()
            out = []
            while True:
                if i >= n or text[i] == "\n":
                    raise _LexError("unterminated string literal", start_line, start_col)
                c = text[i]
                if c == '"':
                    advance()
                    break
                if c == "\\":
                    advance()
                    if i >= n:
                        raise _LexError("unterminated string escape", line, col)
                    esc = text[i]
                    out.append({"n": "\n", "t": "\t", "r": "\r"}.get(esc, esc))
                    advance()
                else:
                    out.append(c)
                    advance()
            tokens.append(_Token("STRING", "".join(out), start_line, start_col))
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and text[i + 1].isdigit()):
            start_line, start_col, start = line, col, i
            while i < n and (text[i].isdigit() or text[i] in ".eE+-"):
                if text[i] in "+-" and text[i - 1] not in "eE":
                    break
                advance()
            tokens.append(_Token("NUM", text[start:i], start_line, start_col))
            continue
        if ch.isalpha() or ch == "_":
            start_line, start_col, start = line, col, i
            while i < n and (text[i].isalnum() or text[i] in "_.-"):
                advance()
            tokens.append(_Token("ID", text[start:i], start_line, start_col))
            continue
        raise _LexError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# DSL parser
# ---------------------------------------------------------------------------


class _ParseError(Exception):
    def __init__(self, message: str, token: _Token):
        self.message = message
        self.token = token
        super().__init__(message)


class _Parser:
    def __init__(self, tokens: list, filename: str):
        self.tokens = tokens
        self.pos = 0
        self.filename = filename
        self.diagnostics: list[ParseDiagnostic] = []
        self.decls: list[Node] = []
        self.spans: dict[str, SourceSpan] = {}
        self.title = ""

    # -- token plumbing ----------------------------------------------------

    def span_of(self, token: _Token) -> SourceSpan:
        return SourceSpan(self.filename, token.line, token.column, token.length)

    def error_at(self, message: str, token: _Token) -> None:
        self.diagnostics.append(ParseDiagnostic("error", message, self.span_of(token)))

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        t = self.tokens[self.pos]
        if t.kind != "EOF":
            self.pos += 1
        return t

    def expect(self, kind: str, what: str) -> _Token:
        t = self.peek()
        if t.kind != kind:
            got = repr(t.value) if t.value else "end of input"
            raise _ParseError(f"expected {what}, got {got}", t)
        return self.advance()

    def keyword(self, word: str) -> _Token:
        t = self.peek()
        if t.kind != "ID" or t.value != word:
            got = repr(t.value) if t.value else "end of input"
            raise _ParseError(f"expected '{word}', got {got}", t)
        return self.advance()

    def at_word(self, *words: str) -> bool:
        t = self.peek()
        return t.kind == "ID" and t.value in words

    def semi(self) -> None:
        self.expect("SEMI", "';'")
        while self.peek().kind == "SEMI":
            self.advance()

    def num(self, what: str) -> float:
        t = self.expect("NUM", what)
        try:
            return float(t.value)
        except ValueError:
            raise _ParseError(f"malformed number {t.value!r}", t) from None

    def boolean(self, what: str) -> bool:
        t = self.expect("ID", what)
        if t.value == "true":
            return True
        if t.value == "false":
            return False
        raise _ParseError(f"expected 'true' or 'false', got {t.value!r}", t)

    # -- grammar -----------------------------------------------------------

    def parse(self) -> None:
        try:
            self.keyword("case")
            self.title = self.expect("STRING", "case title").value
            self.expect("LBRACE", "'{'")
        except _ParseError as e:
            self.error_at(e.message, e.token)
            return
        while True:
            t = self.peek()
            if t.kind == "RBRACE":
                self.advance()
                break
            if t.kind == "EOF":
                self.error_at("unexpected end of input: missing '}'", t)
                break
            start = self.pos
            try:
                self.parse_item()
            except _ParseError as e:
                self.error_at(e.message, e.token)
                if self.pos == start:
                    self.advance()
                self.recover()
        t = self.peek()
        if t.kind != "EOF":
            self.error_at("unexpected content after the case body", t)

    def recover(self) -> None:
        depth = 0
        while True:
            t = self.peek()
            if t.kind == "EOF":
                return
            if depth == 0 and (t.kind == "RBRACE" or (t.kind == "ID" and t.value in ITEM_KEYWORDS)):
                return
            if t.kind == "LBRACE":
                depth += 1
            elif t.kind == "RBRACE":
                depth -= 1
            self.advance()

    def declare(self, node: Node, id_token: _Token) -> None:
        self.decls.append(node)
        self.spans[node.id] = self.span_of(id_token)

    def parse_item(self) -> None:
        t = self.expect("ID", "an item (claim, assumption, residual, evidence, block, defeater, subcase)")
        handler = {
            "claim": self.parse_claim,
            "assumption": self.parse_assumption,
            "residual": self.parse_residual,
            "evidence": self.parse_evidence,
            "block": self.parse_block,
            "defeater": self.parse_defeater,
            "subcase": self.parse_subcase,
        }.get(t.value)
        if handler is None:
            raise _ParseError(f"unknown item {t.value!r}", t)
        handler()

    def parse_claim(self) -> None:
        id_tok = self.expect("ID", "claim id")
        text = self.expect("STRING", "claim text").value
        role = Role.ORDINARY
        justification = None
        while self.at_word("top", "justification"):
            opt = self.advance()
            if opt.value == "top":
                if role is Role.TOP:
                    raise _ParseError("duplicate 'top' marker", opt)
                role = Role.TOP
            else:
                if justification is not None:
                    raise _ParseError("duplicate 'justification'", opt)
                justification = self.expect("STRING", "justification text").value
        self.declare(Claim(id_tok.value, text, role=role, justification=justification), id_tok)

    def parse_assumption(self) -> None:
        id_tok = self.expect("ID", "assumption id")
        text = self.expect("STRING", "assumption text").value
        self.keyword("prob")
        prob = self.num("probability")
        justification = None
        if self.at_word("justification"):
            self.advance()
            justification = self.expect("STRING", "justification text").value
        self.declare(
            Claim(id_tok.value, text, role=Role.ASSUMPTION, assumed_prob=prob, justification=justification),
            id_tok,
        )

    def parse_residual(self) -> None:
        id_tok = self.expect("ID", "residual id")
        text = self.expect("STRING", "residual text").value
        self.keyword("likelihood")
        likelihood = self.num("likelihood")
        self.keyword("consequence")
        consequence = self.num("consequence")
        class_label = None
        if self.at_word("class"):
            self.advance()
            class_label = self.expect("STRING", "class label").value
        self.declare(
            Claim(
                id_tok.value,
                text,
                role=Role.RESIDUAL,
                likelihood=likelihood,
                consequence=consequence,
                class_label=class_label,
            ),
            id_tok,
        )

    def parse_evidence(self) -> None:
        id_tok = self.expect("ID", "evidence id")
        self.expect("LBRACE", "'{'")
        description = None
        assembly = None
        posterior = None
        accepted = False
        elicitation = None
        seen: set[str] = set()
        while self.peek().kind != "RBRACE":
            key_tok = self.expect("ID", "evidence field")
            key = key_tok.value
            if key in seen:
                raise _ParseError(f"duplicate evidence field {key!r}", key_tok)
            seen.add(key)
            if key == "description":
                description = self.expect("STRING", "description text").value
                self.semi()
            elif key == "assembly":
                assembly = self.expect("STRING", "assembly reference").value
                self.semi()
            elif key == "posterior":
                posterior = self.num("posterior probability")
                self.semi()
            elif key == "accepted":
                accepted = self.boolean("acceptance flag")
                self.semi()
            elif key == "elicit":
                elicitation = self.parse_elicit()
            else:
                raise _ParseError(f"unknown evidence field {key!r}", key_tok)
        self.expect("RBRACE", "'}'")
        if description is None:
            raise _ParseError(f"evidence {id_tok.value} is missing its description", id_tok)
        if assembly is None:
            raise _ParseError(f"evidence {id_tok.value} is missing its assembly reference", id_tok)
        self.declare(
            Evidence(
                id_tok.value,
                description,
                assembly,
                accepted=accepted,
                posterior_useful=posterior,
                elicitation=elicitation,
            ),
            id_tok,
        )

    def parse_elicit(self) -> Elicitation:
        self.expect("LBRACE", "'{'")
        entries: dict[str, object] = {}
        while self.peek().kind != "RBRACE":
            key_tok = self.expect("ID", "elicitation entry")
            key = key_tok.value
            if key not in ELICIT_KEYS:
                raise _ParseError(f"unknown elicitation entry {key!r}", key_tok)
            if key in entries:
                raise _ParseError(f"duplicate elicitation entry {key!r}", key_tok)
            t = self.peek()
            if t.kind == "NUM":
                entries[key] = self.num("probability")
            elif t.kind == "ID" and t.value in LEVEL_NAMES:
                entries[key] = LEVEL_NAMES[self.advance().value]
            else:
                raise _ParseError("expected a probability or a qualitative level", t)
            while self.peek().kind == "SEMI":
                self.advance()
        self.expect("RBRACE", "'}'")
        while self.peek().kind == "SEMI":
            self.advance()
        return Elicitation(**entries)  # type: ignore[arg-type]

    def parse_block(self) -> None:
        kind_tok = self.expect("ID", "block kind")
        if kind_tok.value not in BLOCK_KINDS:
            raise _ParseError(
                f"unknown block kind {kind_tok.value!r}; expected one of "
                + ", ".join(sorted(BLOCK_KINDS)),
                kind_tok,
            )
        kind = BLOCK_KINDS[kind_tok.value]
        id_tok = self.expect("ID", "block id")
        self.expect("LBRACE", "'{'")
        parent = None
        mode = Mode.CONJUNCTIVE
        side = None
        subs: Optional[list[str]] = None
        justification = None
        seen: set[str] = set()
        while self.peek().kind != "RBRACE":
            key_tok = self.expect("ID", "block field")
            key = key_tok.value
            if key in seen:
                raise _ParseError(f"duplicate block field {key!r}", key_tok)
            seen.add(key)
            if key == "parent":
                parent = self.expect("ID", "parent id").value
                self.semi()
            elif key == "mode":
                mode_tok = self.expect("ID", "'conjunctive' or 'disjunctive'")
                if mode_tok.value not in ("conjunctive", "disjunctive"):
                    raise _ParseError(f"unknown mode {mode_tok.value!r}", mode_tok)
                mode = Mode(mode_tok.value)
                self.semi()
            elif key == "side":
                side = self.expect("ID", "side-claim id").value
                self.semi()
            elif key == "sub":
                subs = [self.expect("ID", "subclaim id").value]
                while self.peek().kind == "COMMA":
                    self.advance()
                    subs.append(self.expect("ID", "subclaim id").value)
                self.semi()
            elif key == "justification":
                justification = self.expect("STRING", "justification text").value
                self.semi()
            else:
                raise _ParseError(f"unknown block field {key!r}", key_tok)
        self.expect("RBRACE", "'}'")
        if parent is None:
            raise _ParseError(f"block {id_tok.value} is missing its parent", id_tok)
        if subs is None:
            raise _ParseError(f"block {id_tok.value} is missing its subclaims", id_tok)
        if justification is None:
            raise _ParseError(f"block {id_tok.value} is missing its justification", id_tok)
        self.declare(
            Block(
                id_tok.value,
                kind,
                parent,
                tuple(subs),
                mode=mode,
                sideclaim=side,
                justification=justification,
            ),
            id_tok,
        )

    def parse_defeater(self) -> None:
        id_tok = self.expect("ID", "defeater id")
        exact_tok = self.expect("ID", "'exploratory' or 'exact'")
        if exact_tok.value not in ("exploratory", "exact"):
            raise _ParseError(f"expected 'exploratory' or 'exact', got {exact_tok.value!r}", exact_tok)
        exactness = Exactness(exact_tok.value)
        self.expect("LBRACE", "'{'")
        target = None
        claim_text = ""
        status = DefeaterStatus.DOUBT
        narrative = ""
        seen: set[str] = set()
        while self.peek().kind != "RBRACE":
            key_tok = self.expect("ID", "defeater field")
            key = key_tok.value
            if key in seen:
                raise _ParseError(f"duplicate defeater field {key!r}", key_tok)
            seen.add(key)
            if key == "targets":
                target = self.expect("ID", "target id").value
                self.semi()
            elif key == "claim":
                claim_text = self.expect("STRING", "defeater claim text").value
                self.semi()
            elif key == "status":
                status_tok = self.expect("ID", "defeater status")
                if status_tok.value not in STATUS_NAMES:
                    raise _ParseError(f"unknown status {status_tok.value!r}", status_tok)
                status = STATUS_NAMES[status_tok.value]
                self.semi()
            elif key == "narrative":
                narrative = self.expect("STRING", "narrative text").value
                self.semi()
            else:
                raise _ParseError(f"unknown defeater field {key!r}", key_tok)
        self.expect("RBRACE", "'}'")
        if target is None:
            raise _ParseError(f"defeater {id_tok.value} is missing its target", id_tok)
        self.declare(
            Defeater(
                id_tok.value,
                target=target,
                claim_text=claim_text,
                exactness=exactness,
                status=status,
                narrative=narrative,
            ),
            id_tok,
        )

    def parse_subcase(self) -> None:
        id_tok = self.expect("ID", "subcase id")
        text = self.expect("STRING", "subcase top-claim text").value
        external = None
        assessed = None
        while self.at_word("external", "assessed"):
            opt = self.advance()
            if opt.value == "external":
                if external is not None:
                    raise _ParseError("duplicate 'external'", opt)
                external = self.expect("STRING", "external locator").value
            else:
                if assessed is not None:
                    raise _ParseError("duplicate 'assessed'", opt)
                val_tok = self.expect("ID", "'true', 'false', or 'unsupported'")
                if val_tok.value not in ASSESSED_NAMES:
                    raise _ParseError(f"unknown assessment {val_tok.value!r}", val_tok)
                assessed = ASSESSED_NAMES[val_tok.value]
        self.declare(
            Subcase(id_tok.value, text, external_locator=external, assessed=assessed), id_tok
        )


# ---------------------------------------------------------------------------
# graph construction shared by both formats
# ---------------------------------------------------------------------------


def _build_result(
    decls: list,
    title: str,
    spans: dict,
    diagnostics: list,
    filename: str,
) -> ParseResult:
    default_span = SourceSpan(filename, 1, 1, 1)

    def span_for(node_id) -> SourceSpan:
        return spans.get(node_id, default_span)

    def err(message: str, node_id=None) -> None:
        diagnostics.append(ParseDiagnostic("error", message, span_for(node_id)))

    if any(d.severity == "error" for d in diagnostics):
        return ParseResult(None, diagnostics)
    if not decls:
        err("case has no nodes")
        return ParseResult(None, diagnostics)

    try:
        g = build_graph(decls, title=title)
    except model.DuplicateId as e:
        err(str(e), e.node_id)
        return ParseResult(None, diagnostics)
    except model.DanglingReference as e:
        err(str(e), e.referrer)
        return ParseResult(None, diagnostics)
    except model.CycleDetected as e:
        err(str(e), e.path[0] if e.path else None)
        return ParseResult(None, diagnostics)
    except model.InvalidNode as e:
        err(str(e), e.node_id)
        return ParseResult(None, diagnostics)
    except CaseError as e:
        err(str(e))
        return ParseResult(None, diagnostics)

    for finding in structural_check(g):
        severity = "error" if finding.blocking else "warning"
        diagnostics.append(ParseDiagnostic(severity, finding.message, span_for(finding.node)))
    if any(d.severity == "error" for d in diagnostics):
        return ParseResult(None, diagnostics)
    return ParseResult(g, diagnostics)


def parse_case(text: str, format: str = "dsl", filename: str = "<case>") -> ParseResult:
    """Parse a case document into a CaseGraph, or into error diagnostics.

    Never raises on malformed input.  A returned graph always satisfies
    build_graph and the blocking structural invariants; incompleteness
    (e.g. unsupported leaves) surfaces as warnings.
    """
    if format == "json":
        return _parse_json(text, filename)
    if format != "dsl":
        raise ValueError(f"unknown case format {format!r}; expected 'dsl' or 'json'")
    try:
        tokens = _tokenize(text)
    except _LexError as e:
        span = SourceSpan(filename, e.line, e.column, 1)
        return ParseResult(None, [ParseDiagnostic("error", e.message, span)])
    parser = _Parser(tokens, filename)
    parser.parse()
    return _build_result(parser.decls, parser.title, parser.spans, parser.diagnostics, filename)


def detect_format(text: str) -> str:
    """Guess dsl vs json from the first non-space character."""
    for ch in text:
        if not ch.isspace():
            return "json" if ch == "{" else "dsl"
    return "dsl"


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


class _JsonError(ValueError):
    pass


def _jget(obj: dict, key: str, types, required: bool = False, where: str = ""):
    if key not in obj:
        if required:
            raise _JsonError(f"{where}: missing required field {key!r}")
        return None
    value = obj[key]
    allowed = types if isinstance(types, tuple) else (types,)
    if not isinstance(value, allowed) or (isinstance(value, bool) and bool not in allowed):
        raise _JsonError(f"{where}: field {key!r} has the wrong type")
    return value


def _jnum(obj: dict, key: str, required: bool = False, where: str = "") -> Optional[float]:
    value = _jget(obj, key, (int, float), required, where)
    return None if value is None else float(value)


def _check_keys(obj: dict, allowed: tuple, where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise _JsonError(f"{where}: unknown field(s) {', '.join(unknown)}")


def _elicit_from_json(obj: dict, where: str) -> Elicitation:
    _check_keys(obj, ELICIT_KEYS, where)
    entries: dict[str, object] = {}
    for key, value in obj.items():
        if isinstance(value, str):
            if value not in LEVEL_NAMES:
                raise _JsonError(f"{where}: unknown qualitative level {value!r}")
            entries[key] = LEVEL_NAMES[value]
        elif isinstance(value, (int, float)) and not isinstance(value, bool):
            entries[key] = float(value)
        else:
            raise _JsonError(f"{where}: entry {key!r} must be a number or a level name")
    return Elicitation(**entries)  # type: ignore[arg-type]


def _node_from_json(obj: dict) -> Node:
    if not isinstance(obj, dict):
        raise _JsonError("each node must be an object")
    kind = obj.get("kind")
    node_id = obj.get("id")
    if not isinstance(node_id, str):
        raise _JsonError(f"node with kind={kind!r} is missing a string 'id'")
    where = f"node {node_id}"
    if kind == "claim":
        _check_keys(obj, ("kind", "id", "text", "justification"), where)
        return Claim(
            node_id,
            _jget(obj, "text", str, True, where),
            justification=_jget(obj, "justification", str, where=where),
        )
    if kind == "assumption":
        _check_keys(obj, ("kind", "id", "text", "prob", "justification"), where)
        return Claim(
            node_id,
            _jget(obj, "text", str, True, where),
            role=Role.ASSUMPTION,
            assumed_prob=_jnum(obj, "prob", True, where),
            justification=_jget(obj, "justification", str, where=where),
        )
    if kind == "residual":
        _check_keys(obj, ("kind", "id", "text", "likelihood", "consequence", "class"), where)
        return Claim(
            node_id,
            _jget(obj, "text", str, True, where),
            role=Role.RESIDUAL,
            likelihood=_jnum(obj, "likelihood", True, where),
            consequence=_jnum(obj, "consequence", True, where),
            class_label=_jget(obj, "class", str, where=where),
        )
    if kind == "evidence":
        _check_keys(
            obj, ("kind", "id", "description", "assembly", "posterior", "accepted", "elicit"), where
        )
        elicit_obj = _jget(obj, "elicit", dict, where=where)
        accepted = _jget(obj, "accepted", bool, where=where)
        return Evidence(
            node_id,
            _jget(obj, "description", str, True, where),
            _jget(obj, "assembly", str, True, where),
            accepted=bool(accepted) if accepted is not None else False,
            posterior_useful=_jnum(obj, "posterior", where=where),
            elicitation=_elicit_from_json(elicit_obj, where) if elicit_obj is not None else None,
        )
    if kind == "block":
        _check_keys(
            obj, ("kind", "block", "id", "parent", "mode", "side", "sub", "justification"), where
        )
        kind_name = _jget(obj, "block", str, True, where)
        if kind_name not in BLOCK_KINDS:
            raise _JsonError(f"{where}: unknown block kind {kind_name!r}")
        subs = _jget(obj, "sub", list, True, where)
        if not all(isinstance(s, str) for s in subs):
            raise _JsonError(f"{where}: 'sub' must be a list of node ids")
        mode_name = _jget(obj, "mode", str, where=where)
        if mode_name is not None and mode_name not in ("conjunctive", "disjunctive"):
            raise _JsonError(f"{where}: unknown mode {mode_name!r}")
        return Block(
            node_id,
            BLOCK_KINDS[kind_name],
            _jget(obj, "parent", str, True, where),
            tuple(subs),
            mode=Mode(mode_name) if mode_name else Mode.CONJUNCTIVE,
            sideclaim=_jget(obj, "side", str, where=where),
            justification=_jget(obj, "justification", str, True, where),
        )
    if kind == "defeater":
        _check_keys(
            obj, ("kind", "id", "exactness", "targets", "claim", "status", "narrative"), where
        )
        exactness = _jget(obj, "exactness", str, True, where)
        if exactness not in ("exploratory", "exact"):
            raise _JsonError(f"{where}: unknown exactness {exactness!r}")
        status = _jget(obj, "status", str, where=where)
        if status is not None and status not in STATUS_NAMES:
            raise _JsonError(f"{where}: unknown status {status!r}")
        return Defeater(
            node_id,
            target=_jget(obj, "targets", str, True, where),
            claim_text=_jget(obj, "claim", str, where=where) or "",
            exactness=Exactness(exactness),
            status=STATUS_NAMES[status] if status else DefeaterStatus.DOUBT,
            narrative=_jget(obj, "narrative", str, where=where) or "",
        )
    if kind == "subcase":
        _check_keys(obj, ("kind", "id", "text", "external", "assessed"), where)
        assessed = _jget(obj, "assessed", str, where=where)
        if assessed is not None and assessed not in ASSESSED_NAMES:
            raise _JsonError(f"{where}: unknown assessment {assessed!r}")
        return Subcase(
            node_id,
            _jget(obj, "text", str, True, where),
            external_locator=_jget(obj, "external", str, where=where),
            assessed=ASSESSED_NAMES[assessed] if assessed else None,
        )
    raise _JsonError(f"node {node_id}: unknown kind {kind!r}")


def _parse_json(text: str, filename: str) -> ParseResult:
    diagnostics: list[ParseDiagnostic] = []
    default_span = SourceSpan(filename, 1, 1, 1)

    def err(message: str) -> None:
        diagnostics.append(ParseDiagnostic("error", message, default_span))

    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        span = SourceSpan(filename, e.lineno, e.colno, 1)
        return ParseResult(None, [ParseDiagnostic("error", f"malformed JSON: {e.msg}", span)])

    if not isinstance(doc, dict) or not isinstance(doc.get("case"), dict):
        err("document must be an object of the form {\"case\": {...}}")
        return ParseResult(None, diagnostics)
    case = doc["case"]
    title = case.get("title", "")
    if not isinstance(title, str):
        err("case title must be a string")
        title = ""
    nodes = case.get("nodes")
    if not isinstance(nodes, list):
        err("case must carry a 'nodes' list")
        return ParseResult(None, diagnostics)

    decls: list[Node] = []
    for obj in nodes:
        try:
            decls.append(_node_from_json(obj))
        except _JsonError as e:
            err(str(e))

    top = case.get("top")
    if top is not None:
        if not isinstance(top, str):
            err("'top' must be a node id string")
        else:
            matched = False
            for i, decl in enumerate(decls):
                if decl.id == top:
                    matched = True
                    if isinstance(decl, Claim) and decl.role is Role.ORDINARY:
                        decls[i] = dataclasses.replace(decl, role=Role.TOP)
                    else:
                        err(f"'top' must name an ordinary claim, not {decl.node_kind} {top}")
            if not matched:
                err(f"'top' names an undeclared node {top}")

    return _build_result(decls, title, {}, diagnostics, filename)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _esc(s: str) -> str:
    out = s.replace("\\", "\\\\").replace('"', '\\"')
    out = out.replace("\n", "\\n").replace("\t", "\\t").replace("\r", "\\r")
    return f'"{out}"'


def _fmt_num(x: float) -> str:
    return repr(float(x))


def _elicit_dsl(e: Elicitation) -> str:
    parts = []
    for name in ELICIT_KEYS:
        value = getattr(e, name)
        if value is None:
            continue
        rendered = value.value if isinstance(value, Level) else _fmt_num(value)
        parts.append(f"{name} {rendered};")
    return "elicit { " + " ".join(parts) + " }"


def _dsl_item(n: Node) -> list:
    if isinstance(n, Claim):
        if n.role is Role.ASSUMPTION:
            parts = ["assumption", n.id, _esc(n.text), "prob", _fmt_num(n.assumed_prob)]
            if n.justification is not None:
                parts += ["justification", _esc(n.justification)]
            return ["  " + " ".join(parts)]
        if n.role is Role.RESIDUAL:
            parts = [
                "residual",
                n.id,
                _esc(n.text),
                "likelihood",
                _fmt_num(n.likelihood),
                "consequence",
                _fmt_num(n.consequence),
            ]
            if n.class_label is not None:
                parts += ["class", _esc(n.class_label)]
            return ["  " + " ".join(parts)]
        parts = ["claim", n.id, _esc(n.text)]
        if n.role is Role.TOP:
            parts.append("top")
        if n.justification is not None:
            parts += ["justification", _esc(n.justification)]
        return ["  " + " ".join(parts)]
    if isinstance(n, Evidence):
        lines = [f"  evidence {n.id} {{"]
        lines.append(f"    description {_esc(n.description)};")
        lines.append(f"    assembly {_esc(n.assembly_ref)};")
        if n.posterior_useful is not None:
            lines.append(f"    posterior {_fmt_num(n.posterior_useful)};")
        if n.accepted:
            lines.append("    accepted true;")
        if n.elicitation is not None and not n.elicitation.is_empty():
            lines.append(f"    {_elicit_dsl(n.elicitation)}")
        lines.append("  }")
        return lines
    if isinstance(n, Block):
        lines = [f"  block {KIND_KEYWORDS[n.kind]} {n.id} {{"]
        lines.append(f"    parent {n.parent};")
        if n.mode is Mode.DISJUNCTIVE:
            lines.append("    mode disjunctive;")
        if n.sideclaim is not None:
            lines.append(f"    side {n.sideclaim};")
        lines.append(f"    sub {', '.join(n.subclaims)};")
        lines.append(f"    justification {_esc(n.justification)};")
        lines.append("  }")
        return lines
    if isinstance(n, Defeater):
        lines = [f"  defeater {n.id} {n.exactness.value} {{"]
        lines.append(f"    targets {n.target};")
        if n.claim_text:
            lines.append(f"    claim {_esc(n.claim_text)};")
        lines.append(f"    status {n.status.value};")
        if n.narrative:
            lines.append(f"    narrative {_esc(n.narrative)};")
        lines.append("  }")
        return lines
    assert isinstance(n, Subcase)
    parts = ["subcase", n.id, _esc(n.top_claim_text)]
    if n.external_locator is not None:
        parts += ["external", _esc(n.external_locator)]
    if n.assessed is not None:
        parts += ["assessed", ASSESSED_KEYWORDS[n.assessed]]
    return ["  " + " ".join(parts)]


def _serialize_dsl(g: CaseGraph) -> str:
    lines = [f"case {_esc(g.title)} {{"]
    for node_id in g.ids():
        lines.extend(_dsl_item(g.nodes[node_id]))
    lines.append("}")
    return "\n".join(lines) + "\n"


def _judgment_json(value) -> object:
    return value.value if isinstance(value, Level) else float(value)


def _node_json(n: Node) -> dict:
    if isinstance(n, Claim):
        if n.role is Role.ASSUMPTION:
            out: dict = {"kind": "assumption", "id": n.id, "text": n.text, "prob": n.assumed_prob}
        elif n.role is Role.RESIDUAL:
            out = {
                "kind": "residual",
                "id": n.id,
                "text": n.text,
                "likelihood": n.likelihood,
                "consequence": n.consequence,
            }
            if n.class_label is not None:
                out["class"] = n.class_label
        else:
            out = {"kind": "claim", "id": n.id, "text": n.text}
        if n.justification is not None:
            out["justification"] = n.justification
        return out
    if isinstance(n, Evidence):
        out = {
            "kind": "evidence",
            "id": n.id,
            "description": n.description,
            "assembly": n.assembly_ref,
        }
        if n.posterior_useful is not None:
            out["posterior"] = n.posterior_useful
        if n.accepted:
            out["accepted"] = True
        if n.elicitation is not None and not n.elicitation.is_empty():
            out["elicit"] = {
                name: _judgment_json(value) for name, value in n.elicitation.entries().items()
            }
        return out
    if isinstance(n, Block):
        out = {
            "kind": "block",
            "block": KIND_KEYWORDS[n.kind],
            "id": n.id,
            "parent": n.parent,
            "sub": list(n.subclaims),
            "justification": n.justification,
        }
        if n.mode is Mode.DISJUNCTIVE:
            out["mode"] = "disjunctive"
        if n.sideclaim is not None:
            out["side"] = n.sideclaim
        return out
    if isinstance(n, Defeater):
        out = {
            "kind": "defeater",
            "id": n.id,
            "exactness": n.exactness.value,
            "targets": n.target,
            "status": n.status.value,
        }
        if n.claim_text:
            out["claim"] = n.claim_text
        if n.narrative:
            out["narrative"] = n.narrative
        return out
    assert isinstance(n, Subcase)
    out = {"kind": "subcase", "id": n.id, "text": n.top_claim_text}
    if n.external_locator is not None:
        out["external"] = n.external_locator
    if n.assessed is not None:
        out["assessed"] = ASSESSED_KEYWORDS[n.assessed]
    return out


def case_to_json_doc(g: CaseGraph) -> dict:
    """The JSON interchange document for a graph (as a plain dict)."""
    case: dict = {"title": g.title, "nodes": [_node_json(g.nodes[i]) for i in g.ids()]}
    if g.top is not None:
        case["top"] = g.top
    return {"case": case}


def _serialize_json(g: CaseGraph) -> str:
    return json.dumps(case_to_json_doc(g), indent=2, sort_keys=True) + "\n"


def serialize_case(g: CaseGraph, format: str = "dsl") -> str:
    """Deterministic canonical serialization (nodes sorted by id)."""
    if format == "dsl":
        return _serialize_dsl(g)
    if format == "json":
        return _serialize_json(g)
    raise ValueError(f"unknown case format {format!r}; expected 'dsl' or 'json'")


# ---------------------------------------------------------------------------
# graph isomorphism (round-trip checking)
# ---------------------------------------------------------------------------


def _judgment_eq(a, b, tol: float) -> bool:
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, Level) or isinstance(b, Level):
        return isinstance(a, Level) and isinstance(b, Level) and a is b
    return abs(float(a) - float(b)) <= tol


def _field_eq(a, b, tol: float) -> bool:
    if isinstance(a, Elicitation) and isinstance(b, Elicitation):
        return all(
            _judgment_eq(getattr(a, name), getattr(b, name), tol) for name in ELICIT_KEYS
        )
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, bool) or isinstance(b, bool):
        return a == b
    if isinstance(a, float) or isinstance(b, float):
        return abs(float(a) - float(b)) <= tol
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(_field_eq(x, y, tol) for x, y in zip(a, b))
    return a == b


def graphs_isomorphic(a: CaseGraph, b: CaseGraph, tol: float = 1e-12) -> bool:
    """Same ids, kinds, edges, and fields (numeric fields to ``tol``)."""
    if set(a.nodes) != set(b.nodes) or a.top != b.top or a.title != b.title:
        return False
    for node_id in a.nodes:
        na, nb = a.nodes[node_id], b.nodes[node_id]
        if na.node_kind != nb.node_kind or type(na) is not type(nb):
            return False
        for f in dataclasses.fields(na):
            if not _field_eq(getattr(na, f.name), getattr(nb, f.name), tol):
                return False
    return True
