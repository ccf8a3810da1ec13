"""DSL/JSON parsing, diagnostics, and round-trip serialization."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from a2 import BlockKind, Level, Mode, parse_case, serialize_case
from a2.caseformat import graphs_isomorphic

from conftest import all_fixture_names, load_fixture

MINIMAL = """
case "Minimal" {
  claim TC "the claim" top
  evidence E1 { description "a run"; assembly "ref"; accepted true; }
  block incorporation B1 { parent TC; sub E1; justification "covers"; }
}
"""


def test_minimal_dsl_parses_to_three_nodes():
    r = parse_case(MINIMAL)
    assert r.ok and not r.diagnostics
    assert sorted(r.graph.nodes) == ["B1", "E1", "TC"]
    assert r.graph.top == "TC"


def test_disjunctive_decomposition_parses():
    text = """
    case "D" {
      claim TC "t" top
      claim S1 "a" claim S2 "b"
      block decomposition B1 { parent TC; mode disjunctive; sub S1, S2; justification "j"; }
      defeater X1 exact { targets S1; }
      defeater X2 exact { targets S2; }
    }
    """
    r = parse_case(text)
    assert r.ok, [d.render() for d in r.diagnostics]
    b = r.graph.nodes["B1"]
    assert b.kind is BlockKind.DECOMPOSITION and b.mode is Mode.DISJUNCTIVE


def test_substitution_arity_is_an_error_diagnostic_at_the_block():
    text = 'case "A" { claim C "c" top claim S1 "s" claim S2 "s" ' \
           'block substitution B2 { parent C; sub S1, S2; justification "j"; } }'
    r = parse_case(text)
    assert not r.ok
    errors = r.errors()
    assert any("expected 1 subclaim" in d.message for d in errors)
    span = [d for d in errors if "subclaim" in d.message][0].span
    assert (span.line, span.column) == (1, text.index("B2") + 1)  # the block's id token


def test_diagnostics_carry_spans_and_parsing_recovers():
    text = 'case "A" {\n  claim "missing id"\n  claim TC "ok" top\n  evidence E1 { description "d"; assembly "a"; accepted true; }\n  block incorporation B1 { parent TC; sub E1; justification "j"; }\n}'
    r = parse_case(text)
    # recovery reaches the rest of the items, so only the bad claim errors out
    assert [d.span.line for d in r.errors()] == [2]


def test_unknown_item_and_missing_brace():
    r = parse_case('case "A" { widget W1 }')
    assert not r.ok
    assert any("unknown item" in d.message for d in r.errors())
    r = parse_case('case "A" { claim TC "t" top')
    assert any("missing '}'" in d.message for d in r.errors())


def test_unsupported_leaf_is_warning_not_error():
    text = 'case "A" { claim TC "t" top claim S "s" ' \
           'block decomposition B { parent TC; sub S; justification "j"; } }'
    r = parse_case(text)
    assert r.ok
    assert [d.severity for d in r.diagnostics] == ["warning"]


def test_json_form_round_trip_and_mirror_keywords():
    g = load_fixture("sound.a2")
    doc = json.loads(serialize_case(g, "json"))
    assert set(doc) == {"case"}
    assert doc["case"]["top"] == "TC"
    kinds = {n["kind"] for n in doc["case"]["nodes"]}
    assert kinds == {"claim", "assumption", "evidence", "block"}
    ev = [n for n in doc["case"]["nodes"] if n["id"] == "ER"][0]
    assert ev["elicit"] == {"prior": "neutral", "posterior": "confident"}
    r = parse_case(json.dumps(doc), format="json")
    assert r.ok
    assert graphs_isomorphic(g, r.graph)


def test_malformed_json_has_positioned_diagnostic():
    r = parse_case('{"case": {', format="json")
    assert not r.ok
    assert r.errors()[0].span.line >= 1


def test_json_unknown_field_rejected():
    doc = {"case": {"title": "x", "top": "TC", "nodes": [
        {"kind": "claim", "id": "TC", "text": "t", "bogus": 1},
    ]}}
    r = parse_case(json.dumps(doc), format="json")
    assert not r.ok
    assert any("unknown field" in d.message for d in r.errors())


@pytest.mark.parametrize("name", all_fixture_names())
def test_round_trip_identity_over_corpus(name):
    g = load_fixture(name)
    for fmt in ("dsl", "json"):
        text = serialize_case(g, fmt)
        reparsed = parse_case(text, format=fmt)
        assert reparsed.ok, [d.render() for d in reparsed.diagnostics]
        assert graphs_isomorphic(g, reparsed.graph)
        # parse . serialize . parse = parse, and output is deterministic
        assert serialize_case(reparsed.graph, fmt) == text


def test_qualitative_levels_serialized_by_name():
    g = load_fixture("sound.a2")
    text = serialize_case(g, "dsl")
    assert "posterior confident;" in text
    assert "0.9;" not in text.split("elicit")[1].split("}")[0]
    reparsed = parse_case(text).graph
    assert reparsed.nodes["ER"].elicitation.posterior is Level.CONFIDENT


def test_numeric_fields_round_trip_exactly():
    text = 'case "N" { claim TC "t" top assumption A "a" prob 0.123456789012345 ' \
           'evidence E { description "d"; assembly "a"; accepted true; posterior 1e-05; } ' \
           'block incorporation B { parent TC; side A; sub E; justification "j"; } }'
    g = parse_case(text).graph
    g2 = parse_case(serialize_case(g)).graph
    assert g2.nodes["A"].assumed_prob == 0.123456789012345
    assert g2.nodes["E"].posterior_useful == 1e-05


def test_string_escapes_round_trip():
    tricky = 'with "quotes", back\\slash, and\nnewline'
    text = f'case "T" {{ claim TC {json.dumps(tricky)} top ' \
           'evidence E { description "d"; assembly "a"; } ' \
           'block incorporation B { parent TC; sub E; justification "j"; } }'
    g = parse_case(text).graph
    assert g.nodes["TC"].text == tricky
    g2 = parse_case(serialize_case(g)).graph
    assert g2.nodes["TC"].text == tricky


@given(st.text(max_size=300))
@settings(max_examples=300, deadline=None)
def test_parser_is_total_on_arbitrary_text(text):
    result = parse_case(text)
    assert result.graph is None or result.ok
    for d in result.diagnostics:
        assert d.span.line >= 1 and d.span.column >= 1


@given(st.text(alphabet='case"{}();abAB01 \n\t.-_', max_size=200))
@settings(max_examples=300, deadline=None)
def test_parser_is_total_on_dsl_like_text(text):
    parse_case(text)


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_json_parser_is_total(text):
    parse_case(text, format="json")
