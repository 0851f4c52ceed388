"""Intent grammar tests: examples, error taxonomy, and parser properties."""

import re

import pytest

from opticopilot.grammar import (
    SITE_NAME_RE,
    VAGUENESS_LEXICON,
    ConstraintSet,
    GrammarError,
    GrammarErrorKind,
    IntentSentence,
    SiteSpec,
    StructuredIntent,
    grammar_text,
    parse_intent,
)

ALLOWLIST = ("G.652", "G.709", "IEEE-802.3", "IEEE-1588", "MEF-3")

CASE1_SENTENCE = (
    "We need a high-availability optical network connecting SITE1 (core), "
    "SITE2 (edge) and SITE3 (hub) support continuous operation with at least 3 "
    "geographically disjoint fiber paths between each pair of sites Maximum "
    "acceptable latency per path is 10 milliseconds Our total budget for "
    "components is $1500000"
)


def parse(text):
    return parse_intent(text, allowlist=ALLOWLIST)


class TestParseSuccess:
    def test_full_multi_constraint_sentence(self):
        out = parse(CASE1_SENTENCE)
        assert isinstance(out, StructuredIntent)
        assert out.sites == (
            SiteSpec("SITE1", role="core"),
            SiteSpec("SITE2", role="edge"),
            SiteSpec("SITE3", role="hub"),
        )
        assert out.constraints.latency_ms == 10
        assert out.constraints.budget_usd == 1500000
        assert out.constraints.disjoint_paths == 3
        assert out.constraints.availability == "high-availability"
        assert out.constraints.compliance is None

    def test_minimal_sentence(self):
        out = parse("We need a optical network connecting SITE1 and SITE2")
        assert out == StructuredIntent(
            sites=(SiteSpec("SITE1"), SiteSpec("SITE2")),
            constraints=ConstraintSet(),
        )

    def test_no_defaults_injected_for_absent_constraints(self):
        out = parse("We need a standard optical network connecting A1 and B2")
        assert out.constraints.latency_ms is None
        assert out.constraints.budget_usd is None
        assert out.constraints.disjoint_paths is None
        assert out.constraints.compliance is None
        assert out.constraints.availability == "standard"

    def test_locations_and_roles(self):
        out = parse(
            "We need a optical network connecting SITE1 in New York (hub) "
            "and SITE2 in Los Angeles (edge)"
        )
        assert out.sites[0] == SiteSpec("SITE1", location="New York", role="hub")
        assert out.sites[1] == SiteSpec("SITE2", location="Los Angeles", role="edge")

    def test_quoted_city(self):
        out = parse('We need a optical network connecting SITE1 in "San Juan" and SITE2')
        assert out.sites[0].location == "San Juan"

    def test_compliance_list(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 "
            "compliant with G.652, IEEE-802.3"
        )
        assert out.constraints.compliance == ("G.652", "IEEE-802.3")

    def test_fixed_phrases_case_insensitive(self):
        out = parse("WE NEED A OPTICAL NETWORK CONNECTING SITE1 AND SITE2")
        assert isinstance(out, StructuredIntent)

    def test_site_names_case_sensitive(self):
        out = parse("We need a optical network connecting site1 and site2")
        assert isinstance(out, GrammarError)

    def test_accepts_intent_sentence_wrapper(self):
        out = parse_intent(
            IntentSentence("We need a optical network connecting SITE1 and SITE2"),
            allowlist=ALLOWLIST,
        )
        assert isinstance(out, StructuredIntent)

    def test_determinism(self):
        a = parse(CASE1_SENTENCE)
        b = parse(CASE1_SENTENCE)
        assert a == b


class TestMissingSites:
    def test_sites_deleted_from_valid_sentence(self):
        # Oracle: "and" is not in FIRST(site) = { SITE_NAME }, so no site
        # can reduce at that position.
        sentence = (
            "We need a optical network connecting and Maximum acceptable "
            "latency per path is 10 milliseconds"
        )
        first_after_connecting = sentence.split("connecting ")[1].split()[0]
        assert SITE_NAME_RE.match(first_after_connecting) is None
        out = parse(sentence)
        assert isinstance(out, GrammarError)
        assert out.kind is GrammarErrorKind.MISSING_SITES

    def test_sites_clause_entirely_absent(self):
        out = parse("We need a optical network connecting")
        assert out.kind is GrammarErrorKind.MISSING_SITES

    def test_single_site_only(self):
        out = parse("We need a optical network connecting SITE1")
        assert out.kind is GrammarErrorKind.MISSING_SITES

    def test_single_site_then_constraint(self):
        out = parse(
            "We need a optical network connecting SITE1 Maximum acceptable "
            "latency per path is 5 milliseconds"
        )
        assert out.kind is GrammarErrorKind.MISSING_SITES

    def test_constraints_directly_after_connecting(self):
        out = parse(
            "We need a optical network connecting Our total budget for "
            "components is $2000"
        )
        assert out.kind is GrammarErrorKind.MISSING_SITES


class TestVagueValue:
    def test_vague_budget(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 Our total "
            "budget for components is fair"
        )
        assert out.kind is GrammarErrorKind.VAGUE_VALUE
        assert out.offending_token == "fair"

    def test_vague_latency(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 Maximum "
            "acceptable latency per path is reasonable milliseconds"
        )
        assert out.kind is GrammarErrorKind.VAGUE_VALUE
        assert out.offending_token == "reasonable"

    def test_vague_redundancy(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 support "
            "continuous operation with at least several geographically "
            "disjoint fiber paths between each pair of sites"
        )
        assert out.kind is GrammarErrorKind.VAGUE_VALUE
        assert out.offending_token == "several"

    def test_vague_dollar_amount(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 Our total "
            "budget for components is $cheap"
        )
        assert out.kind is GrammarErrorKind.VAGUE_VALUE
        assert out.offending_token == "cheap"


class TestInvalidRole:
    def test_unknown_role(self):
        out = parse("We need a optical network connecting SITE1 (datacenter) and SITE2")
        assert out.kind is GrammarErrorKind.INVALID_ROLE
        assert out.offending_token == "datacenter"

    def test_role_message_lists_valid_roles(self):
        out = parse("We need a optical network connecting SITE1 (router) and SITE2")
        for role in ("hub", "core", "edge"):
            assert role in out.message


class TestInvalidCompliance:
    def test_unlisted_standard(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 "
            "compliant with RFC-2549"
        )
        assert out.kind is GrammarErrorKind.INVALID_COMPLIANCE
        assert out.offending_token == "RFC-2549"

    def test_second_standard_invalid(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 "
            "compliant with G.652, G.999"
        )
        assert out.kind is GrammarErrorKind.INVALID_COMPLIANCE
        assert out.offending_token == "G.999"


class TestSyntaxMalformation:
    def test_budget_missing_dollar_sign(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 Our total "
            "budget for components is 1500000"
        )
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION
        assert out.offending_token == "1500000"
        assert "$" in out.message and "VALID_DOLLAR" in out.message

    def test_wrong_opening(self):
        out = parse("Build a optical network connecting SITE1 and SITE2")
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION

    def test_missing_and_separator(self):
        out = parse(
            "We need a optical network connecting SITE1, SITE2 Maximum "
            "acceptable latency per path is 5 milliseconds"
        )
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION

    def test_duplicate_site(self):
        out = parse("We need a optical network connecting SITE1 and SITE1")
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION
        assert "duplicate" in out.message

    def test_duplicate_constraint_clause(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 Maximum "
            "acceptable latency per path is 5 milliseconds Maximum "
            "acceptable latency per path is 7 milliseconds"
        )
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION
        assert "duplicate" in out.message

    def test_zero_latency_rejected(self):
        out = parse(
            "We need a optical network connecting SITE1 and SITE2 Maximum "
            "acceptable latency per path is 0 milliseconds"
        )
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION

    def test_empty_sentence(self):
        out = parse("")
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION

    def test_trailing_garbage(self):
        out = parse("We need a optical network connecting SITE1 and SITE2 thanks")
        assert out.kind is GrammarErrorKind.SYNTAX_MALFORMATION
        assert out.offending_token == "thanks"


class TestFirstErrorWins:
    def test_leftmost_of_two_errors(self):
        # Invalid role (left) and vague budget (right): report the role.
        out = parse(
            "We need a optical network connecting SITE1 (switch) and SITE2 "
            "Our total budget for components is fair"
        )
        assert out.kind is GrammarErrorKind.INVALID_ROLE

    def test_position_is_character_offset(self):
        sentence = (
            "We need a optical network connecting SITE1 and SITE2 Our total "
            "budget for components is fair"
        )
        out = parse(sentence)
        assert sentence[out.position:out.position + len("fair")] == "fair"


class TestGrammarText:
    def test_contains_intent_production(self):
        assert (
            'intent → "We need a" [availability] "optical network connecting" '
            "sites [constraints]" in grammar_text()
        )

    def test_contains_valid_dollar_production(self):
        assert 'VALID_DOLLAR → "$" INT' in grammar_text()

    def test_stable_across_calls(self):
        assert grammar_text().encode() == grammar_text().encode()


class TestSerialization:
    def test_intent_json_omits_absent_optionals(self):
        out = parse("We need a optical network connecting SITE1 and SITE2")
        data = out.to_json_dict()
        assert "availability" not in data
        assert data["sites"] == [{"name": "SITE1"}, {"name": "SITE2"}]
        assert data["constraints"] == {}

    def test_intent_json_round_trip(self):
        out = parse(CASE1_SENTENCE)
        assert StructuredIntent.from_json_dict(out.to_json_dict()) == out

    def test_error_json_fields(self):
        err = parse("We need a optical network connecting SITE1 (foo) and SITE2")
        data = err.to_json_dict()
        assert data["kind"] == "InvalidRole"
        assert set(data) == {"kind", "position", "offending_token", "message"}


class TestMutationProperties:
    """Monotone damage: planted single mutations yield exactly their kind."""

    BASE = (
        "We need a optical network connecting SITE1 (hub), SITE2 (core) and "
        "SITE3 (edge) support continuous operation with at least 2 "
        "geographically disjoint fiber paths between each pair of sites "
        "Maximum acceptable latency per path is 20 milliseconds Our total "
        "budget for components is $900000 compliant with G.652"
    )

    def test_base_is_valid(self):
        assert isinstance(parse(self.BASE), StructuredIntent)

    def test_delete_sites_clause(self):
        mutated = self.BASE.replace(
            "SITE1 (hub), SITE2 (core) and SITE3 (edge) ", ""
        )
        assert parse(mutated).kind is GrammarErrorKind.MISSING_SITES

    @pytest.mark.parametrize("word", sorted(VAGUENESS_LEXICON))
    def test_vague_word_in_int_slot(self, word):
        mutated = self.BASE.replace("at least 2", f"at least {word}")
        out = parse(mutated)
        assert out.kind is GrammarErrorKind.VAGUE_VALUE
        assert out.offending_token == word

    @pytest.mark.parametrize("word", ["datacenter", "spine", "router", "relay"])
    def test_non_role_word(self, word):
        mutated = self.BASE.replace("(core)", f"({word})")
        out = parse(mutated)
        assert out.kind is GrammarErrorKind.INVALID_ROLE
        assert out.offending_token == word

    @pytest.mark.parametrize("ident", ["G.999", "ISO-8601", "RFC-1149", "IEEE-9999"])
    def test_unlisted_compliance(self, ident):
        mutated = self.BASE.replace("compliant with G.652", f"compliant with {ident}")
        out = parse(mutated)
        assert out.kind is GrammarErrorKind.INVALID_COMPLIANCE
        assert out.offending_token == ident


def test_total_function_over_junk_inputs():
    junk = [
        "(((((", "$$$", "We", "We need", "We need a", "and and and",
        "We need a optical network connecting SITE1 and SITE2 )",
        "We need a optical network connecting SITE1 (hub", "ééé",
        "We need a optical network connecting SITE1 in and SITE2",
    ]
    for text in junk:
        out = parse(text)
        assert isinstance(out, (StructuredIntent, GrammarError))
