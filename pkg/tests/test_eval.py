"""Evaluation harness: corpus shape, determinism, and the two table modes."""

import json

import pytest

from opticopilot.errors import CorpusShapeError
from opticopilot.evalharness import (
    CORPUS_SEED,
    ERROR_KINDS,
    EvalCase,
    EvalCorpus,
    build_default_corpus,
    case3_sentence,
    default_corpus_path,
    load_corpus,
    make_mutation,
    run_eval,
    validate_corpus,
)
from opticopilot.feasibility import default_registry
from opticopilot.gateway import GatewayConfig, default_mock_rules_path
from opticopilot.grammar import GrammarError, parse_intent
from opticopilot.retrieval import default_corpus

import random


@pytest.fixture(scope="module")
def allowlist():
    return default_corpus().allowlist_standards()


@pytest.fixture(scope="module")
def cities():
    return sorted(default_registry().entries)


@pytest.fixture(scope="module")
def gateway():
    return GatewayConfig(mock=True, mock_rules_path=default_mock_rules_path())


@pytest.fixture(scope="module")
def shipped():
    return load_corpus(default_corpus_path())


class TestCorpusShape:
    def test_shipped_shape(self, shipped):
        validate_corpus(shipped, strict_shape=True)
        assert len(shipped.cases) == 90

    def test_empty_rejected(self):
        with pytest.raises(CorpusShapeError):
            validate_corpus(EvalCorpus(cases=()))

    def test_duplicate_ids_rejected(self):
        case = EvalCase("x", "text", "valid:basic")
        with pytest.raises(CorpusShapeError):
            validate_corpus(EvalCorpus(cases=(case, case)))

    def test_unknown_expected_rejected(self):
        with pytest.raises(CorpusShapeError):
            validate_corpus(EvalCorpus(cases=(EvalCase("x", "text", "Gibberish"),)))

    def test_generation_is_deterministic(self, allowlist, cities):
        a, rules_a = build_default_corpus(allowlist, cities)
        b, rules_b = build_default_corpus(allowlist, cities)
        assert a == b
        assert rules_a == rules_b

    def test_shipped_files_match_generator(self, allowlist, cities, shipped):
        regenerated, rules = build_default_corpus(allowlist, cities)
        assert regenerated.cases == shipped.cases
        shipped_rules = json.loads(
            open(default_mock_rules_path(), encoding="utf-8").read()
        )["rules"]
        assert rules == shipped_rules


class TestMutations:
    def test_each_kind_yields_exactly_planted_error(self, allowlist, cities):
        rng = random.Random(CORPUS_SEED + 1)
        for index in range(40):
            for kind in ERROR_KINDS:
                mutation = make_mutation(rng, kind, index, allowlist, cities)
                outcome = parse_intent(mutation.sentence, allowlist=allowlist)
                assert isinstance(outcome, GrammarError), mutation.sentence
                assert outcome.kind.value == kind, mutation.sentence


class TestBypassMode:
    def test_parser_is_exact(self, shipped, gateway, allowlist):
        report, details = run_eval(shipped, gateway, allowlist, bypass_llm=True)
        assert report.valid_passed == 30
        assert report.invalid_detected == 60
        assert report.detected_correct == 60
        assert report.pass_through_rate == 100.0
        assert report.detection_rate == 100.0
        assert report.classification_accuracy == 100.0
        assert all(d["ok"] for d in details)


class TestMockLlmMode:
    def test_reproduces_reference_tables(self, shipped, gateway, allowlist):
        report, details = run_eval(shipped, gateway, allowlist, bypass_llm=False)
        assert report.pass_through_rate == 96.7
        assert report.detection_rate == 96.7
        assert report.classification_accuracy == 100.0
        assert report.valid_passed == 29
        assert report.invalid_detected == 58
        by_kind = {t.kind: t for t in report.per_type}
        assert by_kind["VagueValue"].tests == 15
        assert by_kind["VagueValue"].detected == 13
        assert by_kind["VagueValue"].accuracy_pct == 86.7
        for kind in ("MissingSites", "InvalidRole", "InvalidCompliance"):
            assert by_kind[kind].accuracy_pct == 100.0
        assert report.mean_processing_ms > 0

    def test_deviating_cases_are_the_planted_ones(self, shipped, gateway, allowlist):
        _, details = run_eval(shipped, gateway, allowlist, bypass_llm=False)
        deviating = sorted(d["id"] for d in details if not d["ok"])
        vague = [d for d in deviating if "vaguevalue" in d]
        complexes = [d for d in deviating if "complex" in d]
        assert len(deviating) == 3
        assert len(vague) == 2 and len(complexes) == 1


class TestCase3Sentence:
    def test_parses_with_15_located_sites(self, allowlist):
        intent = parse_intent(case3_sentence(), allowlist=allowlist)
        assert not isinstance(intent, GrammarError)
        assert len(intent.sites) == 15
        assert intent.constraints.latency_ms == 1
        assert all(s.location for s in intent.sites)
