"""Evaluation corpus: generation, mutation, loading, and the eval loop.

The shipped corpus is 90 cases: 30 valid (10 basic / 10 intermediate / 10
complex) and 60 invalid (15 per error kind), built deterministically from a
fixed seed by rendering generated intents to canonical sentences and
planting exactly one defect per invalid case. The bundled mock ruleset
carries three planted gateway deviations (two vague-constraint omissions and
one corrupted complex case) above an echo catch-all, which reproduces the
reference pass-through/detection/accuracy table by construction.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from opticopilot.errors import CorpusShapeError
from opticopilot.gateway import (
    MAX_REPHRASE_ATTEMPTS,
    GatewayConfig,
    RephraseRequest,
    rephrase,
)
from opticopilot.grammar import (
    AVAILABILITY_TIERS,
    ROLES,
    ConstraintSet,
    GrammarError,
    GrammarErrorKind,
    SiteSpec,
    StructuredIntent,
    grammar_text,
    parse_intent,
)
from opticopilot.synthesis import render_canonical
from opticopilot.triage import VALID, CaseResult, MetricsReport, TriageRoute, classification_metrics, triage

CORPUS_SEED = 20250811
ERROR_KINDS = ("MissingSites", "VagueValue", "InvalidRole", "InvalidCompliance")
VALID_TIERS = ("basic", "intermediate", "complex")

CASE2_INPUT = "Build optical network with ROADM equipment and regulatory compliance"
CASE2_OUTPUT = "We need a optical network connecting compliant with G.652"
CASE2_CLARIFICATION = "Connect SITE1, SITE2 and SITE3"
CASE2_CLARIFIED_OUTPUT = (
    "We need a optical network connecting SITE1, SITE2 and SITE3 compliant with G.652"
)
CASE3_INPUT = "Connect 15 sites across continental US with sub-millisecond latency"
CASE3_CITIES = (
    "New York", "Los Angeles", "Chicago", "Houston", "Phoenix",
    "Philadelphia", "San Antonio", "San Diego", "Dallas", "Seattle",
    "Denver", "Boston", "Atlanta", "Miami", "Portland",
)

_SITE_PREFIXES = ("SITE", "NODE", "POP", "DC")
_BAD_ROLES = ("datacenter", "router", "switch", "gateway", "firewall")
_BAD_STANDARDS = ("G.999", "ISO-8601", "RFC-1149", "IEEE-9999", "X.25-LEGACY")
_VAGUE_BUDGET_WORDS = ("fair", "affordable", "cheap", "low")
_VAGUE_REDUNDANCY_WORDS = ("several", "some", "many", "few")


def case3_sentence() -> str:
    sites = ", ".join(
        f"SITE{i + 1} in {city}" + (" (hub)" if i == 0 else "")
        for i, city in enumerate(CASE3_CITIES[:-1])
    )
    last = f"SITE15 in {CASE3_CITIES[-1]}"
    return (
        f"We need a optical network connecting {sites} and {last} "
        "Maximum acceptable latency per path is 1 milliseconds"
    )


@dataclass(frozen=True)
class EvalCase:
    case_id: str
    text: str
    expected: str  # "valid:<tier>" or an error kind name


@dataclass(frozen=True)
class EvalCorpus:
    cases: tuple[EvalCase, ...]

    def to_json_dict(self) -> dict:
        return {
            "cases": [
                {"id": c.case_id, "text": c.text, "expected": c.expected}
                for c in self.cases
            ]
        }


# ---------------------------------------------------------------------------
# Intent generation
# ---------------------------------------------------------------------------

def generate_valid_intent(
    rng: random.Random,
    tier: str,
    allowlist: Sequence[str],
    cities: Sequence[str],
    require: Sequence[str] = (),
) -> StructuredIntent:
    """One random valid intent for a complexity tier.

    ``require`` forces clauses ("latency", "budget", "redundancy",
    "compliance", "roles") so mutation bases always contain their target.
    """
    if tier == "basic":
        n_sites = 2
        n_constraints = rng.randint(0, 1)
    elif tier == "intermediate":
        n_sites = 3
        n_constraints = 2
    elif tier == "complex":
        n_sites = rng.randint(4, 6)
        n_constraints = rng.randint(3, 4)
    else:
        raise ValueError(f"unknown tier {tier!r}")

    prefix = rng.choice(_SITE_PREFIXES)
    with_roles = tier == "complex" or "roles" in require
    with_locations = tier == "complex"
    sites = []
    for i in range(n_sites):
        sites.append(SiteSpec(
            name=f"{prefix}{i + 1}",
            location=rng.choice(cities) if with_locations else None,
            role=rng.choice(ROLES) if with_roles else (
                rng.choice((None,) + ROLES) if rng.random() < 0.3 else None
            ),
        ))

    pool = ["redundancy", "latency", "budget", "compliance"]
    chosen = [c for c in require if c in pool]
    rest = [c for c in pool if c not in chosen]
    rng.shuffle(rest)
    while len(chosen) < n_constraints and rest:
        chosen.append(rest.pop())

    constraints = ConstraintSet(
        latency_ms=rng.randint(2, 100) if "latency" in chosen else None,
        budget_usd=rng.randint(50, 5000) * 1000 if "budget" in chosen else None,
        disjoint_paths=rng.randint(2, 4) if "redundancy" in chosen else None,
        compliance=(
            tuple(sorted(rng.sample(list(allowlist), rng.randint(1, 2))))
            if "compliance" in chosen else None
        ),
        availability=rng.choice(AVAILABILITY_TIERS) if rng.random() < 0.5 else None,
    )
    return StructuredIntent(sites=tuple(sites), constraints=constraints)


@dataclass(frozen=True)
class Mutation:
    sentence: str
    expected: str
    removable_clause: Optional[str] = None  # the clause text a gateway omission drops


def make_mutation(
    rng: random.Random,
    kind: str,
    index: int,
    allowlist: Sequence[str],
    cities: Sequence[str],
) -> Mutation:
    """Render a fresh valid intent and plant exactly one defect of ``kind``."""
    tier = VALID_TIERS[index % 3]

    if kind == "MissingSites":
        base = generate_valid_intent(
            rng, tier, allowlist, cities, require=("latency",)
        )
        no_sites = render_canonical(StructuredIntent(sites=(), constraints=base.constraints))
        return Mutation(sentence=" ".join(no_sites.split()), expected=kind)

    if kind == "VagueValue":
        target = ("latency", "budget", "redundancy")[index % 3]
        base = generate_valid_intent(rng, tier, allowlist, cities, require=(target,))
        sentence = render_canonical(base)
        cons = base.constraints
        if target == "latency":
            clause = f"Maximum acceptable latency per path is {cons.latency_ms} milliseconds"
            vague = clause.replace(str(cons.latency_ms), "reasonable", 1)
        elif target == "budget":
            clause = f"Our total budget for components is ${cons.budget_usd}"
            word = _VAGUE_BUDGET_WORDS[index % len(_VAGUE_BUDGET_WORDS)]
            vague = f"Our total budget for components is {word}"
        else:
            clause = (
                f"support continuous operation with at least {cons.disjoint_paths} "
                "geographically disjoint fiber paths between each pair of sites"
            )
            word = _VAGUE_REDUNDANCY_WORDS[index % len(_VAGUE_REDUNDANCY_WORDS)]
            vague = clause.replace(str(cons.disjoint_paths), word, 1)
        mutated = sentence.replace(clause, vague, 1)
        assert mutated != sentence
        return Mutation(sentence=mutated, expected=kind, removable_clause=vague)

    if kind == "InvalidRole":
        base = generate_valid_intent(rng, tier, allowlist, cities, require=("roles",))
        sentence = render_canonical(base)
        role = base.sites[0].role
        bad = _BAD_ROLES[index % len(_BAD_ROLES)]
        mutated = sentence.replace(f"({role})", f"({bad})", 1)
        assert mutated != sentence
        return Mutation(sentence=mutated, expected=kind)

    if kind == "InvalidCompliance":
        base = generate_valid_intent(rng, tier, allowlist, cities, require=("compliance",))
        sentence = render_canonical(base)
        first = base.constraints.compliance[0]
        bad = _BAD_STANDARDS[index % len(_BAD_STANDARDS)]
        mutated = sentence.replace(f"compliant with {first}", f"compliant with {bad}", 1)
        assert mutated != sentence
        return Mutation(sentence=mutated, expected=kind)

    raise ValueError(f"unknown error kind {kind!r}")


# ---------------------------------------------------------------------------
# Corpus + mock ruleset construction
# ---------------------------------------------------------------------------

def build_default_corpus(
    allowlist: Sequence[str], cities: Sequence[str]
) -> tuple[EvalCorpus, list[dict]]:
    """The shipped 90-case corpus and its companion mock ruleset."""
    rng = random.Random(CORPUS_SEED)
    cases: list[EvalCase] = []

    for tier in VALID_TIERS:
        for i in range(10):
            intent = generate_valid_intent(rng, tier, allowlist, cities)
            cases.append(EvalCase(
                case_id=f"valid-{tier}-{i + 1:02d}",
                text=render_canonical(intent),
                expected=f"valid:{tier}",
            ))

    omission_rules: list[dict] = []
    for kind in ERROR_KINDS:
        for i in range(15):
            mutation = make_mutation(rng, kind, i, allowlist, cities)
            cases.append(EvalCase(
                case_id=f"invalid-{kind.lower()}-{i + 1:02d}",
                text=mutation.sentence,
                expected=kind,
            ))
            # Plant the two vague-omission gateway behaviours: the first
            # latency-vague and the first redundancy-vague case.
            if kind == "VagueValue" and i in (0, 2):
                omitted = mutation.sentence.replace(mutation.removable_clause, "", 1)
                omission_rules.append({
                    "match": "exact",
                    "pattern": mutation.sentence,
                    "response": " ".join(omitted.split()),
                })

    corrupted_target = next(c for c in cases if c.case_id == "valid-complex-01")
    corruption_rule = {
        "match": "exact",
        "pattern": corrupted_target.text,
        "response": corrupted_target.text.replace("optical network", "optical net-work", 1),
    }

    rules = [
        {"match": "exact", "pattern": CASE2_INPUT, "response": CASE2_OUTPUT},
        {
            "match": "exact",
            "pattern": f"{CASE2_INPUT} {CASE2_CLARIFICATION}",
            "response": CASE2_CLARIFIED_OUTPUT,
        },
        {"match": "exact", "pattern": CASE3_INPUT, "response": case3_sentence()},
        *omission_rules,
        corruption_rule,
        {"match": "always", "pattern": "", "response": ""},  # echo
    ]
    return EvalCorpus(cases=tuple(cases)), rules


def write_default_data(data_dir: Union[str, Path]) -> None:
    """Regenerate the shipped eval corpus and mock ruleset files."""
    from opticopilot.feasibility import default_registry
    from opticopilot.retrieval import default_corpus

    allowlist = default_corpus().allowlist_standards()
    cities = sorted(default_registry().entries)
    corpus, rules = build_default_corpus(allowlist, cities)
    data_dir = Path(data_dir)
    (data_dir / "eval_corpus.json").write_text(
        json.dumps(corpus.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    (data_dir / "mock_rules.json").write_text(
        json.dumps({"rules": rules}, indent=2) + "\n", encoding="utf-8"
    )


def load_corpus(path: Union[str, Path]) -> EvalCorpus:
    path = Path(path)
    if not path.is_file():
        raise CorpusShapeError(f"corpus file not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    cases = tuple(
        EvalCase(case_id=c["id"], text=c["text"], expected=c["expected"])
        for c in data.get("cases", [])
    )
    corpus = EvalCorpus(cases=cases)
    validate_corpus(corpus)
    return corpus


def default_corpus_path() -> str:
    return str(resources.files("opticopilot").joinpath("data", "eval_corpus.json"))


def validate_corpus(corpus: EvalCorpus, strict_shape: bool = False) -> None:
    """Reject malformed corpora before any case runs."""
    if not corpus.cases:
        raise CorpusShapeError("corpus is empty")
    ids = [c.case_id for c in corpus.cases]
    if len(set(ids)) != len(ids):
        raise CorpusShapeError("duplicate case ids")
    legal = set(ERROR_KINDS) | {f"valid:{t}" for t in VALID_TIERS} | {VALID}
    for case in corpus.cases:
        if case.expected not in legal:
            raise CorpusShapeError(
                f"case {case.case_id}: unknown expected outcome {case.expected!r}"
            )
        if not case.text.strip():
            raise CorpusShapeError(f"case {case.case_id}: empty text")
    if strict_shape:
        by_tier = {
            tier: sum(1 for c in corpus.cases if c.expected == f"valid:{tier}")
            for tier in VALID_TIERS
        }
        by_kind = {
            kind: sum(1 for c in corpus.cases if c.expected == kind)
            for kind in ERROR_KINDS
        }
        if any(count != 10 for count in by_tier.values()) or any(
            count != 15 for count in by_kind.values()
        ):
            raise CorpusShapeError(
                f"corpus shape must be 10/10/10 valid and 15 per error kind; "
                f"got {by_tier} and {by_kind}"
            )


# ---------------------------------------------------------------------------
# Evaluation loop
# ---------------------------------------------------------------------------

def _stage1_outcome(
    text: str, gateway: GatewayConfig, allowlist: Sequence[str]
) -> str:
    """Rephrase + parse + triage retry loop; returns "valid" or the error kind."""
    attempt = 0
    hint = None
    while True:
        sentence = rephrase(
            RephraseRequest(
                user_text=text,
                grammar=grammar_text(),
                correction_hint=hint,
                attempt=attempt,
            ),
            gateway,
        )
        outcome = parse_intent(sentence, allowlist=allowlist)
        if not isinstance(outcome, GrammarError):
            return VALID
        decision = triage(outcome, standards=allowlist)
        if decision.route is TriageRoute.LLM_FIXABLE and attempt < MAX_REPHRASE_ATTEMPTS:
            attempt += 1
            hint = decision.hint
            continue
        return outcome.kind.value


def run_eval(
    corpus: EvalCorpus,
    gateway: GatewayConfig,
    allowlist: Sequence[str],
    bypass_llm: bool = False,
) -> tuple[MetricsReport, list[dict]]:
    """Run stage 1 over every case and aggregate the table metrics.

    ``bypass_llm`` feeds the canonical sentences straight to the parser,
    isolating parser behaviour from gateway behaviour.
    """
    validate_corpus(corpus)
    results: list[CaseResult] = []
    details: list[dict] = []
    for case in corpus.cases:
        started = time.perf_counter()
        if bypass_llm:
            outcome = parse_intent(case.text, allowlist=allowlist)
            observed = VALID if not isinstance(outcome, GrammarError) else outcome.kind.value
        else:
            observed = _stage1_outcome(case.text, gateway, allowlist)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        results.append(CaseResult(
            expected=case.expected, observed=observed, elapsed_ms=elapsed_ms
        ))
        expected_valid = case.expected.startswith("valid")
        details.append({
            "id": case.case_id,
            "expected": case.expected,
            "observed": observed,
            "ok": (observed == VALID) == expected_valid
            and (expected_valid or observed == case.expected),
            "elapsed_ms": round(elapsed_ms, 3),
        })
    report = classification_metrics(results)
    return report, details
