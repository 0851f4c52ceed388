"""Intent-to-design copilot for optical networks.

Pipeline: grammar-validated intent parsing -> standards guidance retrieval ->
cost-bounded deployment planning -> costed network design, with an
interactive clarification loop exposed over HTTP and a CLI.
"""

from opticopilot.grammar import (
    ConstraintSet,
    GrammarError,
    GrammarErrorKind,
    IntentSentence,
    SiteSpec,
    StructuredIntent,
    grammar_text,
    parse_intent,
)
from opticopilot.triage import TriageDecision, TriageRoute, classification_metrics, triage

__all__ = [
    "ConstraintSet",
    "GrammarError",
    "GrammarErrorKind",
    "IntentSentence",
    "SiteSpec",
    "StructuredIntent",
    "TriageDecision",
    "TriageRoute",
    "classification_metrics",
    "grammar_text",
    "parse_intent",
    "triage",
]

__version__ = "0.1.0"
