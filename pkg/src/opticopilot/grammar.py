"""Intent grammar: tokenizer, recursive-descent parser, canonical grammar text.

The language accepted here is the fixed sentence shape the rephrasing model is
instructed to produce, not free-form user text. Parsing is deterministic and
total: every input yields either a StructuredIntent or exactly one
GrammarError describing the leftmost violation. Fixed phrases match
case-insensitively; site names are case-sensitive uppercase identifiers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Collection, Iterator, Optional, Sequence, Union

ROLES = ("hub", "core", "edge")
AVAILABILITY_TIERS = ("high-availability", "standard", "best-effort")

# Words that signal an unquantified requirement in a slot that needs a number.
# The parser rejects any non-numeric word in an INT slot; this lexicon is the
# canonical vocabulary used by sentence generators and mutation tests.
VAGUENESS_LEXICON = frozenset({
    "fair", "reasonable", "several", "some", "many", "few",
    "adequate", "sufficient", "low", "high", "cheap", "affordable",
})

SITE_NAME_RE = re.compile(r"[A-Z][A-Z0-9_]{0,31}\Z")
CITY_WORD_RE = re.compile(r"[A-Z][A-Za-z]*\Z")
INT_RE = re.compile(r"[0-9]+\Z")
WORD_RE = re.compile(r"[A-Za-z][A-Za-z0-9.\-_]*\Z")

_OPENING = ("we", "need", "a")
_CONNECTING = ("optical", "network", "connecting")
_REDUNDANCY_PREFIX = ("support", "continuous", "operation", "with", "at", "least")
_REDUNDANCY_SUFFIX = (
    "geographically", "disjoint", "fiber", "paths",
    "between", "each", "pair", "of", "sites",
)
_LATENCY_PREFIX = ("maximum", "acceptable", "latency", "per", "path", "is")
_LATENCY_SUFFIX = ("milliseconds",)
_BUDGET_PREFIX = ("our", "total", "budget", "for", "components", "is")
_COMPLIANCE_PREFIX = ("compliant", "with")

# First word of each constraint clause, lowercased, for LL dispatch.
_CONSTRAINT_STARTERS = {
    "support": "redundancy",
    "maximum": "latency",
    "our": "budget",
    "compliant": "compliance",
}

GRAMMAR_TEXT = '''Core grammar (terminals quoted; [x] optional; (x)* repetition):

intent → "We need a" [availability] "optical network connecting" sites [constraints]
availability → "high-availability" | "standard" | "best-effort"
sites → site ("," site)* "and" site
site → SITE_NAME [location] [role]
location → "in" CITY_NAME
role → "(" ("hub" | "core" | "edge") ")"
constraints → constraint+
constraint → redundancy | latency | budget | compliance
redundancy → "support continuous operation with at least" INT "geographically disjoint fiber paths between each pair of sites"
latency → "Maximum acceptable latency per path is" INT "milliseconds"
budget → "Our total budget for components is" VALID_DOLLAR
compliance → "compliant with" STANDARD_ID ("," STANDARD_ID)*
VALID_DOLLAR → "$" INT
INT → positive integer
SITE_NAME → uppercase identifier matching [A-Z][A-Z0-9_]{0,31}
CITY_NAME → capitalized word sequence, or a "double-quoted string"
STANDARD_ID → an identifier from the supported standards list

Fixed phrases are matched case-insensitively; SITE_NAME is case-sensitive.
Each constraint kind may appear at most once.
'''


class GrammarErrorKind(Enum):
    MISSING_SITES = "MissingSites"
    VAGUE_VALUE = "VagueValue"
    INVALID_ROLE = "InvalidRole"
    INVALID_COMPLIANCE = "InvalidCompliance"
    SYNTAX_MALFORMATION = "SyntaxMalformation"


@dataclass(frozen=True)
class IntentSentence:
    """A grammar-shaped candidate sentence (not the user's free-form input)."""

    raw_text: str


@dataclass(frozen=True)
class SiteSpec:
    name: str
    location: Optional[str] = None
    role: Optional[str] = None


@dataclass(frozen=True)
class ConstraintSet:
    latency_ms: Optional[int] = None
    budget_usd: Optional[int] = None
    disjoint_paths: Optional[int] = None
    compliance: Optional[tuple[str, ...]] = None
    availability: Optional[str] = None


@dataclass(frozen=True)
class StructuredIntent:
    sites: tuple[SiteSpec, ...]
    constraints: ConstraintSet

    def to_json_dict(self) -> dict:
        out: dict = {}
        if self.constraints.availability is not None:
            out["availability"] = self.constraints.availability
        sites = []
        for s in self.sites:
            entry: dict = {"name": s.name}
            if s.location is not None:
                entry["location"] = s.location
            if s.role is not None:
                entry["role"] = s.role
            sites.append(entry)
        out["sites"] = sites
        cons: dict = {}
        if self.constraints.latency_ms is not None:
            cons["latency_ms"] = self.constraints.latency_ms
        if self.constraints.budget_usd is not None:
            cons["budget_usd"] = self.constraints.budget_usd
        if self.constraints.disjoint_paths is not None:
            cons["disjoint_paths"] = self.constraints.disjoint_paths
        if self.constraints.compliance is not None:
            cons["compliance"] = list(self.constraints.compliance)
        out["constraints"] = cons
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "StructuredIntent":
        sites = tuple(
            SiteSpec(
                name=s["name"],
                location=s.get("location"),
                role=s.get("role"),
            )
            for s in data["sites"]
        )
        cons = data.get("constraints", {})
        compliance = cons.get("compliance")
        return cls(
            sites=sites,
            constraints=ConstraintSet(
                latency_ms=cons.get("latency_ms"),
                budget_usd=cons.get("budget_usd"),
                disjoint_paths=cons.get("disjoint_paths"),
                compliance=tuple(compliance) if compliance is not None else None,
                availability=data.get("availability"),
            ),
        )


@dataclass(frozen=True)
class GrammarError:
    kind: GrammarErrorKind
    position: int
    offending_token: str
    message: str

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "position": self.position,
            "offending_token": self.offending_token,
            "message": self.message,
        }


ParseOutcome = Union[StructuredIntent, GrammarError]


def grammar_text() -> str:
    """The canonical grammar, suitable for embedding in LLM prompts."""
    return GRAMMAR_TEXT


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_PUNCT = {"(", ")", ",", "$"}
# Words may carry interior dots/hyphens/underscores (standard ids like G.652,
# terms like high-availability) but never leading/trailing ones.
_TOKEN_RE = re.compile(
    r'"[^"]*"'
    r"|[A-Za-z0-9]+(?:[.\-_][A-Za-z0-9]+)*"
    r"|[(),$]"
)


@dataclass(frozen=True)
class _Token:
    text: str
    pos: int
    quoted: bool = False


class _Fail(Exception):
    def __init__(self, error: GrammarError):
        super().__init__(error.message)
        self.error = error


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace() or ch == ".":
            # Stray periods (sentence-final punctuation) are trivia.
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise _Fail(GrammarError(
                kind=GrammarErrorKind.SYNTAX_MALFORMATION,
                position=i,
                offending_token=ch,
                message=f'unexpected character "{ch}"',
            ))
        raw = m.group(0)
        if raw.startswith('"'):
            tokens.append(_Token(text=raw[1:-1], pos=i, quoted=True))
        else:
            tokens.append(_Token(text=raw, pos=i))
        i = m.end()
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, tokens: list[_Token], allowlist: Collection[str]):
        self.text = text
        self.tokens = tokens
        self.allowlist = frozenset(allowlist)
        self.i = 0

    # -- token helpers ------------------------------------------------------

    def peek(self, ahead: int = 0) -> Optional[_Token]:
        j = self.i + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_end(self) -> bool:
        return self.i >= len(self.tokens)

    def fail(self, kind: GrammarErrorKind, token: Optional[_Token], message: str) -> None:
        pos = token.pos if token is not None else len(self.text)
        text = token.text if token is not None else ""
        raise _Fail(GrammarError(kind=kind, position=pos, offending_token=text, message=message))

    def syntax(self, token: Optional[_Token], message: str) -> None:
        self.fail(GrammarErrorKind.SYNTAX_MALFORMATION, token, message)

    def expect_phrase(self, words: Sequence[str], context: str) -> None:
        for word in words:
            tok = self.peek()
            if tok is None:
                self.syntax(None, f'sentence ends where "{word}" was expected in {context}')
            if tok.quoted or tok.text.lower() != word:
                self.syntax(tok, f'expected "{word}" in {context}, got "{tok.text}"')
            self.advance()

    def expect_int(self, context: str) -> int:
        tok = self.peek()
        if tok is None:
            self.syntax(None, f"sentence ends where a number was expected in {context}")
        if not tok.quoted and INT_RE.match(tok.text):
            value = int(tok.text)
            if value <= 0:
                self.syntax(tok, f"{context} must be a positive integer, got {value}")
            self.advance()
            return value
        if not tok.quoted and WORD_RE.match(tok.text):
            self.fail(
                GrammarErrorKind.VAGUE_VALUE, tok,
                f'"{tok.text}" occupies the INT slot in {context}; a specific number is required',
            )
        self.syntax(tok, f'expected a number in {context}, got "{tok.text}"')
        raise AssertionError("unreachable")

    # -- productions --------------------------------------------------------

    def parse(self) -> StructuredIntent:
        self.expect_phrase(_OPENING, "the opening phrase")
        availability = None
        tok = self.peek()
        if tok is not None and not tok.quoted and tok.text.lower() in AVAILABILITY_TIERS:
            availability = tok.text.lower()
            self.advance()
        self.expect_phrase(_CONNECTING, "the opening phrase")
        sites = self.parse_sites()
        constraints = self.parse_constraints(availability)
        if not self.at_end():
            self.syntax(self.peek(), f'unexpected trailing token "{self.peek().text}"')
        return StructuredIntent(sites=tuple(sites), constraints=constraints)

    def _looks_like_site(self, tok: Optional[_Token]) -> bool:
        return tok is not None and not tok.quoted and SITE_NAME_RE.match(tok.text) is not None

    def parse_sites(self) -> list[SiteSpec]:
        sites: list[SiteSpec] = []
        name_tokens: list[_Token] = []

        def missing(tok: Optional[_Token]) -> None:
            self.fail(
                GrammarErrorKind.MISSING_SITES, tok,
                "fewer than two sites specified; the intent must name at least "
                "two sites to connect",
            )

        def broken(tok: Optional[_Token], message: str) -> None:
            # Structural breaks after two complete sites are formatting
            # defects; with fewer the sites clause itself is deficient.
            if len(sites) < 2:
                missing(tok)
            self.syntax(tok, message)

        if not self._looks_like_site(self.peek()):
            missing(self.peek())
        sites.append(self.parse_site(name_tokens))

        while self.peek() is not None and self.peek().text == ",":
            self.advance()
            if not self._looks_like_site(self.peek()):
                broken(self.peek(), "expected a site name after ','")
            sites.append(self.parse_site(name_tokens))

        tok = self.peek()
        if tok is None or tok.quoted or tok.text.lower() != "and":
            # The list grammar requires "and" before the final site.
            broken(tok, "expected 'and' before the final site")
        self.advance()
        if not self._looks_like_site(self.peek()):
            broken(self.peek(), "expected a site name after 'and'")
        sites.append(self.parse_site(name_tokens))

        seen: dict[str, _Token] = {}
        for spec, tok in zip(sites, name_tokens):
            if spec.name in seen:
                self.syntax(tok, f'duplicate site name "{spec.name}"')
            seen[spec.name] = tok
        return sites

    def parse_site(self, name_tokens: list[_Token]) -> SiteSpec:
        name_tok = self.advance()
        name_tokens.append(name_tok)
        location = None
        role = None

        tok = self.peek()
        if tok is not None and not tok.quoted and tok.text.lower() == "in":
            self.advance()
            location = self.parse_city()

        tok = self.peek()
        if tok is not None and tok.text == "(":
            self.advance()
            role_tok = self.peek()
            if role_tok is None:
                self.syntax(None, "sentence ends inside a role annotation")
            if role_tok.quoted or role_tok.text.lower() not in ROLES:
                self.fail(
                    GrammarErrorKind.INVALID_ROLE, role_tok,
                    f'"{role_tok.text}" is not a valid role; valid roles are '
                    "hub, core, edge",
                )
            role = role_tok.text.lower()
            self.advance()
            close = self.peek()
            if close is None or close.text != ")":
                self.syntax(close, "expected ')' to close the role annotation")
            self.advance()

        return SiteSpec(name=name_tok.text, location=location, role=role)

    def parse_city(self) -> str:
        tok = self.peek()
        if tok is None:
            self.syntax(None, "sentence ends where a city name was expected after 'in'")
        if tok.quoted:
            self.advance()
            if not tok.text:
                self.syntax(tok, "quoted city name is empty")
            return tok.text
        words: list[str] = []
        while True:
            tok = self.peek()
            if tok is None or tok.quoted:
                break
            lowered = tok.text.lower()
            if tok.text in _PUNCT or lowered == "and" or lowered in _CONSTRAINT_STARTERS:
                break
            if not CITY_WORD_RE.match(tok.text) or any(c.isdigit() for c in tok.text):
                break
            words.append(tok.text)
            self.advance()
        if not words:
            self.syntax(self.peek(), "expected a capitalized city name after 'in'")
        return " ".join(words)

    def parse_constraints(self, availability: Optional[str]) -> ConstraintSet:
        latency_ms = None
        budget_usd = None
        disjoint_paths = None
        compliance: Optional[tuple[str, ...]] = None
        seen: set[str] = set()

        while not self.at_end():
            tok = self.peek()
            clause = None if tok.quoted else _CONSTRAINT_STARTERS.get(tok.text.lower())
            if clause is None:
                self.syntax(
                    tok,
                    f'unexpected token "{tok.text}"; expected a constraint clause '
                    "(redundancy, latency, budget or compliance)",
                )
            if clause in seen:
                self.syntax(tok, f"duplicate {clause} clause")
            seen.add(clause)

            if clause == "redundancy":
                self.expect_phrase(_REDUNDANCY_PREFIX, "the redundancy clause")
                disjoint_paths = self.expect_int("the disjoint-path count")
                self.expect_phrase(_REDUNDANCY_SUFFIX, "the redundancy clause")
            elif clause == "latency":
                self.expect_phrase(_LATENCY_PREFIX, "the latency clause")
                latency_ms = self.expect_int("the latency bound")
                self.expect_phrase(_LATENCY_SUFFIX, "the latency clause")
            elif clause == "budget":
                self.expect_phrase(_BUDGET_PREFIX, "the budget clause")
                budget_usd = self.parse_dollar()
            else:
                self.expect_phrase(_COMPLIANCE_PREFIX, "the compliance clause")
                compliance = tuple(self.parse_standard_list())

        return ConstraintSet(
            latency_ms=latency_ms,
            budget_usd=budget_usd,
            disjoint_paths=disjoint_paths,
            compliance=compliance,
            availability=availability,
        )

    def parse_dollar(self) -> int:
        tok = self.peek()
        if tok is None:
            self.syntax(None, 'sentence ends where a VALID_DOLLAR amount ("$" INT) was expected')
        if tok.text == "$":
            self.advance()
            return self.expect_int("the budget amount")
        if not tok.quoted and INT_RE.match(tok.text):
            self.syntax(
                tok,
                f'budget must be written as VALID_DOLLAR ("$" INT); got "{tok.text}" '
                'without the leading "$"',
            )
        if not tok.quoted and WORD_RE.match(tok.text):
            self.fail(
                GrammarErrorKind.VAGUE_VALUE, tok,
                f'"{tok.text}" occupies the VALID_DOLLAR slot in the budget clause; '
                "a specific dollar amount is required",
            )
        self.syntax(tok, f'expected a VALID_DOLLAR amount ("$" INT), got "{tok.text}"')
        raise AssertionError("unreachable")

    def parse_standard_list(self) -> list[str]:
        standards: list[str] = []
        while True:
            tok = self.peek()
            if tok is None:
                self.syntax(None, "sentence ends where a standard identifier was expected")
            if tok.quoted or tok.text not in self.allowlist:
                self.fail(
                    GrammarErrorKind.INVALID_COMPLIANCE, tok,
                    f'"{tok.text}" is not a supported standard identifier',
                )
            standards.append(tok.text)
            self.advance()
            nxt = self.peek()
            if nxt is not None and nxt.text == ",":
                self.advance()
                continue
            return standards


def default_allowlist() -> tuple[str, ...]:
    """Compliance allowlist derived from the bundled standards corpus."""
    from opticopilot import retrieval  # deferred: retrieval imports this module

    return tuple(retrieval.default_corpus().allowlist_standards())


def parse_intent(
    sentence: Union[str, IntentSentence],
    allowlist: Optional[Collection[str]] = None,
) -> ParseOutcome:
    """Parse a grammar-shaped sentence into a StructuredIntent.

    Returns the leftmost GrammarError on failure; never raises for input
    content. ``allowlist`` overrides the bundled compliance allowlist.
    """
    text = sentence.raw_text if isinstance(sentence, IntentSentence) else sentence
    if not text or not text.strip():
        return GrammarError(
            kind=GrammarErrorKind.SYNTAX_MALFORMATION,
            position=0,
            offending_token="",
            message="empty sentence",
        )
    if allowlist is None:
        allowlist = default_allowlist()
    try:
        tokens = _lex(text)
        return _Parser(text, tokens, allowlist).parse()
    except _Fail as f:
        return f.error
