"""Guidance retrieval over the bundled optical-standards corpus.

Lexical BM25 scoring stands in for the neural retrieval stack; the Corpus
interface is the seam where an embedding-based retriever could be swapped in
without touching callers.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from opticopilot.errors import ConfigurationError
from opticopilot.grammar import StructuredIntent

BM25_K1 = 1.2
BM25_B = 0.75
DEFAULT_TOP_K = 5

_WORD = re.compile(r"\w+")


def tokenize(text: str) -> list[str]:
    return _WORD.findall(text.lower())


@dataclass(frozen=True)
class GuidanceDocument:
    doc_id: str
    standard: str
    topic_tags: tuple[str, ...]
    text: str
    applicability: str

    def contradicts(self, intent: StructuredIntent) -> bool:
        """True when the applicability predicate conflicts with the intent.

        Conditions are ';'-separated key=value terms with '|' alternatives;
        a condition contradicts only when the intent field is present with a
        value outside the alternatives. "always" never contradicts.
        """
        spec = self.applicability.strip().lower()
        if not spec or spec == "always":
            return False
        for condition in spec.split(";"):
            condition = condition.strip()
            if not condition or "=" not in condition:
                continue
            key, _, value = condition.partition("=")
            alternatives = {v.strip() for v in value.split("|")}
            if key.strip() == "availability":
                actual = intent.constraints.availability
                if actual is not None and actual not in alternatives:
                    return True
        return False


@dataclass(frozen=True)
class GuidanceHit:
    doc_id: str
    text: str
    score: float


@dataclass(frozen=True)
class EnrichedIntent:
    base: StructuredIntent
    guidance: tuple[GuidanceHit, ...]
    standards_cited: tuple[str, ...]

    def to_json_dict(self) -> dict:
        out = self.base.to_json_dict()
        out["guidance"] = [
            {"doc_id": g.doc_id, "text": g.text, "score": g.score} for g in self.guidance
        ]
        out["standards_cited"] = list(self.standards_cited)
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "EnrichedIntent":
        return cls(
            base=StructuredIntent.from_json_dict(data),
            guidance=tuple(
                GuidanceHit(g["doc_id"], g["text"], g["score"])
                for g in data.get("guidance", [])
            ),
            standards_cited=tuple(data.get("standards_cited", [])),
        )


def query_for_intent(intent: StructuredIntent) -> str:
    """Synthesize the retrieval query. Site names carry no domain signal and
    are deliberately excluded."""
    parts: list[str] = []
    if intent.constraints.availability:
        parts.append(intent.constraints.availability)
    for site in intent.sites:
        if site.role:
            parts.append(site.role)
    if intent.constraints.latency_ms is not None:
        parts.append("latency")
    if intent.constraints.budget_usd is not None:
        parts.append("budget")
    if intent.constraints.disjoint_paths is not None:
        parts.append("protection redundancy")
    if intent.constraints.compliance:
        parts.extend(intent.constraints.compliance)
    return " ".join(parts)


def _parse_document(path: Path) -> GuidanceDocument:
    raw = path.read_text(encoding="utf-8")
    lines = raw.splitlines()
    if not lines or lines[0].strip() != "---":
        raise ConfigurationError(f"{path}: missing '---' front-matter header")
    fields: dict[str, str] = {}
    body_start = None
    for idx, line in enumerate(lines[1:], start=1):
        if line.strip() == "---":
            body_start = idx + 1
            break
        if ":" not in line:
            raise ConfigurationError(f"{path}: bad front-matter line {line!r}")
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    if body_start is None:
        raise ConfigurationError(f"{path}: unterminated front-matter")
    body = "\n".join(lines[body_start:]).strip()
    for required in ("id", "standard", "topic_tags"):
        if not fields.get(required):
            raise ConfigurationError(f"{path}: front-matter missing {required!r}")
    if not body:
        raise ConfigurationError(f"{path}: empty document body")
    tags = tuple(t.strip().lower() for t in fields["topic_tags"].split(",") if t.strip())
    if not tags:
        raise ConfigurationError(f"{path}: topic_tags empty")
    return GuidanceDocument(
        doc_id=fields["id"],
        standard=fields["standard"],
        topic_tags=tags,
        text=body,
        applicability=fields.get("applicability", "always"),
    )


class Corpus:
    """Immutable document collection with precomputed BM25 statistics."""

    def __init__(self, documents: list[GuidanceDocument]):
        if not documents:
            raise ConfigurationError("guidance corpus is empty")
        ids = [d.doc_id for d in documents]
        if len(set(ids)) != len(ids):
            raise ConfigurationError("duplicate document ids in corpus")
        self.documents = sorted(documents, key=lambda d: d.doc_id)
        self._term_freqs = [
            Counter(tokenize(d.text) + [t for tag in d.topic_tags for t in tokenize(tag)])
            for d in self.documents
        ]
        self._doc_lens = [sum(tf.values()) for tf in self._term_freqs]
        self._avgdl = sum(self._doc_lens) / len(self.documents)
        df: Counter = Counter()
        for tf in self._term_freqs:
            for term in tf:
                df[term] += 1
        n = len(self.documents)
        # Lucene-style IDF: strictly positive, so every matched query term
        # can only increase a document's score.
        self._idf = {t: math.log(1.0 + (n - f + 0.5) / (f + 0.5)) for t, f in df.items()}

    @classmethod
    def from_dir(cls, directory: Union[str, Path]) -> "Corpus":
        directory = Path(directory)
        if not directory.is_dir():
            raise ConfigurationError(f"corpus directory not found: {directory}")
        docs = [_parse_document(p) for p in sorted(directory.glob("*.md"))]
        return cls(docs)

    def score(self, query: str) -> list[float]:
        """Raw BM25 score of every document against the query."""
        terms = tokenize(query)
        scores = []
        for tf, dl in zip(self._term_freqs, self._doc_lens):
            norm = BM25_K1 * (1 - BM25_B + BM25_B * dl / self._avgdl)
            s = 0.0
            for t in terms:
                f = tf.get(t)
                if not f:
                    continue
                s += self._idf[t] * (f * (BM25_K1 + 1)) / (f + norm)
            scores.append(s)
        return scores

    def retrieve(self, intent: StructuredIntent, top_k: int = DEFAULT_TOP_K) -> EnrichedIntent:
        """Top-k positively scoring, applicability-compatible documents."""
        if top_k < 1:
            raise ValueError("top_k must be >= 1")
        query = query_for_intent(intent)
        scores = self.score(query)
        candidates = [
            (doc, s)
            for doc, s in zip(self.documents, scores)
            if s > 0.0 and not doc.contradicts(intent)
        ]
        candidates.sort(key=lambda pair: (-pair[1], pair[0].doc_id))
        selected = candidates[:top_k]
        if selected:
            max_score = selected[0][1]
            hits = tuple(
                GuidanceHit(doc_id=d.doc_id, text=d.text, score=s / max_score)
                for d, s in selected
            )
        else:
            hits = ()
        cited = tuple(sorted({d.standard for d, _ in selected}))
        return EnrichedIntent(base=intent, guidance=hits, standards_cited=cited)

    def allowlist_standards(self) -> list[str]:
        """Distinct standards across the corpus; this is the compliance allowlist."""
        return sorted({d.standard for d in self.documents})


@lru_cache(maxsize=1)
def default_corpus() -> Corpus:
    corpus_dir = resources.files("opticopilot").joinpath("data", "corpus")
    return Corpus.from_dir(Path(str(corpus_dir)))


def retrieve(intent: StructuredIntent, top_k: int = DEFAULT_TOP_K) -> EnrichedIntent:
    """Enrich an intent against the bundled corpus."""
    return default_corpus().retrieve(intent, top_k=top_k)
