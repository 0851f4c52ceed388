"""Boundary to an OpenAI-compatible chat-completion endpoint.

Ships a deterministic rule-table mock so the whole pipeline runs offline;
the mock is also how tests exercise the error paths (planted faulty outputs,
transport failures). The gateway never edits the model's answer.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

import requests

from opticopilot.errors import ConfigurationError, MockRuleMissError, TransportError
from opticopilot.grammar import IntentSentence, grammar_text

MAX_REPHRASE_ATTEMPTS = 3
API_KEY_ENV_VARS = ("OPTICOPILOT_API_KEY", "OPENAI_API_KEY")


@dataclass(frozen=True)
class RephraseRequest:
    user_text: str
    grammar: str
    correction_hint: Optional[str] = None
    attempt: int = 0

    def __post_init__(self):
        if self.attempt > MAX_REPHRASE_ATTEMPTS:
            raise ValueError(f"attempt {self.attempt} exceeds the retry bound")
        if self.grammar != grammar_text():
            raise ValueError("request grammar must match grammar_text() exactly")


@dataclass(frozen=True)
class GatewayConfig:
    endpoint: str = "https://api.openai.com/v1"
    model: str = "gpt-4o-mini"
    timeout_s: float = 30.0
    temperature: float = 0.0
    mock: bool = True
    mock_rules_path: Optional[str] = None


@dataclass(frozen=True)
class MockRule:
    match: str  # exact | substring | always
    pattern: str
    response: str

    def matches(self, text: str) -> bool:
        if self.match == "exact":
            return text == self.pattern
        if self.match == "substring":
            return self.pattern in text
        if self.match == "always":
            return True
        raise ConfigurationError(f"unknown mock matcher {self.match!r}")

    def respond(self, text: str) -> str:
        # An "always" rule with the empty response echoes the input, which
        # keeps corpus-scale runs from needing one identity rule per case.
        if self.match == "always" and not self.response:
            return text
        return self.response


def load_mock_rules(path: Union[str, Path]) -> tuple[MockRule, ...]:
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"mock rules file not found: {path}")
    data = json.loads(path.read_text(encoding="utf-8"))
    rules = []
    for entry in data.get("rules", []):
        rule = MockRule(
            match=entry["match"],
            pattern=entry.get("pattern", ""),
            response=entry.get("response", ""),
        )
        if rule.match not in ("exact", "substring", "always"):
            raise ConfigurationError(f"unknown mock matcher {rule.match!r}")
        rules.append(rule)
    return tuple(rules)


@lru_cache(maxsize=4)
def _cached_rules(path: str) -> tuple[MockRule, ...]:
    return load_mock_rules(path)


def default_mock_rules_path() -> str:
    return str(resources.files("opticopilot").joinpath("data", "mock_rules.json"))


@lru_cache(maxsize=1)
def _prompt_templates() -> dict:
    path = resources.files("opticopilot").joinpath("data", "prompts.json")
    return json.loads(path.read_text(encoding="utf-8"))


def build_messages(request: RephraseRequest) -> list[dict]:
    """Chat messages for the rephrase call; templates live in data/prompts.json."""
    templates = _prompt_templates()
    system = templates["system"].format(grammar=request.grammar)
    user = templates["user"].format(user_text=request.user_text)
    if request.correction_hint:
        user += "\n\n" + templates["retry_block"].format(
            hint=request.correction_hint,
            attempt=request.attempt,
            max_attempts=MAX_REPHRASE_ATTEMPTS,
        )
    return [
        {"role": "system", "content": system},
        {"role": "user", "content": user},
    ]


def _mock_rephrase(request: RephraseRequest, config: GatewayConfig) -> str:
    path = config.mock_rules_path or default_mock_rules_path()
    for rule in _cached_rules(str(path)):
        if rule.matches(request.user_text):
            return rule.respond(request.user_text)
    raise MockRuleMissError(
        f"no mock rule matches the request text: {request.user_text[:80]!r}"
    )


def _http_rephrase(request: RephraseRequest, config: GatewayConfig) -> str:
    api_key = next(
        (os.environ[var] for var in API_KEY_ENV_VARS if os.environ.get(var)), None
    )
    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {
        "model": config.model,
        "temperature": config.temperature,
        "messages": build_messages(request),
    }
    url = config.endpoint.rstrip("/") + "/chat/completions"
    try:
        response = requests.post(url, json=payload, headers=headers, timeout=config.timeout_s)
        response.raise_for_status()
        body = response.json()
        return body["choices"][0]["message"]["content"].strip()
    except requests.RequestException as exc:
        raise TransportError(f"chat-completion request failed: {exc}") from exc
    except (KeyError, IndexError, ValueError) as exc:
        raise TransportError(f"malformed chat-completion response: {exc}") from exc


def rephrase(request: RephraseRequest, config: GatewayConfig) -> IntentSentence:
    """One rephrase round trip. Returns the model's candidate sentence
    verbatim; transport problems raise TransportError, a mock miss raises
    MockRuleMissError."""
    if config.mock:
        text = _mock_rephrase(request, config)
    else:
        text = _http_rephrase(request, config)
    return IntentSentence(raw_text=text)
