"""TOML configuration and runtime assembly.

Everything defaults to the packaged data files; a config file only needs the
keys it overrides.
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from opticopilot.errors import ConfigurationError
from opticopilot.feasibility import SiteRegistry
from opticopilot.gateway import GatewayConfig, default_mock_rules_path
from opticopilot.pipeline import PipelineRuntime
from opticopilot.planning import DEFAULT_GROUNDING_CAP, parse_domain
from opticopilot.retrieval import DEFAULT_TOP_K, Corpus
from opticopilot.synthesis import load_durations, load_price_table


def _data_path(name: str) -> str:
    return str(resources.files("opticopilot").joinpath("data", name))


@dataclass(frozen=True)
class AppConfig:
    gateway: GatewayConfig = field(default_factory=GatewayConfig)
    corpus_dir: str = field(default_factory=lambda: _data_path("corpus"))
    registry_path: str = field(default_factory=lambda: _data_path("registry.csv"))
    domain_path: str = field(default_factory=lambda: _data_path("optical_domain.pddl"))
    price_table_path: str = field(default_factory=lambda: _data_path("price_table.csv"))
    durations_path: str = field(default_factory=lambda: _data_path("durations.csv"))
    eval_corpus_path: str = field(default_factory=lambda: _data_path("eval_corpus.json"))
    sessions_dir: str = "./sessions"
    grounding_cap: int = DEFAULT_GROUNDING_CAP
    strict_redundancy: bool = False
    top_k: int = DEFAULT_TOP_K
    step_mode: bool = False


def load_config(path: Optional[Union[str, Path]] = None) -> AppConfig:
    if path is None:
        return AppConfig()
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"bad TOML in {path}: {exc}") from exc

    gw = data.get("gateway", {})
    paths = data.get("paths", {})
    planner = data.get("planner", {})
    retrieval_cfg = data.get("retrieval", {})
    defaults = AppConfig()

    gateway = GatewayConfig(
        endpoint=gw.get("endpoint", defaults.gateway.endpoint),
        model=gw.get("model", defaults.gateway.model),
        timeout_s=float(gw.get("timeout_s", defaults.gateway.timeout_s)),
        temperature=0.0,
        mock=bool(gw.get("mock", defaults.gateway.mock)),
        mock_rules_path=gw.get("mock_rules") or None,
    )
    return AppConfig(
        gateway=gateway,
        corpus_dir=paths.get("corpus_dir", defaults.corpus_dir),
        registry_path=paths.get("registry", defaults.registry_path),
        domain_path=paths.get("domain", defaults.domain_path),
        price_table_path=paths.get("price_table", defaults.price_table_path),
        durations_path=paths.get("durations", defaults.durations_path),
        eval_corpus_path=paths.get("eval_corpus", defaults.eval_corpus_path),
        sessions_dir=paths.get("sessions_dir", defaults.sessions_dir),
        grounding_cap=int(planner.get("grounding_cap", defaults.grounding_cap)),
        strict_redundancy=bool(planner.get("strict_redundancy", defaults.strict_redundancy)),
        top_k=int(retrieval_cfg.get("top_k", defaults.top_k)),
    )


def build_runtime(config: Optional[AppConfig] = None) -> PipelineRuntime:
    """Load every resource the pipeline needs, fail-fast on bad paths."""
    if config is None:
        config = AppConfig()
    domain_path = Path(config.domain_path)
    if not domain_path.is_file():
        raise ConfigurationError(f"domain file not found: {domain_path}")
    gateway = config.gateway
    if gateway.mock and gateway.mock_rules_path is None:
        gateway = GatewayConfig(
            endpoint=gateway.endpoint,
            model=gateway.model,
            timeout_s=gateway.timeout_s,
            temperature=gateway.temperature,
            mock=True,
            mock_rules_path=default_mock_rules_path(),
        )
    return PipelineRuntime(
        domain=parse_domain(domain_path.read_text(encoding="utf-8")),
        corpus=Corpus.from_dir(config.corpus_dir),
        registry=SiteRegistry.from_csv(config.registry_path),
        gateway=gateway,
        price_table=load_price_table(config.price_table_path),
        durations=load_durations(config.durations_path),
        grounding_cap=config.grounding_cap,
        strict_redundancy=config.strict_redundancy,
        top_k=config.top_k,
        step_mode=config.step_mode,
    )
