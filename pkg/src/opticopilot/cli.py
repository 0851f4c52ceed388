"""Command-line client for the pipeline.

Exit codes: 0 success, 2 grammar error, 3 infeasible, 4 transport error,
5 configuration error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from opticopilot.config import AppConfig, build_runtime, load_config
from opticopilot.errors import (
    ConfigurationError,
    CorpusShapeError,
    MockRuleMissError,
    PddlError,
    ResourceLimitError,
    TransportError,
)
from opticopilot.grammar import GrammarError, StructuredIntent, parse_intent
from opticopilot.pipeline import Pipeline, SessionState
from opticopilot.planning import (
    DeploymentPlan,
    generate_problem,
    parse_domain,
    parse_problem,
    render_problem,
    solve,
    validate_plan,
)
from opticopilot.synthesis import degrade, translate
from opticopilot.triage import triage

EXIT_OK = 0
EXIT_GRAMMAR = 2
EXIT_INFEASIBLE = 3
EXIT_TRANSPORT = 4
EXIT_CONFIG = 5


def _echo_json(data: dict) -> None:
    click.echo(json.dumps(data, indent=2))


def _read_text_arg(source: str) -> str:
    if source == "-":
        return sys.stdin.read().strip()
    return Path(source).read_text(encoding="utf-8").strip()


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="TOML configuration file.")
@click.pass_context
def main(ctx, config_path):
    """Intent-to-design copilot for optical networks."""
    ctx.ensure_object(dict)
    try:
        ctx.obj["config"] = load_config(config_path)
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)


def _runtime(ctx):
    try:
        return build_runtime(ctx.obj["config"])
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)


@main.command("parse")
@click.argument("source")
@click.pass_context
def parse_cmd(ctx, source):
    """Parse a grammar-shaped sentence from FILE (or - for stdin)."""
    runtime = _runtime(ctx)
    outcome = parse_intent(_read_text_arg(source),
                           allowlist=runtime.corpus.allowlist_standards())
    if isinstance(outcome, GrammarError):
        decision = triage(outcome, standards=runtime.corpus.allowlist_standards())
        _echo_json({
            "error": outcome.to_json_dict(),
            "route": decision.route.value,
            "hint": decision.hint,
        })
        ctx.exit(EXIT_GRAMMAR)
    _echo_json(outcome.to_json_dict())


def _load_intent(path: str) -> StructuredIntent:
    return StructuredIntent.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


@main.command("plan")
@click.argument("intent_json", type=click.Path(exists=True))
@click.option("--out", type=click.Path(), default=None, help="Write the plan JSON here.")
@click.option("--problem-out", type=click.Path(), default=None,
              help="Also write the generated problem as PDDL.")
@click.pass_context
def plan_cmd(ctx, intent_json, out, problem_out):
    """Enrich an intent JSON file and solve its deployment problem."""
    runtime = _runtime(ctx)
    intent = _load_intent(intent_json)
    enriched = runtime.corpus.retrieve(intent, top_k=runtime.top_k)
    try:
        problem = generate_problem(
            enriched, domain=runtime.domain,
            strict_redundancy=runtime.strict_redundancy,
        )
        plan = solve(runtime.domain, problem, grounding_cap=runtime.grounding_cap)
    except ResourceLimitError as exc:
        click.echo(f"resource limit: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    if problem_out:
        Path(problem_out).write_text(render_problem(problem), encoding="utf-8")
    if plan.feasible:
        report = validate_plan(runtime.domain, problem, plan)
        plan = plan.mark_validated() if report.valid else plan
    payload = plan.to_json_dict()
    if out:
        Path(out).write_text(json.dumps(payload, indent=2), encoding="utf-8")
    click.echo(plan.render_text())
    if not plan.feasible:
        ctx.exit(EXIT_INFEASIBLE)


@main.command("design")
@click.argument("intent_json", type=click.Path(exists=True))
@click.option("--markdown", is_flag=True, help="Render Markdown instead of JSON.")
@click.pass_context
def design_cmd(ctx, intent_json, markdown):
    """Produce a full network design (or a degraded sketch) from an intent JSON."""
    runtime = _runtime(ctx)
    intent = _load_intent(intent_json)
    enriched = runtime.corpus.retrieve(intent, top_k=runtime.top_k)

    verdict = None
    if intent.constraints.latency_ms is not None:
        from opticopilot.feasibility import check_latency

        verdict = check_latency(intent, runtime.registry)
    if verdict is not None and not verdict.feasible:
        degraded = degrade(
            enriched,
            "goal (latency-satisfied) is unsatisfiable: " + verdict.narrative,
            price_table=runtime.price_table,
        )
        click.echo(degraded.to_markdown() if markdown
                   else json.dumps(degraded.to_json_dict(), indent=2))
        ctx.exit(EXIT_INFEASIBLE)

    problem = generate_problem(
        enriched, domain=runtime.domain, strict_redundancy=runtime.strict_redundancy
    )
    plan = solve(runtime.domain, problem, grounding_cap=runtime.grounding_cap)
    if not plan.feasible:
        degraded = degrade(enriched, plan.infeasibility_reason,
                           price_table=runtime.price_table)
        click.echo(degraded.to_markdown() if markdown
                   else json.dumps(degraded.to_json_dict(), indent=2))
        ctx.exit(EXIT_INFEASIBLE)
    assert validate_plan(runtime.domain, problem, plan).valid
    design = translate(
        plan.mark_validated(), enriched,
        registry=runtime.registry,
        price_table=runtime.price_table,
        durations=runtime.durations,
    )
    click.echo(design.to_markdown() if markdown
               else json.dumps(design.to_json_dict(), indent=2))


@main.command("pipeline")
@click.argument("text")
@click.pass_context
def pipeline_cmd(ctx, text):
    """Run the full intent pipeline end to end on TEXT."""
    runtime = _runtime(ctx)
    pipe = Pipeline(runtime)
    session = pipe.new_session()
    try:
        pipe.submit_intent(session, text)
    except (TransportError, MockRuleMissError) as exc:
        click.echo(f"gateway error: {exc}", err=True)
        ctx.exit(EXIT_TRANSPORT)

    click.echo(f"session {session.id}: {session.state.value}")
    for event in session.history:
        click.echo(f"  [{event.stage}] -> {event.state} ({event.duration_ms:.1f} ms)")

    if session.state is SessionState.AWAITING_CLARIFICATION:
        click.echo(f"clarification needed: {session.clarification_hint}")
        ctx.exit(EXIT_GRAMMAR)
    if session.state is SessionState.FAILED:
        click.echo(f"failed: {session.artifacts['failure']['cause']}", err=True)
        ctx.exit(EXIT_TRANSPORT)
    if session.state is SessionState.DEGRADED:
        click.echo(session.artifacts["degraded"].to_markdown())
        ctx.exit(EXIT_INFEASIBLE)
    click.echo(session.artifacts["design"].to_markdown())


@main.command("eval")
@click.argument("corpus_path", required=False, type=click.Path())
@click.option("--bypass-llm", is_flag=True,
              help="Feed canonical sentences straight to the parser.")
@click.option("--json", "as_json", is_flag=True, help="Emit the report as JSON.")
@click.pass_context
def eval_cmd(ctx, corpus_path, bypass_llm, as_json):
    """Run the evaluation corpus and print the metrics tables."""
    from opticopilot.evalharness import default_corpus_path, load_corpus, run_eval

    runtime = _runtime(ctx)
    try:
        corpus = load_corpus(corpus_path or default_corpus_path())
    except CorpusShapeError as exc:
        click.echo(f"corpus error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    try:
        report, details = run_eval(
            corpus, runtime.gateway,
            runtime.corpus.allowlist_standards(),
            bypass_llm=bypass_llm,
        )
    except (TransportError, MockRuleMissError) as exc:
        click.echo(f"gateway error: {exc}", err=True)
        ctx.exit(EXIT_TRANSPORT)
    if as_json:
        _echo_json({"report": report.to_json_dict(), "details": details})
    else:
        click.echo(report.render_text())
        failures = [d for d in details if not d["ok"]]
        if failures:
            click.echo("\nDeviating cases:")
            for d in failures:
                click.echo(f"  {d['id']}: expected {d['expected']}, observed {d['observed']}")


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--data-dir", default=None, help="Session store directory.")
@click.pass_context
def serve_cmd(ctx, host, port, data_dir):
    """Run the HTTP service."""
    import uvicorn

    from opticopilot.service.app import create_app

    config: AppConfig = ctx.obj["config"]
    if data_dir:
        from dataclasses import replace

        config = replace(config, sessions_dir=data_dir)
    try:
        app = create_app(config=config)
    except ConfigurationError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    uvicorn.run(app, host=host, port=port)


@main.command("validate")
@click.argument("domain_pddl", type=click.Path(exists=True))
@click.argument("problem_pddl", type=click.Path(exists=True))
@click.argument("plan_json", type=click.Path(exists=True))
@click.pass_context
def validate_cmd(ctx, domain_pddl, problem_pddl, plan_json):
    """Check a plan against a domain and problem."""
    try:
        domain = parse_domain(Path(domain_pddl).read_text(encoding="utf-8"))
        problem = parse_problem(Path(problem_pddl).read_text(encoding="utf-8"), domain)
    except PddlError as exc:
        click.echo(f"PDDL error: {exc}", err=True)
        ctx.exit(EXIT_CONFIG)
    plan = DeploymentPlan.from_json_dict(json.loads(Path(plan_json).read_text(encoding="utf-8")))
    if not plan.feasible:
        click.echo("plan is marked infeasible; nothing to validate", err=True)
        ctx.exit(EXIT_INFEASIBLE)
    report = validate_plan(domain, problem, plan)
    click.echo(report.describe())
    if not report.valid:
        ctx.exit(EXIT_INFEASIBLE)


if __name__ == "__main__":
    main()
