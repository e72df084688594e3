"""Command-line front door: validate, fetch, assess, compare.

Exit codes: 0 success, 1 I/O or transport failure, 2 validation or usage
error, 3 computation failure (non-convergence under --strict).
"""

from __future__ import annotations

import dataclasses
import json
import os
import sys
from pathlib import Path

import click

from . import __version__
from .assessment import (
    AssessmentReport,
    TargetMismatchError,
    UnresolvedVectorError,
    assess as run_assessment,
    compare as run_comparison,
)
from .nvd import CVE_ID_PATTERN, NvdClient, NvdError, records_by_cve
from .render import (
    comparison_csv,
    comparison_json,
    format_comparison,
    format_report,
    report_json,
    trace_csv,
)
from .scenario import ScenarioError, ScenarioModel, load_scenario, validate_scenario

EXIT_OK = 0
EXIT_IO = 1
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: Path) -> ScenarioModel:
    try:
        return load_scenario(path)
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}")
    except ScenarioError as exc:
        _fail(EXIT_VALIDATION, f"{path}: {exc}")


def _default_cache_dir() -> Path:
    root = os.environ.get("XDG_CACHE_HOME") or str(Path.home() / ".cache")
    return Path(root) / "vulncrit"


def _make_client(offline: bool, cache_dir: Path | None, api_key_env: str | None) -> NvdClient:
    api_key = None
    if api_key_env:
        api_key = os.environ.get(api_key_env)
        if not api_key:
            _fail(EXIT_VALIDATION, f"environment variable {api_key_env} is not set")
    return NvdClient(
        cache_dir=cache_dir or _default_cache_dir(), offline=offline, api_key=api_key
    )


def _resolve_records(model: ScenarioModel, client: NvdClient, refresh: bool):
    try:
        return records_by_cve(client.prefetch(model, refresh=refresh))
    except NvdError as exc:
        _fail(EXIT_IO, str(exc))


def _override_fcm(model: ScenarioModel, epsilon, lam, max_iter) -> ScenarioModel:
    overrides = {}
    if epsilon is not None:
        overrides["epsilon"] = epsilon
    if lam is not None:
        overrides["lam"] = lam
    if max_iter is not None:
        overrides["max_iterations"] = max_iter
    if not overrides:
        return model
    try:
        cfg = dataclasses.replace(model.fcm, **overrides)
    except ValueError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    return dataclasses.replace(model, fcm=cfg)


def _assess_scenario(path, offline, cache_dir, api_key_env, refresh, epsilon, lam, max_iter) -> AssessmentReport:
    model = _override_fcm(_load(path), epsilon, lam, max_iter)
    records = {}
    if any(v.vector is None for v in model.vulnerabilities):
        client = _make_client(offline, cache_dir, api_key_env)
        records = _resolve_records(model, client, refresh)
    try:
        return run_assessment(model, records)
    except UnresolvedVectorError as exc:
        _fail(EXIT_IO, str(exc))
    except ValueError as exc:
        _fail(EXIT_VALIDATION, f"{path}: {exc}")


_shared_fetch_options = [
    click.option("--offline", is_flag=True, help="Never touch the network; cache misses fail."),
    click.option("--cache-dir", type=click.Path(path_type=Path), help="CVE record cache directory."),
    click.option("--api-key-env", metavar="VAR", help="Environment variable holding an NVD API key."),
    click.option("--refresh", is_flag=True, help="Bypass the cache and refetch records."),
]

_shared_fcm_options = [
    click.option("--epsilon", type=float, help="Convergence threshold override."),
    click.option("--lambda", "lam", type=float, help="Sigmoid steepness override."),
    click.option("--max-iter", type=int, help="Iteration cap override."),
]


def _with(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn

    return wrap


@click.group()
@click.version_option(version=__version__, prog_name="vulncrit")
def main():
    """Dynamic vulnerability criticality scoring for ICS/SCADA environments."""


@main.command()
@click.argument("scenario", type=click.Path(path_type=Path))
def validate(scenario: Path):
    """Load and validate a scenario file."""
    try:
        model = load_scenario(scenario)
    except OSError as exc:
        click.echo(json.dumps({"status": "error", "kind": "io", "message": str(exc)}))
        sys.exit(EXIT_IO)
    except ScenarioError as exc:
        diagnostic = {
            "status": "error",
            "kind": type(exc).__name__,
            "message": str(exc),
        }
        offender = getattr(exc, "offender", None)
        if offender:
            diagnostic["offender"] = offender
        path = getattr(exc, "path", None)
        if path:
            diagnostic["path"] = path
        click.echo(json.dumps(diagnostic))
        sys.exit(EXIT_VALIDATION)
    warnings = validate_scenario(model)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(
        f"OK: {model.name} ({len(model.assets)} assets, "
        f"{len(model.vulnerabilities)} vulnerabilities, {len(model.attack_edges)} edges, "
        f"attacker {model.attacker_id}, target {model.target_id})"
    )


@main.command()
@click.argument("scenario", type=click.Path(path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["table", "json", "csv"]), default="table")
@click.option("--trace", "show_trace", is_flag=True, help="Include the full iteration table.")
@click.option("--strict", is_flag=True, help="Exit 3 when the FCM does not converge.")
@_with(_shared_fetch_options)
@_with(_shared_fcm_options)
def assess(scenario, fmt, show_trace, strict, offline, cache_dir, api_key_env, refresh, epsilon, lam, max_iter):
    """Assess a scenario and report the target's dynamic vulnerability value."""
    report = _assess_scenario(
        scenario, offline, cache_dir, api_key_env, refresh, epsilon, lam, max_iter
    )
    if fmt == "json":
        click.echo(report_json(report), nl=False)
    elif fmt == "csv":
        click.echo(trace_csv(report.trace), nl=False)
    else:
        click.echo(format_report(report, include_trace=show_trace), nl=False)
    if not report.converged:
        click.echo(
            f"warning: no equilibrium within {report.iterations_used} iterations",
            err=True,
        )
        if strict:
            sys.exit(EXIT_COMPUTATION)


@main.command()
@click.argument("baseline", type=click.Path(path_type=Path))
@click.argument("variants", type=click.Path(path_type=Path), nargs=-1, required=True)
@click.option("--format", "fmt", type=click.Choice(["table", "json", "csv"]), default="table")
@click.option("--strict", is_flag=True, help="Exit 3 when any scenario does not converge.")
@_with(_shared_fetch_options)
@_with(_shared_fcm_options)
def compare(baseline, variants, fmt, strict, offline, cache_dir, api_key_env, refresh, epsilon, lam, max_iter):
    """Compare variant scenarios against a baseline (reduction at the target)."""
    reports = [
        _assess_scenario(p, offline, cache_dir, api_key_env, refresh, epsilon, lam, max_iter)
        for p in (baseline, *variants)
    ]
    if strict and not all(r.converged for r in reports):
        names = ", ".join(r.scenario_name for r in reports if not r.converged)
        _fail(EXIT_COMPUTATION, f"no equilibrium for: {names}")
    try:
        result = run_comparison(reports[0], reports[1:])
    except TargetMismatchError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if fmt == "json":
        click.echo(comparison_json(result), nl=False)
    elif fmt == "csv":
        click.echo(comparison_csv(result), nl=False)
    else:
        click.echo(format_comparison(result), nl=False)


@main.command()
@click.argument("cve_ids", nargs=-1)
@click.option("--scenario", "scenario_path", type=click.Path(path_type=Path),
              help="Fetch every unresolved CVE of a scenario instead of explicit ids.")
@_with(_shared_fetch_options)
def fetch(cve_ids, scenario_path, offline, cache_dir, api_key_env, refresh):
    """Fetch CVE records into the local cache and print their vectors."""
    if bool(cve_ids) == bool(scenario_path):
        raise click.UsageError("give either CVE ids or --scenario, not both or neither")
    for cve in cve_ids:
        if not CVE_ID_PATTERN.match(cve):
            raise click.BadParameter(f"{cve!r} is not a CVE identifier", param_hint="CVE_IDS")

    client = _make_client(offline, cache_dir, api_key_env)
    records = []
    if scenario_path:
        model = _load(scenario_path)
        try:
            records = client.prefetch(model, refresh=refresh)
        except NvdError as exc:
            _fail(EXIT_IO, str(exc))
    else:
        try:
            records = [client.fetch(cve, refresh=refresh) for cve in cve_ids]
        except NvdError as exc:
            _fail(EXIT_IO, str(exc))

    for record in records:
        score = "-" if record.base_score is None else f"{record.base_score:g}"
        click.echo(
            f"{record.cve_id}  {record.exploitability().render()}  "
            f"base {score}  ({record.source.value})"
        )
    click.echo(f"{len(records)} fetched")


if __name__ == "__main__":
    main()
