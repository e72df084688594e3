"""Declarative scenario model: JSON schema, loading, validation.

A scenario is the full assessment input: assets with exposure and relation,
security mechanisms, vulnerabilities (vectors inline or fetched), directed
attack edges, the attacker and target designations, and FCM parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

from .attack_tree import Relation
from .cvss import ExploitabilityVector, VectorError, parse_vector
from .environment import Asset, Exposure, SecurityMechanism, Vulnerability
from .fcm import FcmConfig


class ScenarioError(Exception):
    """Base class for scenario loading failures."""


class ParseError(ScenarioError):
    """The document is not well-formed JSON."""


class SchemaError(ScenarioError):
    """A field is missing, unknown, or of the wrong shape."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(ScenarioError):
    """The document is well-formed but internally inconsistent."""

    def __init__(self, message: str, offender: str | None = None):
        super().__init__(message)
        self.offender = offender


@dataclass(frozen=True)
class AttackEdge:
    source: str
    target: str


@dataclass(frozen=True)
class ScenarioModel:
    name: str
    assets: tuple[Asset, ...]
    mechanisms: tuple[SecurityMechanism, ...]
    vulnerabilities: tuple[Vulnerability, ...]
    attack_edges: tuple[AttackEdge, ...]
    attacker_id: str
    target_id: str
    fcm: FcmConfig = field(default_factory=FcmConfig)

    def assets_by_id(self) -> dict[str, Asset]:
        return {a.id: a for a in self.assets}

    def vulnerabilities_of(self, asset_id: str) -> tuple[Vulnerability, ...]:
        return tuple(v for v in self.vulnerabilities if v.asset_id == asset_id)


def _require(obj: Mapping[str, Any], key: str, kind: type, path: str) -> Any:
    if key not in obj:
        raise SchemaError(f"missing required field {key!r}", path)
    value = obj[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        raise SchemaError(f"field {key!r} must be of type {kind.__name__}", path)
    return value


def _reject_unknown(obj: Mapping[str, Any], allowed: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown field(s): {', '.join(sorted(unknown))}", path)


def _enum_value(kind, raw: str, path: str):
    try:
        return kind(raw)
    except ValueError:
        options = ", ".join(m.value for m in kind)
        raise SchemaError(f"expected one of [{options}], got {raw!r}", path) from None


def _parse_asset(obj: Any, path: str) -> Asset:
    if not isinstance(obj, Mapping):
        raise SchemaError("asset entry must be an object", path)
    _reject_unknown(obj, {"id", "name", "layer", "exposure", "relation"}, path)
    asset_id = _require(obj, "id", str, path)
    exposure = _enum_value(Exposure, _require(obj, "exposure", str, path), f"{path}.exposure")
    relation = None
    if "relation" in obj:
        relation = _enum_value(Relation, _require(obj, "relation", str, path), f"{path}.relation")
    return Asset(
        id=asset_id,
        name=obj.get("name", asset_id),
        layer=_require(obj, "layer", str, path),
        exposure=exposure,
        relation=relation,
    )


def _parse_mechanism(obj: Any, path: str) -> SecurityMechanism:
    if not isinstance(obj, Mapping):
        raise SchemaError("mechanism entry must be an object", path)
    _reject_unknown(obj, {"id", "kind", "protects"}, path)
    protects = _require(obj, "protects", list, path)
    if not all(isinstance(p, str) for p in protects):
        raise SchemaError("field 'protects' must be a list of asset ids", path)
    return SecurityMechanism(
        id=_require(obj, "id", str, path),
        kind=_require(obj, "kind", str, path),
        protects=frozenset(protects),
    )


def _parse_vulnerability(obj: Any, path: str) -> Vulnerability:
    if not isinstance(obj, Mapping):
        raise SchemaError("vulnerability entry must be an object", path)
    _reject_unknown(obj, {"id", "cve", "asset", "vector", "cvss_score"}, path)
    vector: ExploitabilityVector | None = None
    if "vector" in obj:
        try:
            vector = parse_vector(_require(obj, "vector", str, path))
        except VectorError as exc:
            raise SchemaError(f"invalid vector string: {exc}", f"{path}.vector") from exc
    score = None
    if "cvss_score" in obj:
        score = _require(obj, "cvss_score", float, path)
    try:
        return Vulnerability(
            id=_require(obj, "id", str, path),
            cve_id=_require(obj, "cve", str, path),
            asset_id=_require(obj, "asset", str, path),
            vector=vector,
            base_cvss_score=score,
        )
    except ValueError as exc:
        raise SchemaError(str(exc), f"{path}.cve") from exc


def _parse_edge(obj: Any, path: str) -> AttackEdge:
    if not isinstance(obj, Mapping):
        raise SchemaError("attack edge must be an object", path)
    _reject_unknown(obj, {"from", "to"}, path)
    return AttackEdge(source=_require(obj, "from", str, path), target=_require(obj, "to", str, path))


def _parse_fcm(obj: Any, path: str) -> FcmConfig:
    if not isinstance(obj, Mapping):
        raise SchemaError("fcm block must be an object", path)
    _reject_unknown(obj, {"lambda", "epsilon", "max_iterations", "initial_activation"}, path)
    kwargs: dict[str, Any] = {}
    if "lambda" in obj:
        kwargs["lam"] = _require(obj, "lambda", float, path)
    if "epsilon" in obj:
        kwargs["epsilon"] = _require(obj, "epsilon", float, path)
    if "initial_activation" in obj:
        kwargs["initial_activation"] = _require(obj, "initial_activation", float, path)
    if "max_iterations" in obj:
        kwargs["max_iterations"] = _require(obj, "max_iterations", int, path)
    try:
        return FcmConfig(**kwargs)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from exc


def scenario_from_dict(data: Mapping[str, Any]) -> ScenarioModel:
    """Build and validate a scenario from parsed JSON data."""
    if not isinstance(data, Mapping):
        raise SchemaError("document root must be an object", "$")
    _reject_unknown(
        data,
        {"name", "assets", "mechanisms", "vulnerabilities", "attack_edges", "attacker", "target", "fcm"},
        "$",
    )
    assets = tuple(
        _parse_asset(a, f"assets[{i}]") for i, a in enumerate(_require(data, "assets", list, "$"))
    )
    mechanisms = tuple(
        _parse_mechanism(m, f"mechanisms[{i}]") for i, m in enumerate(data.get("mechanisms", []))
    )
    vulnerabilities = tuple(
        _parse_vulnerability(v, f"vulnerabilities[{i}]")
        for i, v in enumerate(_require(data, "vulnerabilities", list, "$"))
    )
    edges = tuple(
        _parse_edge(e, f"attack_edges[{i}]")
        for i, e in enumerate(_require(data, "attack_edges", list, "$"))
    )
    fcm = _parse_fcm(data.get("fcm", {}), "fcm")
    model = ScenarioModel(
        name=_require(data, "name", str, "$"),
        assets=assets,
        mechanisms=mechanisms,
        vulnerabilities=vulnerabilities,
        attack_edges=edges,
        attacker_id=_require(data, "attacker", str, "$"),
        target_id=_require(data, "target", str, "$"),
        fcm=fcm,
    )
    validate_scenario(model)
    return model


def scenario_to_dict(model: ScenarioModel) -> dict[str, Any]:
    """Render a scenario back into its JSON document form."""
    assets = []
    for a in model.assets:
        entry: dict[str, Any] = {"id": a.id, "name": a.name, "layer": a.layer, "exposure": a.exposure.value}
        if a.relation is not None:
            entry["relation"] = a.relation.value
        assets.append(entry)
    vulns = []
    for v in model.vulnerabilities:
        entry = {"id": v.id, "cve": v.cve_id, "asset": v.asset_id}
        if v.vector is not None:
            entry["vector"] = v.vector.render()
        if v.base_cvss_score is not None:
            entry["cvss_score"] = v.base_cvss_score
        vulns.append(entry)
    return {
        "name": model.name,
        "assets": assets,
        "mechanisms": [
            {"id": m.id, "kind": m.kind, "protects": sorted(m.protects)} for m in model.mechanisms
        ],
        "vulnerabilities": vulns,
        "attack_edges": [{"from": e.source, "to": e.target} for e in model.attack_edges],
        "attacker": model.attacker_id,
        "target": model.target_id,
        "fcm": {
            "lambda": model.fcm.lam,
            "epsilon": model.fcm.epsilon,
            "initial_activation": model.fcm.initial_activation,
            "max_iterations": model.fcm.max_iterations,
        },
    }


def parse_scenario(text: str) -> ScenarioModel:
    """Load a scenario from JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    return scenario_from_dict(data)


def load_scenario(path: str | Path) -> ScenarioModel:
    """Load a scenario from a JSON file."""
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def save_scenario(model: ScenarioModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(model), indent=2) + "\n", encoding="utf-8")


def validate_scenario(model: ScenarioModel) -> list[str]:
    """Check referential integrity and structural rules; return warnings.

    Raises ValidationError on the first violation. Cycles in the attack
    edges are legal for the FCM update rule and only produce a warning.
    """
    asset_ids = [a.id for a in model.assets]
    dup = _first_duplicate(asset_ids)
    if dup:
        raise ValidationError(f"duplicate asset id {dup!r}", offender=dup)
    dup = _first_duplicate([m.id for m in model.mechanisms])
    if dup:
        raise ValidationError(f"duplicate mechanism id {dup!r}", offender=dup)
    dup = _first_duplicate([v.id for v in model.vulnerabilities])
    if dup:
        raise ValidationError(f"duplicate vulnerability id {dup!r}", offender=dup)

    known = set(asset_ids)
    if model.attacker_id in known:
        raise ValidationError(
            f"attacker {model.attacker_id!r} must not also be a declared asset",
            offender=model.attacker_id,
        )
    if model.target_id not in known:
        raise ValidationError(f"target {model.target_id!r} is not a declared asset", offender=model.target_id)

    for m in model.mechanisms:
        if not m.protects:
            raise ValidationError(f"mechanism {m.id!r} protects no assets", offender=m.id)
        for asset_id in m.protects:
            if asset_id not in known:
                raise ValidationError(
                    f"mechanism {m.id!r} protects unknown asset {asset_id!r}", offender=asset_id
                )

    vuln_count: dict[str, int] = {a: 0 for a in known}
    for v in model.vulnerabilities:
        if v.asset_id not in known:
            raise ValidationError(
                f"vulnerability {v.id!r} references unknown asset {v.asset_id!r}",
                offender=v.asset_id,
            )
        vuln_count[v.asset_id] += 1

    for a in model.assets:
        if vuln_count[a.id] >= 2 and a.relation is None:
            raise ValidationError(
                f"asset {a.id!r} has {vuln_count[a.id]} vulnerabilities but no relation",
                offender=a.id,
            )
        if vuln_count[a.id] < 2 and a.relation is not None:
            raise ValidationError(
                f"asset {a.id!r} declares a relation but has fewer than 2 vulnerabilities",
                offender=a.id,
            )

    seen_edges: set[tuple[str, str]] = set()
    for e in model.attack_edges:
        if e.source != model.attacker_id and e.source not in known:
            raise ValidationError(f"attack edge from unknown asset {e.source!r}", offender=e.source)
        if e.target not in known:
            raise ValidationError(f"attack edge to unknown asset {e.target!r}", offender=e.target)
        if e.target == model.attacker_id:
            raise ValidationError(
                f"attacker {model.attacker_id!r} may only appear as an edge source",
                offender=model.attacker_id,
            )
        if (e.source, e.target) in seen_edges:
            raise ValidationError(
                f"duplicate attack edge {e.source!r} -> {e.target!r}", offender=e.target
            )
        seen_edges.add((e.source, e.target))
        if vuln_count[e.target] == 0:
            raise ValidationError(
                f"attack edge targets asset {e.target!r} which has no vulnerabilities",
                offender=e.target,
            )
        if e.source != model.attacker_id and vuln_count[e.source] == 0:
            raise ValidationError(
                f"attack edge leaves asset {e.source!r} which has no vulnerabilities",
                offender=e.source,
            )

    if vuln_count[model.target_id] == 0:
        raise ValidationError(
            f"target {model.target_id!r} has no vulnerabilities", offender=model.target_id
        )

    reachable = {model.attacker_id}
    frontier = [model.attacker_id]
    outgoing: dict[str, list[str]] = {}
    for e in model.attack_edges:
        outgoing.setdefault(e.source, []).append(e.target)
    while frontier:
        node = frontier.pop()
        for nxt in outgoing.get(node, ()):
            if nxt not in reachable:
                reachable.add(nxt)
                frontier.append(nxt)
    if model.target_id not in reachable:
        raise ValidationError(
            f"target {model.target_id!r} is not reachable from attacker {model.attacker_id!r}",
            offender=model.target_id,
        )

    warnings = []
    if _has_cycle(known | {model.attacker_id}, model.attack_edges):
        warnings.append("attack edges contain a cycle; the FCM update handles it, verify intent")
    return warnings


def _first_duplicate(ids: list[str]) -> str | None:
    seen: set[str] = set()
    for i in ids:
        if i in seen:
            return i
        seen.add(i)
    return None


def _has_cycle(nodes: set[str], edges: tuple[AttackEdge, ...]) -> bool:
    outgoing: dict[str, list[str]] = {}
    for e in edges:
        outgoing.setdefault(e.source, []).append(e.target)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in nodes}

    def visit(node: str) -> bool:
        color[node] = GRAY
        for nxt in outgoing.get(node, ()):
            if color[nxt] == GRAY:
                return True
            if color[nxt] == WHITE and visit(nxt):
                return True
        color[node] = BLACK
        return False

    return any(color[n] == WHITE and visit(n) for n in nodes)


def bundled_scenario_path(name: str) -> Path:
    """Path of a scenario shipped with the package (e.g. "base", "scenario_a")."""
    path = Path(str(resources.files("vulncrit.data.scenarios"))) / f"{name}.json"
    if not path.exists():
        raise FileNotFoundError(f"no bundled scenario named {name!r}")
    return path


def load_bundled_scenario(name: str) -> ScenarioModel:
    candidate = resources.files("vulncrit.data.scenarios") / f"{name}.json"
    try:
        text = candidate.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFoundError(f"no bundled scenario named {name!r}") from None
    return parse_scenario(text)
