"""Four-stage assessment pipeline and scenario comparison.

Stages: modify exploitability metrics per environment, score and normalize
each CVE, aggregate per asset through the attack-tree formulas, then iterate
the FCM to equilibrium. Every intermediate lands in the report so a row can
be audited end to end.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from decimal import Decimal
from typing import Any, Mapping, Sequence

from .attack_tree import AssetAggregate, Relation, aggregate_asset
from .cvss import ExploitabilityVector, exploitability_score, normalize, parse_vector
from .environment import modify_vector
from .fcm import FcmConfig, IterationTrace, Scale, build_fcm, rescale, run_to_equilibrium
from .nvd import CveRecord
from .rounding import as_decimal, round_half_up
from .scenario import ScenarioModel


class UnresolvedVectorError(Exception):
    """A vulnerability has neither an inline vector nor a fetched record."""

    def __init__(self, vuln_id: str, cve_id: str):
        super().__init__(
            f"stage resolve: vulnerability {vuln_id!r} ({cve_id}) has no vector; "
            "fetch it or inline it in the scenario"
        )
        self.vuln_id = vuln_id
        self.cve_id = cve_id


class TargetMismatchError(ValueError):
    """Compared reports do not assess the same target concept."""


@dataclass(frozen=True)
class CveAssessment:
    """One vulnerability's trip through stages 1 and 2 (Tables 6-9 shape)."""

    vuln_id: str
    cve_id: str
    asset_id: str
    original_vector: ExploitabilityVector
    original_score: float
    modified_vector: ExploitabilityVector
    modified_score: float
    vulnerability_score: float


@dataclass(frozen=True)
class TargetValue:
    unit: float
    ten: float
    cvss39: float


@dataclass(frozen=True)
class AssessmentReport:
    scenario_name: str
    attacker_id: str
    target_id: str
    per_cve: tuple[CveAssessment, ...]
    per_asset: tuple[AssetAggregate, ...]
    trace: IterationTrace
    target_value: TargetValue
    converged: bool
    iterations_used: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "scenario": self.scenario_name,
            "attacker": self.attacker_id,
            "target": self.target_id,
            "per_cve": [
                {
                    "id": c.vuln_id,
                    "cve": c.cve_id,
                    "asset": c.asset_id,
                    "original_vector": c.original_vector.render(),
                    "original_score": c.original_score,
                    "modified_vector": c.modified_vector.render(modified=True),
                    "modified_score": c.modified_score,
                    "vulnerability_score": c.vulnerability_score,
                }
                for c in self.per_cve
            ],
            "per_asset": [
                {
                    "asset": a.asset_id,
                    "relation": a.relation.value if a.relation else None,
                    "inputs": list(a.inputs),
                    "value": a.value,
                }
                for a in self.per_asset
            ],
            "trace": self.trace.to_dict(),
            "target_value": {
                "unit": self.target_value.unit,
                "ten": self.target_value.ten,
                "cvss39": self.target_value.cvss39,
            },
            "converged": self.converged,
            "iterations_used": self.iterations_used,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AssessmentReport":
        per_cve = tuple(
            CveAssessment(
                vuln_id=c["id"],
                cve_id=c["cve"],
                asset_id=c["asset"],
                original_vector=parse_vector(c["original_vector"]),
                original_score=c["original_score"],
                modified_vector=parse_vector(c["modified_vector"]),
                modified_score=c["modified_score"],
                vulnerability_score=c["vulnerability_score"],
            )
            for c in data["per_cve"]
        )
        per_asset = tuple(
            AssetAggregate(
                asset_id=a["asset"],
                relation=Relation(a["relation"]) if a["relation"] else None,
                inputs=tuple(a["inputs"]),
                value=a["value"],
            )
            for a in data["per_asset"]
        )
        trace = IterationTrace(
            concepts=tuple(data["trace"]["concepts"]),
            states=tuple(tuple(s) for s in data["trace"]["states"]),
            converged=data["trace"]["converged"],
        )
        tv = data["target_value"]
        return cls(
            scenario_name=data["scenario"],
            attacker_id=data["attacker"],
            target_id=data["target"],
            per_cve=per_cve,
            per_asset=per_asset,
            trace=trace,
            target_value=TargetValue(unit=tv["unit"], ten=tv["ten"], cvss39=tv["cvss39"]),
            converged=data["converged"],
            iterations_used=data["iterations_used"],
        )


def resolve_vectors(
    model: ScenarioModel, records: Mapping[str, CveRecord] | None = None
) -> dict[str, ExploitabilityVector]:
    """Per vulnerability id, the base vector: inline first, records second."""
    resolved: dict[str, ExploitabilityVector] = {}
    records = records or {}
    for vuln in model.vulnerabilities:
        if vuln.vector is not None:
            resolved[vuln.id] = vuln.vector
        elif vuln.cve_id in records:
            resolved[vuln.id] = records[vuln.cve_id].exploitability()
        else:
            raise UnresolvedVectorError(vuln.id, vuln.cve_id)
    return resolved


def assess(
    model: ScenarioModel,
    records: Mapping[str, CveRecord] | None = None,
    config: FcmConfig | None = None,
) -> AssessmentReport:
    """Run the full pipeline on a scenario with resolved vectors.

    `config` overrides the scenario's FCM block when given. Non-convergence
    is not an error; it is reported through the converged flag.
    """
    vectors = resolve_vectors(model, records)
    assets = model.assets_by_id()

    per_cve = []
    scores_by_asset: dict[str, list[float]] = {}
    for vuln in model.vulnerabilities:
        base = vectors[vuln.id]
        modified = modify_vector(replace(vuln, vector=base), assets, model.mechanisms)
        modified_score = exploitability_score(modified)
        vulnerability_score = normalize(modified_score)
        per_cve.append(
            CveAssessment(
                vuln_id=vuln.id,
                cve_id=vuln.cve_id,
                asset_id=vuln.asset_id,
                original_vector=base,
                original_score=exploitability_score(base),
                modified_vector=modified,
                modified_score=modified_score,
                vulnerability_score=vulnerability_score,
            )
        )
        scores_by_asset.setdefault(vuln.asset_id, []).append(vulnerability_score)

    per_asset = tuple(
        aggregate_asset(asset.id, scores_by_asset[asset.id], asset.relation)
        for asset in model.assets
        if asset.id in scores_by_asset
    )
    aggregates = {a.asset_id: a.value for a in per_asset}

    fcm_model = build_fcm(
        [(e.source, e.target) for e in model.attack_edges],
        model.attacker_id,
        model.target_id,
        aggregates,
    )
    trace = run_to_equilibrium(fcm_model, config or model.fcm)
    equilibrium = trace.activation(model.target_id)
    target_value = TargetValue(
        unit=round_half_up(equilibrium, 4),
        ten=rescale(equilibrium, Scale.TEN),
        cvss39=rescale(equilibrium, Scale.CVSS39),
    )
    return AssessmentReport(
        scenario_name=model.name,
        attacker_id=model.attacker_id,
        target_id=model.target_id,
        per_cve=tuple(per_cve),
        per_asset=per_asset,
        trace=trace,
        target_value=target_value,
        converged=trace.converged,
        iterations_used=trace.iterations,
    )


@dataclass(frozen=True)
class ComparisonEntry:
    name: str
    value: float
    absolute_reduction: float
    percent_reduction: float


@dataclass(frozen=True)
class ComparisonReport:
    target_id: str
    baseline_name: str
    baseline_value: float
    variants: tuple[ComparisonEntry, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "target": self.target_id,
            "baseline": {"name": self.baseline_name, "value": self.baseline_value},
            "variants": [
                {
                    "name": v.name,
                    "value": v.value,
                    "absolute_reduction": v.absolute_reduction,
                    "percent_reduction": v.percent_reduction,
                }
                for v in self.variants
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ComparisonReport":
        return cls(
            target_id=data["target"],
            baseline_name=data["baseline"]["name"],
            baseline_value=data["baseline"]["value"],
            variants=tuple(
                ComparisonEntry(
                    name=v["name"],
                    value=v["value"],
                    absolute_reduction=v["absolute_reduction"],
                    percent_reduction=v["percent_reduction"],
                )
                for v in data["variants"]
            ),
        )


def compare(
    baseline: AssessmentReport, variants: Sequence[AssessmentReport]
) -> ComparisonReport:
    """Reductions of each variant against the baseline.

    Percentages come from the 4-decimal equilibrium values and are rounded
    half-up to 2 decimals.
    """
    rows = []
    base = as_decimal(baseline.target_value.unit)
    for variant in variants:
        if variant.target_id != baseline.target_id:
            raise TargetMismatchError(
                f"baseline targets {baseline.target_id!r} but "
                f"{variant.scenario_name!r} targets {variant.target_id!r}"
            )
        value = as_decimal(variant.target_value.unit)
        reduction = base - value
        rows.append(
            ComparisonEntry(
                name=variant.scenario_name,
                value=float(value),
                absolute_reduction=float(reduction),
                percent_reduction=round_half_up(Decimal(100) * reduction / base, 2),
            )
        )
    return ComparisonReport(
        target_id=baseline.target_id,
        baseline_name=baseline.scenario_name,
        baseline_value=baseline.target_value.unit,
        variants=tuple(rows),
    )
