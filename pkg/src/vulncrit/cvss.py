"""CVSS 3.1 exploitability metrics: vector parsing, scoring, normalization.

Only the four exploitability metrics (AV, AC, PR, UI) are modeled. Impact,
scope, temporal and the environmental CR/IR/AR metrics are outside this
library's concern and are ignored when present in a full vector string.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from types import MappingProxyType

from .rounding import as_decimal, round_half_up

EXPLOITABILITY_COEFFICIENT = Decimal("8.22")
MAX_EXPLOITABILITY_SCORE = 3.9


class VectorError(ValueError):
    """Base class for exploitability vector parsing failures."""


class MalformedTokenError(VectorError):
    """A vector segment is not of the form METRIC:VALUE."""


class UnknownValueError(VectorError):
    """A metric carries a letter outside its allowed set."""

    def __init__(self, metric: str, value: str):
        super().__init__(f"unknown value {value!r} for metric {metric}")
        self.metric = metric
        self.value = value


class MissingMetricError(VectorError):
    """One or more of AV/AC/PR/UI is absent."""

    def __init__(self, missing: list[str]):
        super().__init__(f"missing exploitability metric(s): {', '.join(missing)}")
        self.missing = tuple(missing)


class DuplicateMetricError(VectorError):
    """The same metric appears twice with conflicting values."""

    def __init__(self, metric: str, first: str, second: str):
        super().__init__(
            f"metric {metric} given twice with conflicting values {first!r} and {second!r}"
        )
        self.metric = metric


class AttackVector(str, Enum):
    NETWORK = "N"
    ADJACENT = "A"
    LOCAL = "L"
    PHYSICAL = "P"

    @property
    def weight(self) -> float:
        return float(_AV_WEIGHTS[self])


class AttackComplexity(str, Enum):
    LOW = "L"
    HIGH = "H"

    @property
    def weight(self) -> float:
        return float(_AC_WEIGHTS[self])


class PrivilegesRequired(str, Enum):
    NONE = "N"
    LOW = "L"
    HIGH = "H"

    @property
    def weight(self) -> float:
        return float(_PR_WEIGHTS[self])


class UserInteraction(str, Enum):
    NONE = "N"
    REQUIRED = "R"

    @property
    def weight(self) -> float:
        return float(_UI_WEIGHTS[self])


# CVSS 3.1 exploitability weights. Immutable: scoring depends on these being
# exactly the published constants.
_AV_WEIGHTS: MappingProxyType = MappingProxyType({
    AttackVector.NETWORK: Decimal("0.85"),
    AttackVector.ADJACENT: Decimal("0.62"),
    AttackVector.LOCAL: Decimal("0.55"),
    AttackVector.PHYSICAL: Decimal("0.20"),
})
_AC_WEIGHTS: MappingProxyType = MappingProxyType({
    AttackComplexity.LOW: Decimal("0.77"),
    AttackComplexity.HIGH: Decimal("0.44"),
})
_PR_WEIGHTS: MappingProxyType = MappingProxyType({
    PrivilegesRequired.NONE: Decimal("0.85"),
    PrivilegesRequired.LOW: Decimal("0.62"),
    PrivilegesRequired.HIGH: Decimal("0.27"),
})
_UI_WEIGHTS: MappingProxyType = MappingProxyType({
    UserInteraction.NONE: Decimal("0.85"),
    UserInteraction.REQUIRED: Decimal("0.62"),
})

_METRIC_ENUMS = {
    "AV": AttackVector,
    "AC": AttackComplexity,
    "PR": PrivilegesRequired,
    "UI": UserInteraction,
}
_METRIC_ORDER = ("AV", "AC", "PR", "UI")


@dataclass(frozen=True)
class ExploitabilityVector:
    """The four CVSS 3.1 exploitability metrics of one CVE.

    The same type carries base and modified (MAV/MAC/MPR/MUI) metrics; which
    one an instance represents is determined by the stage that produced it.
    """

    av: AttackVector
    ac: AttackComplexity
    pr: PrivilegesRequired
    ui: UserInteraction

    def render(self, modified: bool = False) -> str:
        """Emit the canonical string form, e.g. "AV:N/AC:L/PR:N/UI:N"."""
        prefix = "M" if modified else ""
        parts = zip(_METRIC_ORDER, (self.av, self.ac, self.pr, self.ui))
        return "/".join(f"{prefix}{name}:{member.value}" for name, member in parts)


def parse_vector(text: str) -> ExploitabilityVector:
    """Extract the exploitability metrics from a CVSS 3.1 vector string.

    Accepts full vectors (optionally prefixed "CVSS:3.1/"), exploitability-only
    fragments, and modified spellings (MAV/MAC/MPR/MUI). Non-exploitability
    components (S, C, I, A, temporal, environmental) are ignored.
    """
    cleaned = text.strip()
    if not cleaned:
        raise MalformedTokenError("empty vector string")

    seen: dict[str, str] = {}
    for token in cleaned.split("/"):
        if not token:
            raise MalformedTokenError(f"empty segment in vector {text!r}")
        if ":" not in token:
            raise MalformedTokenError(f"expected METRIC:VALUE, got {token!r}")
        name, _, value = token.partition(":")
        if name == "CVSS":
            continue
        key = name[1:] if name.startswith("M") and name[1:] in _METRIC_ENUMS else name
        if key not in _METRIC_ENUMS:
            continue
        if key in seen and seen[key] != value:
            raise DuplicateMetricError(key, seen[key], value)
        seen[key] = value

    missing = [m for m in _METRIC_ORDER if m not in seen]
    if missing:
        raise MissingMetricError(missing)

    members = {}
    for key in _METRIC_ORDER:
        try:
            members[key] = _METRIC_ENUMS[key](seen[key])
        except ValueError:
            raise UnknownValueError(key, seen[key]) from None
    return ExploitabilityVector(
        av=members["AV"], ac=members["AC"], pr=members["PR"], ui=members["UI"]
    )


def exploitability_score(vector: ExploitabilityVector) -> float:
    """Exploitability score 8.22 * AV * AC * PR * UI, rounded half-up to 1 dp.

    The same formula serves base and modified vectors; results lie in
    [0.1, 3.9].
    """
    raw = (
        EXPLOITABILITY_COEFFICIENT
        * _AV_WEIGHTS[vector.av]
        * _AC_WEIGHTS[vector.ac]
        * _PR_WEIGHTS[vector.pr]
        * _UI_WEIGHTS[vector.ui]
    )
    return round_half_up(raw, 1)


def normalize(score: float) -> float:
    """Rescale an exploitability score to the 1-based vulnerability score.

    Divides by the 3.9 maximum and rounds half-up to 2 dp.
    """
    if not 0.1 <= score <= MAX_EXPLOITABILITY_SCORE:
        raise ValueError(f"exploitability score {score} outside [0.1, 3.9]")
    return round_half_up(as_decimal(score) / Decimal("3.9"), 2)


def all_vectors() -> list[ExploitabilityVector]:
    """Every one of the 4*2*3*2 = 48 metric combinations."""
    return [
        ExploitabilityVector(av, ac, pr, ui)
        for av in AttackVector
        for ac in AttackComplexity
        for pr in PrivilegesRequired
        for ui in UserInteraction
    ]
