"""Attack-tree aggregation of per-CVE vulnerability scores into asset scores.

Co-located vulnerabilities on one asset combine conjunctively (all must be
exploited: product) or disjunctively (any one suffices: complement product).
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from enum import Enum
from typing import Iterable, Sequence

from .rounding import as_decimal, round_half_up


class Relation(str, Enum):
    """Interdependency of an asset's vulnerabilities."""

    AND = "and"
    OR = "or"


class EmptyInputError(ValueError):
    """Aggregation over zero scores is undefined."""


class RelationMissingError(ValueError):
    """An asset with two or more vulnerabilities needs a declared relation."""


def _checked(scores: Iterable[float]) -> tuple[float, ...]:
    values = tuple(scores)
    if not values:
        raise EmptyInputError("no vulnerability scores to aggregate")
    for v in values:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"vulnerability score {v} outside (0, 1]")
    return values


def aggregate_and(scores: Sequence[float]) -> float:
    """Conjunctive combination: product of scores, rounded half-up to 2 dp."""
    values = _checked(scores)
    product = Decimal(1)
    for v in values:
        product *= as_decimal(v)
    return round_half_up(product, 2)


def aggregate_or(scores: Sequence[float]) -> float:
    """Disjunctive combination: 1 - prod(1 - s), rounded half-up to 2 dp."""
    values = _checked(scores)
    all_fail = Decimal(1)
    for v in values:
        all_fail *= Decimal(1) - as_decimal(v)
    return round_half_up(Decimal(1) - all_fail, 2)


@dataclass(frozen=True)
class AssetAggregate:
    """One asset's combined vulnerability score.

    relation is None when the asset has a single vulnerability, which then
    passes through unchanged.
    """

    asset_id: str
    relation: Relation | None
    inputs: tuple[float, ...]
    value: float


def aggregate_asset(
    asset_id: str, scores: Sequence[float], relation: Relation | None = None
) -> AssetAggregate:
    """Combine an asset's vulnerability scores per its declared relation."""
    values = _checked(scores)
    if len(values) == 1:
        if relation is not None:
            raise ValueError(
                f"asset {asset_id!r} has a single vulnerability; relation must be absent"
            )
        value = round_half_up(values[0], 2)
    elif relation is None:
        raise RelationMissingError(
            f"asset {asset_id!r} has {len(values)} vulnerabilities but no relation"
        )
    elif relation is Relation.AND:
        value = aggregate_and(values)
    else:
        value = aggregate_or(values)
    return AssetAggregate(asset_id=asset_id, relation=relation, inputs=values, value=value)
