"""Fuzzy cognitive map engine: build, iterate to equilibrium, rescale.

The update is Kosko's standard rule applied synchronously: every concept's
next activation is sigmoid(sum of weight * source activation over its
in-edges), with no self-memory term. Concepts without in-edges therefore
hold sigmoid(0) = 0.5 from the first update onward.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .rounding import as_decimal, round_half_up


class MissingAggregateError(ValueError):
    """An attack edge points at an asset that has no aggregated score."""

    def __init__(self, asset_id: str):
        super().__init__(f"edge targets asset {asset_id!r} which has no aggregate")
        self.asset_id = asset_id


class UnreachableTargetError(ValueError):
    """No directed path exists from the attacker to the target concept."""

    def __init__(self, target_id: str):
        super().__init__(f"target {target_id!r} is not reachable from the attacker")
        self.target_id = target_id


@dataclass(frozen=True)
class FcmConfig:
    """Iteration parameters. Defaults reproduce the reference traces."""

    lam: float = 1.0
    initial_activation: float = 0.5
    epsilon: float = 1e-4
    max_iterations: int = 100

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if not 0.0 <= self.initial_activation <= 1.0:
            raise ValueError("initial activation must lie in [0, 1]")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class FcmEdge:
    source: str
    target: str
    weight: float


@dataclass(frozen=True)
class FcmModel:
    """Concept digraph with edge weights in [0, 1]."""

    concepts: tuple[str, ...]
    edges: tuple[FcmEdge, ...]
    attacker_id: str
    target_id: str

    def in_edges(self) -> dict[str, list[tuple[int, float]]]:
        """Per concept: (source index, weight) pairs in declaration order."""
        index = {c: i for i, c in enumerate(self.concepts)}
        incoming: dict[str, list[tuple[int, float]]] = {c: [] for c in self.concepts}
        for e in self.edges:
            incoming[e.target].append((index[e.source], e.weight))
        return incoming


@dataclass(frozen=True)
class IterationTrace:
    """Activation history; row 1 is the initial state."""

    concepts: tuple[str, ...]
    states: tuple[tuple[float, ...], ...]
    converged: bool

    @property
    def equilibrium_state(self) -> tuple[float, ...]:
        return self.states[-1]

    @property
    def iterations(self) -> int:
        """Number of update steps performed."""
        return len(self.states) - 1

    def state_at(self, row: int) -> tuple[float, ...]:
        """State at a 1-based row number, Table-style.

        Rows past the end of a converged trace return the equilibrium state
        (the map no longer changes); past the end of a non-converged trace
        they are unknown and raise.
        """
        if row < 1:
            raise ValueError("trace rows are numbered from 1")
        if row <= len(self.states):
            return self.states[row - 1]
        if self.converged:
            return self.states[-1]
        raise ValueError(f"trace ended at row {len(self.states)} without converging")

    def activation(self, concept: str, row: int | None = None) -> float:
        idx = self.concepts.index(concept)
        state = self.equilibrium_state if row is None else self.state_at(row)
        return state[idx]

    def to_dict(self) -> dict:
        return {
            "concepts": list(self.concepts),
            "states": [list(s) for s in self.states],
            "converged": self.converged,
        }


def sigmoid(x: float, lam: float = 1.0) -> float:
    """Logistic transfer function 1 / (1 + exp(-lam * x))."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    z = lam * x
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def step(state: Sequence[float], model: FcmModel, config: FcmConfig) -> tuple[float, ...]:
    """One synchronous update of every concept from the given snapshot."""
    if len(state) != len(model.concepts):
        raise ValueError("state dimension does not match concept count")
    incoming = model.in_edges()
    return tuple(
        sigmoid(sum(w * state[src] for src, w in incoming[c]), config.lam)
        for c in model.concepts
    )


def run_to_equilibrium(model: FcmModel, config: FcmConfig | None = None) -> IterationTrace:
    """Iterate from the uniform initial state until activations stabilize.

    Stops when the largest componentwise change drops below epsilon
    (converged) or after max_iterations updates (not converged; the last
    state is still reported).
    """
    cfg = config or FcmConfig()
    state = tuple(cfg.initial_activation for _ in model.concepts)
    states = [state]
    converged = False
    for _ in range(cfg.max_iterations):
        new = step(state, model, cfg)
        states.append(new)
        if max(abs(a - b) for a, b in zip(new, state)) < cfg.epsilon:
            converged = True
            state = new
            break
        state = new
    return IterationTrace(concepts=model.concepts, states=tuple(states), converged=converged)


def build_fcm(
    attack_edges: Iterable[tuple[str, str]],
    attacker_id: str,
    target_id: str,
    aggregates: Mapping[str, float],
) -> FcmModel:
    """Assemble the concept graph from attack edges and per-asset aggregates.

    Concepts are the attacker plus every aggregated asset, in the order the
    aggregates mapping presents them. Every edge into an asset weighs that
    asset's aggregate, so weights can never drift from the scores.
    """
    concepts = (attacker_id, *aggregates)
    known = set(concepts)
    edges = []
    seen: set[tuple[str, str]] = set()
    for source, target in attack_edges:
        if target == attacker_id:
            raise ValueError(f"edge into the attacker {attacker_id!r} is not allowed")
        if target not in aggregates:
            raise MissingAggregateError(target)
        if source not in known:
            raise ValueError(f"edge source {source!r} is not a concept")
        if (source, target) in seen:
            raise ValueError(f"duplicate edge {source!r} -> {target!r}")
        seen.add((source, target))
        weight = aggregates[target]
        if not 0.0 <= weight <= 1.0:
            raise ValueError(f"aggregate for {target!r} outside [0, 1]: {weight}")
        edges.append(FcmEdge(source=source, target=target, weight=weight))
    if target_id not in aggregates:
        raise MissingAggregateError(target_id)

    reachable = {attacker_id}
    queue = deque([attacker_id])
    outgoing: dict[str, list[str]] = {}
    for e in edges:
        outgoing.setdefault(e.source, []).append(e.target)
    while queue:
        node = queue.popleft()
        for nxt in outgoing.get(node, ()):
            if nxt not in reachable:
                reachable.add(nxt)
                queue.append(nxt)
    if target_id not in reachable:
        raise UnreachableTargetError(target_id)

    return FcmModel(
        concepts=concepts, edges=tuple(edges), attacker_id=attacker_id, target_id=target_id
    )


class Scale(str, Enum):
    """Reporting scales for the equilibrium value."""

    UNIT = "unit"
    TEN = "ten"
    CVSS39 = "cvss39"


_SCALE_FACTOR = {Scale.UNIT: 1.0, Scale.TEN: 10.0, Scale.CVSS39: 3.9}


def rescale(value: float, scale: Scale) -> float:
    """Linear map of a unit-interval value onto a reporting scale, 2 dp."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"value {value} outside [0, 1]")
    return round_half_up(as_decimal(value) * as_decimal(_SCALE_FACTOR[scale]), 2)
