"""Environment model and the two metric-modification rules.

Topology reachability adjusts the attack vector (MAV) and deployed security
mechanisms adjust the attack complexity (MAC); PR and UI never change.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Mapping

from .attack_tree import Relation
from .cvss import AttackComplexity, AttackVector, ExploitabilityVector

CVE_ID_PATTERN = re.compile(r"^CVE-\d{4}-\d{4,}$")


class Exposure(str, Enum):
    """Who can reach an asset's vulnerabilities.

    REMOTE: exploitable from remote networks. INTERNAL: exploitable solely by
    assets on the same logical network.
    """

    REMOTE = "remote"
    INTERNAL = "internal"


class UnknownAssetError(LookupError):
    """A vulnerability references an asset absent from the environment."""

    def __init__(self, asset_id: str):
        super().__init__(f"unknown asset {asset_id!r}")
        self.asset_id = asset_id


@dataclass(frozen=True)
class Asset:
    """A node in the assessed environment."""

    id: str
    name: str
    layer: str
    exposure: Exposure
    relation: Relation | None = None


@dataclass(frozen=True)
class SecurityMechanism:
    """A deployed protection (e.g. firewall) covering one or more assets."""

    id: str
    kind: str
    protects: frozenset[str]


@dataclass(frozen=True)
class Vulnerability:
    """A CVE attached to an asset; vector may be inline or fetched later."""

    id: str
    cve_id: str
    asset_id: str
    vector: ExploitabilityVector | None = None
    base_cvss_score: float | None = None

    def __post_init__(self):
        if not CVE_ID_PATTERN.match(self.cve_id):
            raise ValueError(f"invalid CVE identifier {self.cve_id!r}")


def apply_rule1(av: AttackVector, exposure: Exposure) -> AttackVector:
    """RULE#1: MAV from the base AV and the asset's reachability.

    AV:N degrades to MAV:A when the asset is only internally reachable;
    A, L and P already restrict the attacker and carry over unchanged.
    """
    if av is AttackVector.NETWORK and exposure is Exposure.INTERNAL:
        return AttackVector.ADJACENT
    return av


def apply_rule2(ac: AttackComplexity, protected: bool) -> AttackComplexity:
    """RULE#2: MAC from the base AC and mechanism presence.

    A protecting mechanism raises AC:L to MAC:H; AC:H stays H either way.
    """
    if ac is AttackComplexity.LOW and protected:
        return AttackComplexity.HIGH
    return ac


def is_protected(asset_id: str, mechanisms: Iterable[SecurityMechanism]) -> bool:
    """True when any mechanism's protection set covers the asset."""
    return any(asset_id in m.protects for m in mechanisms)


def modify_vector(
    vuln: Vulnerability,
    assets: Mapping[str, Asset],
    mechanisms: Iterable[SecurityMechanism],
) -> ExploitabilityVector:
    """Apply RULE#1 and RULE#2 to a vulnerability's base vector.

    PR and UI are preserved bit for bit.
    """
    asset = assets.get(vuln.asset_id)
    if asset is None:
        raise UnknownAssetError(vuln.asset_id)
    if vuln.vector is None:
        raise ValueError(f"vulnerability {vuln.id!r} has no resolved vector")
    return replace(
        vuln.vector,
        av=apply_rule1(vuln.vector.av, asset.exposure),
        ac=apply_rule2(vuln.vector.ac, is_protected(asset.id, mechanisms)),
    )
