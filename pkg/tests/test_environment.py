from __future__ import annotations

import pytest

from vulncrit.attack_tree import Relation
from vulncrit.cvss import (
    AttackComplexity,
    AttackVector,
    all_vectors,
    exploitability_score,
    parse_vector,
)
from vulncrit.environment import (
    Asset,
    Exposure,
    SecurityMechanism,
    UnknownAssetError,
    Vulnerability,
    apply_rule1,
    apply_rule2,
    is_protected,
    modify_vector,
)

N, A, L, P = AttackVector
LOW, HIGH = AttackComplexity


class TestRule1:
    # All eight (AV x reachability) cells of the MAV table.
    @pytest.mark.parametrize(
        "av,exposure,expected",
        [
            (N, Exposure.REMOTE, N),
            (N, Exposure.INTERNAL, A),
            (A, Exposure.REMOTE, A),
            (A, Exposure.INTERNAL, A),
            (L, Exposure.REMOTE, L),
            (L, Exposure.INTERNAL, L),
            (P, Exposure.REMOTE, P),
            (P, Exposure.INTERNAL, P),
        ],
    )
    def test_all_cells(self, av, exposure, expected):
        assert apply_rule1(av, exposure) is expected


class TestRule2:
    # All four (AC x mechanism) cells of the MAC table.
    @pytest.mark.parametrize(
        "ac,protected,expected",
        [
            (LOW, True, HIGH),
            (LOW, False, LOW),
            (HIGH, True, HIGH),
            (HIGH, False, HIGH),
        ],
    )
    def test_all_cells(self, ac, protected, expected):
        assert apply_rule2(ac, protected) is expected


def _env(exposure=Exposure.REMOTE, protected=False):
    asset = Asset(id="X", name="X", layer="cyber", exposure=exposure)
    mechanisms = [SecurityMechanism(id="fw", kind="firewall", protects=frozenset({"X"}))] if protected else []
    return {"X": asset}, mechanisms


def _vuln(vector: str, asset_id: str = "X") -> Vulnerability:
    return Vulnerability(id="V", cve_id="CVE-2020-1234", asset_id=asset_id, vector=parse_vector(vector))


class TestModifyVector:
    def test_remote_protected_raises_complexity(self):
        assets, mechanisms = _env(Exposure.REMOTE, protected=True)
        modified = modify_vector(_vuln("AV:N/AC:L/PR:N/UI:N"), assets, mechanisms)
        assert modified.render(modified=True) == "MAV:N/MAC:H/MPR:N/MUI:N"

    def test_internal_unprotected_degrades_vector(self):
        assets, mechanisms = _env(Exposure.INTERNAL, protected=False)
        modified = modify_vector(_vuln("AV:N/AC:H/PR:N/UI:N"), assets, mechanisms)
        assert modified.render(modified=True) == "MAV:A/MAC:H/MPR:N/MUI:N"

    def test_remote_unprotected_unchanged(self):
        assets, mechanisms = _env(Exposure.REMOTE, protected=False)
        vuln = _vuln("AV:N/AC:L/PR:N/UI:N")
        assert modify_vector(vuln, assets, mechanisms) == vuln.vector

    def test_unknown_asset(self):
        assets, mechanisms = _env()
        with pytest.raises(UnknownAssetError):
            modify_vector(_vuln("AV:N/AC:L/PR:N/UI:N", asset_id="missing"), assets, mechanisms)

    def test_unresolved_vector_rejected(self):
        assets, mechanisms = _env()
        bare = Vulnerability(id="V", cve_id="CVE-2020-1234", asset_id="X", vector=None)
        with pytest.raises(ValueError):
            modify_vector(bare, assets, mechanisms)

    @pytest.mark.parametrize("exposure", list(Exposure))
    @pytest.mark.parametrize("protected", [True, False])
    def test_idempotent_for_every_environment(self, exposure, protected):
        assets, mechanisms = _env(exposure, protected)
        for vector in all_vectors():
            vuln = Vulnerability(id="V", cve_id="CVE-2020-1234", asset_id="X", vector=vector)
            once = modify_vector(vuln, assets, mechanisms)
            again = modify_vector(
                Vulnerability(id="V", cve_id="CVE-2020-1234", asset_id="X", vector=once),
                assets,
                mechanisms,
            )
            assert again == once

    @pytest.mark.parametrize("exposure", list(Exposure))
    @pytest.mark.parametrize("protected", [True, False])
    def test_modification_only_degrades(self, exposure, protected):
        assets, mechanisms = _env(exposure, protected)
        for vector in all_vectors():
            vuln = Vulnerability(id="V", cve_id="CVE-2020-1234", asset_id="X", vector=vector)
            modified = modify_vector(vuln, assets, mechanisms)
            assert modified.av.weight <= vector.av.weight
            assert modified.ac.weight <= vector.ac.weight
            assert exploitability_score(modified) <= exploitability_score(vector)
            # PR and UI never change
            assert modified.pr is vector.pr
            assert modified.ui is vector.ui


class TestTypes:
    def test_cve_pattern_enforced(self):
        with pytest.raises(ValueError):
            Vulnerability(id="V", cve_id="NOT-A-CVE", asset_id="X")
        with pytest.raises(ValueError):
            Vulnerability(id="V", cve_id="CVE-19-1234", asset_id="X")
        Vulnerability(id="V", cve_id="CVE-2021-123456", asset_id="X")

    def test_is_protected_matches_any_mechanism(self):
        mechanisms = [
            SecurityMechanism(id="fw", kind="firewall", protects=frozenset({"A", "B"})),
            SecurityMechanism(id="ips", kind="ips", protects=frozenset({"C"})),
        ]
        assert is_protected("A", mechanisms)
        assert is_protected("C", mechanisms)
        assert not is_protected("D", mechanisms)

    def test_asset_relation_is_optional(self):
        asset = Asset(id="X", name="X", layer="cyber", exposure=Exposure.REMOTE, relation=Relation.OR)
        assert asset.relation is Relation.OR
