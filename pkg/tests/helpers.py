"""Golden values and independent oracles shared across the test modules.

The CASE_STUDY rows trace each reference CVE through every stage: original
vector and score, environment-modified vector and score, and the normalized
vulnerability score. REFERENCE_TRACE is the published 8-concept activation
table the engine must reproduce.
"""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from itertools import combinations, product
from pathlib import Path

FIXTURE_DIR = Path(__file__).parent / "fixtures" / "nvd"

# id, cve, asset, original vector, E, modified vector, ME, vulnerability score
CASE_STUDY = [
    ("V1", "CVE-2019-11510", "VPN", "AV:N/AC:L/PR:N/UI:N", 3.9, "MAV:N/MAC:H/MPR:N/MUI:N", 2.2, 0.56),
    ("V2", "CVE-2017-7269", "WebS", "AV:N/AC:L/PR:N/UI:N", 3.9, "MAV:N/MAC:H/MPR:N/MUI:N", 2.2, 0.56),
    ("V3", "CVE-2017-0143", "WS", "AV:N/AC:H/PR:N/UI:N", 2.2, "MAV:A/MAC:H/MPR:N/MUI:N", 1.6, 0.41),
    ("V4", "CVE-2017-8692", "WS", "AV:N/AC:H/PR:N/UI:R", 1.6, "MAV:A/MAC:H/MPR:N/MUI:R", 1.2, 0.31),
    ("V5", "CVE-2021-1636", "HDB", "AV:N/AC:L/PR:L/UI:N", 2.8, "MAV:N/MAC:L/MPR:L/MUI:N", 2.8, 0.72),
    ("V6", "CVE-2023-21528", "HDB", "AV:L/AC:L/PR:L/UI:N", 1.8, "MAV:L/MAC:L/MPR:L/MUI:N", 1.8, 0.46),
    ("V7", "CVE-2016-5743", "HMI", "AV:N/AC:L/PR:N/UI:N", 3.9, "MAV:N/MAC:L/MPR:N/MUI:N", 3.9, 1.00),
    ("V8", "CVE-2019-10922", "EWS", "AV:N/AC:L/PR:N/UI:N", 3.9, "MAV:N/MAC:L/MPR:N/MUI:N", 3.9, 1.00),
    ("V9", "CVE-2016-9159", "PLC", "AV:N/AC:H/PR:N/UI:N", 2.2, "MAV:N/MAC:H/MPR:N/MUI:N", 2.2, 0.56),
    ("V10", "CVE-2016-8673", "PLC", "AV:N/AC:L/PR:N/UI:R", 2.8, "MAV:N/MAC:L/MPR:N/MUI:R", 2.8, 0.72),
]

# asset -> (relation, inputs, aggregate)
ASSET_AGGREGATES = {
    "VPN": (None, (0.56,), 0.56),
    "WebS": (None, (0.56,), 0.56),
    "WS": ("or", (0.41, 0.31), 0.59),
    "HDB": ("and", (0.72, 0.46), 0.33),
    "HMI": (None, (1.00,), 1.00),
    "EWS": (None, (1.00,), 1.00),
    "PLC": ("or", (0.56, 0.72), 0.88),
}

REFERENCE_CONCEPTS = ("ATK", "VPN", "WebS", "WS", "HDB", "HMI", "EWS", "PLC")

# Published activation table, 8 rows x 8 concepts, 4-decimal precision.
REFERENCE_TRACE = [
    (0.5000, 0.5000, 0.5000, 0.5000, 0.5000, 0.5000, 0.5000, 0.5000),
    (0.5000, 0.5695, 0.5695, 0.6434, 0.5412, 0.6225, 0.6225, 0.7892),
    (0.5000, 0.5695, 0.5695, 0.6620, 0.5529, 0.6555, 0.6555, 0.8280),
    (0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8376),
    (0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387),
    (0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387),
    (0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387),
    (0.5000, 0.5695, 0.5695, 0.6620, 0.5544, 0.6597, 0.6597, 0.8387),
]

BASE_EQUILIBRIUM = 0.8387
SCENARIO_EQUILIBRIA = {
    "scenario_a": 0.8169,
    "scenario_b": 0.7442,
    "scenario_c": 0.7406,
    "scenario_d": 0.6598,
}
REFERENCE_REDUCTIONS = {
    "scenario_a": (2.60, 0.05),
    "scenario_b": (11.27, 0.05),
    "scenario_c": (11.70, 0.05),
    "scenario_d": (21.36, 0.25),
}

# Exact published metric weights, as Fractions for path-independent oracles.
ORACLE_WEIGHTS = {
    "AV": {"N": Fraction("0.85"), "A": Fraction("0.62"), "L": Fraction("0.55"), "P": Fraction("0.20")},
    "AC": {"L": Fraction("0.77"), "H": Fraction("0.44")},
    "PR": {"N": Fraction("0.85"), "L": Fraction("0.62"), "H": Fraction("0.27")},
    "UI": {"N": Fraction("0.85"), "R": Fraction("0.62")},
}


def fraction_half_up(value: Fraction, places: int) -> float:
    """Exact half-up rounding of a rational number, without Decimal."""
    scaled = value * 10**places
    floor = scaled.numerator // scaled.denominator
    remainder = scaled - floor
    if remainder * 2 >= 1:
        floor += 1
    return float(Fraction(floor, 10**places))


def oracle_exploitability(av: str, ac: str, pr: str, ui: str) -> float:
    """Brute-force product table entry for one metric combination."""
    raw = (
        Fraction("8.22")
        * ORACLE_WEIGHTS["AV"][av]
        * ORACLE_WEIGHTS["AC"][ac]
        * ORACLE_WEIGHTS["PR"][pr]
        * ORACLE_WEIGHTS["UI"][ui]
    )
    return fraction_half_up(raw, 1)


def oracle_or(scores: tuple[Decimal, ...]) -> Decimal:
    """P(at least one success) by exhaustive enumeration of the outcome table."""
    total = Decimal(0)
    n = len(scores)
    for successes in range(1, n + 1):
        for chosen in combinations(range(n), successes):
            term = Decimal(1)
            for i in range(n):
                term *= scores[i] if i in chosen else Decimal(1) - scores[i]
            total += term
    return total.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


def oracle_and(scores: tuple[Decimal, ...]) -> Decimal:
    """The all-succeed cell of the same outcome table."""
    term = Decimal(1)
    for s in scores:
        term *= s
    return term.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)


SCORE_GRID = tuple(Decimal(n) / Decimal(20) for n in range(1, 21))  # 0.05 .. 1.00


def grid_tuples(max_size: int = 4):
    """Unordered score tuples from the 0.05 grid (order covered separately)."""
    from itertools import combinations_with_replacement

    for n in range(1, max_size + 1):
        yield from combinations_with_replacement(SCORE_GRID, n)


def all_metric_letters():
    yield from product("NALP", "LH", "NLH", "NR")
