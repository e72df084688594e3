from __future__ import annotations

import pytest

from vulncrit import assess, load_bundled_scenario


@pytest.fixture(scope="session")
def base_model():
    return load_bundled_scenario("base")


@pytest.fixture(scope="session")
def base_report(base_model):
    return assess(base_model)


@pytest.fixture(scope="session")
def scenario_reports():
    """Assessment reports for the four what-if variants, keyed by name."""
    return {
        name: assess(load_bundled_scenario(name))
        for name in ("scenario_a", "scenario_b", "scenario_c", "scenario_d")
    }
