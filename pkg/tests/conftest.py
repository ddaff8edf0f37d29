"""Shared test fixtures: bundled data locations and the urn example."""

from importlib.resources import files

import pytest

from urndist import parse_categories, parse_records
from urndist.config import load_config

FIXTURES = files("urndist") / "fixtures"

# the three 10-draw colour sequences behind the urn fixture, interleaved in
# file order (u1 row 1, u2 row 1, u3 row 1, u1 row 2, ...)
URN_DRAWS = {
    "u1": "R G R R B R G G G R".split(),
    "u2": "B G R R R R R G G G".split(),
    "u3": "B B R G B R R B G R".split(),
}
COLOR_INDEX = {"R": 0, "G": 1, "B": 2}


@pytest.fixture(scope="session")
def urn_dir():
    return FIXTURES / "urn"


@pytest.fixture(scope="session")
def synthetic_dir():
    return FIXTURES / "synthetic"


@pytest.fixture(scope="session")
def urn_settings(urn_dir):
    return load_config(str(urn_dir / "config.toml"))


@pytest.fixture(scope="session")
def urn_categories(urn_settings):
    return parse_categories(urn_settings.categories_path)


@pytest.fixture(scope="session")
def urn_records(urn_dir, urn_categories):
    return parse_records(str(urn_dir / "records.csv"), urn_categories)


@pytest.fixture(scope="session")
def urn_run_config(urn_settings, urn_categories, urn_records):
    return urn_settings.build_run_config(
        urn_categories, [r.project for r in urn_records])
