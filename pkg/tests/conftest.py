import pathlib

import pytest

import curvesynth
from curvesynth.io import parse_svg

DATA_DIR = pathlib.Path(curvesynth.__file__).parent / "data" / "exemplars"
EXEMPLAR_NAMES = ["stripes", "grid", "waves", "scales", "tree"]


@pytest.fixture(scope="session")
def exemplars():
    return {
        name: parse_svg((DATA_DIR / f"{name}.svg").read_bytes())
        for name in EXEMPLAR_NAMES
    }
