import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make tests/oracles.py importable

MAPS_DIR = Path(__file__).resolve().parents[1] / "src" / "robotiq" / "maps"


@pytest.fixture(scope="session")
def maps_dir() -> Path:
    return MAPS_DIR


@pytest.fixture()
def demo_world():
    from robotiq.world import load_world_file

    return load_world_file(MAPS_DIR / "demo_home.json")
