"""Shared fixtures for the test suite."""

import json
from pathlib import Path

import pytest

from qdock import load_complex

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "fixtures"

TINY4 = FIXTURE_DIR / "tiny4.json"
PLANTED6 = FIXTURE_DIR / "planted6.json"

# Planted poses baked into the fixture geometry: near-lattice grid points
# sit a small offset away from the matching ligand atom coordinates.
TINY4_PLANTED = {1: 101, 2: 102, 3: 103, 4: 104}
PLANTED6_PLANTED = {1: 201, 2: 202, 3: 203}
PLANTED6_DECOY = {1: 204, 2: 205, 3: 206}


@pytest.fixture(scope="session")
def tiny4_doc():
    with open(TINY4) as fh:
        return json.load(fh)


@pytest.fixture(scope="session")
def tiny4():
    return load_complex(TINY4)


@pytest.fixture(scope="session")
def planted6():
    return load_complex(PLANTED6)


@pytest.fixture()
def fixture_dir():
    return FIXTURE_DIR


def index_mapping(problem, id_mapping):
    """Translate an {atom id: grid id} pose to builder position indices."""
    return {
        problem.atom_ids.index(aid): problem.grid_ids.index(gid)
        for aid, gid in id_mapping.items()
    }
