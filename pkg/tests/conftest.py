"""Shared fixtures for the grs test suite."""

import json
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict

import pytest

from grs.models.metric import ScalarField
from grs.services.metric_service import build_space
from tests.helpers import path_edges


@pytest.fixture
def path3():
    """p0 - p1 - p2 with unit edges."""
    ids = ["p0", "p1", "p2"]
    return build_space(ids, path_edges(ids))


@pytest.fixture
def spike_field():
    return ScalarField({"p0": Fraction(1), "p1": Fraction(10), "p2": Fraction(100)})


@pytest.fixture
def write_json(tmp_path: Path) -> Callable[[str, Dict], str]:
    """Write a document under tmp_path and return its path as a string."""

    def write(name: str, document) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write
