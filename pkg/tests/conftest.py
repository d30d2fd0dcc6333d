"""Shared fixtures: small trees and palettes used across the suite."""

from __future__ import annotations

import pytest

from ehrlab.colouring import Palette
from ehrlab.trees import parse_tree


@pytest.fixture
def p2() -> Palette:
    return Palette(2)


@pytest.fixture
def fork():
    """c0(c1,c2(c1)): root with a leaf child and a one-child branch."""
    return parse_tree("c0(c1,c2(c1))")


@pytest.fixture
def fork_swapped():
    """Same multiset of depth-1 types as `fork`, children listed in the
    other order."""
    return parse_tree("c0(c2(c1),c1)")


@pytest.fixture
def twin_leaves():
    return parse_tree("c0(c1,c1)")
