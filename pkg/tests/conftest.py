"""Shared test helpers."""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from eap.model import Event, Point, Tag


def ev(name: str, t=None, space=None, **kwargs) -> Event:
    """Point event shorthand used across the suite."""
    time = None if t is None else Point(Fraction(t))
    return Event(name=name, tag=Tag(time=time, space=space), **kwargs)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240811)
