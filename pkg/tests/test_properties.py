"""Seeded randomized invariants, one wrapper per property.

The full 200-instance battery runs inside the acceptance suite; here
each property gets a quicker pass with an independent seed so a failure
points straight at the broken invariant.
"""

import random

import pytest

from jacfact.acceptance import PROPERTY_SUITE
from jacfact.field import QQ, PrimeField

QUICK_INSTANCES = 40


@pytest.mark.parametrize("name,prop", PROPERTY_SUITE, ids=[n for n, _ in PROPERTY_SUITE])
def test_property_over_rationals(name, prop):
    rng = random.Random(f"quick-{name}")
    outcome = prop(QQ, rng, QUICK_INSTANCES)
    assert outcome["failures"] == 0, outcome


@pytest.mark.parametrize("name,prop", PROPERTY_SUITE, ids=[n for n, _ in PROPERTY_SUITE])
def test_property_over_prime_field(name, prop):
    rng = random.Random(f"quick-fp-{name}")
    outcome = prop(PrimeField(1000003), rng, 15)
    assert outcome["failures"] == 0, outcome
