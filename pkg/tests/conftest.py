import random
from fractions import Fraction

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def random_rational(rng: random.Random, bound: int = 2) -> Fraction:
    """Random Fraction in [-bound, bound] with a small denominator."""
    den = rng.randint(1, 12)
    num = rng.randint(-bound * den, bound * den)
    return Fraction(num, den)


@pytest.fixture
def rng():
    return random.Random(20240817)
