import random

import pytest

from coniso.constraints import constraint_from_bits

# unary and binary helpers used across the suite
ID = constraint_from_bits("id", 1, "01")
NOT = constraint_from_bits("not", 1, "10")
EQ2 = constraint_from_bits("eq2", 2, "1001")


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
