import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dfcomp.ambiguity import SupportSet
from dfcomp.functions import FunctionSpec

DATA = Path(__file__).parent / "data"


@pytest.fixture
def e1():
    """{(0,0),(0,1),(1,0)}, one bit per informant."""
    return SupportSet.from_ints((1, 1), [(0, 0), (0, 1), (1, 0)])


@pytest.fixture
def e2():
    """{(0,0),(1,1)}, one bit per informant."""
    return SupportSet.from_ints((1, 1), [(0, 0), (1, 1)])


@pytest.fixture
def ten_pairs():
    """Ten 3-bit pairs with five values per informant and five distinct ORs.

    Matches the counts of the problem-encoding example (mu = 10,
    mu_X1 = mu_X2 = 5, mu_f = 5 for bitwise OR) and contains (000, 010).
    """
    pairs = [(0, 1), (0, 2), (0, 7), (1, 0), (1, 6), (3, 0), (4, 1), (4, 7), (7, 0), (7, 2)]
    return SupportSet.from_ints((3, 3), pairs)


def fn(name):
    return FunctionSpec.builtin(name)
