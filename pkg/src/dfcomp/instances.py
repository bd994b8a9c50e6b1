"""Seeded random support sets and the randomized instance suite."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Sequence

from .ambiguity import SupportSet
from .errors import InvalidArgumentError, ValueRangeError
from .functions import BUILTIN_NAMES, FunctionSpec, Problem


def generate_random(n: int, widths: Sequence[int], density: float, seed: int) -> SupportSet:
    """Keep each point of the product space independently with probability ``density``.

    At least one vector is always kept. The same arguments give the same set.
    """
    widths = tuple(widths)
    if n < 1 or len(widths) != n:
        raise InvalidArgumentError(f"need {n} widths, got {widths}")
    if any(w < 1 for w in widths):
        raise InvalidArgumentError(f"widths must be positive, got {widths}")
    if not 0 < density <= 1:
        raise InvalidArgumentError(f"density must lie in (0, 1], got {density}")
    total = sum(widths)
    rng = random.Random(seed)
    codes = [c for c in range(1 << total) if rng.random() < density]
    if not codes:
        codes = [rng.randrange(1 << total)]
    vectors = []
    for c in codes:
        bits = format(c, f"0{total}b")
        parts, at = [], 0
        for w in widths:
            parts.append(bits[at : at + w])
            at += w
        vectors.append(tuple(parts))
    return SupportSet(widths, tuple(vectors))


@dataclass(frozen=True)
class SuiteCase:
    index: int
    seed: int
    support: SupportSet
    function: FunctionSpec


def _split_width(rng: random.Random, total: int, n: int) -> tuple[int, ...]:
    cuts = sorted(rng.sample(range(1, total), n - 1))
    return tuple(b - a for a, b in zip([0] + cuts, cuts + [total]))


def random_suite(
    count: int,
    seed: int = 0,
    informants: Sequence[int] = (2, 3),
    max_width: int = 10,
    functions: Sequence[str] = BUILTIN_NAMES,
    density: tuple[float, float] = (0.05, 0.6),
) -> list[SuiteCase]:
    """``count`` instances cycling through ``functions``.

    Instances on which a builtin overflows its value cap are redrawn, so
    every returned case is evaluable.
    """
    rng = random.Random(seed)
    cases: list[SuiteCase] = []
    names = itertools.cycle(functions)
    while len(cases) < count:
        name = next(names)
        f = FunctionSpec.builtin(name)
        for _ in range(100):
            n = rng.choice(list(informants))
            total = rng.randint(max(n, 2), max_width)
            widths = _split_width(rng, total, n)
            inst_seed = rng.randrange(2**32)
            s = generate_random(n, widths, rng.uniform(*density), inst_seed)
            try:
                Problem(s, f)
            except ValueRangeError:
                continue
            cases.append(SuiteCase(len(cases), inst_seed, s, f))
            break
        else:
            raise InvalidArgumentError(f"could not draw an evaluable instance for {name}")
    return cases
