"""Deterministic functions over the support set and their output ambiguity.

Builtins read each component as the natural binary number of its bit
string.  Bitwise builtins return bit strings (operands left-padded to the
widest one); arithmetic and order builtins return integers; ``identity``
returns the concatenated input string.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Any, Callable, Mapping, Sequence

from .ambiguity import KnowledgeState, SupportSet, Vector, bits_needed, undefined_globals
from .errors import InvalidArgumentError, ValueRangeError

DEFAULT_CAP = 2**63 - 1

Output = Any  # str or int


def _pad(v: Vector) -> list[str]:
    w = max(len(x) for x in v)
    return [x.rjust(w, "0") for x in v]


def _bitwise(op: Callable[[int, int], int]) -> Callable[[Vector], str]:
    def apply(v: Vector) -> str:
        cols = _pad(v)
        pair = lambda a, b: "".join(str(op(int(p), int(q))) for p, q in zip(a, b))
        return reduce(pair, cols)

    return apply


def _ints(v: Vector) -> list[int]:
    return [int(x, 2) for x in v]


def _mode(v: Vector) -> int:
    counts = Counter(_ints(v))
    top = max(counts.values())
    return min(x for x, c in counts.items() if c == top)


def _median(v: Vector) -> int:
    xs = sorted(_ints(v))
    return xs[(len(xs) - 1) // 2]


def _majority(v: Vector) -> str:
    # per bit position; ties go to 0
    cols = _pad(v)
    n = len(cols)
    return "".join("1" if 2 * sum(c[p] == "1" for c in cols) > n else "0" for p in range(len(cols[0])))


def _parity(v: Vector) -> int:
    return sum(x.count("1") for x in v) % 2


def _capped_pow(base: int, exp: int, cap: int | None) -> int:
    if cap is not None and base > 1 and exp * math.log2(base) > math.log2(cap) + 1:
        raise ValueRangeError(f"{base}**{exp} exceeds the value cap {cap}")
    value = base**exp
    if cap is not None and value > cap:
        raise ValueRangeError(f"{base}**{exp} exceeds the value cap {cap}")
    return value


BUILTINS: dict[str, Callable[[Vector], Output]] = {
    "identity": lambda v: "".join(v),
    "bitwise-or": _bitwise(lambda a, b: a | b),
    "bitwise-and": _bitwise(lambda a, b: a & b),
    "bitwise-xor": _bitwise(lambda a, b: a ^ b),
    "max": lambda v: max(_ints(v)),
    "min": lambda v: min(_ints(v)),
    "sum": lambda v: sum(_ints(v)),
    "parity": _parity,
    "mode": _mode,
    "median": _median,
    "mean-floor": lambda v: sum(_ints(v)) // len(v),
    "majority": _majority,
    "iterated-exponentiation": None,  # needs the cap, handled in evaluate
}

ALIASES = {"or": "bitwise-or", "and": "bitwise-and", "xor": "bitwise-xor", "mean": "mean-floor"}

BUILTIN_NAMES = tuple(BUILTINS)


@dataclass(frozen=True)
class FunctionSpec:
    """A builtin by name, or an explicit table ``((vector, value), ...)``."""

    name: str
    table: tuple[tuple[Vector, Output], ...] | None = None
    cap: int | None = DEFAULT_CAP

    @classmethod
    def builtin(cls, name: str, cap: int | None = DEFAULT_CAP) -> "FunctionSpec":
        name = ALIASES.get(name, name)
        if name not in BUILTINS:
            raise InvalidArgumentError(
                f"unknown builtin {name!r}; expected one of {', '.join(BUILTIN_NAMES)}"
            )
        return cls(name, None, cap)

    @classmethod
    def from_table(cls, mapping: Mapping[Vector, Output]) -> "FunctionSpec":
        items = tuple(sorted(((tuple(k), v) for k, v in mapping.items()), key=lambda kv: "".join(kv[0])))
        return cls("table", items, None)

    @property
    def is_table(self) -> bool:
        return self.table is not None

    def __str__(self) -> str:
        return self.name


def _tower(v: Vector, cap: int | None) -> int:
    xs = _ints(v)
    value = xs[-1]
    for base in reversed(xs[:-1]):
        value = _capped_pow(base, value, cap)
    if cap is not None and value > cap:
        raise ValueRangeError(f"value {value} exceeds the value cap {cap}")
    return value


def evaluate(f: FunctionSpec, v: Sequence[str], support: SupportSet | None = None) -> Output:
    """Value of ``f`` at vector ``v``; with ``support`` given, ``v`` must belong to it."""
    v = tuple(v)
    if support is not None and v not in support.index:
        raise InvalidArgumentError(f"vector {v} is not in the support set")
    if f.table is not None:
        table = dict(f.table)
        if v not in table:
            raise InvalidArgumentError(f"function table has no entry for {v}")
        return table[v]
    if f.name == "iterated-exponentiation":
        return _tower(v, f.cap)
    return BUILTINS[f.name](v)


def value_sort_key(x: Output) -> tuple:
    return (type(x).__name__, x)


class Problem:
    """A support set bound to a function, with bitset views used by every search.

    ``output_masks[r]`` is the bitset of vectors whose output is the r-th
    smallest distinct output value.
    """

    def __init__(self, support: SupportSet, function: FunctionSpec):
        self.support = support
        self.function = function
        if function.table is not None:
            table = dict(function.table)
            missing = [v for v in support.vectors if v not in table]
            if missing:
                raise InvalidArgumentError(f"function table is not total: no entry for {missing[0]}")
            outputs = [table[v] for v in support.vectors]
        else:
            outputs = [evaluate(function, v) for v in support.vectors]
        self.outputs = tuple(outputs)
        self.values = tuple(sorted(set(outputs), key=value_sort_key))
        rank = {x: r for r, x in enumerate(self.values)}
        masks = [0] * len(self.values)
        for k, x in enumerate(outputs):
            masks[rank[x]] |= 1 << k
        self.output_masks = tuple(masks)
        self.rank_of = tuple(rank[x] for x in outputs)  # vector index -> output rank
        self.injective = len(self.values) == len(outputs)
        self.bit_masks = support.bit_masks
        self.width = support.total_width
        self.greedy_cache: dict = {}  # (live, tie) -> greedy choice

    @staticmethod
    @lru_cache(maxsize=64)
    def of(support: SupportSet, function: FunctionSpec) -> "Problem":
        """Shared instance for repeated runs on the same pair."""
        return Problem(support, function)

    def mu_f(self, live: int) -> int:
        if self.injective:
            return live.bit_count()
        if live.bit_count() < len(self.output_masks):
            ranks, seen = self.rank_of, set()
            while live:
                low = live & -live
                seen.add(ranks[low.bit_length() - 1])
                live ^= low
            return len(seen)
        return sum(1 for m in self.output_masks if m & live)

    def is_solved(self, live: int) -> bool:
        """True when every live vector has the same output."""
        if not live:
            return False
        first = self.rank_of[(live & -live).bit_length() - 1]
        return not live & ~self.output_masks[first]

    def values_in(self, live: int) -> tuple[Output, ...]:
        return tuple(x for x, m in zip(self.values, self.output_masks) if m & live)

    def output_of(self, live: int) -> Output:
        values = self.values_in(live)
        if len(values) != 1:
            raise InvalidArgumentError(f"output not determined: {len(values)} values remain")
        return values[0]

    def undefined(self, live: int) -> list[int]:
        return undefined_globals(self.support, live)

    def split(self, live: int, g: int) -> tuple[int, int]:
        ones = live & self.bit_masks[g]
        return live ^ ones, ones


@dataclass(frozen=True)
class OutputAmbiguity:
    values: tuple[Output, ...]
    multiplicity: dict

    @property
    def mu_f(self) -> int:
        return len(self.values)

    @property
    def min_multiplicity(self) -> int:
        return min(self.multiplicity.values())


def output_ambiguity(f: FunctionSpec | Problem, k: KnowledgeState) -> OutputAmbiguity:
    """S_f (or its conditional version) over the live vectors of ``k``."""
    p = f if isinstance(f, Problem) else Problem(k.support, f)
    counts = {}
    for x, m in zip(p.values, p.output_masks):
        c = (m & k.live).bit_count()
        if c:
            counts[x] = c
    return OutputAmbiguity(tuple(counts), counts)


def max_conditional_output_ambiguity(f: FunctionSpec, s: SupportSet, i: int) -> int:
    """Largest mu_{f|X_i}(x_i) over the values x_i of informant i."""
    if not 1 <= i <= s.n_informants:
        raise InvalidArgumentError(f"informant {i} out of range 1..{s.n_informants}")
    p = Problem(s, f)
    groups: dict[str, set] = {}
    for v, x in zip(s.vectors, p.outputs):
        groups.setdefault(v[i - 1], set()).add(x)
    return max(len(g) for g in groups.values())


def output_code(values: Sequence[Output], x: Output) -> str:
    """Rank of ``x`` among the sorted ``values`` as a ceil(log2 mu_f)-bit string (reporting only)."""
    ordered = sorted(values, key=value_sort_key)
    w = bits_needed(len(ordered))
    return format(ordered.index(x), f"0{w}b") if w else ""
