"""Exact minimax search over every adaptive bit-query strategy.

All searches are top-down recursions memoised on the canonical live-vector
bitset (plus the remaining depth where a depth budget applies).  A state is
solved when one function output remains; any undefined bit may be queried
next, and the adversary picks the worse answer.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterator, Sequence

from .ambiguity import SupportSet, bits_needed
from .errors import InvalidArgumentError, ResourceLimitError
from .functions import FunctionSpec, Problem
from .tree import StrategyTree

INF = float("inf")


@dataclass(frozen=True)
class SearchBudget:
    max_entries: int = 2**22
    max_seconds: float | None = 600.0


DEFAULT_BUDGET = SearchBudget()


def all_ones(s: SupportSet) -> tuple[int, ...]:
    return (1,) * s.total_width


def informant_weights(s: SupportSet, i: int) -> tuple[int, ...]:
    """Cost vector charging only informant ``i``'s bits."""
    if not 1 <= i <= s.n_informants:
        raise InvalidArgumentError(f"informant {i} out of range 1..{s.n_informants}")
    return tuple(int(owner == i) for owner in s.informant_of_bit)


class _Memo(dict):
    def __init__(self, budget: SearchBudget):
        super().__init__()
        self.budget = budget
        self.started = time.monotonic()

    def put(self, key, value) -> None:
        if len(self) >= self.budget.max_entries:
            raise ResourceLimitError(f"search exceeded {self.budget.max_entries} memo entries")
        if (
            self.budget.max_seconds is not None
            and len(self) % 1024 == 0
            and time.monotonic() - self.started > self.budget.max_seconds
        ):
            raise ResourceLimitError(f"search exceeded {self.budget.max_seconds} s")
        self[key] = value


class Oracle:
    """Memoised exact searches for one (support set, function) instance.

    Results of the unweighted search are shared across queries, so build one
    ``Oracle`` per instance and ask it everything.
    """

    def __init__(
        self,
        s: SupportSet,
        f: FunctionSpec | Problem,
        budget: SearchBudget = DEFAULT_BUDGET,
        memoize: bool = True,
    ):
        self.support = s
        self.problem = f if isinstance(f, Problem) else Problem(s, f)
        self.budget = budget
        self.memoize = memoize
        self._height = _Memo(budget)

    # -- unweighted height --------------------------------------------------

    def height(self, live: int | None = None) -> int:
        """Minimum worst-case number of queries from state ``live``."""
        live = self.support.full_mask if live is None else live
        return self._cost(live, None, self._height)

    def _cost(self, live: int, weights: Sequence[int] | None, memo: _Memo) -> int:
        if self.memoize and live in memo:
            return memo[live][0]
        p = self.problem
        mu_f = p.mu_f(live)
        if mu_f == 1:
            best, arg = 0, None
        else:
            undefined = p.undefined(live)
            if weights is None:
                floor = bits_needed(mu_f)
            else:
                floor = bits_needed(mu_f) * min(weights[g] for g in undefined)
            best, arg = INF, None
            for g in undefined:
                w = 1 if weights is None else weights[g]
                if w >= best:
                    continue
                zeros, ones = p.split(live, g)
                c0 = self._cost(zeros, weights, memo)
                if w + c0 >= best:
                    continue
                c1 = self._cost(ones, weights, memo)
                c = w + max(c0, c1)
                if c < best:
                    best, arg = c, g
                    if best <= floor:
                        break
        if self.memoize:
            memo.put(live, (best, arg))
        else:
            self._last_arg = arg
        return best

    def _witness(self, live: int, weights: Sequence[int] | None, memo: _Memo) -> StrategyTree:
        p, s = self.problem, self.support
        if p.is_solved(live):
            return StrategyTree(live, output=p.output_of(live))
        self._cost(live, weights, memo)
        arg = memo[live][1] if self.memoize else self._last_arg
        zeros, ones = p.split(live, arg)
        return StrategyTree(
            live,
            s.address_of(arg + 1),
            {0: self._witness(zeros, weights, memo), 1: self._witness(ones, weights, memo)},
        )

    def min_worst_cost(self, weights: Sequence[int] | None = None) -> tuple[int, StrategyTree]:
        """Minimum over strategies of the worst-case weighted bit count, with a witness."""
        s = self.support
        if weights is not None:
            weights = tuple(int(w) for w in weights)
            if len(weights) != s.total_width or any(w < 0 for w in weights):
                raise InvalidArgumentError("cost vector needs one non-negative weight per bit")
            if all(w == 1 for w in weights):
                weights = None
        memo = self._height if weights is None else _Memo(self.budget)
        value = self._cost(s.full_mask, weights, memo)
        return int(value), self._witness(s.full_mask, weights, memo)

    # -- depth-budgeted single-informant cost ------------------------------

    def informant_cost(self, i: int, budget: int | None = None) -> int:
        """Least worst-case informant-``i`` bit count over strategies of depth <= ``budget``.

        ``budget=None`` means no depth restriction.
        """
        s = self.support
        weights = informant_weights(s, i)
        if budget is None:
            return self.min_worst_cost(weights)[0]
        if budget < self.height():
            raise InvalidArgumentError(
                f"depth budget {budget} is below the minimum worst-case cost {self.height()}"
            )
        owner = s.informant_of_bit
        memo = _Memo(self.budget)
        p = self.problem

        def g(live: int, d: int) -> float:
            if p.is_solved(live):
                return 0
            if self.height(live) > d:
                return INF
            undefined = p.undefined(live)
            # no path can query more bits than are still undefined
            key = (live, min(d, len(undefined)))
            if key in memo:
                return memo[key]
            best = INF
            for b in undefined:
                w = int(owner[b] == i)
                if w >= best:
                    continue
                zeros, ones = p.split(live, b)
                c0 = g(zeros, d - 1)
                if w + c0 >= best:
                    continue
                c = w + max(c0, g(ones, d - 1))
                if c < best:
                    best = c
                    if best == 0:
                        break
            memo.put(key, best)
            return best

        return int(g(s.full_mask, budget))

    # -- Pareto profiles ---------------------------------------------------

    def pareto_profiles(self, depth: int | None = None) -> list[tuple[int, ...]]:
        """Pareto-minimal per-informant worst-case bit profiles of trees of depth <= ``depth``.

        ``depth=None`` uses the minimum height.
        """
        s, p = self.support, self.problem
        n = s.n_informants
        depth = self.height() if depth is None else depth
        if depth < self.height():
            return []
        owner = s.informant_of_bit
        memo = _Memo(self.budget)

        def prof(live: int, d: int) -> frozenset:
            if p.is_solved(live):
                return frozenset([(0,) * n])
            if self.height(live) > d:
                return frozenset()
            undefined = p.undefined(live)
            key = (live, min(d, len(undefined)))
            if key in memo:
                return memo[key]
            found = set()
            for b in undefined:
                zeros, ones = p.split(live, b)
                left, right = prof(zeros, d - 1), prof(ones, d - 1)
                k = owner[b] - 1
                for a, c in itertools.product(left, right):
                    q = [max(x, y) for x, y in zip(a, c)]
                    q[k] += 1
                    found.add(tuple(q))
            out = frozenset(_pareto(found))
            memo.put(key, out)
            return out

        return sorted(prof(s.full_mask, depth))

    # -- enumeration ------------------------------------------------------

    def optimal_trees(self, limit: int) -> list[StrategyTree]:
        """Up to ``limit`` distinct trees of minimum height, in lowest-index-first order."""
        if limit < 1:
            raise InvalidArgumentError("limit must be positive")
        p, s = self.problem, self.support

        def gen(live: int, d: int) -> Iterator[StrategyTree]:
            if p.is_solved(live):
                yield StrategyTree(live, output=p.output_of(live))
                return
            if d == 0:
                return
            for b in p.undefined(live):
                zeros, ones = p.split(live, b)
                if self.height(zeros) > d - 1 or self.height(ones) > d - 1:
                    continue
                addr = s.address_of(b + 1)
                for t0 in gen(zeros, d - 1):
                    for t1 in gen(ones, d - 1):
                        yield StrategyTree(live, addr, {0: t0, 1: t1})

        return list(itertools.islice(gen(s.full_mask, self.height()), limit))


def _pareto(points: set[tuple[int, ...]]) -> list[tuple[int, ...]]:
    pts = sorted(points)
    keep = []
    for q in pts:
        if not any(all(a <= b for a, b in zip(r, q)) for r in keep):
            keep.append(q)
    return keep


def min_worst_cost(
    s: SupportSet,
    f: FunctionSpec,
    c: Sequence[int] | None = None,
    budget: SearchBudget = DEFAULT_BUDGET,
) -> tuple[int, StrategyTree]:
    """Exact min-max weighted query cost and a witness tree.

    ``c=None`` (all ones) gives #_f; an informant indicator gives that
    informant's unrestricted minimum; ``f=identity`` gives #_DSC.
    """
    return Oracle(s, f, budget).min_worst_cost(c)


def min_informant_cost_with_depth_budget(
    s: SupportSet, f: FunctionSpec, i: int, budget: int, search: SearchBudget = DEFAULT_BUDGET
) -> int:
    return Oracle(s, f, search).informant_cost(i, budget)


def enumerate_optimal_trees(
    s: SupportSet, f: FunctionSpec, limit: int, budget: SearchBudget = DEFAULT_BUDGET
) -> list[tuple[StrategyTree, tuple[int, ...]]]:
    """Minimum-height trees, each paired with its per-informant worst-case profile."""
    trees = Oracle(s, f, budget).optimal_trees(limit)
    return [(t, t.profile(s.n_informants)) for t in trees]
