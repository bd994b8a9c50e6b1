"""Greedy bit-serial function computation.

Each round the sink asks for the undefined bit whose worse answer leaves the
fewest candidate function outputs, and one informant replies with that one
bit. The loop stops when a single output remains.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Sequence

from .ambiguity import BitAddress, KnowledgeState, SupportSet, Vector, bits_needed
from .errors import AlreadySolvedError, InvalidArgumentError
from .functions import FunctionSpec, Output, Problem
from .tree import StrategyTree


@dataclass(frozen=True)
class TieRule:
    """How to pick one bit among equally good greedy candidates.

    ``random`` mode draws from a generator seeded by (seed, live set), so the
    choice at a given knowledge state never depends on the path that led
    there. That keeps online runs on the paths of the offline tree.
    """

    mode: str = "lowest"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mode not in ("lowest", "random"):
            raise InvalidArgumentError(f"unknown tie rule {self.mode!r}")

    @classmethod
    def parse(cls, text: str) -> "TieRule":
        if text in ("lowest", "lowest-global-index"):
            return cls("lowest")
        if text.startswith("random:"):
            try:
                return cls("random", int(text.split(":", 1)[1]))
            except ValueError:
                pass
        raise InvalidArgumentError(f"bad tie rule {text!r}; use 'lowest' or 'random:<seed>'")

    def choose(self, candidates: Sequence[int], live: int) -> int:
        if self.mode == "lowest":
            return min(candidates)
        return random.Random(f"{self.seed}:{live}").choice(sorted(candidates))

    def __str__(self) -> str:
        return "lowest" if self.mode == "lowest" else f"random:{self.seed}"


LOWEST = TieRule()


@dataclass(frozen=True)
class Round:
    index: int
    address: BitAddress
    candidates: tuple[BitAddress, ...]
    answer: int
    mu_before: int
    mu_after: int
    mu_f_before: int
    mu_f_after: int

    @property
    def epsilon(self) -> float:
        """1 + log2(mu_after / mu_before): 0 for an exact halving."""
        return 1.0 + math.log2(self.mu_after / self.mu_before)


@dataclass
class Transcript:
    mode: str
    n_informants: int
    total_width: int
    rounds: list[Round] = field(default_factory=list)
    output: Output = None
    drawn: Vector | None = None

    @property
    def informant_bits(self) -> tuple[int, ...]:
        counts = [0] * self.n_informants
        for r in self.rounds:
            counts[r.address.informant - 1] += 1
        return tuple(counts)

    @property
    def total_informant_bits(self) -> int:
        return len(self.rounds)

    @property
    def sink_bits(self) -> int:
        # each query names one of total_width bit-locations
        return len(self.rounds) * bits_needed(self.total_width)

    @property
    def epsilons(self) -> list[float]:
        return [r.epsilon for r in self.rounds]

    def queries(self) -> list[tuple[BitAddress, int]]:
        return [(r.address, r.answer) for r in self.rounds]

    def to_dict(self) -> dict:
        def addr(a: BitAddress) -> list[int]:
            return [a.informant, a.position, a.global_index]

        return {
            "mode": self.mode,
            "n_informants": self.n_informants,
            "total_width": self.total_width,
            "drawn": None if self.drawn is None else list(self.drawn),
            "output": self.output,
            "rounds": [
                {
                    "round": r.index,
                    "address": addr(r.address),
                    "candidates": [addr(c) for c in r.candidates],
                    "answer": r.answer,
                    "mu_before": r.mu_before,
                    "mu_after": r.mu_after,
                    "mu_f_before": r.mu_f_before,
                    "mu_f_after": r.mu_f_after,
                    "epsilon": float(f"{r.epsilon:.12g}"),
                }
                for r in self.rounds
            ],
            "informant_bits": list(self.informant_bits),
            "total_informant_bits": self.total_informant_bits,
            "sink_bits": self.sink_bits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Transcript":
        rounds = [
            Round(
                r["round"],
                BitAddress(*r["address"]),
                tuple(BitAddress(*c) for c in r["candidates"]),
                r["answer"],
                r["mu_before"],
                r["mu_after"],
                r["mu_f_before"],
                r["mu_f_after"],
            )
            for r in d["rounds"]
        ]
        drawn = None if d["drawn"] is None else tuple(d["drawn"])
        return cls(d["mode"], d["n_informants"], d["total_width"], rounds, d["output"], drawn)


def _scores(p: Problem, live: int, measure: str) -> dict[int, int]:
    count = p.mu_f if measure == "output" else int.bit_count
    scores = {}
    for g in p.undefined(live):
        zeros, ones = p.split(live, g)
        scores[g] = max(count(zeros), count(ones))
    return scores


def _candidates(p: Problem, live: int, measure: str = "output") -> list[int]:
    scores = _scores(p, live, measure)
    best = min(scores.values())
    return [g for g, sc in scores.items() if sc == best]


def greedy_candidates(k: KnowledgeState, f: FunctionSpec | Problem, measure: str = "output") -> list[BitAddress]:
    """Undefined bits minimising the larger of the two branch ambiguities.

    ``measure="output"`` scores branches by mu_f (the function rule);
    ``measure="vectors"`` by the number of live vectors (the source-coding
    rule, which it matches for the identity function).
    """
    p = f if isinstance(f, Problem) else Problem(k.support, f)
    if measure not in ("output", "vectors"):
        raise InvalidArgumentError(f"unknown measure {measure!r}")
    if p.is_solved(k.live):
        raise AlreadySolvedError("the function output is already determined")
    return [k.support.address_of(g + 1) for g in _candidates(p, k.live, measure)]


def _step(p: Problem, live: int, tie: TieRule) -> tuple[int, list[int]]:
    key = (live, tie)
    hit = p.greedy_cache.get(key)
    if hit is None:
        cands = _candidates(p, live)
        hit = p.greedy_cache[key] = (tie.choose(cands, live), cands)
    return hit


def _round(p: Problem, index: int, live: int, g: int, cands: list[int], b: int) -> tuple[Round, int]:
    zeros, ones = p.split(live, g)
    after = ones if b else zeros
    s = p.support
    rnd = Round(
        index=index,
        address=s.address_of(g + 1),
        candidates=tuple(s.address_of(c + 1) for c in cands),
        answer=b,
        mu_before=live.bit_count(),
        mu_after=after.bit_count(),
        mu_f_before=p.mu_f(live),
        mu_f_after=p.mu_f(after),
    )
    return rnd, after


def run_online(s: SupportSet, f: FunctionSpec, drawn: Sequence[str], tie: TieRule = LOWEST) -> Transcript:
    """Run the protocol against the informants' true data ``drawn``."""
    drawn = tuple(drawn)
    if drawn not in s.index:
        raise InvalidArgumentError(f"drawn vector {drawn} is not in the support set")
    p = Problem.of(s, f)
    bits = "".join(drawn)
    t = Transcript("online", s.n_informants, s.total_width, drawn=drawn)
    live = s.full_mask
    while not p.is_solved(live):
        g, cands = _step(p, live, tie)
        rnd, live = _round(p, len(t.rounds) + 1, live, g, cands, int(bits[g]))
        t.rounds.append(rnd)
    t.output = p.output_of(live)
    return t


def offline_query_sequence(s: SupportSet, f: FunctionSpec | Problem, tie: TieRule = LOWEST) -> StrategyTree:
    """The whole adaptive plan the greedy rule induces on ``s``."""
    p = f if isinstance(f, Problem) else Problem.of(s, f)

    def build(live: int) -> StrategyTree:
        if p.is_solved(live):
            return StrategyTree(live, output=p.output_of(live))
        g, _ = _step(p, live, tie)
        zeros, ones = p.split(live, g)
        return StrategyTree(live, s.address_of(g + 1), {0: build(zeros), 1: build(ones)})

    return build(s.full_mask)


def run_worst_case(s: SupportSet, f: FunctionSpec, tie: TieRule = LOWEST) -> Transcript:
    """Run the protocol against an adversary that maximises the greedy cost.

    At each query the adversary answers with the branch whose remaining
    greedy plan is deepest. Among equally deep branches it takes the one
    leaving more function outputs, and then bit 0.
    """
    p = Problem.of(s, f)
    tree = offline_query_sequence(s, p, tie)
    depth: dict[int, int] = {}

    def d(node: StrategyTree) -> int:
        key = id(node)
        if key not in depth:
            depth[key] = node.depth()
        return depth[key]

    t = Transcript("worst-case", s.n_informants, s.total_width)
    node, live = tree, s.full_mask
    while not node.is_leaf:
        g = node.address.global_index - 1
        b = max((0, 1), key=lambda x: (d(node.children[x]), p.mu_f(node.children[x].live), -x))
        rnd, live = _round(p, len(t.rounds) + 1, live, g, _step(p, live, tie)[1], b)
        t.rounds.append(rnd)
        node = node.children[b]
    t.output = node.output
    return t
