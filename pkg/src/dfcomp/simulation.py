"""Sink and informant actors exchanging bit-serial messages.

The round driver is synchronous: each round the sink sends one query, the
addressed informant sends one answer bit, and nothing else moves. The
sink is built from the support set and function only; an informant is built
from its own string and its own marginal support, and never sees anything
else.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .ambiguity import BitAddress, SupportSet, Vector, bits_needed
from .errors import InvalidArgumentError, ProtocolError
from .functions import FunctionSpec, Output, Problem, evaluate
from .protocol import LOWEST, TieRule, _step


@dataclass(frozen=True)
class Message:
    kind: str  # "query" | "answer" | "halt"
    round: int
    channel: int
    address: BitAddress | None = None
    bit: int | None = None
    output: Output = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "round": self.round, "channel": self.channel}
        if self.address is not None:
            a = self.address
            d["address"] = [a.informant, a.position, a.global_index]
        if self.bit is not None:
            d["bit"] = self.bit
        if self.kind == "halt":
            d["output"] = self.output
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Message":
        address = BitAddress(*d["address"]) if "address" in d else None
        return cls(d["kind"], d["round"], d["channel"], address, d.get("bit"), d.get("output"))


class Informant:
    """Holds one string; answers queries for its own bit positions."""

    def __init__(self, index: int, value: str, marginal: frozenset[str]):
        if value not in marginal:
            raise InvalidArgumentError(f"informant {index} value {value!r} is outside its support")
        self.index = index
        self._value = value
        self._marginal = marginal
        self.inbox: deque[Message] = deque()

    def step(self) -> Message | None:
        if not self.inbox:
            return None
        msg = self.inbox.popleft()
        if msg.kind == "halt":
            return None
        if msg.channel != self.index or msg.address is None or msg.address.informant != self.index:
            raise ProtocolError(f"informant {self.index} got a query meant for {msg.channel}")
        bit = int(self._value[msg.address.position - 1])
        return Message("answer", msg.round, self.index, msg.address, bit)


class Sink:
    """Runs the greedy rule over its conditional ambiguity set."""

    def __init__(self, support: SupportSet, function: FunctionSpec, tie: TieRule = LOWEST):
        self.problem = Problem.of(support, function)
        self.support = support
        self.tie = tie
        self.live = support.full_mask
        self.round = 0
        self._pending: Message | None = None
        self.inbox: deque[Message] = deque()

    def step(self) -> list[Message]:
        """Consume any answer, then emit the next query or the halt messages."""
        p = self.problem
        while self.inbox:
            msg = self.inbox.popleft()
            if self._pending is None or msg.round != self._pending.round or msg.address != self._pending.address:
                raise ProtocolError(f"unexpected answer {msg}")
            zeros, ones = p.split(self.live, msg.address.global_index - 1)
            self.live = ones if msg.bit else zeros
            if not self.live:
                raise ProtocolError("answer is inconsistent with the support set")
            self._pending = None
        if self._pending is not None:
            return []
        if p.is_solved(self.live):
            out = p.output_of(self.live)
            return [Message("halt", self.round, i, output=out) for i in range(1, self.support.n_informants + 1)]
        g, _ = _step(p, self.live, self.tie)
        self.round += 1
        addr = self.support.address_of(g + 1)
        self._pending = Message("query", self.round, addr.informant, addr)
        return [self._pending]


@dataclass
class SimulationLog:
    n_informants: int
    messages: list[Message] = field(default_factory=list)
    output: Output = None
    correct: bool = False
    query_bits: int = 0  # sink bits per query

    @property
    def informant_bits(self) -> list[int]:
        counts = [0] * self.n_informants
        for m in self.messages:
            if m.kind == "answer":
                counts[m.channel - 1] += 1
        return counts

    @property
    def sink_bits(self) -> list[int]:
        counts = [0] * self.n_informants
        for m in self.messages:
            if m.kind == "query":
                counts[m.channel - 1] += self.query_bits
        return counts

    def queries(self) -> list[tuple[BitAddress, int]]:
        return [(m.address, m.bit) for m in self.messages if m.kind == "answer"]

    def to_dict(self) -> dict:
        return {
            "n_informants": self.n_informants,
            "messages": [m.to_dict() for m in self.messages],
            "informant_bits": self.informant_bits,
            "sink_bits": self.sink_bits,
            "output": self.output,
            "correct": self.correct,
            "query_bits": self.query_bits,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimulationLog":
        return cls(d["n_informants"], [Message.from_dict(m) for m in d["messages"]], d["output"],
                   d["correct"], d["query_bits"])


def simulate(s: SupportSet, f: FunctionSpec, drawn: Sequence[str], tie: TieRule = LOWEST) -> SimulationLog:
    drawn = tuple(drawn)
    if drawn not in s.index:
        raise InvalidArgumentError(f"drawn vector {drawn} is not in the support set")
    sink = Sink(s, f, tie)
    informants = {i: Informant(i, drawn[i - 1], s.marginal(i)) for i in range(1, s.n_informants + 1)}
    log = SimulationLog(s.n_informants, query_bits=bits_needed(s.total_width))
    # every query strictly shrinks the live set
    for _ in range(s.total_width + 1):
        out = sink.step()
        if out and out[0].kind == "halt":
            log.messages.extend(out)
            for m in out:
                informants[m.channel].inbox.append(m)
                informants[m.channel].step()
            log.output = out[0].output
            break
        (query,) = out
        log.messages.append(query)
        informants[query.channel].inbox.append(query)
        answers = [a for a in (inf.step() for inf in informants.values()) if a is not None]
        if len(answers) != 1:
            raise ProtocolError(f"round {query.round} produced {len(answers)} answers")
        log.messages.append(answers[0])
        sink.inbox.append(answers[0])
    else:
        raise ProtocolError("sink did not halt within total_width rounds")
    log.correct = log.output == evaluate(f, drawn)
    return log


@dataclass
class BatchSummary:
    bits: dict[Vector, int]
    max_bits: int
    profile: list[int]
    all_correct: bool

    def to_dict(self) -> dict:
        return {
            "bits": [{"vector": list(v), "bits": b} for v, b in self.bits.items()],
            "max_bits": self.max_bits,
            "profile": self.profile,
            "all_correct": self.all_correct,
        }


def batch_simulate(s: SupportSet, f: FunctionSpec, tie: TieRule = LOWEST) -> BatchSummary:
    """Simulate every support vector; ``max_bits`` is the greedy worst case."""
    bits, profile, ok = {}, [0] * s.n_informants, True
    for v in s.vectors:
        log = simulate(s, f, v, tie)
        counts = log.informant_bits
        bits[v] = sum(counts)
        profile = [max(a, b) for a, b in zip(profile, counts)]
        ok = ok and log.correct
    return BatchSummary(bits, max(bits.values()), profile, ok)
