"""Adaptive query plans: binary trees of bit queries with resolved leaves."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .ambiguity import BitAddress, SupportSet, Vector
from .functions import Output


@dataclass(frozen=True)
class StrategyTree:
    """A node of a query plan.

    Internal nodes carry the queried ``address`` and ``children`` keyed by
    the answered bit. Leaves carry the resolved ``output``. ``live`` is the
    bitset of support vectors consistent with the path to this node.
    """

    live: int
    address: BitAddress | None = None
    children: dict[int, "StrategyTree"] = field(default_factory=dict)
    output: Output = None

    @property
    def is_leaf(self) -> bool:
        return self.address is None

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(c.depth() for c in self.children.values())

    def cost(self, weights: Sequence[int]) -> int:
        """Worst root-leaf sum of ``weights[global_index - 1]``."""
        if self.is_leaf:
            return 0
        w = weights[self.address.global_index - 1]
        return w + max(c.cost(weights) for c in self.children.values())

    def profile(self, n_informants: int) -> tuple[int, ...]:
        """Per-informant maximum, over root-leaf paths, of bits sent."""
        if self.is_leaf:
            return (0,) * n_informants
        sub = [c.profile(n_informants) for c in self.children.values()]
        out = [max(col) for col in zip(*sub)]
        out[self.address.informant - 1] += 1
        return tuple(out)

    def path(self, support: SupportSet, v: Vector) -> tuple[list[tuple[BitAddress, int]], "StrategyTree"]:
        """Queries and answers followed for vector ``v``, and the leaf reached."""
        bits = "".join(v)
        node, steps = self, []
        while not node.is_leaf:
            b = int(bits[node.address.global_index - 1])
            steps.append((node.address, b))
            node = node.children[b]
        return steps, node

    def nodes(self) -> Iterator["StrategyTree"]:
        yield self
        for b in sorted(self.children):
            yield from self.children[b].nodes()

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"output": self.output}
        a = self.address
        return {
            "query": {"informant": a.informant, "position": a.position, "global": a.global_index},
            "children": {str(b): c.to_dict() for b, c in sorted(self.children.items())},
        }

    def signature(self) -> tuple:
        """Hashable shape used to tell trees apart."""
        if self.is_leaf:
            return ()
        return (self.address.global_index,) + tuple(
            self.children[b].signature() for b in sorted(self.children)
        )
