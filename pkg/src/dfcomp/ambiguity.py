"""Support sets, the concatenated bit encoding and ambiguity-set conditioning.

A support set holds N-tuples of fixed-width bit strings.  Vector ``v`` is
also viewed as one integer code: the concatenation of its components, most
significant bit first.  Global bit 1 is therefore the first bit of informant
1, and global bit ``total_width`` is the last bit of informant N.

Sets of live vectors are stored as integer bitsets over the indices of
``SupportSet.vectors`` (which are kept sorted), so two knowledge states with
the same live vectors compare equal whatever order their constraints were
learned in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import DefinedBitError, EmptyConditioningError, InvalidArgumentError

Vector = tuple[str, ...]


def bits_needed(count: int) -> int:
    """Return ceil(log2(count)); ``bits_needed(1) == 0``."""
    if count < 1:
        raise InvalidArgumentError(f"bits_needed needs a positive count, got {count}")
    return (count - 1).bit_length()


def _is_bits(token: str) -> bool:
    return bool(token) and all(c in "01" for c in token)


@dataclass(frozen=True, order=True)
class BitAddress:
    """One bit-location. All three indices are 1-based."""

    informant: int
    position: int
    global_index: int

    def __str__(self) -> str:
        return f"x{self.informant}[{self.position}]"


@dataclass(frozen=True)
class SupportSet:
    widths: tuple[int, ...]
    vectors: tuple[Vector, ...]

    def __post_init__(self) -> None:
        widths = tuple(int(w) for w in self.widths)
        if not widths:
            raise InvalidArgumentError("a support set needs at least one informant")
        if any(w < 1 for w in widths):
            raise InvalidArgumentError(f"widths must be positive, got {widths}")
        vectors = [tuple(v) for v in self.vectors]
        if not vectors:
            raise InvalidArgumentError("a support set must be non-empty")
        for v in vectors:
            if len(v) != len(widths):
                raise InvalidArgumentError(f"vector {v} has {len(v)} components, expected {len(widths)}")
            for i, (x, w) in enumerate(zip(v, widths), start=1):
                if not isinstance(x, str) or not _is_bits(x) or len(x) != w:
                    raise InvalidArgumentError(
                        f"component {i} of {v} must be a {w}-bit string"
                    )
        # fixed widths make string order equal code order
        ordered = sorted(vectors, key="".join)
        for a, b in zip(ordered, ordered[1:]):
            if a == b:
                raise InvalidArgumentError(f"duplicate vector {a}")
        object.__setattr__(self, "widths", widths)
        object.__setattr__(self, "vectors", tuple(ordered))

    def __hash__(self) -> int:
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = hash((self.widths, self.vectors))
            self.__dict__["_hash"] = h
            return h

    @classmethod
    def from_ints(cls, widths: Sequence[int], vectors: Iterable[Sequence[int]]) -> "SupportSet":
        """Build from integer tuples, each component in natural binary."""
        widths = tuple(widths)
        out = []
        for v in vectors:
            comps = []
            for x, w in zip(v, widths):
                if x < 0 or x >= 1 << w:
                    raise InvalidArgumentError(f"value {x} does not fit in {w} bits")
                comps.append(format(x, f"0{w}b"))
            out.append(tuple(comps))
        return cls(widths, tuple(out))

    @property
    def n_informants(self) -> int:
        return len(self.widths)

    @cached_property
    def total_width(self) -> int:
        return sum(self.widths)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        acc, out = 0, []
        for w in self.widths:
            out.append(acc)
            acc += w
        return tuple(out)

    @cached_property
    def codes(self) -> tuple[int, ...]:
        return tuple(int("".join(v), 2) for v in self.vectors)

    @cached_property
    def index(self) -> dict[Vector, int]:
        return {v: k for k, v in enumerate(self.vectors)}

    @cached_property
    def full_mask(self) -> int:
        return (1 << len(self.vectors)) - 1

    @cached_property
    def bit_masks(self) -> tuple[int, ...]:
        """``bit_masks[g]``: bitset of vectors whose 0-based global bit g is 1."""
        W = self.total_width
        masks = []
        for g in range(W):
            shift = W - 1 - g
            m = 0
            for k, code in enumerate(self.codes):
                if (code >> shift) & 1:
                    m |= 1 << k
            masks.append(m)
        return tuple(masks)

    @cached_property
    def informant_of_bit(self) -> tuple[int, ...]:
        """1-based informant owning each 0-based global bit."""
        return tuple(i + 1 for i, w in enumerate(self.widths) for _ in range(w))

    def address(self, informant: int, position: int) -> BitAddress:
        if not 1 <= informant <= self.n_informants:
            raise InvalidArgumentError(f"informant {informant} out of range 1..{self.n_informants}")
        if not 1 <= position <= self.widths[informant - 1]:
            raise InvalidArgumentError(
                f"position {position} out of range for informant {informant}"
            )
        return BitAddress(informant, position, self.offsets[informant - 1] + position)

    def address_of(self, global_index: int) -> BitAddress:
        if not 1 <= global_index <= self.total_width:
            raise InvalidArgumentError(f"global bit {global_index} out of range")
        informant = self.informant_of_bit[global_index - 1]
        return BitAddress(informant, global_index - self.offsets[informant - 1], global_index)

    def addresses(self) -> list[BitAddress]:
        return [self.address_of(g) for g in range(1, self.total_width + 1)]

    def vectors_in(self, live: int) -> tuple[Vector, ...]:
        return tuple(v for k, v in enumerate(self.vectors) if live >> k & 1)

    @cached_property
    def _marginals(self) -> tuple[frozenset[str], ...]:
        return tuple(frozenset(v[i] for v in self.vectors) for i in range(self.n_informants))

    def marginal(self, informant: int) -> frozenset[str]:
        """S_{X_i} for one 1-based informant."""
        _check_informants(self, {informant})
        return self._marginals[informant - 1]

    def mu(self) -> int:
        return len(self.vectors)


def _check_informants(s: SupportSet, A: Iterable[int], *, allow_empty: bool = False) -> tuple[int, ...]:
    A = tuple(sorted(set(A)))
    if not A and not allow_empty:
        raise InvalidArgumentError("informant subset must be non-empty")
    for i in A:
        if not 1 <= i <= s.n_informants:
            raise InvalidArgumentError(f"informant {i} out of range 1..{s.n_informants}")
    return A


def _project(v: Vector, A: tuple[int, ...]) -> Vector:
    return tuple(v[i - 1] for i in A)


def marginal_support(s: SupportSet, A: Iterable[int]) -> frozenset[Vector]:
    """Distinct projections of the support onto the informants in A."""
    A = _check_informants(s, A)
    return frozenset(_project(v, A) for v in s.vectors)


@dataclass(frozen=True)
class KnowledgeState:
    """The sink's conditional ambiguity set of data vectors."""

    support: SupportSet
    live: int
    constraints: tuple[tuple[BitAddress, int], ...] = field(default=(), compare=False)

    @classmethod
    def initial(cls, s: SupportSet) -> "KnowledgeState":
        return cls(s, s.full_mask)

    @property
    def live_vectors(self) -> tuple[Vector, ...]:
        return self.support.vectors_in(self.live)

    @property
    def size(self) -> int:
        return self.live.bit_count()

    def bit_values(self, j: BitAddress) -> set[int]:
        m1 = self.support.bit_masks[j.global_index - 1]
        values = set()
        if self.live & m1:
            values.add(1)
        if self.live & ~m1:
            values.add(0)
        return values

    def is_defined(self, j: BitAddress) -> bool:
        return len(self.bit_values(j)) == 1


def condition_on_assignment(s: SupportSet, B: Iterable[int], x_B: Sequence[str]) -> KnowledgeState:
    """All vectors of ``s`` agreeing with ``x_B`` on the informants in B."""
    B = _check_informants(s, B)
    x_B = tuple(x_B)
    if len(x_B) != len(B):
        raise InvalidArgumentError(f"expected {len(B)} values, got {len(x_B)}")
    live = 0
    for k, v in enumerate(s.vectors):
        if _project(v, B) == x_B:
            live |= 1 << k
    if not live:
        raise EmptyConditioningError(f"{x_B} does not occur on informants {B}")
    constraints = tuple(
        (s.address(i, p + 1), int(bit)) for i, x in zip(B, x_B) for p, bit in enumerate(x)
    )
    return KnowledgeState(s, live, constraints)


def max_conditional_ambiguity(s: SupportSet, A: Iterable[int], B: Iterable[int]) -> int:
    """Largest number of distinct X_A values left by any value of X_B.

    With B empty this is the unconditional ambiguity of X_A. A may overlap B
    only when A is every informant (the whole-vector ambiguity).
    """
    A = _check_informants(s, A)
    B = _check_informants(s, B, allow_empty=True)
    if set(A) & set(B) and len(A) != s.n_informants:
        raise InvalidArgumentError(f"informant subsets {A} and {B} overlap")
    groups: dict[Vector, set[Vector]] = {}
    for v in s.vectors:
        groups.setdefault(_project(v, B), set()).add(_project(v, A))
    return max(len(g) for g in groups.values())


def condition_on_bit(k: KnowledgeState, j: BitAddress, b: int) -> KnowledgeState:
    if b not in (0, 1):
        raise InvalidArgumentError(f"bit value must be 0 or 1, got {b!r}")
    values = k.bit_values(j)
    if len(values) == 1:
        raise DefinedBitError(f"bit {j} is already defined as {values.pop()}")
    m1 = k.support.bit_masks[j.global_index - 1]
    live = k.live & m1 if b else k.live & ~m1
    if not live:
        raise EmptyConditioningError(f"no live vector has {j} = {b}")
    return KnowledgeState(k.support, live, k.constraints + ((j, b),))


def undefined_bits(k: KnowledgeState) -> list[BitAddress]:
    """Addresses whose value still varies over the live vectors, in global order."""
    s = k.support
    return [s.address_of(g + 1) for g in undefined_globals(s, k.live)]


def undefined_globals(s: SupportSet, live: int) -> list[int]:
    """0-based global indices of the bits that vary over ``live``."""
    out = []
    for g, m1 in enumerate(s.bit_masks):
        ones = live & m1
        if ones and ones != live:
            out.append(g)
    return out
