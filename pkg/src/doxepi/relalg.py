"""Finite binary relations over a named, ordered state space.

Relations are dense bit-matrices: row ``i`` is an ``int`` whose bit ``j`` is
set iff ``(i, j)`` is in the relation. All values are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

TRANSITIVE = "transitive"
REFLEXIVE_TRANSITIVE = "reflexive-transitive"


class SpaceMismatch(ValueError):
    pass


def bits(mask: int) -> Iterator[int]:
    """Yield the positions of set bits in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class StateSpace:
    states: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        states = tuple(self.states)
        if not states:
            raise ValueError("state space must be non-empty")
        if len(set(states)) != len(states):
            seen = set()
            dup = next(s for s in states if s in seen or seen.add(s))
            raise ValueError(f"duplicate state {dup!r}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "index", {s: i for i, s in enumerate(states)})

    @classmethod
    def of_size(cls, n: int) -> "StateSpace":
        return cls(tuple(str(i) for i in range(n)))

    def __len__(self):
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __contains__(self, name):
        return name in self.index

    @property
    def full_mask(self) -> int:
        return (1 << len(self.states)) - 1

    def position(self, state) -> int:
        """Resolve a state name (or an already-resolved index) to its index."""
        if isinstance(state, int):
            if not 0 <= state < len(self.states):
                raise IndexError(f"state index {state} out of range")
            return state
        try:
            return self.index[state]
        except KeyError:
            raise KeyError(f"unknown state {state!r}") from None

    def mask(self, states: Iterable) -> int:
        m = 0
        for s in states:
            m |= 1 << self.position(s)
        return m

    def names(self, mask: int) -> list[str]:
        return [self.states[i] for i in bits(mask)]


@dataclass(frozen=True)
class Relation:
    space: StateSpace
    rows: tuple[int, ...]

    def __post_init__(self):
        rows = tuple(self.rows)
        if len(rows) != len(self.space):
            raise ValueError("row count does not match state space size")
        full = self.space.full_mask
        if any(r & ~full for r in rows):
            raise ValueError("relation mentions states outside its space")
        object.__setattr__(self, "rows", rows)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_pairs(cls, space: StateSpace, pairs: Iterable) -> "Relation":
        rows = [0] * len(space)
        for s, t in pairs:
            rows[space.position(s)] |= 1 << space.position(t)
        return cls(space, tuple(rows))

    @classmethod
    def empty(cls, space: StateSpace) -> "Relation":
        return cls(space, (0,) * len(space))

    @classmethod
    def identity(cls, space: StateSpace, subset: Iterable | None = None) -> "Relation":
        keep = space.full_mask if subset is None else space.mask(subset)
        return cls(space, tuple((1 << i) & keep for i in range(len(space))))

    @classmethod
    def full(cls, space: StateSpace) -> "Relation":
        return cls(space, (space.full_mask,) * len(space))

    # -- views ---------------------------------------------------------------

    def pairs(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.rows):
            for j in bits(row):
                yield i, j

    def named_pairs(self) -> list[tuple[str, str]]:
        st = self.space.states
        return [(st[i], st[j]) for i, j in self.pairs()]

    def successors(self, state) -> int:
        return self.rows[self.space.position(state)]

    def __contains__(self, pair) -> bool:
        s, t = pair
        return bool(self.rows[self.space.position(s)] >> self.space.position(t) & 1)

    def __len__(self):
        return sum(bin(r).count("1") for r in self.rows)

    def __bool__(self):
        return any(self.rows)

    def __repr__(self):
        return f"Relation({self.named_pairs()!r})"

    # -- set algebra ---------------------------------------------------------

    def _same(self, other: "Relation"):
        if self.space != other.space:
            raise SpaceMismatch("relations live on different state spaces")

    def __or__(self, other: "Relation") -> "Relation":
        self._same(other)
        return Relation(self.space, tuple(a | b for a, b in zip(self.rows, other.rows)))

    def __and__(self, other: "Relation") -> "Relation":
        self._same(other)
        return Relation(self.space, tuple(a & b for a, b in zip(self.rows, other.rows)))

    def __sub__(self, other: "Relation") -> "Relation":
        self._same(other)
        return Relation(self.space, tuple(a & ~b for a, b in zip(self.rows, other.rows)))

    def __le__(self, other: "Relation") -> bool:
        self._same(other)
        return all(a & ~b == 0 for a, b in zip(self.rows, other.rows))

    def __lt__(self, other: "Relation") -> bool:
        return self <= other and self != other

    def restrict(self, subset: Iterable) -> "Relation":
        """Keep only pairs whose both ends lie in ``subset``."""
        keep = self.space.mask(subset)
        return Relation(
            self.space,
            tuple(r & keep if keep >> i & 1 else 0 for i, r in enumerate(self.rows)),
        )


def converse(r: Relation) -> Relation:
    rows = [0] * len(r.space)
    for i, j in r.pairs():
        rows[j] |= 1 << i
    return Relation(r.space, tuple(rows))


def compose(r1: Relation, r2: Relation) -> Relation:
    """Diagrammatic composition: first ``r1``, then ``r2``."""
    r1._same(r2)
    out = []
    for row in r1.rows:
        acc = 0
        for j in bits(row):
            acc |= r2.rows[j]
        out.append(acc)
    return Relation(r1.space, tuple(out))


def closure(r: Relation, kind: str = TRANSITIVE) -> Relation:
    """Transitive or reflexive-transitive closure (Warshall over bit rows)."""
    if kind not in (TRANSITIVE, REFLEXIVE_TRANSITIVE):
        raise ValueError(f"unknown closure kind {kind!r}")
    rows = list(r.rows)
    n = len(rows)
    if kind == REFLEXIVE_TRANSITIVE:
        rows = [row | (1 << i) for i, row in enumerate(rows)]
    for k in range(n):
        bit = 1 << k
        rk = rows[k]
        for i in range(n):
            if rows[i] & bit:
                rows[i] |= rk
    return Relation(r.space, tuple(rows))


def image(r: Relation) -> frozenset[int]:
    acc = 0
    for row in r.rows:
        acc |= row
    return frozenset(bits(acc))


def image_mask(r: Relation) -> int:
    acc = 0
    for row in r.rows:
        acc |= row
    return acc


def kernel(h) -> Relation:
    """``{(s, s') | h(s) == h(s')}`` over the domain of a state function ``h``."""
    fibers: dict[int, int] = {}
    for s, v in h.items():
        fibers[v] = fibers.get(v, 0) | (1 << s)
    rows = [0] * len(h.space)
    for s, v in h.items():
        rows[s] = fibers[v]
    return Relation(h.space, tuple(rows))


def smallest_equivalence(r: Relation) -> Relation:
    return closure(r | converse(r), REFLEXIVE_TRANSITIVE)


@dataclass(frozen=True)
class PropertyReport:
    serial: bool
    transitive: bool
    euclidean: bool
    symmetric: bool
    reflexive: bool
    functional: bool
    # property name -> witness tuple of state indices, for every failed flag
    witnesses: dict = field(default_factory=dict, compare=False)

    @property
    def equivalence(self) -> bool:
        return self.reflexive and self.transitive and self.symmetric

    @property
    def kd45(self) -> bool:
        return self.serial and self.transitive and self.euclidean

    def as_dict(self) -> dict:
        return {
            "serial": self.serial,
            "transitive": self.transitive,
            "euclidean": self.euclidean,
            "symmetric": self.symmetric,
            "reflexive": self.reflexive,
            "functional": self.functional,
            "equivalence": self.equivalence,
        }


def _first_serial_failure(r: Relation):
    for i, row in enumerate(r.rows):
        if not row:
            return (i,)
    return None


def _first_transitive_failure(r: Relation):
    rows = r.rows
    for i, row in enumerate(rows):
        for j in bits(row):
            missing = rows[j] & ~row
            if missing:
                return (i, j, next(bits(missing)))
    return None


def _first_euclidean_failure(r: Relation):
    rows = r.rows
    for i, row in enumerate(rows):
        for j in bits(row):
            missing = row & ~rows[j]
            if missing:
                return (i, j, next(bits(missing)))
    return None


def _first_symmetric_failure(r: Relation):
    rows = r.rows
    for i, row in enumerate(rows):
        for j in bits(row):
            if not rows[j] >> i & 1:
                return (i, j)
    return None


def _first_reflexive_failure(r: Relation):
    for i, row in enumerate(r.rows):
        if not row >> i & 1:
            return (i,)
    return None


def _first_functional_failure(r: Relation):
    for i, row in enumerate(r.rows):
        if row == 0 or row & (row - 1):
            return (i,)
    return None


_CHECKS = {
    "serial": _first_serial_failure,
    "transitive": _first_transitive_failure,
    "euclidean": _first_euclidean_failure,
    "symmetric": _first_symmetric_failure,
    "reflexive": _first_reflexive_failure,
    "functional": _first_functional_failure,
}


def classify(r: Relation) -> PropertyReport:
    flags = {}
    witnesses = {}
    for name, check in _CHECKS.items():
        w = check(r)
        flags[name] = w is None
        if w is not None:
            witnesses[name] = w
    return PropertyReport(witnesses=witnesses, **flags)


def describe_failure(space: StateSpace, prop: str, witness: tuple) -> str:
    """Human-readable account of why ``prop`` fails at ``witness``."""
    n = [space.states[i] for i in witness]
    if prop == "serial":
        return f"seriality fails at {n[0]}"
    if prop == "reflexive":
        return f"reflexivity fails at {n[0]}"
    if prop == "functional":
        return f"functionality fails at {n[0]}"
    if prop == "symmetric":
        return f"symmetry fails: ({n[0]},{n[1]}) present but ({n[1]},{n[0]}) missing"
    if prop == "transitive":
        return (f"transitivity fails: ({n[0]},{n[1]}) and ({n[1]},{n[2]}) "
                f"present but ({n[0]},{n[2]}) missing")
    if prop == "euclidean":
        return (f"euclideanness fails: ({n[0]},{n[1]}) and ({n[0]},{n[2]}) "
                f"present but ({n[1]},{n[2]}) missing")
    raise ValueError(prop)
