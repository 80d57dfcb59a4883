"""Visibility/bias function pairs and the accessibility relations they induce.

A pair ``(f, g)`` has a total visibility ``f`` on the state space and a bias
``g`` that is idempotent on ``Im(f)``. Belief accessibility relates ``s`` to
``s'`` when ``g(f(s)) == f(s')``; knowledge accessibility is the transitive
closure of belief accessibility and its converse.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .relalg import (
    TRANSITIVE,
    Relation,
    StateSpace,
    closure,
    converse,
)


class StateFunction:
    """A total map from a subset of a state space into that space.

    Immutable; keys and values are state indices.
    """

    __slots__ = ("space", "_map", "_key")

    def __init__(self, space: StateSpace, mapping: Mapping):
        table = {}
        for s, v in mapping.items():
            table[space.position(s)] = space.position(v)
        self.space = space
        self._map = table
        self._key = tuple(sorted(table.items()))

    @classmethod
    def identity(cls, space: StateSpace, subset: Iterable | None = None):
        dom = range(len(space)) if subset is None else [space.position(s) for s in subset]
        return cls(space, {i: i for i in dom})

    @classmethod
    def from_sequence(cls, space: StateSpace, values):
        """Total function on the whole space given as a value per state."""
        if len(values) != len(space):
            raise ValueError("one value per state required")
        return cls(space, dict(enumerate(values)))

    def __call__(self, state) -> int:
        return self._map[self.space.position(state)]

    def get(self, state):
        return self._map.get(state)

    def items(self):
        return self._map.items()

    @property
    def domain(self) -> frozenset[int]:
        return frozenset(self._map)

    @property
    def domain_mask(self) -> int:
        m = 0
        for s in self._map:
            m |= 1 << s
        return m

    def image(self) -> frozenset[int]:
        return frozenset(self._map.values())

    def image_mask(self) -> int:
        m = 0
        for v in self._map.values():
            m |= 1 << v
        return m

    def restrict(self, subset: Iterable[int]) -> "StateFunction":
        keep = set(subset)
        return StateFunction(self.space, {s: v for s, v in self._map.items() if s in keep})

    def then(self, h: "StateFunction") -> "StateFunction":
        """``h ∘ self``; requires ``Im(self)`` to lie inside the domain of ``h``."""
        missing = [v for v in self._map.values() if v not in h._map]
        if missing:
            raise ValueError(
                f"composition undefined: {self.space.states[missing[0]]} not in domain")
        return StateFunction(self.space, {s: h._map[v] for s, v in self._map.items()})

    def is_identity(self) -> bool:
        return all(s == v for s, v in self._map.items())

    def is_injective(self) -> bool:
        return len(set(self._map.values())) == len(self._map)

    def is_idempotent(self) -> bool:
        m = self._map
        return all(v in m and m[v] == v for v in m.values())

    def graph(self) -> Relation:
        return Relation.from_pairs(self.space, self._map.items())

    def named(self) -> dict[str, str]:
        st = self.space.states
        return {st[s]: st[v] for s, v in sorted(self._map.items())}

    def __eq__(self, other):
        if not isinstance(other, StateFunction):
            return NotImplemented
        return self.space == other.space and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"StateFunction({self.named()!r})"


def compose(h: StateFunction, f: StateFunction) -> StateFunction:
    """``h ∘ f``: apply ``f`` first."""
    return f.then(h)


@dataclass(frozen=True)
class Diagnostic:
    constraint: str
    witness: tuple
    message: str


class InvalidPair(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(d.message for d in diagnostics))

    @property
    def witness(self):
        return self.diagnostics[0].witness


class ConstraintDisagreement(AssertionError):
    """The two equivalent pair constraints disagreed: an implementation bug."""


def _first_constraint_failure(f: StateFunction, g: StateFunction):
    """Find ``(s, s')`` with ``g(f(s)) == f(s')`` but ``g(f(s')) != f(s')``."""
    fibers: dict[int, list[int]] = {}
    for s, v in f.items():
        fibers.setdefault(v, []).append(s)
    for s in range(len(f.space)):
        target = g.get(f.get(s))
        for t in fibers.get(target, ()):
            if g.get(f.get(t)) != f.get(t):
                return s, t
    return None


def check_pair(f: StateFunction, g: StateFunction) -> list[Diagnostic]:
    """All violated pair constraints, each with a concrete witness.

    An empty list means ``(f, g)`` is a valid pair.
    """
    space = f.space
    st = space.states
    if g.space != space:
        raise ValueError("f and g live on different state spaces")
    out = []
    undefined = [s for s in range(len(space)) if f.get(s) is None]
    if undefined:
        out.append(Diagnostic(
            "f-total", (undefined[0],), f"f undefined at {st[undefined[0]]}"))
        return out

    im = sorted(f.image())
    # witnesses are reported as the least source state s hitting a bad f(s)
    first_src = {}
    for s in range(len(space)):
        first_src.setdefault(f(s), s)

    untotal = [x for x in im if g.get(x) is None]
    if untotal:
        x = untotal[0]
        out.append(Diagnostic("g-total", (first_src[x],), f"g undefined at f({st[first_src[x]]})={st[x]}"))
    imf = set(im)
    unclosed = [x for x in im if g.get(x) is not None and g.get(x) not in imf]
    if unclosed:
        x = unclosed[0]
        out.append(Diagnostic(
            "g-closed", (first_src[x],),
            f"g leaves Im(f): g({st[x]})={st[g.get(x)]} is not in Im(f)"))

    bad_idem = [x for x in im
                if g.get(x) is not None and g.get(g.get(x)) is not None
                and g.get(g.get(x)) != g.get(x)]
    if bad_idem:
        x = bad_idem[0]
        gx = g.get(x)
        out.append(Diagnostic(
            "idempotent", (first_src[x],),
            f"g not idempotent: g(g({st[x]}))={st[g.get(gx)]} != {st[gx]}=g({st[x]})"))

    if untotal or unclosed:
        return out

    # both defining constraints are evaluated independently and must agree
    pair_fail = _first_constraint_failure(f, g)
    if (pair_fail is None) != (not bad_idem):
        raise ConstraintDisagreement(
            f"idempotency={'fails' if bad_idem else 'holds'} but "
            f"fixpoint constraint={'holds' if pair_fail is None else 'fails'}")
    if pair_fail is not None:
        s, t = pair_fail
        out.append(Diagnostic(
            "fixpoint", (s, t),
            f"g(f({st[s]}))=f({st[t]}) but g(f({st[t]})) != f({st[t]})"))
    return out


@dataclass(frozen=True)
class FunctionPair:
    """A validated visibility/bias pair. Build with :func:`validate_pair`."""

    f: StateFunction
    g: StateFunction

    @property
    def space(self) -> StateSpace:
        return self.f.space

    @property
    def bias(self) -> StateFunction:
        """``g`` restricted to ``Im(f)``."""
        return self.g.restrict(self.f.image())


def validate_pair(f: StateFunction, g: StateFunction) -> FunctionPair:
    diagnostics = check_pair(f, g)
    if diagnostics:
        raise InvalidPair(diagnostics)
    return FunctionPair(f, g)


def parametric_doxastic(f: StateFunction, g: StateFunction) -> Relation:
    """``{(s, s') | g(f(s)) == f(s')}`` with no validity requirement on the pair.

    States where ``f`` or ``g`` is undefined get no successors.
    """
    fibers: dict[int, int] = {}
    for s, v in f.items():
        fibers[v] = fibers.get(v, 0) | (1 << s)
    rows = []
    for s in range(len(f.space)):
        fs = f.get(s)
        target = None if fs is None else g.get(fs)
        rows.append(fibers.get(target, 0))
    return Relation(f.space, tuple(rows))


def parametric_epistemic(f: StateFunction, g: StateFunction) -> Relation:
    d = parametric_doxastic(f, g)
    return closure(d | converse(d), TRANSITIVE)


def doxastic(pair: FunctionPair) -> Relation:
    return parametric_doxastic(pair.f, pair.g)


def epistemic(pair: FunctionPair) -> Relation:
    return parametric_epistemic(pair.f, pair.g)


def is_unbiased(pair: FunctionPair) -> bool:
    return all(pair.g(x) == x for x in pair.f.image())


# -- generation ---------------------------------------------------------------


def idempotent_maps(points: Iterable[int]) -> Iterator[dict[int, int]]:
    """Every idempotent map of ``points`` into itself, each exactly once.

    An idempotent map is determined by its fixpoint set (= its image) and an
    arbitrary assignment of the remaining points into that set.
    """
    pts = sorted(points)
    for r in range(1, len(pts) + 1):
        for fixed in itertools.combinations(pts, r):
            rest = [p for p in pts if p not in fixed]
            for targets in itertools.product(fixed, repeat=len(rest)):
                m = {p: p for p in fixed}
                m.update(zip(rest, targets))
                yield m


def iter_pairs(space: StateSpace) -> Iterator[FunctionPair]:
    """All valid pairs on ``space``, with ``g`` defined exactly on ``Im(f)``."""
    n = len(space)
    for values in itertools.product(range(n), repeat=n):
        f = StateFunction.from_sequence(space, values)
        for gm in idempotent_maps(set(values)):
            yield FunctionPair(f, StateFunction(space, gm))


def random_idempotent(points: Iterable[int], rng: random.Random) -> dict[int, int]:
    pts = sorted(points)
    k = rng.randint(1, len(pts))
    fixed = rng.sample(pts, k)
    m = {p: p for p in fixed}
    for p in pts:
        if p not in m:
            m[p] = rng.choice(fixed)
    return m


def random_pair(space: StateSpace, rng: random.Random) -> FunctionPair:
    n = len(space)
    f = StateFunction.from_sequence(space, [rng.randrange(n) for _ in range(n)])
    g = StateFunction(space, random_idempotent(f.image(), rng))
    return validate_pair(f, g)
