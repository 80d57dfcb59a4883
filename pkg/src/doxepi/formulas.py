"""Formulas of the belief/knowledge language.

Surface syntax, loosest to tightest binding::

    phi <-> psi        (right associative)
    phi -> psi         (right associative)
    phi | psi
    phi & psi
    ~phi   B[a] phi   K[a] phi   DB{a,b} phi   CB{..} phi   DK{..} phi   CK{..} phi
    P   false   ( phi )

``B``/``K``/``DB``/... are only modalities when directly followed by their
bracket, so they remain usable as atom names.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Union


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Belief:
    label: str
    sub: "Formula"


@dataclass(frozen=True)
class Knowledge:
    label: str
    sub: "Formula"


@dataclass(frozen=True)
class DistBelief:
    labels: tuple[str, ...]
    sub: "Formula"


@dataclass(frozen=True)
class CommonBelief:
    labels: tuple[str, ...]
    sub: "Formula"


@dataclass(frozen=True)
class DistKnowledge:
    labels: tuple[str, ...]
    sub: "Formula"


@dataclass(frozen=True)
class CommonKnowledge:
    labels: tuple[str, ...]
    sub: "Formula"


Formula = Union[Atom, Bottom, Not, And, Or, Implies, Iff, Belief, Knowledge,
                DistBelief, CommonBelief, DistKnowledge, CommonKnowledge]

BINARY = {"&": And, "|": Or, "->": Implies, "<->": Iff}
SYMBOL = {cls: sym for sym, cls in BINARY.items()}
# binding power and associativity
LEVEL = {Iff: 1, Implies: 2, Or: 3, And: 4}
RIGHT_ASSOC = {Iff, Implies}
UNARY_LEVEL = 5

INDIVIDUAL = {"B": Belief, "K": Knowledge}
GROUP = {"DB": DistBelief, "CB": CommonBelief, "DK": DistKnowledge, "CK": CommonKnowledge}
MODAL_NAME = {cls: name for name, cls in {**INDIVIDUAL, **GROUP}.items()}


# -- tokenizer --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(<->|->|[~&|()\[\]{},])|(\w+))")


def tokenize(text: str) -> list[tuple[str, str, int]]:
    """Split into ``(kind, value, position)`` triples; kind is 'op' or 'word'."""
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(1) if m.group(1) else m.start(2)
        if m.group(1):
            out.append(("op", m.group(1), start))
        else:
            out.append(("word", m.group(2), start))
        pos = m.end()
    out.append(("end", "", n))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, offset=0):
        return self.tokens[min(self.i + offset, len(self.tokens) - 1)]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value or kind == "end":
            found = "end of input" if kind == "end" else repr(v)
            raise ParseError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        phi = self.binary(1)
        kind, v, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", pos)
        return phi

    def binary(self, level):
        if level > LEVEL[And]:
            return self.unary()
        left = self.binary(level + 1)
        while True:
            kind, v, _ = self.peek()
            cls = BINARY.get(v) if kind == "op" else None
            if cls is None or LEVEL[cls] != level:
                return left
            self.take()
            if cls in RIGHT_ASSOC:
                return cls(left, self.binary(level))
            left = cls(left, self.binary(level + 1))

    def unary(self):
        kind, v, pos = self.peek()
        if kind == "op" and v == "~":
            self.take()
            return Not(self.unary())
        if kind == "word":
            nxt = self.peek(1)
            if v in INDIVIDUAL and nxt[1] == "[":
                self.take()
                self.take()
                label = self.label()
                self.expect("]")
                return INDIVIDUAL[v](label, self.unary())
            if v in GROUP and nxt[1] == "{":
                self.take()
                self.take()
                labels = []
                if self.peek()[1] == "}":
                    raise ParseError("empty group", self.peek()[2])
                labels.append(self.label())
                while self.peek()[1] == ",":
                    self.take()
                    labels.append(self.label())
                self.expect("}")
                return GROUP[v](tuple(labels), self.unary())
        return self.primary()

    def label(self):
        kind, v, pos = self.take()
        if kind != "word":
            raise ParseError("agent label expected", pos)
        return v

    def primary(self):
        kind, v, pos = self.take()
        if kind == "op" and v == "(":
            phi = self.binary(1)
            self.expect(")")
            return phi
        if kind == "word":
            return Bottom() if v == "false" else Atom(v)
        raise ParseError("formula expected" if kind != "end" else "unexpected end of input", pos)


def parse(text: str) -> Formula:
    return _Parser(text).parse()


def _level(phi) -> int:
    if isinstance(phi, (Atom, Bottom)):
        return 6
    return LEVEL.get(type(phi), UNARY_LEVEL)


def render(phi: Formula) -> str:
    """Text with the fewest parentheses that still parses back to ``phi``."""
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Not):
        return "~" + _wrap(phi.sub, _level(phi.sub) < UNARY_LEVEL)
    if isinstance(phi, (Belief, Knowledge)):
        return f"{MODAL_NAME[type(phi)]}[{phi.label}] " + _wrap(phi.sub, _level(phi.sub) < UNARY_LEVEL)
    if isinstance(phi, (DistBelief, CommonBelief, DistKnowledge, CommonKnowledge)):
        head = f"{MODAL_NAME[type(phi)]}{{{','.join(phi.labels)}}} "
        return head + _wrap(phi.sub, _level(phi.sub) < UNARY_LEVEL)
    cls = type(phi)
    lvl = LEVEL[cls]
    right_assoc = cls in RIGHT_ASSOC
    left = _wrap(phi.left, _level(phi.left) < lvl or (_level(phi.left) == lvl and right_assoc))
    right = _wrap(phi.right, _level(phi.right) < lvl or (_level(phi.right) == lvl and not right_assoc))
    return f"{left} {SYMBOL[cls]} {right}"


def _wrap(phi, paren: bool) -> str:
    text = render(phi)
    return f"({text})" if paren else text


def read_formulas(path) -> list[tuple[int, Formula]]:
    """Parse a formula file: one formula per line, ``#`` starts a comment."""
    out = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        text = line.split("#", 1)[0].strip()
        if text:
            try:
                out.append((lineno, parse(text)))
            except ParseError as exc:
                raise ParseError(f"line {lineno}: {exc}", exc.position) from None
    return out


# -- structure ----------------------------------------------------------------------


def children(phi: Formula) -> tuple:
    if isinstance(phi, (Atom, Bottom)):
        return ()
    if isinstance(phi, (And, Or, Implies, Iff)):
        return (phi.left, phi.right)
    return (phi.sub,)


def depth(phi: Formula) -> int:
    kids = children(phi)
    return 0 if not kids else 1 + max(depth(k) for k in kids)


def subformulas(phi: Formula) -> Iterator[Formula]:
    yield phi
    for k in children(phi):
        yield from subformulas(k)


def random_formula(rng: random.Random, atoms, belief_labels, knowledge_labels,
                   max_depth: int, groups: bool = True) -> Formula:
    """A random formula of depth at most ``max_depth``."""
    if max_depth == 0 or rng.random() < 0.2:
        return Bottom() if rng.random() < 0.1 else Atom(rng.choice(list(atoms)))
    d = max_depth - 1
    choices = ["not", "and", "or", "implies", "iff"]
    if belief_labels:
        choices += ["B", "B"] + (["DB", "CB"] if groups else [])
    if knowledge_labels:
        choices += ["K", "K"] + (["DK", "CK"] if groups else [])
    op = rng.choice(choices)
    sub = lambda: random_formula(rng, atoms, belief_labels, knowledge_labels, d, groups)  # noqa: E731
    if op == "not":
        return Not(sub())
    if op in ("and", "or", "implies", "iff"):
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[op]
        return cls(sub(), sub())
    if op == "B":
        return Belief(rng.choice(list(belief_labels)), sub())
    if op == "K":
        return Knowledge(rng.choice(list(knowledge_labels)), sub())
    pool = list(belief_labels) if op in ("DB", "CB") else list(knowledge_labels)
    labels = tuple(rng.sample(pool, rng.randint(1, len(pool))))
    return GROUP[op](labels, sub())
