"""Depth-bounded action-trace spaces.

A trace is ``0`` or ``α_a(s)`` for an agent ``a``. Traces are stored as
tuples of agent labels with the most recent action first, so ``α_2(α_1(0))``
is ``("2", "1")`` and renders as ``2(1(0))``. The bounded space holds every
trace of length at most ``depth``, in length-lexicographic order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .funcpair import (
    Diagnostic,
    StateFunction,
    check_pair,
    epistemic,
    parametric_epistemic,
    validate_pair,
)
from .relalg import (
    REFLEXIVE_TRANSITIVE,
    Relation,
    StateSpace,
    closure,
    compose,
    converse,
    kernel,
)
from .synthesis import from_equivalence

Trace = tuple[str, ...]


def trace_name(trace: Trace) -> str:
    return "".join(f"{a}(" for a in trace) + "0" + ")" * len(trace)


@dataclass(frozen=True)
class TraceSpace:
    agents: tuple[str, ...]
    depth: int
    traces: tuple[Trace, ...] = field(init=False, repr=False)
    space: StateSpace = field(init=False, repr=False)

    def __post_init__(self):
        agents = tuple(str(a) for a in self.agents)
        if not agents or len(set(agents)) != len(agents):
            raise ValueError("agents must be a non-empty set of distinct labels")
        if any(c in a for a in agents for c in "()") or self.depth < 0:
            raise ValueError("agent labels may not contain parentheses; depth must be >= 0")
        traces = tuple(t for k in range(self.depth + 1)
                       for t in itertools.product(agents, repeat=k))
        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "traces", traces)
        object.__setattr__(self, "space", StateSpace(tuple(trace_name(t) for t in traces)))

    def __len__(self):
        return len(self.traces)

    def position(self, s) -> int:
        if isinstance(s, tuple):
            return self.space.position(trace_name(s))
        return self.space.position(s)

    def interior(self) -> list[int]:
        return [i for i, t in enumerate(self.traces) if len(t) < self.depth]

    def boundary(self) -> list[int]:
        return [i for i, t in enumerate(self.traces) if len(t) == self.depth]


def project(ts: TraceSpace, agent: str, s) -> int:
    """Keep exactly ``agent``'s actions, in order."""
    trace = ts.traces[ts.position(s)]
    return ts.position(tuple(b for b in trace if b == agent))


def projection(ts: TraceSpace, agent: str) -> StateFunction:
    return StateFunction(ts.space, {i: project(ts, agent, i) for i in range(len(ts))})


def indistinguishability(ts: TraceSpace, agent: str) -> Relation:
    return kernel(projection(ts, agent))


def action(ts: TraceSpace, agent: str) -> StateFunction:
    """``s -> α_agent(s)``, undefined where the result would exceed the depth."""
    return StateFunction(ts.space, {
        i: ts.position((agent,) + t) for i, t in enumerate(ts.traces) if len(t) < ts.depth})


# -- action terms ---------------------------------------------------------------


@dataclass(frozen=True)
class Prim:
    agent: str


@dataclass(frozen=True)
class IdTerm:
    pass


@dataclass(frozen=True)
class Converse:
    term: "ActionTerm"


@dataclass(frozen=True)
class Union:
    left: "ActionTerm"
    right: "ActionTerm"


@dataclass(frozen=True)
class Star:
    term: "ActionTerm"


@dataclass(frozen=True)
class Power:
    term: "ActionTerm"
    n: int


ActionTerm = Prim | IdTerm | Converse | Union | Star | Power


def pdl_relation(ts: TraceSpace, term: ActionTerm) -> Relation:
    if isinstance(term, Prim):
        if term.agent not in ts.agents:
            raise ValueError(f"unknown agent {term.agent!r}")
        return action(ts, term.agent).graph()
    if isinstance(term, IdTerm):
        return Relation.identity(ts.space)
    if isinstance(term, Converse):
        return converse(pdl_relation(ts, term.term))
    if isinstance(term, Union):
        return pdl_relation(ts, term.left) | pdl_relation(ts, term.right)
    if isinstance(term, Star):
        return closure(pdl_relation(ts, term.term), REFLEXIVE_TRANSITIVE)
    if isinstance(term, Power):
        if term.n < 0:
            raise ValueError("negative power")
        base = pdl_relation(ts, term.term)
        out = Relation.identity(ts.space)
        for _ in range(term.n):
            out = compose(out, base)
        return out
    raise TypeError(f"not an action term: {term!r}")


def back_and_forth(agent: str) -> Star:
    """``(α_a ∪ α_a⁻¹)*``."""
    return Star(Union(Prim(agent), Converse(Prim(agent))))


# -- correspondences ------------------------------------------------------------


@dataclass
class CorrespondenceReport:
    agent: str
    lhs: Relation
    rhs: Relation
    holds: bool
    missing: list = field(default_factory=list)  # in rhs, not in lhs
    extra: list = field(default_factory=list)  # in lhs, not in rhs
    boundary_holds: bool | None = None
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "agent": self.agent,
            "holds": self.holds,
            "boundary_holds": self.boundary_holds,
            "missing": [list(p) for p in self.missing],
            "extra": [list(p) for p in self.extra],
            "lhs_pairs": len(self.lhs),
            "rhs_pairs": len(self.rhs),
            "notes": self.notes,
        }


def projection_pair(ts: TraceSpace, agent: str):
    pi = projection(ts, agent)
    return validate_pair(pi, StateFunction.identity(ts.space, pi.image()))


def verify_indist_correspondence(ts: TraceSpace, agent: str) -> CorrespondenceReport:
    lhs = epistemic(projection_pair(ts, agent))
    rhs = indistinguishability(ts, agent)
    return CorrespondenceReport(
        agent, lhs, rhs, lhs == rhs,
        missing=(rhs - lhs).named_pairs(), extra=(lhs - rhs).named_pairs())


def pdl_lhs(ts: TraceSpace, agent: str) -> Relation:
    """``id ∪ E`` with visibility ``id_S`` and the action map in the bias slot."""
    ident = StateFunction.identity(ts.space)
    return Relation.identity(ts.space) | parametric_epistemic(ident, action(ts, agent))


def verify_pdl_correspondence(ts: TraceSpace, agent: str) -> CorrespondenceReport:
    lhs = pdl_lhs(ts, agent)
    rhs = pdl_relation(ts, back_and_forth(agent))
    inner = ts.interior()
    l_in, r_in = lhs.restrict(inner), rhs.restrict(inner)
    report = CorrespondenceReport(
        agent, lhs, rhs, l_in == r_in,
        missing=(r_in - l_in).named_pairs(), extra=(l_in - r_in).named_pairs(),
        boundary_holds=lhs == rhs)
    if not inner:
        report.notes.append("no interior states at depth 0")
    return report


def action_bias_diagnostics(ts: TraceSpace, agent: str) -> list[Diagnostic]:
    """Why ``(id_S, α_a)`` is not a valid pair (expected non-empty)."""
    return check_pair(StateFunction.identity(ts.space), action(ts, agent))


def constructed_projection(ts: TraceSpace, agent: str):
    """A valid pair whose knowledge relation is ``id ∪ E`` with the action bias."""
    target = pdl_lhs(ts, agent)
    pair = from_equivalence(target)
    return pair, epistemic(pair) == target
