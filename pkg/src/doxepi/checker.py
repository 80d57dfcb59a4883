"""Satisfaction, model validity, and executable law suites.

Extensions are state bitmasks computed bottom-up. Schematic laws are checked
by instantiating their metavariables with every distinct extension that some
formula of bounded depth denotes in the model: since satisfaction is
compositional, two formulas with the same extension are interchangeable in
any schema, so this is exactly the verdict over the whole formula pool.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable

from .formulas import (
    And,
    Atom,
    Belief,
    Bottom,
    CommonBelief,
    CommonKnowledge,
    DistBelief,
    DistKnowledge,
    Formula,
    Iff,
    Implies,
    Knowledge,
    Not,
    Or,
    parse,
    render,
)
from .funcpair import FunctionPair
from .group import GroupKind, combine
from .relalg import Relation, StateSpace
from .signature import LabelError, Model

VALID = "valid-in-model"
FALSIFIED = "falsified"

# metavariables used in law schemas
PHI, PSI = "φ", "ψ"

# above this many states the frame-level checks fall back to the formula pool
FRAME_LIMIT = 12

_GROUP_KIND = {
    DistBelief: GroupKind.DD,
    CommonBelief: GroupKind.CD,
    DistKnowledge: GroupKind.DE,
    CommonKnowledge: GroupKind.CE,
}


def box(rows: tuple[int, ...], target: int) -> int:
    """States all of whose successors lie in ``target``."""
    out = 0
    for s, row in enumerate(rows):
        if not row & ~target:
            out |= 1 << s
    return out


@dataclass(frozen=True)
class Extension:
    formula: Formula
    mask: int
    space: StateSpace

    @property
    def states(self) -> list[str]:
        return self.space.names(self.mask)

    def __contains__(self, state) -> bool:
        return bool(self.mask >> self.space.position(state) & 1)


class Evaluator:
    """Bottom-up evaluation over one model, memoized per subformula."""

    def __init__(self, model: Model):
        self.model = model
        self.full = model.space.full_mask
        self.memo: dict = {}
        self._groups: dict = {}

    def relation(self, phi) -> Relation:
        m = self.model
        if isinstance(phi, Belief):
            return m.belief_relation(phi.label)
        if isinstance(phi, Knowledge):
            return m.knowledge_relation(phi.label)
        kind = _GROUP_KIND[type(phi)]
        key = (kind, phi.labels)
        if key not in self._groups:
            get = m.knowledge_relation if kind.epistemic else m.belief_relation
            self._groups[key] = combine([get(label) for label in phi.labels], kind)
        return self._groups[key]

    def mask(self, phi: Formula, env: dict | None = None) -> int:
        if env is None:
            hit = self.memo.get(phi)
            if hit is None:
                hit = self.memo[phi] = self._eval(phi, None)
            return hit
        return self._eval(phi, env)

    def _eval(self, phi, env):
        ev = self.mask
        if isinstance(phi, Atom):
            if env is not None and phi.name in env:
                return env[phi.name]
            try:
                return self.model.valuation[phi.name]
            except KeyError:
                raise LabelError(f"unknown atom {phi.name!r}") from None
        if isinstance(phi, Bottom):
            return 0
        if isinstance(phi, Not):
            return self.full & ~ev(phi.sub, env)
        if isinstance(phi, And):
            return ev(phi.left, env) & ev(phi.right, env)
        if isinstance(phi, Or):
            return ev(phi.left, env) | ev(phi.right, env)
        if isinstance(phi, Implies):
            return (self.full & ~ev(phi.left, env)) | ev(phi.right, env)
        if isinstance(phi, Iff):
            return self.full & ~(ev(phi.left, env) ^ ev(phi.right, env))
        return box(self.relation(phi).rows, ev(phi.sub, env))


def extension(model: Model, phi: Formula, evaluator: Evaluator | None = None) -> Extension:
    ev = evaluator or Evaluator(model)
    return Extension(phi, ev.mask(phi), model.space)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    counterexample: str | None

    def __bool__(self):
        return self.valid


def valid_in_model(model: Model, phi: Formula, evaluator: Evaluator | None = None) -> Verdict:
    ext = extension(model, phi, evaluator)
    missing = model.space.full_mask & ~ext.mask
    if not missing:
        return Verdict(True, None)
    return Verdict(False, model.space.names(missing)[0])


# -- formula pools ---------------------------------------------------------------


def extension_pool(model: Model, depth: int, max_size: int = 4096) -> list[tuple[int, Formula]]:
    """One witness formula for every extension reachable within ``depth``.

    The pool is built over atoms, ``false``, negation, conjunction and the
    individual belief/knowledge modalities. Order is deterministic; the
    first-found (shallowest) witness is kept.
    """
    full = model.space.full_mask
    pool: dict[int, Formula] = {}

    def add(phi, m):
        if m not in pool and len(pool) < max_size:
            pool[m] = phi

    add(Bottom(), 0)
    for atom in model.atoms:
        add(Atom(atom), model.valuation[atom])
    modal = ([(lambda x, a=a: Belief(a, x), model.belief[a].rows) for a in model.belief]
             + [(lambda x, a=a: Knowledge(a, x), model.knowledge[a].rows) for a in model.knowledge])
    for _ in range(depth):
        current = list(pool.items())
        for m, phi in current:
            add(Not(phi), full & ~m)
            for build, rows in modal:
                add(build(phi), box(rows, m))
        for (m1, p1), (m2, p2) in itertools.combinations(current, 2):
            add(And(p1, p2), m1 & m2)
        if len(pool) >= max_size:
            break
    return list(pool.items())


# -- law reports -----------------------------------------------------------------


@dataclass
class LawReport:
    law: str
    claim: str
    labels: tuple[str, ...]
    status: str
    asserted: bool = True
    side_condition: str | None = None
    side_condition_holds: bool | None = None
    counterexample: dict | None = None
    instances: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == VALID or not self.asserted

    def as_dict(self) -> dict:
        return {
            "law": self.law,
            "claim": self.claim,
            "labels": list(self.labels),
            "status": self.status,
            "asserted": self.asserted,
            "side_condition": self.side_condition,
            "side_condition_holds": self.side_condition_holds,
            "instances": self.instances,
            "counterexample": self.counterexample,
            "detail": self.detail,
        }


def _substitute(phi: Formula, binding: dict[str, Formula]) -> Formula:
    if isinstance(phi, Atom):
        return binding.get(phi.name, phi)
    if isinstance(phi, Bottom):
        return phi
    if isinstance(phi, (And, Or, Implies, Iff)):
        return type(phi)(_substitute(phi.left, binding), _substitute(phi.right, binding))
    if isinstance(phi, Not):
        return Not(_substitute(phi.sub, binding))
    if isinstance(phi, (Belief, Knowledge)):
        return type(phi)(phi.label, _substitute(phi.sub, binding))
    return type(phi)(phi.labels, _substitute(phi.sub, binding))


def _metavars(schema: Formula) -> list[str]:
    from .formulas import subformulas

    names = {p.name for p in subformulas(schema) if isinstance(p, Atom)}
    return [v for v in (PHI, PSI) if v in names]


def check_schema(ev: Evaluator, law: str, template: str, labels: dict[str, str],
                 pool: list[tuple[int, Formula]], **report_kw) -> LawReport:
    """Check a schema (surface syntax with metavariables φ, ψ) over a pool."""
    schema = parse(template.format(**labels))
    mvars = _metavars(schema)
    full = ev.full
    space = ev.model.space
    instances = 0
    for combo in itertools.product(pool, repeat=len(mvars)):
        instances += 1
        env = {v: m for v, (m, _) in zip(mvars, combo)}
        got = ev.mask(schema, env)
        if got != full:
            binding = {v: phi for v, (_, phi) in zip(mvars, combo)}
            state = space.names(full & ~got)[0]
            cex = {
                "state": state,
                "instance": render(_substitute(schema, binding)),
                "bindings": {v: render(p) for v, p in binding.items()},
            }
            return LawReport(law, render(schema), tuple(labels.values()), FALSIFIED,
                             counterexample=cex, instances=instances, **report_kw)
    return LawReport(law, render(schema), tuple(labels.values()), VALID,
                     instances=instances, **report_kw)


def check_necessitation(ev: Evaluator, law: str, modality: str, label: str,
                        pool: list[tuple[int, Formula]]) -> LawReport:
    """If φ is valid in the model then so is the boxed φ."""
    schema = parse(f"{modality}[{label}] {PHI}")
    full = ev.full
    instances = 0
    for m, phi in pool:
        if m != full:
            continue
        instances += 1
        got = ev.mask(schema, {PHI: m})
        if got != full:
            inst = _substitute(schema, {PHI: phi})
            cex = {"state": ev.model.space.names(full & ~got)[0],
                   "instance": render(inst), "bindings": {PHI: render(phi)}}
            return LawReport(law, f"if ⊨ φ then ⊨ {render(schema)}", (label,), FALSIFIED,
                             counterexample=cex, instances=instances)
    return LawReport(law, f"if ⊨ φ then ⊨ {render(schema)}", (label,), VALID,
                     instances=instances)


BELIEF_LAWS = [
    ("belief.K", "B[{a}] (φ -> ψ) -> B[{a}] φ -> B[{a}] ψ"),
    ("belief.D", "~B[{a}] false"),
    ("belief.D-dual", "B[{a}] φ -> ~B[{a}] ~φ"),
    ("belief.4", "B[{a}] φ -> B[{a}] B[{a}] φ"),
    ("belief.5", "~B[{a}] φ -> B[{a}] ~B[{a}] φ"),
]

KNOWLEDGE_LAWS = [
    ("knowledge.K", "K[{a}] (φ -> ψ) -> K[{a}] φ -> K[{a}] ψ"),
    ("knowledge.T", "K[{a}] φ -> φ"),
    ("knowledge.4", "K[{a}] φ -> K[{a}] K[{a}] φ"),
    ("knowledge.5", "~K[{a}] φ -> K[{a}] ~K[{a}] φ"),
]

GROUP_LAWS = {
    "DB": ["K", "D", "4", "5"],
    "CB": ["K", "D", "4", "5"],
    "DK": ["K", "T", "4", "5"],
    "CK": ["K", "T", "4", "5"],
}

_GROUP_SCHEMA = {
    "K": "{m} (φ -> ψ) -> {m} φ -> {m} ψ",
    "D": "~{m} false",
    "T": "{m} φ -> φ",
    "4": "{m} φ -> {m} {m} φ",
    "5": "~{m} φ -> {m} ~{m} φ",
}


def _is_unbiased(pair: FunctionPair) -> bool:
    return all(pair.g(x) == x for x in pair.f.image())


def _visibility_is_identity(pair: FunctionPair) -> bool:
    return pair.f.is_identity() and len(pair.f.domain) == len(pair.space)


def _bias_injective(pair: FunctionPair) -> bool:
    return pair.bias.is_injective()


def paired_labels(model: Model) -> list[tuple[str, str]]:
    """``(belief label, knowledge label)`` pairs built from the same function names."""
    sig = model.signature
    out = []
    for b, names in sig.belief_labels.items():
        for k, knames in sig.knowledge_labels.items():
            if tuple(names) == tuple(knames):
                out.append((b, k))
    return out


def _conditional(ev, law, template, labels, pool, condition_text, holds):
    """Assert a schema when its side condition holds; otherwise only probe it."""
    return check_schema(ev, law, template, labels, pool, asserted=holds,
                        side_condition=condition_text, side_condition_holds=holds)


def law_suite(model: Model, depth: int = 3, groups: bool = True,
              max_pool: int = 4096) -> list[LawReport]:
    pool = extension_pool(model, depth, max_pool)
    ev = Evaluator(model)
    reports: list[LawReport] = []

    for a in model.belief:
        for law, template in BELIEF_LAWS:
            reports.append(check_schema(ev, law, template, {"a": a}, pool))
        reports.append(check_necessitation(ev, "belief.N", "B", a, pool))
    for a in model.knowledge:
        for law, template in KNOWLEDGE_LAWS:
            reports.append(check_schema(ev, law, template, {"a": a}, pool))
        reports.append(check_necessitation(ev, "knowledge.N", "K", a, pool))

    # conditional laws; side conditions are read off the interpreted pairs
    for b, pair in model.belief_pairs.items():
        unbiased = _is_unbiased(pair)
        reports.append(_conditional(
            ev, "unbiased-belief-is-true", "B[{b}] φ -> φ", {"b": b}, pool,
            "g = id on Im(f)", unbiased))
        reports.append(_conditional(
            ev, "negation-complete-belief", "~B[{b}] φ -> B[{b}] ~φ", {"b": b}, pool,
            "f = id_S", _visibility_is_identity(pair)))
    for k, pair in model.knowledge_pairs.items():
        perfect = _visibility_is_identity(pair) and _is_unbiased(pair)
        reports.append(_conditional(
            ev, "perfect-knowledge", "φ -> K[{k}] φ", {"k": k}, pool,
            "f = id_S and g = id_S", perfect))
        if _visibility_is_identity(pair):
            reports.append(_conditional(
                ev, "negation-complete-knowledge", "~K[{k}] φ -> K[{k}] ~φ", {"k": k}, pool,
                "f = id_S and g injective", _bias_injective(pair)))
    for b, k in paired_labels(model):
        pair = model.belief_pairs[b]
        unbiased = _is_unbiased(pair)
        perfect = unbiased and _visibility_is_identity(pair)
        labels = {"b": b, "k": k}
        reports.append(check_schema(ev, "knowledge-implies-belief",
                                    "K[{k}] φ -> B[{b}] φ", labels, pool))
        reports.append(_conditional(
            ev, "knowledge-as-unbiased-belief", "K[{k}] φ <-> B[{b}] φ", labels, pool,
            "g = id on Im(f)", unbiased))
        if perfect:
            reports.append(_conditional(
                ev, "perfect-knowledge-as-precise-belief", "K[{k}] φ <-> B[{b}] φ",
                labels, pool, "f = id_S and g = id_S", True))

    if groups:
        reports.extend(_group_reports(ev, model, pool))
    return reports


def _group_reports(ev, model, pool):
    out = []
    families = {"DB": list(model.belief), "CB": list(model.belief),
                "DK": list(model.knowledge), "CK": list(model.knowledge)}
    for op, labels in families.items():
        if len(labels) < 2:
            continue
        head = f"{op}{{{','.join(labels)}}}"
        for axiom in GROUP_LAWS[op]:
            template = _GROUP_SCHEMA[axiom].replace("{m}", head.replace("{", "{{").replace("}", "}}"))
            out.append(check_schema(ev, f"group.{op}.{axiom}", template, {}, pool,
                                    asserted=False))
    return out


# -- biconditional checks ---------------------------------------------------------


def _frame_instances(model: Model, pool):
    """All subsets of states when small enough, else the formula pool."""
    n = len(model.space)
    if n <= FRAME_LIMIT:
        return [(m, None) for m in range(1 << n)], "all valuations"
    return pool, "formula pool"


def _semantic_side(ev, template, labels, instances):
    schema = parse(template.format(**labels))
    mvars = _metavars(schema)
    for combo in itertools.product(instances, repeat=len(mvars)):
        env = {v: m for v, (m, _) in zip(mvars, combo)}
        got = ev.mask(schema, env)
        if got != ev.full:
            state = ev.model.space.names(ev.full & ~got)[0]
            binding = {}
            for v, (m, phi) in zip(mvars, combo):
                binding[v] = render(phi) if phi is not None else ev.model.space.names(m)
            return False, {"state": state, "bindings": binding}
    return True, None


def iff_condition_checks(model: Model, depth: int = 3) -> list[LawReport]:
    """Biconditionals linking a semantic validity to a property of the bias.

    The semantic side quantifies over every possible extension of φ (every
    valuation) on small spaces, so that it reflects the frame rather than
    the accidents of one valuation.
    """
    ev = Evaluator(model)
    pool = extension_pool(model, depth)
    instances, scope = _frame_instances(model, pool)
    reports = []

    for b, k in paired_labels(model):
        pair = model.belief_pairs[b]
        functional = _is_unbiased(pair)
        semantic, cex = _semantic_side(ev, "K[{k}] φ <-> B[{b}] φ", {"b": b, "k": k}, instances)
        reports.append(LawReport(
            "bias-cancellation",
            f"⊨ K[{k}] φ <-> B[{b}] φ  iff  g = id on Im(f)",
            (b, k), VALID if semantic == functional else FALSIFIED,
            counterexample=None if semantic == functional else cex,
            detail={"semantic": semantic, "functional": functional, "scope": scope,
                    "semantic_counterexample": cex}))

    seen = set()
    for table in (model.belief_pairs, model.knowledge_pairs):
        for label, pair in table.items():
            key = (pair.f, pair.g)
            if key in seen:
                continue
            seen.add(key)
            identity = _is_unbiased(pair)
            injective = _bias_injective(pair)
            reports.append(LawReport(
                "injective-bias-is-identity", "g = id on Im(f)  iff  g injective on Im(f)",
                (label,), VALID if identity == injective else FALSIFIED,
                detail={"identity": identity, "injective": injective}))

    for k, pair in model.knowledge_pairs.items():
        if not _visibility_is_identity(pair):
            continue
        injective = _bias_injective(pair)
        semantic, cex = _semantic_side(ev, "~K[{k}] φ -> K[{k}] ~φ", {"k": k}, instances)
        reports.append(LawReport(
            "negation-complete-knowledge-iff",
            f"⊨ ~K[{k}] φ -> K[{k}] ~φ  iff  g injective",
            (k,), VALID if semantic == injective else FALSIFIED,
            counterexample=None if semantic == injective else cex,
            detail={"semantic": semantic, "functional": injective, "scope": scope,
                    "semantic_counterexample": cex}))
        perfect = model.knowledge[k] == Relation.identity(model.space)
        reports.append(LawReport(
            "negation-complete-is-perfect",
            f"⊨ ~K[{k}] φ -> K[{k}] ~φ  iff  K[{k}] is perfect knowledge",
            (k,), VALID if semantic == perfect else FALSIFIED,
            detail={"negation_complete": semantic, "perfect": perfect, "scope": scope}))
    return reports


def all_hold(reports: Iterable[LawReport]) -> bool:
    return all(r.ok for r in reports)


def first_failure(reports: Iterable[LawReport]) -> LawReport | None:
    return next((r for r in reports if not r.ok), None)

