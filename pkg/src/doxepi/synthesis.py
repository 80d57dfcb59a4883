"""Recover a visibility/bias pair from a given accessibility relation.

``from_kd45`` inverts the belief construction for any serial, transitive,
Euclidean relation; ``from_equivalence`` inverts the knowledge construction
for any equivalence relation. Representatives are always the least-index
member of their class, so outputs are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .funcpair import (
    FunctionPair,
    StateFunction,
    doxastic,
    epistemic,
    validate_pair,
)
from .relalg import (
    Relation,
    bits,
    classify,
    describe_failure,
    image_mask,
)


class SynthesisError(ValueError):
    """The input relation does not meet the constructor's frame conditions."""

    def __init__(self, condition: str, witness: tuple, message: str):
        self.condition = condition
        self.witness = witness
        super().__init__(message)


@dataclass(frozen=True)
class CanonicalChoice:
    # class (as a bitmask) -> chosen member
    representative: dict
    strategy: str = "min-index"

    def of(self, cls_mask: int) -> int:
        return self.representative[cls_mask]


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _require(r: Relation, props: tuple[str, ...]):
    if not r:
        raise SynthesisError("non-empty", (), "relation is empty")
    report = classify(r)
    for prop in props:
        if not getattr(report, prop):
            w = report.witnesses[prop]
            raise SynthesisError(prop, w, describe_failure(r.space, prop, w))
    return report


def image_equivalence(r: Relation) -> Relation:
    """``{(s, s') in r | s in Im(r)}``: an equivalence on ``Im(r)`` when ``r`` is KD45."""
    im = image_mask(r)
    return Relation(r.space, tuple(row if im >> i & 1 else 0 for i, row in enumerate(r.rows)))


def kd45_choice(r: Relation) -> CanonicalChoice:
    equiv = image_equivalence(r)
    reps = {}
    for s in bits(image_mask(r)):
        cls_mask = equiv.rows[s]
        reps.setdefault(cls_mask, _lowest(cls_mask))
    return CanonicalChoice(reps)


def from_kd45(r: Relation) -> FunctionPair:
    _require(r, ("serial", "transitive", "euclidean"))
    space = r.space
    im = image_mask(r)
    equiv = image_equivalence(r)

    sub = classify(equiv.restrict(bits(im)))
    # on Im(r) the restricted relation must be reflexive there, transitive, Euclidean
    assert all(equiv.rows[s] >> s & 1 for s in bits(im)), "≡ not reflexive on Im(R)"
    assert sub.transitive and sub.euclidean, "≡ not transitive/Euclidean on Im(R)"

    choice = kd45_choice(r)

    def rep(s: int) -> int:
        return choice.of(equiv.rows[s])

    f_map = {}
    for s in range(len(space)):
        f_map[s] = rep(s) if im >> s & 1 else s
    f = StateFunction(space, f_map)

    g_map = {}
    for x in sorted(f.image()):
        if im >> x & 1:
            g_map[x] = x
            continue
        succ = r.rows[x]
        reps = {rep(t) for t in bits(succ)}
        # every successor of x lies in one ≡-class, so the choice is immaterial
        assert len(reps) == 1, f"g ill-defined at {space.states[x]}"
        g_map[x] = rep(_lowest(succ))
    g = StateFunction(space, g_map)
    return validate_pair(f, g)


def partition_choice(e: Relation) -> CanonicalChoice:
    reps = {}
    for row in e.rows:
        reps.setdefault(row, _lowest(row))
    return CanonicalChoice(reps)


def from_equivalence(e: Relation) -> FunctionPair:
    _require(e, ("reflexive", "symmetric", "transitive"))
    choice = partition_choice(e)
    pi = StateFunction(e.space, {s: choice.of(row) for s, row in enumerate(e.rows)})
    return validate_pair(pi, StateFunction.identity(e.space, pi.image()))


@dataclass
class RoundtripReport:
    relation: Relation
    kd45: bool = False
    equivalence: bool = False
    kd45_ok: bool | None = None
    equivalence_ok: bool | None = None
    kd45_pair: FunctionPair | None = None
    equivalence_pair: FunctionPair | None = None
    messages: list[str] = field(default_factory=list)
    # branch -> (missing pairs, extra pairs), named
    diffs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        branches = [ok for ok in (self.kd45_ok, self.equivalence_ok) if ok is not None]
        return bool(branches) and all(branches)


def _diff(expected: Relation, got: Relation):
    return (expected - got).named_pairs(), (got - expected).named_pairs()


def roundtrip_check(r: Relation) -> RoundtripReport:
    report = RoundtripReport(r)
    try:
        pair = from_kd45(r)
    except SynthesisError as exc:
        report.messages.append(f"not KD45: {exc}")
    else:
        report.kd45 = True
        report.kd45_pair = pair
        d = doxastic(pair)
        report.kd45_ok = d == r
        if not report.kd45_ok:
            report.diffs["kd45"] = _diff(r, d)
            report.messages.append("KD45 round trip FAILED")
    try:
        pair = from_equivalence(r)
    except SynthesisError as exc:
        report.messages.append(f"not an equivalence: {exc}")
    else:
        report.equivalence = True
        report.equivalence_pair = pair
        e = epistemic(pair)
        report.equivalence_ok = e == r
        if not report.equivalence_ok:
            report.diffs["equivalence"] = _diff(r, e)
            report.messages.append("equivalence round trip FAILED")
    return report
