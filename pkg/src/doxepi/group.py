"""Distributed and common belief/knowledge relations for a community of agents."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Iterable, Mapping

from .funcpair import FunctionPair, doxastic, epistemic
from .relalg import REFLEXIVE_TRANSITIVE, TRANSITIVE, Relation, SpaceMismatch, closure


class GroupKind(str, Enum):
    DD = "DD"  # distributed belief
    CD = "CD"  # common belief
    DE = "DE"  # distributed knowledge
    CE = "CE"  # common knowledge

    @property
    def epistemic(self) -> bool:
        return self in (GroupKind.DE, GroupKind.CE)

    @property
    def common(self) -> bool:
        return self in (GroupKind.CD, GroupKind.CE)


@dataclass(frozen=True)
class Community:
    members: tuple[tuple[str, FunctionPair], ...]

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("community must have at least one member")
        labels = [label for label, _ in members]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate agent label in community")
        space = members[0][1].space
        for label, pair in members:
            if pair.space != space:
                raise SpaceMismatch(f"agent {label!r} lives on a different state space")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Mapping[str, FunctionPair]) -> "Community":
        return cls(tuple(members.items()))

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.members]


def combine(relations: Iterable[Relation], kind: GroupKind | str) -> Relation:
    """Group relation from already-built individual relations.

    Distributed kinds intersect; common belief takes the transitive closure
    of the union, common knowledge the reflexive-transitive closure.
    """
    kind = GroupKind(kind)
    rels = list(relations)
    if not rels:
        raise ValueError("no relations to combine")
    if kind in (GroupKind.DD, GroupKind.DE):
        return reduce(lambda a, b: a & b, rels)
    union = reduce(lambda a, b: a | b, rels)
    return closure(union, TRANSITIVE if kind == GroupKind.CD else REFLEXIVE_TRANSITIVE)


def group_relation(community: Community, kind: GroupKind | str) -> Relation:
    kind = GroupKind(kind)
    build = epistemic if kind.epistemic else doxastic
    return combine((build(pair) for _, pair in community.members), kind)
