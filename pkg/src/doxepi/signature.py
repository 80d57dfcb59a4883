"""Similarity types, instantiation structures and models.

A model document is JSON::

    {
      "states": ["s0", "s1"],
      "types": {"T1": ["s0"]},                      # "S" is implicit (all states)
      "functions": {
        "f1": {"domain": "S", "codomain": "T1", "map": {"s0": "s0", "s1": "s0"}},
        "g1.f1": {"compose": ["g1", "f1"]}          # right-to-left
      },
      "belief_labels": {"a": ["f1", "id_T1"]},
      "knowledge_labels": {"a": ["f1", "id_T1"]},
      "valuation": {"P": ["s1"]}
    }

Identity names ``id_<T>`` exist for every type and need not be declared.
Function names that are used as the bias of a label, or whose source type is
not ``S``, are bias names and must interpret to idempotent functions.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

from .funcpair import FunctionPair, InvalidPair, StateFunction, doxastic, epistemic, validate_pair
from .relalg import Relation, StateSpace

BASE_TYPE = "S"
ID_PREFIX = "id_"


class ModelError(ValueError):
    """A model document violates a structural or semantic requirement."""

    def __init__(self, clause: str, message: str, witness=None):
        self.clause = clause
        self.witness = witness
        super().__init__(f"{clause}: {message}")


@dataclass(frozen=True)
class FunctionDecl:
    name: str
    domain: str
    codomain: str
    # right-to-left component names for composites, None for primitive maps
    compose: tuple[str, ...] | None = None

    @property
    def composite(self) -> bool:
        return self.compose is not None


@dataclass(frozen=True)
class SimilarityType:
    atoms: tuple[str, ...]
    types: tuple[str, ...]
    functions: dict[str, FunctionDecl]
    gnames: frozenset[str]
    fnames: frozenset[str]
    belief_labels: dict[str, tuple[str, str]]
    knowledge_labels: dict[str, tuple[str, str]]

    def decl(self, name: str) -> FunctionDecl:
        return self.functions[name]


@dataclass(frozen=True)
class Instantiation:
    space: StateSpace
    type_interp: dict[str, frozenset[int]]
    fun_interp: dict[str, StateFunction]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class Model:
    signature: SimilarityType
    instantiation: Instantiation
    valuation: dict[str, int]  # atom -> state bitmask
    belief_pairs: dict[str, FunctionPair]
    knowledge_pairs: dict[str, FunctionPair]
    belief: dict[str, Relation]
    knowledge: dict[str, Relation]
    overrides: frozenset = frozenset()

    @property
    def space(self) -> StateSpace:
        return self.instantiation.space

    @property
    def atoms(self) -> tuple[str, ...]:
        return self.signature.atoms

    def belief_relation(self, label: str) -> Relation:
        try:
            return self.belief[label]
        except KeyError:
            raise LabelError(f"no belief label {label!r}") from None

    def knowledge_relation(self, label: str) -> Relation:
        try:
            return self.knowledge[label]
        except KeyError:
            raise LabelError(f"no knowledge label {label!r}") from None


class LabelError(KeyError):
    pass


# -- interpretation -------------------------------------------------------------


def _id_type(name: str) -> str | None:
    return name[len(ID_PREFIX):] if name.startswith(ID_PREFIX) else None


def interpret(name: str, inst: Instantiation) -> StateFunction:
    """Resolve a function name; dotted names compose right-to-left."""
    hit = inst._cache.get(name)
    if hit is not None:
        return hit
    if name in inst.fun_interp:
        fn = inst.fun_interp[name]
    elif "." in name:
        parts = name.split(".")
        fn = interpret(parts[-1], inst)
        for part in reversed(parts[:-1]):
            try:
                fn = fn.then(interpret(part, inst))
            except ValueError as exc:
                raise ModelError("type mismatch", f"in {name!r}: {exc}") from None
    else:
        t = _id_type(name)
        if t is None or t not in inst.type_interp:
            raise ModelError("unknown name", f"function {name!r} is not declared")
        fn = StateFunction.identity(inst.space, sorted(inst.type_interp[t]))
    inst._cache[name] = fn
    return fn


# -- loading ---------------------------------------------------------------------


def _state_list(space: StateSpace, states, where: str) -> frozenset[int]:
    if not isinstance(states, list):
        raise ModelError("malformed", f"{where} must be a list of states")
    out = set()
    for s in states:
        if s not in space:
            raise ModelError("unknown state", f"{where} mentions unknown state {s!r}", s)
        out.add(space.position(s))
    return frozenset(out)


def _idempotency_witness(fn: StateFunction) -> int | None:
    for s, v in sorted(fn.items()):
        w = fn.get(v)
        if w is None or w != v:
            return s
    return None


class _Loader:
    def __init__(self, doc: Mapping[str, Any]):
        self.doc = doc
        if not isinstance(doc, Mapping):
            raise ModelError("malformed", "model document must be a JSON object")
        unknown = set(doc) - {"states", "types", "functions", "belief_labels",
                              "knowledge_labels", "valuation"}
        if unknown:
            raise ModelError("malformed", f"unknown top-level keys {sorted(unknown)}")

    def load(self) -> Model:
        self._space()
        self._types()
        self._declarations()
        self._interpret_all()
        labels = self._labels()
        valuation = self._valuation()
        return self._assemble(labels, valuation)

    def _space(self):
        states = self.doc.get("states")
        if not isinstance(states, list) or not all(isinstance(s, str) for s in states):
            raise ModelError("malformed", "'states' must be a list of strings")
        try:
            self.space = StateSpace(tuple(states))
        except ValueError as exc:
            raise ModelError("malformed", str(exc)) from None

    def _types(self):
        raw = self.doc.get("types", {})
        if not isinstance(raw, Mapping):
            raise ModelError("malformed", "'types' must be an object")
        full = frozenset(range(len(self.space)))
        types = {BASE_TYPE: full}
        for name, states in raw.items():
            subset = _state_list(self.space, states, f"type {name!r}")
            if name == BASE_TYPE and subset != full:
                raise ModelError("type mismatch", "type 'S' must denote every state")
            types[name] = subset
        self.types = types

    def _declarations(self):
        raw = self.doc.get("functions", {})
        if not isinstance(raw, Mapping):
            raise ModelError("malformed", "'functions' must be an object")
        self.raw_maps: dict[str, Mapping] = {}
        decls: dict[str, FunctionDecl] = {}
        for t in self.types:
            decls[ID_PREFIX + t] = FunctionDecl(ID_PREFIX + t, t, t)
        pending = {}
        for name, spec in raw.items():
            if not isinstance(spec, Mapping):
                raise ModelError("malformed", f"function {name!r} must be an object")
            if "compose" in spec or ("." in name and "map" not in spec):
                parts = spec.get("compose", name.split("."))
                if not isinstance(parts, list) or len(parts) < 2:
                    raise ModelError("malformed", f"composite {name!r} needs two or more names")
                pending[name] = tuple(parts)
                continue
            if "map" not in spec:
                raise ModelError("malformed", f"function {name!r} lacks 'map' or 'compose'")
            dom, cod = spec.get("domain"), spec.get("codomain")
            for t in (dom, cod):
                if t not in self.types:
                    raise ModelError("unknown name", f"function {name!r} uses unknown type {t!r}")
            t = _id_type(name)
            if t is not None and t in self.types and (dom != t or cod != t):
                raise ModelError("identity override",
                                 f"{name!r} must be typed {t} -> {t}")
            decls[name] = FunctionDecl(name, dom, cod)
            self.raw_maps[name] = spec["map"]
        for name, parts in pending.items():
            decls[name] = self._composite_decl(name, parts, decls, pending, ())
        self.decls = decls

    def _composite_decl(self, name, parts, decls, pending, trail):
        if name in trail:
            raise ModelError("malformed", f"cyclic composite {' -> '.join(trail + (name,))}")
        types = []
        for part in parts:
            if part in decls:
                d = decls[part]
            elif part in pending:
                d = self._composite_decl(part, pending[part], decls, pending, trail + (name,))
                decls[part] = d
            else:
                raise ModelError("unknown name", f"composite {name!r} uses undeclared {part!r}")
            types.append((d.domain, d.codomain))
        # parts apply right-to-left: the codomain of each must be the domain of the next one left
        for (dom_left, _), (_, cod_right), left, right in zip(types, types[1:], parts, parts[1:]):
            if cod_right != dom_left:
                raise ModelError(
                    "type mismatch",
                    f"in {name!r}: {right!r} lands in {cod_right} but {left!r} expects {dom_left}")
        return FunctionDecl(name, types[-1][0], types[0][1], tuple(parts))

    def _interpret_all(self):
        space = self.space
        funs: dict[str, StateFunction] = {}
        for t, subset in self.types.items():
            funs[ID_PREFIX + t] = StateFunction.identity(space, sorted(subset))
        for name, mapping in self.raw_maps.items():
            decl = self.decls[name]
            if not isinstance(mapping, Mapping):
                raise ModelError("malformed", f"map of {name!r} must be an object")
            dom, cod = self.types[decl.domain], self.types[decl.codomain]
            for s, v in mapping.items():
                for x in (s, v):
                    if x not in space:
                        raise ModelError("unknown state", f"{name!r} mentions {x!r}", x)
            keys = {space.position(s) for s in mapping}
            if keys != dom:
                missing = sorted(dom - keys)
                if missing:
                    w = space.states[missing[0]]
                    raise ModelError("type mismatch", f"{name!r} undefined at {w}", w)
                w = space.states[min(keys - dom)]
                raise ModelError("type mismatch", f"{name!r} defined outside {decl.domain} at {w}", w)
            fn = StateFunction(space, mapping)
            bad = sorted(fn.image() - cod)
            if bad:
                w = space.states[bad[0]]
                raise ModelError("type mismatch",
                                 f"{name!r} hits {w}, outside codomain {decl.codomain}", w)
            if _id_type(name) in self.types and not fn.is_identity():
                w = next(space.states[s] for s, v in sorted(fn.items()) if s != v)
                raise ModelError("identity override", f"{name!r} is not the identity at {w}", w)
            funs[name] = fn
        self.inst = Instantiation(space, dict(self.types), funs)

        def resolve(name):
            if name not in funs:
                parts = self.decls[name].compose
                fn = resolve(parts[-1])
                for part in reversed(parts[:-1]):
                    fn = fn.then(resolve(part))
                funs[name] = fn
            return funs[name]

        for name, decl in self.decls.items():
            if decl.composite:
                resolve(name)

    def _labels(self):
        out = {}
        used_as_g = set()
        for key in ("belief_labels", "knowledge_labels"):
            raw = self.doc.get(key, {})
            if not isinstance(raw, Mapping):
                raise ModelError("malformed", f"'{key}' must be an object")
            labels = {}
            for agent, names in raw.items():
                if not (isinstance(names, list) and len(names) == 2):
                    raise ModelError("malformed", f"{key}[{agent!r}] must be [fname, gname]")
                fname, gname = names
                fdecl, gdecl = self._lookup(fname), self._lookup(gname)
                if fdecl.domain != BASE_TYPE:
                    raise ModelError("type mismatch",
                                     f"label {agent!r}: {fname!r} must have source S")
                if gdecl.domain != fdecl.codomain:
                    raise ModelError(
                        "type mismatch",
                        f"label {agent!r}: {gname!r} expects {gdecl.domain}, "
                        f"{fname!r} lands in {fdecl.codomain}")
                labels[agent] = (fname, gname)
                used_as_g.add(gname)
            out[key] = labels
        self.used_as_g = used_as_g
        return out

    def _lookup(self, name) -> FunctionDecl:
        if not isinstance(name, str):
            raise ModelError("malformed", f"function name expected, got {name!r}")
        if name in self.decls:
            return self.decls[name]
        if "." in name:
            decl = self._composite_decl(name, tuple(name.split(".")), self.decls, {}, ())
            self.decls[name] = decl
            self.inst.fun_interp[name] = interpret(name, self.inst)
            return decl
        raise ModelError("unknown name", f"function {name!r} is not declared")

    def _valuation(self):
        raw = self.doc.get("valuation")
        if not isinstance(raw, Mapping) or not raw:
            raise ModelError("malformed", "'valuation' must name at least one atom")
        return {atom: self.space.mask(_state_list(self.space, states, f"valuation of {atom!r}"))
                for atom, states in raw.items()}

    def _assemble(self, labels, valuation) -> Model:
        decls = self.decls
        gnames = {n for n, d in decls.items()
                  if (d.domain != BASE_TYPE and not d.composite) or _id_type(n) in self.types}
        gnames |= self.used_as_g
        fnames = {n for n, d in decls.items() if d.domain == BASE_TYPE}
        for name in sorted(gnames):
            fn = self.inst.fun_interp[name]
            w = _idempotency_witness(fn)
            if w is not None:
                ws = self.space.states[w]
                raise ModelError("non-idempotent bias",
                                 f"{name!r} is not idempotent at {ws}", ws)

        sig = SimilarityType(
            atoms=tuple(valuation),
            types=tuple(self.types),
            functions=dict(decls),
            gnames=frozenset(gnames),
            fnames=frozenset(fnames),
            belief_labels=labels["belief_labels"],
            knowledge_labels=labels["knowledge_labels"],
        )
        pairs = {}
        for key, table in labels.items():
            pairs[key] = {}
            for agent, (fname, gname) in table.items():
                f, g = self.inst.fun_interp[fname], self.inst.fun_interp[gname]
                try:
                    pairs[key][agent] = validate_pair(f, g)
                except InvalidPair as exc:
                    w = self.space.states[exc.witness[0]] if exc.witness else None
                    raise ModelError("invalid label pair", f"label {agent!r}: {exc}", w) from None
        belief = {a: doxastic(p) for a, p in pairs["belief_labels"].items()}
        knowledge = {a: epistemic(p) for a, p in pairs["knowledge_labels"].items()}
        return Model(sig, self.inst, valuation, pairs["belief_labels"],
                     pairs["knowledge_labels"], belief, knowledge)


def load_model(doc: Mapping[str, Any]) -> Model:
    return _Loader(doc).load()


def read_model(path) -> Model:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ModelError("unreadable", str(exc)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError("malformed", f"invalid JSON: {exc}") from None
    return load_model(doc)


def dump_model(model: Model) -> dict:
    """Serialize a model back into the document format."""
    space = model.space
    sig = model.signature
    inst = model.instantiation
    names = space.states
    types = {t: [names[i] for i in sorted(inst.type_interp[t])]
             for t in sig.types if t != BASE_TYPE}
    functions = {}
    for name, decl in sig.functions.items():
        if _id_type(name) in inst.type_interp and not decl.composite:
            continue
        if decl.composite:
            functions[name] = {"compose": list(decl.compose)}
        else:
            functions[name] = {"domain": decl.domain, "codomain": decl.codomain,
                               "map": inst.fun_interp[name].named()}
    return {
        "states": list(names),
        "types": types,
        "functions": functions,
        "belief_labels": {a: list(p) for a, p in sig.belief_labels.items()},
        "knowledge_labels": {a: list(p) for a, p in sig.knowledge_labels.items()},
        "valuation": {atom: space.names(mask) for atom, mask in model.valuation.items()},
    }


def override_relation(model: Model, kind: str, label: str, relation: Relation) -> Model:
    """Replace one accessibility relation, bypassing the pair construction.

    Only useful for fault injection: the result is generally not a model of
    any pair, and the law suite is expected to notice.
    """
    if relation.space != model.space:
        raise ValueError("override relation lives on a different state space")
    if kind == "belief":
        if label not in model.belief:
            raise LabelError(f"no belief label {label!r}")
        return replace(model, belief={**model.belief, label: relation},
                       overrides=model.overrides | {(kind, label)})
    if kind == "knowledge":
        if label not in model.knowledge:
            raise LabelError(f"no knowledge label {label!r}")
        return replace(model, knowledge={**model.knowledge, label: relation},
                       overrides=model.overrides | {(kind, label)})
    raise ValueError(f"kind must be 'belief' or 'knowledge', not {kind!r}")


def random_document(rng: random.Random, n_states: int, n_atoms: int, n_labels: int,
                    identity_bias: float = 0.25, identity_view: float = 0.2) -> dict:
    """A random, always-loadable model document.

    Every label is registered for both belief and knowledge. Visibility is
    occasionally ``id_S`` and bias occasionally the identity so that the
    conditional laws have models to bite on.
    """
    from .funcpair import random_idempotent

    states = [f"s{i}" for i in range(n_states)]
    types: dict[str, list[str]] = {}
    functions: dict[str, dict] = {}
    labels: dict[str, list[str]] = {}
    for k in range(n_labels):
        agent = "abcdefgh"[k]
        if rng.random() < identity_view:
            fname, image, tname = "id_S", list(range(n_states)), "S"
        else:
            values = [rng.randrange(n_states) for _ in range(n_states)]
            image = sorted(set(values))
            tname, fname = f"V{agent}", f"f{agent}"
            types[tname] = [states[i] for i in image]
            functions[fname] = {"domain": "S", "codomain": tname,
                                "map": {states[i]: states[v] for i, v in enumerate(values)}}
        if rng.random() < identity_bias:
            gname = f"id_{tname}"
        else:
            gm = random_idempotent(image, rng)
            gname = f"g{agent}"
            functions[gname] = {"domain": tname, "codomain": tname,
                                "map": {states[x]: states[y] for x, y in sorted(gm.items())}}
            functions[f"{gname}.{fname}"] = {"compose": [gname, fname]}
        labels[agent] = [fname, gname]
    valuation = {}
    for k in range(n_atoms):
        valuation["PQR"[k] if k < 3 else f"P{k}"] = [s for s in states if rng.random() < 0.5]
    return {
        "states": states,
        "types": types,
        "functions": functions,
        "belief_labels": dict(labels),
        "knowledge_labels": dict(labels),
        "valuation": valuation,
    }


def random_model(rng: random.Random, n_states: int, n_atoms: int, n_labels: int, **kw) -> Model:
    return load_model(random_document(rng, n_states, n_atoms, n_labels, **kw))
