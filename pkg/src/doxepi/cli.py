"""Command-line driver.

Exit codes: 0 success, 1 semantic failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path

from . import checker
from .formulas import ParseError, parse, read_formulas, render
from .relalg import Relation, StateSpace, classify
from .signature import LabelError, ModelError, dump_model, override_relation, random_document
from .signature import load_model, read_model
from .synthesis import roundtrip_check
from .traces import (
    TraceSpace,
    action_bias_diagnostics,
    constructed_projection,
    verify_indist_correspondence,
    verify_pdl_correspondence,
)

OK, FAILED, INPUT_ERROR = 0, 1, 2


class InputError(Exception):
    pass


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2, ensure_ascii=False) + "\n")


def _load_model(path):
    try:
        return read_model(path)
    except ModelError as exc:
        raise InputError(f"{path}: {exc}") from None


def read_relation(path, space: StateSpace | None = None) -> Relation:
    """Relation file: ``{"states": [...], "pairs": [[s, t], ...]}``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        states = doc["states"] if space is None else doc.get("states", list(space.states))
        rel_space = StateSpace(tuple(states))
        if space is not None and rel_space != space:
            raise InputError(f"{path}: states differ from the model's")
        return Relation.from_pairs(rel_space, [tuple(p) for p in doc["pairs"]])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


# -- check ---------------------------------------------------------------------


def cmd_check(args) -> int:
    model = _load_model(args.model)
    formulas = []
    try:
        for text in args.formula or []:
            formulas.append(parse(text))
        if args.formulas:
            formulas.extend(phi for _, phi in read_formulas(args.formulas))
    except ParseError as exc:
        raise InputError(f"parse error: {exc}") from None
    except OSError as exc:
        raise InputError(str(exc)) from None
    if not formulas:
        raise InputError("no formulas given (use -f or --formulas)")

    ev = checker.Evaluator(model)
    rows = []
    passed = True
    for phi in formulas:
        try:
            ext = checker.extension(model, phi, ev)
        except LabelError as exc:
            raise InputError(f"{render(phi)}: {exc.args[0]}") from None
        verdict = checker.valid_in_model(model, phi, ev)
        satisfiable = ext.mask != 0
        good = satisfiable if args.satisfiable else verdict.valid
        passed &= good
        rows.append({
            "formula": render(phi),
            "extension": ext.states,
            "valid": verdict.valid,
            "satisfiable": satisfiable,
            "counterexample": verdict.counterexample,
        })
    if args.format == "json":
        _emit(rows)
    else:
        for row in rows:
            tag = "VALID" if row["valid"] else ("SAT" if row["satisfiable"] else "UNSAT")
            line = f"{tag:9} {row['formula']}  extension={{{', '.join(row['extension'])}}}"
            if row["counterexample"] is not None:
                line += f"  counterexample={row['counterexample']}"
            print(line)
    return OK if passed else FAILED


# -- laws ----------------------------------------------------------------------


def _apply_overrides(model, specs):
    for spec in specs or []:
        try:
            kind, label, path = spec.split(":", 2)
        except ValueError:
            raise InputError(f"--override-relation expects KIND:LABEL:FILE, got {spec!r}") from None
        rel = read_relation(path, model.space)
        try:
            model = override_relation(model, kind, label, rel)
        except (ValueError, LabelError) as exc:
            raise InputError(str(exc)) from None
    return model


def _model_reports(model, args):
    reports = checker.law_suite(model, depth=args.depth, groups=not args.no_groups)
    reports += checker.iff_condition_checks(model, depth=args.depth)
    return reports


def cmd_laws(args) -> int:
    runs = []
    if args.random:
        rng = random.Random(args.seed)
        for k in range(args.random):
            doc = random_document(rng, rng.randint(2, args.states), rng.randint(1, args.atoms),
                                  rng.randint(1, args.labels))
            runs.append((k, load_model(doc)))
    else:
        if not args.model:
            raise InputError("laws needs -m MODEL or --random N")
        runs.append((None, _apply_overrides(_load_model(args.model), args.override_relation)))

    records = []
    first_bad = None
    all_reports = []
    for index, model in runs:
        reports = _model_reports(model, args)
        all_reports.extend(reports)
        for r in reports:
            rec = r.as_dict()
            if index is not None:
                rec = {"model": index, **rec}
            records.append(rec)
            if first_bad is None and not r.ok:
                first_bad = rec

    if args.format == "json":
        _emit(records)
    else:
        for rec in records:
            where = f"[model {rec['model']}] " if "model" in rec else ""
            mark = "ok " if rec["status"] == checker.VALID else ("FAIL" if rec["asserted"] else "info")
            print(f"{mark:4} {where}{rec['law']:38} {rec['claim']}")
        n_asserted = sum(1 for r in records if r["asserted"])
        print(f"{len(records)} reports, {n_asserted} asserted")
    if args.figures:
        from . import plotting
        plotting.law_summary(all_reports, Path(args.figures) / "laws.png")
        for index, model in runs[:1]:
            plotting.model_figures(model, args.figures)
    if first_bad is not None:
        cex = first_bad["counterexample"]
        print(f"law {first_bad['law']} falsified: {first_bad['claim']}", file=sys.stderr)
        if cex:
            print(f"  counterexample: {json.dumps(cex, ensure_ascii=False)}", file=sys.stderr)
        return FAILED
    return OK


# -- synthesize ----------------------------------------------------------------


def _fragment(pair, prefix: str) -> dict:
    names = pair.space.states
    image = sorted(pair.f.image())
    tname = f"Im_{prefix}"
    return {
        "types": {tname: [names[i] for i in image]},
        "functions": {
            f"{prefix}_f": {"domain": "S", "codomain": tname, "map": pair.f.named()},
            f"{prefix}_g": {"domain": tname, "codomain": tname,
                            "map": pair.g.restrict(image).named()},
        },
        "label": [f"{prefix}_f", f"{prefix}_g"],
    }


def cmd_synthesize(args) -> int:
    rel = read_relation(args.relation)
    report = roundtrip_check(rel)
    out = {"relation": rel.named_pairs(), "properties": classify(rel).as_dict()}
    if report.kd45_pair is not None:
        out["kd45"] = {**_fragment(report.kd45_pair, "dox"),
                       "roundtrip": "PASS" if report.kd45_ok else "FAIL"}
    if report.equivalence_pair is not None:
        out["equivalence"] = {**_fragment(report.equivalence_pair, "epi"),
                              "roundtrip": "PASS" if report.equivalence_ok else "FAIL"}
    out["messages"] = report.messages
    out["diffs"] = {k: {"missing": v[0], "extra": v[1]} for k, v in report.diffs.items()}
    out["verdict"] = "PASS" if report.passed else "FAIL"
    if args.format == "json":
        _emit(out)
    else:
        for key in ("kd45", "equivalence"):
            if key in out:
                fns = out[key]["functions"]
                print(f"{key}: roundtrip {out[key]['roundtrip']}")
                for name, fn in fns.items():
                    print(f"  {name}: {fn['map']}")
        for msg in report.messages:
            print(msg)
        print(f"verdict: {out['verdict']}")
    if args.figures:
        from . import plotting
        panels = [("input", rel)]
        if report.kd45_pair is not None:
            from .funcpair import doxastic
            panels.append(("belief of synthesized pair", doxastic(report.kd45_pair)))
        plotting.relation_panels(panels, Path(args.figures) / "synthesis.png")
    return OK if report.passed else FAILED


# -- traces --------------------------------------------------------------------


def cmd_traces(args) -> int:
    agents = [a.strip() for a in args.agents.split(",") if a.strip()]
    try:
        ts = TraceSpace(tuple(agents), args.depth)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    checks = ["indist", "pdl"] if args.verify == "all" else [args.verify]
    records = []
    ok = True
    for agent in ts.agents:
        if "indist" in checks:
            rep = verify_indist_correspondence(ts, agent)
            records.append({"check": "indist", **rep.as_dict()})
            ok &= rep.holds
        if "pdl" in checks:
            rep = verify_pdl_correspondence(ts, agent)
            diags = action_bias_diagnostics(ts, agent)
            _, reproduced = constructed_projection(ts, agent)
            rec = {"check": "pdl", **rep.as_dict(),
                   "action_bias_rejected": bool(diags),
                   "rejections": [d.constraint for d in diags],
                   "constructed_projection_reproduces": reproduced}
            records.append(rec)
            ok &= rep.holds and bool(diags) and reproduced
            if args.figures:
                from . import plotting
                plotting.relation_panels(
                    [("id ∪ E", rep.lhs), ("(α ∪ α⁻¹)*", rep.rhs)],
                    Path(args.figures) / f"pdl_{agent}.png")
    if args.format == "json":
        _emit({"agents": list(ts.agents), "depth": ts.depth, "states": len(ts),
               "results": records})
    else:
        print(f"{len(ts)} traces, agents {', '.join(ts.agents)}, depth {ts.depth}")
        for rec in records:
            print(f"{rec['check']:7} agent {rec['agent']}: {'holds' if rec['holds'] else 'FAILS'}")
    return OK if ok else FAILED


# -- validate ------------------------------------------------------------------


def cmd_validate(args) -> int:
    model = _load_model(args.model)
    rows = []
    ok = True
    for kind, table, need in (("belief", model.belief, "kd45"),
                              ("knowledge", model.knowledge, "equivalence")):
        for label, rel in table.items():
            props = classify(rel)
            good = getattr(props, need)
            ok &= good
            rows.append({"kind": kind, "label": label, "pairs": len(rel),
                         "frame": need, "holds": good, **props.as_dict()})
    if args.format == "json":
        _emit({"model": dump_model(model), "relations": rows})
    else:
        print(f"{len(model.space)} states, atoms {', '.join(model.atoms)}")
        for row in rows:
            print(f"{row['kind']:9} {row['label']}: {row['frame']} "
                  f"{'ok' if row['holds'] else 'FAILS'} ({row['pairs']} pairs)")
    if args.figures:
        from . import plotting
        plotting.model_figures(model, args.figures)
    return OK if ok else FAILED


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="doxepi", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, figures=True):
        sp.add_argument("--format", choices=["text", "json"], default="text")
        if figures:
            sp.add_argument("--figures", metavar="DIR", help="also write PNG figures into DIR")

    c = sub.add_parser("check", help="evaluate formulas in a model")
    c.add_argument("-m", "--model", required=True)
    c.add_argument("-f", "--formula", action="append", help="inline formula (repeatable)")
    c.add_argument("--formulas", metavar="FILE", help="file with one formula per line")
    c.add_argument("--satisfiable", action="store_true",
                   help="succeed when each formula holds somewhere, not everywhere")
    common(c, figures=False)
    c.set_defaults(func=cmd_check)

    la = sub.add_parser("laws", help="run the modal law suites")
    la.add_argument("-m", "--model")
    la.add_argument("--depth", type=int, default=3)
    la.add_argument("--random", type=int, metavar="N", help="check N random models instead")
    la.add_argument("--seed", type=int, default=0)
    la.add_argument("--states", type=int, default=5, help="max states for --random")
    la.add_argument("--atoms", type=int, default=3, help="max atoms for --random")
    la.add_argument("--labels", type=int, default=2, help="max labels for --random")
    la.add_argument("--override-relation", action="append", metavar="KIND:LABEL:FILE",
                    help="replace a belief/knowledge relation (fault injection)")
    la.add_argument("--no-groups", action="store_true", help="skip group-modality reports")
    common(la)
    la.set_defaults(func=cmd_laws)

    sy = sub.add_parser("synthesize", help="build a function pair from a relation")
    sy.add_argument("-r", "--relation", required=True)
    common(sy)
    sy.set_defaults(func=cmd_synthesize)

    tr = sub.add_parser("traces", help="verify the trace-space correspondences")
    tr.add_argument("--agents", required=True, help="comma-separated agent labels")
    tr.add_argument("--depth", type=int, required=True)
    tr.add_argument("--verify", choices=["indist", "pdl", "all"], default="all")
    common(tr)
    tr.set_defaults(func=cmd_traces)

    va = sub.add_parser("validate", help="load and lint a model")
    va.add_argument("-m", "--model", required=True)
    common(va)
    va.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
