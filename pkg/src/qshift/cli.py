"""Command-line interface.

Exit codes: 0 success or accepted, 1 rejected or invalid input, 2 usage error,
3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import __version__
from .calculus import (
    SYSTEMS, check, check_qfs, is_cut_free, skeleton, side_variable_graph, apply_mutation, mutation_sites,
)
from .cd5 import crosscheck_parallel, evaluate, valid_bounded
from .core import ResourceLimitError, Fn, Sequent, substitute_many, free_vars, match_symbols
from .kripke import (
    ModelError, check_incompleteness_witness, classify_frame, forces, frame_properties,
    axiom_valid_on_frame,
)
from .parser import (
    ParseError, dump_model, dump_proof, load, parse_formula, parse_sequent, render, render_term,
)
from .skolem import SkolemError, skolemize, skolemize_sequent
from .transform import (
    TransformError, correct_ljpp, deskolemize_trace, prenexify, sequent_alpha_equal,
)

OK, REJECTED, USAGE, RESOURCE = 0, 1, 2, 3
_SYSTEM_NAMES = {s.lower(): s for s in SYSTEMS}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    json: bool = False
    seed: int = 0
    max_worlds: int = 10
    max_domain: int = 3
    max_depth: int = 4
    lines: list = field(default_factory=list)
    result: object = None


def _system(name: str) -> str:
    try:
        return _SYSTEM_NAMES[name.lower()]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _load(path: str, *exts):
    p = Path(path)
    if exts and p.suffix not in exts:
        raise UsageError(f"{path}: expected a {' or '.join(exts)} file")
    if not p.is_file():
        raise UsageError(f"{path}: no such file")
    try:
        return load(p)
    except (ParseError, ModelError) as e:
        e.args = (f"{p.name}: {e}",)
        raise


# --- subcommands -----------------------------------------------------------


def cmd_parse(a, cfg):
    obj = _load(a.file)
    kind = Path(a.file).suffix
    if kind in (".fml", ".seq"):
        items, _ = obj
        cfg.lines += [render(x) for x in items]
        cfg.result = [render(x) for x in items]
    elif kind == ".prf":
        p, _ = obj
        text = dump_proof(p)
        cfg.lines.append(text.rstrip("\n"))
        cfg.result = text
    elif kind == ".krp":
        m, _ = obj
        text = dump_model(m)
        cfg.lines.append(text.rstrip("\n"))
        cfg.result = text
    else:
        i, _ = obj
        text = i.describe()
        cfg.lines.append(text.rstrip("\n"))
        cfg.result = text
    return OK


def cmd_skolemize(a, cfg):
    items, _ = _load(a.file, ".fml", ".seq")
    out = []
    for x in items:
        if isinstance(x, Sequent):
            res, sig = skolemize_sequent(x, a.mode, a.degree)
        else:
            res, sig = skolemize(x, a.mode, a.degree)
        cfg.lines.append(render(res))
        if a.table:
            for row in sig.table():
                cfg.lines.append("  " + "  ".join(str(c) for c in row))
        out.append({"input": render(x), "output": render(res),
                    "symbols": [dict(zip(("symbol", "arity", "path", "deps", "variant"), r)) for r in sig.table()]})
    cfg.result = out
    return OK


def cmd_check(a, cfg):
    p, doc = _load(a.file, ".prf")
    if a.qfs:
        consts = doc.constants()
        hyps = [parse_formula(h, consts) for h in doc.get("hypotheses")]
        rep = check_qfs(p, hyps)
    else:
        rep = check(p, a.system)
    cfg.lines.append(f"{rep.system}: {rep.verdict}")
    for v in rep.violations:
        where = ".".join(map(str, v.path)) or "root"
        cfg.lines.append(f"  {v.condition} at {where}: {v.message}")
    cfg.result = rep.to_dict()
    return OK if rep.accepted else REJECTED


def cmd_deskolemize(a, cfg):
    p, _ = _load(a.file, ".prf")
    targets, _ = _load(a.target, ".seq")
    tr = deskolemize_trace(p, targets[0], a.variant)
    cfg.lines.append(dump_proof(tr.proof).rstrip("\n"))
    for t, v in tr.variables.items():
        cfg.lines.append(f"# {render_term(t)} -> {v}")
    cfg.result = tr.to_dict()
    return OK


def cmd_correct(a, cfg):
    p, _ = _load(a.file, ".prf")
    res = correct_ljpp(p)
    cfg.lines.append(dump_proof(res.proof).rstrip("\n"))
    for h in res.closed_hypotheses:
        cfg.lines.append(f"# hypothesis {render(h)}")
    cfg.result = res.to_dict()
    return OK


def cmd_prenex(a, cfg):
    items, _ = _load(a.file, ".fml")
    out = []
    for f in items:
        g, shifts = prenexify(f)
        cfg.lines.append(render(g))
        cfg.lines.append("  shifts: " + (", ".join(shifts) or "none"))
        out.append({"input": render(f), "prenex": render(g), "shifts_used": shifts})
    cfg.result = out
    return OK


def cmd_model_check(a, cfg):
    m, _ = _load(a.model, ".krp")
    items, _ = _load(a.formulas, ".fml")
    worlds = [a.world] if a.world else m.frame.worlds
    out, all_forced = [], True
    for f in items:
        for w in worlds:
            v = forces(m, w, f)
            all_forced &= v
            cfg.lines.append(f"{w} {'forces' if v else 'does not force'} {render(f)}")
            out.append({"world": w, "formula": render(f), "forced": v})
    cfg.result = out
    return OK if all_forced else REJECTED


def cmd_frame_classify(a, cfg):
    m, _ = _load(a.model, ".krp")
    fr = m.frame
    if len(fr.worlds) > cfg.max_worlds:
        raise ResourceLimitError(f"{len(fr.worlds)} worlds exceeds --max-worlds {cfg.max_worlds}")
    rep = frame_properties(fr)
    cfg.lines.append(f"classification: {rep.classification}")
    for k in ("constant_domain", "linear", "FDS", "WF", "cWF"):
        wit = rep.witnesses.get(k)
        cfg.lines.append(f"  {k}: {getattr(rep, k)}" + (f"  (witness {', '.join(map(str, wit))})" if wit else ""))
    res = rep.to_dict()
    if a.brute_force:
        res["brute_force"] = {}
        for kind in ("CD", "ED", "SW"):
            ok, _ = axiom_valid_on_frame(fr, kind, cfg.max_worlds, cfg.max_domain)
            res["brute_force"][kind] = ok
            cfg.lines.append(f"  {kind} valid on frame: {ok}")
    cfg.result = res
    return OK


def cmd_witness(a, cfg):
    if a.depth > cfg.max_depth:
        raise ResourceLimitError(f"depth {a.depth} exceeds --max-depth {cfg.max_depth}")
    m = _load(a.model, ".krp")[0] if a.model else None
    rep = check_incompleteness_witness(m, a.depth)
    cfg.lines.append(f"Lin | OEP instance fails at the root: {rep.lin_oep_fails}")
    cfg.lines.append(f"atomic CD/ED/SW instances hold everywhere: {rep.instances_hold}")
    cfg.lines.append(f"claim at depth {rep.depth} ({rep.classes} semantic classes): {rep.claim_holds}")
    cfg.result = rep.to_dict()
    return OK if rep.ok else REJECTED


def cmd_cd5(a, cfg):
    if a.cd5_command == "eval":
        i, _ = _load(a.interpretation, ".cd5")
        items, _ = _load(a.formulas, ".fml")
        out = []
        for f in items:
            v = evaluate(i, _as_constants(f, i.domain))
            cfg.lines.append(f"{v.bits}  {render(f)}")
            out.append({"formula": render(f), "value": v.bits})
        cfg.result = out
        return OK
    items, _ = _load(a.file, ".fml")
    if a.bound > cfg.max_domain:
        raise ResourceLimitError(f"bound {a.bound} exceeds --max-domain {cfg.max_domain}")
    out, status = [], OK
    for f in items:
        if a.cd5_command == "valid":
            ok, cm = valid_bounded(f, a.bound)
            cfg.lines.append(f"{'valid' if ok else 'not valid'} up to domain size {a.bound}: {render(f)}")
            if cm is not None:
                cfg.lines += ["  " + ln for ln in cm.describe().splitlines()]
            out.append({"formula": render(f), "valid": ok, "bound": a.bound,
                        "countermodel": cm.describe() if cm else None})
            status = status if ok else REJECTED
        else:
            rep = crosscheck_parallel(f, a.degree, a.bound)
            cfg.lines.append(f"{'agree' if rep.agree else 'DISAGREE'}: original {rep.original_valid}, "
                             f"degree-{a.degree} Skolem form {rep.skolemized_valid}: {render(f)}")
            out.append(rep.to_dict())
            status = status if rep.agree else REJECTED
    cfg.result = out
    return status


def _as_constants(f, names):
    fv = free_vars(f)
    return substitute_many(f, {v: Fn(v) for v in fv if v in names}) if fv else f


def cmd_corpus(a, cfg):
    if a.corpus_command != "verify":
        raise UsageError("unknown corpus command")
    root = Path(a.dir) if a.dir else Path(str(resources.files("qshift") / "corpus"))
    results = corpus_verify(root, mutations=a.mutations, seed=cfg.seed)
    failed = [r for r in results if not r.ok]
    for r in results:
        cfg.lines.append(f"{'PASS' if r.ok else 'FAIL'} {r.fixture}: {r.expectation}" + ("" if r.ok else f"  ({r.detail})"))
    cfg.lines.append(f"{len(results) - len(failed)}/{len(results)} expectations met")
    cfg.result = [r.to_dict() for r in results]
    return OK if not failed else REJECTED


# --- corpus verification ---------------------------------------------------


@dataclass
class FixtureResult:
    fixture: str
    expectation: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"fixture": self.fixture, "expectation": self.expectation, "ok": self.ok, "detail": self.detail}


FIXTURE_EXTS = (".fml", ".seq", ".prf", ".krp", ".cd5")


def _closed(f):
    """Read free variables of an expected formula as constants."""
    return substitute_many(f, {v: Fn(v) for v in free_vars(f)})


def _matches_skolem(actual, expected, symbols) -> bool:
    if isinstance(actual, Sequent):
        pairs = list(zip(actual.antecedent, expected.antecedent)) + list(zip(actual.succedent, expected.succedent))
        if len(actual.antecedent) != len(expected.antecedent) or len(actual.succedent) != len(expected.succedent):
            return False
        ren: dict | None = {}
        for x, y in pairs:
            ren = match_symbols(x, _closed(y), symbols, ren)
            if ren is None:
                return False
        return True
    return match_symbols(actual, _closed(expected), symbols) is not None


def _expect_one(path: Path, obj, doc, exp: str):
    """Check one expectation; returns (ok, detail)."""
    words = exp.split()
    head, spec = exp, ""
    if "::" in exp:
        head, spec = (s.strip() for s in exp.split("::", 1))
        words = head.split()
    kind = words[0]
    consts = doc.constants()
    ext = path.suffix

    if kind == "check":
        system, verdict = _system(words[1]), words[2]
        rest = words[3:]
        at = None
        if "at" in rest:
            k = rest.index("at")
            at = tuple(int(x) for x in rest[k + 1].split(".")) if rest[k + 1] != "root" else ()
            rest = rest[:k]
        rep = check(obj, system)
        if verdict == "accept":
            return rep.accepted, f"got {rep.verdict} {sorted(rep.kinds())}"
        want = set(rest)
        ok = not rep.accepted and (not want or rep.kinds() == want)
        if at is not None:
            ok = ok and any(v.path == at and (not want or v.condition in want) for v in rep.violations)
        return ok, f"got {rep.verdict} {[(v.condition, '.'.join(map(str, v.path))) for v in rep.violations]}"
    if kind == "cut-free":
        want = words[1] == "true"
        return is_cut_free(obj) == want, f"cut-free is {is_cut_free(obj)}"
    if kind == "qfs":
        hyps = [parse_formula(h, consts) for h in doc.get("hypotheses")]
        rep = check_qfs(obj, hyps)
        kinds = rep.info.get("hypothesis_kinds", [])
        ok = rep.accepted == (words[1] == "accept") and (len(words) < 3 or kinds == words[2].split(","))
        return ok, f"got {rep.verdict} with hypothesis kinds {kinds}"
    if kind == "deskolemize":
        target = _target(path, doc)
        tr = deskolemize_trace(obj, target)
        out = tr.proof
        rep = check(out, "LJpp")
        g = side_variable_graph(out)
        ok = (rep.accepted and is_cut_free(out) and skeleton(out) == skeleton(obj)
              and out.conclusion == target and g.is_acyclic())
        detail = f"verdict {rep.verdict}, skeleton {'same' if skeleton(out) == skeleton(obj) else 'differs'}"
        if len(words) >= 5 and words[1] == "order":
            lo, hi = words[2], words[4]
            ok = ok and (hi, lo) in g.edges
            detail += f", edges {sorted(g.edges)}"
        return ok, detail
    if kind == "correct":
        proof = obj
        if doc.get("target"):
            proof = deskolemize_trace(obj, _target(path, doc)).proof
        res = correct_ljpp(proof)
        want = parse_sequent(spec or exp[len("correct"):].strip(), consts)
        rep = check(res.proof, "LJ")
        ok = rep.accepted and sequent_alpha_equal(res.proof.conclusion, want)
        return ok, f"got {render(res.proof.conclusion)} ({rep.verdict} in LJ)"
    if kind == "skolemize":
        mode = words[1]
        n = int(words[2]) if len(words) > 2 else 1
        if ext == ".seq":
            x = obj[0]
            res, sig = skolemize_sequent(x, mode, n)
            want = parse_sequent(spec, consts)
        else:
            res, sig = skolemize(obj[0], mode, n)
            want = parse_formula(spec, consts)
        return _matches_skolem(res, want, set(sig)), f"got {render(res)}"
    if kind == "prenex":
        shifts = [] if words[1] == "none" else words[1].split(",")
        g, used = prenexify(obj[0])
        ok = used == shifts and (not spec or render(g) == render(parse_formula(spec, consts)))
        return ok, f"got {render(g)} with shifts {used}"
    if kind == "cd5-valid":
        bound, want = int(words[1]), words[2] == "true"
        got = [valid_bounded(f, bound)[0] for f in obj]
        return all(v == want for v in got), f"got {got}"
    if kind == "cd5-crosscheck":
        n, bound = int(words[1]), int(words[2])
        reps = [crosscheck_parallel(f, n, bound) for f in obj]
        bad = [render(r.formula) for r in reps if not r.agree]
        return not bad, f"disagreement on {bad}" if bad else "all agree"
    if kind == "cd5-eval":
        f = _as_constants(parse_formula(spec, consts), obj.domain)
        v = evaluate(obj, f)
        return v.bits == words[1], f"got {v.bits}"
    if kind == "forces":
        w, want = words[1], words[2] == "true"
        f = parse_formula(exp.split(None, 3)[3], consts)
        got = forces(obj, w, f)
        return got == want, f"got {got}"
    if kind == "classify":
        got = classify_frame(obj.frame)
        return got == words[1], f"got {got}"
    if kind == "witness":
        rep = check_incompleteness_witness(obj, int(words[1]))
        return rep.ok, f"lin/oep fails {rep.lin_oep_fails}, instances {rep.instances_hold}, claim {rep.claim_holds}"
    return False, f"unknown expectation {kind!r}"


def _target(path: Path, doc) -> Sequent:
    names = doc.get("target")
    if not names:
        raise UsageError(f"{path.name}: missing @target")
    seqs, _ = load(path.parent / names[0])
    return seqs[0]


def corpus_verify(root: Path, mutations: int = 0, seed: int = 0) -> list:
    """Run every fixture's expectations.  With ``mutations`` > 0, also mutate
    accepted proofs at random and expect every mutant to be rejected."""
    root = Path(root)
    if not root.is_dir():
        raise UsageError(f"{root}: not a directory")
    files = sorted(p for p in root.iterdir() if p.suffix in FIXTURE_EXTS)
    if not files:
        raise UsageError(f"{root}: no fixtures found")
    results = []
    accepted_proofs = []
    for path in files:
        try:
            obj, doc = load(path)
        except (ParseError, ModelError, ValueError) as e:
            results.append(FixtureResult(path.name, "load", False, str(e)))
            continue
        exps = doc.get("expect")
        if not exps:
            results.append(FixtureResult(path.name, "(no @expect header)", False, "every fixture needs an expectation"))
            continue
        for exp in exps:
            try:
                ok, detail = _expect_one(path, obj, doc, exp)
            except (ParseError, SkolemError, TransformError, ModelError, ValueError, KeyError, IndexError,
                    argparse.ArgumentTypeError, UsageError) as e:
                ok, detail = False, f"{type(e).__name__}: {e}"
            results.append(FixtureResult(path.name, exp, ok, detail))
            if ok and path.suffix == ".prf" and exp.startswith("check") and "accept" in exp.split():
                accepted_proofs.append((path.name, obj, _system(exp.split()[1])))
    if mutations and accepted_proofs:
        rng = random.Random(seed)
        for k in range(mutations):
            name, p, system = accepted_proofs[rng.randrange(len(accepted_proofs))]
            sites = mutation_sites(p)
            site = sites[rng.randrange(len(sites))]
            rep = check(apply_mutation(p, site), system)
            where = ".".join(map(str, site[0])) or "root"
            results.append(FixtureResult(name, f"mutant {k}: {site[1]} at {where} rejected by {system}",
                                         not rep.accepted, rep.verdict))
    return results


# --- entry point -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qshift", description="Skolemization and quantifier shifts in intermediate logics.")
    ap.add_argument("--version", action="version", version=f"qshift {__version__}")
    ap.add_argument("--json", action="store_true", help="print a JSON report on stdout")
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized steps")
    ap.add_argument("--max-worlds", type=_positive, default=10)
    ap.add_argument("--max-domain", type=_positive, default=3)
    ap.add_argument("--max-depth", type=_positive, default=4)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a fixture and print it back")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("skolemize", help="Skolemize formulas or sequents")
    p.add_argument("--mode", choices=("structural", "andrews", "parallel"), default="structural")
    p.add_argument("--degree", type=_positive, default=2, help="degree of parallel Skolemization")
    p.add_argument("--table", action="store_true", help="also print the Skolem symbol table")
    p.add_argument("file")
    p.set_defaults(func=cmd_skolemize)

    p = sub.add_parser("check", help="check a proof")
    p.add_argument("--system", type=_system, default="LK")
    p.add_argument("--qfs", action="store_true", help="LJ with declared shift hypotheses (@hypotheses)")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("deskolemize", help="lift a proof of a Skolemized sequent")
    p.add_argument("--target", required=True)
    p.add_argument("--variant", choices=("structural", "andrews"))
    p.add_argument("file")
    p.set_defaults(func=cmd_deskolemize)

    p = sub.add_parser("correct", help="turn an LJ++ proof into an LJ proof from shift hypotheses")
    p.add_argument("file")
    p.set_defaults(func=cmd_correct)

    p = sub.add_parser("prenex", help="prenex normal form with the shifts used")
    p.add_argument("file")
    p.set_defaults(func=cmd_prenex)

    p = sub.add_parser("model-check", help="forcing in a Kripke model")
    p.add_argument("model")
    p.add_argument("formulas")
    p.add_argument("--world")
    p.set_defaults(func=cmd_model_check)

    p = sub.add_parser("frame-classify", help="frame properties and classification")
    p.add_argument("model")
    p.add_argument("--brute-force", action="store_true", help="also decide CD, ED and SW by enumerating valuations")
    p.set_defaults(func=cmd_frame_classify)

    p = sub.add_parser("witness-incompleteness", help="verify the three-world incompleteness model")
    p.add_argument("--depth", type=_positive, default=3)
    p.add_argument("--model")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("cd5", help="the five-valued lattice logic")
    cs = p.add_subparsers(dest="cd5_command", required=True)
    q = cs.add_parser("eval")
    q.add_argument("interpretation")
    q.add_argument("formulas")
    q = cs.add_parser("valid")
    q.add_argument("--bound", type=_positive, default=2)
    q.add_argument("file")
    q = cs.add_parser("crosscheck")
    q.add_argument("--degree", type=_positive, default=2)
    q.add_argument("--bound", type=_positive, default=2)
    q.add_argument("file")
    p.set_defaults(func=cmd_cd5)

    p = sub.add_parser("corpus", help="fixture corpus")
    cs = p.add_subparsers(dest="corpus_command", required=True)
    q = cs.add_parser("verify")
    q.add_argument("dir", nargs="?")
    q.add_argument("--mutations", type=int, default=0, help="also check this many random proof mutants")
    p.set_defaults(func=cmd_corpus)
    return ap


def _status(code: int) -> str:
    return {OK: "ok", REJECTED: "rejected", USAGE: "usage-error", RESOURCE: "resource-limit"}[code]


def main(argv=None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    cfg = RunConfig(a.command, a.json, a.seed, a.max_worlds, a.max_domain, a.max_depth)
    errors = []
    try:
        code = a.func(a, cfg)
    except UsageError as e:
        code, errors = USAGE, [str(e)]
    except ResourceLimitError as e:
        code, errors = RESOURCE, [str(e)]
    except (ParseError, SkolemError, TransformError, ModelError, ValueError) as e:
        code, errors = REJECTED, [str(e)]
    for e in errors:
        print(f"qshift: {e}", file=sys.stderr)
    if cfg.json:
        report = {"command": a.command, "status": _status(code), "exit_code": code, "seed": cfg.seed,
                  "result": cfg.result, "errors": errors}
        print(json.dumps(report, indent=2, sort_keys=True, default=str))
    else:
        for line in cfg.lines:
            print(line)
    return code


__all__ = ["main", "corpus_verify", "build_parser", "FixtureResult", "RunConfig"]

