"""Command-line front end.

Exit codes: 0 success or property holds, 1 property fails, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import core, families, lab, mutants, smooth
from .core import Digraph, Tournament
from .families import BETA_KINDS, FAMILIES, FamilyError, FamilySpec


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _tournament(path: str) -> Tournament:
    return core.from_text(_read(path))


def _digraph(path: str) -> Digraph:
    text = _read(path)
    return core.digraph_from_text(text) if text.lstrip().startswith("dgr") else core.from_text(text)


def _spec(path: str) -> FamilySpec:
    return FamilySpec.from_json(_read(path))


def _emit(args, text: str):
    if not text.endswith("\n"):
        text += "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_ints(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"expected a rational like 1/4, got {text!r}") from None


def _params(text: str | None) -> dict:
    out = {}
    for item in (text or "").split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


# ---------------------------------------------------------------- verbs

def cmd_gen(args) -> int:
    what = args.family
    if what == "asteroid":
        t, _ = families.build_asteroid()
    elif what == "beta":
        if args.kind not in BETA_KINDS:
            raise UsageError(f"--kind must be one of {', '.join(BETA_KINDS)}")
        t, order = families.build_beta_asteroid(args.kind)
        t = t.reorder(order)
    elif what == "transitive":
        t = Tournament.transitive(_require_n(args))
    elif what == "random":
        if args.seed is None:
            raise UsageError("gen random needs an explicit --seed")
        t = core.random_tournament(_require_n(args), args.seed)
    elif what in FAMILIES:
        if not args.spec:
            raise UsageError(f"gen {what} needs --spec")
        spec = _spec(args.spec)
        if spec.family != what:
            raise UsageError(f"spec describes a {spec.family}, not a {what}")
        t, _ = families.build_family(spec)
    else:
        raise UsageError(f"unknown generator {what!r}")
    _emit(args, t.to_text())
    return 0


def _require_n(args) -> int:
    if args.n is None or args.n < 0:
        raise UsageError("this generator needs --n")
    return args.n


def cmd_tr(args) -> int:
    t = _tournament(args.file)
    size, witness = core.tr(t)
    _emit(args, f"{size}\nwitness: {','.join(map(str, witness))}")
    return 0


def cmd_contains(args) -> int:
    t, h = _tournament(args.host), _digraph(args.pattern)
    emb = core.contains(t, h)
    if emb is None:
        _emit(args, "absent")
        return 1
    _emit(args, "found\n" + " ".join(f"{u}->{v}" for u, v in sorted(emb.items())))
    return 0


def cmd_recognize(args) -> int:
    t = _tournament(args.file)
    found = families.recognize(t, args.family)
    if found is None:
        _emit(args, f"not a {args.family}")
        return 1
    order, spec = found
    _emit(args, json.dumps({"ordering": list(order), "spec": json.loads(spec.to_json())}, sort_keys=True))
    return 0


def cmd_mutant(args) -> int:
    if args.kind:
        if args.kind not in BETA_KINDS:
            raise UsageError(f"--kind must be one of {', '.join(BETA_KINDS)}")
        d = mutants.mutant_beta_asteroid(args.kind).digraph
    elif args.spec:
        spec = _spec(args.spec)
        if spec.family == "asterism":
            d = mutants.corresponding_digraph(spec).digraph
        elif spec.family in ("galaxy_with_spiders", "clutter"):
            d, _ = mutants.mutant_clutter(spec)
        else:
            raise UsageError("mutant --spec needs an asterism or a galaxy with spiders")
    else:
        raise UsageError("mutant needs --kind or --spec")
    _emit(args, d.to_text())
    return 0


def cmd_ops(args) -> int:
    ordering = _csv_ints(args.ordering)
    _emit(args, ",".join(map(str, mutants.apply_operation(args.op, ordering))))
    return 0


def _structure(args, host: Tournament) -> smooth.SmoothStructure:
    return smooth.SmoothStructure.from_json(_read(args.structure), host)


def cmd_smooth(args) -> int:
    host = _tournament(args.host)
    if args.action == "verify":
        if not args.structure:
            raise UsageError("smooth verify needs --structure")
        s = _structure(args, host)
        report = smooth.verify_smooth(host, s.sets, s.c, s.lam, s.w, tr_bound=args.tr_bound)
        _emit(args, "smooth" if report.ok else "not smooth\n" + "\n".join(report.violations))
        return 0 if report.ok else 1
    if args.c is None or args.lam is None or args.w is None:
        raise UsageError("smooth search needs --c, --lambda and --w")
    status, found, tried = smooth.search_smooth_structure(
        host, _fraction(args.c), _fraction(args.lam), tuple(_csv_ints(args.w)),
        divisor=args.divisor, budget=args.budget)
    if found is None:
        _emit(args, f"{status} after {tried} candidates")
        return 1
    _emit(args, found.to_json())
    return 0


def cmd_embed(args) -> int:
    d = _digraph(args.pattern)
    host = _tournament(args.host)
    s = _structure(args, host)
    xi = smooth.xi_labels(s)
    result = smooth.find_embedding(d, xi, host, budget=args.budget)
    if result.status != "found":
        label = "proved absent" if result.status == "absent" else "budget exhausted"
        _emit(args, f"{label} after {result.nodes} nodes")
        return 1
    _emit(args, json.dumps({"embedding": [result.embedding[u] for u in range(d.n)],
                            "nodes": result.nodes}, sort_keys=True))
    return 0


def cmd_extract(args) -> int:
    spec = _spec(args.spec)
    host = _tournament(args.host)
    copy = json.loads(_read(args.copy))
    if isinstance(copy, dict):
        copy = copy.get("embedding", copy)
    f = {u: int(v) for u, v in enumerate(copy)}
    if spec.family == "asterism":
        ext = smooth.extract_asterism(mutants.corresponding_digraph(spec), f, host)
        _emit(args, json.dumps({"embedding": [ext.h_embedding[v] for v in range(spec.n)],
                                "theta": list(ext.theta), "cases": ext.cases}, sort_keys=True))
        return 0
    pieces = smooth.extract_spider_or_triangle(spec, f, host)
    _emit(args, json.dumps({"tags": "".join(p.tag for p in pieces),
                            "pieces": [list(p.vertices) for p in pieces]}, sort_keys=True))
    return 0


def cmd_ehc(args) -> int:
    h = _tournament(args.h)
    if args.mode == "sample" and (args.seed is None or not args.samples):
        raise UsageError("sample mode needs --samples and an explicit --seed")
    try:
        report = lab.epsilon_estimate(h, args.n_max, args.mode, args.samples or 0,
                                      args.seed or 0, args.jobs)
    except lab.NoFreeTournament as exc:
        print(f"no H-free tournament: {exc}", file=sys.stderr)
        return 1
    _emit(args, lab.emit_report(report, args.format, timing=args.timing))
    return 0


def cmd_sweep(args) -> int:
    if args.target == "all-betas":
        targets = list(BETA_KINDS)
    elif args.target == "all-spiders":
        targets = lab.small_spiders(3)
    else:
        targets = [args.target]
    tried = failed = 0
    lines = []
    for target in targets:
        try:
            report = lab.soundness_sweep(target)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        tried += report.tried
        failed += len(report.failures)
        if len(targets) > 1:
            lines.append(f"{report.target}: {report.summary()}")
        for k, why in report.failures:
            lines.append(f"completion {k}: {why}")
    lines.append(f"{tried - failed}/{tried} pass")
    _emit(args, "\n".join(lines))
    return 1 if failed else 0


def cmd_critical(args) -> int:
    found = lab.criticality_scan(_fraction(args.eps), args.n_max)
    _emit(args, "\n".join(f"trn {n} {bits}" for n, bits in found) if found else "none")
    return 0


def cmd_lemma(args) -> int:
    p = _params(args.params)
    seed = int(p.get("seed", 0))
    if args.id == "h":
        k = int(p.get("k", 3))
        mode = p.get("mode", "exhaustive")
        report = core.verify_lemma_h(k, mode, int(p.get("samples", 0)), seed, args.jobs)
        ok = report.passed
        line = f"lemma h k={k} n={report.n} {mode}: {report.checked} checked, " \
               f"{len(report.counterexamples)} counterexamples"
    else:
        fuzz = lab.fuzz_lemma_b if args.id == "b" else lab.fuzz_lemma_g
        report = fuzz(int(p.get("instances", 1000)), seed, int(p.get("max_n", 30)))
        ok = report.passed
        line = f"lemma {args.id}: {report.instances} instances, {len(report.violations)} violations"
    _emit(args, line + ("\npass" if ok else "\nfail"))
    return 0 if ok else 1


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ehc-lab", description="Tournament combinatorics toolkit.")
    parser.add_argument("--jobs", type=int, default=None,
                        help="worker processes (default: EHC_LAB_JOBS or 1); output does not depend on it")
    sub = parser.add_subparsers(dest="verb", metavar="VERB")
    sub.required = True

    def verb(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("-o", "--out", help="write the result here instead of stdout")
        return p

    p = verb("gen", cmd_gen, "build a tournament: asteroid, beta, transitive, random or a family from --spec")
    p.add_argument("family", help=f"asteroid | beta | transitive | random | {' | '.join(FAMILIES)}")
    p.add_argument("--spec", help="family spec JSON")
    p.add_argument("--kind", help="beta-asteroid kind")
    p.add_argument("--n", type=int)
    p.add_argument("--seed", type=int)

    p = verb("tr", cmd_tr, "size of the largest transitive subtournament, with a witness")
    p.add_argument("file")

    p = verb("contains", cmd_contains, "induced copy of a pattern (exit 1 when absent)")
    p.add_argument("host")
    p.add_argument("pattern")

    p = verb("recognize", cmd_recognize, "find an ordering exhibiting a family (n <= 9)")
    p.add_argument("file")
    p.add_argument("--family", required=True, choices=FAMILIES)

    p = verb("mutant", cmd_mutant, "mutant beta-asteroid, corresponding digraph or mutant clutter as DGR")
    p.add_argument("--spec")
    p.add_argument("--kind")

    p = verb("ops", cmd_ops, "apply a reordering operation")
    p.add_argument("action", choices=["apply"])
    p.add_argument("--op", required=True, choices=sorted(mutants.OPERATIONS))
    p.add_argument("--ordering", required=True, help="comma-separated labels")

    p = verb("smooth", cmd_smooth, "verify or search a smooth structure")
    p.add_argument("action", choices=["verify", "search"])
    p.add_argument("--host", required=True)
    p.add_argument("--structure", help="structure JSON (verify)")
    p.add_argument("--tr-bound", type=int, help="upper bound to use in place of tr(host)")
    p.add_argument("--c")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--w", help="comma-separated 0/1 flags")
    p.add_argument("--divisor", type=int, help="set sizes must be multiples of this")
    p.add_argument("--budget", type=int, default=2_000_000)

    p = verb("embed", cmd_embed, "well-contained copy of a digraph in a smooth structure")
    p.add_argument("pattern")
    p.add_argument("--structure", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--budget", type=int, default=1_000_000)

    p = verb("extract", cmd_extract, "extract H (asterism) or spiders/triangles from a mutant copy")
    p.add_argument("--spec", required=True)
    p.add_argument("--host", required=True)
    p.add_argument("--copy", required=True, help="JSON list: image of each mutant vertex")

    p = verb("ehc", cmd_ehc, "minimum tr over H-free tournaments and the epsilon estimate")
    p.add_argument("action", choices=["scan"])
    p.add_argument("--h", required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--mode", choices=["exhaustive", "sample"], default="exhaustive")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--timing", action="store_true", help="include runtime in the JSON report")

    p = verb("sweep", cmd_sweep, "extract from every completion of a mutant")
    p.add_argument("--target", required=True,
                   help=f"{' | '.join(BETA_KINDS)} | all-betas | all-spiders | spider:middle:M:R | "
                        f"spider:left|right:LEGS:X1")

    p = verb("critical", cmd_critical, "every epsilon-critical tournament up to n-max")
    p.add_argument("--eps", required=True)
    p.add_argument("--n-max", type=int, required=True)

    p = verb("lemma", cmd_lemma, "check a lemma: h exhaustively or by sampling, b and g by fuzzing")
    p.add_argument("action", choices=["check"])
    p.add_argument("--id", required=True, choices=["h", "b", "g"])
    p.add_argument("--params", help="key=value list, e.g. k=4,mode=sample,samples=1000,seed=1")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except (UsageError, FamilyError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"ehc-lab {args.verb}: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())
