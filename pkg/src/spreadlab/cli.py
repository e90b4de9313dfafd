"""spreadctl: build, check and export finite-geometry objects from the shell.

Exit codes: 0 on PASS (or a successful build), 1 on FAIL, 2 on usage errors
and malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .closure import PointSet, classify_closed, closure_generate, line_spectrum
from .config import CapExceeded, get_cap
from .galois import prime_power, tower_for
from .intersect import extension_trace, min_subgeometry_index, spread_intersection
from .moore import SCHEMA_VERSION, Spread, moore_space
from .projspace import subspace_from_json
from .report import FAIL, PASS, SKIPPED, VerificationReport, write_json_atomic
from .segre import build_generalized_segre, build_segre
from .singer import PseudoArc, build_singer_spread, canonical_pseudo_arc, is_pseudo_arc
from .suites import SUITES, default_suites, estimated_size, run_suite

DEFAULT_SWEEP = [[3, 2, 2], [2, 2, 4, 2], [3, 2, 4, 2], [2, 3, 2]]

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    """Malformed input; the message says where."""


def load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(data, key, path, where=""):
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"{path}: missing key {where + key!r}")
    return data[key]


def emit(data, out: str | None) -> None:
    if out:
        write_json_atomic(out, data)
    else:
        json.dump(data, sys.stdout, indent=1, sort_keys=True)
        sys.stdout.write("\n")


def emit_report(rep: VerificationReport, out: str | None) -> int:
    emit(rep.to_json(), out)
    print(f"{rep.suite}: {rep.status}", file=sys.stderr)
    return EXIT_FAIL if rep.status == FAIL else EXIT_OK


def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"{value} must be a positive integer")
    return n


def _params(p, r=False):
    p.add_argument("--q", type=_positive, required=True)
    p.add_argument("--k", type=_positive, required=True)
    p.add_argument("--h", type=_positive, required=True)
    if r:
        p.add_argument("--r", type=_positive, default=None)


# --- subcommands -------------------------------------------------------------


def cmd_field(args) -> int:
    if args.q is None and args.p is None:
        raise InputError("field info needs --q or --p [--e]")
    if args.p is not None and prime_power(args.p) != (args.p, 1):
        raise InputError(f"--p {args.p} is not a prime")
    q = args.p ** args.e if args.p is not None else args.q
    if args.q is not None and args.q != q:
        raise InputError(f"--q {args.q} disagrees with --p {args.p} --e {args.e}")
    T = tower_for(q, args.h)
    data = {"schema_version": SCHEMA_VERSION, "type": "tower", **T.descriptor(),
            "q": T.q, "base": T.base.name, "top": T.top.name, "primitive": T.top.primitive}
    if args.element is not None:
        if not 0 <= args.element < T.top.order:
            raise InputError(f"element {args.element} is outside {T.top.name}")
        x = args.element
        data["element"] = T.element(x).to_json() | {
            "min_subfield_degree": T.min_subfield_degree(x),
            "order": T.top.order_of(x) if x else None,
        }
    emit(data, args.out)
    return EXIT_OK


def cmd_spread(args) -> int:
    if args.action == "check":
        data = load_json(args.input)
        try:
            S = Spread.from_json(data)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.input}: not a spread ({exc})") from None
        rep = VerificationReport("spread-partition", {"q": S.q, "k": S.k, "h": S.h})
        part = S.partition_report()
        rep.check("partition", part["ok"], part)
        return emit_report(rep.finish(), args.out)
    for name in ("q", "k", "h"):
        if getattr(args, name) is None:
            raise InputError(f"spread build needs --{name}")
    q, k, h = args.q, args.k, args.h
    if args.model == "moore":
        S = moore_space(q, k, h).build_spread()
    elif args.model == "singer":
        S = build_singer_spread(q, k, h)
    else:
        if not args.director_file:
            raise InputError("--model director needs --director-file")
        data = load_json(args.director_file)
        model = moore_space(q, k, h)
        try:
            Theta = subspace_from_json(model.top, data.get("director", data))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{args.director_file}: not a subspace ({exc})") from None
        S = model.spread_from_director(Theta)
    emit(S.to_json(), args.out)
    return EXIT_OK


def cmd_segre(args) -> int:
    if args.r is None:
        S = build_segre(args.q, args.k, args.h)
    else:
        S = build_generalized_segre(args.q, args.k, args.h, args.r)
    emit(S.to_json(), args.out)
    return EXIT_OK


def _load_points(path) -> PointSet:
    data = load_json(path)
    amb = _field(data, "ambient", path)
    for key in ("k", "q", "h"):
        _field(amb, key, path, "ambient.")
    pts = _field(data, "points", path)
    for i, P in enumerate(pts):
        if not isinstance(P, list) or not all(isinstance(x, int) for x in P):
            raise InputError(f"{path}: points[{i}] is not a list of integers")
    try:
        return PointSet.from_json(data)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_closure(args) -> int:
    S = _load_points(args.input)
    if args.action == "generate":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            G = closure_generate(S)
        emit(G.to_json(), args.out)
        return EXIT_OK
    if S.q == 2:
        raise InputError("classification of closed sets needs q > 2")
    c = classify_closed(S)
    data = {"schema_version": SCHEMA_VERSION, "type": "classification", **c.to_json()}
    if c.closed and c.r:
        data["line_spectrum"] = {str(a): b for a, b in sorted(line_spectrum(S).items())}
    emit(data, args.out)
    return EXIT_OK if c.closed and c.r else EXIT_FAIL


def _arc_from_json(data, path) -> PseudoArc:
    q, k, h = (int(_field(data, key, path)) for key in ("q", "k", "h"))
    F = tower_for(q, 1).base
    try:
        elems = [subspace_from_json(F, e) for e in _field(data, "elements", path)]
        return PseudoArc(q, k, h, elems)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def cmd_arc(args) -> int:
    if args.action == "canonical":
        A = canonical_pseudo_arc(args.q, args.k, args.h)
        emit({"schema_version": SCHEMA_VERSION, "type": "pseudo-arc", "q": A.q, "k": A.k, "h": A.h,
              "elements": [E.to_json() for E in A.elements]}, args.out)
        return EXIT_OK
    data = load_json(args.input)
    arcs = data.get("arcs", [data]) if isinstance(data, dict) else data
    rep = VerificationReport("pseudo-arc", {"input": args.input, "count": len(arcs)})
    for i, item in enumerate(arcs):
        A = _arc_from_json(item, f"{args.input}[{i}]")
        ok, bad = is_pseudo_arc(A.elements, A.k)
        rep.check(f"arc_{i}", ok, {"offending": bad, "size": len(A)})
    return emit_report(rep.finish(), args.out)


def _parse_vector(text: str):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a comma-separated list of integers") from None


def cmd_intersect(args) -> int:
    if args.action == "spreads":
        A = Spread.from_json(load_json(args.a))
        B = Spread.from_json(load_json(args.b))
        common = spread_intersection(A, B)
        emit({"schema_version": SCHEMA_VERSION, "type": "intersection", "q": A.q, "k": A.k, "h": A.h,
              "size": len(common), "elements": [E.to_json() for E in common]}, args.out)
        return EXIT_OK
    model = moore_space(args.q, args.k, args.h)
    v = args.v
    if len(v) != args.k or any(not 0 <= x < model.top.order for x in v) or not any(v):
        raise InputError(f"--v must be a nonzero vector of {args.k} elements of {model.top.name}")
    tr = extension_trace(model, v)
    emit({"schema_version": SCHEMA_VERSION, "type": "extension-trace",
          "index": min_subgeometry_index(model, v), **tr.to_json()}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = run_suite(args.suite, args.q, args.k, args.h, args.r, trials=args.trials, seed=args.seed)
    return emit_report(rep, args.out)


def _run_entry(entry):
    params, suite, trials, seed = entry
    q, k, h = params[:3]
    r = params[3] if len(params) > 3 else None
    return run_suite(suite, q, k, h, r, trials=trials, seed=seed).to_json()


def _parse_sweep_config(data, path):
    if not isinstance(data, dict):
        raise InputError(f"{path}: top level must be an object")
    tuples = data.get("tuples", [])
    if not isinstance(tuples, list):
        raise InputError(f"{path}: 'tuples' must be a list")
    for i, t in enumerate(tuples):
        if not (isinstance(t, list) and len(t) in (3, 4) and all(isinstance(x, int) and x > 0 for x in t)):
            raise InputError(f"{path}: tuples[{i}] must be [q, k, h] or [q, k, h, r] of positive integers")
    suites = data.get("suites", "auto")
    if suites != "auto":
        if not isinstance(suites, list) or any(s not in SUITES for s in suites):
            raise InputError(f"{path}: 'suites' must be \"auto\" or a list drawn from {sorted(SUITES)}")
    return tuples, suites, int(data.get("trials", 0)), int(data.get("seed", 0))


def cmd_sweep(args) -> int:
    if args.config:
        tuples, suites, trials, seed = _parse_sweep_config(load_json(args.config), args.config)
    else:
        tuples, suites, trials, seed = DEFAULT_SWEEP, "auto", 0, 0
    out = Path(args.out_dir)
    jobs, entries = [], []
    for t in tuples:
        names = default_suites(t) if suites == "auto" else suites
        for name in names:
            tag = "-".join(map(str, t))
            fname = f"{name}_{tag}.json"
            entry = {"tuple": t, "suite": name, "report": fname}
            if estimated_size(*t[:3]) > get_cap():
                entry["status"] = SKIPPED
                entry["reason"] = f"q^(kh) = {estimated_size(*t[:3])} exceeds cap {get_cap()}"
                rep = VerificationReport(name, {"q": t[0], "k": t[1], "h": t[2], "r": t[3] if len(t) > 3 else None})
                rep.skip("enumeration_cap", entry["reason"])
                write_json_atomic(out / fname, rep.finish().to_json())
            else:
                jobs.append((len(entries), (t, name, trials, seed)))
            entries.append(entry)
    if jobs:
        if args.workers > 1:
            with ProcessPoolExecutor(max_workers=args.workers) as pool:
                results = list(pool.map(_run_entry, [j for _, j in jobs]))
        else:
            results = [_run_entry(j) for _, j in jobs]
        for (i, _), res in zip(jobs, results):
            entries[i]["status"] = res["status"]
            write_json_atomic(out / entries[i]["report"], res)
    matrix = {}
    for e in entries:
        matrix.setdefault(",".join(map(str, e["tuple"])), {})[e["suite"]] = e["status"]
    index = {"schema_version": SCHEMA_VERSION, "type": "sweep-index", "entries": entries, "matrix": matrix,
             "status": FAIL if any(e["status"] == FAIL for e in entries) else PASS}
    write_json_atomic(out / "index.json", index)
    for e in entries:
        print(f"{e['suite']:<22} {','.join(map(str, e['tuple'])):<10} {e['status']}", file=sys.stderr)
    return EXIT_FAIL if index["status"] == FAIL else EXIT_OK


def cmd_export(args) -> int:
    q, k, h = args.q, args.k, args.h
    if args.kind == "tower":
        T = tower_for(q, h)
        data = {"schema_version": SCHEMA_VERSION, "type": "tower", **T.descriptor()}
    elif args.kind == "spread":
        data = moore_space(q, k, h).build_spread().to_json()
    elif args.kind == "singer-spread":
        data = build_singer_spread(q, k, h).to_json()
    elif args.kind == "segre":
        data = build_segre(q, k, h).to_json()
    elif args.kind == "generalized-segre":
        if args.r is None:
            raise InputError("export generalized-segre needs --r")
        data = build_generalized_segre(q, k, h, args.r).to_json()
    else:
        A = canonical_pseudo_arc(q, k, h)
        data = {"schema_version": SCHEMA_VERSION, "type": "pseudo-arc", "q": q, "k": k, "h": h,
                "elements": [E.to_json() for E in A.elements]}
    emit(data, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spreadctl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spreadctl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="describe GF(q) < GF(q^h)")
    p.add_argument("action", nargs="?", choices=["info"], default="info")
    p.add_argument("--q", type=_positive)
    p.add_argument("--p", type=_positive)
    p.add_argument("--e", type=_positive, default=1)
    p.add_argument("--h", type=_positive, default=1)
    p.add_argument("--element", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("spread", help="build or check a spread")
    p.add_argument("action", choices=["build", "check"])
    p.add_argument("--q", type=_positive)
    p.add_argument("--k", type=_positive)
    p.add_argument("--h", type=_positive)
    p.add_argument("--model", choices=["moore", "director", "singer"], default="moore")
    p.add_argument("--director-file")
    p.add_argument("--input")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spread)

    p = sub.add_parser("segre", help="build a (generalized) Segre variety")
    p.add_argument("action", choices=["build"])
    _params(p, r=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_segre)

    p = sub.add_parser("closure", help="closure generation and classification of point sets")
    p.add_argument("action", choices=["generate", "classify"])
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_closure)

    p = sub.add_parser("arc", help="pseudo-arcs")
    p.add_argument("action", choices=["check", "canonical"])
    p.add_argument("--input")
    p.add_argument("--q", type=_positive)
    p.add_argument("--k", type=_positive)
    p.add_argument("--h", type=_positive)
    p.add_argument("--out")
    p.set_defaults(func=cmd_arc)

    p = sub.add_parser("intersect", help="intersect two spreads or trace a spread element")
    p.add_argument("action", choices=["spreads", "trace"])
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--q", type=_positive)
    p.add_argument("--k", type=_positive)
    p.add_argument("--h", type=_positive)
    p.add_argument("--v", type=_parse_vector)
    p.add_argument("--out")
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=sorted(SUITES), required=True)
    _params(p, r=True)
    p.add_argument("--trials", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="run suites over many parameter tuples")
    p.add_argument("--config")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--workers", type=_positive, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="write a deterministic JSON artifact")
    p.add_argument("kind", choices=["tower", "spread", "singer-spread", "segre", "generalized-segre",
                                     "pseudo-arc"])
    _params(p, r=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)
    return parser


_REQUIRED = {
    ("arc", "check"): ["input"],
    ("arc", "canonical"): ["q", "k", "h"],
    ("spread", "check"): ["input"],
    ("intersect", "spreads"): ["a", "b"],
    ("intersect", "trace"): ["q", "k", "h", "v"],
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    missing = [name for name in _REQUIRED.get((args.command, getattr(args, "action", None)), [])
               if getattr(args, name, None) is None]
    if missing:
        parser.print_usage(sys.stderr)
        print(f"spreadctl: error: {args.command} {args.action} needs --{', --'.join(missing)}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except InputError as exc:
        print(f"spreadctl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"spreadctl: error: {exc} (raise SPREADLAB_CAP to allow it)", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"spreadctl: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
