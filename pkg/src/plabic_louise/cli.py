"""Command-line front end.

Exit codes: 0 success, 1 verification failed, 2 invalid input,
3 search or enumeration limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import affine_perm as ap
from . import explorer
from . import louise
from . import plabic as pl
from . import quiver as qv

SCHEMA = "v1"
EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class InvalidInput(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj: dict) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, sort_keys=True, indent=2)


def _permutation(args) -> ap.BoundedAffinePermutation:
    if (args.window is None) == (args.top_cell is None):
        raise InvalidInput("give exactly one of --window and --top-cell")
    if args.window is not None:
        return ap.parse_window(args.window)
    parts = args.top_cell.split(",")
    try:
        k, n = (int(p) for p in parts)
    except ValueError:
        raise InvalidInput(f"--top-cell expects K,N, got {args.top_cell!r}") from None
    if not (n >= 1 and 0 <= k <= n):
        raise InvalidInput(f"--top-cell needs 0 <= K <= N and N >= 1, got {k},{n}")
    return ap.top_cell(k, n)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidInput(f"{path} does not hold a JSON object")
    return data


def _load_quiver(path: str) -> qv.IceQuiver:
    data = _load_json(path)
    if "quiver" in data and "vertices" not in data:
        data = data["quiver"]
    try:
        return qv.IceQuiver.from_json(data)
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed quiver JSON: {exc}") from exc


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("limits must be positive")
    return v


# -- subcommands ------------------------------------------------------------------


def cmd_diagram(args) -> int:
    w = _permutation(args)
    G = pl.construct_diagram(w)
    target = G.face_ids()
    labels = G.face_labels(args.labels)
    names = [pl.format_label(s) for s in labels]
    Q = G.to_ice_quiver()
    if args.labels == "source":
        Q = Q.relabel(dict(zip(target, names)))
    if args.format == "dot":
        _emit(Q.to_dot(), args.out)
        return EXIT_OK
    faces = [
        {"id": names[f.index], "boundary": f.boundary, "label": sorted(labels[f.index])}
        for f in G.faces
    ]
    faces.sort(key=lambda d: (d["boundary"] is False, d["label"]))
    _emit(_dump({
        "permutation": w.to_json(),
        "labels": args.labels,
        "faces": faces,
        "plabic": G.to_json(),
        "quiver": Q.to_json(),
    }), args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    w = _permutation(args)
    cert = louise.certify(w)
    _emit(_dump(cert.to_json()), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    data = _load_json(args.file)
    data = {k: v for k, v in data.items() if k != "schema"}
    verdict = louise.verify(data)
    if verdict:
        _emit(_dump({"ok": True, "nodes": verdict.nodes_checked}), args.out)
        return EXIT_OK
    print(verdict.message(), file=sys.stderr)
    _emit(_dump({"ok": False, "path": verdict.path, "predicate": verdict.predicate,
                 "detail": verdict.detail}), args.out)
    return EXIT_VERIFY


def cmd_banff(args) -> int:
    Q = _load_quiver(args.file)
    stats = louise.SearchStats()
    cert = louise.banff_search(Q, depth=args.depth, class_limit=args.class_limit, stats=stats)
    if args.format == "dot":
        _emit(Q.mutable_part().to_dot(), args.out)
        return EXIT_OK
    _emit(_dump({
        "certificate": cert.to_json() if cert is not None else None,
        "class_size": stats.class_size,
        "result": "NONE" if cert is None else "FOUND",
    }), args.out)
    return EXIT_OK


def cmd_explore(args) -> int:
    Q = _load_quiver(args.file)
    result = explorer.enumerate_seeds(Q, limit=args.seed_limit)
    _emit(_dump(result.to_json()), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    k, n = args.k, args.n
    if not (n >= 1 and 0 <= k <= n):
        raise InvalidInput(f"need 0 <= k <= n and n >= 1, got {k},{n}")
    total = passed = max_depth = 0
    failures = []
    for w in ap.enumerate_perms(k, n):
        total += 1
        cert = louise.certify(w)
        verdict = louise.verify(cert)
        max_depth = max(max_depth, cert.depth())
        if verdict:
            passed += 1
        else:
            failures.append({"window": list(w.window), "reason": verdict.message()})
    _emit(_dump({
        "k": k, "n": n, "total": total, "passed": passed,
        "failed": total - passed, "max_depth": max_depth, "failures": failures,
    }), args.out)
    return EXIT_OK if not failures else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="plabic-louise",
        description="Postnikov diagrams, ice quivers and Louise certificates.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def perm_opts(sp):
        sp.add_argument("--window", help="comma-separated window, e.g. 4,6,5,7,8,9")
        sp.add_argument("--top-cell", metavar="K,N", help="use the top cell x -> x+K on N points")

    def out_opt(sp):
        sp.add_argument("--out", metavar="FILE", help="write output to FILE instead of stdout")

    sp = sub.add_parser("diagram", help="build a diagram and its ice quiver")
    perm_opts(sp)
    sp.add_argument("--labels", choices=["target", "source"], default="target",
                    help="face label convention (default: target)")
    sp.add_argument("--format", choices=["json", "dot"], default="json",
                    help="json: diagram, labels and quiver; dot: the quiver only")
    out_opt(sp)
    sp.set_defaults(func=cmd_diagram)

    sp = sub.add_parser("certify", help="emit a Louise certificate for a permutation")
    perm_opts(sp)
    out_opt(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify", help="check a certificate file (exit 1 on failure)")
    sp.add_argument("file")
    out_opt(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("banff", help="search a quiver's mutation class for a Louise witness")
    sp.add_argument("file", help="quiver JSON")
    sp.add_argument("--depth", type=_positive, default=8, help="maximum mutation depth (default 8)")
    sp.add_argument("--class-limit", type=_positive, default=2000,
                    help="maximum quivers explored per mutation class (default 2000)")
    sp.add_argument("--format", choices=["json", "dot"], default="json")
    out_opt(sp)
    sp.set_defaults(func=cmd_banff)

    sp = sub.add_parser("explore", help="count cluster variables and seeds of a quiver")
    sp.add_argument("file", help="quiver JSON")
    sp.add_argument("--seed-limit", type=_positive, default=1000,
                    help="give up after this many seeds (default 1000)")
    out_opt(sp)
    sp.set_defaults(func=cmd_explore)

    sp = sub.add_parser("sweep", help="certify and verify every permutation of type (K,N)")
    sp.add_argument("k", type=int)
    sp.add_argument("n", type=int)
    out_opt(sp)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except louise.LimitExceeded as exc:
        print(f"LimitExceeded: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (InvalidInput, ap.AffinePermError, qv.QuiverError, pl.PlabicError,
            louise.MalformedCertificate) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
