# cli.py
# Command-line entry: law suites, glueing, ends, limits and coarse checks.
# Exit codes: 0 success, 1 validation or usage error, 2 law violation.

from __future__ import annotations
from typing import Optional, Sequence
import argparse, json, logging, os, sys

from services.codec import (
    AdmissibleDoc, DiagramDoc, RelationDoc, SpaceDoc, StructureDoc, dumps, ground_label, limit_to_doc, load,
    sum_to_doc, to_admissible, to_diagram, to_relation, to_space, to_structure,
)
from services.coarse import bounded_classes, controlled, is_bounded, preceq, sim
from services.ends import components_dot, end_approximation, end_count, graph_from_spec
from services.errors import GlueError, PreconditionError
from services.glueing import check_pair, empty_map, glue
from services.harness import run_laws
from services.laws import SUITES
from services.limits import STABILIZATION_WINDOW, sum_limit
from services.spaces import label_text

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for law violations here
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------- commands ----------
def cmd_verify_laws(args: argparse.Namespace) -> int:
    report = run_laws(args.suite, args.trials, args.seed, jobs=args.jobs)
    _emit(report.to_json(), args.out)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_glue(args: argparse.Namespace) -> int:
    X = to_space(load(SpaceDoc, args.left))
    Y = to_space(load(SpaceDoc, args.right))
    f = to_admissible(load(AdmissibleDoc, args.f), X, Y)
    g = to_admissible(load(AdmissibleDoc, args.g), Y, X) if args.g else empty_map(Y, X)
    s = glue(X, Y, check_pair(f, g))
    _emit(dumps(sum_to_doc(s)), args.out)
    return EXIT_OK


def cmd_ends(args: argparse.Namespace) -> int:
    g = graph_from_spec(args.graph)
    result = end_count(g, args.depth, args.horizon)
    sys.stdout.write(result.line() + "\n")
    if args.dot:
        approx = end_approximation(g, range(max(0, args.depth - STABILIZATION_WINDOW), args.depth + 1), args.horizon)
        _emit(components_dot(approx), args.dot)
    return EXIT_OK


def cmd_limits(args: argparse.Namespace) -> int:
    limit = sum_limit(to_diagram(load(DiagramDoc, args.diagram)))
    _emit(dumps(limit_to_doc(limit)), args.out)
    return EXIT_OK


def _subset(cs, text: Optional[str], flag: str) -> int:
    if text is None:
        raise PreconditionError(f"coarse-check needs {flag}")
    labels = [t for t in (s.strip() for s in text.split(",")) if t]
    return cs.mask_of(ground_label(cs, t) for t in labels)


def cmd_coarse_check(args: argparse.Namespace) -> int:
    cs = to_structure(load(StructureDoc, args.structure))
    out = {"op": args.op}
    if args.op == "controlled":
        if not args.relation:
            raise PreconditionError("coarse-check --op controlled needs --relation")
        out["result"] = controlled(cs, to_relation(load(RelationDoc, args.relation), cs))
    elif args.op == "bounded":
        out["result"] = is_bounded(cs, _subset(cs, args.a, "--a"))
    elif args.op in ("preceq", "sim"):
        a, b = _subset(cs, args.a, "--a"), _subset(cs, args.b, "--b")
        out["result"] = preceq(cs, a, b) if args.op == "preceq" else sim(cs, a, b)
    else:
        out["classes"] = [sorted(label_text(cs.ground[i]) for i in range(cs.n) if (c >> i) & 1) for c in bounded_classes(cs)]
    _emit(dumps(out), args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn
    uvicorn.run("glue_server:app", host=args.host, port=args.port)
    return EXIT_OK


# ---------- parser ----------
def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="glue", description="Glueings of finite spaces, ends of graphs and coarse structures.")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("verify-laws", help="Run a law suite and print its report")
    p.add_argument("--suite", required=True, choices=list(SUITES) + ["all"])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(run=cmd_verify_laws)

    p = sub.add_parser("glue", help="Glue two spaces along an admissible pair")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--f", required=True)
    p.add_argument("--g")
    p.add_argument("--out")
    p.set_defaults(run=cmd_glue)

    p = sub.add_parser("ends", help="Count the ends of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--dot")
    p.set_defaults(run=cmd_ends)

    p = sub.add_parser("limits", help="Limit of a diagram of glueings")
    p.add_argument("--diagram", required=True)
    p.add_argument("--out")
    p.set_defaults(run=cmd_limits)

    p = sub.add_parser("coarse-check", help="Query a finitely generated coarse structure")
    p.add_argument("--structure", required=True)
    p.add_argument("--op", required=True, choices=["controlled", "bounded", "preceq", "sim", "classes"])
    p.add_argument("--relation", help="JSON file {\"pairs\": [[x, y], ...]}")
    p.add_argument("--a", help="comma-separated ground points")
    p.add_argument("--b", help="comma-separated ground points")
    p.add_argument("--out")
    p.set_defaults(run=cmd_coarse_check)

    p = sub.add_parser("serve", help="Run the HTTP API")
    p.add_argument("--host", default="0.0.0.0")
    p.add_argument("--port", type=int, default=int(os.getenv("PORT", "10000")))
    p.set_defaults(run=cmd_serve)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        sys.stderr.write(str(e) + "\n")
        return EXIT_INVALID
    try:
        return args.run(args)
    except GlueError as e:
        report = e.report()
        logging.info(json.dumps({"event": "cli.error", "command": args.command, "kind": report.get("kind")}))
        sys.stderr.write(json.dumps(report, sort_keys=True) + "\n")
        return EXIT_INVALID
    except OSError as e:
        sys.stderr.write(json.dumps({"kind": "io", "message": str(e)}) + "\n")
        return EXIT_INVALID


run = main


if __name__ == "__main__":
    logging.basicConfig(stream=sys.stderr, level=os.getenv("LOG_LEVEL", "INFO").upper(), format="%(message)s")
    sys.exit(main())
