"""Command-line interface.

Exit codes: 0 analysis ran, 1 usage error, 2 input error, 3 state space
exceeded. Verdicts live in the report, never in the exit code.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__
from .dot import export_dot
from .generator import GenConfig, GenerationFailed, generate
from .home_cluster import CleanFailed, UnsafeInitialMarking, cleaned_short_circuit, find_home_clusters
from .lucency import check_lucency, find_conflict_pairs, transparency
from .net import Cluster, InvalidNet, Marking, NotInNet, PetriNet, PetriNetError, classify_structure
from .netfile import load_net, serialize_net
from .semantics import DEFAULT_CAP, StateSpaceExceeded, Unbounded, behavior, explore
from .structural import path_max_tokens, rooted_path_from_place
from .theorems import run_suite

__all__ = ["main", "run_cli", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_INPUT", "EXIT_CAP"]

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")

    def exit(self, status=0, message=None):
        # --help and --version still exit normally
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


def _add_globals(p: argparse.ArgumentParser, defaults: bool):
    kw = {} if defaults else {"default": argparse.SUPPRESS}
    p.add_argument("--cap", type=int, help="maximum number of markings to explore", **({"default": DEFAULT_CAP} if defaults else kw))
    p.add_argument("--json", action="store_true", help="machine-readable output", **({} if defaults else kw))
    p.add_argument("--quiet", action="store_true", help="verdict line only, no progress", **({} if defaults else kw))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lucent", description="Lucency and home-cluster analysis of marked Petri nets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    _add_globals(parser, True)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _add_globals(p, False)
        return p

    cmd("analyze", "full structure and behavior report").add_argument("net")
    cmd("lucency", "lucency verdict with a witness pair").add_argument("net")
    p = cmd("home-clusters", "list the home clusters")
    p.add_argument("net")
    p.add_argument("--mode", choices=["behavioral", "structural", "both"], default="behavioral")
    cmd("conflict-pairs", "all reachable conflict-pairs").add_argument("net")
    p = cmd("paths", "rooted disentangled paths into a cluster")
    p.add_argument("net")
    p.add_argument("--cluster", required=True, metavar="PLACE", help="a place of the target cluster")
    p.add_argument("--from", dest="source", metavar="PLACE", help="start place (default: every non-dead place)")
    p = cmd("short-circuit", "emit the short-circuited cleaned net")
    p.add_argument("net")
    p.add_argument("--cluster", required=True, metavar="PLACE", help="a place of the cluster")
    p = cmd("generate", "emit a random proper free-choice net")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--places", type=int, default=6, help="place budget")
    p.add_argument("--transitions", type=int, default=6, help="transition budget")
    p.add_argument("--branching", type=int, default=2)
    p.add_argument("--strongly-connected", action="store_true")
    p.add_argument("--no-home-cluster", action="store_true", help="do not require a home cluster")
    p.add_argument("--mutation", choices=["break_free_choice", "remove_home_cluster"])
    p.add_argument("--shape", choices=["block", "random"])
    p.add_argument("--name", default="generated")
    p = cmd("check-theorems", "run the property suites on generated nets")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--budget", type=int, default=2000, help="expedite closure budget")
    p = cmd("dot", "export the net in Graphviz DOT")
    p.add_argument("net")
    p.add_argument("--highlight", nargs="*", default=[], metavar="NODE")
    return parser


# report builders ---------------------------------------------------------


def _cluster(c: Cluster) -> list[str]:
    return sorted(c.nodes)


def _cluster_for(net: PetriNet, place: str) -> Cluster:
    if place not in net.place_set:
        raise InputError(f"{place!r} is not a place of the net")
    return net.cluster_of(place)


def _explore(net, m0, cap):
    return explore(net, m0, cap)


def report_analyze(net: PetriNet, m0: Marking, cap: int) -> dict:
    structure = classify_structure(net)
    out = {
        "structure": structure.to_dict(),
        "clusters": [_cluster(c) for c in net.clusters()],
        "initial_marking": str(m0),
    }
    try:
        rg = _explore(net, m0, cap)
    except Unbounded as exc:
        out.update(
            reachable_markings=None,
            behavior={"bounded": False, "witness": [str(exc.smaller), str(exc.larger)]},
            lucency={"lucent": False, "reason": f"unbounded: {exc}", "witness": None, "witness_enabled": None},
            fully_transparent=None,
            home_clusters=None,
            conflict_pairs=None,
        )
        return out
    _, fully = transparency(net, rg)
    out.update(
        reachable_markings=len(rg),
        behavior=behavior(net, rg).to_dict(),
        lucency=check_lucency(net, rg).to_dict(),
        fully_transparent=fully,
        home_clusters=[_cluster(c) for c in find_home_clusters(net, m0, rg=rg).home_clusters],
        conflict_pairs=[p.to_dict() for p in find_conflict_pairs(net, rg)],
    )
    return out


def report_lucency(net, m0, cap) -> dict:
    try:
        rg = _explore(net, m0, cap)
    except Unbounded as exc:
        return {"lucent": False, "reason": f"unbounded: {exc}", "witness": None, "witness_enabled": None}
    return check_lucency(net, rg).to_dict()


def _bounded_rg(net, m0, cap):
    try:
        return _explore(net, m0, cap)
    except Unbounded as exc:
        raise InputError(f"the marked net is unbounded ({exc}); this analysis needs a finite state space") from None


def report_home_clusters(net, m0, cap, mode) -> dict:
    rg = _bounded_rg(net, m0, cap) if mode == "behavioral" else None
    rep = find_home_clusters(net, m0, mode, cap=cap, rg=rg)
    out = rep.to_dict()
    out["counters"] = dict(rep.counters)
    return out


def report_conflict_pairs(net, m0, cap) -> dict:
    rg = _bounded_rg(net, m0, cap)
    return {"conflict_pairs": [p.to_dict() for p in find_conflict_pairs(net, rg)]}


def report_paths(net, m0, cap, cluster_place, source) -> dict:
    c = _cluster_for(net, cluster_place)
    rg = _bounded_rg(net, m0, cap)
    if source is not None and source not in net.place_set:
        raise InputError(f"{source!r} is not a place of the net")
    starts = [source] if source else sorted({p for m in rg.nodes for p in m})
    rows = []
    for p in starts:
        path = rooted_path_from_place(net, rg, p, c)
        rows.append(
            {
                "from": p,
                "path": None if path is None else list(path),
                "max_tokens": None if path is None else path_max_tokens(rg, path),
            }
        )
    return {"cluster": _cluster(c), "paths": rows}


def report_short_circuit(net, m0, cap, cluster_place, name) -> dict:
    c = _cluster_for(net, cluster_place)
    sc, tc = cleaned_short_circuit(net, c, m0, cap=cap)
    return {"cluster": _cluster(c), "transition": tc, "document": serialize_net(sc, m0, name)}


# text rendering ----------------------------------------------------------


def _render_text(command: str, rep: dict, quiet: bool) -> str:
    lines: list[str] = []
    if command == "analyze":
        b = rep["behavior"]
        lines.append(
            f"lucent: {str(rep['lucency']['lucent']).lower()}, "
            f"home clusters: {len(rep['home_clusters']) if rep['home_clusters'] is not None else 'n/a'}"
        )
        if not quiet:
            lines.append("structure: " + ", ".join(f"{k}={str(v).lower()}" for k, v in rep["structure"].items()))
            lines.append("clusters: " + " ".join("{" + ",".join(c) + "}" for c in rep["clusters"]))
            if not b["bounded"]:
                lines.append(f"unbounded: {b['witness'][0]} < {b['witness'][1]}")
            else:
                lines.append(f"reachable markings: {rep['reachable_markings']}")
                lines.append(
                    "behavior: "
                    + ", ".join(f"{k}={str(b[k]).lower()}" for k in ("bounded", "bound_k", "safe", "live", "deadlock_free"))
                )
                lines.append("home markings: " + (" ".join(b["home_markings"]) or "none"))
                lines.append("dead markings: " + (" ".join(b["dead_markings"]) or "none"))
                lines.append(f"fully transparent: {str(rep['fully_transparent']).lower()}")
                if rep["lucency"]["witness"]:
                    lines.append(_witness_line(rep["lucency"]))
                lines.append("home clusters: " + (" ".join("{" + ",".join(c) + "}" for c in rep["home_clusters"]) or "none"))
                lines.append(f"conflict-pairs: {len(rep['conflict_pairs'])}")
    elif command == "lucency":
        lines.append(f"lucent: {str(rep['lucent']).lower()}")
        if not quiet and rep["witness"]:
            lines.append(_witness_line(rep))
        if not quiet and rep["reason"]:
            lines.append(rep["reason"])
    elif command == "home-clusters":
        homes = rep["home_clusters"]
        lines.append("home clusters: " + (" ".join("{" + ",".join(c) + "}" for c in homes) or "none"))
        if not quiet:
            for row in rep["clusters"]:
                flags = ", ".join(
                    f"{k}={str(row[k]).lower()}"
                    for k in ("in_conn", "behavioral_home", "short_circuit_live_bounded")
                    if row[k] is not None
                )
                lines.append(f"  {{{','.join(row['cluster'])}}}: {flags}")
            if rep["counters"]:
                lines.append("counters: " + ", ".join(f"{k}={v}" for k, v in sorted(rep["counters"].items())))
    elif command == "conflict-pairs":
        pairs = rep["conflict_pairs"]
        lines.append(f"conflict-pairs: {len(pairs)}")
        if not quiet:
            for p in pairs:
                lines.append(f"  {p['m1']} / {p['m2']}  agree {p['agree']}, disagree {p['disagree1']} / {p['disagree2']}")
    elif command == "paths":
        lines.append(f"cluster: {{{','.join(rep['cluster'])}}}")
        if not quiet:
            for row in rep["paths"]:
                if row["path"] is None:
                    lines.append(f"  {row['from']}: no rooted path")
                else:
                    lines.append(f"  {row['from']}: {' '.join(row['path'])}  (max tokens {row['max_tokens']})")
    elif command == "check-theorems":
        lines.append(f"ok: {str(rep['ok']).lower()}, violations: {len(rep['violations'])}")
        if not quiet:
            lines += [f"  {k}: {v}" for k, v in sorted(rep["counts"].items())]
            lines += [f"  seed {v['seed']} [{v['check']}]: {v['problem']}" for v in rep["violations"]]
    return "\n".join(lines) + "\n"


def _witness_line(lucency: dict) -> str:
    m1, m2 = lucency["witness"]
    en = lucency.get("witness_enabled")
    suffix = "" if en is None else " both enable {" + ",".join(en) + "}"
    return f"witness: {m1} and {m2}{suffix}"


# dispatch ----------------------------------------------------------------


def _load(path: str):
    try:
        return load_net(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _dispatch(args, out, err) -> None:
    cmd = args.command
    emit_json = args.json

    def emit(rep: dict):
        if emit_json:
            out.write(json.dumps({"command": cmd, **rep}, indent=2, sort_keys=True) + "\n")
        else:
            out.write(_render_text(cmd, rep, args.quiet))

    if cmd == "generate":
        g = generate(
            GenConfig(
                seed=args.seed,
                place_budget=args.places,
                transition_budget=args.transitions,
                branching=args.branching,
                guarantee_home_cluster=not args.no_home_cluster,
                strongly_connected=args.strongly_connected,
                mutation=args.mutation,
                shape=args.shape,
            )
        )
        doc = serialize_net(g.net, g.marking, args.name)
        if emit_json:
            emit({"seed": args.seed, "home_cluster": None if g.home_cluster is None else _cluster(g.home_cluster), "document": doc})
        else:
            out.write(doc)
        return

    if cmd == "check-theorems":
        progress = None
        if not args.quiet and not emit_json:
            def progress(seed):
                if (seed - args.start + 1) % 50 == 0:
                    err.write(f"{seed - args.start + 1}/{args.seeds} seeds\n")
        emit(run_suite(args.seeds, start=args.start, budget=args.budget, progress=progress).to_dict())
        return

    net, m0 = _load(args.net)
    name = args.net.rsplit("/", 1)[-1].rsplit(".", 1)[0] or "net"
    if cmd == "analyze":
        emit(report_analyze(net, m0, args.cap))
    elif cmd == "lucency":
        emit(report_lucency(net, m0, args.cap))
    elif cmd == "home-clusters":
        emit(report_home_clusters(net, m0, args.cap, args.mode))
    elif cmd == "conflict-pairs":
        emit(report_conflict_pairs(net, m0, args.cap))
    elif cmd == "paths":
        emit(report_paths(net, m0, args.cap, args.cluster, args.source))
    elif cmd == "short-circuit":
        rep = report_short_circuit(net, m0, args.cap, args.cluster, name + "_sc")
        if emit_json:
            emit(rep)
        else:
            out.write(rep["document"])
    elif cmd == "dot":
        unknown = [x for x in args.highlight if x not in net]
        if unknown:
            raise InputError(f"unknown nodes to highlight: {', '.join(unknown)}")
        text = export_dot(net, m0, args.highlight, name)
        if emit_json:
            emit({"dot": text})
        else:
            out.write(text)


def run_cli(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(str(exc))
        return EXIT_USAGE
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if getattr(args, "cap", 1) < 1:
        err.write("lucent: error: --cap must be positive\n")
        return EXIT_USAGE

    def fail(code: int, kind: str, message: str) -> int:
        err.write(f"lucent: {message}\n")
        if args.json:
            out.write(json.dumps({"command": args.command, "error": {"kind": kind, "message": message}}, sort_keys=True) + "\n")
        return code

    try:
        _dispatch(args, out, err)
    except StateSpaceExceeded as exc:
        return fail(EXIT_CAP, "state_space_exceeded", str(exc))
    except (InputError, UnsafeInitialMarking, CleanFailed, GenerationFailed, NotInNet) as exc:
        return fail(EXIT_INPUT, type(exc).__name__, str(exc))
    except (PetriNetError, InvalidNet, ValueError) as exc:
        return fail(EXIT_INPUT, type(exc).__name__, str(exc))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
