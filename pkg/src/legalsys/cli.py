"""Command-line interface.

Exit codes: 0 success / legal, 1 definite negative, 2 inconclusive,
64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .construction import ConstructionError, ConstructionTranscript, MainParams
from .experiments import HITTING_TIME_PARAMS, METHODS, certify, experiment_hitting_time, experiment_success_curve, run_method
from .graph import Graph, GraphFormatError
from .legal import BudgetExceeded, MoveSet, validate_moves, verify
from .prob import check_coupling, check_domination, sized1_tail
from .pseudorandom import Constants, check_all
from .random_models import gnm, gnp, process
from .rng import RandomStream
from .search import classify_all_graphs, exists_legal_system

EXIT_OK, EXIT_NEGATIVE, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, path: str | None) -> None:
    if path and path != "-":
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True) + "\n"


def _read_graph(path: str) -> Graph:
    try:
        return Graph.read(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from e


def _gen_spec(spec: str, seed: int) -> Graph:
    """``gnp:N:P`` or ``gnm:N:M``."""
    try:
        kind, n, x = spec.split(":")
        if kind == "gnp":
            return gnp(int(n), float(x), seed)
        if kind == "gnm":
            return gnm(int(n), int(x), seed)
    except ValueError as e:
        raise UsageError(f"bad --gen spec {spec!r}: {e}") from e
    raise UsageError(f"bad --gen spec {spec!r}")


def _main_params(args) -> MainParams:
    base = MainParams()
    return MainParams(
        d0_threshold=args.d0_threshold if args.d0_threshold is not None else base.d0_threshold,
        d1_constant=args.d1_constant if args.d1_constant is not None else base.d1_constant,
        c_chi=args.c_chi if args.c_chi is not None else base.c_chi,
    )


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d0-threshold", type=float, help="D0 holds degree <= this * log n (default 0.01)")
    p.add_argument("--d1-constant", type=float, help="D1 cut is this * (log log n)^2 (default 1)")
    p.add_argument("--c-chi", type=float, help="class-count constant (default 8)")


# ----------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    if args.model == "gnp":
        if args.p is None:
            raise UsageError("gnp needs --p")
        _emit(gnp(args.n, args.p, args.seed).to_text(), args.out)
        return EXIT_OK
    if args.model == "gnm":
        if args.m is None:
            raise UsageError("gnm needs --m")
        _emit(gnm(args.n, args.m, args.seed).to_text(), args.out)
        return EXIT_OK
    trace = process(args.n, args.seed)
    if args.trace:
        _emit(trace.dumps(full=args.full_trace) + "\n", args.trace)
    t = trace.t2 if args.at is None else args.at
    if args.at_t2_minus_1:
        t = trace.t2 - 1
    _emit(trace.graph_at(t).to_text(), args.out)
    return EXIT_OK


def cmd_search(args) -> int:
    if args.classify is not None:
        rows = classify_all_graphs(args.classify, args.budget)
        _emit(_dump({"schema": "legalsys.classification/1", "n": args.classify,
                     "rows": [r.to_json() for r in rows]}), args.out)
        return EXIT_OK
    if not args.input:
        raise UsageError("search needs --in or --classify")
    g = _read_graph(args.input)
    res = exists_legal_system(g, args.budget)
    doc = {"schema": "legalsys.search/1", "n": g.n, "verdict": res.verdict, "nodes": res.nodes}
    if res.verdict == "yes":
        cert = verify(g, res.state, res.moves, "exhaustive")
        doc["witness"] = {"S": format(res.state, "x"), "moves": [format(m, "x") for m in res.moves.moves],
                          "certificate": cert.to_json()}
    _emit(_dump(doc), args.out)
    return {"yes": EXIT_OK, "no": EXIT_NEGATIVE}.get(res.verdict, EXIT_INCONCLUSIVE)


def _certificate_exit(cert) -> int:
    return EXIT_OK if cert.legal else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    g = _read_graph(args.input)
    try:
        with open(args.transcript) as fh:
            doc = json.load(fh)
        if "transcript" in doc:
            doc = doc["transcript"]
        tr = ConstructionTranscript.from_json(doc)
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise UsageError(f"bad transcript {args.transcript}: {e}") from e
    if tr.n != g.n:
        raise UsageError(f"transcript is for n={tr.n}, graph has n={g.n}")
    bad = validate_moves(g, tr.moves)
    if bad is not None:
        _emit(_dump({"schema": "legalsys.verify/1", "error": "invalid_moves", "vertex": bad.vertex,
                     "reason": bad.reason}), args.out)
        return EXIT_NEGATIVE
    try:
        cert = verify(g, tr.state, tr.moves, args.mode, rng=RandomStream(args.seed))
    except BudgetExceeded as e:
        _emit(_dump({"schema": "legalsys.verify/1", "error": "budget_exceeded", "message": str(e)}), args.out)
        return EXIT_INCONCLUSIVE
    _emit(_dump(cert.to_json()), args.out)
    return _certificate_exit(cert)


def cmd_construct(args) -> int:
    if bool(args.input) == bool(args.gen):
        raise UsageError("construct needs exactly one of --in or --gen")
    g = _read_graph(args.input) if args.input else _gen_spec(args.gen, args.seed)
    stream = RandomStream(args.seed)
    params = _main_params(args)
    doc = {"schema": "legalsys.construct/1", "method": args.method, "seed": args.seed, "n": g.n}
    try:
        tr = run_method(g, args.method, stream.child("construct"), params)
    except ConstructionError as e:
        doc["error"] = e.to_json()
        _emit(_dump(doc), args.out)
        return EXIT_NEGATIVE if e.kind == "graph_complete" else EXIT_INCONCLUSIVE
    doc["transcript"] = tr.to_json()
    code = EXIT_OK
    if args.verify != "none":
        try:
            cert = certify(g, tr, args.verify, stream.child("verify"))
            doc["certificate"] = cert.to_json()
            code = _certificate_exit(cert)
        except BudgetExceeded as e:
            doc["certificate"] = {"error": "budget_exceeded", "message": str(e)}
            code = EXIT_INCONCLUSIVE
    _emit(_dump(doc), args.out)
    return code


def cmd_check_pseudorandom(args) -> int:
    g = _read_graph(args.input)
    c = Constants()
    c = Constants(c_delta=args.c_delta or c.c_delta, c_chi=args.c_chi or c.c_chi, effort=args.effort)
    try:
        rep = check_all(g, c, RandomStream(args.seed))
    except ValueError as e:
        raise UsageError(str(e)) from e
    _emit(_dump(rep.to_json()), args.json)
    return EXIT_OK if rep.all_pass else EXIT_NEGATIVE


def cmd_prob_verify(args) -> int:
    if args.claim == "sized1":
        if args.log_n is None and args.n is None:
            raise UsageError("sized1 needs --n or --log-n")
        res = sized1_tail(args.n, log_n=args.log_n, trials=args.trials, threshold=args.threshold)
        text = "trials,threshold,tail,log10_tail,bound,bound_holds\n"
        j = res.to_json()
        text += f"{res.trials},{res.threshold:.6g},{j['tail']:.6g},{j['log10_tail']:.6g},{res.bound:.6g},{int(res.bound_holds)}\n"
        _emit(text, args.out)
        return EXIT_OK
    rows = check_domination(args.max_m) if args.claim == "domin" else check_coupling(args.max_total)
    text = "claim,ms,holds,detail\n" + "".join(r.csv() + "\n" for r in rows)
    _emit(text, args.out)
    return EXIT_OK if all(r.holds for r in rows) else EXIT_NEGATIVE


def cmd_experiment(args) -> int:
    if args.kind == "curve":
        grid = [float(x) for x in args.p_grid.split(",")]
        rep = experiment_success_curve(args.n, grid, args.trials, args.method, master_seed=args.seed,
                                       absolute=args.absolute, verify_mode=args.verify,
                                       params=_main_params(args), timing=args.timing, workers=args.workers)
    else:
        params = HITTING_TIME_PARAMS
        if any(x is not None for x in (args.d0_threshold, args.d1_constant, args.c_chi)):
            params = MainParams(
                d0_threshold=args.d0_threshold if args.d0_threshold is not None else params.d0_threshold,
                d1_constant=args.d1_constant if args.d1_constant is not None else params.d1_constant,
                c_chi=args.c_chi if args.c_chi is not None else params.c_chi,
            )
        verify_mode = "sampled" if args.verify == "auto" else args.verify
        rep = experiment_hitting_time(args.n, args.trials, master_seed=args.seed, verify_mode=verify_mode,
                                      params=params, workers=args.workers)
    _emit(rep.to_csv(), args.out)
    if args.json:
        _emit(rep.dumps() + "\n", args.json)
    return EXIT_OK


# ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="legalsys", description="Legal systems on graphs: construct, decide, verify.")
    ap.add_argument("--version", action="version", version=f"legalsys {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a random graph")
    p.add_argument("--model", choices=("gnp", "gnm", "process"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="graph file (default stdout)")
    p.add_argument("--trace", help="process: write the trace JSON here")
    p.add_argument("--full-trace", action="store_true", help="process: include every edge, not just up to T2")
    p.add_argument("--at", type=int, help="process: emit the graph after this many edges (default T2)")
    p.add_argument("--at-t2-minus-1", action="store_true", help="process: emit the graph just before T2")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("search", help="decide whether a small graph has a legal system")
    p.add_argument("--in", dest="input")
    p.add_argument("--classify", type=int, metavar="N", help="classify all graphs on N <= 5 vertices")
    p.add_argument("--budget", type=int, default=10**8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("verify", help="verify a transcript's (S, moves) on a graph")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--transcript", required=True, help="transcript JSON (or construct output)")
    p.add_argument("--mode", default="exhaustive", help="exhaustive | sampled | sampled:N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", help="run a construction and verify it")
    p.add_argument("--in", dest="input")
    p.add_argument("--gen", help="generate instead: gnp:N:P or gnm:N:M (uses --seed)")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--verify", default="auto", help="auto | exhaustive | sampled | sampled:N | none")
    _add_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("check-pseudorandom", help="check the eight pseudorandom properties")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--json", help="report file (default stdout)")
    p.add_argument("--c-delta", type=float)
    p.add_argument("--c-chi", type=float)
    p.add_argument("--effort", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check_pseudorandom)

    p = sub.add_parser("prob-verify", help="exact checks of the binomial claims, as CSV")
    p.add_argument("--claim", choices=("domin", "coupling", "sized1"), required=True)
    p.add_argument("--max-m", type=int, default=64)
    p.add_argument("--max-total", type=int, default=16)
    p.add_argument("--n", type=float)
    p.add_argument("--log-n", type=float)
    p.add_argument("--trials", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_prob_verify)

    p = sub.add_parser("experiment", help="Monte Carlo experiments, CSV output")
    p.add_argument("kind", choices=("curve", "hitting-time"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--p-grid", default="0.5,1.0,1.5,2.0", help="comma list, units of log n / n")
    p.add_argument("--absolute", action="store_true", help="p-grid holds absolute probabilities")
    p.add_argument("--method", choices=METHODS, default="main")
    p.add_argument("--verify", default="auto")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--timing", action="store_true", help="add a mean_runtime column (not reproducible)")
    p.add_argument("--workers", type=int, default=1)
    _add_params(p)
    p.add_argument("--out", help="CSV file (default stdout)")
    p.add_argument("--json", help="also write a JSON report with the full configuration")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, GraphFormatError) as e:
        print(f"legalsys: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
