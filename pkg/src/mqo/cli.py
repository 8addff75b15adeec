"""Command-line entry point: ``mqo gen|solve|sweep|verify``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphFormatError, GraphGenSpec, er_probability, format_graph, generate, read_graph
from .objectives import ObjectiveSpec, Problem, Solution, is_independent
from .presets import make_config
from .solver import PoolConfig, RunReport, SolverConfig, solve, solve_from

SCHEMA_VERSION = 1
RLE_MIN_N = 1024

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

OBJECTIVE_FLAGS = {
    "mis-qubo": "mis_qubo",
    "laplacian": "laplacian",
    "perturbed-laplacian": "perturbed_laplacian",
    "adjacency": "adjacency",
    "perturbed-bias": "perturbed_bias",
}


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# graph sources

def parse_gen_spec(text: str) -> GraphGenSpec:
    """``er:N:D[:SEED]``, ``ba:N:M[:SEED]`` or ``sbm:N:K:PIN:POUT[:SEED]`` (D is the mean degree)."""
    parts = text.split(":")
    kind = parts[0].lower()
    try:
        if kind == "er" and len(parts) in (3, 4):
            n = int(parts[1])
            seed = int(parts[3]) if len(parts) == 4 else 0
            return GraphGenSpec("er", n, p=er_probability(n, float(parts[2])), seed=seed)
        if kind == "ba" and len(parts) in (3, 4):
            seed = int(parts[3]) if len(parts) == 4 else 0
            return GraphGenSpec("ba", int(parts[1]), m_attach=int(parts[2]), seed=seed)
        if kind == "sbm" and len(parts) in (5, 6):
            seed = int(parts[5]) if len(parts) == 6 else 0
            return GraphGenSpec("sbm", int(parts[1]), k=int(parts[2]), p_in=float(parts[3]),
                                p_out=float(parts[4]), seed=seed)
    except ValueError as exc:
        raise UsageError(f"bad generator spec {text!r}: {exc}") from None
    raise UsageError(f"bad generator spec {text!r}; expected er:N:D[:SEED], ba:N:M[:SEED] or sbm:N:K:PIN:POUT[:SEED]")


def load_graph(args) -> tuple[Graph, dict]:
    if bool(args.graph) == bool(args.gen):
        raise UsageError("exactly one of --graph and --gen is required")
    if args.graph:
        try:
            g = read_graph(args.graph)
        except (OSError, GraphFormatError) as exc:
            raise UsageError(f"cannot read graph {args.graph}: {exc}") from None
        desc = {"source": "file", "path": args.graph}
    else:
        spec = parse_gen_spec(args.gen)
        g = generate(spec)
        desc = {"source": "generator", "spec": args.gen, **spec.describe()}
    desc.update(n=g.n, m=g.m, fingerprint=g.fingerprint)
    return g, desc


def graph_from_descriptor(desc: dict) -> Graph:
    if desc["source"] == "file":
        return read_graph(desc["path"])
    return generate(parse_gen_spec(desc["spec"]))


# ---------------------------------------------------------------------------
# run records

def encode_solution(sol: Solution) -> dict:
    n = sol.mask.size
    if sol.problem is Problem.MIS:
        return {"format": "vertices", "n": n, "vertices": sol.members.tolist()}
    if n < RLE_MIN_N:
        return {"format": "bitmap", "n": n, "bits": "".join("1" if b else "0" for b in sol.mask)}
    # run lengths of alternating values, starting with a (possibly empty) run of 0s
    change = np.flatnonzero(np.diff(sol.mask.astype(np.int8))) + 1
    bounds = np.concatenate(([0], change, [n]))
    runs = np.diff(bounds).tolist()
    if sol.mask[0]:
        runs = [0] + runs
    return {"format": "rle", "n": n, "runs": runs}


def decode_solution(enc: dict) -> np.ndarray:
    n = enc["n"]
    fmt = enc["format"]
    mask = np.zeros(n, dtype=bool)
    if fmt == "vertices":
        mask[np.asarray(enc["vertices"], dtype=np.int64)] = True
    elif fmt == "bitmap":
        mask[:] = [c == "1" for c in enc["bits"]]
    elif fmt == "rle":
        pos, val = 0, False
        for r in enc["runs"]:
            mask[pos:pos + r] = val
            pos += r
            val = not val
    else:
        raise ValueError(f"unknown solution format {fmt!r}")
    return mask


def rescore(problem: Problem, g: Graph, mask: np.ndarray) -> int:
    if problem is Problem.MIS:
        if not is_independent(g, mask):
            raise ValueError("recorded solution is not independent")
        return Solution.independent_set(g, mask).score
    return Solution.cut(g, mask).score


def build_record(report: RunReport, graph_desc: dict, load_secs: float) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "problem": report.problem.value,
        "graph": graph_desc,
        "config": report.config,
        "seed": report.seed,
        "best_score": report.score,
        "empty": report.empty,
        "solution": encode_solution(report.best),
        "phase_gains": report.phase_gains,
        "loops": [[p.after_gradient, p.after_reset_loop, p.after_local_search] for p in report.loops],
        "resets": {"accepted": report.resets_accepted, "rejected": report.resets_rejected},
        "iterations": report.iterations,
        "trajectories": report.trajectories,
        "stop_reasons": report.stop_reasons,
        "pool_scores": report.pool_scores,
        "timings": {"load_secs": round(load_secs, 6), "solve_secs": round(report.elapsed, 6)},
    }


def check_round_trip(record: dict, g: Graph) -> None:
    mask = decode_solution(record["solution"])
    got = rescore(Problem(record["problem"]), g, mask)
    if got != record["best_score"]:
        raise RuntimeError(f"record round-trip failed: stored {record['best_score']}, rescored {got}")


@dataclass
class RecordView:
    """The fields of a serialized record that readers rely on; unknown keys are ignored."""

    schema_version: int
    problem: Problem
    graph: dict
    best_score: int
    solution: np.ndarray


def read_record(text: str) -> RecordView:
    d = json.loads(text)
    return RecordView(int(d["schema_version"]), Problem(d["problem"]), d["graph"], int(d["best_score"]),
                      decode_solution(d["solution"]))


CSV_FIELDS = ["problem", "n", "m", "seed", "best_score", "gain_gradient", "gain_reset_loop",
              "gain_local_search", "outer_loops", "resets_accepted", "resets_rejected", "solve_secs"]


def csv_row(record: dict) -> dict:
    gains = record["phase_gains"]
    return {
        "problem": record["problem"],
        "n": record["graph"]["n"],
        "m": record["graph"]["m"],
        "seed": record["seed"],
        "best_score": record["best_score"],
        "gain_gradient": gains["gradient"],
        "gain_reset_loop": gains["reset_loop"],
        "gain_local_search": gains["local_search"],
        "outer_loops": len(record["loops"]),
        "resets_accepted": record["resets"]["accepted"],
        "resets_rejected": record["resets"]["rejected"],
        "solve_secs": record["timings"]["solve_secs"],
    }


def write_csv(rows: list[dict], fields: list[str], out) -> None:
    w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)


# ---------------------------------------------------------------------------
# solve

def build_config(args, g: Graph) -> SolverConfig:
    problem = Problem(args.problem)
    kind = OBJECTIVE_FLAGS[args.objective] if args.objective else None
    if kind is not None and (kind == "mis_qubo") != (problem is Problem.MIS):
        raise UsageError(f"objective {args.objective} does not match problem {args.problem}")
    if problem is Problem.MIS and args.lam is not None:
        raise UsageError("--lambda applies to MaxCut objectives only")
    if problem is Problem.MAXCUT and args.gamma is not None:
        raise UsageError("--gamma applies to the MIS objective only")
    try:
        objective = None
        if kind is not None:
            extra = {}
            if kind == "mis_qubo" and args.gamma is not None:
                extra["gamma"] = args.gamma
            if kind in ("perturbed_laplacian", "perturbed_bias") and args.lam is not None:
                extra["lam"] = args.lam
            objective = ObjectiveSpec(kind, **extra)
        if args.preset == "auto":
            mean_degree = g.mean_degree
        else:
            # fixed fallback rows, independent of the instance
            mean_degree = 100.0
        n_key = g.n if args.preset == "auto" else 1000
        return make_config(
            problem, n_key, mean_degree,
            objective=objective,
            time_budget=args.budget_secs,
            seed=args.seed,
            sigma=args.sigma,
            local_search=not args.no_local_search,
            pool=PoolConfig(args.pool_b, args.pool_k),
            max_outer_loops=args.max_loops,
            alpha=args.alpha, beta=args.momentum, rho=args.rho, t_gs=args.tgs,
            gamma=args.gamma, lam=args.lam, max_iters=args.max_iters,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def run_solve(args) -> tuple[dict, Graph]:
    t0 = time.monotonic()
    g, desc = load_graph(args)
    load_secs = time.monotonic() - t0
    cfg = build_config(args, g)
    if args.init_constant is not None:
        lo, hi = cfg.objective.domain.value
        if not lo <= args.init_constant <= hi:
            raise UsageError(f"--init-constant must lie in [{lo}, {hi}]")
        report = solve_from(g, cfg, np.full(g.n, float(args.init_constant)))
    else:
        report = solve(g, cfg)
    record = build_record(report, desc, load_secs)
    check_round_trip(record, g)
    return record, g


def emit(records: list[dict], fmt: str, out) -> None:
    if fmt == "json":
        for r in records:
            out.write(json.dumps(r, sort_keys=True) + "\n")
    else:
        write_csv([csv_row(r) for r in records], CSV_FIELDS, out)


def _open_out(path):
    return open(path, "w") if path and path != "-" else None


def cmd_solve(args) -> int:
    record, _ = run_solve(args)
    fh = _open_out(args.out)
    try:
        emit([record], args.report, fh or sys.stdout)
    finally:
        if fh:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen

def cmd_gen(args) -> int:
    if (args.d is None) == (args.p is None) and args.kind == "er":
        raise UsageError("ER needs exactly one of --d and --p")
    try:
        if args.kind == "er":
            p = args.p if args.p is not None else er_probability(args.n, args.d)
            spec = GraphGenSpec("er", args.n, p=p, seed=args.seed)
        elif args.kind == "ba":
            spec = GraphGenSpec("ba", args.n, m_attach=args.m_attach, seed=args.seed)
        else:
            spec = GraphGenSpec("sbm", args.n, k=args.k, p_in=args.p_in, p_out=args.p_out, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = format_graph(generate(spec))
    fh = _open_out(args.out)
    try:
        (fh or sys.stdout).write(text)
    finally:
        if fh:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep

SWEEP_PARAMS = {"rho": "rho", "lambda": "lam", "momentum": "momentum", "local-search": "local_search"}


def _parse_values(param: str, text: str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise UsageError("--values is empty")
    if param == "local-search":
        table = {"on": True, "off": False, "1": True, "0": False, "true": True, "false": False}
        try:
            return [table[t.lower()] for t in items]
        except KeyError:
            raise UsageError("local-search values must be on/off") from None
    try:
        return [float(t) for t in items]
    except ValueError:
        raise UsageError(f"non-numeric value in {text!r}") from None


def _sweep_job(job: tuple[dict, str, object, int]) -> dict:
    base, param, value, seed = job
    ns = argparse.Namespace(**base)
    ns.seed = seed
    if param == "local-search":
        ns.no_local_search = not value
    else:
        setattr(ns, SWEEP_PARAMS[param], value)
    record, _ = run_solve(ns)
    return record


def cmd_sweep(args) -> int:
    values = _parse_values(args.param, args.values)
    try:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad --seeds {args.seeds!r}") from None
    if not seeds:
        raise UsageError("--seeds is empty")
    base = {k: v for k, v in vars(args).items() if k != "func"}
    jobs = [(base, args.param, v, s) for v in values for s in seeds]
    # fail fast on bad flags before fanning out
    load_graph(args)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            records = list(ex.map(_sweep_job, jobs))
    else:
        records = [_sweep_job(j) for j in jobs]

    fh = _open_out(args.out)
    out = fh or sys.stdout
    try:
        if args.report == "json":
            emit(records, "json", out)
        else:
            rows = []
            for i, v in enumerate(values):
                scores = [r["best_score"] for r in records[i * len(seeds):(i + 1) * len(seeds)]]
                label = ("on" if v else "off") if args.param == "local-search" else v
                rows.append({args.param: label, "mean": float(np.mean(scores)), "min": min(scores),
                             "max": max(scores), "scores": " ".join(map(str, scores))})
            write_csv(rows, [args.param, "mean", "min", "max", "scores"], out)
    finally:
        if fh:
            fh.close()
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

def cmd_verify(args) -> int:
    from . import verify

    suites = verify.SUITES if args.suite == "all" else {args.suite: verify.SUITES[args.suite]}
    failed = False
    for name, fn in suites.items():
        for check in fn(args):
            print(f"{'PASS' if check.ok else 'FAIL'} {name}: {check.name} ({check.detail})")
            failed |= not check.ok
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_solve_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True, choices=[x.value for x in Problem])
    src = p.add_argument_group("graph source")
    src.add_argument("--graph", help="canonical or DIMACS graph file")
    src.add_argument("--gen", help="generator spec, e.g. er:1000:100 or er:1000:100:7")
    p.add_argument("--budget-secs", type=float, default=60.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float)
    p.add_argument("--momentum", type=float)
    p.add_argument("--rho", type=float)
    p.add_argument("--tgs", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sigma", type=float, default=0.15)
    p.add_argument("--pool-b", type=int, default=1)
    p.add_argument("--pool-k", type=int, default=1)
    p.add_argument("--no-local-search", action="store_true")
    p.add_argument("--objective", choices=sorted(OBJECTIVE_FLAGS))
    p.add_argument("--preset", choices=["auto", "none"], default="auto",
                   help="auto: nearest default row by (n, mean degree); none: the (1000, 100) row")
    p.add_argument("--max-loops", type=int, help="stop after this many outer loops")
    p.add_argument("--max-iters", type=int, help="iteration cap per trajectory")
    p.add_argument("--init-constant", type=float,
                   help="run one trajectory from c*1 without resets or local search")
    p.add_argument("--report", choices=["json", "csv"], default="json")
    p.add_argument("--out", help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqo", description="MIS and MaxCut via relaxed QUBOs with global resets")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random graph in canonical format")
    g.add_argument("--kind", choices=["er", "ba", "sbm"], default="er")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=float, help="ER mean degree (p = d/n)")
    g.add_argument("--p", type=float, help="ER edge probability")
    g.add_argument("--m-attach", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--p-in", type=float)
    g.add_argument("--p-out", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance")
    _add_solve_flags(s)
    s.set_defaults(func=cmd_solve)

    w = sub.add_parser("sweep", help="sweep one parameter over a list of values")
    _add_solve_flags(w)
    w.add_argument("--param", required=True, choices=sorted(SWEEP_PARAMS))
    w.add_argument("--values", required=True, help="comma-separated values (on/off for local-search)")
    w.add_argument("--seeds", default="0", help="comma-separated solver seeds")
    w.add_argument("--jobs", type=int, default=1)
    w.set_defaults(func=cmd_sweep, report="csv")

    v = sub.add_parser("verify", help="run oracle-backed verification suites")
    v.add_argument("--suite", choices=["all", "fixed-points", "escapability", "exact"], default="all")
    v.add_argument("--n", type=int, default=100, help="escapability graph order")
    v.add_argument("--p", type=float, default=0.02, help="escapability edge probability")
    v.add_argument("--graphs", type=int, default=10, help="escapability graph count")
    v.add_argument("--max-n", type=int, default=10, help="largest order for exhaustive suites")
    v.add_argument("--instances", type=int, default=20, help="instances per exhaustive suite")
    v.add_argument("--budget-secs", type=float, default=2.0, help="solver budget in the exact suite")
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mqo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
