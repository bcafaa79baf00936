"""Command-line interface: reachability runs, set queries, model validation.

``run`` executes a reachability analysis for a built-in case study or a
model file, writing deterministic JSON/CSV reports, per-step set files,
and (for requested projections) polygon samples plus rendered figures.
Wall-clock timings go to a separate file so the remaining outputs are
byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .cases import CASE_NAMES, load_case
from .geometry import metrics_table, metrics_to_csv, polygons_to_json, project_sample
from .lp import SolverError
from .mld import load_model, validate
from .queries import contains_point, enumerate_integer_feasible, support
from .reach import ReachOptions, reach
from .reduction import grow_tree
from .sets import decompose, leaf, lift, load_set, save_set, set_to_json

__all__ = ["RunConfig", "main"]


@dataclass
class RunConfig:
    model: str
    steps: int | None = None
    reduce_inequalities: bool = False
    reduce_binaries: bool = False
    track_tree: bool = True
    project: tuple | None = None
    n_dirs: int = 250
    out_dir: str = "out"
    seed: int = 0
    node_budget: int | None = None
    threads: int = 1
    init: str | None = None

    def __post_init__(self):
        if self.steps is not None and self.steps < 0:
            raise ValueError("steps must be nonnegative")


def _fail(message, detail=None, code=2):
    payload = {"error": message}
    if detail:
        payload["detail"] = str(detail)
    print(json.dumps(payload), file=sys.stderr)
    return code


def cmd_run(cfg):
    try:
        model, domains, R0, default_steps = load_case(cfg.model)
    except (OSError, ValueError, KeyError) as err:
        return _fail(f"cannot load model {cfg.model!r}", err)
    problems = validate(model)
    if problems:
        return _fail("model validation failed", "; ".join(problems))
    if cfg.init is not None:
        try:
            R0 = load_set(cfg.init)
        except (OSError, ValueError) as err:
            return _fail(f"cannot load initial set {cfg.init!r}", err)
    if R0 is None:
        return _fail("model files require --init SETFILE")
    steps = default_steps if cfg.steps is None else cfg.steps

    opts = ReachOptions(
        steps=steps,
        reduce_inequalities=cfg.reduce_inequalities,
        reduce_binaries=cfg.reduce_binaries,
        track_tree=cfg.track_tree,
        node_budget=cfg.node_budget,
        max_workers=cfg.threads,
    )
    try:
        result = reach(R0, model, domains, opts)
    except SolverError as err:
        return _fail("reachability failed", err)

    out = cfg.out_dir
    os.makedirs(os.path.join(out, "sets"), exist_ok=True)
    reduced = cfg.reduce_inequalities or cfg.reduce_binaries
    rows = metrics_table(result, reduced=reduced)
    with open(os.path.join(out, "metrics.csv"), "w") as fh:
        fh.write(metrics_to_csv(rows))
    payload = {
        "config": {
            "model": cfg.model,
            "steps": steps,
            "reduce_inequalities": cfg.reduce_inequalities,
            "reduce_binaries": cfg.reduce_binaries,
            "track_tree": cfg.track_tree,
            "seed": cfg.seed,
        },
        "result": result.to_dict(),
    }
    with open(os.path.join(out, "metrics.json"), "w") as fh:
        json.dump(payload, fh, separators=(",", ":"))
        fh.write("\n")
    with open(os.path.join(out, "timings.json"), "w") as fh:
        json.dump({"per_step_seconds": result.timings}, fh)
        fh.write("\n")
    for k, Zh in enumerate(result.sets):
        save_set(Zh, os.path.join(out, "sets", f"R{k:03d}.json"))

    if cfg.project is not None:
        i, j = cfg.project
        per_step = {}
        for k, Zh in enumerate(result.sets):
            per_step[k] = project_sample(
                Zh,
                (i, j),
                n_dirs=cfg.n_dirs,
                per_leaf=cfg.track_tree,
                T=result.trees[k],
                node_budget=cfg.node_budget,
            )
        with open(os.path.join(out, f"polygons_{i}_{j}.json"), "w") as fh:
            fh.write(
                json.dumps(
                    {
                        str(k): json.loads(polygons_to_json((i, j), s))
                        for k, s in sorted(per_step.items())
                    },
                    separators=(",", ":"),
                )
            )
            fh.write("\n")
        from .plotting import render_reach_figure

        render_reach_figure(
            per_step,
            (i, j),
            os.path.join(out, f"figure_{i}_{j}.png"),
            title=f"{cfg.model}: reach sets, axes ({i},{j})",
        )

    final = rows[-1]
    print(
        f"{final['set']}: n_g={final['n_g']} n_b={final['n_b']} "
        f"n_c={final['n_c']} |T|={final['T'] or 'untracked'}"
    )
    print(f"outputs written to {out}/")
    return 0


def cmd_decompose(args):
    try:
        Zh = load_set(args.set)
    except (OSError, ValueError) as err:
        return _fail(f"cannot load set {args.set!r}", err)
    try:
        T = enumerate_integer_feasible(Zh, node_budget=args.node_budget)
    except SolverError as err:
        return _fail("enumeration failed", err)
    os.makedirs(args.out, exist_ok=True)
    leaves = decompose(Zh, T)
    for idx, zc in enumerate(leaves):
        save_set(lift(zc), os.path.join(args.out, f"leaf_{idx:04d}.json"))
    with open(os.path.join(args.out, "tree.json"), "w") as fh:
        json.dump(
            {"n_b": T.n_b, "entries": [[int(v) for v in xi] for xi in T]},
            fh,
            separators=(",", ":"),
        )
        fh.write("\n")
    print(f"{len(leaves)} nonempty leaves written to {args.out}/")
    return 0


def cmd_support(args):
    try:
        Zh = load_set(args.set)
        l = np.array([float(v) for v in args.direction.split(",")])
        rho, _ = support(Zh, l, node_budget=args.node_budget)
    except (OSError, ValueError, SolverError) as err:
        return _fail("support query failed", err)
    print(json.dumps({"direction": l.tolist(), "rho": rho}))
    return 0


def cmd_contains(args):
    try:
        Zh = load_set(args.set)
        z = np.array([float(v) for v in args.point.split(",")])
        inside = contains_point(Zh, z, node_budget=args.node_budget)
    except (OSError, ValueError, SolverError) as err:
        return _fail("containment query failed", err)
    print("true" if inside else "false")
    return 0


def cmd_validate(args):
    try:
        model, domains = load_model(args.model)
    except (OSError, ValueError, KeyError) as err:
        return _fail(f"cannot load model {args.model!r}", err)
    problems = validate(model)
    if problems:
        for p in problems:
            print(p)
        return 1
    d = model.dims
    print(
        f"ok: n={d.n} n_u={d.n_u} n_r={d.n_r} n_e={d.n_e}; "
        f"X dims {domains.X.dims}, U dims {domains.U.dims}, W dims {domains.W.dims}"
    )
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="hybzono",
        description="Hybrid zonotope reachability for MLD systems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="compute reachable sets and write reports")
    run.add_argument(
        "model",
        help=f"built-in case ({', '.join(CASE_NAMES)}) or a model JSON file",
    )
    run.add_argument("--steps", type=int, default=None)
    run.add_argument(
        "--reduce", action="store_true",
        help="enable both reduction passes (inequalities and binaries)",
    )
    run.add_argument("--reduce-ineqs", action="store_true")
    run.add_argument("--reduce-binaries", action="store_true")
    run.add_argument(
        "--no-track-tree", action="store_true",
        help="skip integer-feasible-set tracking",
    )
    run.add_argument(
        "--project", default=None, metavar="I,J",
        help="emit polygon samples and a figure for state axes I,J (0-based)",
    )
    run.add_argument("--dirs", type=int, default=250)
    run.add_argument("--out", default="out")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--node-budget", type=int, default=None)
    run.add_argument("--threads", type=int, default=1)
    run.add_argument("--init", default=None, help="initial set JSON file")

    dec = sub.add_parser("decompose", help="write nonempty leaves of a set file")
    dec.add_argument("set")
    dec.add_argument("--out", default="leaves")
    dec.add_argument("--node-budget", type=int, default=None)

    sup = sub.add_parser("support", help="support value of a set in a direction")
    sup.add_argument("set")
    sup.add_argument("--direction", required=True, metavar="L1,L2,...")
    sup.add_argument("--node-budget", type=int, default=None)

    con = sub.add_parser("contains", help="point membership test for a set file")
    con.add_argument("set")
    con.add_argument("--point", required=True, metavar="Z1,Z2,...")
    con.add_argument("--node-budget", type=int, default=None)

    val = sub.add_parser("validate", help="check an MLD model file")
    val.add_argument("model")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        project = None
        if args.project:
            parts = args.project.split(",")
            if len(parts) != 2:
                return _fail("--project expects two comma-separated axes")
            project = (int(parts[0]), int(parts[1]))
        cfg = RunConfig(
            model=args.model,
            steps=args.steps,
            reduce_inequalities=args.reduce or args.reduce_ineqs,
            reduce_binaries=args.reduce or args.reduce_binaries,
            track_tree=not args.no_track_tree,
            project=project,
            n_dirs=args.dirs,
            out_dir=args.out,
            seed=args.seed,
            node_budget=args.node_budget,
            threads=args.threads,
        )
        if args.init:
            cfg.init = args.init
        return cmd_run(cfg)
    if args.command == "decompose":
        return cmd_decompose(args)
    if args.command == "support":
        return cmd_support(args)
    if args.command == "contains":
        return cmd_contains(args)
    if args.command == "validate":
        return cmd_validate(args)
    return 2


if __name__ == "__main__":
    sys.exit(main())
