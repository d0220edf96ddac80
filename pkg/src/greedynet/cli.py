"""Command-line front end.

Exit codes: 0 success or true verdict, 1 false verdict, 2 usage or
malformed input, 3 invalid metric or dimension mismatch, 4 refusal because
an exact computation exceeds the configured limit, 130 interrupted.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import bench, io as gio
from .dynamics import (
    CONVERGED,
    SINGLE_MOVES,
    ActivationSchedule,
    run_best_response_dynamics,
    run_improving_dynamics,
)
from .equilibria import (
    DEFAULT_EXACT_LIMIT,
    DEFAULT_TOL,
    ExactLimitExceeded,
    approx_factor,
    complete_graph_profile,
    is_greedy_equilibrium,
    is_nash_equilibrium,
)
from .game import LEXICOGRAPHIC, NUMERIC, StrategyProfile, ZPolicy, default_z
from .metric import EUCLIDEAN, TREE, MetricError, StructureError, to_exact, validate_metric
from .onetwo import EXACT, GREEDY, bdsg, log_approx_ne, max_dsg, min_dsg

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INVALID, EXIT_LIMIT, EXIT_INTERRUPT = 0, 1, 2, 3, 4, 130


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    alpha: object
    z_mode: str
    z_value: object
    tol: float
    exact_limit: int
    seed: int
    threads: int
    format: str

    def z(self, alpha, n: int, exact: bool) -> ZPolicy:
        if self.z_mode == LEXICOGRAPHIC:
            return ZPolicy.lexicographic()
        if self.z_value is None:
            return ZPolicy.numeric(default_z(alpha, n, exact))
        return ZPolicy.numeric(self.z_value if exact else float(self.z_value))


def _config(args) -> RunConfig:
    alpha = gio.parse_alpha(args.alpha) if args.alpha is not None else None
    zv = None
    if args.z_value is not None:
        zv = to_exact(args.z_value)
        if zv <= 0:
            raise UsageError("--z-value must be positive")
    threads = args.threads or int(os.environ.get("GNF_THREADS", "1") or 1)
    return RunConfig(alpha, args.z_mode, zv, args.tol, args.exact_limit, args.seed, threads, args.format)


def _alpha(cfg: RunConfig, inst: gio.Instance | None, exact: bool = True):
    a = cfg.alpha if cfg.alpha is not None else (inst.alpha if inst is not None else None)
    if a is None:
        raise UsageError("alpha is required (--alpha or an 'alpha' field in the instance)")
    a = to_exact(a)
    return a if exact else float(a)


# ------------------------------------------------------------------ output

def _flat(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flat(v, key + "."))
        elif isinstance(v, list):
            out[key] = gio.dumps(v)
        else:
            out[key] = v
    return out


def _emit(obj, cfg: RunConfig, out=None) -> None:
    out = out or sys.stdout
    if cfg.format == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        flat = [_flat(gio._plain(r)) for r in rows]
        cols = sorted({k for r in flat for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, cols, lineterminator="\n")
        w.writeheader()
        w.writerows(flat)
        out.write(buf.getvalue())
    else:
        out.write(gio.dumps(obj) + "\n")
    out.flush()


# ------------------------------------------------------------------ commands

def cmd_validate(args, cfg):
    obj = gio._read(args.instance)
    try:
        inst = gio.instance_from_json(obj)
    except MetricError as e:
        _emit({"ok": False, "violations": [list(v) for v in e.violations], "error": str(e)}, cfg)
        return EXIT_FALSE
    rep = validate_metric(inst.metric)
    _emit({"ok": rep.ok, "kind": inst.metric.kind, "n": inst.metric.n,
           "violations": [list(v) for v in rep.violations]}, cfg)
    return EXIT_OK if rep.ok else EXIT_FALSE


def _write_or_emit(obj, path, cfg):
    if path:
        gio.write_json(obj, path)
    else:
        _emit(obj, cfg)


def cmd_build(args, cfg):
    if args.what == "complete" and args.instance is None:
        if args.n is None:
            raise UsageError("build complete needs --instance or --n")
        _write_or_emit(complete_graph_profile(args.n).to_json(), args.out, cfg)
        return EXIT_OK
    if args.instance is None:
        raise UsageError(f"build {args.what} needs --instance")
    inst = gio.load_instance(args.instance)
    m = inst.metric
    mode = GREEDY if args.mode == "greedy" else EXACT
    if args.what == "maxdsg":
        s = max_dsg(m)
    elif args.what == "mindsg":
        s = min_dsg(m, mode)
    elif args.what == "bdsg":
        s = bdsg(m, _alpha(cfg, inst), mode)
    elif args.what == "logapprox":
        s = log_approx_ne(m, _alpha(cfg, inst))
    elif args.what == "gt":
        if m.kind != TREE or m.tree is None:
            raise StructureError("build gt needs a tree metric")
        from .tree import canonical_gt

        s = canonical_gt(m.tree)
    elif args.what == "theta":
        from .theta import ConeSystem, theta_graph

        if m.kind != EUCLIDEAN:
            raise StructureError("build theta needs a Euclidean metric")
        s = theta_graph(m, ConeSystem(args.k, args.rotation))
    elif args.what == "complete":
        s = complete_graph_profile(m.n)
    else:  # argparse restricts the choices
        raise UsageError(args.what)
    _write_or_emit(s.to_json(), args.out, cfg)
    return EXIT_OK


def _load_pair(args):
    inst = gio.load_instance(args.instance)
    prof = gio.load_profile(args.profile, inst.metric.n)
    return inst, prof


def cmd_check(args, cfg):
    inst, s = _load_pair(args)
    m = inst.metric
    a = _alpha(cfg, inst, m.exact)
    if args.what == "ge":
        rep = is_greedy_equilibrium(m, s, a, cfg.z(a, m.n, m.exact), cfg.tol)
    elif args.what == "ne":
        rep = is_nash_equilibrium(m, s, a, cfg.z(a, m.n, m.exact), cfg.tol, cfg.exact_limit)
    else:
        z = cfg.z(a, m.n, m.exact)
        if z.mode != NUMERIC:
            z = ZPolicy.numeric(default_z(a, m.n, m.exact))
        rep = approx_factor(m, s, a, z, cfg.tol, cfg.exact_limit)
        d = rep.to_json()
        if args.bound is not None:
            d["bound"] = args.bound
            d["within_bound"] = rep.max_beta <= args.bound + cfg.tol
        _emit(d, cfg)
        return EXIT_OK if args.bound is None or d["within_bound"] else EXIT_FALSE
    _emit(rep.to_json(), cfg)
    return EXIT_OK if rep.holds else EXIT_FALSE


def _schedule(args, cfg) -> ActivationSchedule:
    if args.schedule == "random":
        return ActivationSchedule.random(cfg.seed)
    if args.schedule == "explicit":
        if not args.agents:
            raise UsageError("--schedule explicit needs --agents")
        return ActivationSchedule.explicit(int(x) for x in args.agents.split(","))
    return ActivationSchedule.round_robin()


def cmd_dynamics(args, cfg):
    inst = gio.load_instance(args.instance)
    m = inst.metric
    s0 = gio.load_profile(args.profile, m.n) if args.profile else StrategyProfile.empty(m.n)
    a = _alpha(cfg, inst, m.exact)
    z = cfg.z(a, m.n, m.exact)
    sched = _schedule(args, cfg)
    if args.mode == "best":
        tr = run_best_response_dynamics(m, s0, a, sched, z, args.steps, cfg.tol, cfg.exact_limit)
    else:
        tr = run_improving_dynamics(m, s0, a, sched, SINGLE_MOVES, z, args.steps, cfg.tol)
    # JSON lines: one per applied step, then a summary
    for st in tr.steps:
        sys.stdout.write(gio.dumps({"type": "step", **st.to_json()}) + "\n")
    summary = {"type": "summary", "status": tr.status, "activations": tr.activations, "changes": len(tr.steps),
               "final": tr.final.to_json() if tr.final is not None else None}
    if tr.cycle_period is not None:
        summary["cycle"] = {"start": tr.cycle_start, "period": tr.cycle_period}
    sys.stdout.write(gio.dumps(summary) + "\n")
    return EXIT_OK if tr.status == CONVERGED else EXIT_FALSE


def _params(args, cfg) -> dict:
    kw = {}
    for p in args.param or []:
        if "=" not in p:
            raise UsageError(f"--param expects key=value, got {p!r}")
        k, v = p.split("=", 1)
        kw[k.strip()] = v.strip()
    for k in ("epsilon", "n"):
        if getattr(args, k, None) is not None:
            kw[k] = getattr(args, k)
    if cfg.alpha is not None:
        kw["alpha"] = cfg.alpha
    return kw


def cmd_scenario(args, cfg):
    from .scenarios import registry

    reg = registry()
    if args.action == "list":
        _emit([{"id": k} for k in reg], cfg)
        return EXIT_OK
    if args.id not in reg:
        raise UsageError(f"unknown scenario {args.id!r}; choose from {', '.join(reg)}")
    sc = reg[args.id](**_params(args, cfg))
    res = sc.run()
    rep = sc.to_json(res)
    if cfg.format == "csv":
        _emit([{"scenario": sc.id, **r.to_json()} for r in res], cfg)
    else:
        _emit(rep, cfg)
    return EXIT_OK if rep["passed"] else EXIT_FALSE


def _emit_gadget(args, cfg, metric, profile, meta):
    inst = gio.Instance(metric, meta.pop("alpha", None))
    if getattr(args, "out_instance", None):
        gio.write_json(inst.to_json(), args.out_instance)
    if getattr(args, "out_profile", None) and profile is not None:
        gio.write_json(profile.to_json(), args.out_profile)
    obj = {"instance": inst.to_json(), **meta}
    if profile is not None:
        obj["profile"] = profile.to_json()
    _emit(obj, cfg)
    return EXIT_OK


def cmd_gadget(args, cfg):
    if args.what in ("tree-setcover", "euclid-setcover"):
        if not args.sets:
            raise UsageError(f"gadget {args.what} needs --sets")
        uni, sets = gio.load_sets(args.sets)
        if args.what == "tree-setcover":
            from .tree import tree_setcover_gadget

            g = tree_setcover_gadget(uni, sets, cfg.alpha or Fraction(41, 10))
        else:
            from .scenarios import euclid_setcover_gadget

            _, g = euclid_setcover_gadget(uni, sets, cfg.alpha or Fraction(41, 10), args.eps or 1e-3)
        return _emit_gadget(args, cfg, g.metric, g.profile,
                            {"alpha": g.alpha, "deviator": g.deviator, "nodes": g.nodes})
    if args.what == "theta-small-k":
        from .theta import small_k_counterexample

        inst = small_k_counterexample(args.k or 5, args.eps or 1e-3)
        return _emit_gadget(args, cfg, inst.metric, None,
                            {"k": inst.k, "triples": inst.triples, "rotations": inst.rotations})
    if args.what == "theta-lower":
        from .theta import lower_bound_instance

        lb = lower_bound_instance(args.k or 8, args.eps if args.eps is not None else 0.5,
                                  float(cfg.alpha) if cfg.alpha is not None else None)
        from .theta import theta_graph

        return _emit_gadget(args, cfg, lb.metric, theta_graph(lb.metric, lb.cones),
                            {"alpha": lb.alpha, "k": lb.cones.k, "rotation": lb.cones.rotation,
                             "theta_cost": lb.theta_cost, "deviation_cost": lb.deviation_cost,
                             "factor": lb.factor})
    if args.what == "dominating-set":
        from .onetwo import dominating_set_gadget

        obj = gio._read(args.graph) if args.graph else None
        if not isinstance(obj, dict) or "n" not in obj:
            raise UsageError("gadget dominating-set needs --graph with {\"n\": .., \"edges\": [[u, v], ..]}")
        m, s, u = dominating_set_gadget(int(obj["n"]), obj.get("edges", []))
        return _emit_gadget(args, cfg, m, s, {"deviator": u})
    raise UsageError(args.what)


def cmd_bench(args, cfg):
    rows = bench.run(args.n, cfg.seed, args.repeats)
    text = bench.to_csv(rows)
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    sys.stdout.write(text)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run configuration")
    g.add_argument("--alpha", help="edge price (number or p/q); overrides the instance value")
    g.add_argument("--z-mode", choices=[LEXICOGRAPHIC, NUMERIC], default=LEXICOGRAPHIC,
                   help="how unreachable targets are charged")
    g.add_argument("--z-value", help="penalty per unreachable target in numeric mode")
    g.add_argument("--tol", type=float, default=DEFAULT_TOL, help="float comparison tolerance")
    g.add_argument("--exact-limit", type=int, default=DEFAULT_EXACT_LIMIT,
                   help="largest n for exact best-response search")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threads", type=int, default=None, help="worker processes (default: GNF_THREADS or 1)")
    g.add_argument("--format", choices=["json", "csv"], default="json")

    p = argparse.ArgumentParser(prog="greedynet", description="Network creation with greedy routing.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check that an instance is a metric")
    v.add_argument("--instance", required=True)
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", parents=[common], help="construct a profile")
    b.add_argument("what", choices=["maxdsg", "mindsg", "bdsg", "logapprox", "gt", "theta", "complete"])
    b.add_argument("--instance")
    b.add_argument("--out")
    b.add_argument("--mode", choices=["exact", "greedy"], default="exact", help="set-cover solver")
    b.add_argument("--k", type=int, default=8, help="number of cones")
    b.add_argument("--rotation", type=float, default=0.0)
    b.add_argument("--n", type=int, help="agents, for 'complete' without an instance")
    b.set_defaults(func=cmd_build)

    c = sub.add_parser("check", parents=[common], help="equilibrium checks")
    c.add_argument("what", choices=["ne", "ge", "approx"])
    c.add_argument("--instance", required=True)
    c.add_argument("--profile", required=True)
    c.add_argument("--bound", type=float, help="for approx: exit 1 when the largest factor exceeds this")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("dynamics", parents=[common], help="run improving or best-response dynamics")
    d.add_argument("--instance", required=True)
    d.add_argument("--profile", help="start profile (default: empty)")
    d.add_argument("--mode", choices=["improving", "best"], default="improving")
    d.add_argument("--schedule", choices=["round_robin", "random", "explicit"], default="round_robin")
    d.add_argument("--agents", help="comma-separated activation order for --schedule explicit")
    d.add_argument("--steps", type=int, default=1000, help="activation budget")
    d.set_defaults(func=cmd_dynamics)

    s = sub.add_parser("scenario", parents=[common], help="replay a built-in scenario")
    s.add_argument("action", choices=["run", "list"])
    s.add_argument("id", nargs="?")
    s.add_argument("--param", action="append", metavar="KEY=VALUE")
    s.add_argument("--epsilon")
    s.add_argument("--n")
    s.set_defaults(func=cmd_scenario)

    ga = sub.add_parser("gadget", parents=[common], help="emit a reduction or counterexample instance")
    ga.add_argument("what", choices=["tree-setcover", "euclid-setcover", "theta-small-k", "theta-lower",
                                     "dominating-set"])
    ga.add_argument("--sets", help="JSON file {\"universe\": [...], \"sets\": [[...], ...]}")
    ga.add_argument("--graph", help="JSON file {\"n\": .., \"edges\": [[u, v], ...]}")
    ga.add_argument("--k", type=int)
    ga.add_argument("--eps", type=float)
    ga.add_argument("--out-instance")
    ga.add_argument("--out-profile")
    ga.set_defaults(func=cmd_gadget)

    be = sub.add_parser("bench", parents=[common], help="time compiled vs Python kernels (CSV)")
    be.add_argument("--n", type=int, default=40)
    be.add_argument("--repeats", type=int, default=3)
    be.add_argument("--out")
    be.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if cfg.threads:
            os.environ["GNF_THREADS"] = str(cfg.threads)
        if args.command == "scenario" and args.action == "run" and not args.id:
            raise UsageError("scenario run needs an id")
        return args.func(args, cfg)
    except (UsageError, gio.InputError) as e:
        print(f"greedynet: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ExactLimitExceeded as e:
        print(f"greedynet: refused: {e}", file=sys.stderr)
        return EXIT_LIMIT
    except (MetricError, StructureError, gio.DimensionError) as e:
        print(f"greedynet: invalid input: {e}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"greedynet: {e}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        sys.stdout.flush()
        print("greedynet: interrupted", file=sys.stderr)
        return EXIT_INTERRUPT


if __name__ == "__main__":
    sys.exit(main())
