"""Command-line frontend: deploy, key, analyze, simulate, compare.

Exit status is 0 on success, 1 on a domain error (the error class name is
printed on stderr) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import random
import secrets
import sys
from fractions import Fraction

from . import __version__, analysis, simulate
from .errors import HGBSError
from .field import MERSENNE_61, PrimeField
from .keying import (
    FORMAT_VERSION,
    POLICIES,
    DegreePolicy,
    assign_keying_material,
    dump_deployment,
    establish_key,
    establish_path_key,
    load_deployment,
    truncate_rings,
)
from .report import FORMATS, emit_report
from .topology import common_order, make_grid

ANALYSES = ("connectivity", "pz", "memory", "cost", "resiliency", "blocked", "ctf", "communication")
SIMULATIONS = ("same-zone", "compromise-random", "compromise-selective", "blocked", "agreement")


def _node_id(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a decimal or 0b-prefixed node ID") from None


def _unit_interval(text: str) -> float:
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"{text} outside (0, 1]")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgbs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("deploy", help="generate keying material and write a deployment file")
    p.add_argument("--order", type=int, required=True, help="network order n")
    p.add_argument("--unit", type=int, required=True, help="distribution unit k; m = (2k)^2")
    p.add_argument("--alpha", type=_unit_interval, required=True)
    p.add_argument("--policy", choices=POLICIES, required=True)
    p.add_argument("--modulus", type=int, default=MERSENNE_61)
    p.add_argument("--truncate", type=int, help="keep only orders 1..d in every ring")
    p.add_argument("--seed", type=int)
    p.add_argument("--no-authority", action="store_true", help="omit the authority polynomials")
    p.add_argument("--out", required=True)

    p = sub.add_parser("key", help="establish a pairwise key from a deployment file")
    p.add_argument("--deployment", required=True)
    p.add_argument("--i", type=_node_id, required=True)
    p.add_argument("--j", type=_node_id, required=True)
    p.add_argument("--relay", action="store_true", help="use a one-relay path key when no direct key exists")
    p.add_argument("--seed", type=int, help="relay choice and fresh key seed (with --relay)")
    p.add_argument("--format", choices=FORMATS, default="plain")

    p = sub.add_parser("analyze", help="evaluate closed-form models")
    p.add_argument("--what", choices=ANALYSES, required=True)
    p.add_argument("--order", type=int, help="network order n")
    p.add_argument("--unit", type=int, help="distribution unit k")
    p.add_argument("--m", type=int, help="nodes per basic zone (overrides --unit)")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--nodes", type=int, nargs="+", help="network size(s) N")
    p.add_argument("--alpha", type=_unit_interval, nargs="+")
    p.add_argument("--lgq", type=float, default=61)
    p.add_argument("--model", choices=analysis.MEMORY_MODELS, nargs="+", default=list(analysis.MEMORY_MODELS))
    p.add_argument("--policy", choices=POLICIES, default="doubling")
    p.add_argument("--t0", type=int)
    p.add_argument("--cmp-cost", type=int, default=0)
    p.add_argument("--raw", action="store_true", help="use unnormalized weights 1/2^(i-1)")
    p.add_argument("--compromised", type=int, nargs="+")
    p.add_argument("--format", choices=FORMATS, default="csv")

    p = sub.add_parser("simulate", help="Monte Carlo and exhaustive checks")
    p.add_argument("--what", choices=SIMULATIONS, required=True)
    p.add_argument("--deployment")
    p.add_argument("--order", type=int, help="grid order for same-zone without a deployment")
    p.add_argument("--unit", type=int, help="grid unit for same-zone without a deployment")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--seed", type=int)
    p.add_argument("--z", type=int, nargs="+")
    p.add_argument("--compromised", type=int, nargs="+")
    p.add_argument("--zone", type=int, default=0)
    p.add_argument("--budget", type=int)
    p.add_argument("--raw", action="store_true")
    p.add_argument("--format", choices=FORMATS, default="csv")

    p = sub.add_parser("compare", help="connectivity of the compared schemes")
    p.add_argument("--scheme", choices=analysis.SCHEMES, nargs="+", required=True)
    p.add_argument("--nodes", type=int, help="N")
    p.add_argument("--pool", type=int, help="key pool size P")
    p.add_argument("--ring", type=int, help="key ring size k")
    p.add_argument("--m", type=int)
    p.add_argument("--omega", type=int)
    p.add_argument("--tau", type=int)
    p.add_argument("--format", choices=FORMATS, default="csv")
    return parser


def _meta(args, **extra) -> dict:
    meta = {"tool": f"hgbs {__version__}", "format_version": FORMAT_VERSION}
    for key, value in sorted(vars(args).items()):
        if key in ("format",) or value is None or value is False:
            continue
        meta[key] = " ".join(map(str, value)) if isinstance(value, list) else value
    meta.update(extra)
    return meta


def _seed(args) -> tuple[int, dict]:
    if args.seed is not None:
        return args.seed, {}
    seed = secrets.randbits(63)
    return seed, {"seed": seed, "seed_auto": True}


def _require(parser, args, *names):
    for name in names:
        if getattr(args, name) is None:
            parser.error(f"{args.command} --what {getattr(args, 'what', '')}: --{name.replace('_', '-')} is required")


def _load(path: str):
    with open(path, encoding="utf-8") as fh:
        return load_deployment(fh.read())


def cmd_deploy(parser, args) -> int:
    grid = make_grid(args.order, args.unit)
    seed, _ = _seed(args)
    policy = DegreePolicy.from_alpha(args.policy, args.alpha, grid.m)
    dep = assign_keying_material(grid, policy, PrimeField(args.modulus), seed)
    if args.truncate is not None:
        dep = truncate_rings(dep, args.truncate)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_deployment(dep, include_authority=not args.no_authority))
    total = sum(grid.grids_at(o) for o in range(1, grid.n + 1))
    line = f"N={grid.N} t0={policy.t0} polynomials={total}"
    if args.seed is None:
        line += f" seed={seed}"
    print(line)
    return 0


def cmd_key(parser, args) -> int:
    dep = _load(args.deployment)
    a, b = dep.node(args.i), dep.node(args.j)
    width = (dep.field.bits + 3) // 4
    row = {"i": a.value, "i_bits": a.bits(), "j": b.value, "j_bits": b.bits(), "order": common_order(a, b)}
    extra = {}
    if args.relay and common_order(a, b) > min(dep.ring(a).truncation, dep.ring(b).truncation):
        seed, extra = _seed(args)
        path = establish_path_key(dep, a, b, random.Random(seed))
        row.update(key=path.key, relay=path.relay.value)
    else:
        row.update(key=establish_key(dep, a, b), relay=None)
    row["key_hex"] = f"0x{row['key']:0{width}x}"
    columns = ["i", "i_bits", "j", "j_bits", "order", "key", "key_hex", "relay"]
    meta = _meta(args, **extra) if args.format != "plain" or extra else None
    emit_report([row], columns, args.format, meta=meta)
    return 0


def _zone_size(parser, args) -> int:
    if args.m is not None:
        return args.m
    _require(parser, args, "unit")
    return (2 * args.unit) ** 2


def cmd_analyze(parser, args) -> int:
    what = args.what
    rows: list[dict]
    if what == "connectivity":
        _require(parser, args, "order")
        n = args.order
        columns = ["order", "beta", "connectivity"]
        rows = [{"order": i, "beta": args.beta, "connectivity": analysis.connectivity_order(i, n, args.beta)}
                for i in range(1, n + 1)]
    elif what == "pz":
        _require(parser, args, "order")
        n, m = args.order, _zone_size(parser, args)
        columns = ["z", "n", "m", "pz", "pz_float", "bound"]
        rows = []
        for z in range(1, n + 1):
            pz, bound = analysis.connectivity_pz(z, n, m)
            rows.append({"z": z, "n": n, "m": m, "pz": pz, "pz_float": float(pz), "bound": bound})
    elif what == "ctf" or what == "blocked":
        _require(parser, args, "order")
        n = args.order
        traffic = analysis.ctf_weights(n, normalized=not args.raw)
        if what == "ctf":
            columns = ["order", "weight", "weight_float"]
            rows = [{"order": i, "weight": w, "weight_float": float(w)} for i, w in enumerate(traffic.weights, 1)]
        else:
            columns = ["order", "p_i", "blocked", "blocked_float"]
            rows = []
            for i in range(1, n + 1):
                b = analysis.blocked_fraction(i, n, traffic)
                rows.append({"order": i, "p_i": traffic.p(i), "blocked": b, "blocked_float": float(b)})
    elif what == "memory":
        _require(parser, args, "order", "nodes", "alpha")
        columns = ["N", "n", "alpha", "lg_q", "model", "bits", "bits_exact"]
        rows = []
        for N in args.nodes:
            for alpha in args.alpha:
                for model in args.model:
                    cost = analysis.memory_cost(N, args.order, alpha, args.lgq, model)
                    rows.append({"N": N, "n": args.order, "alpha": alpha, "lg_q": args.lgq, "model": model,
                                 "bits": cost.bits, "bits_exact": cost.bits_exact})
    elif what == "cost":
        _require(parser, args, "order", "t0")
        n = args.order
        traffic = analysis.ctf_weights(n, normalized=not args.raw)
        model = analysis.CostModel(cmp_cost=args.cmp_cost)
        policy = DegreePolicy(args.policy, args.t0)
        result = analysis.compute_cost(policy, traffic, model)
        row = {"n": n, "policy": args.policy, "t0": args.t0, "ctf": traffic.kind,
               "field_mults": result.field_mults, "field_mults_float": float(result.field_mults)}
        for name in analysis.WORD_MULTS:
            row[name] = analysis.compute_cost(policy, traffic, model, name).word_mults
        columns = list(row)
        rows = [row]
    elif what == "resiliency":
        _require(parser, args, "nodes", "t0", "compromised")
        N = args.nodes[0]
        m = _zone_size(parser, args)
        columns = ["N_c", "N", "m", "t0", "literal_t0", "threshold_corrected", "hypergeometric"]
        rows = [{"N_c": nc, "N": N, "m": m, "t0": args.t0,
                 "literal_t0": analysis.resiliency_pr(nc, args.t0, m, N),
                 "threshold_corrected": analysis.resiliency_pr(nc, args.t0, m, N, threshold=args.t0 + 1),
                 "hypergeometric": float(analysis.zone_break_exact(nc, args.t0 + 1, m, N))}
                for nc in args.compromised]
    else:  # communication
        _require(parser, args, "order", "unit")
        grid = make_grid(args.order, args.unit)
        columns = ["n", "k", "N", "id_bits", "lg_N"]
        rows = [{"n": grid.n, "k": grid.k, "N": grid.N, **analysis.communication_cost(grid)}]
    emit_report(rows, columns, args.format, meta=_meta(args))
    return 0


def cmd_simulate(parser, args) -> int:
    what = args.what
    seed_extra = {}
    dep = _load(args.deployment) if args.deployment else None
    if what != "same-zone" and dep is None:
        _require(parser, args, "deployment")
    if what in ("same-zone", "compromise-random", "compromise-selective"):
        seed, seed_extra = _seed(args)
    if what == "same-zone":
        if dep is not None:
            grid = dep.grid
        else:
            _require(parser, args, "order", "unit")
            grid = make_grid(args.order, args.unit)
        zs = args.z or list(range(1, grid.n + 1))
        reports = [simulate.mc_same_zone(grid, z, args.trials, seed) for z in zs]
        rows, columns = [r.row() for r in reports], list(simulate.REPORT_COLUMNS)
    elif what == "compromise-random":
        _require(parser, args, "compromised")
        rows = []
        for nc in args.compromised:
            zone, links = simulate.mc_compromise_random(dep, nc, args.trials, seed)
            rows.append({**zone.row(), "literal_t0": zone.extra["literal_t0"],
                         "hypergeometric": zone.extra["hypergeometric"]})
            rows.append(links.row())
        columns = list(simulate.REPORT_COLUMNS) + ["literal_t0", "hypergeometric"]
    elif what == "compromise-selective":
        budget = args.budget if args.budget is not None else dep.policy.degree(1) + 1
        r = simulate.mc_compromise_selective(dep, args.zone, budget, args.trials, seed)
        rows = [{**r.row(), **{k: r.extra[k] for k in ("min_break_budget", "expected_random_budget", "link_fraction")}}]
        columns = list(simulate.REPORT_COLUMNS) + ["min_break_budget", "expected_random_budget", "link_fraction"]
    elif what == "blocked":
        n = dep.grid.n
        traffic = analysis.ctf_weights(n, normalized=not args.raw)
        columns = ["order", "simulated", "closed_form", "equal", "reestablished", "affected_pairs"]
        rows = []
        for i in range(1, n + 1):
            sim = simulate.mc_blocked_traffic(dep, i, traffic)
            closed = analysis.blocked_fraction(i, n, traffic)
            row = {"order": i, "simulated": sim, "closed_form": closed, "equal": sim == closed}
            if i < n:
                affected, agreed = simulate.reestablish_after_break(dep, i)
                row.update(reestablished=Fraction(agreed, affected), affected_pairs=affected)
            rows.append(row)
    else:  # agreement
        r = simulate.agreement_sweep(dep)
        columns = ["pairs", "agreed", "rate", "oracle_checked", "oracle_matches", "histogram", "expected_histogram"]
        fmt_hist = lambda h: ";".join(f"{o}:{c}" for o, c in sorted(h.items()))  # noqa: E731
        rows = [{"pairs": r.pairs, "agreed": r.agreed, "rate": r.rate, "oracle_checked": r.oracle_checked,
                 "oracle_matches": r.oracle_matches, "histogram": fmt_hist(r.histogram),
                 "expected_histogram": fmt_hist(r.expected_histogram)}]
    emit_report(rows, columns, args.format, meta=_meta(args, **seed_extra))
    return 0


def cmd_compare(parser, args) -> int:
    params = {"N": args.nodes, "P": args.pool, "k": args.ring, "m": args.m, "omega": args.omega, "tau": args.tau}
    params = {k: v for k, v in params.items() if v is not None}
    rows = [{"scheme": s, "connectivity": analysis.scheme_connectivity(s, **params)} for s in args.scheme]
    emit_report(rows, ["scheme", "connectivity"], args.format, meta=_meta(args))
    return 0


COMMANDS = {"deploy": cmd_deploy, "key": cmd_key, "analyze": cmd_analyze, "simulate": cmd_simulate,
            "compare": cmd_compare}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except HGBSError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"IoError: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(run())
