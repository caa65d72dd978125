"""Command-line surface: analysis, generation, exact and Monte Carlo reports.

Vertex labels and colors are 1-based on this surface, matching the JSON
formats; reports are emitted as JSON (default), CSV rows, or pretty text.
Exit codes: 0 all requested checks passed, 2 bad input or budget, 3 check
failed or undecidable at the current budget.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import families, sampling
from .graphs import (
    GraphFamily,
    conjugate,
    connected_components,
    family_from_json_dict,
    family_of,
    graph_from_json_dict,
    graph_stats,
    load_family,
    load_graph,
)
from .moments import connected_cumulant, factorization_verdict, gaussian_moment
from .search import (
    BudgetError,
    DEFAULT_KMAX,
    degree_report,
    mst_pair_f0,
    search_f0,
    search_f0_connected,
)


@dataclass(frozen=True)
class TieredVerdict:
    factorizes: Optional[bool]  # None when undecidable at this budget
    tier: str
    detail: dict


def decide_factorization(
    family: GraphFamily, kmax: Optional[int] = None, workers: int = 1
) -> TieredVerdict:
    """Tiered factorization decision, cheap sufficient conditions first.

    Tier 1 tries the per-component degree bound, tier 2 the tree-like
    criterion, tier 3 the exhaustive partition comparison, and tier 4 the
    conjugate-pair shortcut for maximally single-trace graphs.  Each report
    names the tier that decided it.
    """
    limit = DEFAULT_KMAX if kmax is None else int(kmax)
    f0_cache = {}

    def member_f0(g):
        key = g.sigma
        if key not in f0_cache:
            val = search_f0(g, kmax=limit, workers=workers).f0_max
            f0_cache[key] = val
            f0_cache[conjugate(g).sigma] = val  # conjugation preserves the maximum
        return f0_cache[key]

    # tier 1: sufficient bound on the sum of per-component degrees
    try:
        union = family.union()
        delta_sum = Fraction(0)
        for comp, _ in connected_components(union):
            delta_sum += degree_report(comp, f0_max=member_f0(comp)).delta
        threshold = Fraction(union.D * (union.D - 1), 2)
        if delta_sum < threshold:
            return TieredVerdict(
                True,
                "thm41-bound",
                {"delta_sum": str(delta_sum), "threshold": str(threshold)},
            )
    except BudgetError:
        pass

    # tier 2: tree-like dominant pairings imply factorization
    try:
        if family.total_k <= limit:
            tree_value = family.D + sum(member_f0(g) - family.D for g in family.graphs())
            connected = search_f0_connected(family, kmax=limit, workers=workers)
            if connected.f0_max == tree_value:
                return TieredVerdict(
                    True,
                    "tree-like",
                    {"f0_connected": connected.f0_max, "tree_value": tree_value},
                )
    except BudgetError:
        pass

    # tier 3: exhaustive comparison over the partition lattice
    try:
        verdict = factorization_verdict(family, kmax=limit, workers=workers)
        return TieredVerdict(
            verdict.factorizes,
            "exhaustive",
            {"worst_margin": verdict.worst[1]},
        )
    except BudgetError:
        pass

    # tier 4: conjugate pair of a maximally single-trace graph
    if family.p == 2:
        (na, ga), (nb, gb) = family.members
        for H, other in ((ga, gb), (gb, ga)):
            if H.k <= limit and graph_stats(H).is_mst and other.sigma == conjugate(H).sigma:
                rep = mst_pair_f0(H, kmax=limit, workers=workers, f0_max=f0_cache.get(H.sigma))
                return TieredVerdict(
                    not rep.nonfactorizing,
                    "mst-pair",
                    {"f0_union": rep.f0_union, "f0_single": rep.f0_single},
                )

    return TieredVerdict(None, "undecidable", {"kmax": limit})


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kmax", type=int, default=None, help="enumeration budget (default 11)")
    common.add_argument("--threads", type=int, default=1, help="search workers")
    common.add_argument(
        "--format", choices=["json", "csv", "pretty"], default="json", help="output format"
    )
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument(
        "--no-timestamp", action="store_true", help="omit the timestamp field from JSON"
    )
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="traceinv",
        description="Exact and Monte Carlo analysis of tensor trace-invariants.",
    )
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="faces, degrees and F0 maximum")
    p.add_argument("graph", help="graph JSON file")

    p = sub.add_parser("factorize", parents=[common], help="tiered factorization verdict")
    p.add_argument("family", help="family JSON file")

    p = sub.add_parser("generate", parents=[common], help="build a named family graph")
    gen = p.add_subparsers(dest="kind", required=True)
    g = gen.add_parser("two-vertex", parents=[common])
    g.add_argument("--D", type=int, required=True)
    g = gen.add_parser("melonic", parents=[common])
    g.add_argument("--D", type=int, required=True)
    g.add_argument("--script", required=True, help='JSON list of [color, white] steps, 1-based')
    g = gen.add_parser("cyclic", parents=[common])
    g.add_argument("--D", type=int, required=True)
    g.add_argument("--M", required=True, help="comma-separated colors, 1-based")
    g.add_argument("--k", type=int, required=True)
    g = gen.add_parser("realignment", parents=[common])
    g.add_argument("--M1", required=True, help="comma-separated colors, 1-based")
    g.add_argument("--M2", required=True)
    g.add_argument("--M3", required=True)
    g.add_argument("--k", type=int, required=True)
    g = gen.add_parser("joint-realignment", parents=[common])
    g.add_argument("--D", type=int, required=True)
    g.add_argument("--M3", required=True)
    g.add_argument("--links", required=True, help="JSON list of color lists, 1-based")
    g = gen.add_parser("fig7", parents=[common])
    g = gen.add_parser("random", parents=[common])
    g.add_argument("--D", type=int, required=True)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g = gen.add_parser("with-delta", parents=[common])
    g.add_argument("--D", type=int, required=True)
    g.add_argument("--delta", type=int, required=True)

    p = sub.add_parser("moment", parents=[common], help="exact Gaussian moment in N")
    p.add_argument("family", help="family (or graph) JSON file")

    p = sub.add_parser("cumulant", parents=[common], help="exact connected cumulant in N")
    p.add_argument("family", help="family (or graph) JSON file")

    for name in ("mc-moment", "concentration", "entropy-slope"):
        p = sub.add_parser(name, parents=[common], help=f"{name} experiment from a config file")
        p.add_argument("config", help="experiment config JSON")

    p = sub.add_parser("quenched", parents=[common], help="quenched entropy of a conjugate pair")
    p.add_argument("graph", help="graph JSON file")
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("annealed", parents=[common], help="annealed entropy coefficients")
    p.add_argument("--regime", choices=["exponential", "gamma"], required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--D", type=int, required=True)
    p.add_argument("--k", type=int, required=True)

    sub.add_parser("counterexample", parents=[common], help="reproduce the non-factorizing pair")
    return parser


def _emit(report: dict, args, csv_rows=None, csv_header=None) -> None:
    if args.format == "json":
        if not args.no_timestamp:
            report = dict(report)
            report["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    elif args.format == "csv":
        if csv_rows is None:
            raise ValueError("csv output is only available for row-based reports")
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(csv_header)
        writer.writerows(csv_rows)
        text = buf.getvalue()
    else:
        lines = [f"{key}: {value}" for key, value in report.items()]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args) -> int:
    G = load_graph(args.graph)
    stats = graph_stats(G)
    rep = search_f0(G, kmax=args.kmax, workers=args.threads)
    deg = degree_report(G, f0_max=rep.f0_max)
    report = {
        "k": stats.k,
        "kappa": stats.kappa,
        "F_pairwise": [list(row) for row in stats.F_pairwise],
        "F": stats.F_total,
        "omega2": deg.omega2,
        "delta": str(deg.delta),
        "compatible": deg.compatible,
        "f0_max": rep.f0_max,
        "multiplicity": rep.multiplicity,
        "is_mst": stats.is_mst,
        "is_planar3": stats.is_planar3,
    }
    row = [report[key] for key in ("k", "kappa", "F", "omega2", "delta", "f0_max", "multiplicity")]
    _emit(report, args, csv_rows=[row], csv_header=["k", "kappa", "F", "omega2", "delta", "f0_max", "multiplicity"])
    return 0


def _cmd_factorize(args) -> int:
    family = load_family(args.family)
    verdict = decide_factorization(family, kmax=args.kmax, workers=args.threads)
    report = {
        "factorizes": verdict.factorizes,
        "tier": verdict.tier,
        "detail": verdict.detail,
        "status": "decided" if verdict.factorizes is not None else "undecidable at this budget",
    }
    _emit(report, args)
    return 0 if verdict.factorizes is not None else 3


def _cmd_generate(args) -> int:
    kind = args.kind

    def colors(text):
        return {int(c) - 1 for c in text.split(",") if c.strip()}

    if kind == "two-vertex":
        G = families.two_vertex(args.D)
    elif kind == "melonic":
        script = [(int(c) - 1, int(s) - 1) for c, s in json.loads(args.script)]
        G = families.melonic(args.D, script)
    elif kind == "cyclic":
        G = families.cyclic(args.D, colors(args.M), args.k)
    elif kind == "realignment":
        G = families.realignment(colors(args.M1), colors(args.M2), colors(args.M3), args.k)
    elif kind == "joint-realignment":
        links = [{int(c) - 1 for c in l} for l in json.loads(args.links)]
        G = families.joint_realignment(args.D, colors(args.M3), links)
    elif kind == "fig7":
        G = families.fig7()
    elif kind == "random":
        G = families.random_graph(args.D, args.k, args.seed)
    elif kind == "with-delta":
        built = families.build_with_delta(args.D, args.delta, kmax=args.kmax, workers=args.threads)
        report = built.graph.to_json_dict()
        report["delta"] = built.delta
        report["delta_verified"] = built.verified
        _emit(report, args)
        return 0
    else:
        raise ValueError(f"unknown kind {kind!r}")
    _emit(G.to_json_dict(), args)
    return 0


def _cmd_moment(args, connected=False) -> int:
    family = load_family(args.family)
    if connected:
        poly = connected_cumulant(family, kmax=args.kmax)
    else:
        poly = gaussian_moment(family, kmax=args.kmax)
    report = poly.to_json_dict()
    report["pretty"] = str(poly)
    _emit(report, args)
    return 0


def _load_config(path) -> dict:
    with open(path) as fh:
        cfg = json.load(fh)
    if "seed" not in cfg:
        raise ValueError("experiment config requires an explicit 'seed'")
    return cfg


def _config_family(cfg) -> GraphFamily:
    if "family" in cfg:
        return family_from_json_dict(cfg["family"])
    if "graph" in cfg:
        return GraphFamily((("G1", graph_from_json_dict(cfg["graph"])),))
    raise ValueError("experiment config needs a 'graph' or 'family' entry")


def _cmd_mc_moment(args) -> int:
    cfg = _load_config(args.config)
    family = _config_family(cfg)
    kind = cfg.get("kind", "gaussian")
    Ns = cfg["N"] if isinstance(cfg["N"], list) else [cfg["N"]]
    rows = []
    for N in Ns:
        est = sampling.mc_moment(family, kind, int(N), int(cfg["samples"]), int(cfg["seed"]))
        rows.append(
            {
                "N": int(N),
                "mean_re": est.mean.real,
                "mean_im": est.mean.imag,
                "stderr": est.stderr,
            }
        )
    report = {"kind": kind, "samples": int(cfg["samples"]), "seed": int(cfg["seed"]), "rows": rows}
    _emit(
        report,
        args,
        csv_rows=[[r["N"], r["mean_re"], r["mean_im"], r["stderr"]] for r in rows],
        csv_header=["N", "mean_re", "mean_im", "stderr"],
    )
    return 0


def _cmd_concentration(args) -> int:
    cfg = _load_config(args.config)
    family = _config_family(cfg)
    if family.p != 1:
        raise ValueError("concentration experiment runs on a single graph")
    rep = sampling.concentration_experiment(
        family.members[0][1],
        [int(n) for n in cfg["N"]],
        float(cfg.get("epsilon", 0.5)),
        int(cfg["samples"]),
        int(cfg["seed"]),
        kind=cfg.get("kind", "haar"),
        kmax=args.kmax,
        workers=args.threads,
    )
    _emit(
        rep.to_json_dict(),
        args,
        csv_rows=[[n, c] for n, c in rep.rows],
        csv_header=["N", "coverage"],
    )
    return 0


def _cmd_entropy_slope(args) -> int:
    cfg = _load_config(args.config)
    family = _config_family(cfg)
    if family.p != 1:
        raise ValueError("entropy slope experiment runs on a single graph")
    rep = sampling.entropy_slope_experiment(
        family.members[0][1],
        [int(n) for n in cfg["N"]],
        int(cfg["samples"]),
        int(cfg["seed"]),
        kind=cfg.get("kind", "haar"),
        kmax=args.kmax,
        workers=args.threads,
    )
    _emit(
        rep.to_json_dict(),
        args,
        csv_rows=[[n, m, e] for n, m, e in rep.rows],
        csv_header=["N", "mean_entropy", "stderr"],
    )
    return 0


def _cmd_quenched(args) -> int:
    G = load_graph(args.graph)
    rep = sampling.quenched_entropy(G, args.N, kmax=args.kmax, workers=args.threads)
    _emit({"N": args.N, "value": rep.value, "method": rep.method}, args)
    return 0


def _cmd_annealed(args) -> int:
    rep = sampling.annealed_coefficients(args.regime, args.mu, args.lam, args.D, args.k)
    _emit(
        {
            "regime": args.regime,
            "mu": args.mu,
            "lambda": args.lam,
            "alpha": rep.alpha,
            "beta": rep.beta,
            "alpha_inf": rep.alpha_inf,
            "beta_inf": rep.beta_inf,
        },
        args,
    )
    return 0


def _cmd_counterexample(args) -> int:
    H = families.fig7()
    rep = search_f0(H, kmax=args.kmax, workers=args.threads)
    deg = degree_report(H, f0_max=rep.f0_max)
    pair = mst_pair_f0(H, f0_max=rep.f0_max)
    verdict = decide_factorization(
        family_of([H, conjugate(H)], names=["H", "Hbar"]), kmax=args.kmax, workers=args.threads
    )
    checks = {
        "f0_max_is_26": rep.f0_max == 26,
        "delta_is_10": deg.delta == 10,
        "pair_f0_is_54": pair.f0_union == 54,
        "does_not_factorize": verdict.factorizes is False,
    }
    report = {
        "f0_max": rep.f0_max,
        "multiplicity": rep.multiplicity,
        "delta": str(deg.delta),
        "pair_f0": pair.f0_union,
        "factorizes": verdict.factorizes,
        "decided_by": verdict.tier,
        "checks": checks,
        "status": "pass" if all(checks.values()) else "fail",
    }
    _emit(report, args)
    return 0 if all(checks.values()) else 3


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "analyze": _cmd_analyze,
        "factorize": _cmd_factorize,
        "generate": _cmd_generate,
        "moment": lambda a: _cmd_moment(a, connected=False),
        "cumulant": lambda a: _cmd_moment(a, connected=True),
        "mc-moment": _cmd_mc_moment,
        "concentration": _cmd_concentration,
        "entropy-slope": _cmd_entropy_slope,
        "quenched": _cmd_quenched,
        "annealed": _cmd_annealed,
        "counterexample": _cmd_counterexample,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
