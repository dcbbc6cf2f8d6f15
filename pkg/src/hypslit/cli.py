"""Command-line front end.

Exit codes: 0 on success, 1 on usage errors, 2 when the geometry or an
invariant check fails.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import _kernel as K
from .enumeration import enumerate_saddle_connections
from .experiments import (
    COUNT_COLUMNS,
    DIRECTION_COLUMNS,
    TRIANGLE_COLUMNS,
    direction_summary,
    gnuplot_script,
    growth_band,
    run_bad_times,
    run_cylinder_linear,
    run_direction_tree,
    run_growth,
    run_triangle_bound,
    write_rows,
)
from .flows import horocycle, normalize_slit_horizontal, teichmuller
from .geometry import GeometryError, rat, rat_str
from .involution import classify, find_involution
from .nps import BadnessConfig, nps_find_simple_cylinder, parallelogram_decomposition
from .surface import (
    BUILTINS,
    SlitSurface,
    Surface,
    builtin,
    from_parallelogram_chain,
    parse_chain,
    random_chain,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _rat_arg(text: str) -> Fraction:
    try:
        return rat(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _rat_list(text: str) -> list:
    return [_rat_arg(x) for x in text.split(",") if x.strip()]


def _load(args) -> tuple:
    """(surface, slit half-edge or None) from --surface and --slit."""
    src = args.surface
    if src is None:
        raise UsageError("--surface is required")
    default = None
    if src.startswith("builtin:"):
        s, default = builtin(src.split(":", 1)[1])
    else:
        path = Path(src)
        if not path.exists():
            raise UsageError(f"no such file: {src}")
        s = Surface.load(path)
    bad = s.validate()
    if bad:
        raise GeometryError(bad[0])
    he = default
    if getattr(args, "slit", None) is not None:
        if not 0 <= args.slit < len(s.edge_pairs):
            raise UsageError(f"edge id {args.slit} out of range")
        he = s.edge_halfedge(args.slit)
    return s, he


def _need_slit(s, he):
    if he is None:
        raise UsageError("--slit is required")
    return he


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


# ---------------------------------------------------------------- commands


def cmd_build(args):
    chosen = [x for x in (args.builtin, args.chain, args.random) if x is not None]
    if len(chosen) != 1:
        raise UsageError("give exactly one of --builtin, --chain, --random")
    if args.builtin is not None:
        s, he = builtin(args.builtin)
    elif args.chain is not None:
        s, he = from_parallelogram_chain(parse_chain(args.chain)), (0, 1)
    else:
        s, he = random_chain(random.Random(args.seed), args.random)
    if not args.out:
        raise UsageError("--out is required")
    s.save(args.out)
    info = {"file": args.out, "stratum": s.stratum().label(), "area": rat_str(s.area()),
            "suggested_slit": s.edge_id(he), "digest": s.digest()}
    sys.stdout.write(_json(info))


def cmd_validate(args):
    s, he = _load(args)
    tau = find_involution(s, he)
    info = {"valid": True, "stratum": s.stratum().label(), "dim_c": s.dim_c,
            "area": rat_str(s.area()),
            "involution": None if tau is None else classify(s, tau)}
    if he is not None:
        info["slit"] = s.edge(he).to_json()
        info["slit_invariant"] = tau is not None and tau.fixes_edge(s, he)
    _emit(args, _json(info))


def cmd_enumerate(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    res = enumerate_saddle_connections(SlitSurface(s, he), args.L * args.L, args.threads)
    tau = find_involution(s, he)
    rows = res.rows(tau)
    from .enumeration import CSV_COLUMNS
    _emit(args, write_rows(rows, CSV_COLUMNS, args.format))


def cmd_flow(args):
    s, he = _load(args)
    picked = [x for x in (args.horocycle, args.dilate) if x is not None] + ([1] if args.normalize else [])
    if len(picked) != 1:
        raise UsageError("give exactly one of --horocycle, --dilate, --normalize")
    scale = None
    if args.horocycle is not None:
        out = horocycle(s, args.horocycle)
    elif args.dilate is not None:
        if args.dilate <= 0:
            raise GeometryError("dilation factor must be positive")
        out = teichmuller(s, args.dilate)
    else:
        out, scale = normalize_slit_horizontal(s, _need_slit(s, he))
    target = args.out or args.surface
    if target.startswith("builtin:"):
        raise UsageError("--out is required when flowing a builtin")
    out.save(target)
    info = {"file": target, "area": rat_str(out.area())}
    if scale is not None:
        info["scale"] = rat_str(scale)
    sys.stdout.write(_json(info))


def cmd_nps(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    cert, trace = nps_find_simple_cylinder(s, None, he, args.perturb)
    _emit(args, _json({"trace": trace, "certificate": cert.to_json()}))


def cmd_decompose(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    pieces = parallelogram_decomposition(s, None, he)
    _emit(args, _json({"stratum": s.stratum().label(), "area": rat_str(s.area()),
                       "parallelograms": [p.to_json() for p in pieces]}))


def cmd_count(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    recs = run_growth(s, None, he, args.grid, args.threads)
    rows = [r.row(s.dim_c) for r in recs]
    _emit(args, write_rows(rows, COUNT_COLUMNS, args.format))
    if args.plot:
        Path(args.plot).write_text(gnuplot_script(args.out or "count.csv", 1, [2, 3, 4]))
    if args.band and len(recs) >= 2:
        lo, hi = growth_band(recs, s.dim_c - 2)
        sys.stderr.write(f"band {lo:.9g} {hi:.9g}\n")


def cmd_cylinders(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    fit = run_cylinder_linear(s, None, he, args.grid, args.points)
    if args.format == "json":
        text = _json({"rows": fit.rows(), "slope": f"{fit.slope:.9g}",
                      "intercept": f"{fit.intercept:.9g}",
                      "residuals": [f"{r:.9g}" for r in fit.residuals]})
    else:
        text = write_rows(fit.rows(), ["L", "count", "in_fit"], "csv")
        text += f"# slope {fit.slope:.9g}\n"
    _emit(args, text)


def cmd_triangles(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    table = run_triangle_bound(s, None, he, range(args.j_min, args.j_max + 1))
    if args.format == "json":
        text = _json({"rows": table.out_rows(), "beta_size": table.beta_size,
                      "max_implied": None if table.max_implied is None else rat_str(table.max_implied),
                      "spearman": f"{table.spearman:.9g}"})
    else:
        text = write_rows(table.out_rows(), TRIANGLE_COLUMNS, "csv")
    _emit(args, text)


def cmd_badtimes(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    if args.m0 is not None:
        cfg = BadnessConfig(args.m0, args.eps)
    else:
        cfg = BadnessConfig.default(s.dim_c, args.eps)
    rep = run_bad_times(s, None, he, args.T, cfg)
    out = rep.to_json()
    out["m0"] = rat_str(cfg.m0)
    _emit(args, _json(out))


def cmd_directions(args):
    s, he = _load(args)
    he = _need_slit(s, he)
    Ls = sorted(args.L)
    recs = run_direction_tree(s, None, he, Ls[-1], args.depth)
    if args.format == "json":
        summ = direction_summary(s, None, he, recs, Ls)
        text = _json({
            "records": [r.row() for r in recs],
            "summary": [{"L": rat_str(x.L), "level": x.level,
                         "min_gap": None if x.min_gap is None else rat_str(x.min_gap),
                         "bound_sq": rat_str(x.bound_sq), "within_bound": x.within_bound}
                        for x in summ],
        })
    else:
        text = write_rows([r.row() for r in recs], DIRECTION_COLUMNS, "csv")
    _emit(args, text)


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hypslit", description="Saddle connections and cylinders on slit "
                                            "hyperelliptic translation surfaces.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp, slit=True, fmt=True):
        sp.add_argument("--surface", help="surface JSON file, or builtin:NAME")
        if slit:
            sp.add_argument("--slit", type=int, help="edge id of the slit")
        sp.add_argument("--out", help="output file (default: stdout)")
        if fmt:
            sp.add_argument("--format", choices=["csv", "json"], default="csv")
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--seed", type=int, default=0)

    b = sub.add_parser("build", help="write a surface file")
    common(b, slit=False, fmt=False)
    b.add_argument("--builtin", choices=sorted(BUILTINS))
    b.add_argument("--chain", help='parallelogram chain "ax,ay;bx,by | ..."')
    b.add_argument("--random", type=int, metavar="K", help="random chain of K parallelograms")
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("validate", help="check a surface file")
    common(v, fmt=False)
    v.set_defaults(func=cmd_validate)

    e = sub.add_parser("enumerate", help="saddle connections disjoint from the slit")
    common(e)
    e.add_argument("--L", type=_rat_arg, required=True, help="length bound")
    e.set_defaults(func=cmd_enumerate)

    f = sub.add_parser("flow", help="apply the horocycle or Teichmuller flow")
    common(f, fmt=False)
    f.add_argument("--horocycle", type=_rat_arg)
    f.add_argument("--dilate", type=_rat_arg)
    f.add_argument("--normalize", action="store_true", help="make the slit horizontal")
    f.set_defaults(func=cmd_flow)

    n = sub.add_parser("nps", help="find a simple cylinder containing the slit")
    common(n, fmt=False)
    n.add_argument("--perturb", type=_rat_arg, default=Fraction(1, 2))
    n.set_defaults(func=cmd_nps)

    d = sub.add_parser("decompose", help="decompose into invariant parallelograms")
    common(d, fmt=False)
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("count", help="growth of saddle connection counts")
    common(c)
    c.add_argument("--grid", type=_rat_list, required=True, help="comma-separated L values")
    c.add_argument("--plot", help="also write a gnuplot script here")
    c.add_argument("--band", action="store_true", help="print the top-half band to stderr")
    c.set_defaults(func=cmd_count)

    y = sub.add_parser("cylinders", help="log-log slope of simple cylinder counts")
    common(y)
    y.add_argument("--grid", type=_rat_list, required=True)
    y.add_argument("--points", choices=["top", "all"], default="top")
    y.set_defaults(func=cmd_cylinders)

    t = sub.add_parser("triangles", help="embedded triangles over the slit by size")
    common(t)
    t.add_argument("--j-min", type=int, required=True)
    t.add_argument("--j-max", type=int, required=True)
    t.set_defaults(func=cmd_triangles)

    bt = sub.add_parser("badtimes", help="measure of bad horocycle times")
    common(bt, fmt=False)
    bt.add_argument("--T", type=_rat_arg, required=True)
    bt.add_argument("--m0", type=_rat_arg)
    bt.add_argument("--eps", type=_rat_arg, default=Fraction(1, 4))
    bt.set_defaults(func=cmd_badtimes)

    dr = sub.add_parser("directions", help="directions of cylinder successions")
    common(dr)
    dr.add_argument("--L", type=_rat_list, required=True, help="comma-separated L values")
    dr.add_argument("--depth", type=int, default=1)
    dr.set_defaults(func=cmd_directions)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help(sys.stderr)
            return 1
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"hypslit: {exc}\n")
        return 1
    except (GeometryError, K.KernelError) as exc:
        sys.stderr.write(f"hypslit: {exc}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
