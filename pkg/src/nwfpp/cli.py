"""Command line entry point ``nwfpp``."""
import argparse
import contextlib
import json
import logging
import sys

from . import cmbp, experiments, fpp, mgf, nwgraph
from .experiments import _fmt
from .rng import stream
from .theory import constants, x_of_t


def parse_grid(text):
    """``t0:t1:dt`` -> array t0, t0+dt, ... <= t1."""
    try:
        t0, t1, dt = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected t0:t1:dt, got {text!r}") from None
    if dt <= 0 or t1 < t0:
        raise argparse.ArgumentTypeError("need dt > 0 and t0 <= t1")
    return experiments.make_t_grid((t0, t1, dt))


@contextlib.contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(out, header, rows):
    with _output(out) as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _graph(args):
    return nwgraph.generate(nwgraph.GraphConfig(args.n, args.rho, args.seed))


def cmd_run(args):
    summary, code = experiments.run_campaign(args.config, workers=args.workers)
    for key, ok in summary["pass"].items():
        print(f"{'PASS' if ok else 'FAIL'} {key}")
    return code


def cmd_constants(args):
    print(json.dumps(constants(args.rho).as_dict(), indent=2))
    return 0


def cmd_fpp_distance(args):
    g = _graph(args)
    rng = stream(args.seed, "cli.pairs")
    rows = []
    for i, (u, v) in enumerate(experiments._pairs(rng, g.n, args.pairs)):
        res = fpp.distance(g, u, v)
        rows.append((i, u, v, res.weight, res.hopcount))
    _emit(args.out, ["pair_id", "u", "v", "weight", "hopcount"], rows)
    return 0


def cmd_fpp_epidemic(args):
    g = _graph(args)
    grid = args.grid
    _emit(args.out, ["t", "I_n"], zip(grid, fpp.epidemic_curve(g, args.source, grid)))
    return 0


def cmd_fpp_collide(args):
    g = _graph(args)
    k = constants(args.rho)
    rng = stream(args.seed, "cli.collide")
    u, v = experiments._pairs(rng, g.n, 1)[0]
    u = args.u if args.u is not None else u
    v = args.v if args.v is not None else v
    tf = args.tfreeze if args.tfreeze is not None else fpp.default_t_freeze(k, g.n)
    horizon = args.horizon if args.horizon is not None else 10.0 / k.lam
    res = fpp.collision_connect(g, u, v, tf, horizon=horizon)
    rows = [(c.s, c.color_pair, c.remaining) for c in res.collisions
            if (args.all or not c.secondary) and c.s <= horizon]
    _emit(args.out, ["s", "color_pair", "remaining_lifetime"], rows)
    print(f"u={u} v={v} weight={res.weight:.17g} hopcount={res.hopcount} direct={res.direct}",
          file=sys.stderr)
    return 0


def cmd_bp_sample_w(args):
    W = cmbp.sample_W(args.rho, args.root, horizon=args.horizon, reps=args.reps,
                      seed=args.seed, start=args.start)
    _emit(args.out, ["rep", "W"], enumerate(W))
    return 0


def cmd_bp_diag(args):
    tr = cmbp.simulate(args.rho, args.root, at_splits=args.splits, seed=args.seed)
    rows = ((i + 1, tr.T[i], "RB"[tr.parent_type[i]], tr.d_R[i], tr.d_B[i], tr.S[i])
            for i in range(tr.splits))
    _emit(args.out, ["i", "T_i", "parent_type", "d_R", "d_B", "S_i"], rows)
    return 0


def cmd_mgf_solve(args):
    cfg = mgf.SolverConfig(theta_max=args.theta_max, grid_points=args.grid_points,
                           quad_nodes=args.quad_nodes)
    table = mgf.solve(constants(args.rho), cfg)
    _emit(args.out, ["theta", "M_R", "M_B"], zip(table.theta, table.M_R, table.M_B))
    print(f"iterations={len(table.history)} residual={table.residual:.3g}", file=sys.stderr)
    return 0


def cmd_mgf_fcurve(args):
    k = constants(args.rho)
    grid = args.grid
    x = x_of_t(k, grid)
    table = experiments.epidemic_table(k, float(x.max()) * 1.01)
    _emit(args.out, ["t", "x", "f"], zip(grid, x, mgf.f_curve(table, grid)))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="nwfpp", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a campaign from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("constants", help="print the model constants as JSON")
    c.add_argument("--rho", type=float, required=True)
    c.set_defaults(func=cmd_constants)

    def graph_args(q):
        q.add_argument("--n", type=int, required=True)
        q.add_argument("--rho", type=float, required=True)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", default=None)

    f = sub.add_parser("fpp", help="first passage percolation on one graph").add_subparsers(
        dest="fpp_command", required=True)
    fd = f.add_parser("distance")
    graph_args(fd)
    fd.add_argument("--pairs", type=int, default=10)
    fd.set_defaults(func=cmd_fpp_distance)
    fe = f.add_parser("epidemic")
    graph_args(fe)
    fe.add_argument("--source", type=int, default=0)
    fe.add_argument("--grid", type=parse_grid, required=True)
    fe.set_defaults(func=cmd_fpp_epidemic)
    fc = f.add_parser("collide")
    graph_args(fc)
    fc.add_argument("--u", type=int)
    fc.add_argument("--v", type=int)
    fc.add_argument("--tfreeze", type=float)
    fc.add_argument("--horizon", type=float)
    fc.add_argument("--all", action="store_true", help="include secondary collisions")
    fc.set_defaults(func=cmd_fpp_collide)

    b = sub.add_parser("bp", help="two-type branching process").add_subparsers(
        dest="bp_command", required=True)
    bs = b.add_parser("sample-w")
    bs.add_argument("--rho", type=float, required=True)
    bs.add_argument("--root", choices=["blue", "red"], default="blue")
    bs.add_argument("--horizon", type=float)
    bs.add_argument("--reps", type=int, default=1000)
    bs.add_argument("--seed", type=int, default=0)
    bs.add_argument("--start", choices=["split", "particle"], default="split")
    bs.add_argument("--out", default=None)
    bs.set_defaults(func=cmd_bp_sample_w)
    bd = b.add_parser("diag")
    bd.add_argument("--rho", type=float, required=True)
    bd.add_argument("--root", choices=["blue", "red"], default="blue")
    bd.add_argument("--splits", type=int, required=True)
    bd.add_argument("--seed", type=int, default=0)
    bd.add_argument("--out", default=None)
    bd.set_defaults(func=cmd_bp_diag)

    m = sub.add_parser("mgf", help="limit MGFs and the epidemic curve").add_subparsers(
        dest="mgf_command", required=True)
    ms = m.add_parser("solve")
    ms.add_argument("--rho", type=float, required=True)
    ms.add_argument("--theta-max", type=float, default=10.0)
    ms.add_argument("--grid-points", type=int, default=512)
    ms.add_argument("--quad-nodes", type=int, default=64)
    ms.add_argument("--out", default=None)
    ms.set_defaults(func=cmd_mgf_solve)
    mf = m.add_parser("fcurve")
    mf.add_argument("--rho", type=float, required=True)
    mf.add_argument("--grid", type=parse_grid, required=True)
    mf.add_argument("--out", default=None)
    mf.set_defaults(func=cmd_mgf_fcurve)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (experiments.ConfigError, nwgraph.InvalidConfig, ValueError, mgf.OutOfRange) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
