"""Command-line interface: ``empiricci {sample,estimate,ricci,converge,bounds,net}``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O failure,
4 numerical failure (kernel underflow, unreachable target).

Every subcommand accepts ``--config PATH`` naming a flat ``key=value`` file
whose keys are long option names (dashes or underscores). Command-line flags
override the file, which overrides built-in defaults.
"""

import argparse
import datetime
import json
import math
import sys
import warnings

import numpy as np

from . import bounds, geometry, harness, kernels
from .fields import parse_field
from .pointcloud import (
    Circle,
    CliffordTorus,
    Sphere,
    load_csv,
    parse_spec,
    quadrature_grid,
    sample_uniform,
    sample_weighted_circle,
    save_csv,
)
from .ricci import (
    LimitSchedule,
    ScheduleConfig,
    empirical_coarse_ricci,
    empirical_life_sized,
    ricci_limit_estimate,
    schedule_t,
)
from .validation import BandwidthError

EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 2, 3, 4


class UsageError(Exception):
    pass


def _vector(text):
    return np.array([float(v) for v in text.replace(",", ";").split(";")])


def _int_list(text):
    out = []
    for part in text.split(","):
        lo, sep, hi = part.partition("-")
        out.extend(range(int(lo), int(hi) + 1) if sep else [int(lo)])
    return out


def _float_list(text):
    return [float(v) for v in text.split(",")]


# -- parser -------------------------------------------------------------------


def _common(p, *, cloud=True, bandwidth=True):
    p.add_argument("--config", help="flat key=value file of defaults")
    p.add_argument("--spec", help="manifold, e.g. sphere:d=2,r=1 | circle:r=1 | torus:r1=1,r2=1")
    if cloud:
        p.add_argument("--cloud", help="read the sample from this CSV instead of sampling")
        p.add_argument("--n", type=int, help="sample size")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--grid", type=int, help="use a quadrature grid of this resolution")
    if bandwidth:
        p.add_argument("--t", type=float, help="fixed bandwidth")
        p.add_argument("--schedule", choices=["gamma", "gamma2", "weighted"], default="gamma2")
        p.add_argument("--sigma", type=float, default=0.5)
        p.add_argument("--dim", type=int, help="intrinsic dimension (default from --spec)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    p.add_argument("--no-timestamp", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="empiricci", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="write a point cloud CSV")
    _common(p, bandwidth=False)
    p.add_argument("--amplitude", type=float, help="circle density 1 + a cos(theta)")

    p = sub.add_parser("estimate", help="kernel operators at query points")
    _common(p)
    p.add_argument("--field", default="coord:0")
    p.add_argument("--field2", help="second field for the Carré du champ")
    p.add_argument("--query", action="append", help="query point 'x1;x2;...' (repeatable)")
    p.add_argument("--op", choices=["theta", "laplacian", "gamma", "gamma2", "all"], default="all")
    p.add_argument("--alpha", type=float, default=0.0)

    p = sub.add_parser("ricci", help="empirical coarse Ricci curvature")
    _common(p)
    p.add_argument("--x", help="base point")
    p.add_argument("--y", help="second point (pairwise mode)")
    p.add_argument("--direction", help="unit tangent at x (limit mode)")
    p.add_argument("--lambdas", default="0.5,0.35,0.25")
    p.add_argument("--coupling", choices=["fixed", "quadratic"], default="fixed")
    p.add_argument("--life-sized", action="store_true")

    p = sub.add_parser("converge", help="n-sweep against an analytic or quadrature reference")
    _common(p, cloud=False)
    p.add_argument("--ns", default="500,1000,2000,4000")
    p.add_argument("--seeds", default="0-9")
    p.add_argument("--field", default="coord:2")
    p.add_argument("--op", choices=list(harness.OPERATORS), default="gamma2")
    p.add_argument("--queries", type=int, default=10, help="number of fixed query points")
    p.add_argument("--query", action="append")
    p.add_argument("--alpha", type=float, default=0.0)
    p.set_defaults(format="csv")

    p = sub.add_parser("bounds", help="deviation probability q_t and covering numbers")
    _common(p, cloud=False)
    p.add_argument("--n", type=int, help="sample size")
    p.add_argument("--volume", type=float)
    p.add_argument("--reach", type=float)
    p.add_argument("--cd", type=float, help="dimensional covering constant (default 8^d)")
    p.add_argument("--class", dest="klass", choices=["F", "G", "H"], default="F")
    p.add_argument("--f-lip", type=float, default=1.0)
    p.add_argument("--h-lip", type=float, default=1.0)
    p.add_argument("--f-c1", type=float, default=1.0)
    p.add_argument("--h-c1", type=float, default=1.0)
    p.add_argument("--h-sup", type=float, default=1.0)
    p.add_argument("--eps", type=float, default=0.5)
    p.add_argument("--M", type=float, help="sup bound without the t^1/2 factor")
    p.add_argument("--invert", action="store_true", help="solve for the smallest n")
    p.add_argument("--delta", type=float, default=1e-3)
    p.set_defaults(t=0.1)

    p = sub.add_parser("net", help="greedy epsilon-net of a cloud")
    _common(p, bandwidth=False)
    p.add_argument("--eps", type=float, default=0.5)
    return parser


def _read_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            cfg = _read_config(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in cfg.items():
            key = "klass" if key == "class" else key
            if key not in known or key in ("config", "help"):
                raise UsageError(f"unknown config key {key!r}")
            if isinstance(known[key], (argparse._StoreTrueAction,)):
                defaults[key] = value.lower() in ("1", "true", "yes")
            elif isinstance(known[key], argparse._AppendAction):
                defaults[key] = [v for v in value.split() if v]
            else:
                defaults[key] = value
        sub.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return parser, args


# -- helpers ------------------------------------------------------------------


def _spec(args, required=True):
    if args.spec is None:
        if required:
            raise UsageError("--spec is required")
        return None
    try:
        return parse_spec(args.spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _load_cloud(args, default_grid=None):
    if args.cloud:
        return load_csv(args.cloud)
    spec = _spec(args)
    if args.grid is not None or (args.n is None and default_grid):
        return quadrature_grid(spec, args.grid or default_grid)
    if args.n is None:
        raise UsageError("one of --n, --grid or --cloud is required")
    return sample_uniform(spec, args.n, args.seed)


def _bandwidth(args, n, spec):
    if args.t is not None:
        return args.t
    dim = args.dim if args.dim is not None else (spec.intrinsic_dim if spec else None)
    if dim is None:
        raise UsageError("--t or --dim (or --spec) is required to set the bandwidth")
    return schedule_t(n, ScheduleConfig(d=dim, sigma=args.sigma, kind=args.schedule))


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report(args, payload):
    if not args.no_timestamp:
        payload["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _float_or_none(v):
    return None if v is None else float(v)


# -- commands -----------------------------------------------------------------


def cmd_sample(args):
    if args.cloud:
        raise UsageError("sample does not read --cloud")
    if args.out is None:
        raise UsageError("--out is required")
    spec = _spec(args)
    if args.grid is not None:
        cloud = quadrature_grid(spec, args.grid)
    elif args.n is None:
        raise UsageError("--n is required (or --grid)")
    elif args.amplitude is not None:
        if not isinstance(spec, Circle):
            raise UsageError("--amplitude needs a circle spec")
        cloud = sample_weighted_circle(spec.r, args.amplitude, args.n, args.seed)
    else:
        cloud = sample_uniform(spec, args.n, args.seed)
    save_csv(cloud, args.out)


def cmd_estimate(args):
    cloud = _load_cloud(args)
    spec = cloud.spec or _spec(args, required=False)
    t = _bandwidth(args, cloud.n, spec)
    if not args.query:
        raise UsageError("at least one --query is required")
    X = np.array([_vector(q) for q in args.query])
    if X.shape[1] != cloud.ambient_dim:
        raise UsageError(f"queries need {cloud.ambient_dim} coordinates")
    f = parse_field(args.field)
    h = parse_field(args.field2) if args.field2 else f
    ops = ["theta", "laplacian", "gamma", "gamma2"] if args.op == "all" else [args.op]
    values = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", kernels.SparseKernelWarning)
        for op in ops:
            if op == "theta":
                v = kernels.theta_alpha_hat(cloud, t, args.alpha, X)
            elif op == "laplacian":
                v = kernels.l_t_alpha_hat(cloud, t, args.alpha, f, X)
            elif op == "gamma":
                v = kernels.gamma_hat(cloud, t, f, h, X)
            else:
                v = kernels.gamma2_hat(cloud, t, f, X)
            values[op] = [float(a) for a in v]
        n_eff = [float(a) for a in kernels.effective_count(cloud, t, X)]
    _report(
        args,
        {
            "command": "estimate",
            "inputs": {
                "cloud": args.cloud,
                "spec": str(spec) if spec else None,
                "n": cloud.n,
                "seed": cloud.seed,
                "field": args.field,
                "field2": args.field2,
                "alpha": args.alpha,
                "queries": X.tolist(),
            },
            "t": t,
            "values": values,
            "n_eff": n_eff,
        },
    )


def _default_base(spec):
    if isinstance(spec, (Sphere, Circle)):
        x = np.zeros(spec.ambient_dim)
        x[0] = spec.r
        V = np.zeros(spec.ambient_dim)
        V[1] = 1.0
        return x, V
    if isinstance(spec, CliffordTorus):
        return np.array([spec.r1, 0.0, spec.r2, 0.0]), np.array([0.0, 1.0, 0.0, 0.0])
    raise UsageError("give --x and --direction for this manifold")


def cmd_ricci(args):
    cloud = _load_cloud(args, default_grid=60)
    spec = cloud.spec or _spec(args, required=False)
    if args.y is not None:
        if args.x is None:
            raise UsageError("pairwise mode needs --x and --y")
        x, y = _vector(args.x), _vector(args.y)
        t = _bandwidth(args, cloud.n, spec)
        same = bool(np.all(x == y))
        if same and args.life_sized:
            raise UsageError("life-sized curvature needs x != y")
        coarse = empirical_coarse_ricci(cloud, t, x, y).value
        payload = {"mode": "pairwise", "x": x.tolist(), "y": y.tolist(), "t": t, "coarse": coarse}
        if not same:
            life = empirical_life_sized(cloud, t, x, y).value
            d2 = float(np.sum((x - y) ** 2))
            payload["life_sized"] = life
            payload["homogeneity_residual"] = abs(life * d2 - coarse) / max(1.0, abs(coarse))
    else:
        if spec is None:
            raise UsageError("limit mode needs --spec or a cloud with a manifold header")
        x0, V0 = _default_base(spec) if (args.x is None or args.direction is None) else (None, None)
        x = _vector(args.x) if args.x else x0
        V = _vector(args.direction) if args.direction else V0
        sched = LimitSchedule(
            lambdas=_float_list(args.lambdas),
            t=args.t if args.t is not None else 0.005,
            coupling=args.coupling,
        )
        res = ricci_limit_estimate(cloud, spec, x, V, sched)
        payload = {
            "mode": "limit",
            "x": x.tolist(),
            "direction": V.tolist(),
            "sweep": [{"lambda": p.lam, "t": p.t, "value": p.value} for p in res.points],
            "limit": res.limit,
            "richardson": res.richardson,
            "true_ricci": geometry.true_ricci(spec, x, V),
        }
    payload.update(command="ricci", n=cloud.n, spec=str(spec) if spec else None)
    _report(args, payload)


def cmd_converge(args):
    spec = _spec(args)
    field = parse_field(args.field)
    queries = np.array([_vector(q) for q in args.query]) if args.query else None
    sched = None
    if args.t is None:
        dim = args.dim if args.dim is not None else spec.intrinsic_dim
        sched = ScheduleConfig(d=dim, sigma=args.sigma, kind=args.schedule)
    cfg = harness.ExperimentConfig(
        spec=spec,
        field=field,
        op=args.op,
        ns=_int_list(args.ns),
        seeds=_int_list(args.seeds),
        schedule=sched,
        t=args.t,
        queries=queries,
        n_queries=args.queries,
        alpha=args.alpha,
    )
    records = harness.run_converge(cfg)
    labels = {
        "spec": spec,
        "op": args.op,
        "field": args.field,
        "schedule": "fixed" if sched is None else sched.kind,
        "sigma": args.sigma if sched else "-",
        "t": args.t if sched is None else "-",
    }
    stamp = None if args.no_timestamp else datetime.datetime.now(datetime.timezone.utc).isoformat()
    if args.format == "json":
        payload = {
            "records": [r.__dict__ for r in records],
            "summary": {str(k): v for k, v in harness.summarize(records).items()},
            "labels": {k: str(v) for k, v in labels.items()},
        }
        if stamp:
            payload["timestamp"] = stamp
        _emit(args, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        _emit(args, harness.format_csv(records, labels, stamp))


def cmd_bounds(args):
    spec = _spec(args, required=False)
    if spec is not None:
        p = bounds.BoundParams.from_spec(spec, C_d=args.cd)
    else:
        if args.volume is None or args.reach is None or args.dim is None:
            raise UsageError("give --spec, or all of --volume --reach --dim")
        p = bounds.BoundParams(V=args.volume, tau=args.reach, d=args.dim, C_d=args.cd)
    desc = bounds.FunctionClass(
        args.klass,
        f_lip=args.f_lip,
        h_lip=args.h_lip,
        f_c1=args.f_c1,
        h_c1=args.h_c1,
        h_sup=args.h_sup,
    )
    if args.invert:
        t = args.t
        n = bounds.required_n(desc, p, args.eps, args.delta, t, M=args.M)
    else:
        if args.n is None:
            raise UsageError("--n is required (or --invert)")
        n = args.n
        t = args.t if args.schedule_given else schedule_t(
            n, ScheduleConfig(d=args.dim or p.d, sigma=args.sigma, kind=args.schedule)
        )
    consts = bounds.class_constants(desc, t)
    M = args.M if args.M is not None else consts.sup_bound / math.sqrt(t)
    payload = {
        "command": "bounds",
        "params": {"V": p.V, "tau": p.tau, "d": p.d, "C_d": p.C_d, "t0": p.t0},
        "class": args.klass,
        "eps": args.eps,
        "M": M,
        "n": n,
        "t": t,
        "t_below_t0": t < p.t0,
        "lambda0": p.lambda0,
        "C0": bounds.universal_c0(),
        "lipschitz": consts.lipschitz,
        "sup_bound": consts.sup_bound,
        "ambient_cover_eps": bounds.ambient_covering_bound(p, args.eps),
        "q_t": bounds.q_t(desc, p, args.eps, M, n, t),
        "log_q_t_uncapped": bounds.q_t(desc, p, args.eps, M, n, t, log=True),
    }
    if args.invert:
        payload["delta"] = args.delta
    _report(args, payload)


def cmd_net(args):
    cloud = _load_cloud(args)
    net = bounds.greedy_epsilon_net(cloud, args.eps)
    separated, covering = bounds.check_net(cloud, net, args.eps)
    if args.format == "csv":
        _emit(args, "index\n" + "".join(f"{i}\n" for i in net))
        return
    payload = {
        "command": "net",
        "n": cloud.n,
        "eps": args.eps,
        "size": int(net.size),
        "separated": separated,
        "covering": covering,
        "indices": [int(i) for i in net],
    }
    if cloud.spec is not None:
        payload["reach_bound"] = bounds.ambient_covering_bound(
            bounds.BoundParams.from_spec(cloud.spec), args.eps
        )
    _report(args, payload)


COMMANDS = {
    "sample": cmd_sample,
    "estimate": cmd_estimate,
    "ricci": cmd_ricci,
    "converge": cmd_converge,
    "bounds": cmd_bounds,
    "net": cmd_net,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser, args = parse_args(argv)
    except UsageError as exc:
        print(f"empiricci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.command == "bounds":
        args.schedule_given = "--schedule" not in argv
    try:
        COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"empiricci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BandwidthError as exc:
        print(f"empiricci: numerical error: {exc} (query index {exc.query_index})", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"empiricci: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"empiricci: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"empiricci: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
