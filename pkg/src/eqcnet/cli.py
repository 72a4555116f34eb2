"""Command-line front end: ``eqcnet {simulate,fit,analytic,transform,theta}``.

Every command writes one data file (``--out``, or standard output when
omitted).  Options may also come from ``--config FILE`` holding
``key = value`` lines named after the long options; explicit flags win.
"""

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation

from . import analytic, fitting, montecarlo, transform
from .datafiles import (ANALYTIC_COLUMNS, CURVE_COLUMNS, THETA_COLUMNS, TRANSFORM_COLUMNS,
                        code_version, column, read_table, render)
from .lattice import LatticeKind, generate
from .montecarlo import Mode, ScenarioSpec

DEFAULT_BASELINE = {
    transform.TransformKind.DOUBLE_HEX_TO_TRIANGLE: transform.TransformKind.DOUBLE_HEX_JOINT,
    transform.TransformKind.THIRD_DOUBLE_HEX_TO_SQUARE: transform.TransformKind.THIRD_DOUBLE_HEX_JOINT,
}


class UsageError(Exception):
    pass


def parse_range(text, kind=float):
    """``"a"``, ``"a,b,c"`` or ``"a..b[:step]"`` (inclusive) into a list of values.

    Ranges are stepped in decimal arithmetic so ``0.45..0.95:0.05`` hits
    every grid point exactly.  Integer ranges default to step 1, float
    ranges to step 0.05.
    """
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if ".." not in part:
            out.append(_number(part, kind))
            continue
        span, _, step = part.partition(":")
        lo, _, hi = span.partition("..")
        lo, hi = _decimal(lo), _decimal(hi)
        step = _decimal(step) if step else Decimal(1 if kind is int else "0.05")
        if step <= 0:
            raise UsageError(f"range step must be positive in {part!r}")
        if hi < lo:
            raise UsageError(f"empty range {part!r}")
        x = lo
        while x <= hi:
            out.append(_number(str(x), kind))
            x += step
    return out


def _decimal(text):
    try:
        return Decimal(text.strip())
    except InvalidOperation:
        raise UsageError(f"not a number: {text!r}") from None


def _number(text, kind):
    try:
        value = kind(Decimal(text)) if kind is float else int(Decimal(text))
    except (InvalidOperation, ValueError):
        raise UsageError(f"not a number: {text!r}") from None
    if kind is int and Decimal(text) != value:
        raise UsageError(f"not an integer: {text!r}")
    return value


def read_config(path):
    values = {}
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected key = value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _common(sub, seeded=True):
    sub.add_argument("--config", help="key = value file with option defaults")
    sub.add_argument("--out", help="output path (default: standard output)")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    if seeded:
        sub.add_argument("--extent", "-L", type=int, default=montecarlo.DEFAULT_EXTENT)
        sub.add_argument("--trials", type=int, default=montecarlo.DEFAULT_TRIALS)
        sub.add_argument("--seed", type=int, default=montecarlo.DEFAULT_SEED)
        sub.add_argument("--threads", type=int, default=1)


def build_parser():
    parser = argparse.ArgumentParser(prog="eqcnet", description="Exclusive quantum channels on percolated lattices.")
    parser.add_argument("--version", action="version", version=code_version())
    cmds = parser.add_subparsers(dest="command", required=True)

    sim = cmds.add_parser("simulate", help="Monte Carlo EQC over a (p, d) grid")
    sim.add_argument("--kind", required=True, choices=[k.value for k in LatticeKind])
    sim.add_argument("--mode", default="p2p", choices=[m.value for m in Mode])
    sim.add_argument("--p", required=True, help="value, list or range a..b[:step]")
    sim.add_argument("--d", default="10", help="value, list or range a..b[:step]")
    sim.add_argument("--k", type=int, default=1, help="nodes per multi-node party")
    sim.add_argument("--separation", type=int, default=6)
    _common(sim)

    fit = cmds.add_parser("fit", help="fit EQC = E0 + C0 exp(-gamma d) to a simulate file")
    fit.add_argument("curve", help="file written by simulate")
    fit.add_argument("--min-d", type=int, default=None)
    fit.add_argument("--max-d", type=int, default=None)
    _common(fit, seeded=False)

    ana = cmds.add_parser("analytic", help="closed-form long-distance EQC")
    ana.add_argument("--lattice", choices=sorted(analytic.INDICES), default=None)
    ana.add_argument("--b", type=int, default=None)
    ana.add_argument("--m", type=int, default=None)
    ana.add_argument("--alpha", type=float, default=None)
    ana.add_argument("--k", type=int, default=1)
    ana.add_argument("--p", default="0.6..1.0:0.05")
    ana.add_argument("--fit-against", help="p-sweep file from simulate; its means set alpha")
    _common(ana, seeded=False)

    tr = cmds.add_parser("transform", help="crossover scan of a lattice transformation")
    tr.add_argument("--kind", required=True, choices=[k.value for k in transform.TransformKind])
    tr.add_argument("--against", choices=[k.value for k in transform.TransformKind], default=None)
    tr.add_argument("--p", default="0.45..0.95:0.05")
    tr.add_argument("--d", type=int, default=10)
    _common(tr)

    th = cmds.add_parser("theta", help="largest-cluster fraction next to EQC")
    th.add_argument("--kind", required=True, choices=[k.value for k in LatticeKind])
    th.add_argument("--p", required=True)
    th.add_argument("--d", type=int, default=10)
    _common(th)
    return parser


def parse_args(argv):
    """Parse flags over config-file values over built-in defaults."""
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    command = next((a for a in argv if not a.startswith("-")), None)
    subs = parser._subparsers._group_actions[0].choices
    if known.config and command in subs:
        sub = subs[command]
        actions = {a.dest: a for a in sub._actions}
        values = read_config(known.config)
        unknown = sorted(set(values) - set(actions) - {"config"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        for key, text in values.items():
            action = actions[key]
            try:
                value = action.type(text) if action.type else text
            except ValueError:
                raise UsageError(f"config {key}: invalid value {text!r}") from None
            if action.choices is not None and value not in action.choices:
                raise UsageError(f"config {key}: invalid choice {value!r}")
            action.required = False
            action.default = value
    return parser.parse_args(argv)


def _meta(args, **extra):
    meta = {"command": args.command}
    meta.update(extra)
    if hasattr(args, "seed"):
        meta.update(seed=args.seed, trials=args.trials, L=args.extent)
    meta["version"] = code_version()
    return meta


def _emit(args, meta, columns, rows):
    text = render(args.format, meta, columns, rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return bool(args.out)


def _table(rows, columns):
    widths = [max(len(c), *(len(_fmt(r[c])) for r in rows)) for c in columns]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(_fmt(r[c]).rjust(w) for c, w in zip(columns, widths)) for r in rows]
    return "\n".join(lines)


def _fmt(v):
    return f"{v:.4f}" if isinstance(v, float) else str(v)


def cmd_simulate(args):
    ps, ds = parse_range(args.p), parse_range(args.d, int)
    if len(ps) > 1 and len(ds) > 1:
        raise UsageError("sweep either --p or --d, not both")
    axis = "p" if len(ps) > 1 else "d"
    graph = generate(args.kind, args.extent)
    rows = []
    for p in ps:
        for d in ds:
            scenario = ScenarioSpec(args.mode, d=d, k=args.k, separation=args.separation)
            est = montecarlo.estimate_eqc(graph, scenario, p, args.trials,
                                          montecarlo.point_seed(args.seed, p, d), args.threads)
            rows.append(dict(x=p if axis == "p" else d, mean=est.mean, std_error=est.std_error,
                             trials=est.trials, N1=est.normalizer))
    fixed = {"d": ds[0]} if axis == "p" else {"p": ps[0]}
    meta = _meta(args, kind=args.kind, mode=args.mode, k=args.k, separation=args.separation, x=axis, **fixed)
    if _emit(args, meta, CURVE_COLUMNS, rows):
        print(_table(rows, CURVE_COLUMNS))
    return 0


def _curve(path, axis):
    meta, rows = read_table(path)
    found = meta.get("x", axis)
    if found != axis:
        raise ValueError(f"{path}: expected a curve over {axis}, found one over {found}")
    return list(zip(column(rows, "x"), column(rows, "mean"), column(rows, "std_error")))


def cmd_fit(args):
    curve = [(d, m, s) for d, m, s in _curve(args.curve, "d")
             if (args.min_d is None or d >= args.min_d) and (args.max_d is None or d <= args.max_d)]
    res = fitting.fit_exponential(curve).to_dict()
    text = json.dumps(res, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(_table([res], ["E0", "C0", "gamma", "radius", "residual_rms"]))
    else:
        sys.stdout.write(text)
    return 0


def _index(args):
    base = analytic.INDICES[args.lattice] if args.lattice else None
    if base is None and (args.b is None or args.m is None):
        raise UsageError("give --lattice, or --b and --m")
    if base is None and args.alpha is None and not args.fit_against:
        raise UsageError("--alpha or --fit-against is required without --lattice")
    pick = lambda given, name, default: given if given is not None else getattr(base, name, default)
    return analytic.LatticeIndex(b=pick(args.b, "b", None), m=pick(args.m, "m", None),
                                 alpha=pick(args.alpha, "alpha", 0.0), p_min=pick(None, "p_min", 0.0))


def cmd_analytic(args):
    index = _index(args)
    meta = {}
    if args.fit_against:
        curve = [(p, m) for p, m, _ in _curve(args.fit_against, "p")]
        alpha = analytic.fit_alpha((index.b, index.m), curve)
        index = analytic.LatticeIndex(index.b, index.m, alpha, index.p_min)
        meta["fitted_alpha"] = repr(alpha)
        print(f"fitted alpha = {alpha:.6f}", file=sys.stderr)
    rows = [dict(p=p, e0=analytic.analytic_e0(index, p, args.k), extrapolated=analytic.is_extrapolated(index, p))
            for p in parse_range(args.p)]
    meta = {**_meta(args, b=index.b, m=index.m, alpha=repr(index.alpha), k=args.k), **meta}
    if _emit(args, meta, ANALYTIC_COLUMNS, rows):
        print(_table(rows, ANALYTIC_COLUMNS))
    return 0


def cmd_transform(args):
    kind = transform.TransformKind(args.kind)
    against = transform.TransformKind(args.against) if args.against else DEFAULT_BASELINE.get(kind)
    if against is None:
        raise UsageError(f"--against is required for {kind.value}")
    scenario = ScenarioSpec(Mode.POINT_TO_POINT, d=args.d)
    res = transform.crossover_scan(against, kind, parse_range(args.p), args.trials, args.seed,
                                   args.extent, scenario, args.threads)
    rows = [vars(r) for r in res.rows]
    brackets = ";".join(f"[{lo!r}, {hi!r}]" for lo, hi in res.crossings) or "none"
    meta = _meta(args, original=against.value, transformed=kind.value, d=args.d, crossings=brackets)
    _emit(args, meta, TRANSFORM_COLUMNS, rows)
    if res.crossings:
        print(f"crossing in {brackets}", file=sys.stderr if not args.out else sys.stdout)
    else:
        print("no crossing", file=sys.stderr if not args.out else sys.stdout)
    return 0


def cmd_theta(args):
    graph = generate(args.kind, args.extent)
    scenario = ScenarioSpec(Mode.POINT_TO_POINT, d=args.d)
    rows = []
    for p in parse_range(args.p):
        seed = montecarlo.point_seed(args.seed, p, args.d)
        th = montecarlo.estimate_theta(graph, p, args.trials, seed, args.threads)
        est = montecarlo.estimate_eqc(graph, scenario, p, args.trials, seed, args.threads)
        rows.append(dict(p=p, theta_p=th.theta_p, theta_std_error=th.std_error,
                         eqc=est.mean, eqc_std_error=est.std_error))
    if _emit(args, _meta(args, kind=args.kind, d=args.d), THETA_COLUMNS, rows):
        print(_table(rows, THETA_COLUMNS))
    return 0


COMMANDS = {"simulate": cmd_simulate, "fit": cmd_fit, "analytic": cmd_analytic,
            "transform": cmd_transform, "theta": cmd_theta}


def main(argv=None):
    try:
        args = parse_args(argv)
        for name in ("trials", "threads"):
            if getattr(args, name, 1) < 1:
                raise UsageError(f"--{name} must be >= 1")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"eqcnet: usage error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    except (ValueError, OSError, fitting.FitError, RuntimeError) as exc:
        print(f"eqcnet: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
