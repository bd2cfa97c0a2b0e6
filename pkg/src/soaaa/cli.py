"""Command-line interface: ``soaaa fit|eval|morscore|generate``.

Exit codes
----------
0  success
2  input could not be parsed (bad CSV/JSON or arguments)
3  fit failed; the partial trace is still written when ``--report`` is given
4  evaluation hit a pole
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import io
from .algorithms import FitConfig, fit
from .datagen import gen_first_order, gen_second_order, linear_grid, log_grid, sample_frequency_response
from .errors import PoleHit, SingularShift, SoaaaError
from .metrics import EPS_MIN, morscore
from .statespace import eval_realization, to_realization

EXIT_OK, EXIT_PARSE, EXIT_FIT, EXIT_POLE = 0, 2, 3, 4

log = logging.getLogger("soaaa")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _fail(stage, exc, code):
    print(f"error during {stage}: {exc}", file=sys.stderr)
    return code


def _seed_comment(args):
    return None if args.seed_report is None else f"seed={args.seed_report}"


def cmd_fit(args):
    try:
        data = io.read_samples(args.input)
    except (OSError, io.ParseError) as exc:
        return _fail("parsing samples", exc, EXIT_PARSE)
    method = args.method
    try:
        config = FitConfig(kmax=args.kmax, tol=args.tol, c=args.sigma_real,
                           weighting=args.weighting, real_mode=args.real, method=method,
                           max_inner_iters=args.max_inner_iters, start=args.start,
                           drop_nonpositive=args.drop_nonpositive, keep_models=False)
    except ValueError as exc:
        return _fail("configuration", exc, EXIT_PARSE)
    try:
        model, trace = fit(data, config)
    except SoaaaError as exc:
        trace = getattr(exc, "partial_trace", None)
        if trace is not None and args.report:
            io.write_report(args.report, trace, realization_orders=args.real,
                            comment=_seed_comment(args))
        return _fail(f"fit ({method})", exc, EXIT_FIT)
    realization = to_realization(model) if model.order else None
    io.write_model(args.output, model, config, trace, realization)
    if args.report:
        io.write_report(args.report, trace, realization_orders=args.real,
                        comment=_seed_comment(args))
    last = trace.records[-1]
    print(f"method={method} order={model.order} realization_order={model.realization_order} "
          f"l2_rel={last.l2_rel:.3e} linf_rel={last.linf_rel:.3e} ptw_max={last.ptw_max:.3e}")
    return EXIT_OK


def parse_points(source):
    """Evaluation points from ``log:lo:hi:n``, ``lin:lo:hi:n`` or a CSV file.

    Grids lie on the imaginary axis. A CSV file needs ``freq_real`` and
    ``freq_imag`` columns.
    """
    if source is None:
        return np.zeros(0, complex)
    for prefix, grid in (("log:", log_grid), ("lin:", linear_grid)):
        if source.startswith(prefix):
            try:
                lo, hi, n = source[len(prefix):].split(":")
                n = int(n)
                return grid(float(lo), float(hi), n) if n else np.zeros(0, complex)
            except (ValueError, SoaaaError) as exc:
                raise io.ParseError(f"bad grid string {source!r}: {exc}") from exc
    if not os.path.exists(source):
        raise io.ParseError(f"points file {source!r} not found")
    with open(source, newline="") as fh:
        lines = [ln for ln in fh.read().splitlines()
                 if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        return np.zeros(0, complex)
    reader = csv.DictReader(lines)
    if not {"freq_real", "freq_imag"} <= set(reader.fieldnames or []):
        raise io.ParseError("points file needs freq_real and freq_imag columns")
    try:
        return np.array([complex(float(r["freq_real"]), float(r["freq_imag"])) for r in reader])
    except (TypeError, ValueError) as exc:
        raise io.ParseError(f"points file: {exc}") from exc


def cmd_eval(args):
    try:
        model, doc = io.read_model(args.model)
        points = parse_points(args.points)
    except (OSError, io.ParseError) as exc:
        return _fail("parsing", exc, EXIT_PARSE)
    real = None
    bary = None
    try:
        if args.via in ("barycentric", "both"):
            bary = model(points)
        if args.via in ("realization", "both"):
            r = io.realization_from_dict(doc) or to_realization(model)
            real = eval_realization(r, points) if points.size else np.zeros(0, complex)
    except (PoleHit, SingularShift) as exc:
        point = getattr(exc, "point", None)
        return _fail("evaluation", f"{exc}" + (f" (point {point})" if point is not None else ""),
                     EXIT_POLE)
    values = bary if bary is not None else real
    rows = [(s.real, s.imag, v.real, v.imag) for s, v in zip(points, values)]
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["s_real", "s_imag", "H_real", "H_imag"])
        for row in rows:
            w.writerow([repr(float(x)) for x in row])
    finally:
        if args.output:
            out.close()
    if args.via == "both":
        dev = float(np.max(np.abs(bary - real) / (1 + np.abs(bary)), initial=0.0))
        print(f"max deviation barycentric vs realization: {dev:.3e}", file=sys.stderr)
    return EXIT_OK


def cmd_morscore(args):
    rows = []
    for path in args.reports:
        try:
            rep = io.read_report(path)
        except (OSError, io.ParseError) as exc:
            return _fail("parsing reports", exc, EXIT_PARSE)
        if args.column not in rep:
            return _fail("parsing reports", f"{path}: no column {args.column!r}", EXIT_PARSE)
        name = os.path.splitext(os.path.basename(path))[0]
        try:
            score = morscore(rep["k"], rep[args.column], kmax=args.kmax, eps_min=args.eps_min)
        except (SoaaaError, ValueError) as exc:
            return _fail("morscore", f"{path}: {exc}", EXIT_PARSE)
        rows.append((name, score))
    width = max([len(n) for n, _ in rows] + [6])
    print(f"{'report':<{width}}  morscore")
    for name, score in rows:
        print(f"{name:<{width}}  {score:.4f}")
    return EXIT_OK


def cmd_generate(args):
    try:
        gen = gen_second_order if args.form == "second_order" else gen_first_order
        system = gen(args.order, seed=args.seed, freq_range=(args.fmin, args.fmax),
                     real=args.real_system)
        grid = log_grid if args.grid == "log" else linear_grid
        data = sample_frequency_response(system, grid(args.wmin, args.wmax, args.n),
                                         weighting=args.weighting)
    except (SoaaaError, ValueError) as exc:
        return _fail("generation", exc, EXIT_PARSE)
    io.write_samples(args.output, data)
    return EXIT_OK


def build_parser():
    p = _Parser(prog="soaaa", description=__doc__.splitlines()[0],
                formatter_class=argparse.RawDescriptionHelpFormatter,
                epilog="exit codes: 0 ok, 2 parse error, 3 fit failure, 4 pole hit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fit", help="fit a model to sampled data")
    f.add_argument("input", help="sample CSV")
    f.add_argument("--method", choices=["aaa", "aaa2", "so", "lso", "nso"], default="aaa")
    f.add_argument("--kmax", type=int, default=10)
    f.add_argument("--tol", type=float, default=0.0)
    f.add_argument("--weighting", choices=["data", "unit", "relative"], default="data")
    f.add_argument("--real", action="store_true", help="fit a model with a real realization")
    f.add_argument("--drop-nonpositive", action="store_true",
                   help="in real mode, drop samples with Im(mu) <= 0 instead of failing")
    f.add_argument("--sigma-real", type=float, default=-1e5,
                   help="real part of new quasi-support points")
    f.add_argument("--max-inner-iters", type=int, default=100)
    f.add_argument("--start", choices=["warm", "cold", "best"], default="cold",
                   help="starting point of the inner solver for so and nso")
    f.add_argument("--output", "-o", required=True, help="model JSON")
    f.add_argument("--report", help="per-iteration report CSV")
    f.add_argument("--seed-report", type=int, default=None, metavar="SEED",
                   help="seed of the generating run, recorded as a comment in the report")
    f.set_defaults(func=cmd_fit)

    e = sub.add_parser("eval", help="evaluate a model file")
    e.add_argument("model")
    e.add_argument("--points", help="log:lo:hi:n, lin:lo:hi:n or a CSV file")
    e.add_argument("--via", choices=["barycentric", "realization", "both"],
                   default="barycentric")
    e.add_argument("--output", "-o")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("morscore", help="MORscore of one or more reports")
    m.add_argument("reports", nargs="+")
    m.add_argument("--eps-min", type=float, default=EPS_MIN)
    m.add_argument("--kmax", type=float, default=None)
    m.add_argument("--column", default="l2_rel")
    m.set_defaults(func=cmd_morscore)

    g = sub.add_parser("generate", help="sample a random stable system")
    g.add_argument("--form", choices=["second_order", "first_order"], default="second_order")
    g.add_argument("--order", type=int, default=4)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--real-system", action=argparse.BooleanOptionalAction, default=True)
    g.add_argument("--fmin", type=float, default=1.0, help="lowest natural frequency")
    g.add_argument("--fmax", type=float, default=1e3, help="highest natural frequency")
    g.add_argument("--grid", choices=["log", "lin"], default="log")
    g.add_argument("--wmin", type=float, default=1e-1)
    g.add_argument("--wmax", type=float, default=1e4)
    g.add_argument("--n", type=int, default=200)
    g.add_argument("--weighting", choices=["unit", "relative"], default="unit")
    g.add_argument("--output", "-o", required=True)
    g.set_defaults(func=cmd_generate)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
