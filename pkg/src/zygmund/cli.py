"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage/config/I-O error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
import warnings
from pathlib import Path

from . import bounds, experiment, filters, kernels
from .class_error import CSV_HEADER, ClassSpec, error_bracket
from .errors import ConfigError, NumericalFailure
from .psi import WeightedProduct, parse_family, sequence_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


def _cmd_classify(args) -> int:
    fam = parse_family(args.family)
    for label, delta in ((f"g_{{1/p}} (delta={1 / args.p:g})", 1 / args.p),
                         (f"g_{{s+1/p}} (delta={args.s + 1 / args.p:g})", args.s + 1 / args.p)):
        rep = sequence_report(WeightedProduct(fam, delta), N=args.N)
        print(f"{label}:")
        print(f"  alpha in [{rep.alpha_inf:.6g}, {rep.alpha_sup:.6g}] over t in "
              f"[{rep.grid[0]:g}, {rep.grid[1]:g}] ({rep.grid[2]} points), trend {rep.alpha_trend}")
        print(f"  convex: {rep.convex_ok}")
        print(f"  GM+ A = {rep.gm_plus_A:.6g} ({'stable' if rep.gm_plus_stable else 'growing'} up to N={args.N})")
        ga = ", ".join(f"eps={e:g}: {k:.4g}" for e, k in rep.ga_plus)
        print(f"  GA+ constants: {ga} ({'stable' if rep.ga_plus_stable else 'growing'})")
    print(bounds.conditions_report(ClassSpec(fam, 0.0, args.p, args.s), N=args.N).text())
    return EXIT_OK


def _cmd_kernel(args) -> int:
    fam = parse_family(args.family)
    spec = kernels.KernelSpec(fam, args.beta, args.n)
    M = args.samples
    if M < 2:
        raise ConfigError("--samples must be at least 2")
    vals, err = kernels.sample_tail(spec, M, max(4 * M, 1024))
    t = filters.grid(M)
    q = math.inf if args.p == 1 else args.p / (args.p - 1)
    ctrl = kernels.tail_control(fam, max(4 * M, 1024), q)
    if args.out:
        kernels.write_samples(args.out, spec, t, vals, ctrl)
        print(f"wrote {M} samples to {args.out} (max remainder bound {max(err):.3g})")
    else:
        print(f"# {fam.descriptor} beta={args.beta!r} n={args.n} tail_control={ctrl!r}")
        for ti, vi in zip(t.tolist(), vals.tolist()):
            print(f"{ti!r} {vi!r}")
    return EXIT_OK


def _cmd_error(args) -> int:
    spec = ClassSpec(parse_family(args.family), args.beta, args.p, args.s, args.filter)
    br = error_bracket(spec, args.n, args.tol, keep_witness=False)
    print(CSV_HEADER)
    print(br.csv_row())
    return EXIT_OK


def _load(args) -> experiment.ExperimentConfig:
    cfg = experiment.load_config(args.config)
    if args.out:
        out = Path(args.out)
        cfg = experiment.ExperimentConfig(cfg.specs, out / "csv", out / "plot", cfg.workers)
    return cfg


def _run(args, verify: bool) -> int:
    cfg = _load(args)
    workers = args.workers or cfg.workers
    if verify:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", UserWarning)
            ok, reports = experiment.verify(cfg, workers)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    else:
        reports, ok = experiment.run_sweep(cfg, workers), True
    try:
        written = experiment.emit_outputs(reports, cfg.csv_dir, cfg.plot_dir)
    except OSError as exc:
        print(f"error: cannot write outputs: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if reports:
        print(experiment.summary_table(reports))
    if args.show_conditions:
        for rep in reports:
            print(rep.conditions)
    if written:
        print(f"wrote {len(written)} files")
    if verify:
        print("verification " + ("passed" if ok else "FAILED"))
        return EXIT_OK if ok else EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zygmund",
                                 description="Class errors of Zygmund means and their order estimates.")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="alpha, GM+ and GA+ diagnostics of a weight family")
    c.add_argument("family", help="descriptor, e.g. power:r=0.9 or powerlog:p=2,gamma=1.2,K=4")
    c.add_argument("--p", type=float, default=2.0)
    c.add_argument("--s", type=float, default=1.0)
    c.add_argument("--N", type=int, default=4096, help="sequence length for GM+/GA+")
    c.set_defaults(func=_cmd_classify)

    k = sub.add_parser("kernel", help="sample the kernel tail on a uniform grid")
    k.add_argument("family")
    k.add_argument("--beta", type=float, default=0.0)
    k.add_argument("--n", type=int, default=1, help="first harmonic of the tail")
    k.add_argument("--samples", type=int, default=256)
    k.add_argument("--p", type=float, default=1.0, help="exponent used for the tail control")
    k.add_argument("--out", help="write samples here instead of stdout")
    k.set_defaults(func=_cmd_kernel)

    e = sub.add_parser("error", help="class-error bracket for one n")
    e.add_argument("family")
    e.add_argument("--p", type=float, default=2.0)
    e.add_argument("--beta", type=float, default=0.0)
    e.add_argument("--s", type=float, default=1.0)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--tol", type=float, default=1e-6)
    e.add_argument("--filter", default="zygmund", choices=("zygmund", "fejer", "fourier"))
    e.set_defaults(func=_cmd_error)

    for name, verify in (("sweep", False), ("verify", True)):
        s = sub.add_parser(name, help="run a config" + (" and check verdicts" if verify else ""))
        s.add_argument("config")
        s.add_argument("--workers", type=int, default=None,
                       help=f"worker processes (default: config, then ${experiment.WORKERS_ENV})")
        s.add_argument("--out", help="output directory (csv/ and plot/ are created inside)")
        s.add_argument("--show-conditions", action="store_true")
        s.set_defaults(func=lambda a, v=verify: _run(a, v))
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
