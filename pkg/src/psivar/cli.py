"""Command-line entry point: one subcommand per pipeline.

Every run echoes its resolved configuration to <output_dir>/run.json. All
randomness flows from --seed. Exit codes: 0 success, 2 validation error,
3 resource error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import arith, geodesics, rmt, wp_integrals, zeros
from .errors import ParameterError, ResourceError
from .tables import write_table

_DEFAULT_ALPHAS = [round(0.05 * k, 2) for k in range(1, 20)]


def _alpha_list(text: str):
    return [float(v) for v in text.split(",") if v.strip()]


def _series(label: str, limit: int, cache_dir):
    if label == "zeta":
        return arith.sieve_von_mangoldt(limit, cache_dir=cache_dir)
    if label == "delta":
        return arith.delta_coefficients(limit, cache_dir=cache_dir)
    raise ParameterError(f"unknown coefficient label {label!r}")


def _echo_config(args, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    (out_dir / "run.json").write_text(json.dumps(resolved, indent=1) + "\n")


def _cmd_wp_expect(args, out_dir):
    result = wp_integrals.wp_expectation(args.x, args.H, args.tail_eps)
    diag = wp_integrals.wp_diag_variance(args.x, args.H, args.tail_eps)
    ratio = result.value / args.H
    diag_ratio = diag.value / (2.0 * args.H * math.log(args.x))
    write_table(
        out_dir / "wp_scan.csv",
        ["x", "H", "expectation", "expectation_over_H", "diag",
         "diag_over_2HlogX", "tail_budget"],
        [[args.x, args.H, result.value, ratio, diag.value, diag_ratio,
          result.budget + diag.budget]],
        mirror_json=args.format == "json",
    )
    print(
        f"wp-expect x={args.x:g} H={args.H:g}: value={result.value!r}"
        f" value/H={ratio!r} main={result.main_term!r} budget={result.budget!r}"
    )
    return 0


def _cmd_wp_variance(args, out_dir):
    diag = wp_integrals.wp_diag_variance(args.x, args.H, args.tail_eps)
    expect = wp_integrals.wp_expectation(args.x, args.H, args.tail_eps)
    ratio = diag.value / (2.0 * args.H * math.log(args.x))
    write_table(
        out_dir / "wp_scan.csv",
        ["x", "H", "expectation", "expectation_over_H", "diag",
         "diag_over_2HlogX", "tail_budget"],
        [[args.x, args.H, expect.value, expect.value / args.H, diag.value,
          ratio, expect.budget + diag.budget]],
        mirror_json=args.format == "json",
    )
    print(
        f"wp-variance x={args.x:g} H={args.H:g}: value={diag.value!r}"
        f" value/(2HlogX)={ratio!r} main={diag.main_term!r} budget={diag.budget!r}"
    )
    return 0


def _cmd_prime_variance(args, out_dir):
    series = _series(args.label, args.limit, args.cache_dir)
    result = arith.empirical_variance(series, args.x_max, args.H, args.step)
    write_table(
        out_dir / "variance.csv",
        ["x_max", "H", "step", "mean", "variance", "samples"],
        [[result.x_max, result.H, result.step, result.mean, result.variance,
          result.samples]],
        mirror_json=args.format == "json",
    )
    scale = result.variance / (args.H * math.log(args.x_max / args.H))
    print(
        f"prime-variance {args.label} X={args.x_max:g} H={args.H:g}"
        f" step={args.step:g}: variance={result.variance!r}"
        f" variance/(H log(X/H))={scale!r} samples={result.samples}"
    )
    return 0


def _cmd_coeffs(args, out_dir):
    series = _series(args.label, args.limit, args.cache_dir)
    psi = arith.chebyshev_psi(series, series.limit)
    support = int(np.count_nonzero(series.values))
    print(
        f"coeffs {args.label} N={series.limit}: prime powers={support}"
        f" psi(N)={psi!r} cached under {args.cache_dir}"
    )
    return 0


def _cmd_formfactor(args, out_dir):
    zs = zeros.load_zeros(args.zeros, args.degree, args.complete_to)
    height = args.T if args.T is not None else zs.complete_up_to
    alphas = _alpha_list(args.alpha) if args.alpha else _DEFAULT_ALPHAS
    curve = zeros.form_factor_curve(zs, alphas, height)
    write_table(
        out_dir / "formfactor.csv",
        ["alpha", "X", "F", "N_T", "K"],
        [[a, x, f, curve.n_t, k] for a, x, f, k in curve.points],
        mirror_json=args.format == "json",
    )
    ks = ", ".join(f"K({a:g})={k:.4f}" for a, _, _, k in curve.points[:6])
    print(
        f"formfactor {Path(args.zeros).name} d={args.degree} T={height:g}"
        f" N(T)={curve.n_t}: {ks}{'...' if len(curve.points) > 6 else ''}"
    )
    return 0


def _cmd_explicit_formula(args, out_dir):
    zs = zeros.load_zeros(args.zeros, args.degree, args.complete_to)
    series = _series(args.label, args.limit, args.cache_dir)
    res = zeros.explicit_formula_residual(zs, series, args.x, args.t, args.sigma)
    gap = abs(res.lhs - res.rhs)
    print(
        f"explicit-formula {args.label} x={args.x:g} t={args.t:g}"
        f" sigma={args.sigma:g}: |lhs-rhs|={gap!r} budget={res.gap_budget!r}"
        f" within={'yes' if gap <= res.gap_budget else 'NO'}"
    )
    return 0


def _cmd_mv_check(args, out_dir):
    series = _series(args.label, args.limit, args.cache_dir)
    weights = arith.bn_weights(series, args.x, args.tail_eps)
    result = zeros.mv_meanvalue_check(weights, args.T, args.quad_step)
    dev = abs(result.integral - result.main)
    print(
        f"mv-check {args.label} x={args.x:g} T={args.T:g}: integral={result.integral!r}"
        f" main={result.main!r} |diff|={dev!r} bound={result.error_bound!r}"
        f" within={'yes' if dev <= result.error_bound else 'NO'}"
    )
    return 0


def _cmd_rmt(args, out_dir):
    spec = rmt.EnsembleSpec(args.kind, args.n, args.samples, args.seed)
    alphas = _alpha_list(args.alpha) if args.alpha else _DEFAULT_ALPHAS
    curve = rmt.ensemble_form_factor(spec, alphas, threads=args.threads)
    write_table(
        out_dir / "rmt_formfactor.csv",
        ["kind", "n", "samples", "alpha", "K", "stderr"],
        [[spec.kind, spec.dimension, spec.samples, a, k, s]
         for (a, _, _, k), s in zip(curve.points, curve.stderr)],
        mirror_json=args.format == "json",
    )
    slope = rmt.early_slope(curve, args.alpha_max)
    print(
        f"rmt {spec.kind} n={spec.dimension} samples={spec.samples}"
        f" seed={spec.seed}: early slope(alpha<={args.alpha_max:g}) = {slope!r}"
    )
    return 0


def _load_generator_file(path) -> geodesics.FuchsianGroup:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        values = [float(v) for v in text.replace(",", " ").split()]
        if len(values) != 4:
            raise ParameterError(
                f"{path}:{lineno}: expected 4 reals (row-major 2x2 matrix)"
            )
        rows.append(np.array(values).reshape(2, 2))
    if not rows:
        raise ParameterError(f"{path}: no generators found")
    return geodesics.FuchsianGroup(tuple(rows), (), 0)


def _cmd_geodesics(args, out_dir):
    if args.generators:
        group = _load_generator_file(args.generators)
    else:
        group = geodesics.bolza_group()
    spectrum = geodesics.enumerate_classes(group, args.W, args.l_max)
    names = "abcdefghijklmnopqrstuvwxyz"
    k = group.n_letters // 2

    def render(word):
        return "".join(
            names[letter] if letter < k else names[letter - k].upper()
            for letter in word
        )

    write_table(
        out_dir / "spectrum.csv",
        ["length", "trace", "primitive", "power", "multiplicity", "word"],
        [[c.length, c.trace, int(c.primitive), c.power,
          spectrum.multiplicity(c.length), render(c.word)]
         for c in spectrum.classes],
        mirror_json=args.format == "json",
    )
    systole = spectrum.systole()
    print(
        f"geodesics W={args.W} l_max={args.l_max:g}: classes={len(spectrum.classes)}"
        f" systole={systole!r} multiplicity={spectrum.multiplicity(systole)}"
        f" certified={spectrum.stability_certified}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="psivar",
        description="short-interval statistics for primes, geodesics, zeros,"
        " and random-matrix spectra",
    )
    parser.add_argument("--config", help="JSON file of default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--output-dir", default="out")
        p.add_argument("--cache-dir", default="cache")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("wp-expect", help="large-genus expected geodesic count")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--tail-eps", type=float, default=1e-9)
    common(p)
    p.set_defaults(func=_cmd_wp_expect)

    p = sub.add_parser("wp-variance", help="large-genus geodesic count variance")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--tail-eps", type=float, default=1e-9)
    common(p)
    p.set_defaults(func=_cmd_wp_variance)

    p = sub.add_parser("prime-variance", help="empirical short-interval variance")
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--H", type=float, required=True)
    p.add_argument("--step", type=float, default=1.0)
    p.add_argument("--label", choices=("zeta", "delta"), default="zeta")
    p.add_argument("--limit", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_prime_variance)

    p = sub.add_parser("coeffs", help="build or refresh a coefficient table")
    p.add_argument("--label", choices=("zeta", "delta"), required=True)
    p.add_argument("--limit", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_coeffs)

    p = sub.add_parser("formfactor", help="zero form factor K(alpha) curve")
    p.add_argument("--zeros", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--complete-to", type=float, required=True)
    p.add_argument("--alpha", help="comma list; default 0.05..0.95 step 0.05")
    p.add_argument("--T", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_formfactor)

    p = sub.add_parser("explicit-formula", help="Lorentzian explicit-formula check")
    p.add_argument("--zeros", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--complete-to", type=float, required=True)
    p.add_argument("--label", choices=("zeta", "delta"), default="delta")
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.5)
    common(p)
    p.set_defaults(func=_cmd_explicit_formula)

    p = sub.add_parser("mv-check", help="Montgomery-Vaughan mean value check")
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--quad-step", type=float, default=0.01)
    p.add_argument("--tail-eps", type=float, default=200.0)
    p.add_argument("--label", choices=("zeta", "delta"), default="zeta")
    p.add_argument("--limit", type=int, default=None)
    common(p)
    p.set_defaults(func=_cmd_mv_check)

    p = sub.add_parser("rmt", help="ensemble-averaged spectral form factor")
    p.add_argument("--kind", choices=("CUE", "COE", "GUE", "GOE", "Poisson"),
                   required=True)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--alpha", help="comma list; default 0.05..0.95 step 0.05")
    p.add_argument("--alpha-max", type=float, default=0.25)
    common(p)
    p.set_defaults(func=_cmd_rmt)

    p = sub.add_parser("geodesics", help="Fuchsian length spectrum")
    p.add_argument("--W", type=int, default=6)
    p.add_argument("--l-max", type=float, default=6.0)
    p.add_argument("--generators", help="file of 2x2 matrices, 4 reals per line")
    common(p)
    p.set_defaults(func=_cmd_geodesics)

    return parser


_DEFAULT_LIMITS = {
    "prime-variance": lambda a: int(a.x_max + a.H) + 1,
    "explicit-formula": lambda a: 10 ** 6,
    "mv-check": lambda a: max(int(64 * a.x), 10 ** 5),
    "coeffs": lambda a: a.limit,
}


def main(argv=None) -> int:
    parser = build_parser()
    args, _ = parser.parse_known_args(argv)
    if args.config:
        overrides = json.loads(Path(args.config).read_text())
        parser.set_defaults(**{k.replace("-", "_"): v for k, v in overrides.items()})
    args = parser.parse_args(argv)
    if getattr(args, "limit", 0) is None:
        args.limit = _DEFAULT_LIMITS[args.command](args)
    out_dir = Path(args.output_dir)
    try:
        _echo_config(args, out_dir)
        return args.func(args, out_dir)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
