"""Command-line interface.

Exit codes: 0 success, 2 invalid configuration, 3 quadrature failure,
4 curvature fit failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from . import analytic, montecarlo
from .errors import ConvergenceError, FitError, InvalidSetupError
from .quadrature import DEFAULT_TOL, MAX_LEVEL
from .surfaces import Kind, NeedleSetup, Surface

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_QUADRATURE = 3
EXIT_FIT = 4

SWEEP_HEADER = ["ell", "probability", "prob_error", "deficit", "kappa_pointwise"]


class ConfigError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("BUFFON_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"BUFFON_SEED must be an integer, got {raw!r}") from None


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return "" if v is None else str(v)


def _surface(args) -> Surface:
    if args.surface == "sphere":
        if args.radius is None:
            raise ConfigError("sphere needs --radius")
        if not args.radius > 0:
            raise ConfigError("--radius must be positive")
        return Surface.sphere(args.radius)
    if args.radius is not None:
        raise ConfigError("--radius only applies to --surface sphere")
    return Surface.plane() if args.surface == "plane" else Surface.disk()


def _setup(args) -> NeedleSetup:
    surface = _surface(args)
    if surface.kind is Kind.SPHERE:
        if (args.n is None) == (args.ell is None):
            raise ConfigError("sphere needs exactly one of --n and --ell")
        if args.n is not None:
            return NeedleSetup.sphere(surface.radius, args.n)
        return NeedleSetup.sphere_from_ell(surface.radius, args.ell, args.allow_incommensurate)
    if args.n is not None:
        raise ConfigError("--n only applies to --surface sphere")
    if args.ell is None:
        raise ConfigError(f"{args.surface} needs --ell")
    return NeedleSetup(surface, args.ell)


def _params(setup: NeedleSetup) -> dict:
    params = {"ell": setup.half_length}
    if setup.surface.kind is Kind.SPHERE:
        params["radius"] = setup.surface.radius
        params["n"] = setup.sphere_index
    return params


def _grid(args, surface: Surface):
    if args.ell_max is None and args.levels is None:
        return analytic.default_grid(surface)
    if args.ell_max is None or args.levels is None:
        raise ConfigError("--ell-max and --levels go together")
    if args.levels < 2:
        raise ConfigError("--levels must be at least 2")
    return analytic.geometric_grid(surface, args.ell_max, args.levels)


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _seed(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if not 0 <= seed < 2**64:
        raise ConfigError("--seed must lie in [0, 2**64)")
    return seed


def cmd_probability(args) -> int:
    setup = _setup(args)
    seed = None
    if args.method == "analytic":
        est = analytic.probability(setup, args.tol, args.max_level)
    elif args.method == "oracle":
        est = analytic.probability_via_arclength(setup, args.tol, args.max_level)
    elif args.method == "series":
        est = analytic.ProbabilityEstimate(
            analytic.series_probability(setup.surface, setup.half_length), 0.0, "series"
        )
    else:
        if args.samples < 1:
            raise ConfigError("--samples must be at least 1")
        if not setup.commensurate:
            raise ConfigError("Monte Carlo needs a grating-legal sphere setup (ell = pi*r/(2n))")
        seed = _seed(args)
        est = montecarlo.estimate(setup, args.samples, seed, args.workers).to_estimate()
    record = {
        "surface": setup.surface.name,
        "params": _params(setup),
        "method": est.method,
        "value": est.value,
        "error": est.error,
        "detail": est.detail,
        "seed": seed,
    }
    if args.output == "json":
        _emit(args, _json(record))
    else:
        p = record["params"]
        header = ["surface", "ell", "radius", "n", "method", "value", "error", "detail", "seed"]
        row = [record["surface"], p["ell"], p.get("radius"), p.get("n"), est.method,
               est.value, est.error, est.detail, seed]
        _emit(args, _csv(header, [row]))
    return EXIT_OK


def cmd_deficit_sweep(args) -> int:
    surface = _surface(args)
    curve = analytic.deficit_curve(_grid(args, surface), args.tol, args.max_level)
    rows = []
    for ell, p, d in zip(curve.ells, curve.probs, curve.deficits):
        rows.append([ell, p.value, p.error, d, args.deficit_scale * d / ell**2])
    if args.output == "json":
        _emit(args, _json([dict(zip(SWEEP_HEADER, r)) for r in rows]))
    else:
        _emit(args, _csv(SWEEP_HEADER, rows))
    return EXIT_OK


def cmd_curvature(args) -> int:
    surface = _surface(args)
    est = analytic.curvature_estimate(
        surface, _grid(args, surface), args.tol, args.deficit_scale, args.max_level
    )
    curve = est.grid
    record = {
        "kappa_hat": est.kappa_hat,
        "coeff_a": est.coeff_a,
        "residual_rms": est.residual_rms,
        "grid": [
            {"ell": ell, "probability": p.value, "prob_error": p.error, "deficit": d}
            for ell, p, d in zip(curve.ells, curve.probs, curve.deficits)
        ],
    }
    _emit(args, _json(record))
    return EXIT_OK


def cmd_invariance(args) -> int:
    setup = _setup(args)
    if not setup.commensurate:
        raise ConfigError("Monte Carlo needs a grating-legal sphere setup (ell = pi*r/(2n))")
    if (args.offset is None) == (args.offset_period is None):
        raise ConfigError("give exactly one of --offset and --offset-period")
    if args.samples < 1:
        raise ConfigError("--samples must be at least 1")
    seed = _seed(args)
    shared = args.offset_period is not None
    d = args.offset if args.offset is not None else args.offset_period * setup.spacing
    base, moved = montecarlo.invariance_experiment(setup, d, args.samples, seed, shared, args.workers)

    def run(r):
        return {"hits": r.hits, "samples": r.samples, "estimate": r.estimate,
                "stderr": r.stderr, "seed": r.seed}

    record = {
        "surface": setup.surface.name,
        "params": _params(setup),
        "offset": d,
        "shared_seed": shared,
        "baseline": run(base),
        "shifted": run(moved),
        "z_statistic": montecarlo.z_statistic(base, moved),
    }
    _emit(args, _json(record))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="buffon",
        description="Buffon needle probabilities on the plane, the sphere and the Poincare disk.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--surface", choices=["plane", "sphere", "hyperbolic"], required=True)
    common.add_argument("--radius", type=float, help="sphere radius")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute quadrature tolerance")
    common.add_argument("--max-level", type=int, default=MAX_LEVEL,
                        help="cap on tanh-sinh step halvings (default %(default)s)")
    common.add_argument("--out", metavar="PATH", help="write to PATH instead of stdout")

    needle = argparse.ArgumentParser(add_help=False)
    needle.add_argument("--ell", type=float, help="needle half-length (grating spacing is 2*ell)")
    needle.add_argument("--n", type=int, help="sphere spacing index: ell = pi*r/(2n)")
    needle.add_argument("--allow-incommensurate", action="store_true",
                        help="accept a sphere ell that is not pi*r/(2n) (quadrature only)")

    mc = argparse.ArgumentParser(add_help=False)
    mc.add_argument("--samples", type=int, default=1_000_000)
    mc.add_argument("--seed", type=int, default=None, help="default: $BUFFON_SEED or 0")
    mc.add_argument("--workers", type=int, default=1)

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--ell-max", type=float)
    grid.add_argument("--levels", type=int)
    grid.add_argument("--deficit-scale", type=float, default=analytic.DEFICIT_SCALE,
                      help="factor turning deficit/ell^2 into curvature (default 9*pi/2)")

    p = sub.add_parser("probability", parents=[common, needle, mc], help="intersection probability")
    p.add_argument("--method", choices=["analytic", "series", "mc", "oracle"], default="analytic")
    p.add_argument("--output", choices=["json", "csv"], default="json")
    p.set_defaults(func=cmd_probability)

    p = sub.add_parser("deficit-sweep", parents=[common, grid], help="deficit table over an ell grid")
    p.add_argument("--output", choices=["json", "csv"], default="csv")
    p.set_defaults(func=cmd_deficit_sweep)

    p = sub.add_parser("curvature", parents=[common, grid], help="curvature from the deficit fit")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("invariance", parents=[common, needle, mc],
                       help="Monte Carlo with the drop window moved along the equator")
    p.add_argument("--offset", type=float, help="displacement along the equator")
    p.add_argument("--offset-period", type=float,
                   help="displacement in grating periods; both runs share the seed")
    p.set_defaults(func=cmd_invariance)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if hasattr(args, "workers") and args.workers < 1:
            raise ConfigError("--workers must be at least 1")
        if not args.tol > 0:
            raise ConfigError("--tol must be positive")
        if args.max_level < 1:
            raise ConfigError("--max-level must be at least 1")
        return args.func(args)
    except (ConfigError, InvalidSetupError, ValueError) as exc:
        print(f"buffon: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"buffon: quadrature failed: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    except FitError as exc:
        print(f"buffon: curvature fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT


if __name__ == "__main__":
    sys.exit(main())
