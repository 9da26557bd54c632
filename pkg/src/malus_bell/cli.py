"""Command-line front end: ``sweep``, ``chsh`` and ``analyze``.

Exit codes: 0 success (an inequality violation is a result, not an
error), 1 usage error, 2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import chsh as chsh_mod
from .fileio import (ParseError, curve_to_csv, group_correlations, open_text, read_events,
                     write_events, write_group_csv)
from .model import lhv_correlation, qm_correlation
from .montecarlo import (REPLICATE_STREAM, ExperimentConfig, Mode, analytic_curve,
                         draw_samples, outcomes_a, outcomes_b, point_stream, run_sweep)
from .svgplot import render_svg

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2

ANALYTIC = {"lhv-analytic": lhv_correlation, "qm-analytic": qm_correlation,
            "lhv": lhv_correlation, "qm": qm_correlation}
LABELS = {"lhv": "LHV Monte Carlo", "lhv-analytic": "LHV -cos(2d)/2",
          "qm-analytic": "QM -cos(2d)"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {s}")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {s}")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64): {s}")
    return v


def _angle(args, value):
    return math.radians(value) if args.degrees and value is not None else value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="malus-bell", description="Malus-law hidden polarization Bell experiment toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("sweep", help="correlation curve over Bob's setting at fixed alpha")
    s.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    s.add_argument("--alpha", type=_finite, help="Alice's setting (default 0)")
    s.add_argument("--beta-start", type=_finite, help="first beta (default 0)")
    s.add_argument("--beta-end", type=_finite, help="last beta, inclusive (default pi)")
    s.add_argument("--n-points", type=_positive_int, help="sweep points (default 1000)")
    s.add_argument("--n-pairs", type=_positive_int, help="photon pairs per point (default 100000)")
    s.add_argument("--seed", type=_seed, help="RNG seed (default 0)")
    s.add_argument("--mode", choices=[m.value for m in Mode],
                   help="replicate: one sample set for all points (default); independent: fresh per point")
    s.add_argument("--model", choices=["lhv", "lhv-analytic", "qm-analytic"], default="lhv")
    s.add_argument("--overlay", action="append", choices=["lhv-analytic", "qm-analytic"], default=[],
                   help="extra analytic curve in the SVG (repeatable)")
    s.add_argument("--out-csv", help="curve CSV path (default stdout)")
    s.add_argument("--out-svg", help="write an SVG plot")
    s.add_argument("--emit-events", metavar="PATH",
                   help="write every simulated outcome pair as an event file (lhv model only)")
    s.add_argument("--threads", type=_positive_int, default=1)
    s.add_argument("--degrees", action="store_true", help="angle flags are in degrees")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("chsh", help="CHSH statistic for given or optimized settings")
    c.add_argument("--model", choices=["lhv", "qm"], default="lhv")
    c.add_argument("-a", type=_finite, dest="a", help="Alice setting a")
    c.add_argument("-A", type=_finite, dest="a_prime", help="Alice setting a'")
    c.add_argument("-b", type=_finite, dest="b", help="Bob setting b")
    c.add_argument("-B", type=_finite, dest="b_prime", help="Bob setting b'")
    c.add_argument("--maximize", action="store_true", help="grid search for the largest |S|")
    c.add_argument("--grid", type=_positive_int, default=64, help="grid points per angle (>= 2)")
    c.add_argument("--n-pairs", type=_positive_int,
                   help="estimate correlations by simulating this many pairs per setting pair")
    c.add_argument("--seed", type=_seed, default=0)
    c.add_argument("--threads", type=_positive_int, default=1)
    c.add_argument("--degrees", action="store_true")
    c.set_defaults(func=cmd_chsh)

    an = sub.add_parser("analyze", help="correlations from a recorded event file")
    an.add_argument("input", help="event file: 'alpha beta x y' per line")
    an.add_argument("--out-csv", help="per-setting CSV path (default stdout)")
    an.set_defaults(func=cmd_analyze)
    return p


def _sweep_config(args) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        with open_text(args.config) as f:
            base = json.load(f)
        if not isinstance(base, dict):
            raise UsageError("config file must hold a JSON object")
    sweep = dict(base.pop("sweep", {}))
    for key in ("beta_start", "beta_end"):
        if getattr(args, key) is not None:
            sweep[key] = _angle(args, getattr(args, key))
    if args.n_points is not None:
        sweep["n_points"] = args.n_points
    if args.alpha is not None:
        base["alpha"] = _angle(args, args.alpha)
    for key in ("n_pairs", "seed", "mode"):
        if getattr(args, key) is not None:
            base[key] = getattr(args, key)
    base["sweep"] = sweep
    try:
        return ExperimentConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid configuration: {exc}") from None


def _write_events(path, config: ExperimentConfig) -> None:
    betas = config.sweep.betas()
    with open_text(path, "w") as f:
        f.write("# alpha beta x y\n")
        if config.mode is Mode.REPLICATE:
            samples = draw_samples(config.n_pairs, config.seed, REPLICATE_STREAM)
        for i, beta in enumerate(betas):
            if config.mode is Mode.INDEPENDENT:
                samples = draw_samples(config.n_pairs, config.seed, point_stream(i))
            write_events(f, config.alpha, beta, outcomes_a(samples, config.alpha), outcomes_b(samples, beta))


def cmd_sweep(args) -> int:
    config = _sweep_config(args)
    if args.emit_events and args.model != "lhv":
        raise UsageError("--emit-events requires --model lhv")
    if args.model == "lhv":
        curve = run_sweep(config, workers=args.threads)
    else:
        curve = analytic_curve(ANALYTIC[args.model], config.alpha, config.sweep.betas())

    text = curve_to_csv(curve)
    if args.out_csv:
        with open_text(args.out_csv, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)

    if args.out_svg:
        curves = [(LABELS[args.model], curve.beta, curve.corr)]
        for name in args.overlay:
            ref = analytic_curve(ANALYTIC[name], config.alpha, curve.beta)
            curves.append((LABELS[name], ref.beta, ref.corr))
        with open_text(args.out_svg, "w") as f:
            f.write(render_svg(curves, title=f"alpha = {config.alpha:.6g} rad"))
    if args.emit_events:
        _write_events(args.emit_events, config)

    if len(curve) >= 3:
        fit = chsh_mod.fit_cosine_amplitude(curve, config.alpha)
        print(f"amplitude={fit.amplitude:.6f} offset={fit.offset:.6f} rmse={fit.rmse:.6f}",
              file=sys.stderr if not args.out_csv else sys.stdout)
    return EXIT_OK


def format_chsh(result: chsh_mod.ChshResult, header: str) -> str:
    st = result.settings
    lines = [
        header,
        f"settings: a={st.a:.6f} a'={st.a_prime:.6f} b={st.b:.6f} b'={st.b_prime:.6f} (rad)",
        f"E(a,b)   = {result.e_ab:+.6f}",
        f"E(a,b')  = {result.e_ab_prime:+.6f}",
        f"E(a',b)  = {result.e_a_prime_b:+.6f}",
        f"E(a',b') = {result.e_a_prime_b_prime:+.6f}",
        f"S   = {result.s:+.6f}" + (f" +- {result.s_stderr:.6f}" if result.s_stderr is not None else ""),
        f"|S| = {result.abs_s:.6f}",
        "verdict: " + ("satisfies |S| <= 2" if result.satisfies_bound() else "violates |S| <= 2"),
    ]
    return "\n".join(lines)


def cmd_chsh(args) -> int:
    given = [args.a, args.a_prime, args.b, args.b_prime]
    if args.maximize:
        if any(v is not None for v in given):
            raise UsageError("--maximize cannot be combined with explicit settings")
        if args.n_pairs is not None:
            raise UsageError("--maximize searches the analytic correlation; drop --n-pairs")
        if args.grid < 2:
            raise UsageError("--grid must be >= 2")
        result = chsh_mod.max_abs_chsh(ANALYTIC[args.model], args.grid, workers=args.threads)
        header = f"model: {args.model} (analytic), grid search g={args.grid}"
    else:
        if any(v is None for v in given):
            raise UsageError("give all four settings -a -A -b -B, or --maximize")
        settings = chsh_mod.ChshSettings(*(_angle(args, v) for v in given))
        if args.n_pairs is not None:
            result = chsh_mod.empirical_chsh(args.model, settings, args.n_pairs, args.seed)
            header = f"model: {args.model} (simulated, {args.n_pairs} pairs per setting, seed {args.seed})"
        else:
            result = chsh_mod.chsh_statistic(ANALYTIC[args.model], settings)
            header = f"model: {args.model} (analytic)"
    print(format_chsh(result, header))
    return EXIT_OK


def cmd_analyze(args) -> int:
    with open_text(args.input) as f:
        groups = group_correlations(read_events(f))
    if args.out_csv:
        with open_text(args.out_csv, "w") as f:
            write_group_csv(groups, f)
    else:
        write_group_csv(groups, sys.stdout)

    alphas = sorted({k[0] for k in groups})
    betas = sorted({k[1] for k in groups})
    if len(alphas) == 2 and len(betas) == 2 and len(groups) == 4:
        (a, ap), (b, bp) = alphas, betas
        ests = [groups[(a, b)], groups[(a, bp)], groups[(ap, b)], groups[(ap, bp)]]
        es = [e.mean for e in ests]
        result = chsh_mod.ChshResult(
            chsh_mod.ChshSettings(a, ap, b, bp), *es, s=chsh_mod.combine(*es),
            s_stderr=math.sqrt(sum(e.stderr ** 2 for e in ests)),
        )
        out = sys.stdout if args.out_csv else sys.stderr
        print(format_chsh(result, "empirical CHSH (a < a', b < b')"), file=out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"malus-bell {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"malus-bell {args.command}: {getattr(args, 'input', '')}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (OSError, json.JSONDecodeError) as exc:
        print(f"malus-bell {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
