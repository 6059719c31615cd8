"""Command-line interface: ``occam {regress,coin,contingency,generate}``.

A ``--config FILE`` of ``key = value`` lines (keys are long flag names,
``#`` starts a comment) supplies defaults; flags given on the command line
win. Reports go to stdout, diagnostics to stderr. Output files are written
only after the whole computation succeeded.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import bernoulli_models as bm
from .basis import BasisFamily
from .datagen import (
    PRESETS,
    CoinPreset,
    GeneratorSpec,
    Ordering,
    RegressionPreset,
    dataset_to_csv,
    generate,
    generate_coin,
    load_csv,
)
from .gaussian_posterior import NoiseModel
from .selection import run_selection

DEFAULT_SIGMA = 0.1
DEFAULT_SIGMA_W = 10.0


class CliError(Exception):
    pass


def _write_atomic(path: str, text: str) -> None:
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent if str(target.parent) else ".", prefix=".occam-")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    cfg = read_config(args.config)
    actions = {a.dest: a for a in args.subparser._actions}
    for key, value in cfg.items():
        if key not in actions or key in ("config", "help", "subparser", "func"):
            raise CliError(f"unknown config key {key!r} for command {args.command}")
        if getattr(args, key) is not None:
            continue
        action = actions[key]
        conv = action.type or str
        try:
            setattr(args, key, conv(value))
        except (TypeError, ValueError) as exc:
            raise CliError(f"config key {key!r}: {exc}") from None


# -- regress -------------------------------------------------------------------


def cmd_regress(args) -> int:
    if not args.models:
        raise CliError("--models is required (e.g. --models poly:0..3)")
    if (args.preset is None) == (args.data is None):
        raise CliError("give exactly one of --preset or --data")
    fmt = args.format or "csv"
    if fmt not in ("csv", "json"):
        raise CliError(f"--format must be csv or json, got {fmt!r}")
    sigma, sigma_w = args.sigma, args.sigma_w
    if args.preset is not None:
        preset = PRESETS.get(args.preset)
        if not isinstance(preset, RegressionPreset):
            names = ", ".join(k for k, v in PRESETS.items() if isinstance(v, RegressionPreset))
            raise CliError(f"unknown regression preset {args.preset!r}; choose from {names}")
        seed = args.seed if args.seed is not None else 0
        data = generate(preset.spec(seed))
        source = f"preset={preset.name} seed={seed}"
        sigma = preset.sigma if sigma is None else sigma
        sigma_w = preset.sigma_w if sigma_w is None else sigma_w
    else:
        try:
            data = load_csv(args.data)
        except OSError as exc:
            raise CliError(f"cannot read {args.data}: {exc.strerror}") from None
        source = f"data={args.data}"
    sigma = DEFAULT_SIGMA if sigma is None else sigma
    sigma_w = DEFAULT_SIGMA_W if sigma_w is None else sigma_w
    noise = NoiseModel(sigma, sigma_w)
    traj = run_selection(args.models, data, noise)

    if args.out:
        _write_atomic(args.out, traj.to_csv() if fmt == "csv" else traj.to_json())
    print(f"# regress models={args.models} {source} sigma={sigma:g} sigma_w={sigma_w:g} n={traj.n_steps}")
    final = traj.step(traj.n_steps)
    final_le = traj.log_evidence[-1]
    print(f"{'model':<8} {'M':>3} {'log_evidence':>14} {'posterior':>12}")
    for label, dim, le, p in zip(traj.labels, traj.dims, final_le, final):
        print(f"{label:<8} {dim:>3} {le:>14.6f} {p:>12.6g}")
    print(f"winner: {traj.winner()}")
    return 0


# -- coin ----------------------------------------------------------------------


def parse_bits(text: str) -> np.ndarray:
    bits = []
    for pos, ch in enumerate(text):
        if ch.isspace():
            continue
        if ch not in "01":
            raise CliError(f"invalid bit {ch!r} at position {pos}")
        bits.append(1 if ch == "1" else 0)
    return np.array(bits, dtype=np.int8)


def cmd_coin(args) -> int:
    p0 = 0.5 if args.prior_fair is None else args.prior_fair
    if not 0.0 < p0 < 1.0:
        raise CliError("--prior-fair must be strictly between 0 and 1")
    prior_lo = math.log(p0) - math.log1p(-p0)
    sources = sum(x is not None for x in (args.bits, args.preset)) + (args.n is not None or args.k is not None)
    if sources != 1:
        raise CliError("give exactly one of --bits FILE, --preset NAME, or --n/--k")
    bits = None
    if args.bits is not None:
        text = sys.stdin.read() if args.bits == "-" else _read_text(args.bits)
        bits = parse_bits(text)
        label = f"bits={args.bits}"
    elif args.preset is not None:
        preset = PRESETS.get(args.preset)
        if not isinstance(preset, CoinPreset):
            raise CliError(f"unknown coin preset {args.preset!r}; choose from fig3-coin")
        seed = args.seed if args.seed is not None else 0
        bits = generate_coin(preset.p_heads, preset.n, seed)
        label = f"preset={preset.name} seed={seed}"
    else:
        if args.n is None or args.k is None:
            raise CliError("--n and --k must be given together")
        try:
            state = bm.CoinState(args.n, args.k)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        label = f"n={args.n} k={args.k}"
    if bits is not None:
        state = bm.CoinState.from_bits(bits)
    if args.trajectory:
        if bits is None:
            raise CliError("--trajectory needs the toss sequence (--bits or --preset)")
        path = bm.coin_trajectory(bits, prior_lo)
        lines = ["n,p_fair,p_bent,log_odds_fair"]
        for i, lo in enumerate(path, start=1):
            post = bm.CoinPosterior(float(lo))
            lines.append(f"{i},{post.p_fair:.17g},{post.p_bent:.17g},{lo:.17g}")
        _write_atomic(args.trajectory, "\n".join(lines) + "\n")
    post = bm.coin_posterior_batch(state, prior_lo)
    print(f"# coin {label} N={state.n_total} zeros={state.n_zeros} prior_fair={p0:g}")
    print(f"p_fair: {post.p_fair:.10g}")
    print(f"p_bent: {post.p_bent:.10g}")
    print(f"log_odds_fair: {post.log_odds_fair:.10g}")
    print(f"winner: {'H0 (fair)' if post.log_odds_fair >= 0 else 'H1 (bent)'}")
    return 0


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from None


# -- contingency ---------------------------------------------------------------


def parse_table(text: str) -> bm.ContingencyCounts:
    """Read ``cell,deaths,non_deaths`` rows (header optional) for all four cells."""
    cells: dict[str, tuple[int, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if lineno == 1 and parts[0].lower() == "cell":
            continue
        if len(parts) != 3:
            raise CliError(f"line {lineno}: expected cell,deaths,non_deaths")
        name = parts[0]
        if name not in bm.CELLS:
            raise CliError(f"line {lineno}: unknown cell {name!r}; expected one of {', '.join(bm.CELLS)}")
        if name in cells:
            raise CliError(f"line {lineno}: duplicate cell {name}")
        try:
            a, b = int(parts[1]), int(parts[2])
        except ValueError:
            raise CliError(f"line {lineno}: counts must be integers") from None
        if a < 0 or b < 0:
            raise CliError(f"line {lineno}: counts must be non-negative")
        cells[name] = (a, b)
    missing = [c for c in bm.CELLS if c not in cells]
    if missing:
        raise CliError(f"table is missing cell(s): {', '.join(missing)}")
    return bm.ContingencyCounts(**cells)


def cmd_contingency(args) -> int:
    method = args.method or "laplace"
    if method not in ("laplace", "exact"):
        raise CliError(f"--method must be laplace or exact, got {method!r}")
    if (args.dataset is None) == (args.table is None):
        raise CliError("give exactly one of --dataset NAME or --table FILE")
    if args.dataset is not None:
        if args.dataset not in bm.DATASETS:
            raise CliError(f"unknown dataset {args.dataset!r}; choose from {', '.join(bm.DATASETS)}")
        counts = bm.DATASETS[args.dataset]
        label = f"dataset={args.dataset}"
    else:
        counts = parse_table(_read_text(args.table))
        label = f"table={args.table}"
    post = bm.contingency_model_posterior(counts, method=method)
    print(f"# contingency {label} method={method} priors=uniform")
    print(f"{'hyp':<4} {'log_ev_laplace':>15} {'log_ev_exact':>13} {'posterior':>10}  map")
    notes = []
    for hyp, p in zip(bm.HYPOTHESES, post):
        lap = bm.contingency_laplace(counts, hyp)
        notes.extend(lap.notes)
        exact = bm.contingency_exact_log_evidence(counts, hyp)
        params = " ".join(
            f"{name}={th:.4f}" if not math.isnan(th) else f"{name}=undefined"
            for name, th in zip(hyp.parameter_names, lap.theta)
        )
        print(f"{hyp.name:<4} {lap.log_evidence:>15.6f} {exact:>13.6f} {p:>10.4f}  {params}")
    winner = bm.HYPOTHESES[int(np.argmax(post))].name
    print(f"winner: {winner}")
    for note in notes:
        print(f"note: {note}")
    return 0


# -- generate ------------------------------------------------------------------


def cmd_generate(args) -> int:
    seed = 0 if args.seed is None else args.seed
    if args.preset is not None:
        preset = PRESETS.get(args.preset)
        if preset is None:
            raise CliError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
        if isinstance(preset, CoinPreset):
            n = preset.n if args.n_points is None else args.n_points
            bits = generate_coin(preset.p_heads, n, seed)
            text = "".join(str(int(b)) for b in bits) + "\n"
        else:
            spec = preset.spec(seed)
            if args.n_points is not None:
                spec = GeneratorSpec(**{**spec.__dict__, "n_points": args.n_points})
            if args.noise_sigma is not None:
                spec = GeneratorSpec(**{**spec.__dict__, "noise_sigma": args.noise_sigma})
            text = dataset_to_csv(generate(spec))
    else:
        if args.family is None or args.weights is None:
            raise CliError("without --preset, --family and --weights are required")
        try:
            family = BasisFamily.from_label(args.family)
            weights = tuple(float(w) for w in args.weights.split(","))
            lo, hi = (float(v) for v in (args.x_range or "0,1").split(","))
            spec = GeneratorSpec(
                family,
                weights,
                noise_sigma=0.1 if args.noise_sigma is None else args.noise_sigma,
                x_range=(lo, hi),
                n_points=50 if args.n_points is None else args.n_points,
                seed=seed,
                ordering=Ordering(args.ordering or "sorted"),
                x_sampling=args.sampling or "equispaced",
            )
        except ValueError as exc:
            raise CliError(str(exc)) from None
        text = dataset_to_csv(generate(spec))
    if args.out:
        _write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser --------------------------------------------------------------------


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64), got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="occam", description="Bayesian model selection with Occam factors.")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("regress", help="model selection over basis-function regressions")
    r.add_argument("--models", help="hypothesis set, e.g. poly:0..3,trig:1..3")
    r.add_argument("--preset", help="generate data from a named scenario (fig4, fig5, fig6)")
    r.add_argument("--data", help="CSV file of x,t rows")
    r.add_argument("--sigma", type=float, help=f"observation noise std (default {DEFAULT_SIGMA})")
    r.add_argument("--sigma-w", dest="sigma_w", type=float, help=f"prior weight std (default {DEFAULT_SIGMA_W})")
    r.add_argument("--seed", type=_u64)
    r.add_argument("--out", help="trajectory output file")
    r.add_argument("--format", choices=("csv", "json"))
    r.set_defaults(func=cmd_regress)

    c = sub.add_parser("coin", help="fair vs bent coin")
    c.add_argument("--bits", help="file of 0/1 characters ('-' for stdin)")
    c.add_argument("--n", type=int, help="number of tosses")
    c.add_argument("--k", type=int, help="number of zeros (heads)")
    c.add_argument("--preset", help="fig3-coin")
    c.add_argument("--seed", type=_u64)
    c.add_argument("--prior-fair", dest="prior_fair", type=float, help="prior probability of the fair coin")
    c.add_argument("--trajectory", help="write per-toss posterior CSV here")
    c.set_defaults(func=cmd_coin)

    t = sub.add_parser("contingency", help="four-hypothesis contingency analysis")
    t.add_argument("--dataset", help="built-in dataset (mackay-28.4)")
    t.add_argument("--table", help="CSV of cell,deaths,non_deaths")
    t.add_argument("--method", choices=("laplace", "exact"))
    t.set_defaults(func=cmd_contingency)

    g = sub.add_parser("generate", help="write synthetic data")
    g.add_argument("--preset")
    g.add_argument("--family", help="model label of the generator, e.g. Poly2 or Trig3")
    g.add_argument("--weights", help="comma-separated weights")
    g.add_argument("--noise-sigma", dest="noise_sigma", type=float)
    g.add_argument("--x-range", dest="x_range", help="lo,hi")
    g.add_argument("--n-points", dest="n_points", type=int)
    g.add_argument("--ordering", choices=("sorted", "random"))
    g.add_argument("--sampling", choices=("equispaced", "uniform"))
    g.add_argument("--seed", type=_u64)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    for sp in (r, c, t, g):
        sp.add_argument("--config", help="key = value defaults file")
        sp.set_defaults(subparser=sp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(args)
        return args.func(args)
    except (CliError, ValueError) as exc:
        print(f"occam {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
