"""Command line interface.

Subcommands reproduce the package's headline quantities as CSV/JSON
data files (plus optional matplotlib PNGs rendered next to them):

  dist         outcome probability distribution over a grid of n_m
  coherence    distribution plus conditional coherence, optionally
               normalized at a reference outcome
  correlation  quantization/coherence anticorrelation vs resolution
  trajectory   repeated-measurement Monte-Carlo ensembles
  verify       cross-module consistency checks

Numbers are serialized with 15 significant digits and a ``.`` decimal
separator. Every command is a pure function of its parameters
(seed included): identical inputs produce byte-identical data files.
Exit codes: 0 success, 1 bad arguments or config, 2 numerical or
verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import closed_form, verify
from .correlation import resolution_sweep
from .errors import FockPovmError, NegligibleOutcome
from .fock import TruncationConfig, default_dim, make_coherent_state
from .measurement import (
    DENSITY_FLOOR,
    GRID_MAX_STEP,
    GRID_POINTS_PER_SIGMA,
    GRID_SIGMA_SPAN,
    OutcomeGrid,
    coherence_numerator_grid,
    default_grid,
    outcome_density_grid,
)
from .trajectory import TrajectoryConfig, collapse_chi_square, ensemble_stats

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class UsageError(Exception):
    """Bad command-line arguments or config-file contents."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; remap to the usage exit code.
    def error(self, message):
        raise UsageError(message)


def fmt(value: float) -> str:
    """15 significant digits, locale independent."""
    return format(float(value), ".15g")


def _json_num(value: float) -> float:
    return float(fmt(value))


def _load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"config file {path} must hold a JSON object of flat keys")
    merged = {str(key).replace("-", "_"): value for key, value in data.items()}
    # "alpha_re" is an accepted alias for the --alpha flag.
    if "alpha_re" in merged:
        merged.setdefault("alpha", merged.pop("alpha_re"))
    return merged


class _Params:
    """Merged view of CLI flags over config-file values; flags win."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        config_path = getattr(args, "config", None)
        self.config = _load_config(config_path) if config_path else {}

    def raw(self, name, default=None):
        value = getattr(self.args, name, None)
        if value is None:
            value = self.config.get(name, default)
        return value

    def floatval(self, name, default=None, required=False) -> float | None:
        value = self.raw(name, default)
        if value is None:
            if required:
                raise UsageError(f"missing required parameter --{name.replace('_', '-')}")
            return None
        try:
            value = float(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"--{name.replace('_', '-')} must be a number, got {value!r}") from exc
        if not math.isfinite(value):
            raise UsageError(f"--{name.replace('_', '-')} must be finite, got {value!r}")
        return value

    def positive(self, name, default=None, required=False) -> float | None:
        value = self.floatval(name, default, required)
        if value is not None and value <= 0.0:
            raise UsageError(f"--{name.replace('_', '-')} must be > 0, got {value!r}")
        return value

    def intval(self, name, default=None, required=False, minimum=None) -> int | None:
        value = self.raw(name, default)
        if value is None:
            if required:
                raise UsageError(f"missing required parameter --{name.replace('_', '-')}")
            return None
        try:
            as_int = int(value)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"--{name.replace('_', '-')} must be an integer, got {value!r}") from exc
        if minimum is not None and as_int < minimum:
            raise UsageError(f"--{name.replace('_', '-')} must be >= {minimum}, got {as_int}")
        return as_int

    def alpha(self) -> complex:
        re = self.floatval("alpha", required=True)
        im = self.floatval("alpha_im", default=0.0)
        return complex(re, im)

    def choice(self, name, choices, default):
        value = self.raw(name, default)
        if value not in choices:
            raise UsageError(f"--{name.replace('_', '-')} must be one of {choices}, got {value!r}")
        return value

    def outpath(self, default: str) -> str:
        return str(self.raw("out", default))

    def plotpath(self, out: str) -> str | None:
        value = self.raw("plot")
        if value is None:
            return None
        if value == "":
            return os.path.splitext(out)[0] + ".png"
        return str(value)

    def grid(self, dim: int, dn: float) -> OutcomeGrid:
        """Outcome grid from --lo/--hi/--step, defaulting to the standard geometry."""
        lo = self.floatval("lo")
        hi = self.floatval("hi")
        step = self.floatval("step")
        if lo is None and hi is None and step is None:
            return default_grid(dim, dn)
        if lo is None:
            lo = -GRID_SIGMA_SPAN * dn
        if hi is None:
            hi = (dim - 1) + GRID_SIGMA_SPAN * dn
        if not lo < hi:
            raise UsageError(f"grid bounds must satisfy lo < hi, got [{lo}, {hi}]")
        if step is None:
            target = min(dn / GRID_POINTS_PER_SIGMA, GRID_MAX_STEP)
            segments = max(1, math.ceil((hi - lo) / target - 1e-9))
            step = (hi - lo) / segments
        elif step <= 0.0:
            raise UsageError(f"--step must be > 0, got {step!r}")
        try:
            return OutcomeGrid(lo=lo, hi=hi, step=step)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _worker_cap(shots: int) -> int:
    env = os.environ.get("FOCKPOVM_THREADS")
    if env is None:
        return 1
    try:
        cap = int(env)
    except ValueError as exc:
        raise UsageError(f"FOCKPOVM_THREADS must be an integer, got {env!r}") from exc
    return max(1, min(cap, shots))


def _distribution_columns(params: _Params):
    """Shared setup of the dist/coherence commands: grid, density, coherence product."""
    alpha = params.alpha()
    dn = params.positive("dn", required=True)
    dim = params.intval("dim", default=default_dim(alpha), minimum=1)
    method = params.choice("method", ("closed", "operator"), default="closed")
    grid = params.grid(dim, dn)
    x = grid.points
    if method == "operator":
        rho = make_coherent_state(alpha, TruncationConfig(dim))
        density = outcome_density_grid(rho, dn, x)
        numer = coherence_numerator_grid(rho, dn, x)
        safe = np.where(density > DENSITY_FLOOR, density, 1.0)
        coherence = np.where(density > DENSITY_FLOOR, numer / safe, 0.0 + 0.0j)
    else:
        density = closed_form.coherent_outcome_density(alpha, dn, x)
        coherence = closed_form.coherent_post_coherence(alpha, dn, x)
    return alpha, dn, method, grid, x, density, coherence


def cmd_dist(args: argparse.Namespace) -> int:
    params = _Params(args)
    _, _, method, grid, x, density, _ = _distribution_columns(params)
    out = params.outpath("dist.csv")
    _write_csv(out, ["n_m", "P"], ([fmt(xi), fmt(pi)] for xi, pi in zip(x, density)))
    integral = float(np.dot(grid.weights, density))
    print(f"wrote {x.size} rows to {out} (method={method}, trapezoid integral of P = {integral:.9f})")
    plot = params.plotpath(out)
    if plot:
        from . import plotting

        plotting.save_distribution(x, density, plot)
        print(f"rendered {plot}")
    return EXIT_OK


def cmd_coherence(args: argparse.Namespace) -> int:
    params = _Params(args)
    _, _, method, grid, x, density, coherence = _distribution_columns(params)
    normalize_at = params.floatval("normalize_at")
    header = ["n_m", "P", "re_a_f", "im_a_f"]
    columns = [x, density, coherence.real, coherence.imag]
    if normalize_at is not None:
        matches = np.nonzero(np.abs(x - normalize_at) <= 1e-9)[0]
        if matches.size == 0:
            raise UsageError(f"--normalize-at {normalize_at!r} is not a grid point")
        ref = int(matches[0])
        if density[ref] <= DENSITY_FLOOR:
            raise NegligibleOutcome(f"density at n_m={normalize_at} is below {DENSITY_FLOOR:.0e}")
        if coherence[ref] == 0.0:
            raise NegligibleOutcome(f"coherence at n_m={normalize_at} vanishes; cannot normalize")
        header += ["P_norm", "a_f_norm"]
        columns += [density / density[ref], (coherence / coherence[ref]).real]
    out = params.outpath("coherence.csv")
    rows = ([fmt(col[i]) for col in columns] for i in range(x.size))
    _write_csv(out, header, rows)
    print(f"wrote {x.size} rows to {out} (method={method}, columns: {','.join(header)})")
    plot = params.plotpath(out)
    if plot:
        from . import plotting

        plotting.save_coherence(x, density, coherence.real, coherence.imag, plot)
        print(f"rendered {plot}")
    return EXIT_OK


def cmd_correlation(args: argparse.Namespace) -> int:
    params = _Params(args)
    alpha = params.alpha()
    if alpha == 0.0:
        raise UsageError("--alpha must be nonzero: columns are normalized by alpha")
    dn_min = params.positive("dn_min", required=True)
    dn_max = params.positive("dn_max", required=True)
    if not dn_min < dn_max:
        raise UsageError(f"--dn-min must be < --dn-max, got {dn_min} >= {dn_max}")
    steps = params.intval("steps", required=True, minimum=2)
    out = params.outpath("correlation.csv")

    dns = np.linspace(dn_min, dn_max, steps)
    rho = make_coherent_state(alpha)
    reports = resolution_sweep(rho, dns)
    neg_numeric = np.array([-(r.c / alpha).real for r in reports])
    neg_closed = np.array([-(closed_form.correlation_closed(alpha, dn) / alpha).real for dn in dns])

    rows = (
        [fmt(dn), fmt(r.avg_q), fmt(r.avg_a.real), fmt(num), fmt(cl)]
        for dn, r, num, cl in zip(dns, reports, neg_numeric, neg_closed)
    )
    _write_csv(
        out,
        ["dn", "avg_q", "re_avg_a", "neg_c_over_alpha_numeric", "neg_c_over_alpha_closed"],
        rows,
    )
    peak = int(np.argmax(neg_numeric))
    print(
        f"wrote {dns.size} rows to {out}; -C/alpha peaks at dn={dns[peak]:.6g}"
        f" with value {neg_numeric[peak]:.6g}"
    )
    if params.raw("print_unweighted"):
        # The averages above carry the weight P(n_m) d n_m; the bare
        # integrals below do not, and blow up or wash out instead of
        # reproducing the closed forms.
        print("bare (unweighted) trapezoid integrals per dn:")
        for dn, report in zip(dns, reports):
            x = report.grid.points
            w = report.grid.weights
            q = np.cos(2.0 * math.pi * x)
            p = outcome_density_grid(rho, dn, x)
            numer = coherence_numerator_grid(rho, dn, x)
            a_f = np.where(p > DENSITY_FLOOR, numer / np.where(p > DENSITY_FLOOR, p, 1.0), 0.0)
            bare_q = float(np.dot(w, q))
            bare_a = complex(np.dot(w, a_f))
            bare_qa = complex(np.dot(w, q * a_f))
            print(
                f"  dn={dn:.6g}: int Q dn_m = {bare_q:.6g},"
                f" int a_f dn_m = {bare_a.real:.6g}{bare_a.imag:+.6g}j,"
                f" int Q a_f dn_m = {bare_qa.real:.6g}{bare_qa.imag:+.6g}j"
            )
    plot = params.plotpath(out)
    if plot:
        from . import plotting

        plotting.save_correlation(dns, neg_numeric, neg_closed, plot)
        print(f"rendered {plot}")
    return EXIT_OK


def cmd_trajectory(args: argparse.Namespace) -> int:
    params = _Params(args)
    alpha = params.alpha()
    dn = params.positive("dn", required=True)
    dim = params.intval("dim", default=default_dim(alpha), minimum=1)
    steps = params.intval("steps", required=True, minimum=1)
    shots = params.intval("shots", default=1, minimum=1)
    seed = params.intval("seed", default=0, minimum=0)
    out = params.outpath("trajectory.csv")
    summary_arg = params.raw("summary")
    summary_path = str(summary_arg) if summary_arg else os.path.splitext(out)[0] + ".json"
    workers = _worker_cap(shots)

    rho0 = make_coherent_state(alpha, TruncationConfig(dim))
    cfg = TrajectoryConfig(dn=dn, steps=steps, seed=seed)
    stats = ensemble_stats(rho0, cfg, shots, workers=workers)

    rows = (
        [str(s.index), fmt(s.mean_number), fmt(s.mean_coherence.real),
         fmt(s.mean_coherence.imag), fmt(s.mean_purity)]
        for s in stats.steps
    )
    _write_csv(out, ["step", "mean_n", "re_mean_a", "im_mean_a", "mean_purity"], rows)

    chi = collapse_chi_square(rho0.populations, stats.final_numbers)
    rounded = np.clip(np.rint(stats.final_numbers).astype(int), 0, rho0.dim - 1)
    counts = np.bincount(rounded, minlength=rho0.dim)
    histogram = {str(n): int(c) for n, c in enumerate(counts) if c > 0}
    summary = {
        "config": {
            "alpha_re": _json_num(alpha.real),
            "alpha_im": _json_num(alpha.imag),
            "dn": _json_num(dn),
            "dim": dim,
            "steps": steps,
            "shots": shots,
            "seed": seed,
            "workers": workers,
        },
        "final_number_histogram": histogram,
        "chi_square": {
            "statistic": _json_num(chi.statistic),
            "pvalue": _json_num(chi.pvalue),
            "dof": chi.dof,
        },
        "final_purity": {
            "median": _json_num(float(np.median(stats.final_purities))),
            "mean": _json_num(float(np.mean(stats.final_purities))),
        },
        "final_coherence_mean": {
            "re": _json_num(float(np.mean(stats.final_coherences.real))),
            "im": _json_num(float(np.mean(stats.final_coherences.imag))),
        },
    }
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    print(
        f"wrote {len(stats.steps)} steps x {shots} shots to {out};"
        f" summary in {summary_path}"
        f" (median final purity {float(np.median(stats.final_purities)):.6f},"
        f" chi-square p = {chi.pvalue:.4g})"
    )
    plot = params.plotpath(out)
    if plot:
        from . import plotting

        plotting.save_trajectory(
            [s.index for s in stats.steps],
            [s.mean_number for s in stats.steps],
            [s.mean_purity for s in stats.steps],
            plot,
        )
        print(f"rendered {plot}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    results = verify.run_checks()
    all_passed = all(r.passed for r in results)
    if args.json:
        payload = {
            "all_passed": all_passed,
            "checks": [
                {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
            ],
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<24} {r.detail}")
    if not all_passed:
        first = next(r for r in results if not r.passed)
        print(f"verification failed: {first.name}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="JSON", help="config file with flat keys mirroring flags; flags win")
    parser.add_argument("--alpha", type=float, help="coherent amplitude (real part)")
    parser.add_argument("--alpha-im", type=float, dest="alpha_im", help="imaginary part of the amplitude")
    parser.add_argument("--out", "-o", metavar="CSV", help="output data file")
    parser.add_argument(
        "--plot",
        nargs="?",
        const="",
        metavar="PNG",
        help="also render a figure (default path: the data file with .png)",
    )


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dn", type=float, help="measurement resolution")
    parser.add_argument("--dim", type=int, help="basis truncation dimension")
    parser.add_argument("--lo", type=float, help="grid lower bound on n_m")
    parser.add_argument("--hi", type=float, help="grid upper bound on n_m")
    parser.add_argument("--step", type=float, help="grid step")
    parser.add_argument(
        "--method",
        choices=("operator", "closed"),
        help="evaluation path: operator pipeline or closed-form series (default closed)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fockpovm", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser, required=True)

    p = sub.add_parser("dist", help="outcome probability distribution")
    _add_common(p)
    _add_grid_flags(p)

    p = sub.add_parser("coherence", help="distribution and conditional coherence")
    _add_common(p)
    _add_grid_flags(p)
    p.add_argument("--normalize-at", type=float, dest="normalize_at",
                   help="add P_norm/a_f_norm columns normalized at this grid point")

    p = sub.add_parser("correlation", help="anticorrelation vs resolution sweep")
    _add_common(p)
    p.add_argument("--dn-min", type=float, dest="dn_min", help="smallest resolution")
    p.add_argument("--dn-max", type=float, dest="dn_max", help="largest resolution")
    p.add_argument("--steps", type=int, help="number of sweep points (>= 2)")
    p.add_argument("--print-unweighted", action="store_const", const=True, dest="print_unweighted",
                   help="also print the bare outcome integrals without the P(n_m) weight")

    p = sub.add_parser("trajectory", help="repeated-measurement Monte-Carlo ensemble")
    _add_common(p)
    p.add_argument("--dn", type=float, help="measurement resolution")
    p.add_argument("--dim", type=int, help="basis truncation dimension")
    p.add_argument("--steps", type=int, help="measurements per trajectory")
    p.add_argument("--shots", type=int, help="independent trajectories (default 1)")
    p.add_argument("--seed", type=int, help="base RNG seed (default 0)")
    p.add_argument("--summary", metavar="JSON", help="summary file (default: out path with .json)")

    p = sub.add_parser("verify", help="run the cross-module consistency checks")
    p.add_argument("--json", action="store_true", help="machine-readable report")

    return parser


_COMMANDS = {
    "dist": cmd_dist,
    "coherence": cmd_coherence,
    "correlation": cmd_correlation,
    "trajectory": cmd_trajectory,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FockPovmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)


if __name__ == "__main__":
    sys.exit(main())
