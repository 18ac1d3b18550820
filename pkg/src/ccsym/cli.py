"""Command-line interface: ``ccsym {test,by-year,power,diag,pseudo}``.

Exit codes: 0 on success, 1 for input errors, 2 for configuration errors.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict

from . import __version__
from .diagnostics import exceedance_table, exceedance_table_to_csv
from .dgp import power_rows_to_csv, power_study
from .exceptions import ConfigError, InputError
from .multiple_testing import DEFAULT_LEVELS, yearly_procedure
from .panel import read_panel
from .pseudoobs import normalized_ranks
from .symmetry_test import SCHEMES, BootstrapConfig, run_test

# options whose values may legitimately start with '-'
_SIGNED_OPTIONS = ("--gammas", "--a")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_list(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _grid(text):
    """``start:step:stop`` (inclusive) or a comma-separated list."""
    if ":" not in text:
        return _float_list(text)
    try:
        start, step, stop = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:step:stop, got {text!r}") from None
    if step == 0 or (stop - start) * step < 0:
        raise argparse.ArgumentTypeError(f"step {step} does not move from {start} towards {stop}")
    n = int(round((stop - start) / step))
    return [round(start + k * step, 12) for k in range(n + 1)]


def _block_length(text):
    if text == "auto":
        return "auto"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"block length must be an integer or 'auto', got {text!r}") from None


def _add_bootstrap_args(p):
    p.add_argument("--m", type=int, default=250, help="bootstrap replicates (default 250)")
    p.add_argument("--block-length", type=_block_length, default="auto", help="integer or 'auto' (default)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--scheme", choices=SCHEMES, default="reflect")
    p.add_argument("--add-one", action="store_true", help="use (1 + #exceed) / (1 + M) p-values")
    p.add_argument("--literal-grid", action="store_true", help="score bootstrap draws on ranks over T instead of T + 1")


def _add_input_args(p):
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "french"), default="csv")


def _add_output_args(p, default_fmt):
    p.add_argument("--output", help="output path (default: standard output)")
    p.add_argument("--output-format", choices=("json", "csv"), default=default_fmt)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ccsym", description="Copula central symmetry tests for multivariate time series.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test one panel")
    _add_input_args(p)
    _add_bootstrap_args(p)
    _add_output_args(p, "json")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("by-year", help="test each calendar year with FDR control")
    _add_input_args(p)
    _add_bootstrap_args(p)
    _add_output_args(p, "csv")
    p.add_argument("--levels", type=_float_list, default=list(DEFAULT_LEVELS))
    p.add_argument("--min-obs", type=int, default=50)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("power", help="Monte Carlo rejection rates for the skewed-t factor design")
    p.add_argument("--gammas", type=_grid, required=True, help="start:step:stop or comma list")
    p.add_argument("--t", type=_int_list, required=True)
    p.add_argument("--n", type=_int_list, required=True)
    p.add_argument("--mc", type=int, default=1000)
    p.add_argument("--levels", type=_float_list, default=list(DEFAULT_LEVELS))
    p.add_argument("--nu", type=float, default=6.0)
    p.add_argument("--phi", type=float, default=0.5)
    p.add_argument("--loading", type=float, default=1.0)
    _add_bootstrap_args(p)
    p.add_argument("--output")
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("diag", help="exceedance statistics for every pair of series")
    _add_input_args(p)
    p.add_argument("--a", type=_float_list, default=[0.0, 0.5, 1.0], help="exceedance levels")
    p.add_argument("--output")

    p = sub.add_parser("pseudo", help="dump normalized ranks as CSV")
    _add_input_args(p)
    p.add_argument("--output")
    return parser


def _bootstrap_config(args):
    return BootstrapConfig(replicates=args.m, block_length=args.block_length, seed=args.seed,
                           scheme=args.scheme, add_one=args.add_one, matched_grid=not args.literal_grid)


def _check_threads(args):
    if getattr(args, "threads", 1) < 1:
        raise ConfigError("--threads must be at least 1")


def _write(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _config_echo(args, **extra):
    echo = {k: v for k, v in vars(args).items() if k not in ("threads", "output")}
    echo.update(extra)
    return echo


def _cmd_test(args):
    config = _bootstrap_config(args)
    panel = read_panel(args.input, args.format)
    result = run_test(panel.values, config, threads=args.threads, dropped_rows=panel.dropped_rows)
    report = result.to_dict()
    if args.output_format == "json":
        report["config"] = _config_echo(args, block_length_used=result.block_length)
        return json.dumps(report, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_config_echo(args), sort_keys=True) + "\n")
    writer = csv.DictWriter(buf, fieldnames=list(report), lineterminator="\n")
    writer.writeheader()
    writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in report.items()})
    return buf.getvalue()


def _cmd_by_year(args):
    config = _bootstrap_config(args)
    panel = read_panel(args.input, args.format)
    report = yearly_procedure(panel, config, levels=args.levels, min_obs=args.min_obs, threads=args.threads)
    report.config.update({"input": args.input, "format": args.format})
    return report.to_json() if args.output_format == "json" else report.to_csv()


def _cmd_power(args):
    config = _bootstrap_config(args)
    rows = power_study(args.gammas, args.t, args.n, args.mc, config, levels=args.levels, seed=args.seed,
                       threads=args.threads, nu=args.nu, phi=args.phi, loading=args.loading)
    header = "# config: " + json.dumps({**_config_echo(args), "bootstrap": asdict(config)}, sort_keys=True) + "\n"
    return header + power_rows_to_csv(rows)


def _cmd_diag(args):
    panel = read_panel(args.input, args.format)
    return exceedance_table_to_csv(exceedance_table(panel.values, args.a, panel.labels))


def _cmd_pseudo(args):
    panel = read_panel(args.input, args.format)
    u = normalized_ranks(panel.values).u
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", *panel.labels])
    for d, row in zip(panel.dates, u):
        writer.writerow([str(d), *(repr(float(v)) for v in row)])
    return buf.getvalue()


_COMMANDS = {"test": _cmd_test, "by-year": _cmd_by_year, "power": _cmd_power, "diag": _cmd_diag, "pseudo": _cmd_pseudo}


def _join_signed(argv):
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _SIGNED_OPTIONS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_signed(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _check_threads(args)
        text = _COMMANDS[args.command](args)
        _write(text, getattr(args, "output", None))
    except (InputError, OSError) as exc:
        print(f"ccsym: input error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"ccsym: config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
