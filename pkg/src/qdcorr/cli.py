"""Command-line entry point ``qdcorr``.

Exit codes: 0 success, 1 validation or check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys

import numpy as np

from . import __version__
from .channel import NoiseParams, memory_amplitude, rtn_coherence
from .config import (
    build_run_config,
    build_sweep_spec,
    format_state,
    load_config,
    parse_state,
)
from .correlations import (
    classical_correlation,
    concurrence,
    concurrence_x,
    discord_numeric,
    discord_x_detail,
    mutual_information,
)
from .figures import check_figure, figure1_panels, plot_script, run_figure
from .model import CLOSED_FORM_SOURCE, STATE_SOURCES, XState, closed_form_state, state_source
from .qmat import is_x_structured
from .sweep import ConfigError, concat_results, run_generic_sweep
from .validation import FAULTS, validate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def cmd_state(args) -> int:
    cfg = load_config(args.config) if args.config else {}
    run = build_run_config(cfg)
    nu = run.nu if args.nu is None else args.nu
    if nu < 0:
        raise ConfigError("nu must be non-negative")
    source = args.source or run.state_source
    if args.strict or (not run.renormalize and source == CLOSED_FORM_SOURCE):
        if source != CLOSED_FORM_SOURCE:
            raise ConfigError("--strict applies to the paper-closed-form source")
        printed, _ = closed_form_state(run.params, nu, run.noise, renormalize=False)
        sys.stdout.write(format_state(printed.to_matrix())
                         + f"# printed entries verbatim, trace - 1 = {printed.trace - 1.0:.10e}\n")
        return EXIT_OK
    rho = state_source(source, run.params, nu, run.noise, run.renormalize)
    x = XState.from_matrix(rho)
    d, tag = discord_x_detail(x)
    lines = [
        f"# source: {source}  nu: {nu:g}",
        f"# concurrence: {concurrence_x(x):.10e}",
        f"# discord: {d:.10e} ({tag})",
    ]
    sys.stdout.write(format_state(rho) + "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    method = "numeric" if args.numeric else None
    checks = None
    if args.figure is not None:
        kwargs = {}
        if args.source:
            kwargs["state_source"] = args.source
        if method:
            kwargs["discord_method"] = method
        if args.figure == 1:
            panels = figure1_panels(**kwargs)
            result = concat_results(panels)
            checks = check_figure(1, panels) if args.check else None
        else:
            result = run_figure(args.figure, **kwargs)
            checks = check_figure(args.figure, result) if args.check else None
        output = args.output
    else:
        cfg = load_config(args.spec)
        if args.source:
            cfg["state_source"] = args.source
        if method:
            cfg["discord_method"] = method
        spec = build_sweep_spec(cfg)
        if args.check:
            raise ConfigError("--check applies to --figure sweeps only")
        result = run_generic_sweep(spec)
        output = args.output or spec.output
    _emit(result.to_csv(), output)
    if args.plot_script:
        if output is None:
            raise ConfigError("--plot-script needs an output file")
        if args.figure is None:
            raise ConfigError("--plot-script applies to --figure sweeps only")
        _emit(plot_script(args.figure, output), output.rsplit(".", 1)[0] + "_plot.py")
    if checks is not None:
        for name, ok in checks.items():
            print(f"[{'PASS' if ok else 'FAIL'}] {name}", file=sys.stderr)
        return EXIT_OK if all(checks.values()) else EXIT_FAIL
    return EXIT_OK


def cmd_discord(args) -> int:
    rho = parse_state(_read(args.rho))
    out = [f"concurrence: {concurrence(rho):.10e}", f"mutual_information: {mutual_information(rho):.10e}"]
    x_value = None
    if args.method in ("x-formula", "both"):
        if not is_x_structured(rho):
            raise ConfigError("x-formula needs an X-structured state")
        x_value, tag = discord_x_detail(XState.from_matrix(rho))
        out.append(f"discord_x: {x_value:.10e} ({tag})")
    if args.method in ("numeric", "both"):
        res = discord_numeric(rho)
        out.append(f"discord_numeric: {res.discord:.10e}"
                   f" (theta={res.basis.theta:.6f}, phi={res.basis.phi:.6f}"
                   f"{'' if res.converged else ', unconverged'})")
        out.append(f"classical_correlation: {classical_correlation(rho):.10e}")
        if x_value is not None:
            out.append(f"discord_gap: {abs(x_value - res.discord):.3e}")
    print("\n".join(out))
    return EXIT_OK


def cmd_rtn_oracle(args) -> int:
    if args.points < 2 or args.nu_max <= 0:
        raise ConfigError("need --points >= 2 and --nu-max > 0")
    try:
        noise = NoiseParams(args.a, args.tau)
        nu = np.linspace(0.0, args.nu_max, args.points)
        mean, err, _ = rtn_coherence(noise, nu, args.trajectories, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    exact = memory_amplitude(noise, nu)
    buf = io.StringIO()
    buf.write(f"# a: {args.a:g}\n# tau: {args.tau:g}\n# trajectories: {args.trajectories}\n# seed: {args.seed}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("nu", "estimated_coherence", "stderr", "analytic_lambda"))
    for row in zip(nu, mean, err, exact):
        writer.writerow(f"{v:.9e}" for v in row)
    _emit(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validate(args.seed, args.inject_fault)
    print("\n".join(report.lines()))
    return EXIT_OK if report.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qdcorr", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qdcorr {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="more logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="print the two-qubit state for a configuration")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--nu", type=float, help="dimensionless time (overrides the config)")
    p.add_argument("--source", choices=STATE_SOURCES)
    p.add_argument("--strict", action="store_true",
                   help="print the closed-form entries verbatim, without renormalizing")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("sweep", help="run a figure protocol or a generic sweep")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--figure", type=int, choices=(1, 2, 3, 4))
    g.add_argument("--spec", help="sweep configuration file with axis1 (and optional axis2)")
    p.add_argument("--output", "-o", help="CSV path (default: stdout)")
    p.add_argument("--numeric", action="store_true", help="use numeric discord instead of the X closed form")
    p.add_argument("--source", choices=STATE_SOURCES)
    p.add_argument("--plot-script", action="store_true", help="also write a matplotlib script next to the CSV")
    p.add_argument("--check", action="store_true", help="run the figure's qualitative checks")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("discord", help="correlation measures of a state file")
    p.add_argument("--rho", required=True, help="file with 16 complex entries, row-major")
    p.add_argument("--method", choices=("x-formula", "numeric", "both"), default="both")
    p.set_defaults(func=cmd_discord)

    p = sub.add_parser("rtn-oracle", help="Monte Carlo telegraph-noise coherence versus the closed form")
    p.add_argument("--a", type=float, default=0.9)
    p.add_argument("--tau", type=float, default=5.0)
    p.add_argument("--nu-max", type=float, default=4.0)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--trajectories", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_rtn_oracle)

    p = sub.add_parser("validate", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=2024)
    p.add_argument("--inject-fault", choices=FAULTS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        # parameter and state validation errors from the library
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
