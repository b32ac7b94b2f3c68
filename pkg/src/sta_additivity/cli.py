"""Command-line entry point: ``verify``, ``run`` and ``dump``.

Failures print one line ``ERROR:<code>: <reason>`` to stderr and exit with

    2 parse, 3 hypothesis, 4 stability, 5 identity, 6 io.

A completed ``run`` exits 0 on a PASS verdict and 1 on FAIL.
"""
from __future__ import annotations

import argparse
import contextlib
import io
import sys

from .algebra import sign_table_fault
from .config import load_config
from .cylinder import AnalyticScenario, EvolvedScenario, additivity_report, verdict
from .errors import RawFormatError, SetupError, StabilityError
from .identities import run_suite
from .rawio import write_raw

EXIT_OK, EXIT_FAIL = 0, 1
EXIT_CODES = {"parse": 2, "hypothesis": 3, "stability": 4, "identity": 5, "io": 6}

CSV_HEADER = ("t,P0,P1,P2,P3,P1_0,P1_1,P1_2,P1_3,P2_0,P2_1,P2_2,P2_3,"
              "K0,K1,K2,K3,maxwell_residual,divergence_residual")

# verdict tolerances per mode: (additivity, conservation)
TOLERANCES = {"analytic": (1e-10, 1e-10), "fdtd": (1e-3, 1e-3)}
ROUTE_TOLERANCE = 1e-12


class CliError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


def _fail(err: CliError) -> int:
    reason = " ".join(str(err).split())
    print(f"ERROR:{err.code}: {reason}", file=sys.stderr)
    return EXIT_CODES[err.code]


def _load(path):
    try:
        return load_config(path)
    except ValueError as exc:  # ConfigError and field validation
        raise CliError("parse", exc) from exc
    except OSError as exc:
        raise CliError("io", f"cannot read config: {exc}") from exc


def build_scenarios(config):
    """Scenario objects for pulse1 and pulse2 (None when absent)."""
    if config.mode == "analytic":
        make = AnalyticScenario
    else:
        def make(pulses):
            return EvolvedScenario(pulses, 0.0, config.dt_cfl)
    second = make([config.pulse2]) if config.pulse2 is not None else None
    return make([config.pulse1]), second


def format_csv(reports) -> str:
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in reports:
        row = (r.t, *r.P, *r.P1, *r.P2, *r.K, r.maxwell_residual, r.divergence_residual)
        out.write(",".join(repr(float(v)) for v in row) + "\n")
    return out.getvalue()


def cmd_verify(seed: int, trials: int, corrupt=None) -> int:
    fault = sign_table_fault(*corrupt) if corrupt is not None else contextlib.nullcontext()
    with fault:
        results = run_suite(seed, trials)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "ok" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {r.residual:.3e}  (tol {r.tolerance:.0e})  {status}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        return _fail(CliError("identity", f"{', '.join(failed)} failed (seed={seed}, trials={trials})"))
    print(f"all {len(results)} identities hold (seed={seed}, trials={trials})")
    return EXIT_OK


def _report(config, workers):
    F1, F2 = build_scenarios(config)
    try:
        return additivity_report(F1, F2, config.cylinder(), workers)
    except SetupError as exc:
        raise CliError("hypothesis", exc) from exc
    except StabilityError as exc:
        raise CliError("stability", exc) from exc


def cmd_run(config_path, workers: int = 1) -> int:
    try:
        config = _load(config_path)
        reports = _report(config, workers)
        text = format_csv(reports)
        try:
            with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise CliError("io", f"cannot write {config.output_path}: {exc}") from exc
    except CliError as err:
        return _fail(err)
    add_tol, cons_tol = TOLERANCES[config.mode]
    route_tol = ROUTE_TOLERANCE * max(1.0, abs(reports[0].P[0]))
    v = verdict(reports, add_tol, cons_tol, route_tol)
    status = "PASS" if v.passed else "FAIL"
    print(f"{status} mode={config.mode} slices={len(reports)} "
          f"additivity={v.additivity:.3e} (tol {add_tol:.0e}) "
          f"route_gap={v.route_gap:.3e} drift={v.drift:.3e} (tol {cons_tol:.0e}) "
          f"csv={config.output_path}")
    return EXIT_OK if v.passed else EXIT_FAIL


def cmd_dump(config_path, time: float, out) -> int:
    try:
        config = _load(config_path)
        F1, F2 = build_scenarios(config)
        scenario = F1 if F2 is None else F1.combined(F2)
        if time < 0:
            raise CliError("parse", "--time must be >= 0")
        try:
            state = scenario.state_at(time, config.domain)
        except StabilityError as exc:
            raise CliError("stability", exc) from exc
        try:
            write_raw(out, state)
        except (OSError, RawFormatError) as exc:
            raise CliError("io", f"cannot write {out}: {exc}") from exc
    except CliError as err:
        return _fail(err)
    nz, ny, nx = state.grid_shape
    print(f"wrote {out}: {nx}x{ny}x{nz} at t={state.time!r}")
    return EXIT_OK


def _pair(text):
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected I,J") from None
    if not (0 <= i < 16 and 0 <= j < 16):
        raise argparse.ArgumentTypeError("blade indices must lie in 0..15")
    return i, j


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"ERROR:parse: {message}", file=sys.stderr)
        sys.exit(EXIT_CODES["parse"])


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sta-additivity",
                     description="Spacetime-algebra checks of energy-momentum additivity.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run the algebra and energy identity suites")
    p.add_argument("--seed", type=_non_negative, default=0)
    p.add_argument("--trials", type=_non_negative, default=1000)
    p.add_argument("--corrupt-sign", type=_pair, default=None, help=argparse.SUPPRESS)

    p = sub.add_parser("run", help="run a scenario and write the slice CSV")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("dump", help="write the field at one time as a raw STAF file")
    p.add_argument("config")
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args.seed, args.trials, args.corrupt_sign)
    if args.command == "run":
        return cmd_run(args.config, max(1, args.workers))
    return cmd_dump(args.config, args.time, args.out)


if __name__ == "__main__":
    sys.exit(main())
