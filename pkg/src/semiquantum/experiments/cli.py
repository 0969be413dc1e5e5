"""Command-line runner: one subcommand per scenario.

Exit status: 0 when every comparison passes, 2 on a numerical tolerance
failure, 1 on a configuration or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys

from ..errors import DomainError, SemiquantumError, TruncationError
from .config import FORMATS, SCENARIO_KEYS, SCENARIOS, ConfigError, build_config, read_config_file
from .emit import emit
from .scenarios import run_scenario

OUT_DIR_ENV = "SEMIQUANTUM_OUT_DIR"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_TOLERANCE = 2

_SCENARIO_FLAGS = {
    "m": dict(type=int, help="photon number of the input Fock state"),
    "T": dict(type=float, help="beam-splitter transmission (R = 1 - T)"),
    "phase": dict(type=float, help="beam-splitter phase in radians"),
    "r": dict(type=float, help="squeezing parameter"),
    "theta": dict(type=float, help="quadrature angle in radians"),
    "beta": dict(type=str, help="coherent amplitude of the control state, e.g. 1 or 0.5+0.5j"),
    "trials": dict(type=int, help="number of randomized trials"),
    "grid_half_width": dict(type=float, help="phase-space grid half-width"),
    "grid_step": dict(type=float, help="phase-space grid step"),
    "field_out": dict(type=str, help="also write the deconvolved Wigner field to this path"),
}

_HELP = {
    "subpoisson": "number state under photon counting vs continuous-number detection",
    "anticorrelation": "single photon on a beam splitter, coincidence statistics",
    "hom": "two photons on a balanced beam splitter",
    "squeezing": "squeezed vacuum under homodyne vs classical quadrature detection",
    "wigner-negativity": "heterodyne statistics deconvolved into the Wigner function",
    "separability-suite": "randomized classical models through the inversion pipeline",
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors: exit 1, not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="semiquantum",
        description="Quantum vs classical-detector statistics for canonical quantum-optics experiments.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="scenario", parser_class=_Parser)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=_HELP[name], description=_HELP[name])
        p.add_argument("--dim", type=int, help="Fock truncation per mode (default: scenario-specific)")
        p.add_argument("--seed", type=int, help="random seed (default 0)")
        p.add_argument("--out", help=f"output file (default: stdout, or ${OUT_DIR_ENV}/<scenario>.<format>)")
        p.add_argument("--format", choices=FORMATS, help="output format (default json)")
        p.add_argument("--config", help="flat key = value file; command-line flags win")
        for key in SCENARIO_KEYS[name]:
            p.add_argument("--" + key.replace("_", "-"), dest=key, **_SCENARIO_FLAGS[key])
    return parser


def _resolve_out(cfg):
    if cfg.out is not None:
        return cfg.out
    directory = os.environ.get(OUT_DIR_ENV)
    if directory:
        return os.path.join(directory, f"{cfg.scenario}.{cfg.format}")
    return None


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in ("scenario", "config")}
    try:
        entries = read_config_file(args.config) if args.config else {}
        cfg = build_config(args.scenario, entries, overrides)
    except (ConfigError, OSError) as exc:
        print(f"semiquantum: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = run_scenario(cfg)
    except (TruncationError, DomainError, ValueError) as exc:
        print(f"semiquantum: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SemiquantumError as exc:
        print(f"semiquantum: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE

    try:
        emit(report, cfg.format, _resolve_out(cfg))
        if cfg.field_out and "wigner" in report.fields:
            emit(report.fields["wigner"], "csv", cfg.field_out)
    except OSError as exc:
        print(f"semiquantum: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    for c in report.failures():
        print(f"semiquantum: FAIL {c.name}: computed {c.computed!r}, expected {c.expected!r} "
              f"({c.relation}, tol {c.tolerance!r})", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
