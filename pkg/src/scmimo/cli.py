"""Command-line entry point.

Exit codes: 0 on success, 2 for configuration problems (unreadable or
invalid spec, bad flag values, unwritable output), 3 for numerical
failures such as an unbracketable calibration target.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, apply_overrides, load_spec, parse_spec
from .harness import calibrate_from_spec, run_experiment
from .presets import PRESETS, preset
from .reporting import emit_results
from .scenario import CalibrationError
from .units import lin_to_db

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scmimo",
        description="Uplink simulator for space-constrained massive MIMO "
                    "arrays under correlated Ricean fading.")
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run an experiment spec")
    simulate.add_argument("spec", help="path to a JSON experiment spec")
    simulate.add_argument("--out", help="output file (default: spec's "
                          "output.path, else stdout)")
    simulate.add_argument("--format", choices=("csv", "json"),
                          help="output format (default: spec's output.format)")
    simulate.add_argument("--seed", type=int, help="override the master seed")
    simulate.add_argument("--threads", type=int, default=1,
                          help="worker threads; results are identical for "
                               "any value")
    simulate.add_argument("--limit-mode", choices=("plain", "full", "both"),
                          help="which large-array limit variant to report")
    simulate.add_argument("--no-figures", action="store_true",
                          help="skip figure rendering next to the output file")

    calibrate = sub.add_parser("calibrate",
                               help="calibrate the attenuation constant")
    calibrate.add_argument("spec", help="path to a JSON experiment spec")
    calibrate.add_argument("--seed", type=int, help="override the master seed")

    validate = sub.add_parser("validate", help="check a spec without running")
    validate.add_argument("spec", help="path to a JSON experiment spec")

    show = sub.add_parser("preset", help="list or export built-in presets")
    show.add_argument("name", nargs="?", help="preset name; omit to list")
    show.add_argument("--out", help="write the preset JSON to this path")
    return parser


def _load_with_overrides(args) -> "ExperimentSpec":
    spec = load_spec(args.spec)
    return apply_overrides(
        spec,
        seed=getattr(args, "seed", None),
        limit_mode=getattr(args, "limit_mode", None),
        out_path=getattr(args, "out", None),
        out_format=getattr(args, "format", None),
    )


def _cmd_simulate(args) -> int:
    spec = _load_with_overrides(args)
    if args.threads < 1:
        raise ConfigError("--threads must be positive")
    rows = run_experiment(spec, threads=args.threads)
    emit_results(rows, spec.out_path, spec.out_format, spec.echo)
    if spec.out_path and not args.no_figures:
        from .figures import render_figures
        for path in render_figures(rows, spec.kind, spec.out_path):
            print(f"figure: {path}", file=sys.stderr)
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    spec = _load_with_overrides(args)
    const = calibrate_from_spec(spec)
    print(f"atten_const = {const!r}  ({float(lin_to_db(const)):.3f} dB)")
    return EXIT_OK


def _cmd_validate(args) -> int:
    load_spec(args.spec)
    print("ok")
    return EXIT_OK


def _cmd_preset(args) -> int:
    if args.name is None:
        for name in sorted(PRESETS):
            print(name)
        return EXIT_OK
    try:
        obj = preset(args.name)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    parse_spec(obj)  # presets must stay valid
    text = json.dumps(obj, indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "simulate": _cmd_simulate,
    "calibrate": _cmd_calibrate,
    "validate": _cmd_validate,
    "preset": _cmd_preset,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CalibrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
