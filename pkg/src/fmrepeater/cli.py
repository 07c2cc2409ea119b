"""Command line entry point: ``fmrepeater <command> [options]``.

Every command reads a scenario (a ``.cfg`` file or a preset name) and writes
CSV to ``--out`` or stdout. Exit status is 0 on success, 2 for invalid input
and 3 when the requested physics cannot be realised.
"""

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import analysis
from .config import PRESETS, SweepGrid, load_scenario
from .exceptions import InfeasiblePhysicsError, ValidationError
from .tables import read_noise_csv

EXIT_OK, EXIT_VALIDATION, EXIT_INFEASIBLE = 0, 2, 3
U64_MAX = 2**64 - 1


def _u64(text):
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _non_negative_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_int(text):
    value = _non_negative_int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers: {text!r}") from None


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="experimental",
                        help=f"scenario file or preset name ({', '.join(PRESETS)})")
    common.add_argument("--out", type=Path, help="output file (default: stdout)")
    common.add_argument("--seed", type=_u64, default=0, help="RNG seed (simulate)")
    common.add_argument("--trials", type=_non_negative_int, default=100_000,
                        help="number of attempts (simulate)")
    common.add_argument("--workers", type=_positive_int, default=1, help="worker threads")

    parser = argparse.ArgumentParser(prog="fmrepeater", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="SNR over pump power x crystal length")
    p.add_argument("--powers-mw", type=_float_list, help="override pump axis (mW)")
    p.add_argument("--lengths-cm", type=_float_list, help="override crystal length axis (cm)")

    p = sub.add_parser("curve", parents=[common], help="conversion efficiency versus pump power")
    p.add_argument("--powers-mw", type=_float_list, help="pump axis (mW)")

    p = sub.add_parser("noise", parents=[common], help="decompose measured noise and fit Raman terms")
    p.add_argument("--data", help="noise CSV (pump_mw,counts_per_s[,length_cm]); "
                                  "default: bundled synthetic curve")

    sub.add_parser("budget", parents=[common], help="loss ledger, extinction ratio, figures of merit")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo elementary link")

    p = sub.add_parser("plan-shift", parents=[common], help="pump shift for a heralded mode")
    p.add_argument("--mode", type=int, required=True, help="heralded signal mode index")
    return parser


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8", newline="")


def _note(text):
    sys.stderr.write(text.rstrip("\n") + "\n")


def cmd_sweep(args, scenario):
    grid = None
    if args.powers_mw or args.lengths_cm:
        grid = SweepGrid.build(
            [p * 1e-3 for p in args.powers_mw] if args.powers_mw else scenario.sweep.pump_powers,
            args.lengths_cm or scenario.sweep.crystal_lengths,
        )
    result = analysis.run_sweep(scenario, grid, workers=args.workers)
    _emit(result.table.to_csv(), args.out)
    p, x, snr = result.argmax
    _note(f"best SNR {snr:.2f} dB at {p * 1e3:.1f} mW, {x:.2f} cm")


def cmd_curve(args, scenario):
    powers = [p * 1e-3 for p in args.powers_mw] if args.powers_mw else None
    table, _ = analysis.conversion_curve(scenario, powers)
    _emit(table.to_csv(), args.out)


def cmd_noise(args, scenario):
    if args.data:
        path = Path(args.data)
        if not path.is_file():
            raise ValidationError(f"noise data file {args.data!r} not found")
        text, source = path.read_text(encoding="utf-8"), str(path)
    else:
        ref = resources.files("fmrepeater.presets") / "noise_synthetic.csv"
        text, source = ref.read_text(encoding="utf-8"), "noise_synthetic.csv"
    result = analysis.noise_decompose(scenario, read_noise_csv(text, source))
    _emit(result.table.to_csv(), args.out)
    _note(result.summary())


def cmd_budget(args, scenario):
    result = analysis.budget(scenario, workers=args.workers)
    if args.out is None:
        sys.stdout.write(result.text + "\n")
    else:
        result.table.write(args.out)
        _note(result.text)


def cmd_simulate(args, scenario):
    report = analysis.simulate(scenario, args.seed, args.trials, workers=args.workers)
    if args.out is None:
        sys.stdout.write(report.table.to_csv())
        _note(report.summary_json())
    else:
        report.table.write(args.out)
        summary_path = args.out.with_name(args.out.stem + ".summary.json")
        summary_path.write_text(report.summary_json(), encoding="utf-8", newline="")
        sys.stdout.write(report.summary_json())


def cmd_plan_shift(args, scenario):
    _, text = analysis.plan_shift_report(scenario, args.mode)
    _emit(text, args.out)


COMMANDS = {
    "sweep": cmd_sweep,
    "curve": cmd_curve,
    "noise": cmd_noise,
    "budget": cmd_budget,
    "simulate": cmd_simulate,
    "plan-shift": cmd_plan_shift,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        scenario = load_scenario(args.config)
        COMMANDS[args.command](args, scenario)
    except ValidationError as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION
    except InfeasiblePhysicsError as exc:
        _note(f"infeasible: {exc}")
        return EXIT_INFEASIBLE
    except OSError as exc:
        _note(f"error: {exc}")
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
