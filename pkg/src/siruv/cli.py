"""Command-line entry point.

    siruv simulate [--config F | --preset NAME] [--model {legacy,effective,single}] --out D
    siruv compare-decoupled [--config F | --preset NAME] --out D [--skip-coupled]
    siruv presets list
    siruv presets show NAME

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .analysis import compare_decoupled, simulate
from .errors import NumericalError, ValidationError
from .integrate import check_conservation
from .io import PRESETS, get_preset, load_config, write_config, write_trajectory
from .models import ModelKind

CONSERVATION_TOL = 1e-7


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _build_parser():
    parser = _Parser(prog="siruv", description="Multi-patch SIRUV simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_args(p):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--config", type=Path, help="JSON scenario file")
        src.add_argument("--preset", help="built-in scenario (see `presets list`)")
        p.add_argument("--out", type=Path, required=True, help="output directory")

    sim = sub.add_parser("simulate", help="integrate one model and write its trajectory")
    scenario_args(sim)
    sim.add_argument("--model", choices=[m.value for m in ModelKind])

    cmp_ = sub.add_parser("compare-decoupled", help="decoupled runs of both models vs single patch")
    scenario_args(cmp_)
    cmp_.add_argument(
        "--skip-coupled", action="store_true", help="do not also run the coupled scenario"
    )

    presets = sub.add_parser("presets", help="inspect built-in scenarios")
    psub = presets.add_subparsers(dest="action", required=True, parser_class=_Parser)
    psub.add_parser("list")
    show = psub.add_parser("show")
    show.add_argument("name")
    return parser


def _scenario(args):
    if args.config is not None:
        return load_config(args.config)
    return get_preset(args.preset or "paper-3patch")


def _simulate(args):
    scenario = _scenario(args)
    model = ModelKind.parse(args.model) if args.model else scenario.model
    if model is ModelKind.SINGLE:
        P = None
    else:
        P = scenario.P
    traj = simulate(model, scenario.params, P, scenario.initial, scenario.solver, scenario.name)
    args.out.mkdir(parents=True, exist_ok=True)
    write_trajectory(traj, args.out / scenario.outputs.trajectory)
    conservation = check_conservation(traj, CONSERVATION_TOL)
    summary = {"scenario": scenario.name, "model": model.value, "samples": len(traj)}
    summary["conservation"] = conservation.to_dict()
    (args.out / "conservation.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(
        f"{model.value}: {len(traj)} samples to t={traj.times[-1]:g}; "
        f"max conservation residual {conservation.max_residual:.3g}"
    )
    return 0


def _compare(args):
    scenario = _scenario(args)
    report, effective, legacy = compare_decoupled(
        scenario.params, scenario.initial, scenario.solver, scenario.name
    )
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory(effective.multi, out / "effective_decoupled.csv")
    write_trajectory(legacy.multi, out / "legacy_decoupled.csv")
    write_trajectory(effective.reference, out / "single_patch.csv")
    if not args.skip_coupled:
        for model in (ModelKind.EFFECTIVE, ModelKind.LEGACY):
            traj = simulate(model, scenario.params, scenario.P, scenario.initial, scenario.solver)
            write_trajectory(traj, out / f"{model.value}_coupled.csv")
    (out / scenario.outputs.report).write_text(json.dumps(report, indent=2) + "\n")
    for name, entry in report["models"].items():
        print(f"{name}: max decoupling deviation {entry['max_deviation']:.3g} -> {entry['decoupling']}")
    return 0


def _presets(args):
    if args.action == "list":
        for name, cfg in PRESETS.items():
            print(f"{name}\tn={cfg.n}\tmodel={cfg.model.value}")
    else:
        sys.stdout.write(write_config(get_preset(args.name)))
    return 0


def run_cli(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"simulate": _simulate, "compare-decoupled": _compare, "presets": _presets}
        return handler[args.command](args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except ValidationError as exc:
        print(f"siruv: invalid input: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"siruv: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"siruv: numerical failure: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
