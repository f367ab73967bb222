"""Command-line front end: synthesize, simulate, sweep and surface.

Exit codes: 0 success, 2 configuration error, 3 infeasible schedule,
4 register larger than the numeric cap.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path
from typing import Sequence

import yaml

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .fidelity import GateExperiment, sweep
from .hamiltonian import DimensionCapError
from .lattice import build_surface_layout
from .pauli import PauliString
from .surface import (build_three_step_schedule, build_two_step_schedule, conventional_depth_units,
                      extract_syndrome, fig9_report, render_syndrome, validate_ordering)
from .synthesis import InfeasibleScheduleError, PreconditionError, audit_schedule

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_CAP = 0, 2, 3, 4


def header_lines(cfg: RunConfig) -> list[str]:
    lines = [f"isingparity {__version__}", "resolved config:"]
    dumped = yaml.safe_dump(cfg.to_dict(), sort_keys=True, default_flow_style=False)
    lines += ["  " + l for l in dumped.rstrip("\n").splitlines()]
    return lines


def _commented(cfg: RunConfig, body: str) -> str:
    head = "".join(f"# {l}\n" for l in header_lines(cfg))
    return head + body if body.endswith("\n") else head + body + "\n"


def experiment(cfg: RunConfig) -> GateExperiment:
    if cfg.lattice != "testbed-9q":
        raise ConfigError("gate simulation runs on lattice 'testbed-9q'")
    return GateExperiment(kind=cfg.gate_kind, tunneling=cfg.tunneling, couplings=cfg.couplings,
                          control_bias=cfg.control_bias, tau=cfg.tau, dt=cfg.dt, pulses=cfg.pulses,
                          split=cfg.split, bias_mode=cfg.bias_mode, active=cfg.active,
                          flip_configs=cfg.flip_configs)


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def cmd_synthesize(cfg: RunConfig, dry_run: bool = False) -> int:
    exp = experiment(cfg)
    spec = exp.lattice()
    gate = exp.gate(spec)
    xi = [spec.coupling(gate.target, c) for c in gate.controls]
    schedule = exp.schedule()
    audit = audit_schedule(gate, xi, cfg.tunneling, schedule)
    report = audit.render()
    print(report)
    out = Path(cfg.out)
    if not dry_run:
        body = yaml.safe_dump({"schedule": schedule.to_dict()}, sort_keys=False)
        print(f"wrote {_write(out, 'schedule.yaml', _commented(cfg, body))}")
        print(f"wrote {_write(out, 'audit.txt', _commented(cfg, report))}")
    return EXIT_OK if audit.passed else EXIT_INFEASIBLE


def cmd_simulate(cfg: RunConfig) -> int:
    result = experiment(cfg).run()
    text = "\n".join(l for l in result.render().splitlines() if not l.startswith("wall_time"))
    print(result.render())
    print(f"wrote {_write(Path(cfg.out), 'simulate.txt', _commented(cfg, text))}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    if not cfg.sweep_parameter:
        raise ConfigError("sweep command needs a 'sweep' section")
    table = sweep(experiment(cfg), cfg.sweep_parameter, cfg.sweep_values, workers=cfg.workers)
    csv = table.to_csv(header_lines(cfg) + ["columns: value in the unit shown, fid, fid_unit; 6 significant digits"])
    sys.stdout.write(csv)
    print(f"wrote {_write(Path(cfg.out), f'sweep_{cfg.sweep_parameter}.csv', csv)}")
    return EXIT_OK


def parse_error(spec, text: str) -> PauliString:
    op, label = text.split()
    return PauliString.single(spec.num_sites, spec.site(label), op)


def cmd_surface(cfg: RunConfig) -> int:
    spec = build_surface_layout(cfg.surface_rows, cfg.surface_cols, cfg.xi_z, cfg.xi_x)
    lines = ["[layout]", spec.render(), ""]
    good = build_three_step_schedule(spec, "ABC", cfg.tau, cfg.tunneling)
    for order in ("ABC", "ACB"):
        sched = build_three_step_schedule(spec, order, cfg.tau, cfg.tunneling)
        lines += [f"[ordering {order}]", validate_ordering(sched, spec).render(), ""]
    two = build_two_step_schedule(spec, tau=cfg.tau, delta_t=cfg.tunneling)
    lines += ["[ordering two-step]", validate_ordering(two, spec).render(), ""]
    lines += ["[fig9]"] + [f"{k}: {v}" for k, v in fig9_report().items()] + [""]
    lines += ["[depth]", f"two_step_tau: {two.depth_units}", f"three_step_tau: {good.depth_units}",
              f"conventional_tau: {conventional_depth_units(tau=cfg.tau, delta_t=cfg.tunneling)}", ""]
    lines += ["[schedule]", good.render(spec), ""]
    for err in cfg.errors:
        try:
            pauli = parse_error(spec, err)
        except KeyError as exc:
            raise ConfigError(f"surface.errors: {exc}") from exc
        lines += [f"[syndrome {err}]", render_syndrome(spec, extract_syndrome(spec, pauli, good)), ""]
    text = "\n".join(lines)
    print(text)
    print(f"wrote {_write(Path(cfg.out), 'surface.txt', _commented(cfg, text))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isingparity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("synthesize", "derive a pulse schedule and its condition audit"),
                            ("simulate", "simulate a gate on the nine-qubit testbed"),
                            ("sweep", "fidelity versus one parameter, as CSV"),
                            ("surface", "surface-code cycle schedules, validation and syndromes")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="YAML run configuration")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--dt", type=float, help="time step override in ns")
        if name == "synthesize":
            p.add_argument("--dry-run", action="store_true", help="print the audit without writing files")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        if args.out is not None:
            cfg = dataclasses.replace(cfg, out=str(args.out))
        if args.dt is not None:
            if args.dt <= 0:
                raise ConfigError("--dt must be positive")
            cfg = dataclasses.replace(cfg, dt=args.dt)
        if args.command == "synthesize":
            return cmd_synthesize(cfg, args.dry_run)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg)
        return cmd_surface(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleScheduleError, PreconditionError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        for line in getattr(exc, "report", []):
            print(f"  {line}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DimensionCapError as exc:
        print(f"numeric cap: {exc}", file=sys.stderr)
        return EXIT_CAP


if __name__ == "__main__":
    sys.exit(main())
