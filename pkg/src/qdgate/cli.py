"""Command-line front end: ``qdgate run | fig2 | verify``."""

from __future__ import annotations

import argparse
import csv
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, load_config, units_help
from .dynamics import NoiseMode
from .gate import PANELS, FidelityTrajectory, GateScenario, fig2_presets, run_scenario
from .model import Configuration, GateSetup, HierarchyWarning, Transition
from .verification import run_all

COLUMNS = ("time_ps", "fidelity", "trace", "purity", "min_eig")
DIGITS = 12
PLOT_SCRIPT = "fig2.gp"


def _fmt(x: float) -> str:
    return f"{x:.{DIGITS}g}"


def write_trajectory_csv(path: Path, tr: FidelityTrajectory, cfg: RunConfig) -> None:
    s = tr.scenario
    meta = [("qdgate", __version__), *cfg.echo()]
    meta = [(k, v) for k, v in meta if k not in ("configuration", "transition", "noise")]
    meta += [
        ("configuration", s.setup.configuration.value),
        ("transition", s.setup.transition.value),
        ("noise", s.mode.value),
        ("temperature", f"{float(s.T)!r} K"),
        ("alpha", repr(float(s.setup.alpha))),
        ("omega_l", f"{float(s.setup.omega_l)!r} meV"),
        ("d", f"{float(s.setup.d)!r} nm"),
        ("gate_time", f"{float(s.gate_time)!r} ps"),
        ("t_max", f"{float(s.resolved_t_max)!r} ps"),
        ("dt", f"{float(s.resolved_dt)!r} ps"),
    ]
    if s.panel:
        meta += [("panel", s.panel), ("curve", s.curve)]
    if tr.error:
        meta.append(("aborted", tr.error))
    with open(path, "w", newline="") as fh:
        for k, v in meta:
            fh.write(f"# {k} = {v}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in zip(tr.times, tr.fidelity, tr.trace, tr.purity, tr.min_eigenvalue):
            w.writerow([_fmt(x) for x in row])


def read_trajectory_csv(path: str | Path) -> tuple[dict[str, str], dict[str, np.ndarray]]:
    """Parse a file written by :func:`write_trajectory_csv` into (metadata, columns)."""
    meta, rows = {}, []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            else:
                rows.append(line)
    reader = csv.reader(rows)
    header = next(reader)
    data = np.array([[float(x) for x in r] for r in reader], dtype=float).reshape(-1, len(header))
    return meta, {name: data[:, i] for i, name in enumerate(header)}


def _temperature_path(base: Path, T: float) -> Path:
    return base.with_name(f"{base.stem}_T{T:g}K{base.suffix or '.csv'}")


def cmd_run(cfg: RunConfig) -> int:
    setup = GateSetup.create(cfg.configuration, cfg.transition, cfg.params, ring_d_meaning=cfg.ring_d_meaning)
    out = Path(cfg.output or "fidelity.csv")
    temps = cfg.resolved_temperatures
    status = 0
    for T in temps:
        s = GateScenario(setup, cfg.params, cfg.noise, T, cfg.t_max, cfg.dt, sample_every=cfg.sample_every)
        tr = run_scenario(s)
        path = out if len(temps) == 1 else _temperature_path(out, T)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(path, tr, cfg)
        print(f"wrote {path} ({len(tr.times)} rows)")
        if tr.error:
            print(f"error: integration stopped early: {tr.error}", file=sys.stderr)
            status = 1
    return status


def plot_script(scenarios: list[GateScenario]) -> str:
    titles = {"a": "ring", "b": "line, upper transition", "c": "line, lower transition"}
    lines = [
        "# gnuplot script: fidelity against delay time, one panel per configuration",
        'set datafile separator ","',
        'set datafile commentschars "#"',
        'set terminal pngcairo size 700,1500',
        'set output "fig2.png"',
        "set multiplot layout 3,1",
        'set xlabel "delay time (ps)"',
        'set ylabel "fidelity"',
        "set yrange [0.5:1.02]",
        "set key bottom right",
    ]
    for panel in PANELS:
        items = [s for s in scenarios if s.panel == panel]
        lines.append(f'set title "({panel}) {titles[panel]}"')
        plots = [f'"{s.name}.csv" every ::1 using 1:2 with lines title "{s.curve.replace("_", " ")}"' for s in items]
        lines.append("plot " + ", \\\n     ".join(plots))
    lines += ["unset multiplot", ""]
    return "\n".join(lines)


def cmd_fig2(cfg: RunConfig) -> int:
    out = Path(cfg.output or "fig2")
    out.mkdir(parents=True, exist_ok=True)
    scenarios = fig2_presets(cfg.params, cfg.ring_d_meaning)
    if cfg.t_max is not None or cfg.dt is not None or cfg.sample_every != 1:
        scenarios = [s.with_(t_max=cfg.t_max, dt=cfg.dt, sample_every=cfg.sample_every) for s in scenarios]
    status = 0
    for s in scenarios:
        tr = run_scenario(s)
        write_trajectory_csv(out / f"{s.name}.csv", tr, cfg)
        if tr.error:
            print(f"error: {s.name}: integration stopped early: {tr.error}", file=sys.stderr)
            status = 1
    (out / PLOT_SCRIPT).write_text(plot_script(scenarios))
    print(f"wrote {len(scenarios)} trajectories and {PLOT_SCRIPT} to {out}")
    return status


def cmd_verify(cfg: RunConfig) -> int:
    # the requested setup must exist even though every case is checked
    GateSetup.create(cfg.configuration, cfg.transition, cfg.params, ring_d_meaning=cfg.ring_d_meaning)
    for msg in cfg.params.hierarchy_warnings():
        print(f"WARNING {msg}")
    checks = run_all(cfg.params, cfg.ring_d_meaning)
    for c in checks:
        print(c.line())
        for extra in c.info:
            print(f"      {extra}")
    failed = [c.name for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


COMMANDS = {"run": cmd_run, "fig2": cmd_fig2, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdgate",
        description="Simulate the one-step three-qubit CPHASE gate on coupled quantum dots.",
        epilog=units_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value file; '#' starts a comment")
    common.add_argument("--output", metavar="PATH", help="CSV file for run, directory for fig2")
    common.add_argument("--noise", choices=[m.value for m in NoiseMode])
    common.add_argument("--configuration", choices=[c.value for c in Configuration])
    common.add_argument("--transition", choices=[t.value for t in Transition])
    common.add_argument("--temperature", metavar="K", type=float, action="append",
                        help="bath temperature; repeat for several runs")
    common.add_argument("--t-max", metavar="PS", type=float, help="simulated time (default 2.5 gate times)")
    common.add_argument("--dt", metavar="PS", type=float, help="RK4 step (default gate time / 2000)")
    common.add_argument("--sample-every", metavar="N", type=int, help="write every N-th step")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("run", "integrate one scenario and write a fidelity CSV"),
        ("fig2", "write the fifteen preset trajectories and a gnuplot script"),
        ("verify", "run the self-checks; exit status 0 only if all pass"),
    ):
        sub.add_parser(name, parents=[common], help=help_text, epilog=units_help(),
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if args.output is not None:
        overrides["output"] = args.output
    if args.noise is not None:
        overrides["noise"] = NoiseMode(args.noise)
    if args.configuration is not None:
        overrides["configuration"] = Configuration(args.configuration)
    if args.transition is not None:
        overrides["transition"] = Transition(args.transition)
    if args.temperature:
        overrides["temperatures"] = tuple(args.temperature)
    if args.t_max is not None:
        overrides["t_max"] = args.t_max
    if args.dt is not None:
        overrides["dt"] = args.dt
    if args.sample_every is not None:
        overrides["sample_every"] = args.sample_every
    return cfg.with_(**overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            # hierarchy violations are reported by verify, not as Python warnings
            warnings.simplefilter("ignore", HierarchyWarning)
            cfg = resolve_config(args)
            if args.command != "verify":
                for msg in cfg.params.hierarchy_warnings():
                    print(f"warning: {msg}", file=sys.stderr)
            return COMMANDS[args.command](cfg)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
