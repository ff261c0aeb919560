"""Command line entry point.

    electron-sg COMMAND [--config PATH] [--out DIR] [--set key=value ...]
                        [--seed N] [--threads N]

Commands: table1, fieldmap, scenario, gradient-sweep, voltage-sweep,
required-gradient. Every run writes ``manifest.txt`` to the output
directory. It is a complete config file, so
``electron-sg COMMAND --config DIR/manifest.txt`` repeats the run exactly.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import export
from .config import ConfigError, Params, apply_overrides, parse_config, render
from .dynamics import required_gradient
from .experiment import ScenarioError, gradient_sweep, run_scenario, trace_trajectories, voltage_sweep
from .fields import FieldSingularityError, inhomogeneity_map
from .kinematics import accelerate_classical, table_1, write_table_csv
from .constants import constants

log = logging.getLogger("electron_sg")

COMMANDS = ("table1", "fieldmap", "scenario", "gradient-sweep", "voltage-sweep",
            "required-gradient")


@dataclass
class RunConfig:
    command: str
    input_path: Path | None = None
    output_dir: Path = Path(".")
    overrides: list[str] = field(default_factory=list)
    seed: int | None = None
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")


def load_params(config: RunConfig) -> Params:
    params = Params()
    if config.input_path is not None:
        params = parse_config(Path(config.input_path).read_text(), params)
    params = apply_overrides(params, config.overrides)
    if config.seed is not None:
        params = replace(params, seed=config.seed)
    return params


def _table1(p: Params, out: Path) -> None:
    write_table_csv(table_1(), out / "table1.csv")
    log.info("wrote %s", out / "table1.csv")


def _fieldmap(p: Params, out: Path) -> None:
    wires = p.wires()
    a = wires.half_separation
    y_range = (p.map_y_min if p.map_y_min is not None else -2.0 * a / 3.0,
               p.map_y_max if p.map_y_max is not None else 2.0 * a / 3.0)
    z_range = (p.map_z_min if p.map_z_min is not None else -0.6 * a,
               p.map_z_max if p.map_z_max is not None else 0.6 * a)
    fmap = inhomogeneity_map(wires, y_range, z_range, p.map_resolution)
    export.write_fieldmap_csv(out / "fieldmap.csv", fmap)
    export.write_pgm(out / "fieldmap.pgm", export.linear_to_gray(fmap.grad_B_norm[::-1]))


def _scenario(p: Params, out: Path, threads: int) -> None:
    model = p.force_model()
    image, report = run_scenario(p.beam(), p.geometry(), model, p.integrator(),
                                 threads=threads, bin_size=p.bin_size, max_bins=p.max_bins)
    export.write_report_csv(out / "report.csv", [("scenario", report)])
    export.write_pgm(out / "screen.pgm", export.screen_to_gray(image))
    export.write_hits_csv(out / "hits.csv", image)
    if p.trajectory_count > 0:
        rows = trace_trajectories(p.beam(), p.geometry(), model, p.integrator(),
                                  count=p.trajectory_count, stride=p.trajectory_stride)
        export.write_trajectory_csv(out / "trajectories.csv", rows)
    print(f"splitting {report.splitting:.6g} m at magnet exit, "
          f"{report.screen_splitting:.6g} m at screen; "
          f"Lorentz deflection {report.lorentz_deflection:.6g} m; resolved={report.resolved}")


def _gradient_sweep(p: Params, out: Path, threads: int) -> None:
    reports = gradient_sweep(p.beam(), p.geometry(), p.gradients, p.integrator(),
                             p.force_model(), threads=threads, bin_size=p.bin_size,
                             max_bins=p.max_bins)
    export.write_report_csv(out / "report.csv",
                            [(f"gradient-{i}", r) for i, r in enumerate(reports)])


def _voltage_sweep(p: Params, out: Path, threads: int) -> None:
    reports = []
    for volts in p.voltages:
        reports += voltage_sweep([volts], p.beam(), p.geometry(), p.force_model(),
                                 p.integrator(volts), threads=threads,
                                 bin_size=p.bin_size, max_bins=p.max_bins)
    export.write_report_csv(out / "report.csv",
                            [(f"voltage-{i}", r) for i, r in enumerate(reports)])


def _required_gradient(p: Params, out: Path) -> None:
    v = accelerate_classical(p.voltage).velocity
    L = p.magnet_exit_x - p.magnet_entry_x
    g = required_gradient(p.target_split, L, v)
    lines = [
        f"required_gradient_T_per_m = {g!r}",
        f"target_split_m = {p.target_split!r}",
        f"interaction_length_m = {L!r}",
        f"voltage_V = {p.voltage!r}",
        f"speed_m_per_s = {v!r}",
        f"moment_to_mass = {constants().moment_to_mass!r}",
    ]
    text = "\n".join(lines) + "\n"
    (out / "required_gradient.txt").write_text(text)
    print(text, end="")


def run(config: RunConfig) -> int:
    """Execute one command; 0 on success, non-zero with a message otherwise."""
    try:
        params = load_params(config)
        out = Path(config.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "manifest.txt").write_text(
            f"# electron-sg manifest\n# command: {config.command}\n" + render(params))
        match config.command:
            case "table1":
                _table1(params, out)
            case "fieldmap":
                _fieldmap(params, out)
            case "scenario":
                _scenario(params, out, config.threads)
            case "gradient-sweep":
                _gradient_sweep(params, out, config.threads)
            case "voltage-sweep":
                _voltage_sweep(params, out, config.threads)
            case "required-gradient":
                _required_gradient(params, out)
    except (ConfigError, ScenarioError, FieldSingularityError, ValueError, OSError) as exc:
        print(f"electron-sg {config.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="electron-sg",
                                 description="Free-electron Stern-Gerlach simulator")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", type=Path, help="flat key = value config file")
    ap.add_argument("--out", type=Path, default=Path("."), help="output directory")
    ap.add_argument("--set", dest="overrides", action="append", default=[],
                    metavar="KEY=VALUE", help="override one config key (repeatable)")
    ap.add_argument("--seed", type=int, help="RNG seed (overrides the config)")
    ap.add_argument("--threads", type=int, default=1, help="worker threads for the ensemble")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(message)s")
    return run(RunConfig(args.command, args.config, args.out, args.overrides, args.seed,
                         max(1, args.threads)))


if __name__ == "__main__":
    sys.exit(main())
