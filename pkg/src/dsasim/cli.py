"""Config-driven experiment runner.

Verbs: `run <config>` (synthesize, evaluate, write artifacts), `evaluate
<config> --theta <file>` (reproducibility path, no synthesis), `geometry
<config>` (emit geometry JSON), `version`. Configs are JSON in SI units;
bundled scenario names (fig2, fig3, fig4) resolve when the argument is not an
existing file. Exit codes: 0 ok, 1 validation, 2 I/O.
"""

from __future__ import annotations

import argparse
import hashlib
import importlib.resources
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .emcore import FrequencyGrid
from .exceptions import ConfigError, DsaError
from .geometry import ArrayGeometry, TestPointSet, build_disk_geometry, ring_test_points
from .loads import LoadConfig, VaractorParams
from .network import build_drive_matrix, build_network_model
from .reporting import (format_report_table, read_theta_json,
                        write_pattern_csv, write_report_json, write_theta_json,
                        write_trace_csv)
from .synth import (OptimizerConfig, build_steering_targets, evaluate_design,
                    synthesize)


def _field(doc: dict, key: str, typ, path: str, default=...):
    if key not in doc:
        if default is ...:
            raise ConfigError(f"{path}.{key}: missing")
        return default
    value = doc[key]
    if typ is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, typ):
        raise ConfigError(f"{path}.{key}: expected {typ.__name__}, got "
                          f"{type(value).__name__}")
    return value


def _positive(value, key: str, path: str):
    if value <= 0:
        raise ConfigError(f"{path}.{key}: must be positive")
    return value


@dataclass
class ExperimentConfig:
    freq: FrequencyGrid
    geometry: ArrayGeometry
    loads: LoadConfig
    tests: TestPointSet
    assignments: list
    optimizer_base: OptimizerConfig
    seeds: list
    rx_gain: float
    eta1_resimulate: bool
    output_dir: str
    fingerprint: str


def _fingerprint(doc: dict) -> str:
    physics = {key: doc.get(key) for key in
               ("frequency", "geometry", "loads", "test_ring", "targets")}
    blob = json.dumps(physics, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def parse_config(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")

    fdoc = _field(doc, "frequency", dict, "config")
    freq = FrequencyGrid(
        f0=_positive(_field(fdoc, "f0_hz", float, "frequency"), "f0_hz", "frequency"),
        bandwidth=_field(fdoc, "bandwidth_hz", float, "frequency", 0.0),
        count=_field(fdoc, "subcarriers", int, "frequency", 1))
    lam0 = freq.wavelength0

    gdoc = _field(doc, "geometry", dict, "config")

    def _len_or(key, fallback):
        value = gdoc.get(key)
        if value is None:
            return fallback
        return _positive(_field(gdoc, key, float, "geometry"), key, "geometry")

    try:
        geometry = build_disk_geometry(
            rings=_field(gdoc, "rings", int, "geometry"),
            ring_step=_len_or("ring_step_m", lam0 / 4),
            arc_spacing=_len_or("arc_spacing_m", lam0 / 4),
            element_length=_len_or("element_length_m", lam0 / 2),
            layers=_field(gdoc, "layers", int, "geometry", 1),
            layer_spacing=_len_or("layer_spacing_m", lam0 / 4),
            na=_field(gdoc, "na", int, "geometry"),
            active_placement=_field(gdoc, "active_placement", str, "geometry", "center"),
            count_policy=_field(gdoc, "count_policy", str, "geometry", "floor"))
    except DsaError as exc:
        raise ConfigError(f"geometry: {exc}") from exc

    ldoc = _field(doc, "loads", dict, "config")
    try:
        loads = LoadConfig(
            varactor=VaractorParams(
                rv=_field(ldoc, "rv_ohm", float, "loads", 0.1),
                l1=_field(ldoc, "l1_h", float, "loads", 2.5e-9),
                l2=_field(ldoc, "l2_h", float, "loads", 0.7e-9),
                cmin=_field(ldoc, "cmin_f", float, "loads", 0.47e-12),
                cmax=_field(ldoc, "cmax_f", float, "loads", 2.35e-12)),
            r=_field(ldoc, "source_resistance_ohm", float, "loads", 75.0),
            na=geometry.na,
            active_varactors=_field(ldoc, "active_varactors", bool, "loads", True))
    except DsaError as exc:
        raise ConfigError(f"loads: {exc}") from exc

    tdoc = _field(doc, "test_ring", dict, "config", {})
    try:
        tests = ring_test_points(
            count=_field(tdoc, "count", int, "test_ring", 108),
            distance=_field(tdoc, "distance_m", float, "test_ring", 100.0))
    except DsaError as exc:
        raise ConfigError(f"test_ring: {exc}") from exc
    rx_gain = _field(tdoc, "rx_gain", float, "test_ring", 1.0)
    if rx_gain < 0:
        raise ConfigError("test_ring.rx_gain: must be nonnegative")

    tgt = _field(doc, "targets", list, "config")
    assignments = []
    for row_index, row in enumerate(tgt):
        path = f"targets[{row_index}]"
        if not isinstance(row, dict):
            raise ConfigError(f"{path}: expected object")
        inp = _field(row, "input", int, path)
        sc = _field(row, "subcarrier", int, path, 1)
        angle = _field(row, "angle_deg", float, path)
        if not 1 <= inp <= geometry.na:
            raise ConfigError(f"{path}.input: outside 1..{geometry.na}")
        if not 1 <= sc <= freq.count:
            raise ConfigError(f"{path}.subcarrier: outside 1..{freq.count}")
        assignments.append((inp, sc, angle))

    odoc = _field(doc, "optimizer", dict, "config", {})
    seeds = _field(odoc, "seeds", list, "optimizer", [0])
    if not seeds or not all(isinstance(s, int) for s in seeds):
        raise ConfigError("optimizer.seeds: must be a nonempty list of ints")
    alpha = None
    if odoc.get("alpha") is not None:
        alpha = _field(odoc, "alpha", float, "optimizer")
    try:
        optimizer = OptimizerConfig(
            max_iterations=_field(odoc, "max_iterations", int, "optimizer", 5000),
            gradient_tolerance=_field(odoc, "gradient_tolerance", float,
                                      "optimizer", 1e-9),
            memory=_field(odoc, "memory", int, "optimizer", 20),
            init_scale=_field(odoc, "init_scale", float, "optimizer", 3.0),
            seed=seeds[0],
            fixed_alpha=alpha)
    except DsaError as exc:
        raise ConfigError(f"optimizer: {exc}") from exc

    return ExperimentConfig(
        freq=freq,
        geometry=geometry,
        loads=loads,
        tests=tests,
        assignments=assignments,
        optimizer_base=optimizer,
        seeds=list(seeds),
        rx_gain=rx_gain,
        eta1_resimulate=_field(doc, "eta1_resimulate", bool, "config", False),
        output_dir=_field(doc, "output_dir", str, "config", "out"),
        fingerprint=_fingerprint(doc),
    )


def scenario_path(name: str) -> Path:
    base = importlib.resources.files("dsasim") / "scenarios"
    candidate = base / (name if name.endswith(".json") else name + ".json")
    if not candidate.is_file():
        raise ConfigError(f"no bundled scenario named {name!r}")
    return Path(str(candidate))


def _resolve_config(arg: str) -> Path:
    p = Path(arg)
    if p.is_file():
        return p
    if "/" not in arg and "\\" not in arg:
        return scenario_path(arg)
    raise ConfigError(f"config file not found: {arg}")


def load_config(path_or_name: str) -> ExperimentConfig:
    path = _resolve_config(path_or_name)
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return parse_config(doc)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _build_scene(cfg: ExperimentConfig):
    model = build_network_model(cfg.geometry, cfg.tests, cfg.freq, cfg.loads,
                                cfg.rx_gain)
    v = build_drive_matrix(cfg.geometry.n, cfg.geometry.na, cfg.loads.r)
    target = build_steering_targets(cfg.tests, cfg.assignments,
                                    na=cfg.geometry.na, k_count=cfg.freq.count)
    return model, v, target


def run_experiment(config_path: str, output_dir: str | None = None,
                   iterations: int | None = None,
                   seeds: list | None = None) -> int:
    cfg = load_config(config_path)
    if iterations is not None:
        cfg = _with_iterations(cfg, iterations)
    if seeds:
        cfg.seeds = list(seeds)
    model, v, target = _build_scene(cfg)

    runs = []
    for seed in cfg.seeds:
        opt = _with_seed(cfg.optimizer_base, seed)
        theta, trace = synthesize(model, v, target, opt)
        runs.append((seed, theta, trace))
    best_seed, best_theta, best_trace = min(
        runs, key=lambda r: r[2].final_objective)

    report = evaluate_design(best_theta, model, v, target, cfg.tests,
                             eta1_resimulate=cfg.eta1_resimulate,
                             config_fingerprint=cfg.fingerprint)

    out = Path(output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg.geometry.save(out / "geometry.json")
    write_theta_json(best_theta, out / "theta.json", cfg.fingerprint)
    write_trace_csv(best_trace, out / "trace.csv")
    write_pattern_csv(report, out / "pattern.csv")
    write_report_json(report, out / "report.json")
    summary = {
        "seeds": [s for s, _, _ in runs],
        "per_seed_final_objective": [t.final_objective for _, _, t in runs],
        "per_seed_converged": [t.converged for _, _, t in runs],
        "best_seed": best_seed,
        "converged": best_trace.converged,
        "line_search_failed": best_trace.line_search_failed,
        "iterations": int(best_trace.iterations[-1]),
        "n_evaluations": best_trace.n_evaluations,
        "initial_objective": best_trace.initial_objective,
        "final_objective": best_trace.final_objective,
        "wall_time_s": best_trace.wall_time_s,
    }
    with open(out / "synthesis.json", "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)
        fh.write("\n")

    print(format_report_table(report))
    if not best_trace.converged:
        print("warning: gradient tolerance not reached within the iteration "
              "budget (see synthesis.json)", file=sys.stderr)
    return 0


def _with_seed(opt: OptimizerConfig, seed: int) -> OptimizerConfig:
    return OptimizerConfig(
        max_iterations=opt.max_iterations,
        gradient_tolerance=opt.gradient_tolerance,
        memory=opt.memory,
        init_policy=opt.init_policy,
        init_scale=opt.init_scale,
        seed=seed,
        max_backtracks=opt.max_backtracks,
        armijo_c1=opt.armijo_c1,
        fixed_alpha=opt.fixed_alpha)


def _with_iterations(cfg: ExperimentConfig, iterations: int) -> ExperimentConfig:
    if iterations < 0:
        raise ConfigError("--iterations: must be nonnegative")
    opt = cfg.optimizer_base
    cfg.optimizer_base = OptimizerConfig(
        max_iterations=iterations,
        gradient_tolerance=opt.gradient_tolerance,
        memory=opt.memory,
        init_policy=opt.init_policy,
        init_scale=opt.init_scale,
        seed=opt.seed,
        max_backtracks=opt.max_backtracks,
        armijo_c1=opt.armijo_c1,
        fixed_alpha=opt.fixed_alpha)
    return cfg


def evaluate_only(config_path: str, theta_path: str,
                  output_dir: str | None = None) -> int:
    cfg = load_config(config_path)
    theta, stored_fp = read_theta_json(theta_path)
    if theta.shape[0] != cfg.geometry.n:
        raise ConfigError(
            f"theta file has {theta.shape[0]} entries, geometry has "
            f"{cfg.geometry.n} elements")
    if stored_fp is not None and stored_fp != cfg.fingerprint:
        print("warning: theta file fingerprint does not match this config; "
              "evaluating anyway", file=sys.stderr)
    model, v, target = _build_scene(cfg)
    report = evaluate_design(theta, model, v, target, cfg.tests,
                             eta1_resimulate=cfg.eta1_resimulate,
                             config_fingerprint=cfg.fingerprint)
    out = Path(output_dir or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_pattern_csv(report, out / "pattern.csv")
    write_report_json(report, out / "report.json")
    print(format_report_table(report))
    return 0


def emit_geometry(config_path: str) -> int:
    cfg = load_config(config_path)
    print(json.dumps(cfg.geometry.to_json_dict(), indent=1, sort_keys=True))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dsasim",
        description="Simulation and load synthesis for reactively loaded "
                    "dipole scattering arrays.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="synthesize loads and write artifacts")
    p_run.add_argument("config", help="config file or bundled scenario name")
    p_run.add_argument("--output", help="override output directory")
    p_run.add_argument("--iterations", type=int,
                       help="override optimizer iteration budget")
    p_run.add_argument("--seeds", help="comma-separated seed list override")

    p_eval = sub.add_parser("evaluate", help="re-evaluate a stored theta")
    p_eval.add_argument("config")
    p_eval.add_argument("--theta", required=True)
    p_eval.add_argument("--output")

    p_geom = sub.add_parser("geometry", help="emit geometry JSON to stdout")
    p_geom.add_argument("config")

    sub.add_parser("version", help="print the package version")

    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            seeds = None
            if args.seeds:
                try:
                    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
                except ValueError:
                    raise ConfigError("--seeds: expected comma-separated ints")
            return run_experiment(args.config, args.output, args.iterations,
                                  seeds)
        if args.command == "evaluate":
            return evaluate_only(args.config, args.theta, args.output)
        if args.command == "geometry":
            return emit_geometry(args.config)
        if args.command == "version":
            from . import __version__
            print(__version__)
            return 0
    except DsaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
