"""Command-line front end.

Every subcommand reads a flat ``key = value`` config (``--config``), prints a
human-readable summary, and writes CSV to ``--out`` when given.

Exit codes: 0 success, 2 configuration error, 3 domain-invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from . import device as dev
from .errors import ConfigError, DomainError
from .experiments import (
    SimulatedDevice,
    calibrate,
    design_t2_experiment,
    estimate_t2,
    extract_visibility,
    fringe_sweep,
    read_t2_csv,
    run_t2_experiment,
    sense_field,
    sensor_p1,
    write_t2_csv,
)
from .interferometer import MziConfig, visibility_closed_form
from .qubit import BeamsplitterSpec, ChannelContraction, check_complete_positivity

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3

COMMANDS = ("fringe", "calibrate", "t2-design", "t2-fit", "design", "sense", "cp-check")

# Display units.
UM, NS, MT, UEV, UV = 1e-6, 1e-9, 1e-3, 1e-6, 1e-6


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_path: Path
    output_path: Path | None = None
    seed: int | None = None


def _fmt(x: float) -> str:
    return format(float(x), ".15g")


def _csv_text(header: list[str], rows: list[list[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def _write(path: Path | None, text: str) -> None:
    if path is None:
        return
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write output {path}: {exc}") from exc


def _int(cfg: Mapping[str, str], key: str, default: int | None = None) -> int | None:
    if key not in cfg:
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key}: not an integer: {cfg[key]!r}") from exc


def _opt_float(cfg: Mapping[str, str], key: str) -> float | None:
    return dev.parse_float(cfg, key) if key in cfg else None


def _seed(m: RunManifest, cfg: Mapping[str, str]) -> int | None:
    return m.seed if m.seed is not None else _int(cfg, "seed")


def _angles(cfg: Mapping[str, str]) -> tuple[float, float]:
    if "theta" in cfg:
        theta = dev.parse_float(cfg, "theta")
        return theta, theta
    return dev.parse_float(cfg, "theta1"), dev.parse_float(cfg, "theta2")


def _dephasing(cfg: Mapping[str, str], required: bool = True) -> tuple[float, float]:
    """``(tau, t2)`` from either ``v`` or the ``tau``/``t2`` pair."""
    if "v" in cfg or not ("tau" in cfg or "t2" in cfg):
        if "v" not in cfg and not required:
            return 0.0, math.inf
        v = dev.parse_float(cfg, "v")
        if not 0.0 <= v <= 1.0:
            raise DomainError(f"v must lie in [0, 1], got {v!r}")
        return (math.inf if v == 0.0 else -math.log(v)), 1.0
    return dev.parse_float(cfg, "tau"), dev.parse_float(cfg, "t2")


def cmd_fringe(m: RunManifest, cfg: Mapping[str, str]) -> None:
    theta1, theta2 = _angles(cfg)
    gamma = dev.parse_float(cfg, "gamma", 0.0)
    tau, t2 = _dephasing(cfg)
    n_points = _int(cfg, "n_points", 64)
    n_samples = _int(cfg, "n_samples")
    mzi = MziConfig(BeamsplitterSpec(theta1, gamma), BeamsplitterSpec(theta2, gamma), tau=tau, t2=t2)
    data = fringe_sweep(mzi, n_points, n_samples, _seed(m, cfg))
    _write(m.output_path, data.to_csv())
    vis = extract_visibility(data)
    print(f"theta1={theta1:.6f} theta2={theta2:.6f} gamma={gamma:.6f} v={mzi.coherence:.6f}")
    print(f"mean_p0={np.mean(data.p0s):.6f} mean_p1={np.mean(data.p1s):.6f}")
    print(f"v0={vis.v0:.6f} v1={vis.v1:.6f} (sinusoid fit: v0={vis.v0_fit:.6f} v1={vis.v1_fit:.6f})")
    if theta1 == theta2 and 0.0 < theta1 < math.pi / 2:
        v0, v1 = visibility_closed_form(theta1, mzi.coherence)
        print(f"closed form: v0={v0:.6f} v1={v1:.6f}")


def cmd_calibrate(m: RunManifest, cfg: Mapping[str, str]) -> None:
    tau, t2 = _dephasing(cfg, required=False)
    device = SimulatedDevice(
        offset1=dev.parse_float(cfg, "offset1", 0.0),
        offset2=dev.parse_float(cfg, "offset2", 0.0),
        gamma=dev.parse_float(cfg, "gamma", 0.0),
        tau=tau,
        t2=t2,
        n_points=_int(cfg, "n_points", 64),
        n_samples=_int(cfg, "n_samples"),
        seed=_seed(m, cfg),
    )
    result = calibrate(
        device,
        tol=dev.parse_float(cfg, "tol", 1e-6),
        theta2_start=dev.parse_float(cfg, "theta2_start", math.pi / 4),
    )
    _write(m.output_path, device.sweep(result.theta1, result.theta2).to_csv())
    true1, true2 = device.true_angles(result.theta1, result.theta2)
    print(f"theta1_hat={result.theta1:.9f} theta2_hat={result.theta2:.9f}")
    print(f"true angles: theta1={true1:.9f} theta2={true2:.9f} (pi/4={math.pi / 4:.9f})")
    print(f"mean_p1={result.mean_p1:.9f} v0={result.visibility.v0:.6f} v1={result.visibility.v1:.6f}")


def cmd_t2_design(m: RunManifest, cfg: Mapping[str, str]) -> None:
    design = design_t2_experiment(
        dev.parse_float(cfg, "t2_guess"),
        _int(cfg, "n_settings", 5),
        dev.parse_float(cfg, "v_saw", 2700.0),
    )
    rows = [[length, tau] for length, tau in zip(design.lengths, design.taus)]
    _write(m.output_path, _csv_text(["length_m", "tau_s"], rows))
    print(f"{'setting':>7} {'length_um':>10} {'tau_ns':>8}")
    for i, (length, tau) in enumerate(rows, 1):
        print(f"{i:>7} {length / UM:>10.4f} {tau / NS:>8.4f}")
    print(f"increment_um={design.increment / UM:.4f} visibility_floor={design.visibility_floor:.4f}")


def cmd_t2(m: RunManifest, cfg: Mapping[str, str]) -> None:
    if "t2" in cfg:
        run = run_t2_experiment(
            dev.parse_float(cfg, "t2"),
            t2_guess=_opt_float(cfg, "t2_guess"),
            n_settings=_int(cfg, "n_settings", 5),
            v_saw=dev.parse_float(cfg, "v_saw", 2700.0),
            n_points=_int(cfg, "n_points", 64),
            n_samples=_int(cfg, "n_samples"),
            seed=_seed(m, cfg),
            gate_fidelity=dev.parse_float(cfg, "gate_fidelity", 1.0),
        )
        taus, vis, fit = run.design.taus, run.v1s, run.fit
        print("mode=simulation")
    elif "data" in cfg:
        data_path = Path(cfg["data"])
        if not data_path.is_absolute():
            data_path = m.config_path.parent / data_path
        try:
            taus, vis = read_t2_csv(data_path)
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read T2 data {data_path}: {exc}") from exc
        fit = estimate_t2(taus, vis)
        print("mode=fit")
    else:
        raise ConfigError("missing config key: t2 (simulation mode) or data (fit mode)")
    _write(m.output_path, write_t2_csv(taus, vis, fit))
    for tau, v in zip(taus, vis):
        print(f"tau_ns={tau / NS:.4f} visibility={v:.6f}")
    print(f"t2_hat_ns={fit.t2_hat / NS:.6f} +/- {fit.t2_stderr / NS:.6f} amplitude_hat={fit.amplitude_hat:.6f}")


def cmd_design(m: RunManifest, cfg: Mapping[str, str]) -> None:
    params = dev.DeviceParams.from_mapping(cfg)
    v_min = dev.parse_float(cfg, "v_min", 100e-6)
    t2_guess = dev.parse_float(cfg, "t2_guess", 1e-9)
    rows: list[list[object]] = []

    (area,) = params.require("area")
    b2pi = dev.ab_field_for_2pi(area)
    rows.append(["ab_field_for_2pi", b2pi, "T"])
    print(f"AB field for 2*pi over {area / UM**2:.3f} um^2: {b2pi / MT:.3f} mT")

    gate = dev.max_gate_length(v_min, params.v_saw)
    rows.append(["max_gate_length", gate, "m"])
    print(f"max phase-gate length at {v_min / UV:.1f} uV per 2*pi: {gate / UM:.4f} um")

    (temperature,) = params.require("temperature")
    kt = dev.thermal_energy(temperature)
    rows.append(["thermal_energy", kt, "eV"])
    print(f"thermal energy at {temperature * 1e3:.1f} mK: {kt / UEV:.3f} ueV")

    if params.l_tunnel is not None:
        t_gap = dev.transit_time(params.l_tunnel, params.v_saw)
        rows.append(["tunnel_transit_time", t_gap, "s"])
        print(f"tunnel-gap transit over {params.l_tunnel / 1e-9:.0f} nm: {t_gap / 1e-12:.1f} ps")

    design = design_t2_experiment(t2_guess, _int(cfg, "n_settings", 5), params.v_saw)
    print(f"T2 schedule for T2 guess {t2_guess / NS:.3f} ns:")
    for i, (length, tau) in enumerate(zip(design.lengths, design.taus), 1):
        rows.append([f"t2_length_{i}", length, "m"])
        print(f"  setting {i}: length {length / UM:.4f} um, tau {tau / NS:.4f} ns")
    rows.append(["t2_increment", design.increment, "m"])
    print(f"  increment {design.increment / UM:.4f} um, visibility floor {design.visibility_floor:.4f}")

    (f_saw,) = params.require("f_saw")
    print(f"shot noise at f_saw = {f_saw / 1e9:.3f} GHz:")
    for exponent in range(-6, 1):
        dt = 10.0**exponent
        rel = dev.shot_noise_relative(f_saw, dt)
        rows.append([f"shot_noise_dt_1e{exponent}", rel, "1"])
        print(f"  dt = 1e{exponent} s: N = {f_saw * dt:.3e}, 1/sqrt(N) = {rel:.3e}")
    _write(m.output_path, _csv_text(["quantity", "value", "unit"], rows))


def cmd_sense(m: RunManifest, cfg: Mapping[str, str]) -> None:
    params = dev.DeviceParams.from_mapping(cfg)
    working_point = dev.parse_float(cfg, "working_point", math.pi / 2)
    delta_t = dev.parse_float(cfg, "delta_t")
    visibility = dev.parse_float(cfg, "visibility", 1.0)
    gamma = dev.parse_float(cfg, "gamma", 0.0)
    if "observed_p1" in cfg:
        observed = dev.parse_float(cfg, "observed_p1")
    else:
        e_true = dev.parse_float(cfg, "e_field")
        observed = sensor_p1(params, e_true, working_point, visibility, gamma)
        seed = _seed(m, cfg)
        if seed is not None:
            (f_saw,) = params.require("f_saw")
            n = int(round(f_saw * delta_t))
            observed = np.random.default_rng(seed).binomial(n, observed) / n
        print(f"simulated observed_p1={observed:.9f} from e_field={e_true:.6g} V/m")
    est = sense_field(params, observed, working_point, delta_t, visibility, gamma)
    _write(m.output_path, _csv_text(["e_hat", "sigma", "n_electrons"], [[est.e_hat, est.sigma, est.n_electrons]]))
    print(f"E_hat={est.e_hat:.6g} V/m +/- {est.sigma:.3g} V/m (N={est.n_electrons:.3e} electrons)")


def cmd_cp_check(m: RunManifest, cfg: Mapping[str, str]) -> None:
    c = ChannelContraction(*(dev.parse_float(cfg, k) for k in ("eta_x", "eta_y", "eta_z")))
    ok = check_complete_positivity(c)
    _write(
        m.output_path,
        _csv_text(["eta_x", "eta_y", "eta_z", "completely_positive"], [[c.eta_x, c.eta_y, c.eta_z, str(ok).lower()]]),
    )
    print(f"eta=({c.eta_x:g}, {c.eta_y:g}, {c.eta_z:g}) completely_positive={str(ok).lower()}")


HANDLERS: dict[str, Callable[[RunManifest, Mapping[str, str]], None]] = {
    "fringe": cmd_fringe,
    "calibrate": cmd_calibrate,
    "t2-design": cmd_t2_design,
    "t2-fit": cmd_t2,
    "design": cmd_design,
    "sense": cmd_sense,
    "cp-check": cmd_cp_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="flat key = value config file")
    common.add_argument("--out", type=Path, default=None, help="CSV output path")
    common.add_argument("--seed", type=int, default=None, help="seed for sampled runs")
    parser = argparse.ArgumentParser(prog="saw-mzi", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def run(m: RunManifest) -> None:
    cfg = dev.read_config(m.config_path)
    HANDLERS[m.command](m, cfg)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    manifest = RunManifest(args.command, args.config, args.out, args.seed)
    try:
        run(manifest)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
