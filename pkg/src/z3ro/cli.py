"""Experiment runner: reproduce each figure's data as CSV from a JSON config.

Subcommands: ``pattern``, ``array-gain``, ``backoff-sweep``,
``oracle-verify``. Exit codes: 0 success, 2 invalid config, 3
infeasibility, 4 numeric failure. Output is written to a temp file and
renamed on success so no partial CSV is ever left behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from importlib import resources

import numpy as np

from .channels import los_ula_channel
from .core import ArrayGeometry, LinkBudget, SeededRng, db_from_linear
from .metrics import backoff_sweep
from .oracle import probe_realness_conjecture, solve_real_problem, theorem1_candidate
from .pa import IdealPa, ThirdOrderPa, parse_pa
from .precoding import mrt_weights, snr_mrt, z3ro_los_weights, z3ro_snr
from .radiation import AngularGrid, directivity, radiation_pattern

__all__ = [
    "main",
    "run_pattern",
    "run_array_gain",
    "run_backoff_sweep",
    "run_oracle_verify",
    "load_config",
    "preset_path",
    "ConfigError",
    "InfeasibilityError",
]

ORACLE_GAP_RTOL = 1e-6


class ConfigError(ValueError):
    """Invalid experiment configuration (exit code 2)."""


class InfeasibilityError(RuntimeError):
    """Optimization failed to reach feasibility (exit code 3)."""


def _check_keys(config, allowed, required):
    unknown = set(config) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    missing = set(required) - set(config)
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(sorted(missing))}")


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(path, header, rows):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".z3ro-", suffix=".csv", dir=directory)
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_config(path):
    try:
        with open(path) as fh:
            config = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    return config


def preset_path(name):
    """Filesystem path of a shipped preset config (e.g. 'fig4')."""
    return str(resources.files("z3ro") / "presets" / f"{name}.json")


def _positive_int(config, key, default=None):
    value = config.get(key, default)
    if value is None or int(value) != value or value < 1:
        raise ConfigError(f"config key '{key}' must be a positive integer, got {value!r}")
    return int(value)


def run_pattern(config):
    """Radiation/directivity patterns for a list of precoder runs."""
    _check_keys(
        config,
        allowed={
            "experiment", "spacing_over_wavelength", "user_angle_deg", "pa",
            "symbol_power", "path_loss", "grid_points", "runs", "out", "seed",
        },
        required={"experiment", "user_angle_deg", "runs", "out"},
    )
    try:
        pa = parse_pa(config.get("pa", "poly3:-0.1,0.0"))
    except ValueError as exc:
        raise ConfigError(f"config key 'pa': {exc}") from exc
    if not isinstance(pa, (IdealPa, ThirdOrderPa)):
        raise ConfigError("config key 'pa': pattern experiments need 'ideal' or 'poly3' PAs")
    grid_points = _positive_int(config, "grid_points", 4096)
    if grid_points < 1024:
        raise ConfigError("config key 'grid_points' must be >= 1024")
    runs = config["runs"]
    if not isinstance(runs, list) or not runs:
        raise ConfigError("config key 'runs' must be a nonempty list")
    angle = float(config["user_angle_deg"]) * np.pi / 180.0
    if not 0.0 < angle < np.pi:
        raise ConfigError("config key 'user_angle_deg' must lie in (0, 180)")
    spacing = float(config.get("spacing_over_wavelength", 0.5))
    symbol_power = float(config.get("symbol_power", 1.0))
    path_loss = float(config.get("path_loss", 1.0))
    grid = AngularGrid.uniform(grid_points)

    rows = []
    for run in runs:
        _check_keys(
            run,
            allowed={"label", "num_antennas", "precoder", "num_saturated", "selection"},
            required={"num_antennas", "precoder"},
        )
        m = _positive_int(run, "num_antennas")
        geometry = ArrayGeometry(m, spacing)
        kind = run["precoder"]
        if kind == "mrt":
            weights = mrt_weights(los_ula_channel(geometry, angle, path_loss))
            label = run.get("label", f"mrt_m{m}")
        elif kind == "z3ro":
            ms = _positive_int(run, "num_saturated", 1)
            weights = z3ro_los_weights(
                geometry, angle, path_loss, ms, run.get("selection", "first")
            )
            label = run.get("label", f"z3ro_m{m}_ms{ms}")
        else:
            raise ConfigError(f"config key 'precoder' must be 'mrt' or 'z3ro', got {kind!r}")
        pattern = directivity(radiation_pattern(geometry, weights, pa, symbol_power, grid), grid)
        # one extra sample at the exact user angle so designed nulls show up
        # as true zeros instead of falling between grid points
        at_user = radiation_pattern(
            geometry, weights, pa, symbol_power, AngularGrid(np.array([angle]))
        )

        def _scale(total):
            return 2.0 * np.pi / total if total > 0.0 else 0.0

        angles_deg = np.append(grid.angles, angle) * 180.0 / np.pi
        p_total = np.append(pattern.p_total, at_user.p_total[0])
        p_linear = np.append(pattern.p_linear, at_user.p_linear[0])
        p_dist3 = np.append(pattern.p_dist3, at_user.p_dist3[0])
        d_total = db_from_linear(np.append(pattern.d_total, at_user.p_total * _scale(pattern.total_power)))
        d_linear = db_from_linear(np.append(pattern.d_linear, at_user.p_linear * _scale(pattern.total_linear)))
        d_dist3 = db_from_linear(np.append(pattern.d_dist3, at_user.p_dist3 * _scale(pattern.total_dist3)))
        for i in np.argsort(angles_deg, kind="stable"):
            rows.append(
                (
                    label,
                    float(angles_deg[i]),
                    float(p_total[i]),
                    float(p_linear[i]),
                    float(p_dist3[i]),
                    float(d_total[i]),
                    float(d_linear[i]),
                    float(d_dist3[i]),
                )
            )
    header = [
        "precoder", "angle_deg", "P_total", "P_linear", "P_dist3",
        "D_total_dB", "D_linear_dB", "D_dist3_dB",
    ]
    return _write_csv(config["out"], header, rows)


def run_array_gain(config):
    """Closed-form MRT vs Z3RO array-gain sweep over (M, M_s)."""
    _check_keys(
        config,
        allowed={"experiment", "m_list", "ms_list", "out", "seed"},
        required={"experiment", "m_list", "ms_list", "out"},
    )
    m_list = config["m_list"]
    ms_list = config["ms_list"]
    if not m_list or not ms_list:
        raise ConfigError("m_list and ms_list must be nonempty")
    budget = LinkBudget(symbol_power=1.0, noise_power=1.0, path_loss=1.0)
    rows = []
    for m in m_list:
        m = _positive_int({"m": m}, "m")
        geometry = ArrayGeometry(m)
        channel = los_ula_channel(geometry, np.pi / 2.0)
        mrt_gain_db = db_from_linear(snr_mrt(channel, budget))
        for ms in ms_list:
            if ms > m // 2:
                print(f"skipping M={m}, M_s={ms}: M_s > M/2", file=sys.stderr)
                continue
            z3ro = z3ro_snr(m, ms, budget)
            # array path: the M_s = M/2 edge has exactly zero gain -> -inf dB
            z3ro_gain_db = float(db_from_linear(np.atleast_1d(z3ro))[0])
            rows.append((m, ms, mrt_gain_db, z3ro_gain_db, mrt_gain_db - z3ro_gain_db))
    header = ["M", "M_s", "mrt_gain_db", "z3ro_gain_db", "penalty_db"]
    return _write_csv(config["out"], header, rows)


def run_backoff_sweep(config):
    """Monte Carlo SNR/SDR/SNDR sweep over PA back-off for MRT and Z3RO."""
    _check_keys(
        config,
        allowed={
            "experiment", "num_antennas", "spacing_over_wavelength", "user_angle_deg",
            "num_saturated", "smoothness", "array_snr_db", "pa_kind",
            "backoff_start_db", "backoff_stop_db", "backoff_count",
            "samples", "seed", "out",
        },
        required={"experiment", "num_antennas", "num_saturated", "backoff_start_db",
                  "backoff_stop_db", "backoff_count", "out"},
    )
    m = _positive_int(config, "num_antennas")
    geometry = ArrayGeometry(m, float(config.get("spacing_over_wavelength", 0.5)))
    angle = float(config.get("user_angle_deg", 80.0)) * np.pi / 180.0
    count = _positive_int(config, "backoff_count")
    backoffs = np.linspace(
        float(config["backoff_start_db"]), float(config["backoff_stop_db"]), count
    )
    samples = _positive_int(config, "samples", 10**6)
    pa_kind = config.get("pa_kind", "rapp")
    try:
        sweep = backoff_sweep(
            geometry,
            angle,
            _positive_int(config, "num_saturated"),
            backoffs,
            array_snr_db=float(config.get("array_snr_db", 26.0)),
            smoothness=float(config.get("smoothness", 2.0)),
            n=samples,
            rng=SeededRng(int(config.get("seed", 0))),
            pa_kind=pa_kind,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = []
    for row in sweep:
        rep = row.report
        rows.append(
            (
                row.backoff_db, row.precoder, rep.snr_db, rep.sdr_db, rep.sndr_db,
                rep.bussgang_gain.real, rep.bussgang_gain.imag,
                rep.distortion_power, rep.sample_count, rep.standard_error_db,
            )
        )
    header = [
        "backoff_db", "precoder", "snr_db", "sdr_db", "sndr_db",
        "g_re", "g_im", "dist_power", "n", "stderr_db",
    ]
    return _write_csv(config["out"], header, rows)


def run_oracle_verify(config, candidate_fn=None):
    """Compare the multi-start optimizer against the closed form per M.

    Returns (path, ok); ok is True iff every relative gap is within
    ORACLE_GAP_RTOL. `candidate_fn(M) -> objective` exists as a test hook to
    inject a deliberately wrong closed-form value.
    """
    _check_keys(
        config,
        allowed={"experiment", "m_list", "starts", "seed", "out"},
        required={"experiment", "m_list", "out"},
    )
    m_list = config["m_list"]
    if not m_list:
        raise ConfigError("m_list must be nonempty")
    for m in m_list:
        if not 2 <= m <= 12:
            raise ConfigError(f"oracle-verify supports M in [2, 12], got {m}")
    starts = _positive_int(config, "starts", 128)
    seed = int(config.get("seed", 0))
    if candidate_fn is None:
        candidate_fn = lambda m: theorem1_candidate(m, 1).objective if m >= 3 else 0.0
    rows = []
    ok = True
    for i, m in enumerate(m_list):
        try:
            best = solve_real_problem(m, starts=starts, rng=SeededRng(seed, 2 * i))
            probe = probe_realness_conjecture(
                m, starts=max(32, starts // 4), rng=SeededRng(seed, 2 * i + 1)
            )
        except RuntimeError as exc:
            raise InfeasibilityError(str(exc)) from exc
        closed = candidate_fn(m)
        scale = max(abs(closed), 1.0)
        gap = (closed - best.objective) / scale
        if abs(gap) > ORACLE_GAP_RTOL:
            ok = False
        rows.append(
            (
                m, float(closed), best.objective, float(gap),
                probe.best_objective, probe.max_imag_after_rotation,
            )
        )
    header = [
        "M", "closed_form_objective", "oracle_objective", "gap",
        "conjecture_best_objective", "conjecture_max_imag",
    ]
    path = _write_csv(config["out"], header, rows)
    return path, ok


_RUNNERS = {
    "pattern": run_pattern,
    "array-gain": run_array_gain,
    "backoff-sweep": run_backoff_sweep,
    "oracle-verify": run_oracle_verify,
}

_QUICK_SAMPLES = 10**4
_QUICK_STARTS = 32


def _apply_overrides(config, args):
    config = dict(config)
    if args.seed is not None:
        config["seed"] = args.seed
    if args.samples is not None:
        config["samples"] = args.samples
    if args.out is not None:
        config["out"] = args.out
    if args.quick:
        if config.get("experiment") == "backoff-sweep":
            config["samples"] = min(config.get("samples", _QUICK_SAMPLES), _QUICK_SAMPLES)
        if config.get("experiment") == "oracle-verify":
            config["starts"] = min(config.get("starts", _QUICK_STARTS), _QUICK_STARTS)
    return config


def build_parser():
    parser = argparse.ArgumentParser(
        prog="z3ro",
        description="Reproduce MRT/Z3RO precoding experiments as CSV files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        cmd = sub.add_parser(name, help=f"run a {name} experiment from a JSON config")
        cmd.add_argument("--config", required=True, help="path to the experiment config")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--samples", type=int, default=None, help="override the sample count")
        cmd.add_argument("--out", default=None, help="override the output CSV path")
        cmd.add_argument("--quick", action="store_true", help="reduced-cost smoke run")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        config = _apply_overrides(load_config(args.config), args)
        experiment = config.get("experiment")
        if experiment != args.command:
            raise ConfigError(
                f"config declares experiment {experiment!r}, but subcommand is {args.command!r}"
            )
        if args.command == "oracle-verify":
            path, ok = run_oracle_verify(config)
            print(path)
            return 0 if ok else 1
        path = _RUNNERS[args.command](config)
        print(path)
        return 0
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FloatingPointError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
