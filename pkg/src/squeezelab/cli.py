"""Command-line front end: one subcommand per figure dataset plus ``validate``.

Every option can also be given in a flat ``key = value`` config file
(``--config``); flags override the file. Option ``--omega-max`` maps to key
``omega_max`` and so on. Exit codes: 0 success, 1 validation failure,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import effective_temperature_from_spectrum
from .drive import CrystalParams, DrivePulse, load_tabulated_csv
from .errors import NumericalError, SqueezeLabError
from .geodesics import (
    GeodesicParams,
    launch_grid,
    ray_density,
    worldline_bundle,
    write_bundle_csv,
)
from .numerics import fit_exponential_tail
from .spectra import (
    Spectrum,
    coupling_from_smallness,
    cw_flux_closed,
    cw_flux_windowed,
    regime_check,
    rho0_pulsed,
    smallness_factor,
    spd_hcp_closed,
    spd_higher_order_numeric,
    spd_order2_numeric,
    spd_scp_closed,
)
from .variance import default_tau_grid, variance_trace

EXIT_OK, EXIT_VALIDATE, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

# default squeezing strengths per drive
DEFAULT_R = {"cw": 0.07, "hcp": 0.21, "scp": 1.54, "tabulated": 0.21}


class ConfigError(SqueezeLabError):
    pass


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    v = str(text).strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_float(text):
    if text is None or str(text).strip().lower() in ("", "none", "auto"):
        return None
    return float(text)


# key -> (converter, help)
KEYS = {
    "drive": (str, "drive shape: hcp, scp, cw or tabulated"),
    "tabulated_file": (str, "CSV with header tau,field (tau in 1/Gamma, field in E0)"),
    "r": (_opt_float, "squeezing strength |C E0| Gamma (Gamma = w0 for CW)"),
    "smallness": (float, "CW smallness factor pi^4 rho0 w0 / 4; sets r when r is not given"),
    "si": (_bool, "derive r from the SI inputs E0, gamma, d, n, L"),
    "E0": (float, "SI field amplitude (V/m)"),
    "gamma": (float, "SI pulse rate Gamma or CW w0 (1/s)"),
    "d": (float, "SI nonlinear coefficient (m/V)"),
    "n": (float, "refractive index"),
    "L": (float, "SI crystal thickness (m)"),
    "A": (float, "SI transverse normalization area (m^2)"),
    "omega_max": (float, "largest frequency in units of Gamma (w0 for flux)"),
    "points": (int, "number of samples"),
    "normalized": (_bool, "divide by rho0 (otherwise units with C = Gamma = 1)"),
    "higher_order": (_bool, "add the C^3 and C^4 correction columns (series form)"),
    "periods": (int, "observation window in drive periods for the windowed flux"),
    "tau_max": (_opt_float, "half width of the tau grid in units of 1/Gamma"),
    "alpha_over_n2": (float, "world-line drive strength alpha / n^2"),
    "n_zeta": (float, "world-line group n zeta"),
    "bundle": (int, "number of world lines"),
    "z_points": (int, "samples per world line"),
    "launch_half_width": (float, "launch times cover |zeta l| <= this"),
    "method": (str, "world lines from the implicit form or the ode"),
    "window_lo": (float, "tail window start (units of Gamma)"),
    "window_hi": (float, "tail window end (units of Gamma)"),
    "source": (str, "tail samples from the closed form or the numeric oracle"),
    "power": (str, "tail prefactor exponent: a number or 'free'"),
    "output": (str, "output path"),
    "meta": (_bool, "write a .meta sidecar next to the output"),
    "threads": (int, "cap on worker threads (sets SQUEEZELAB_THREADS)"),
    "invariants": (_bool, "validate: also run the invariant checks"),
}

_SI = {"si": False, "E0": None, "gamma": None, "d": None, "n": None, "L": None, "A": 1.0}

COMMANDS = {
    "spectrum": dict(drive="hcp", tabulated_file=None, r=0.1, omega_max=12.0, points=400, normalized=False,
                     higher_order=False, output="spectrum.csv", meta=True, threads=None, **_SI),
    "flux": dict(drive="cw", r=None, smallness=0.02, omega_max=2.5, points=500, periods=50,
                 output="flux.csv", meta=True, threads=None, **_SI),
    "variance": dict(drive="hcp", tabulated_file=None, r=None, tau_max=None, points=401,
                     output="variance.csv", meta=True, threads=None, **_SI),
    "worldlines": dict(drive="hcp", alpha_over_n2=0.49, n_zeta=12.0, n=2.0, bundle=21, z_points=201,
                       launch_half_width=8.0, method="implicit", output="worldlines.csv", meta=True,
                       threads=None),
    "tailfit": dict(drive="hcp", window_lo=5.0, window_hi=12.0, points=141, source="closed", power="free",
                    output="tailfit.txt", threads=None),
    "regime": dict(drive="hcp", r=0.1, smallness=None, output="regime.txt", threads=None, **_SI),
    "validate": dict(invariants=True, output=None, threads=None),
}


@dataclass
class RunConfig:
    command: str
    values: dict = field(default_factory=dict)

    def __getattr__(self, name):
        try:
            return self.__dict__["values"][name]
        except KeyError:
            raise AttributeError(name) from None


def read_config_file(path) -> dict:
    text = Path(path).read_text()
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"))
    parser.optionxform = str
    parser.read_string("[run]\n" + text)
    return dict(parser["run"])


def resolve_config(command: str | None, file_values: dict, flag_values: dict) -> RunConfig:
    command = command or file_values.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"unknown or missing command {command!r}")
    allowed = COMMANDS[command]
    values = dict(allowed)
    for source in (file_values, flag_values):
        for key, raw in source.items():
            if key == "command" or raw is None:
                continue
            if key not in allowed:
                raise ConfigError(f"key {key!r} is not valid for {command}")
            conv = KEYS[key][0]
            try:
                values[key] = conv(raw) if raw is not None else None
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from exc
    return RunConfig(command, values)


# helpers ------------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{v:.12e}"
    return str(v)


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_meta(cfg: RunConfig, path, extra: dict) -> None:
    if not cfg.values.get("meta", False):
        return
    lines = [f"command = {cfg.command}"]
    lines += [f"{k} = {_fmt(v)}" for k, v in sorted(cfg.values.items()) if v is not None]
    lines += [f"{k} = {_fmt(v)}" for k, v in extra.items()]
    Path(str(path) + ".meta").write_text("\n".join(lines) + "\n")


def _strength(cfg: RunConfig, default=None) -> float:
    """Squeezing strength from SI inputs, r, or (CW) the smallness factor."""
    v = cfg.values
    if v.get("si"):
        need = ("E0", "gamma", "d", "n", "L")
        missing = [k for k in need if v.get(k) is None]
        if missing:
            raise ConfigError(f"si mode needs {', '.join(missing)}")
        return CrystalParams(v["d"], v["n"], v["L"], v["A"]).r(v["E0"], v["gamma"])
    if v.get("r") is not None:
        return float(v["r"])
    if v.get("smallness") is not None:
        return coupling_from_smallness(v["smallness"])
    if default is None:
        raise ConfigError("no squeezing strength given")
    return default


def _pulse(cfg: RunConfig, amplitude: float) -> DrivePulse:
    """Drive in units with Gamma = 1 and C = 1, so E0 equals r."""
    shape = cfg.values["drive"]
    if shape == "tabulated":
        path = cfg.values.get("tabulated_file")
        if not path:
            raise ConfigError("tabulated drive needs tabulated_file")
        return load_tabulated_csv(path, amplitude, 1.0)
    if shape == "cw":
        return DrivePulse.cw(amplitude, 1.0)
    if shape in ("hcp", "scp"):
        return DrivePulse(shape, amplitude, 1.0)
    raise ConfigError(f"unknown drive {shape!r}")


UNIT = CrystalParams.with_coupling(1.0)


# commands -----------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig) -> int:
    if cfg.drive == "cw":
        raise ConfigError("spectrum needs a pulsed drive; use flux for CW")
    if cfg.points < 2:
        raise ConfigError("points must be >= 2")
    r = _strength(cfg)
    pulse = _pulse(cfg, r)
    nu = np.linspace(0.0, cfg.omega_max, cfg.points)
    rho0 = rho0_pulsed(UNIT, r, 1.0)
    closed = {"hcp": spd_hcp_closed, "scp": spd_scp_closed}.get(cfg.drive)
    ref = closed(nu, UNIT, r, 1.0) if closed else np.full_like(nu, np.nan)
    num = np.asarray(spd_order2_numeric(pulse, UNIT, nu), dtype=float)
    rel = np.where((ref == 0) & (num == 0), 0.0, np.abs(num - ref) / np.where(ref == 0, 1.0, np.abs(ref)))
    scale = 1.0 / rho0 if cfg.normalized else 1.0
    header = ["omega_over_Gamma", "rho_closed", "rho_numeric", "rel_diff"]
    cols = [nu, ref * scale, num * scale, rel]
    if cfg.higher_order:
        c3 = np.array([spd_higher_order_numeric(pulse, UNIT, w, 3) if w > 0 else 0.0 for w in nu])
        c4 = np.array([spd_higher_order_numeric(pulse, UNIT, w, 4) if w > 0 else 0.0 for w in nu])
        header += ["rho_c3", "rho_c4"]
        cols += [c3 * scale, c4 * scale]
    _write_csv(cfg.output, header, zip(*cols))
    finite = rel[np.isfinite(rel)]
    worst = float(np.max(finite)) if finite.size else float("nan")
    _write_meta(cfg, cfg.output, {"normalization": "rho0" if cfg.normalized else "C=Gamma=1",
                                  "rho0": rho0, "max_rel_diff": worst,
                                  "x_label": "omega/Gamma", "y_label": "rho/rho0" if cfg.normalized else "rho"})
    print(f"wrote {cfg.output}: {cfg.points} rows, max closed-vs-oracle relative difference {worst:.3e}")
    return EXIT_OK


def cmd_flux(cfg: RunConfig) -> int:
    if cfg.drive != "cw":
        raise ConfigError("flux needs the cw drive")
    if cfg.periods < 1 or cfg.points < 2:
        raise ConfigError("periods and points must be >= 1 and >= 2")
    kappa = _strength(cfg)
    norm = kappa**2 / math.pi**2          # rho0 w0 in units C = w0 = 1
    w = np.linspace(0.0, cfg.omega_max, cfg.points + 1)[1:]
    o2 = cw_flux_closed(w, UNIT, kappa, 1.0, 2) / norm
    o4 = cw_flux_closed(w, UNIT, kappa, 1.0, 4) / norm
    win = np.array([cw_flux_windowed(UNIT, kappa, 1.0, cfg.periods, x * cfg.periods) for x in w]) / norm
    _write_csv(cfg.output, ["omega_over_omega0", "phi2_over_rho0omega0", "phi4_over_rho0omega0",
                            "phi_windowed_over_rho0omega0"], zip(w, o2, o4, win))
    factor = smallness_factor(kappa)
    _write_meta(cfg, cfg.output, {"coupling": kappa, "smallness_factor": factor,
                                  "x_label": "omega/omega0", "y_label": "phi/(rho0 omega0)"})
    print(f"wrote {cfg.output}: |C E0| w0 = {kappa:.6f}, smallness factor pi^4 rho0 w0 / 4 = {factor:.6f}")
    return EXIT_OK


def cmd_variance(cfg: RunConfig) -> int:
    r = _strength(cfg, DEFAULT_R.get(cfg.drive, 0.1))
    pulse = _pulse(cfg, r)
    half = cfg.tau_max if cfg.tau_max is not None else (4 * math.pi if cfg.drive == "cw" else 10.0)
    taus = default_tau_grid(pulse, cfg.points, half)
    tr = variance_trace(pulse, UNIT, taus)
    tr.to_csv(cfg.output)
    vmin = float(np.min(tr.normalized()[:, 3]))
    _write_meta(cfg, cfg.output, {"r": r, "V0": "hbar Gamma^2 / (24 pi eps0 c0 n A)", "min_V_over_V0": vmin,
                                  "x_label": "tau Gamma", "y_label": "V/V0"})
    print(f"wrote {cfg.output}: r = {r:.4f}, min V/V0 = {vmin:.6f}")
    return EXIT_OK


def cmd_worldlines(cfg: RunConfig) -> int:
    if cfg.drive not in ("hcp", "scp"):
        raise ConfigError("worldlines needs drive hcp or scp")
    if cfg.bundle < 2 or cfg.z_points < 2:
        raise ConfigError("bundle and z_points must be >= 2")
    if cfg.method not in ("implicit", "ode"):
        raise ConfigError("method must be implicit or ode")
    p = GeodesicParams.from_groups(cfg.alpha_over_n2, cfg.n_zeta, cfg.n)
    z = np.linspace(0.0, 1.0, cfg.z_points)
    launches = launch_grid(cfg.bundle, cfg.launch_half_width, p.zeta, avoid_zero=cfg.drive == "scp")
    bundle = worldline_bundle(cfg.drive, p, launches, z, cfg.method)
    other = "ode" if cfg.method == "implicit" else "implicit"
    check = worldline_bundle(cfg.drive, p, launches, z, other)
    dev = max(float(np.max(np.abs(a.x0 - b.x0))) for a, b in zip(bundle, check))
    monotone = all(np.all(np.diff(wl.x0) > 0) for wl in bundle)
    write_bundle_csv(bundle, cfg.output)
    tau, dens = ray_density(bundle)
    dpath = str(cfg.output) + ".density.csv"
    _write_csv(dpath, ["exit_retarded_time", "density"], zip(tau, dens))
    _write_meta(cfg, cfg.output, {"alpha": p.alpha, "zeta": p.zeta, "implicit_vs_ode_max_dev": dev,
                                  "x_label": "x1 = z/L", "y_label": "x0 = c0 t/L"})
    print(f"wrote {cfg.output}: {len(bundle)} world lines, monotone {monotone}, "
          f"implicit-vs-ODE max deviation {dev:.3e}")
    return EXIT_OK


def cmd_tailfit(cfg: RunConfig) -> int:
    if cfg.drive not in ("hcp", "scp"):
        raise ConfigError("tailfit needs drive hcp or scp")
    if cfg.source not in ("closed", "numeric"):
        raise ConfigError("source must be closed or numeric")
    try:
        power = None if str(cfg.power).lower() == "free" else float(cfg.power)
    except ValueError as exc:
        raise ConfigError(f"power must be a number or 'free', got {cfg.power!r}") from exc
    x = np.linspace(cfg.window_lo, cfg.window_hi, cfg.points)
    if cfg.source == "closed":
        y = (spd_hcp_closed if cfg.drive == "hcp" else spd_scp_closed)(x, UNIT, 1.0, 1.0)
    else:
        y = spd_order2_numeric(DrivePulse(cfg.drive, 1.0, 1.0), UNIT, x)
    fit = fit_exponential_tail(np.column_stack([x, y]), (cfg.window_lo, cfg.window_hi), power=power)
    rep = effective_temperature_from_spectrum(Spectrum(x, y, normalization="rho0"), 1.0,
                                              (cfg.window_lo, cfg.window_hi), power)
    text = (f"drive = {cfg.drive}\nsource = {cfg.source}\n"
            f"window_lo = {cfg.window_lo:.12e}\nwindow_hi = {cfg.window_hi:.12e}\n"
            f"decay_rate_over_pi = {fit.decay_rate / math.pi:.12e}\n"
            f"amplitude = {fit.amplitude:.12e}\nresidual_rms = {fit.residual_rms:.12e}\n"
            f"T_eff_over_T_D = {rep.ratio_tail_to_diamond:.12e}\n")
    Path(cfg.output).write_text(text)
    print(f"wrote {cfg.output}: decay rate = {fit.decay_rate / math.pi:.8f} pi / Gamma, "
          f"T_eff/T_D = {rep.ratio_tail_to_diamond:.6f}")
    return EXIT_OK


def cmd_regime(cfg: RunConfig) -> int:
    r = _strength(cfg)
    pulse = _pulse(cfg, r)
    rep = regime_check(pulse, UNIT)
    lines = [f"drive = {cfg.drive}"] + [f"{k} = {_fmt(v)}" for k, v in rep.__dict__.items()]
    Path(cfg.output).write_text("\n".join(lines) + "\n")
    print(f"wrote {cfg.output}: coupling {rep.coupling:.6f}, smallness {rep.smallness_factor:.6f}, "
          f"{rep.classification}")
    return EXIT_OK


def cmd_validate(cfg: RunConfig) -> int:
    from .validation import run_all

    results = run_all(cfg.invariants, report=lambda res: print(res.line(), flush=True))
    failed = [r for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    summary = f"{len(results) - len(failed)}/{len(results)} checks passed in {total:.1f}s"
    print(summary)
    if cfg.output:
        Path(cfg.output).write_text("\n".join(r.line() for r in results) + "\n" + summary + "\n")
    return EXIT_OK if not failed else EXIT_VALIDATE


HANDLERS = {
    "spectrum": cmd_spectrum,
    "flux": cmd_flux,
    "variance": cmd_variance,
    "worldlines": cmd_worldlines,
    "tailfit": cmd_tailfit,
    "regime": cmd_regime,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="squeezelab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="flat key = value file; flags override it")
    sub = parser.add_subparsers(dest="command")
    for name, defaults in COMMANDS.items():
        sp = sub.add_parser(name, help=HANDLERS[name].__doc__ or name)
        sp.add_argument("--config", dest="sub_config", help="flat key = value file; flags override it")
        for key in defaults:
            flag = "--" + key.replace("_", "-")
            sp.add_argument(flag, dest=key, default=None, help=f"{KEYS[key][1]} (default {defaults[key]})")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config", "sub_config") and v is not None}
    try:
        path = getattr(args, "sub_config", None) or args.config
        file_values = read_config_file(path) if path else {}
        cfg = resolve_config(args.command, file_values, flags)
        if cfg.values.get("threads"):
            os.environ["SQUEEZELAB_THREADS"] = str(cfg.values["threads"])
        return HANDLERS[cfg.command](cfg)
    except (ConfigError, FileNotFoundError, configparser.Error) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (SqueezeLabError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
