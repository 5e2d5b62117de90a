"""JSON run configuration: loading, validation, defaults.

Configs are plain nested dicts.  Validation is strict: unknown keys
anywhere in the tree are rejected with the dotted path in the message,
so a typo fails fast instead of silently running defaults.
"""

from __future__ import annotations

import json


class ConfigError(ValueError):
    """Bad configuration file or contents."""


_PROFILE_KEYS = {"profile", "amplitude", "width", "center", "mode", "eta",
                 "value", "path"}
_PROFILES = {"zero", "uniform", "gaussian", "plane-wave", "sech-soliton", "file"}
_POTENTIALS = {"zero", "uniform", "gaussian"}

_SCHEMA = {
    "model": {"family", "N", "J0", "J1", "R0", "R1", "s", "hbar", "x_xi",
              "h", "t", "U"},
    "grid": {"L", "M"},
    "integrator": {"dt", "t_end", "scheme", "tolerance", "symbol_mode",
                   "snapshot_every"},
    "equation": None,
    "initial": _PROFILE_KEYS,
    "initial2": _PROFILE_KEYS,
    "potential": _PROFILE_KEYS,
    "spacing": None,
    "dispersive_scale": None,
    "study": {"kind", "sizes", "s_values", "L", "t_end", "dt", "grid_refine",
              "M", "profile", "amplitude", "width", "center", "mode", "eta",
              "value", "slope_min", "slope_max", "threads"},
    "verify": {"N", "site", "jw_sites"},
    "out": None,
}

_EQUATIONS = {"xxz-lattice", "hubbard-lattice", "pretransform", "precursor",
              "gp", "coupled-gp"}

MIN_CLI_SITES = 5


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def _reject_unknown(section: str, value, allowed) -> None:
    if allowed is None:
        return
    if not isinstance(value, dict):
        raise ConfigError(f"config section {section!r} must be an object")
    for key in value:
        if key not in allowed:
            raise ConfigError(f"unknown config key {section}.{key}")


def _check_profile(section: str, opts: dict) -> None:
    kind = opts.get("profile", "zero")
    if kind not in _PROFILES:
        raise ConfigError(
            f"{section}.profile must be one of {sorted(_PROFILES)}, got {kind!r}"
        )
    if kind == "file" and "path" not in opts:
        raise ConfigError(f"{section}.profile = file requires {section}.path")


def validate_config(cfg: dict, command: str) -> dict:
    """Return a validated copy of cfg with defaults filled in."""
    for key in cfg:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key}")
    for key, allowed in _SCHEMA.items():
        if key in cfg:
            _reject_unknown(key, cfg[key], allowed)

    out = {k: (dict(v) if isinstance(v, dict) else v) for k, v in cfg.items()}

    model = out.setdefault("model", {})
    model.setdefault("family", "xxz")
    if model["family"] not in ("xxz", "hubbard"):
        raise ConfigError(f"model.family must be xxz or hubbard, got {model['family']!r}")
    model.setdefault("N", 256)
    model.setdefault("hbar", 1.0)
    if model["family"] == "xxz":
        for key, dflt in (("J0", 1.0), ("J1", 0.0), ("R0", 1.0), ("R1", 0.0),
                          ("s", 1.0), ("x_xi", 0.0)):
            model.setdefault(key, dflt)
    else:
        model.setdefault("t", 1.0)
        model.setdefault("U", 1.0)
    n = model["N"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ConfigError(f"model.N must be an integer, got {n!r}")
    if command in ("simulate", "verify-derivation") and n < MIN_CLI_SITES:
        raise ConfigError(f"model.N must be at least {MIN_CLI_SITES}, got {n}")

    grid = out.setdefault("grid", {})
    grid.setdefault("L", 8.0 * 3.141592653589793)
    grid.setdefault("M", 512)
    m = grid["M"]
    if not isinstance(m, int) or isinstance(m, bool) or m < 8 or m & (m - 1):
        raise ConfigError(f"grid.M must be a power of two >= 8, got {m!r}")

    integ = out.setdefault("integrator", {})
    integ.setdefault("dt", 1e-3)
    integ.setdefault("t_end", 1.0)
    integ.setdefault("scheme", "rk4")
    integ.setdefault("tolerance", 1e-8)
    integ.setdefault("symbol_mode", "naive")
    integ.setdefault("snapshot_every", 0)
    if integ["scheme"] not in ("rk4", "rk45"):
        raise ConfigError(f"integrator.scheme must be rk4 or rk45, got {integ['scheme']!r}")
    if integ["symbol_mode"] not in ("naive", "wick"):
        raise ConfigError(
            f"integrator.symbol_mode must be naive or wick, got {integ['symbol_mode']!r}"
        )
    if not (float(integ["dt"]) > 0):
        raise ConfigError("integrator.dt must be positive")
    if not (float(integ["t_end"]) >= 0):
        raise ConfigError("integrator.t_end must be nonnegative")

    if command == "simulate":
        eq = out.setdefault("equation", "xxz-lattice")
        if eq not in _EQUATIONS:
            raise ConfigError(f"equation must be one of {sorted(_EQUATIONS)}, got {eq!r}")
        if eq == "hubbard-lattice" and model["family"] != "hubbard":
            raise ConfigError("equation hubbard-lattice requires model.family = hubbard")
        if eq in ("xxz-lattice", "pretransform", "precursor") and model["family"] != "xxz":
            raise ConfigError(f"equation {eq} requires model.family = xxz")
        if eq == "coupled-gp" and model["family"] != "hubbard":
            raise ConfigError("equation coupled-gp requires model.family = hubbard")
        for sec in ("initial", "initial2", "potential"):
            if sec in out:
                _check_profile(sec, out[sec])
        out.setdefault("initial", {"profile": "zero"})
        if eq == "coupled-gp":
            out.setdefault("initial2", dict(out["initial"]))
        pot = out.setdefault("potential", {"profile": "zero"})
        if pot.get("profile", "zero") == "file":
            raise ConfigError("potential.profile = file is not supported")
        sp = out.setdefault("spacing", 1.0)
        if not (float(sp) > 0):
            raise ConfigError("spacing must be positive")
        out.setdefault("dispersive_scale", 1.0)

    if command == "study":
        study = out.get("study")
        if study is None:
            raise ConfigError("study command requires a study section")
        kind = study.get("kind")
        if kind not in ("continuum-limit", "truncation"):
            raise ConfigError(
                f"study.kind must be continuum-limit or truncation, got {kind!r}"
            )
        study.setdefault("L", grid["L"])
        study.setdefault("dt", integ["dt"])
        study.setdefault("threads", 1)
        study.setdefault("profile", "gaussian")
        if study["profile"] not in _PROFILES - {"file"}:
            raise ConfigError(f"study.profile {study['profile']!r} is not usable here")
        if kind == "continuum-limit":
            study.setdefault("sizes", [32, 64, 128, 256])
            study.setdefault("grid_refine", 4)
            study.setdefault("t_end", 0.5)
            study.setdefault("slope_min", 1.7)
            study.setdefault("slope_max", 2.3)
            for nn in study["sizes"]:
                if not isinstance(nn, int) or nn < 8 or nn & (nn - 1):
                    raise ConfigError(
                        f"study.sizes entries must be powers of two >= 8, got {nn!r}"
                    )
        else:
            study.setdefault("s_values", [40.0, 126.0, 400.0, 1265.0, 4000.0])
            study.setdefault("M", 256)
            study.setdefault("t_end", 1.0)
            study.setdefault("slope_min", 0.7)
            study.setdefault("slope_max", 1.3)

    if command == "verify-derivation":
        ver = out.setdefault("verify", {})
        ver.setdefault("N", 7)
        ver.setdefault("site", None)
        ver.setdefault("jw_sites", 4)
        vn = ver["N"]
        if not isinstance(vn, int) or vn < MIN_CLI_SITES:
            raise ConfigError(f"verify.N must be an integer >= {MIN_CLI_SITES}, got {vn!r}")
        if not isinstance(ver["jw_sites"], int) or not 2 <= ver["jw_sites"] <= 6:
            raise ConfigError("verify.jw_sites must be an integer in [2, 6]")

    return out


def model_params(cfg: dict):
    """Build the frozen parameter object for the validated config."""
    from .models import HubbardParams, XXZParams

    model = cfg["model"]
    if model["family"] == "hubbard":
        u = model["U"]
        return HubbardParams(
            N=model["N"], t=float(model["t"]),
            U=tuple(float(x) for x in u) if isinstance(u, (list, tuple)) else float(u),
            hbar=float(model["hbar"]),
        )
    h = model.get("h", 0.0)
    if isinstance(h, (list, tuple)):
        h = tuple(float(x) for x in h)
    else:
        h = float(h)
    return XXZParams(
        N=model["N"], J0=float(model["J0"]), J1=float(model["J1"]),
        R0=float(model["R0"]), R1=float(model["R1"]), s=float(model["s"]),
        hbar=float(model["hbar"]), x_xi=float(model["x_xi"]), h=h,
    )
