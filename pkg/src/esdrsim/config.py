"""Run configuration: flat key = value text with section headers.

All frequencies are MHz; the only other unit accepted is uT for the RF field
amplitude (``rf_field_ut``), converted through the electron gyromagnetic
ratio. Unknown sections or keys are rejected.
"""

import configparser
import os
from dataclasses import dataclass, field

from .exceptions import ConfigError
from .peaks import BranchWindow
from .spectra import SWEEP_KINDS, SweepPlan
from .spin import SystemParams, rf_rabi_from_field

_SECTION_KEYS = {
    "system": {
        "d_gs",
        "m_x",
        "omega_l",
        "lambda_b",
        "lambda_d",
        "omega_rf",
        "omega_cap_rf",
        "rf_field_ut",
        "omega_mw",
    },
    "sweep": {
        "kind",
        "mw_start",
        "mw_stop",
        "mw_step",
        "sweep_start",
        "sweep_stop",
        "sweep_step",
        "n_max",
        "mw_margin",
    },
    "extract": {
        "prominence",
        "min_separation",
        "window_label",
        "window_center",
        "window_halfwidth",
        "window_sweep_min",
        "window_sweep_max",
    },
    "analytic": {"overlays", "k_max"},
    "verify": {
        "total_periods",
        "samples_per_period",
        "window_fraction",
        "n_phases",
        "tolerance",
        "n_max",
    },
    "converge": {"n_start", "n_stop", "n_step", "tol"},
    "output": {"directory"},
}

_REQUIRED_SYSTEM = ("d_gs", "m_x", "omega_l", "lambda_b", "lambda_d", "omega_rf")
_REQUIRED_SWEEP = (
    "kind",
    "mw_start",
    "mw_stop",
    "mw_step",
    "sweep_start",
    "sweep_stop",
    "sweep_step",
)


@dataclass(frozen=True)
class OverlaySpec:
    """One analytic overlay: a method tag plus dressed-pair indices where needed."""

    method: str  # single_rwa | multi_rwa | van_vleck
    m: int = 0
    n: int = 0


@dataclass(frozen=True)
class RunConfig:
    """Validated contents of a configuration file."""

    params: SystemParams
    sweep: dict | None = None
    extract: dict = field(default_factory=dict)
    overlays: tuple = ()
    analytic_k_max: int | None = None
    verify: dict = field(default_factory=dict)
    converge: dict = field(default_factory=dict)
    output_dir: str | None = None

    def sweep_plan(self, n_max: int | None = None) -> SweepPlan:
        if self.sweep is None:
            raise ConfigError("configuration has no [sweep] section")
        s = dict(self.sweep)
        if n_max is not None:
            s["n_max"] = n_max
        return SweepPlan(
            params=self.params,
            mw_start=s["mw_start"],
            mw_stop=s["mw_stop"],
            mw_step=s["mw_step"],
            sweep_kind=s["kind"],
            sweep_start=s["sweep_start"],
            sweep_stop=s["sweep_stop"],
            sweep_step=s["sweep_step"],
            n_max=s.get("n_max", 67),
            mw_margin=s.get("mw_margin", 0.0),
        )

    def branch_window(self) -> BranchWindow | None:
        e = self.extract
        if "window_center" not in e:
            return None
        return BranchWindow(
            label=e.get("window_label", "crossing"),
            center_mhz=e["window_center"],
            halfwidth_mhz=e.get("window_halfwidth", 1.0),
            sweep_min=e.get("window_sweep_min"),
            sweep_max=e.get("window_sweep_max"),
        )


def _float(section: str, key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from exc


def _int(section: str, key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer") from exc


def _parse_overlays(raw: str) -> tuple:
    """Parse ``single_rwa, multi_rwa:-1:1, van_vleck:-1:1`` style overlay lists."""
    out = []
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        method = parts[0].strip()
        if method not in ("single_rwa", "multi_rwa", "van_vleck"):
            raise ConfigError(f"unknown analytic overlay {method!r}")
        if method == "single_rwa":
            if len(parts) != 1:
                raise ConfigError("single_rwa takes no photon indices")
            out.append(OverlaySpec(method=method))
            continue
        if len(parts) != 3:
            raise ConfigError(f"{method} overlay needs the form {method}:m:n")
        try:
            m, n = int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"non-integer photon indices in overlay {item!r}") from exc
        if m == n:
            raise ConfigError(f"overlay {item!r} needs m != n")
        out.append(OverlaySpec(method=method, m=m, n=n))
    if not out:
        raise ConfigError("overlays list is empty")
    return tuple(out)


def load_config(path) -> RunConfig:
    """Parse and validate a configuration file.

    Raises
    ------
    ConfigError
        On missing files, unknown sections or keys, nonnumeric values, or
        values violating the model preconditions.
    """
    path = os.fspath(path)
    if not os.path.exists(path):
        raise ConfigError(f"configuration file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except (configparser.Error, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - _SECTION_KEYS[section]
        if unknown:
            raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")

    if not parser.has_section("system"):
        raise ConfigError("missing required section [system]")
    sys_raw = parser["system"]
    missing = [k for k in _REQUIRED_SYSTEM if k not in sys_raw]
    if missing:
        raise ConfigError(f"[system] missing key(s): {', '.join(missing)}")
    if "omega_cap_rf" in sys_raw and "rf_field_ut" in sys_raw:
        raise ConfigError("[system] give either omega_cap_rf (MHz) or rf_field_ut (uT), not both")
    if "omega_cap_rf" in sys_raw:
        omega_cap = _float("system", "omega_cap_rf", sys_raw["omega_cap_rf"])
    elif "rf_field_ut" in sys_raw:
        omega_cap = rf_rabi_from_field(_float("system", "rf_field_ut", sys_raw["rf_field_ut"]))
    else:
        raise ConfigError("[system] needs omega_cap_rf or rf_field_ut")
    d_gs = _float("system", "d_gs", sys_raw["d_gs"])
    try:
        params = SystemParams(
            d_gs=d_gs,
            m_x=_float("system", "m_x", sys_raw["m_x"]),
            omega_l=_float("system", "omega_l", sys_raw["omega_l"]),
            lambda_b=_float("system", "lambda_b", sys_raw["lambda_b"]),
            lambda_d=_float("system", "lambda_d", sys_raw["lambda_d"]),
            omega_rf=_float("system", "omega_rf", sys_raw["omega_rf"]),
            omega_cap_rf=omega_cap,
            omega_mw=_float("system", "omega_mw", sys_raw["omega_mw"])
            if "omega_mw" in sys_raw
            else d_gs,
        )
    except ValueError as exc:
        raise ConfigError(f"[system] {exc}") from exc

    sweep = None
    if parser.has_section("sweep"):
        sw = parser["sweep"]
        missing = [k for k in _REQUIRED_SWEEP if k not in sw]
        if missing:
            raise ConfigError(f"[sweep] missing key(s): {', '.join(missing)}")
        kind = sw["kind"].strip()
        if kind not in SWEEP_KINDS:
            raise ConfigError(f"[sweep] kind must be one of {SWEEP_KINDS}, got {kind!r}")
        sweep = {
            "kind": kind,
            "mw_start": _float("sweep", "mw_start", sw["mw_start"]),
            "mw_stop": _float("sweep", "mw_stop", sw["mw_stop"]),
            "mw_step": _float("sweep", "mw_step", sw["mw_step"]),
            "sweep_start": _float("sweep", "sweep_start", sw["sweep_start"]),
            "sweep_stop": _float("sweep", "sweep_stop", sw["sweep_stop"]),
            "sweep_step": _float("sweep", "sweep_step", sw["sweep_step"]),
        }
        if "n_max" in sw:
            sweep["n_max"] = _int("sweep", "n_max", sw["n_max"])
        if "mw_margin" in sw:
            sweep["mw_margin"] = _float("sweep", "mw_margin", sw["mw_margin"])

    extract = {}
    if parser.has_section("extract"):
        ex = parser["extract"]
        for key in ("prominence", "min_separation", "window_center", "window_halfwidth",
                    "window_sweep_min", "window_sweep_max"):
            if key in ex:
                extract[key] = _float("extract", key, ex[key])
        if "window_label" in ex:
            extract["window_label"] = ex["window_label"].strip()

    overlays: tuple = ()
    analytic_k_max = None
    if parser.has_section("analytic"):
        an = parser["analytic"]
        if "overlays" in an:
            overlays = _parse_overlays(an["overlays"])
        if "k_max" in an:
            analytic_k_max = _int("analytic", "k_max", an["k_max"])
    needs_parallel = any(o.method in ("multi_rwa", "van_vleck") for o in overlays)
    if needs_parallel and params.omega_l == 0:
        raise ConfigError("multi-photon overlays require omega_l != 0 in [system]")

    verify = {}
    if parser.has_section("verify"):
        ve = parser["verify"]
        for key, cast in (
            ("total_periods", _int),
            ("samples_per_period", _int),
            ("n_phases", _int),
            ("n_max", _int),
        ):
            if key in ve:
                verify[key] = cast("verify", key, ve[key])
        for key in ("window_fraction", "tolerance"):
            if key in ve:
                verify[key] = _float("verify", key, ve[key])

    converge = {}
    if parser.has_section("converge"):
        co = parser["converge"]
        for key in ("n_start", "n_stop", "n_step"):
            if key in co:
                converge[key] = _int("converge", key, co[key])
        if "tol" in co:
            converge["tol"] = _float("converge", "tol", co["tol"])

    output_dir = None
    if parser.has_section("output") and "directory" in parser["output"]:
        output_dir = parser["output"]["directory"].strip()

    cfg = RunConfig(
        params=params,
        sweep=sweep,
        extract=extract,
        overlays=overlays,
        analytic_k_max=analytic_k_max,
        verify=verify,
        converge=converge,
        output_dir=output_dir,
    )
    if sweep is not None:
        try:
            cfg.sweep_plan()
        except ValueError as exc:
            raise ConfigError(f"[sweep] {exc}") from exc
    return cfg
