"""Parameter blocks, validation, and flat-file serialization.

All simulation code works in SI units: densities per square meter, speeds in
m/s, distances in meters. External config files use the field units people
actually quote (per km2, km/h), converted on load and back on save.
"""

import dataclasses
import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = [
    "CsiMode",
    "PathLossParams",
    "PowerParams",
    "CsiParams",
    "SimulationConfig",
    "ConfigError",
    "validate",
    "parse_config_text",
    "config_from_raw",
    "load_config",
    "dumps_config",
    "save_config",
    "figure_preset",
    "derive_point_seed",
    "FIGURE_IDS",
]

LIGHT_SPEED_M_S = 2.998e8
DENSITY_SCALE = 1e6   # per-km2 file values -> per-m2 internal
SPEED_SCALE = 3.6     # km/h file values -> m/s internal


class ConfigError(ValueError):
    """Raised with the full list of validation problems, not just the first."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class CsiMode(str, Enum):
    PERFECT = "perfect"
    DELAYED = "delayed"


def _snap(x: float, scale: float) -> float:
    """Project x onto the fixed point of the external-unit round trip.

    Serialization writes x*scale and parsing divides it back; one
    multiply-divide cycle makes that round trip bit-exact.
    """
    return (x * scale) / scale


@dataclass(frozen=True)
class PathLossParams:
    alpha1: float = 2.0
    alpha2: float = 4.0
    r_b: float = 1.0
    r_c: float = 70.0

    @property
    def tau(self) -> float:
        # Continuity factor at r_c; derived, never stored independently.
        return self.r_c ** (self.alpha2 - self.alpha1)


@dataclass(frozen=True)
class PowerParams:
    p_t: float = 1.0
    theta: float = 0.5


@dataclass(frozen=True)
class CsiParams:
    mode: CsiMode = CsiMode.PERFECT
    f_c: float = 2e9
    v: float = _snap(3.0 / SPEED_SCALE, SPEED_SCALE)  # 3 km/h
    t_s: float = 0.01
    c: float = LIGHT_SPEED_M_S


@dataclass(frozen=True)
class SimulationConfig:
    lambda_b: float = _snap(4000.0 / DENSITY_SCALE, DENSITY_SCALE)  # per m2
    lambda_u: float = _snap(200.0 / DENSITY_SCALE, DENSITY_SCALE)   # per m2
    n_coop: int = 5
    path_loss: PathLossParams = field(default_factory=PathLossParams)
    power: PowerParams = field(default_factory=PowerParams)
    csi: CsiParams = field(default_factory=CsiParams)
    window_side: float = 1000.0
    n_drops: int = 1000
    seed: int = 42
    sir_cap: float = 1e10


def _check_finite(errors, name, value):
    if not math.isfinite(value):
        errors.append(f"{name} must be finite, got {value!r}")
        return False
    return True


def validate(config: SimulationConfig) -> SimulationConfig:
    """Check every invariant and return a canonicalized config.

    Problems are collected and raised together as ConfigError. Densities and
    the user speed are snapped onto the serialization fixed point so that a
    save/load cycle reproduces the config bit-exactly.
    """
    errors = []
    pl, pw, csi = config.path_loss, config.power, config.csi

    if _check_finite(errors, "alpha1", pl.alpha1) and pl.alpha1 < 2.0:
        errors.append(f"alpha1 must be >= 2, got {pl.alpha1}")
    if _check_finite(errors, "alpha2", pl.alpha2) and pl.alpha2 < pl.alpha1:
        errors.append("alpha1 exceeds alpha2")
    if _check_finite(errors, "r_b_m", pl.r_b) and pl.r_b <= 0:
        errors.append(f"r_b_m must be positive, got {pl.r_b}")
    if _check_finite(errors, "r_c_m", pl.r_c) and pl.r_c < pl.r_b:
        errors.append(f"r_c_m must be >= r_b_m, got r_c={pl.r_c} < r_b={pl.r_b}")

    if _check_finite(errors, "p_t_w", pw.p_t) and pw.p_t <= 0:
        errors.append(f"p_t_w must be positive, got {pw.p_t}")
    if _check_finite(errors, "theta", pw.theta) and not 0.0 < pw.theta <= 1.0:
        errors.append(f"theta must lie in (0, 1], got {pw.theta}")

    if not isinstance(csi.mode, CsiMode):
        errors.append(f"csi_mode must be one of {[m.value for m in CsiMode]}")
    for name, value in (("f_c_hz", csi.f_c), ("v_kmh", csi.v), ("t_s_s", csi.t_s)):
        if _check_finite(errors, name, value) and value < 0:
            errors.append(f"{name} must be >= 0, got {value}")

    lam_ok = True
    for name, value in (("lambda_b_per_km2", config.lambda_b),
                        ("lambda_u_per_km2", config.lambda_u)):
        if not _check_finite(errors, name, value) or value <= 0:
            if math.isfinite(value):
                errors.append(f"{name} must be positive, got {value}")
            lam_ok = False
    if lam_ok and config.lambda_b <= config.lambda_u:
        errors.append(
            "lambda_b_per_km2 must exceed lambda_u_per_km2 (got "
            f"{config.lambda_b * DENSITY_SCALE:g} <= {config.lambda_u * DENSITY_SCALE:g})"
        )

    if config.n_coop != int(config.n_coop) or config.n_coop < 1:
        errors.append(f"n_coop must be an integer >= 1, got {config.n_coop}")
    if config.n_drops != int(config.n_drops) or config.n_drops < 1:
        errors.append(f"n_drops must be an integer >= 1, got {config.n_drops}")
    if _check_finite(errors, "window_side_m", config.window_side) and config.window_side <= 0:
        errors.append(f"window_side_m must be positive, got {config.window_side}")
    if _check_finite(errors, "sir_cap", config.sir_cap) and config.sir_cap <= 0:
        errors.append(f"sir_cap must be positive, got {config.sir_cap}")
    try:
        seed_ok = config.seed == int(config.seed) and 0 <= int(config.seed) < 2 ** 64
    except (TypeError, ValueError, OverflowError):
        seed_ok = False
    if not seed_ok:
        errors.append(f"seed must be an unsigned 64-bit integer, got {config.seed!r}")

    if errors:
        raise ConfigError(errors)

    if lam_ok and config.lambda_b < 2.0 * config.lambda_u:
        warnings.warn(
            "lambda_b / lambda_u < 2: deployment is barely denser than its users, "
            "cooperation sets will often be truncated",
            stacklevel=2,
        )

    return dataclasses.replace(
        config,
        lambda_b=_snap(config.lambda_b, DENSITY_SCALE),
        lambda_u=_snap(config.lambda_u, DENSITY_SCALE),
        csi=dataclasses.replace(csi, v=_snap(csi.v, SPEED_SCALE)),
        n_coop=int(config.n_coop),
        n_drops=int(config.n_drops),
        seed=int(config.seed),
    )


# --- flat key=value file format -------------------------------------------

_INT_KEYS = {"n_coop", "n_drops", "seed"}
_STR_KEYS = {"csi_mode"}
KEY_ORDER = (
    "lambda_b_per_km2", "lambda_u_per_km2", "n_coop",
    "alpha1", "alpha2", "r_b_m", "r_c_m",
    "p_t_w", "theta",
    "csi_mode", "f_c_hz", "v_kmh", "t_s_s",
    "window_side_m", "n_drops", "seed", "sir_cap",
)


def parse_config_text(text: str) -> dict:
    """Parse 'key = value' lines into a raw dict of typed values.

    Blank lines and '#' comments are ignored. Unknown keys, repeated keys,
    and unparseable values are all collected into one ConfigError.
    """
    errors = []
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key not in KEY_ORDER:
            errors.append(f"line {lineno}: unknown key {key!r}")
            continue
        if key in raw:
            errors.append(f"line {lineno}: repeated key {key!r}")
            continue
        if key in _STR_KEYS:
            raw[key] = value
            continue
        try:
            raw[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            errors.append(f"line {lineno}: cannot parse value for {key!r}: {value!r}")
    if errors:
        raise ConfigError(errors)
    return raw


def config_from_raw(raw: dict) -> SimulationConfig:
    """Build an unvalidated SimulationConfig from external-unit raw values."""
    errors = [f"unknown key {k!r}" for k in raw if k not in KEY_ORDER]
    if errors:
        raise ConfigError(errors)
    base = SimulationConfig()
    mode = base.csi.mode
    if "csi_mode" in raw:
        try:
            mode = CsiMode(str(raw["csi_mode"]).lower())
        except ValueError:
            raise ConfigError(
                [f"csi_mode must be one of {[m.value for m in CsiMode]}, "
                 f"got {raw['csi_mode']!r}"]
            ) from None

    def get(key, default):
        return raw.get(key, default)

    return SimulationConfig(
        lambda_b=get("lambda_b_per_km2", base.lambda_b * DENSITY_SCALE) / DENSITY_SCALE,
        lambda_u=get("lambda_u_per_km2", base.lambda_u * DENSITY_SCALE) / DENSITY_SCALE,
        n_coop=get("n_coop", base.n_coop),
        path_loss=PathLossParams(
            alpha1=get("alpha1", base.path_loss.alpha1),
            alpha2=get("alpha2", base.path_loss.alpha2),
            r_b=get("r_b_m", base.path_loss.r_b),
            r_c=get("r_c_m", base.path_loss.r_c),
        ),
        power=PowerParams(
            p_t=get("p_t_w", base.power.p_t),
            theta=get("theta", base.power.theta),
        ),
        csi=CsiParams(
            mode=mode,
            f_c=get("f_c_hz", base.csi.f_c),
            v=get("v_kmh", base.csi.v * SPEED_SCALE) / SPEED_SCALE,
            t_s=get("t_s_s", base.csi.t_s),
        ),
        window_side=get("window_side_m", base.window_side),
        n_drops=get("n_drops", base.n_drops),
        seed=get("seed", base.seed),
        sir_cap=get("sir_cap", base.sir_cap),
    )


def load_config(path, overrides: dict | None = None) -> SimulationConfig:
    """Load, apply overrides (external units), and validate."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = parse_config_text(fh.read())
    if overrides:
        raw.update(overrides)
    return validate(config_from_raw(raw))


def external_items(config: SimulationConfig) -> list[tuple[str, object]]:
    """Config fields as (external key, external-unit value) pairs in KEY_ORDER."""
    pl, pw, csi = config.path_loss, config.power, config.csi
    values = {
        "lambda_b_per_km2": config.lambda_b * DENSITY_SCALE,
        "lambda_u_per_km2": config.lambda_u * DENSITY_SCALE,
        "n_coop": config.n_coop,
        "alpha1": pl.alpha1,
        "alpha2": pl.alpha2,
        "r_b_m": pl.r_b,
        "r_c_m": pl.r_c,
        "p_t_w": pw.p_t,
        "theta": pw.theta,
        "csi_mode": csi.mode.value,
        "f_c_hz": csi.f_c,
        "v_kmh": csi.v * SPEED_SCALE,
        "t_s_s": csi.t_s,
        "window_side_m": config.window_side,
        "n_drops": config.n_drops,
        "seed": config.seed,
        "sir_cap": config.sir_cap,
    }
    return [(k, values[k]) for k in KEY_ORDER]


def dumps_config(config: SimulationConfig) -> str:
    lines = [f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}"
             for k, v in external_items(config)]
    return "\n".join(lines) + "\n"


def save_config(config: SimulationConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_config(config))


# --- bundled experiment presets --------------------------------------------

FIGURE_IDS = ("fig3", "fig4", "fig5", "fig6", "fig7", "fig8")


def derive_point_seed(base_seed: int, index: int) -> int:
    """Independent 64-bit seed for sweep point `index` of a base seed."""
    return int(np.random.SeedSequence([int(base_seed), int(index)])
               .generate_state(1, np.uint64)[0])


def _preset_base(**kw) -> SimulationConfig:
    raw = dict(kw)
    return validate(config_from_raw(raw))


def figure_preset(figure_id: str, n_drops: int | None = None,
                  base_seed: int = 42) -> list[SimulationConfig]:
    """Return the bundled sweep of configs behind one preset id.

    Axis grids are artifact choices (recorded in the reproduce manifest):
    each preset fixes lambda_b=4000/km2, lambda_u=200/km2, [alpha1, alpha2] =
    [2, 4], R_c=70 m, N=5, perfect CSI, and sweeps one or two of them.
    fig6 shrinks the window with rising BS density to bound the drop cost.

    Args:
        figure_id: one of FIGURE_IDS.
        n_drops: override the per-point drop count (all presets default 1000).
        base_seed: per-point seeds are derived from it by index.
    """
    if figure_id not in FIGURE_IDS:
        raise ConfigError([f"unknown figure id {figure_id!r}, "
                           f"expected one of {list(FIGURE_IDS)}"])
    drops = 1000 if n_drops is None else int(n_drops)
    points: list[dict] = []
    if figure_id == "fig3":
        points = [{"r_c_m": float(rc)} for rc in range(10, 151, 20)]
    elif figure_id == "fig4":
        points = [{"alpha1": a1} for a1 in (2.0, 2.5, 3.0, 3.5, 4.0)]
    elif figure_id == "fig5":
        points = [{"lambda_u_per_km2": lu} for lu in (25.0, 50.0, 100.0, 200.0, 400.0)]
    elif figure_id == "fig6":
        for lb in (1e3, 3e3, 1e4, 3e4, 1e5, 3e5, 1e6):
            side = min(1000.0, max(250.0, 1000.0 * math.sqrt(4000.0 / lb)))
            points.append({"lambda_b_per_km2": lb, "window_side_m": side})
    elif figure_id == "fig7":
        points = [{"csi_mode": "delayed", "f_c_hz": fc * 1e9}
                  for fc in (0.5, 1.0, 2.0, 4.0, 8.0)]
    elif figure_id == "fig8":
        points = [{"n_coop": n, "theta": th}
                  for th in (0.1, 0.5, 1.0) for n in (1, 2, 3, 4, 5)]
    configs = []
    for i, overrides in enumerate(points):
        overrides["n_drops"] = drops
        overrides["seed"] = derive_point_seed(base_seed, i)
        configs.append(_preset_base(**overrides))
    return configs
