"""Machine geometry and component-stiffness configuration.

All angles are radians and all stiffnesses are N/m or N*m/rad internally.
Config files may supply any angular quantity through a ``_deg``-suffixed key
(degrees, or N*m/deg for torsional coefficients); those are converted on load.
"""

import math
from dataclasses import dataclass, field, asdict

import numpy as np
import yaml

from .errors import ConfigError, GeometryError

DEG = math.pi / 180.0

# Defaults: measured base/platform radii and catalogue component stiffnesses
# of the modeled machine. Torsional values are given in N*m/deg (the unit the
# component data sheets use) and converted on ingest.
DEFAULTS = {
    "r_base": 0.326923,
    "r_platform": 0.250,
    "link_length": 0.400,
    "limb_count": 3,
    "tilt_limit_deg": 40.0,
    "axial": {
        "k_carriage": 3.8e7,
        "k_revolute": 3.2e9,
        "k_limb_body": 976e6,
    },
    "torsional": {
        "k_spherical_deg": 8.9e5,
        "k_limb_body_t_deg": 7.8e5,
    },
    "compliance_model": "lumped",
    "assembly_mode": "elbow_down",
}


@dataclass(frozen=True)
class AxialStiffness:
    """Per-limb axial series chain: carriage, revolute joint, limb body (N/m)."""

    k_carriage: float
    k_revolute: float
    k_limb_body: float


@dataclass(frozen=True)
class TorsionalStiffness:
    """Per-limb torsional series chain: spherical joint, fixed-length link (N*m/rad)."""

    k_spherical: float
    k_limb_body_t: float


@dataclass(frozen=True)
class ParametricCompliance:
    """Length-dependent carriage / link model: EA in N, rail and slider in N/m."""

    EA_leadscrew: float
    EA_link: float
    k_guiderail: float
    k_slider: float


@dataclass(frozen=True)
class ManipulatorConfig:
    r_base: float
    r_platform: float
    link_length: float
    tilt_limit: float
    axial: AxialStiffness
    torsional: TorsionalStiffness
    spherical_axes_k: tuple  # (k_x, k_y, k_z) of the spherical joint, N*m/rad
    limb_count: int = 3
    compliance_model: str = "lumped"
    parametric: ParametricCompliance | None = None
    assembly_mode: str = "elbow_down"

    def __post_init__(self):
        if self.limb_count != 3:
            raise ConfigError("limb_count must be 3, got %r" % (self.limb_count,))
        for key in ("r_base", "r_platform", "link_length"):
            if getattr(self, key) <= 0:
                raise ConfigError("%s must be positive, got %r" % (key, getattr(self, key)))
        if self.link_length <= abs(self.r_base - self.r_platform):
            raise GeometryError(
                "link_length %.6g cannot close the loop for radii %.6g / %.6g"
                % (self.link_length, self.r_base, self.r_platform)
            )
        if not 0.0 < self.tilt_limit < math.pi / 2:
            raise ConfigError("tilt_limit must lie in (0, pi/2), got %r" % (self.tilt_limit,))
        for name, chain in (("axial", self.axial), ("torsional", self.torsional)):
            for key, val in asdict(chain).items():
                if val <= 0:
                    raise ConfigError("%s.%s must be positive, got %r" % (name, key, val))
        if len(self.spherical_axes_k) != 3 or any(k <= 0 for k in self.spherical_axes_k):
            raise ConfigError("spherical_axes_k needs three positive values")
        if self.compliance_model not in ("lumped", "parametric"):
            raise ConfigError("compliance_model must be 'lumped' or 'parametric'")
        if self.compliance_model == "parametric":
            if self.parametric is None:
                raise ConfigError("parametric compliance model needs EA_leadscrew, "
                                  "EA_link, k_guiderail, k_slider")
            for key, val in asdict(self.parametric).items():
                if val <= 0:
                    raise ConfigError("parametric.%s must be positive, got %r" % (key, val))
        if self.assembly_mode not in ("elbow_down", "elbow_up"):
            raise ConfigError("assembly_mode must be 'elbow_down' or 'elbow_up'")

    def to_dict(self):
        """Plain-dict snapshot in internal (SI, radian) units; reload-safe."""
        out = {
            "r_base": self.r_base,
            "r_platform": self.r_platform,
            "link_length": self.link_length,
            "limb_count": self.limb_count,
            "tilt_limit": self.tilt_limit,
            "axial": asdict(self.axial),
            "torsional": asdict(self.torsional),
            "spherical_axes_k": list(self.spherical_axes_k),
            "compliance_model": self.compliance_model,
            "assembly_mode": self.assembly_mode,
        }
        if self.parametric is not None:
            out["parametric"] = asdict(self.parametric)
        return out


@dataclass(frozen=True)
class LimbFrame:
    """Fixed per-limb geometry: attachment points and joint axis directions."""

    index: int                 # 1..3
    xi: float                  # azimuth of the limb, radians
    b: np.ndarray              # base attachment (carriage rail foot)
    a_home: np.ndarray         # platform attachment in the platform frame
    s1: np.ndarray             # prismatic axis (unit)
    s2: np.ndarray             # revolute axis (unit, tangential)


def _resolve_deg_keys(mapping, keys):
    """Convert ``<key>_deg`` torsional entries (N*m/deg) to N*m/rad."""
    out = dict(mapping)
    for key in keys:
        dkey = key + "_deg"
        if dkey in out:
            if key in out:
                raise ConfigError("both %s and %s given" % (key, dkey))
            out[key] = float(out.pop(dkey)) / DEG
    return out


def _merge(base, override):
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _apply_set_overrides(raw, overrides):
    """Apply dotted ``key=value`` strings (CLI --set) onto the raw dict."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError("override %r is not of the form key=value" % (item,))
        key, _, text = item.partition("=")
        try:
            value = yaml.safe_load(text)
        except yaml.YAMLError:
            value = text
        target = raw
        parts = key.strip().split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ConfigError("cannot override %r: %r is not a section" % (key, part))
        target[parts[-1]] = value
    return raw


def _pick_angle_key(user, defaults, key, to_internal):
    """Resolve ``key`` vs ``key_deg`` with user values beating defaults."""
    dkey = key + "_deg"
    if key in user and dkey in user:
        raise ConfigError("both %s and %s given" % (key, dkey))
    if dkey in user:
        return to_internal(user[dkey])
    if key in user:
        return float(user[key])
    if dkey in defaults:
        return to_internal(defaults[dkey])
    return float(defaults[key])


def load_config(path=None, overrides=()):
    """Build a validated ManipulatorConfig from a YAML/JSON file plus overrides.

    Missing keys fall back to the built-in defaults. ``_deg``-suffixed keys
    are accepted anywhere an angular unit appears: tilt_limit_deg (degrees),
    torsional k_*_deg and spherical_axes_k_deg (N*m/deg).
    """
    raw = {}
    if path is not None:
        with open(path) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError("config file %s does not hold a mapping" % (path,))
        raw = loaded
    raw = _apply_set_overrides(dict(raw), overrides)
    merged = _merge(DEFAULTS, raw)

    try:
        tilt_limit = _pick_angle_key(raw, DEFAULTS, "tilt_limit", lambda v: float(v) * DEG)

        ax = merged["axial"]
        axial = AxialStiffness(
            k_carriage=float(ax["k_carriage"]),
            k_revolute=float(ax["k_revolute"]),
            k_limb_body=float(ax["k_limb_body"]),
        )

        user_to = raw.get("torsional", {})
        torsional = TorsionalStiffness(
            k_spherical=_pick_angle_key(user_to, DEFAULTS["torsional"],
                                        "k_spherical", lambda v: float(v) / DEG),
            k_limb_body_t=_pick_angle_key(user_to, DEFAULTS["torsional"],
                                          "k_limb_body_t", lambda v: float(v) / DEG),
        )

        if "spherical_axes_k_deg" in raw and "spherical_axes_k" in raw:
            raise ConfigError("both spherical_axes_k and spherical_axes_k_deg given")
        if "spherical_axes_k_deg" in raw:
            axes = [float(v) / DEG for v in raw["spherical_axes_k_deg"]]
        elif "spherical_axes_k" in raw:
            axes = [float(v) for v in raw["spherical_axes_k"]]
        else:
            axes = [torsional.k_spherical] * 3
        if len(axes) != 3:
            raise ConfigError("spherical_axes_k needs exactly three values")

        parametric = None
        if "parametric" in merged:
            pm = merged["parametric"]
            parametric = ParametricCompliance(
                EA_leadscrew=float(pm["EA_leadscrew"]),
                EA_link=float(pm["EA_link"]),
                k_guiderail=float(pm["k_guiderail"]),
                k_slider=float(pm["k_slider"]),
            )

        return ManipulatorConfig(
            r_base=float(merged["r_base"]),
            r_platform=float(merged["r_platform"]),
            link_length=float(merged["link_length"]),
            tilt_limit=tilt_limit,
            axial=axial,
            torsional=torsional,
            spherical_axes_k=tuple(axes),
            limb_count=int(merged["limb_count"]),
            compliance_model=str(merged["compliance_model"]),
            parametric=parametric,
            assembly_mode=str(merged["assembly_mode"]),
        )
    except KeyError as exc:
        raise ConfigError("missing configuration key: %s" % (exc,)) from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError("bad configuration value: %s" % (exc,)) from exc


def config_from_dict(data):
    """Rebuild a config from a ``to_dict`` snapshot or an in-memory mapping."""
    top = dict(_merge(DEFAULTS, data))
    if "tilt_limit_deg" in top and "tilt_limit" not in top:
        top["tilt_limit"] = float(top.pop("tilt_limit_deg")) * DEG
    top.pop("tilt_limit_deg", None)
    ax = top["axial"]
    to = dict(top["torsional"])
    # defaults carry _deg variants; a snapshot's converted value wins
    for key in ("k_spherical", "k_limb_body_t"):
        if key in to:
            to.pop(key + "_deg", None)
    to = _resolve_deg_keys(to, ("k_spherical", "k_limb_body_t"))
    axes = top.get("spherical_axes_k")
    torsional = TorsionalStiffness(float(to["k_spherical"]), float(to["k_limb_body_t"]))
    if axes is None:
        axes = [torsional.k_spherical] * 3
    parametric = None
    if "parametric" in top:
        pm = top["parametric"]
        parametric = ParametricCompliance(float(pm["EA_leadscrew"]), float(pm["EA_link"]),
                                          float(pm["k_guiderail"]), float(pm["k_slider"]))
    return ManipulatorConfig(
        r_base=float(top["r_base"]),
        r_platform=float(top["r_platform"]),
        link_length=float(top["link_length"]),
        tilt_limit=float(top["tilt_limit"]),
        axial=AxialStiffness(float(ax["k_carriage"]), float(ax["k_revolute"]),
                             float(ax["k_limb_body"])),
        torsional=torsional,
        spherical_axes_k=tuple(float(v) for v in axes),
        limb_count=int(top.get("limb_count", 3)),
        compliance_model=str(top.get("compliance_model", "lumped")),
        parametric=parametric,
        assembly_mode=str(top.get("assembly_mode", "elbow_down")),
    )


def limb_frames(config):
    """The three fixed limb frames at azimuths 0, 120 and 240 degrees."""
    frames = []
    for i in range(1, config.limb_count + 1):
        xi = (i - 1) * 2.0 * math.pi / 3.0
        c, s = math.cos(xi), math.sin(xi)
        frames.append(LimbFrame(
            index=i,
            xi=xi,
            b=np.array([config.r_base * c, config.r_base * s, 0.0]),
            a_home=np.array([config.r_platform * c, config.r_platform * s, 0.0]),
            s1=np.array([0.0, 0.0, 1.0]),
            s2=np.array([-s, c, 0.0]),
        ))
    return frames
