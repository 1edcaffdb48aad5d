"""System model for an IRS-assisted dual-function radar-communication link.

A scenario bundles the array/IRS geometry, the fading channels, the noise
powers and the power budget of one problem instance. The radar return
travels radar -> IRS -> target -> IRS -> radar through the cascaded rank-1
channel; the user receives the superposition of the direct path and the
IRS-reflected path.

Power quantities are linear and noise-normalized: sigma^2 = 1 corresponds
to 0 dBm, so a 30 dBm budget is power_budget = 1000.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError, ContractError, ShapeError

TWO_PI = 2.0 * math.pi

UNIT_MODULUS_ATOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ScenarioConfig:
    """Static parameters of one problem instance."""

    n_tx: int = 16
    n_rx: int = 4
    n_irs_y: int = 6
    n_irs_z: int = 6
    element_spacing_over_wavelength: float = 0.5
    target_azimuth: float = math.pi / 6
    target_elevation: float = -math.pi / 12
    power_budget: float = 1000.0
    radar_noise_power: float = 1.0
    user_noise_power: float = 1.0
    cascaded_gain: complex = 0.1 + 0.0j
    irs_pathloss: float = 1.0
    beampattern_threshold: float = 1.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("n_tx", "n_rx", "n_irs_y", "n_irs_z"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        for name in ("power_budget", "radar_noise_power", "user_noise_power"):
            if not getattr(self, name) > 0.0:
                raise ConfigError(f"{name} must be > 0")
        if self.element_spacing_over_wavelength <= 0.0:
            raise ConfigError("element_spacing_over_wavelength must be > 0")
        if not (-math.pi / 2 < self.target_elevation < math.pi / 2):
            raise ConfigError("target_elevation must lie in (-pi/2, pi/2)")
        if not (-math.pi < self.target_azimuth <= math.pi):
            raise ConfigError("target_azimuth must lie in (-pi, pi]")
        if self.irs_pathloss < 0.0:
            raise ConfigError("irs_pathloss must be >= 0")
        if self.beampattern_threshold < 0.0:
            raise ConfigError("beampattern_threshold must be >= 0")
        object.__setattr__(self, "cascaded_gain", complex(self.cascaded_gain))

    @property
    def n_irs(self) -> int:
        return self.n_irs_y * self.n_irs_z


@dataclass(frozen=True)
class PhaseVector:
    """Unit-modulus IRS phase configuration.

    `angles` are canonicalized to [0, 2*pi); `values` holds exp(j*angles)
    and is rebuilt deterministically from the angles.
    """

    angles: np.ndarray
    values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        angles = np.mod(np.asarray(self.angles, dtype=float).ravel(), TWO_PI)
        if angles.size == 0:
            raise ShapeError("PhaseVector needs at least one element")
        object.__setattr__(self, "angles", _readonly(angles))
        object.__setattr__(self, "values", _readonly(np.exp(1j * angles)))

    @classmethod
    def from_values(cls, values: np.ndarray) -> "PhaseVector":
        values = np.asarray(values, dtype=complex).ravel()
        dev = np.max(np.abs(np.abs(values) - 1.0)) if values.size else 1.0
        if dev > UNIT_MODULUS_ATOL:
            raise ContractError(f"values are not unit modulus (max deviation {dev:.3e})")
        return cls(np.angle(values))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "PhaseVector":
        return cls(rng.uniform(0.0, TWO_PI, size=n))

    @property
    def n(self) -> int:
        return self.angles.size

    def unit_modulus_deviation(self) -> float:
        return float(np.max(np.abs(np.abs(self.values) - 1.0)))


@dataclass(frozen=True)
class Precoder:
    """Transmit precoding vector; solvers return it rescaled to the budget."""

    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, dtype=complex).ravel()
        if w.size == 0:
            raise ShapeError("Precoder needs at least one element")
        object.__setattr__(self, "w", _readonly(w))

    @classmethod
    def scaled_to_power(cls, w: np.ndarray, power: float) -> "Precoder":
        w = np.asarray(w, dtype=complex).ravel()
        nrm2 = float(np.real(np.vdot(w, w)))
        if nrm2 == 0.0:
            raise ContractError("cannot scale a zero vector to a positive power")
        return cls(w * math.sqrt(power / nrm2))

    @property
    def power(self) -> float:
        return float(np.real(np.vdot(self.w, self.w)))

    @property
    def n(self) -> int:
        return self.w.size


@dataclass(frozen=True)
class Channels:
    """Fading channels and the IRS steering vector of one instance."""

    h_ul: np.ndarray  # IRS -> radar receiver, (n_rx, n_irs)
    h_dl: np.ndarray  # radar transmitter -> IRS, (n_irs, n_tx)
    f_user: np.ndarray  # user -> IRS, (n_irs,)
    g_user: np.ndarray  # user -> radar transmitter, (n_tx,)
    a_irs: np.ndarray  # IRS steering vector toward the target, (n_irs,)

    def __post_init__(self):
        for name in ("h_ul", "h_dl"):
            m = np.asarray(getattr(self, name), dtype=complex)
            if m.ndim != 2:
                raise ShapeError(f"{name} must be a matrix")
            object.__setattr__(self, name, _readonly(m))
        for name in ("f_user", "g_user", "a_irs"):
            v = np.asarray(getattr(self, name), dtype=complex).ravel()
            object.__setattr__(self, name, _readonly(v))


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    channels: Channels

    def __post_init__(self):
        cfg, ch = self.config, self.channels
        n = cfg.n_irs
        expected = {
            "h_ul": (cfg.n_rx, n),
            "h_dl": (n, cfg.n_tx),
            "f_user": (n,),
            "g_user": (cfg.n_tx,),
            "a_irs": (n,),
        }
        for name, shape in expected.items():
            got = np.asarray(getattr(ch, name)).shape
            if got != shape:
                raise ShapeError(f"{name} has shape {got}, expected {shape}")
        dev = np.max(np.abs(np.abs(ch.a_irs) - 1.0))
        if dev > UNIT_MODULUS_ATOL:
            raise ContractError(f"a_irs is not unit modulus (max deviation {dev:.3e})")

    @property
    def n_irs(self) -> int:
        return self.config.n_irs


def steering_vector_upa(n_y: int, n_z: int, d_over_lambda: float, azimuth: float, elevation: float) -> np.ndarray:
    """Planar-array steering vector, flattened row-major over the (y, z) grid.

    Element (p, q) carries phase 2*pi*d/lambda*(p*sin(az)*cos(el) + q*sin(el)).
    """
    if n_y < 1 or n_z < 1:
        raise ShapeError("array dimensions must be >= 1")
    p = np.arange(n_y)[:, None]
    q = np.arange(n_z)[None, :]
    phase = TWO_PI * d_over_lambda * (p * (math.sin(azimuth) * math.cos(elevation)) + q * math.sin(elevation))
    return np.exp(1j * phase).ravel()


def steering_vector_ula(n: int, d_over_lambda: float, angle: float) -> np.ndarray:
    """Uniform linear array steering vector at the given angle."""
    if n < 1:
        raise ShapeError("array size must be >= 1")
    return np.exp(1j * TWO_PI * d_over_lambda * np.arange(n) * math.sin(angle))


def generate_random_scenario(cfg: ScenarioConfig) -> Scenario:
    """Draw i.i.d. unit-variance circularly-symmetric Gaussian channels.

    Fully deterministic for a given cfg.rng_seed. Path loss is carried by
    cascaded_gain and irs_pathloss, not by the normalized channels.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    n = cfg.n_irs

    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)

    channels = Channels(
        h_ul=cn(cfg.n_rx, n),
        h_dl=cn(n, cfg.n_tx),
        f_user=cn(n),
        g_user=cn(cfg.n_tx),
        a_irs=steering_vector_upa(
            cfg.n_irs_y,
            cfg.n_irs_z,
            cfg.element_spacing_over_wavelength,
            cfg.target_azimuth,
            cfg.target_elevation,
        ),
    )
    return Scenario(cfg, channels)


def build_cascaded_target_channel(s: Scenario, phi: PhaseVector) -> np.ndarray:
    """Rank-1 radar -> IRS -> target -> IRS -> radar channel matrix."""
    ch = s.channels
    if phi.n != s.n_irs:
        raise ShapeError(f"phase vector has {phi.n} elements, scenario has {s.n_irs}")
    reflected = ch.a_irs * phi.values
    left = ch.h_ul @ reflected  # (n_rx,)
    right = reflected @ ch.h_dl  # (n_tx,)
    return s.config.cascaded_gain * np.outer(left, right)


def build_user_channel(s: Scenario, phi: PhaseVector) -> np.ndarray:
    """Effective user channel: IRS-reflected path plus the direct path."""
    ch = s.channels
    if phi.n != s.n_irs:
        raise ShapeError(f"phase vector has {phi.n} elements, scenario has {s.n_irs}")
    return math.sqrt(s.config.irs_pathloss) * ((phi.values * ch.f_user) @ ch.h_dl) + ch.g_user


def radar_snr(s: Scenario, w: Precoder, phi: PhaseVector) -> float:
    """Radar receive SNR for the given precoder and IRS phases."""
    ch = s.channels
    reflected = ch.a_irs * phi.values
    left = ch.h_ul @ reflected
    through = reflected @ (ch.h_dl @ w.w)
    gain2 = abs(s.config.cascaded_gain) ** 2
    return gain2 * float(np.real(np.vdot(left, left))) * abs(through) ** 2 / s.config.radar_noise_power


def comm_snr(s: Scenario, w: Precoder, phi: PhaseVector) -> float:
    """Communication user SNR for the given precoder and IRS phases."""
    c_u = build_user_channel(s, phi)
    return abs(np.dot(c_u, w.w)) ** 2 / s.config.user_noise_power


def design_objective(s: Scenario, w: Precoder, phi: PhaseVector, alpha: float) -> float:
    """Weighted sum alpha * radar SNR + (1 - alpha) * user SNR."""
    if not 0.0 <= alpha <= 1.0:
        raise ContractError("alpha must lie in [0, 1]")
    return alpha * radar_snr(s, w, phi) + (1.0 - alpha) * comm_snr(s, w, phi)


def desired_covariance(s: Scenario, desired_angles) -> np.ndarray:
    """Desired transmit covariance: sum of steering outer products, trace = P_R."""
    angles = list(desired_angles)
    if not angles:
        raise ContractError("desired_angles must be nonempty")
    cfg = s.config
    r = np.zeros((cfg.n_tx, cfg.n_tx), dtype=complex)
    for theta in angles:
        a = steering_vector_ula(cfg.n_tx, cfg.element_spacing_over_wavelength, theta)
        r += np.outer(a, a.conj())
    return r * (cfg.power_budget / (cfg.n_tx * len(angles)))


# --- JSON serialization (complex numbers as [re, im] pairs) ---------------


def _to_pairs(a: np.ndarray):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _from_pairs(obj) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if a.ndim < 1 or a.shape[-1] != 2:
        raise ConfigError("complex entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def config_to_dict(cfg: ScenarioConfig) -> dict:
    d = {}
    for f in fields(cfg):
        value = getattr(cfg, f.name)
        if f.name == "cascaded_gain":
            value = [value.real, value.imag]
        d[f.name] = value
    return d


def config_from_dict(d: dict) -> ScenarioConfig:
    known = {f.name for f in fields(ScenarioConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown scenario field(s): {sorted(unknown)}")
    kwargs = dict(d)
    if "cascaded_gain" in kwargs:
        g = kwargs["cascaded_gain"]
        kwargs["cascaded_gain"] = complex(g[0], g[1]) if isinstance(g, (list, tuple)) else complex(g)
    return ScenarioConfig(**kwargs)


def scenario_to_dict(s: Scenario) -> dict:
    ch = s.channels
    return {
        "config": config_to_dict(s.config),
        "channels": {
            "h_ul": _to_pairs(ch.h_ul),
            "h_dl": _to_pairs(ch.h_dl),
            "f_user": _to_pairs(ch.f_user),
            "g_user": _to_pairs(ch.g_user),
            "a_irs": _to_pairs(ch.a_irs),
        },
    }


def scenario_from_dict(d: dict) -> Scenario:
    unknown = set(d) - {"config", "channels"}
    if unknown:
        raise ConfigError(f"unknown scenario document key(s): {sorted(unknown)}")
    try:
        cfg = config_from_dict(d["config"])
        ch = d["channels"]
        channels = Channels(
            h_ul=_from_pairs(ch["h_ul"]),
            h_dl=_from_pairs(ch["h_dl"]),
            f_user=_from_pairs(ch["f_user"]),
            g_user=_from_pairs(ch["g_user"]),
            a_irs=_from_pairs(ch["a_irs"]),
        )
    except KeyError as e:
        raise ConfigError(f"scenario document is missing key {e.args[0]!r}") from e
    return Scenario(cfg, channels)


def save_scenario(s: Scenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(s), fh, indent=2)


def load_scenario(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid scenario JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    return scenario_from_dict(d)
