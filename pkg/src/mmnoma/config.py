"""Scenario configuration for clustered mmWave NOMA networks.

A :class:`NetworkConfig` is the single source of truth for every physical and
protocol parameter used by the analytical and Monte Carlo code.  It is frozen
and validated on construction; use :meth:`NetworkConfig.with_updates` to derive
modified copies (derived fields are recomputed and everything is revalidated).

Config files are flat TOML with units carried in the key names::

    bs_density_per_m2 = 5.092958178940651e-06
    sigma_m = 10.0
    K = 2
    noise_dbm = -50.0
    tx_power_dbm = 30.0
    scheme = "FNRF"
    k = 1

Missing keys fall back to the defaults in :data:`DEFAULTS`.
"""

from __future__ import annotations

import dataclasses
import enum
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SPEED_OF_LIGHT = 299_792_458.0
REFERENCE_DISTANCE_M = 1.0


class ConfigError(ValueError):
    """Raised when a configuration violates one of its rules."""


class RangeTag(str, enum.Enum):
    R1 = "R1"
    R2 = "R2"


@dataclass(frozen=True)
class SelectionScheme:
    """User pairing rule inside the typical cluster.

    ``kind`` is one of ``FNRF`` (fixed near, random far), ``RNFF`` (random
    near, fixed far) or ``FNFF`` (both fixed).  ``k`` and ``j`` are 1-based
    distance ranks.  ``None`` means "use the default", which is ``k=1`` and
    ``j=2K``, so sweeps over K keep tracking the farthest user.
    """

    kind: str = "FNRF"
    k: int | None = None
    j: int | None = None

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in ("FNRF", "RNFF", "FNFF"):
            raise ConfigError(f"unknown selection scheme {self.kind!r}")
        object.__setattr__(self, "kind", kind)

    def near_index(self, K: int) -> int | None:
        if self.kind == "RNFF":
            return None
        return 1 if self.k is None else self.k

    def far_index(self, K: int) -> int | None:
        if self.kind == "FNRF":
            return None
        return 2 * K if self.j is None else self.j

    def validate(self, K: int) -> None:
        n_users = 2 * K
        k = self.near_index(K)
        j = self.far_index(K)
        if self.kind == "FNRF" and not 1 <= k <= n_users - 1:
            raise ConfigError(f"FNRF requires 1 <= k <= 2K-1 (k={k}, 2K={n_users})")
        if self.kind == "RNFF" and not 2 <= j <= n_users:
            raise ConfigError(f"RNFF requires 2 <= j <= 2K (j={j}, 2K={n_users})")
        if self.kind == "FNFF" and not 1 <= k < j <= n_users:
            raise ConfigError(f"FNFF requires 1 <= k < j <= 2K (k={k}, j={j}, 2K={n_users})")

    def label(self, K: int) -> str:
        if self.kind == "FNRF":
            return f"FNRF(k={self.near_index(K)})"
        if self.kind == "RNFF":
            return f"RNFF(j={self.far_index(K)})"
        return f"FNFF(k={self.near_index(K)},j={self.far_index(K)})"


def intercept_from_frequency(carrier_frequency: float) -> float:
    """Free-space intercept ``(lambda_w / (4 pi d0))**2`` with ``d0 = 1 m``."""
    wavelength = SPEED_OF_LIGHT / carrier_frequency
    return (wavelength / (4.0 * math.pi * REFERENCE_DISTANCE_M)) ** 2


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class NetworkConfig:
    lambda_c: float
    sigma: float
    K: int
    R_L: float
    alpha_L: float
    alpha_N: float
    N_L: int
    N_N: int
    M: int
    carrier_frequency: float
    a_k: float
    a_j: float
    tau_k: float
    tau_j: float
    noise_normalized: float
    bandwidth: float
    scheme: SelectionScheme = SelectionScheme()
    n1: int = 10
    n2: int = 50
    C_L: float = 0.0
    C_N: float = 0.0
    noise_dbm: float | None = None
    tx_power_dbm: float | None = None
    quad_eps: float = 1e-12
    quad_abs_tol: float = 1e-9

    def __post_init__(self):
        if self.C_L <= 0.0 or self.C_N <= 0.0:
            c = intercept_from_frequency(self.carrier_frequency) if self.carrier_frequency > 0 else 0.0
            if self.C_L <= 0.0:
                object.__setattr__(self, "C_L", c)
            if self.C_N <= 0.0:
                object.__setattr__(self, "C_N", c)
        if self.noise_dbm is not None:
            if self.tx_power_dbm is None:
                raise ConfigError("noise_dbm given without tx_power_dbm")
            object.__setattr__(
                self, "noise_normalized", dbm_to_watt(self.noise_dbm) / dbm_to_watt(self.tx_power_dbm)
            )
        self._validate()

    def _validate(self) -> None:
        positive = {
            "lambda_c": self.lambda_c >= 0.0,
            "sigma": self.sigma > 0.0,
            "R_L": self.R_L > 0.0,
            "carrier_frequency": self.carrier_frequency > 0.0,
            "bandwidth": self.bandwidth > 0.0,
            "noise_normalized": self.noise_normalized >= 0.0,
            "tau_k": self.tau_k >= 0.0,
            "tau_j": self.tau_j >= 0.0,
            "alpha_L": self.alpha_L > 0.0,
        }
        for name, ok in positive.items():
            if not ok:
                raise ConfigError(f"{name} must be positive (got {getattr(self, name)!r})")
        for name in ("K", "N_L", "N_N", "M", "n1", "n2"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be an integer >= 1 (got {value!r})")
        if not self.alpha_N > 2.0:
            raise ConfigError(f"alpha_N > 2 violated (alpha_N={self.alpha_N})")
        if not 0.0 < self.a_k < self.a_j:
            raise ConfigError(f"a_k < a_j violated (a_k={self.a_k}, a_j={self.a_j})")
        if abs(self.a_k + self.a_j - 1.0) > 1e-12:
            raise ConfigError(f"a_k + a_j = 1 violated (sum={self.a_k + self.a_j})")
        if not self.a_j - self.tau_j * self.a_k > 0.0:
            raise ConfigError(
                f"a_j - tau_j a_k <= 0: NOMA infeasible (a_j={self.a_j}, tau_j={self.tau_j}, a_k={self.a_k})"
            )
        self.scheme.validate(self.K)

    @property
    def n_users(self) -> int:
        return 2 * self.K

    @property
    def near_index(self) -> int | None:
        return self.scheme.near_index(self.K)

    @property
    def far_index(self) -> int | None:
        return self.scheme.far_index(self.K)

    def with_updates(self, **changes: Any) -> "NetworkConfig":
        """Return a revalidated copy.  Accepts field names and file keys."""
        data = self.to_mapping()
        for key, value in changes.items():
            key = _ALIASES.get(key, key)
            if key == "noise_normalized":
                data.pop("noise_dbm", None)
                data.pop("tx_power_dbm", None)
            if key == "carrier_frequency_hz":
                data.pop("C_L", None)
                data.pop("C_N", None)
            if key == "a_k" and "a_j" not in changes:
                data["a_j"] = 1.0 - float(value)
            if key == "a_j" and "a_k" not in changes:
                data["a_k"] = 1.0 - float(value)
            data[key] = value
        return config_from_mapping(data)

    def to_mapping(self) -> dict[str, Any]:
        """Flat file-key mapping; round-trips through :func:`config_from_mapping`."""
        out: dict[str, Any] = {}
        for field, key in _FIELD_TO_KEY.items():
            out[key] = getattr(self, field)
        out["scheme"] = self.scheme.kind
        if self.scheme.k is not None:
            out["k"] = self.scheme.k
        if self.scheme.j is not None:
            out["j"] = self.scheme.j
        if self.noise_dbm is not None:
            out["noise_dbm"] = self.noise_dbm
            out["tx_power_dbm"] = self.tx_power_dbm
            del out["noise_normalized"]
        return out


# field name -> file key
_FIELD_TO_KEY = {
    "lambda_c": "bs_density_per_m2",
    "sigma": "sigma_m",
    "K": "K",
    "R_L": "los_radius_m",
    "alpha_L": "alpha_L",
    "alpha_N": "alpha_N",
    "N_L": "N_L",
    "N_N": "N_N",
    "M": "M",
    "carrier_frequency": "carrier_frequency_hz",
    "a_k": "a_k",
    "a_j": "a_j",
    "tau_k": "tau_k",
    "tau_j": "tau_j",
    "noise_normalized": "noise_normalized",
    "bandwidth": "bandwidth_hz",
    "n1": "n1",
    "n2": "n2",
    "C_L": "C_L",
    "C_N": "C_N",
    "quad_eps": "quad_eps",
    "quad_abs_tol": "quad_abs_tol",
}
_KEY_TO_FIELD = {v: k for k, v in _FIELD_TO_KEY.items()}
_ALIASES = {field: key for field, key in _FIELD_TO_KEY.items() if field != key}
_INT_KEYS = {"K", "N_L", "N_N", "M", "n1", "n2", "k", "j"}
_EXTRA_KEYS = {"scheme", "k", "j", "noise_dbm", "tx_power_dbm"}

DEFAULT_DENSITY = 1.0 / (250.0**2 * math.pi)

DEFAULTS: dict[str, Any] = {
    "bs_density_per_m2": DEFAULT_DENSITY,
    "sigma_m": 10.0,
    "K": 2,
    "los_radius_m": 100.0,
    "alpha_L": 2.0,
    "alpha_N": 4.0,
    "N_L": 3,
    "N_N": 2,
    "M": 10,
    "carrier_frequency_hz": 28e9,
    "a_k": 0.1,
    "a_j": 0.9,
    "tau_k": 1.0,
    "tau_j": 0.2,
    "noise_dbm": -50.0,
    "tx_power_dbm": 30.0,
    "bandwidth_hz": 100e6,
    "scheme": "FNRF",
    "n1": 10,
    "n2": 50,
}


def known_keys() -> set[str]:
    return set(_KEY_TO_FIELD) | _EXTRA_KEYS


def config_from_mapping(data: Mapping[str, Any], defaults: bool = True) -> NetworkConfig:
    """Build a validated config from file keys (field names are accepted too)."""
    merged: dict[str, Any] = dict(DEFAULTS) if defaults else {}
    # An explicit normalized noise overrides the dBm pair coming from defaults.
    if "noise_normalized" in data and "noise_dbm" not in data:
        merged.pop("noise_dbm", None)
        merged.pop("tx_power_dbm", None)
    if "a_k" in data and "a_j" not in data:
        merged["a_j"] = 1.0 - float(data["a_k"])
    for key, value in data.items():
        merged[_ALIASES.get(key, key)] = value

    unknown = set(merged) - known_keys()
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    kwargs: dict[str, Any] = {}
    for key, value in merged.items():
        if key in _EXTRA_KEYS:
            continue
        kwargs[_KEY_TO_FIELD[key]] = _coerce(key, value)
    kwargs.setdefault("noise_normalized", 0.0)
    kwargs["scheme"] = SelectionScheme(
        str(merged.get("scheme", "FNRF")),
        _coerce("k", merged["k"]) if merged.get("k") is not None else None,
        _coerce("j", merged["j"]) if merged.get("j") is not None else None,
    )
    if merged.get("noise_dbm") is not None:
        kwargs["noise_dbm"] = float(merged["noise_dbm"])
        kwargs["tx_power_dbm"] = None if merged.get("tx_power_dbm") is None else float(merged["tx_power_dbm"])
    missing = [f.name for f in dataclasses.fields(NetworkConfig)
               if f.name not in kwargs and f.default is dataclasses.MISSING]
    if missing:
        raise ConfigError(f"missing config keys: {sorted(_FIELD_TO_KEY[m] for m in missing)}")
    try:
        return NetworkConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def _coerce(key: str, value: Any) -> Any:
    if key in _INT_KEYS:
        if isinstance(value, str):
            value = float(value)
        if int(value) != value:
            raise ConfigError(f"{key} must be an integer (got {value!r})")
        return int(value)
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be numeric (got {value!r})") from exc


def default_config(**overrides: Any) -> NetworkConfig:
    """Default network: far-user power share 0.9 and -50 dBm noise."""
    return config_from_mapping(dict(overrides))


def load_config(path: str | Path) -> NetworkConfig:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    for key, value in data.items():
        if isinstance(value, (dict, list)):
            raise ConfigError(f"config must be flat; key {key!r} is nested")
    return config_from_mapping(data)


def dumps_config(cfg: NetworkConfig) -> str:
    lines = []
    for key, value in cfg.to_mapping().items():
        if isinstance(value, str):
            lines.append(f'{key} = "{value}"')
        elif isinstance(value, bool):
            lines.append(f"{key} = {str(value).lower()}")
        elif isinstance(value, int):
            lines.append(f"{key} = {value}")
        else:
            lines.append(f"{key} = {float(value)!r}")
    return "\n".join(lines) + "\n"


def save_config(cfg: NetworkConfig, path: str | Path) -> None:
    Path(path).write_text(dumps_config(cfg))


def parse_assignment(text: str) -> tuple[str, Any]:
    """Parse a ``key=value`` override as given to ``--set``."""
    if "=" not in text:
        raise ConfigError(f"expected key=value, got {text!r}")
    key, raw = (part.strip() for part in text.split("=", 1))
    key = _ALIASES.get(key, key)
    if key not in known_keys():
        raise ConfigError(f"unknown config key {key!r}")
    if key == "scheme":
        return key, raw.strip("\"'")
    if key in ("k", "j") and raw.lower() in ("none", ""):
        return key, None
    return key, raw


def classify_threshold_range(cfg: NetworkConfig) -> RangeTag:
    """R1 when the SIC condition dominates the near user's own decoding.

    The boundary ``a_j == a_k tau_j (1 + 1/tau_k)`` belongs to R1; both
    branches give the same coverage there.
    """
    return threshold_range(cfg.a_k, cfg.a_j, cfg.tau_k, cfg.tau_j)


def threshold_range(a_k: float, a_j: float, tau_k: float, tau_j: float) -> RangeTag:
    if tau_k == 0.0:
        return RangeTag.R1
    # tau_j/(a_j - tau_j a_k) >= tau_k/a_k, cross-multiplied; the relative
    # slack keeps the exact boundary in R1 despite rounding.
    if tau_j * a_k >= tau_k * (a_j - tau_j * a_k) * (1.0 - 1e-12):
        return RangeTag.R1
    return RangeTag.R2
