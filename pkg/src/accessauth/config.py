"""Simulation configuration: defaults, config files, ``SIM_`` environment overrides and flags.

Precedence, lowest to highest: defaults, config file, environment, flags.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import yaml

from .adversary import Knowledge, Strategy
from .codebook import DEFAULT_ALPHABET, DEFAULT_CANDIDATES, DEFAULT_SPARSITY
from .errors import InvalidPolynomial, NonPrimitivePolynomial, ValidationError
from .schedule import MonicPolynomial, check_polynomial
from .seedgen import DEFAULT_SEED_WIDTH, SeedVariant

log = logging.getLogger(__name__)

DEFAULT_SNR_DB = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)


@dataclass(frozen=True)
class SimConfig:
    K: int = 200
    N: int = 100
    S: int = 20
    J: int = 7
    L: int = 4
    poly: str = "1101"
    snr_db: tuple = DEFAULT_SNR_DB
    trials: int = 1000
    master_seed: int = 20231204
    sparsity: float = DEFAULT_SPARSITY
    zeta: float = 0.9
    sigma2: float = 1.0
    distance_km: tuple = (0.05, 1.0)
    strategy: str = Strategy.RANDOM_ACCESS.value
    knowledge: str = Knowledge.CANDIDATES.value
    adversary_count: int = 1
    adversary_transmit_prob: float = 0.5
    adversary_power: float = 1.0
    adversary_corr: float = 0.0
    seed_variant: str = SeedVariant.FULL.value
    seed_width: int = DEFAULT_SEED_WIDTH
    candidates: int = DEFAULT_CANDIDATES
    alphabet_size: int = len(DEFAULT_ALPHABET)
    refresh: bool = True
    csi_error_var: float = 0.0
    match_rtol: float = 1e-6
    baseline_enabled: bool = False
    calibration_size: int = 200
    baseline_grid: int = 1000
    workers: int = 1
    slot_duration: float | None = None
    output: str | None = None
    format: str = "csv"

    @property
    def mu(self) -> int:
        return MonicPolynomial.from_string(self.poly).degree

    @property
    def polynomial(self) -> MonicPolynomial:
        return MonicPolynomial.from_string(self.poly)

    @property
    def overloading_factor(self) -> float:
        return 100.0 * self.K / self.N

    def replace(self, **changes) -> "SimConfig":
        return validate(dataclasses.replace(self, **changes))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["snr_db"] = list(self.snr_db)
        d["distance_km"] = list(self.distance_km)
        d["mu"] = self.mu
        d["overloading_factor"] = self.overloading_factor
        return d

    def campaign_id(self) -> str:
        """Stable id of everything that affects results (not workers or output)."""
        d = self.to_dict()
        for k in ("workers", "output", "format", "slot_duration"):
            d.pop(k, None)
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(SimConfig)}


def _coerce(name: str, value):
    """Turn a file/env/flag value into the field's type."""
    if value is None:
        return None
    if name in ("snr_db", "distance_km"):
        if isinstance(value, str):
            value = [v for v in value.replace(",", " ").split() if v]
        if isinstance(value, (int, float)):
            value = [value]
        return tuple(float(v) for v in value)
    default = getattr(SimConfig, name, None)
    if name == "slot_duration":
        return float(value)
    if name in ("output",):
        return str(value)
    if isinstance(default, bool):
        if isinstance(value, str):
            low = value.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {value!r}")
        return bool(value)
    if isinstance(default, int):
        if isinstance(value, float) and not value.is_integer():
            raise ValueError(f"not an integer: {value!r}")
        return int(value)
    if isinstance(default, float):
        return float(value)
    if name == "poly":
        return str(value).strip()
    return str(value)


def validate(cfg: SimConfig) -> SimConfig:
    errors = {}
    for name in ("K", "N", "J", "L", "trials", "seed_width", "candidates", "calibration_size",
                 "baseline_grid", "workers"):
        if getattr(cfg, name) < 1:
            errors[name] = "must be at least 1"
    if cfg.S < 0:
        errors["S"] = "must be non-negative"
    elif cfg.S > cfg.K:
        errors["S"] = f"active devices S={cfg.S} exceed K={cfg.K}"
    if cfg.adversary_count < 0:
        errors["adversary_count"] = "must be non-negative"
    if not 0 <= cfg.sparsity < 1:
        errors["sparsity"] = "must be in [0, 1)"
    if not 0 <= cfg.zeta <= 1:
        errors["zeta"] = "must be in [0, 1]"
    if not cfg.sigma2 > 0:
        errors["sigma2"] = "must be positive"
    if len(cfg.distance_km) != 2 or not 0 < cfg.distance_km[0] <= cfg.distance_km[1]:
        errors["distance_km"] = "must be (min, max) with 0 < min <= max"
    if not 0 <= cfg.adversary_transmit_prob <= 1:
        errors["adversary_transmit_prob"] = "must be in [0, 1]"
    if not 0 <= cfg.adversary_corr <= 1:
        errors["adversary_corr"] = "must be in [0, 1]"
    if cfg.csi_error_var < 0:
        errors["csi_error_var"] = "must be non-negative"
    if not cfg.match_rtol > 0:
        errors["match_rtol"] = "must be positive"
    if not cfg.snr_db:
        errors["snr_db"] = "needs at least one SNR point"
    if cfg.calibration_size < 100:
        errors["calibration_size"] = "baseline calibration needs at least 100 statistics"
    for name, enum_type in (("strategy", Strategy), ("knowledge", Knowledge), ("seed_variant", SeedVariant)):
        try:
            enum_type(getattr(cfg, name))
        except ValueError:
            errors[name] = f"must be one of {[e.value for e in enum_type]}"
    if not 1 <= cfg.alphabet_size <= len(DEFAULT_ALPHABET):
        errors["alphabet_size"] = f"must be in [1, {len(DEFAULT_ALPHABET)}]"
    if cfg.candidates > cfg.N:
        errors["candidates"] = f"more candidates than the {cfg.N} cyclic shifts available"
    if cfg.format not in ("csv", "json"):
        errors["format"] = "must be csv or json"
    try:
        poly = MonicPolynomial.from_string(cfg.poly)
    except InvalidPolynomial as exc:
        errors["poly"] = str(exc)
    else:
        if poly.degree > cfg.seed_width * 4:
            errors["poly"] = "degree far exceeds the seed width"
    if errors:
        raise ValidationError(errors)
    return cfg


def _read_file(path) -> dict:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        data = yaml.safe_load(text) or {}
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise ValidationError({"config": f"{path} must hold a mapping"})
    return data


def _env_values(environ) -> dict:
    out = {}
    for name in FIELD_TYPES:
        key = "SIM_" + name.upper()
        if key in environ:
            out[name] = environ[key]
    return out


def load_config(path=None, flags: dict | None = None, environ=None) -> SimConfig:
    """Merge defaults, ``path``, ``SIM_*`` variables and ``flags`` into a validated config."""
    merged = {}
    if path is not None:
        merged.update(_read_file(path))
    merged.update(_env_values(os.environ if environ is None else environ))
    merged.update({k: v for k, v in (flags or {}).items() if v is not None})

    values, errors = {}, {}
    for name, raw in merged.items():
        if name not in FIELD_TYPES:
            errors[name] = "unknown setting"
            continue
        try:
            values[name] = _coerce(name, raw)
        except (TypeError, ValueError) as exc:
            errors[name] = str(exc)
    if errors:
        raise ValidationError(errors)
    cfg = validate(SimConfig(**values))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonPrimitivePolynomial)
        check_polynomial(cfg.polynomial)
    for w in caught:
        log.warning("%s", w.message)
    log.info("K=%d N=%d overloading factor %.0f%%", cfg.K, cfg.N, cfg.overloading_factor)
    return cfg
