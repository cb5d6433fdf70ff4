"""Experiment specifications: JSON schema, strict validation, variants.

A spec file is one JSON object. Unknown keys anywhere are rejected with
the offending key path in the message, so typos fail loudly instead of
silently running defaults. Variants let one spec sweep propagation
profiles, K-factor handling, correlation structure, angular support, or
aperture while sharing the base system.
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass, field

import numpy as np

from .channel import ArrayGeometry
from .scenario import PROFILES, CellConfig, PropagationProfile

KINDS = ("snr_sweep", "sum_se_cdf", "antenna_sweep", "calibrate", "single")
CORRELATIONS = ("unequal", "equal")
K_MODES = ("sampled", "zero", "fixed")
LIMIT_MODES = ("plain", "full", "both")
FORMATS = ("csv", "json")

_NAME_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")


class ConfigError(ValueError):
    """Invalid experiment specification; maps to CLI exit code 2."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}" if path else message)


def _check_keys(obj: dict, allowed, path: str):
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        _fail(path, f"unknown key(s) {', '.join(unknown)}; "
                    f"allowed: {', '.join(sorted(allowed))}")


def _expect(obj, kind, path: str):
    if kind is float:
        if isinstance(obj, bool) or not isinstance(obj, (int, float)):
            _fail(path, f"expected a number, got {type(obj).__name__}")
        return float(obj)
    if kind is int:
        if isinstance(obj, bool) or not isinstance(obj, int):
            _fail(path, f"expected an integer, got {type(obj).__name__}")
        return obj
    if not isinstance(obj, kind):
        _fail(path, f"expected {kind.__name__}, got {type(obj).__name__}")
    return obj


def _take(obj: dict, key: str, kind, path: str, default=None, required=False):
    if key not in obj:
        if required:
            _fail(path, f"missing required key {key!r}")
        return default
    return _expect(obj[key], kind, f"{path}.{key}" if path else key)


@dataclass(frozen=True)
class VariantSpec:
    """Per-variant overrides; ``None`` inherits the base spec value."""

    label: str
    profile: PropagationProfile | None = None
    correlation: str | None = None
    k_mode: str | None = None
    k_fixed_db: float | None = None
    angular_support: tuple[float, float] | None = None
    aperture_wl: float | None = None


@dataclass(frozen=True)
class ResolvedVariant:
    """One fully resolved experiment variant."""

    label: str
    profile: PropagationProfile
    correlation: str
    k_mode: str
    k_fixed_db: float | None
    angular_support: tuple[float, float]
    aperture_wl: float


@dataclass(frozen=True)
class CalibrationOptions:
    n_drops: int = 200
    n_fading: int = 100
    percentile: float = 5.0
    target_db: float = 0.0
    tol_db: float = 0.1


@dataclass(frozen=True)
class ExperimentSpec:
    """Validated description of one harness run."""

    kind: str
    name: str
    seed: int
    num_antennas: tuple[int, ...]          # one entry unless antenna_sweep
    aperture_wl: float
    num_terminals: int
    num_paths: int
    angular_support: tuple[float, float]
    radius_m: float
    exclusion_radius_m: float
    atten_const: float
    noise_power: float
    profile: PropagationProfile
    snr_db: tuple[float, ...]
    n_fading: int
    n_drops: int
    correlation: str
    k_mode: str
    k_fixed_db: float | None
    limit_mode: str
    track_terminal: int
    include_mc: bool
    variants: tuple[VariantSpec, ...]
    calibration: CalibrationOptions
    out_path: str | None
    out_format: str
    echo: dict = field(repr=False, compare=False, default_factory=dict)

    def cell(self, variant: ResolvedVariant) -> CellConfig:
        """Cell configuration of one resolved variant."""
        return CellConfig(
            num_terminals=self.num_terminals,
            num_paths=self.num_paths,
            radius_m=self.radius_m,
            exclusion_radius_m=self.exclusion_radius_m,
            atten_const=self.atten_const,
            angular_support=variant.angular_support,
            noise_power=self.noise_power,
        )

    def resolve_variants(self) -> list[ResolvedVariant]:
        """Expand the variant list, or the base itself when there is none."""
        if not self.variants:
            base = VariantSpec(label="")
            return [self._resolve(base)]
        return [self._resolve(v) for v in self.variants]

    def _resolve(self, v: VariantSpec) -> ResolvedVariant:
        def pick(value, default):
            return default if value is None else value
        k_mode = pick(v.k_mode, self.k_mode)
        return ResolvedVariant(
            label=v.label,
            profile=pick(v.profile, self.profile),
            correlation=pick(v.correlation, self.correlation),
            k_mode=k_mode,
            k_fixed_db=pick(v.k_fixed_db, self.k_fixed_db),
            angular_support=pick(v.angular_support, self.angular_support),
            aperture_wl=pick(v.aperture_wl, self.aperture_wl),
        )

    def experiment_id(self, variant: ResolvedVariant) -> str:
        return f"{self.name}/{variant.label}" if variant.label else self.name


def _parse_profile(obj, path: str) -> PropagationProfile:
    if isinstance(obj, str):
        if obj not in PROFILES:
            _fail(path, f"unknown profile {obj!r}; "
                        f"built-in: {', '.join(sorted(PROFILES))}")
        return PROFILES[obj]
    obj = _expect(obj, dict, path)
    allowed = ("name", "band", "carrier_ghz", "alpha_los", "alpha_nlos",
               "shadow_std_los_db", "shadow_std_nlos_db", "k_mean_db",
               "k_std_db", "los_decay_m", "outage_prob")
    _check_keys(obj, allowed, path)
    kwargs = {"name": _take(obj, "name", str, path, default="inline")}
    for key in allowed[1:]:
        if key == "band":
            kwargs[key] = _take(obj, key, str, path, required=True)
        elif key in ("los_decay_m", "outage_prob"):
            value = _take(obj, key, float, path)
            if value is not None:
                kwargs[key] = value
        else:
            kwargs[key] = _take(obj, key, float, path, required=True)
    try:
        return PropagationProfile(**kwargs)
    except ValueError as exc:
        _fail(path, str(exc))


def _parse_support(obj, path: str) -> tuple[float, float]:
    obj = _expect(obj, list, path)
    if len(obj) != 2:
        _fail(path, "angular_support must be [low, high] in radians")
    lo = _expect(obj[0], float, f"{path}[0]")
    hi = _expect(obj[1], float, f"{path}[1]")
    if not (-np.pi / 2 <= lo < hi <= np.pi / 2):
        _fail(path, "angular_support must be an interval inside [-pi/2, pi/2]")
    return (lo, hi)


def _parse_k_mode(obj, path: str) -> tuple[str, float | None]:
    if isinstance(obj, str):
        if obj not in ("sampled", "zero"):
            _fail(path, 'k_mode must be "sampled", "zero", or {"fixed_db": x}')
        return obj, None
    obj = _expect(obj, dict, path)
    _check_keys(obj, ("fixed_db",), path)
    return "fixed", _take(obj, "fixed_db", float, path, required=True)


def _parse_variant(obj, path: str) -> VariantSpec:
    obj = _expect(obj, dict, path)
    allowed = ("label", "profile", "correlation", "k_mode",
               "angular_support", "aperture_wl")
    _check_keys(obj, allowed, path)
    label = _take(obj, "label", str, path, required=True)
    if not _NAME_RE.match(label):
        _fail(f"{path}.label", f"invalid label {label!r}")
    profile = None
    if "profile" in obj:
        profile = _parse_profile(obj["profile"], f"{path}.profile")
    correlation = _take(obj, "correlation", str, path)
    if correlation is not None and correlation not in CORRELATIONS:
        _fail(f"{path}.correlation", f"must be one of {CORRELATIONS}")
    k_mode, k_fixed = (None, None)
    if "k_mode" in obj:
        k_mode, k_fixed = _parse_k_mode(obj["k_mode"], f"{path}.k_mode")
    support = None
    if "angular_support" in obj:
        support = _parse_support(obj["angular_support"], f"{path}.angular_support")
    aperture = _take(obj, "aperture_wl", float, path)
    if aperture is not None and aperture <= 0:
        _fail(f"{path}.aperture_wl", "must be positive")
    return VariantSpec(label=label, profile=profile, correlation=correlation,
                       k_mode=k_mode, k_fixed_db=k_fixed,
                       angular_support=support, aperture_wl=aperture)


_TOP_KEYS = ("kind", "name", "seed", "system", "cell", "profile", "snr_db",
             "n_fading", "n_drops", "correlation", "k_mode", "limit_mode",
             "track_terminal", "include_mc", "variants", "calibration",
             "output", "notes")


def parse_spec(obj: dict) -> ExperimentSpec:
    """Validate a raw JSON object into an :class:`ExperimentSpec`."""
    obj = _expect(obj, dict, "")
    _check_keys(obj, _TOP_KEYS, "")
    kind = _take(obj, "kind", str, "", required=True)
    if kind not in KINDS:
        _fail("kind", f"must be one of {', '.join(KINDS)}")
    name = _take(obj, "name", str, "", default=kind)
    if not _NAME_RE.match(name):
        _fail("name", f"invalid name {name!r}")
    seed = _take(obj, "seed", int, "", default=0)
    if seed < 0:
        _fail("seed", "must be nonnegative")

    system = _expect(obj.get("system"), dict, "system") \
        if "system" in obj else _fail("", "missing required key 'system'")
    _check_keys(system, ("num_antennas", "num_terminals", "num_paths",
                         "aperture_wl", "angular_support"), "system")
    raw_m = system.get("num_antennas")
    if raw_m is None:
        _fail("system", "missing required key 'num_antennas'")
    if isinstance(raw_m, list):
        if kind != "antenna_sweep":
            _fail("system.num_antennas", "a list is only valid for antenna_sweep")
        if not raw_m:
            _fail("system.num_antennas", "must not be empty")
        num_antennas = tuple(_expect(m, int, f"system.num_antennas[{i}]")
                             for i, m in enumerate(raw_m))
    else:
        num_antennas = (_expect(raw_m, int, "system.num_antennas"),)
    num_terminals = _take(system, "num_terminals", int, "system", required=True)
    num_paths = _take(system, "num_paths", int, "system", required=True)
    aperture = _take(system, "aperture_wl", float, "system", default=8.0)
    support = _parse_support(system["angular_support"], "system.angular_support") \
        if "angular_support" in system else (-np.pi / 16, np.pi / 16)

    cell = _take(obj, "cell", dict, "", default={})
    _check_keys(cell, ("radius_m", "exclusion_radius_m", "atten_const",
                       "noise_power"), "cell")
    radius = _take(cell, "radius_m", float, "cell", default=100.0)
    exclusion = _take(cell, "exclusion_radius_m", float, "cell", default=10.0)
    atten = _take(cell, "atten_const", float, "cell", default=1.0)
    noise = _take(cell, "noise_power", float, "cell", default=1.0)

    profile = _parse_profile(obj.get("profile", "umi-microwave-2ghz"), "profile")

    raw_snr = obj.get("snr_db", [0.0])
    if not isinstance(raw_snr, list):
        raw_snr = [raw_snr]
    if not raw_snr:
        _fail("snr_db", "must not be empty")
    snr_db = tuple(_expect(s, float, f"snr_db[{i}]") for i, s in enumerate(raw_snr))
    if kind in ("sum_se_cdf", "antenna_sweep", "calibrate") and len(snr_db) != 1:
        _fail("snr_db", f"{kind} takes exactly one SNR point")

    n_fading = _take(obj, "n_fading", int, "", default=10_000)
    n_drops = _take(obj, "n_drops", int, "", default=1)
    if n_fading < 1:
        _fail("n_fading", "must be positive")
    if n_drops < 1:
        _fail("n_drops", "must be positive")

    correlation = _take(obj, "correlation", str, "", default="unequal")
    if correlation not in CORRELATIONS:
        _fail("correlation", f"must be one of {CORRELATIONS}")
    k_mode, k_fixed = _parse_k_mode(obj.get("k_mode", "sampled"), "k_mode")
    limit_mode = _take(obj, "limit_mode", str, "", default="plain")
    if limit_mode not in LIMIT_MODES:
        _fail("limit_mode", f"must be one of {LIMIT_MODES}")
    track = _take(obj, "track_terminal", int, "", default=0)
    if not 0 <= track < num_terminals:
        _fail("track_terminal", "out of range")
    include_mc = _take(obj, "include_mc", bool, "",
                       default=(kind != "antenna_sweep"))

    variants = tuple(_parse_variant(v, f"variants[{i}]")
                     for i, v in enumerate(_take(obj, "variants", list, "",
                                                 default=[])))
    labels = [v.label for v in variants]
    if len(set(labels)) != len(labels):
        _fail("variants", "labels must be unique")

    cal = _take(obj, "calibration", dict, "", default={})
    _check_keys(cal, ("n_drops", "n_fading", "percentile", "target_db",
                      "tol_db"), "calibration")
    calibration = CalibrationOptions(
        n_drops=_take(cal, "n_drops", int, "calibration", default=200),
        n_fading=_take(cal, "n_fading", int, "calibration", default=100),
        percentile=_take(cal, "percentile", float, "calibration", default=5.0),
        target_db=_take(cal, "target_db", float, "calibration", default=0.0),
        tol_db=_take(cal, "tol_db", float, "calibration", default=0.1),
    )
    if calibration.n_drops < 1 or calibration.n_fading < 1:
        _fail("calibration", "n_drops and n_fading must be positive")
    if not 0 < calibration.percentile < 100:
        _fail("calibration.percentile", "must lie strictly inside (0, 100)")

    output = _take(obj, "output", dict, "", default={})
    _check_keys(output, ("path", "format"), "output")
    out_path = _take(output, "path", str, "output", default=None)
    out_format = _take(output, "format", str, "output", default="csv")
    if out_format not in FORMATS:
        _fail("output.format", f"must be one of {FORMATS}")

    _take(obj, "notes", str, "")

    spec = ExperimentSpec(
        kind=kind, name=name, seed=seed, num_antennas=num_antennas,
        aperture_wl=aperture, num_terminals=num_terminals,
        num_paths=num_paths, angular_support=support, radius_m=radius,
        exclusion_radius_m=exclusion, atten_const=atten, noise_power=noise,
        profile=profile, snr_db=snr_db, n_fading=n_fading, n_drops=n_drops,
        correlation=correlation, k_mode=k_mode, k_fixed_db=k_fixed,
        limit_mode=limit_mode, track_terminal=track, include_mc=include_mc,
        variants=variants, calibration=calibration, out_path=out_path,
        out_format=out_format, echo=obj,
    )
    _validate_materialization(spec)
    return spec


def _validate_materialization(spec: ExperimentSpec):
    # Building the concrete geometry and cells surfaces range errors
    # (spacing, support, radii) at load time instead of mid-run.
    try:
        for m in spec.num_antennas:
            for variant in spec.resolve_variants():
                ArrayGeometry(num_antennas=m, aperture_wl=variant.aperture_wl)
                spec.cell(variant)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_spec(path: str) -> ExperimentSpec:
    """Read and validate a spec file; raises ConfigError on any problem."""
    try:
        with open(path, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from None
    return parse_spec(raw)


def apply_overrides(spec: ExperimentSpec, *, seed: int | None = None,
                    limit_mode: str | None = None,
                    out_path: str | None = None,
                    out_format: str | None = None) -> ExperimentSpec:
    """Return a copy of the spec with CLI-level overrides applied."""
    changes = {}
    if seed is not None:
        if seed < 0:
            raise ConfigError("seed must be nonnegative")
        changes["seed"] = seed
    if limit_mode is not None:
        if limit_mode not in LIMIT_MODES:
            raise ConfigError(f"limit_mode must be one of {LIMIT_MODES}")
        changes["limit_mode"] = limit_mode
    if out_path is not None:
        changes["out_path"] = out_path
    if out_format is not None:
        if out_format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        changes["out_format"] = out_format
    if not changes:
        return spec
    echo = dict(spec.echo)
    if "seed" in changes:
        echo["seed"] = changes["seed"]
    if "limit_mode" in changes:
        echo["limit_mode"] = changes["limit_mode"]
    return dataclasses.replace(spec, echo=echo, **changes)
