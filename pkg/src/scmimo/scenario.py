"""Propagation scenario sampling for a circular urban-microcell deployment.

Terminals are dropped uniformly over the cell area, each link draws a
LoS/NLoS state, log-normal shadowing, a Ricean K-factor (log-normal in dB
under LoS, zero under NLoS), a LoS azimuth, and a set of diffuse
directions of arrival. The reference attenuation constant that anchors
absolute SNR is found by bisection against a pooled SINR percentile.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .units import db_to_lin, lin_to_db

BAND_MICROWAVE = "microwave"
BAND_MMWAVE = "mmwave"


class CalibrationError(RuntimeError):
    """Raised when the attenuation-constant bisection cannot bracket or meet tolerance."""


@dataclass(frozen=True)
class PropagationProfile:
    """Large-scale propagation parameters for one carrier band.

    Attenuation exponents and shadowing spreads are per link state; the
    K-factor statistics describe 10*log10(K) for LoS links. ``los_decay_m``
    is the e-folding distance of the mmWave LoS probability and is ignored
    for the microwave band.
    """

    name: str
    band: str                      # "microwave" or "mmwave"
    carrier_ghz: float
    alpha_los: float               # path-loss exponent, LoS
    alpha_nlos: float              # path-loss exponent, NLoS
    shadow_std_los_db: float
    shadow_std_nlos_db: float
    k_mean_db: float               # mean of 10*log10(K) under LoS
    k_std_db: float
    los_decay_m: float = 67.1      # mmWave only
    outage_prob: float = 0.0       # mmWave only

    def __post_init__(self):
        if self.band not in (BAND_MICROWAVE, BAND_MMWAVE):
            raise ValueError(f"unknown band {self.band!r}")
        if self.band == BAND_MMWAVE and self.los_decay_m <= 0:
            raise ValueError("los_decay_m must be positive for the mmWave band")
        if not 0.0 <= self.outage_prob <= 1.0:
            raise ValueError("outage_prob must lie in [0, 1]")


#: Built-in urban-microcell profiles. Values follow the widely used UMi
#: street-canyon parameterisation at 2 GHz and 28 GHz.
PROFILES = {
    "umi-microwave-2ghz": PropagationProfile(
        name="umi-microwave-2ghz",
        band=BAND_MICROWAVE,
        carrier_ghz=2.0,
        alpha_los=2.2,
        alpha_nlos=3.67,
        shadow_std_los_db=3.0,
        shadow_std_nlos_db=4.0,
        k_mean_db=9.0,
        k_std_db=5.0,
    ),
    "umi-mmwave-28ghz": PropagationProfile(
        name="umi-mmwave-28ghz",
        band=BAND_MMWAVE,
        carrier_ghz=28.0,
        alpha_los=2.0,
        alpha_nlos=2.92,
        shadow_std_los_db=5.8,
        shadow_std_nlos_db=8.7,
        k_mean_db=12.0,
        k_std_db=3.0,
        los_decay_m=67.1,
        outage_prob=0.0,
    ),
}


@dataclass(frozen=True)
class CellConfig:
    """Cell geometry and per-drop population parameters.

    ``atten_const`` is the reference link gain at the exclusion radius; it
    sets the absolute SNR scale and is normally fixed by
    :func:`calibrate_atten_const`. ``noise_power`` stays at 1 so the SNR
    argument of the estimators is the transmit SNR; it is overridable only
    to exercise degenerate cases in tests.
    """

    num_terminals: int
    num_paths: int
    radius_m: float = 100.0
    exclusion_radius_m: float = 10.0
    atten_const: float = 1.0
    angular_support: tuple[float, float] = (-np.pi / 16, np.pi / 16)
    noise_power: float = 1.0

    def __post_init__(self):
        if self.num_terminals < 1 or self.num_paths < 1:
            raise ValueError("num_terminals and num_paths must be positive")
        if not 0 < self.exclusion_radius_m < self.radius_m:
            raise ValueError("need 0 < exclusion_radius_m < radius_m")
        lo, hi = self.angular_support
        if not (-np.pi / 2 <= lo < hi <= np.pi / 2):
            raise ValueError("angular_support must be an interval inside [-pi/2, pi/2]")
        if self.atten_const <= 0:
            raise ValueError("atten_const must be positive")
        if self.noise_power < 0:
            raise ValueError("noise_power must be nonnegative")


@dataclass(frozen=True)
class TerminalLink:
    """One terminal's large-scale state as seen by the array."""

    distance_m: float
    is_los: bool
    shadow_db: float
    k_factor: float                # linear Ricean K; 0 under NLoS
    gain: float                    # linear link gain, shadowing included
    los_angle_rad: float           # specular azimuth, folded into [-pi/2, pi/2]
    diffuse_angles_rad: np.ndarray  # shape (num_paths,)

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("distance_m must be positive")
        if self.gain <= 0:
            raise ValueError("gain must be positive")
        if self.k_factor < 0:
            raise ValueError("k_factor must be nonnegative")
        if not self.is_los and self.k_factor != 0:
            raise ValueError("NLoS links carry k_factor = 0")
        angles = np.asarray(self.diffuse_angles_rad, dtype=float)
        angles.setflags(write=False)
        object.__setattr__(self, "diffuse_angles_rad", angles)


def los_probability(distance_m: float, profile: PropagationProfile) -> float:
    """Probability that a link at the given distance is line-of-sight.

    Parameters
    ----------
    distance_m : float
        Terminal distance from the array in meters, > 0.
    profile : PropagationProfile
        Band parameters; the microwave and mmWave bands use different
        urban-microcell LoS models.

    Returns
    -------
    float
        LoS probability in [0, 1], non-increasing in distance.
    """
    r = float(distance_m)
    if r <= 0:
        raise ValueError("distance_m must be positive")
    if profile.band == BAND_MICROWAVE:
        decay = np.exp(-r / 36.0)
        p = min(18.0 / r, 1.0) * (1.0 - decay) + decay
    else:
        p = (1.0 - profile.outage_prob) * np.exp(-r / profile.los_decay_m)
    return float(min(max(p, 0.0), 1.0))


def link_gain(distance_m: float, is_los: bool, shadow_db: float,
              profile: PropagationProfile, cell: CellConfig) -> float:
    """Linear link gain: reference constant, shadowing, and distance power law."""
    if distance_m <= 0:
        raise ValueError("distance_m must be positive")
    alpha = profile.alpha_los if is_los else profile.alpha_nlos
    ratio = cell.exclusion_radius_m / distance_m
    return cell.atten_const * float(db_to_lin(shadow_db)) * ratio ** alpha


def sample_terminal(rng: np.random.Generator, cell: CellConfig,
                    profile: PropagationProfile) -> TerminalLink:
    """Draw one terminal's position and large-scale link state.

    The position is uniform over the annulus between the exclusion radius
    and the cell edge (radius CDF proportional to r^2). The LoS azimuth is
    the geometric one folded into the front half-plane, which preserves
    the array response. Diffuse directions are i.i.d. uniform over the
    cell's angular support.

    Parameters
    ----------
    rng : numpy.random.Generator
        Source of randomness; draw order is fixed, so equal seeds give
        equal links.
    cell, profile
        Deployment geometry and band parameters.

    Returns
    -------
    TerminalLink
    """
    r0, r1 = cell.exclusion_radius_m, cell.radius_m
    # Area-uniform radius on the annulus [r0, r1].
    u = rng.uniform()
    r = float(np.sqrt(r0 * r0 + u * (r1 * r1 - r0 * r0)))
    azimuth = rng.uniform(-np.pi, np.pi)
    is_los = bool(rng.uniform() < los_probability(r, profile))
    sigma = profile.shadow_std_los_db if is_los else profile.shadow_std_nlos_db
    shadow_db = float(rng.normal(0.0, sigma))
    if is_los:
        k_factor = float(db_to_lin(rng.normal(profile.k_mean_db, profile.k_std_db)))
    else:
        k_factor = 0.0
    lo, hi = cell.angular_support
    diffuse = rng.uniform(lo, hi, size=cell.num_paths)
    return TerminalLink(
        distance_m=r,
        is_los=is_los,
        shadow_db=shadow_db,
        k_factor=k_factor,
        gain=link_gain(r, is_los, shadow_db, profile, cell),
        # arcsin(sin(.)) folds the azimuth about the array axis; sin, and
        # hence the steering vector, is unchanged.
        los_angle_rad=float(np.arcsin(np.sin(azimuth))),
        diffuse_angles_rad=diffuse,
    )


def sample_drop(rng: np.random.Generator, cell: CellConfig,
                profile: PropagationProfile) -> list[TerminalLink]:
    """Draw a full drop of ``cell.num_terminals`` independent links."""
    return [sample_terminal(rng, cell, profile) for _ in range(cell.num_terminals)]


def gains_of(links: list[TerminalLink]) -> np.ndarray:
    """Stack the linear link gains of a drop into one array."""
    return np.array([link.gain for link in links])


def calibrate_atten_const(geom, cell: CellConfig, profile: PropagationProfile,
                          rng: np.random.Generator, *,
                          n_drops: int = 200, n_fading: int = 100,
                          snr: float = 1.0, percentile: float = 5.0,
                          target_db: float = 0.0, tol_db: float = 0.1,
                          max_iter: int = 40,
                          bracket: tuple[float, float] = (1e-6, 1e6)) -> float:
    """Bisect the reference attenuation constant to hit an SINR percentile.

    Pools the instantaneous per-terminal SINR over ``n_drops`` scenario
    draws and ``n_fading`` fading draws each, then finds the constant at
    which the pooled ``percentile`` equals ``target_db``. The SINR of every
    pooled sample is a fixed increasing function of the constant, so each
    sample is reduced to three scalars once and the bisection re-evaluates
    only the percentile.

    Parameters
    ----------
    geom : channel.ArrayGeometry
        Array used during calibration.
    cell, profile
        Deployment template; ``cell.atten_const`` is ignored.
    rng : numpy.random.Generator
        Stream for scenario and fading draws.
    snr : float
        Linear transmit SNR the target refers to (default 0 dB).

    Returns
    -------
    float
        Calibrated attenuation constant.

    Raises
    ------
    CalibrationError
        If the bracket does not straddle the target (e.g. with zero noise
        power the SINR no longer depends on the constant) or the tolerance
        is not met within ``max_iter`` bisections.
    """
    # Local import: channel and mrc build on the types above.
    from .channel import draw_channel_block
    from .mrc import sinr_decomposition

    unit_cell = dataclasses.replace(cell, atten_const=1.0)
    sig_parts, noise_parts, interf_parts = [], [], []
    for _ in range(n_drops):
        links = sample_drop(rng, unit_cell, profile)
        gains = gains_of(links)
        block = draw_channel_block(geom, links, rng, n_fading)
        sig, noise, interf = sinr_decomposition(block, gains,
                                                noise_power=cell.noise_power)
        sig_parts.append(sig.ravel())
        noise_parts.append(noise.ravel())
        interf_parts.append(interf.ravel())
    sig = np.concatenate(sig_parts)
    noise = np.concatenate(noise_parts)
    interf = np.concatenate(interf_parts)

    def percentile_db(const: float) -> float:
        # The constant scales every gain, so it rides along with the SNR.
        scale = const * snr
        sinr = scale * sig / (noise + scale * interf)
        return float(lin_to_db(np.percentile(sinr, percentile)))

    lo, hi = bracket
    p_lo, p_hi = percentile_db(lo), percentile_db(hi)
    if not p_lo <= target_db <= p_hi:
        raise CalibrationError(
            f"target {target_db:g} dB not bracketed: percentile spans "
            f"[{p_lo:.3g}, {p_hi:.3g}] dB over const in [{lo:g}, {hi:g}]")
    for _ in range(max_iter):
        mid = float(np.sqrt(lo * hi))  # bisect in log scale
        p_mid = percentile_db(mid)
        if abs(p_mid - target_db) <= tol_db:
            return mid
        if p_mid < target_db:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"no convergence to {tol_db:g} dB within {max_iter} bisections")
