"""Large-array limits of the expected SINR under a fixed aperture.

As antennas are added into a fixed physical aperture, the normalized
response correlation of two azimuths approaches the magnitude of an
unnormalized sinc in the difference of their sines. Every channel moment
divided by the squared antenna count then converges to a finite kernel
sum, giving a limiting SINR that no amount of additional antennas can
beat. The transmit SNR cancels from the limit, which the implementation
makes structural: numerator and denominator are both built without it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ricean_weights

_LN2 = float(np.log(2.0))
_SERIES_CUTOFF = 1e-8


def _abs_sinc(x: np.ndarray) -> np.ndarray:
    # Quadratic series below the cutoff avoids the 0/0 at coincident angles.
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    return np.abs(np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe))


def sinc_kernel(phi1, phi2, aperture_wl: float):
    """Limiting normalized correlation of two steering directions.

    Equals ``|sinc(pi * aperture_wl * (sin(phi1) - sin(phi2)))|`` with the
    unnormalized sinc; 1 at coincident angles, bounded by [0, 1], and
    symmetric in its arguments. Accepts scalars or broadcastable arrays.
    """
    if aperture_wl <= 0:
        raise ValueError("aperture_wl must be positive")
    dsin = np.sin(np.asarray(phi1, dtype=float)) - np.sin(np.asarray(phi2, dtype=float))
    out = _abs_sinc(np.pi * aperture_wl * dsin)
    if np.isscalar(phi1) and np.isscalar(phi2):
        return float(out)
    return out


@dataclass(frozen=True)
class LimitTerms:
    """Kernel sums entering the limiting SINR of one drop.

    Self terms describe each terminal's signal power scaling; the four
    pairwise matrices split the residual interference by which side of
    each channel (diffuse or specular) couples. Diagonals of the pairwise
    matrices are zero. The Ricean weights are carried along so the
    all-terms signal variant can be formed without the original links.
    """

    diffuse_self: np.ndarray        # (L,)  diffuse x diffuse signal term
    mixed_self: np.ndarray          # (L,)  specular x diffuse signal term
    diffuse_diffuse: np.ndarray     # (L, L)
    diffuse_specular: np.ndarray    # (L, L) own diffuse vs other's specular
    specular_diffuse: np.ndarray    # (L, L) own specular vs other's diffuse
    specular_specular: np.ndarray   # (L, L)
    diffuse_scale: np.ndarray       # (L,)  per-terminal diffuse weight
    specular_scale: np.ndarray      # (L,)
    num_paths: int

    def interference(self) -> np.ndarray:
        """Total pairwise kernel matrix, zero diagonal."""
        return (self.diffuse_diffuse + self.diffuse_specular
                + self.specular_diffuse + self.specular_specular)


def limit_terms(links, aperture_wl: float) -> LimitTerms:
    """Evaluate all limiting kernel sums for a drop.

    Requires every link to carry the same number of diffuse paths.
    """
    num = len(links)
    paths = {link.diffuse_angles_rad.size for link in links}
    if len(paths) != 1:
        raise ValueError("all links must share one number of diffuse paths")
    num_paths = paths.pop()

    sines = np.stack([np.sin(link.diffuse_angles_rad) for link in links])
    spec_sines = np.array([np.sin(link.los_angle_rad) for link in links])
    weights = np.array([ricean_weights(link.k_factor, num_paths)
                        for link in links])
    w_diff, w_spec = weights[:, 0], weights[:, 1]

    scale = np.pi * aperture_wl
    # kernel_dd[l, k] = sum_{r,t} theta(path_{k,r}, path_{l,t})^2
    diff = sines[None, :, :, None] - sines[:, None, None, :]
    kernel_dd = np.sum(_abs_sinc(scale * diff) ** 2, axis=(2, 3))
    # kernel_ds[l, k] = sum_r theta(spec_k, path_{l,r})^2
    diff = spec_sines[None, :, None] - sines[:, None, :]
    kernel_ds = np.sum(_abs_sinc(scale * diff) ** 2, axis=2)
    kernel_ss = _abs_sinc(scale * (spec_sines[:, None] - spec_sines[None, :])) ** 2

    off = 1.0 - np.eye(num)
    return LimitTerms(
        diffuse_self=w_diff ** 4 * np.diagonal(kernel_dd),
        mixed_self=2.0 * w_diff ** 2 * w_spec ** 2 * np.diagonal(kernel_ds),
        diffuse_diffuse=off * np.outer(w_diff ** 2, w_diff ** 2) * kernel_dd,
        diffuse_specular=off * np.outer(w_diff ** 2, w_spec ** 2) * kernel_ds,
        specular_diffuse=off * np.outer(w_spec ** 2, w_diff ** 2) * kernel_ds.T,
        specular_specular=off * np.outer(w_spec ** 2, w_spec ** 2) * kernel_ss,
        diffuse_scale=w_diff,
        specular_scale=w_spec,
        num_paths=num_paths,
    )


def _check_limit_args(terms: LimitTerms, gains, snr: float) -> np.ndarray:
    gains = np.asarray(gains, dtype=float)
    if gains.shape != terms.diffuse_self.shape:
        raise ValueError("one gain per terminal required")
    if gains.size < 2:
        raise ValueError("the limit needs at least two terminals; "
                         "a lone terminal has no interference floor")
    if snr <= 0:
        raise ValueError("snr must be positive (it cancels from the limit)")
    return gains


def limiting_sinr_all(terms: LimitTerms, gains, snr: float = 1.0) -> np.ndarray:
    """Limiting expected SINR of every terminal (linear).

    The SNR cancels; the argument is validated and then unused, so equal
    inputs at different SNRs return bit-identical values.
    """
    gains = _check_limit_args(terms, gains, snr)
    num = gains * (terms.diffuse_self + terms.mixed_self)
    return num / (terms.interference() @ gains)


def limiting_sinr(terms: LimitTerms, gains, terminal: int, snr: float = 1.0) -> float:
    """Limiting expected SINR of one terminal (linear)."""
    return float(limiting_sinr_all(terms, gains, snr)[terminal])


def limiting_sum_se(terms: LimitTerms, gains, snr: float = 1.0) -> float:
    """Limiting ergodic sum spectral efficiency in bits/s/Hz."""
    sinr = limiting_sinr_all(terms, gains, snr)
    return float(np.sum(np.log1p(sinr)) / _LN2)


def full_limit_sinr_all(terms: LimitTerms, gains, snr: float = 1.0) -> np.ndarray:
    """Limiting SINR variant keeping every signal term of the fourth moment.

    The plain limit drops the signal terms that vanish relative to the
    kernel sums only as the diffuse bases decorrelate; this diagnostic
    variant keeps them, upper-bounding the plain limit. Same denominator,
    and the SNR cancels identically.
    """
    gains = _check_limit_args(terms, gains, snr)
    w_d, w_s = terms.diffuse_scale, terms.specular_scale
    paths = terms.num_paths
    num = gains * (w_d ** 4 * paths ** 2 + terms.diffuse_self
                   + 2.0 * paths * w_d ** 2 * w_s ** 2 + terms.mixed_self
                   + w_s ** 4)
    return num / (terms.interference() @ gains)


def full_limit_sinr(terms: LimitTerms, gains, terminal: int,
                    snr: float = 1.0) -> float:
    """All-terms limiting SINR of one terminal (linear)."""
    return float(full_limit_sinr_all(terms, gains, snr)[terminal])


def full_limit_sum_se(terms: LimitTerms, gains, snr: float = 1.0) -> float:
    """Sum spectral efficiency built from the all-terms limit."""
    sinr = full_limit_sinr_all(terms, gains, snr)
    return float(np.sum(np.log1p(sinr)) / _LN2)
