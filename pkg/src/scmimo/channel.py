"""Space-constrained uniform linear array and correlated Ricean channel draws.

The array keeps a fixed physical aperture measured in carrier wavelengths,
so adding antennas shrinks the spacing instead of growing the array. Each
terminal's channel is a finite sum of equal-power diffuse plane waves plus
a specular component, weighted so the total channel power per antenna is
one regardless of the K-factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scenario import TerminalLink


@dataclass(frozen=True)
class ArrayGeometry:
    """Uniform linear array with a fixed aperture in wavelengths."""

    num_antennas: int
    aperture_wl: float = 8.0

    def __post_init__(self):
        if self.num_antennas < 2:
            raise ValueError("num_antennas must be at least 2")
        if self.aperture_wl <= 0:
            raise ValueError("aperture_wl must be positive")

    @property
    def spacing_wl(self) -> float:
        """Element spacing in wavelengths; shrinks as antennas are added."""
        return self.aperture_wl / (self.num_antennas - 1)


def steering_vector(geom: ArrayGeometry, angle_rad: float) -> np.ndarray:
    """Array response for a plane wave from the given azimuth.

    Parameters
    ----------
    geom : ArrayGeometry
    angle_rad : float
        Azimuth in radians, front half-plane [-pi/2, pi/2].

    Returns
    -------
    numpy.ndarray
        Complex vector of shape ``(num_antennas,)`` with unit-modulus
        entries, so its squared norm is exactly the antenna count.
    """
    # Per-element phase: m * increment. No cumulative products, so there
    # is no phase drift for large arrays.
    increment = 2.0 * np.pi * geom.spacing_wl * np.sin(angle_rad)
    return np.exp(1j * increment * np.arange(geom.num_antennas))


def steering_matrix(geom: ArrayGeometry, angles_rad: np.ndarray) -> np.ndarray:
    """Stack steering vectors for several azimuths as columns.

    Returns an ``(num_antennas, len(angles_rad))`` complex matrix.
    """
    angles = np.asarray(angles_rad, dtype=float)
    phase = np.outer(np.arange(geom.num_antennas),
                     2.0 * np.pi * geom.spacing_wl * np.sin(angles))
    return np.exp(1j * phase)


def specular_vector(geom: ArrayGeometry, link: TerminalLink) -> np.ndarray:
    """Array response of the link's specular (LoS) component."""
    return steering_vector(geom, link.los_angle_rad)


def ricean_weights(k_factor: float, num_paths: int) -> tuple[float, float]:
    """Scales of the diffuse and specular channel parts.

    With ``P`` diffuse paths the diffuse part is scaled by
    ``sqrt(1 / (P * (1 + K)))`` and the specular part by
    ``sqrt(K / (1 + K))``, which keeps the mean channel power per antenna
    at one for every K.
    """
    if k_factor < 0:
        raise ValueError("k_factor must be nonnegative")
    if num_paths < 1:
        raise ValueError("num_paths must be positive")
    diffuse = np.sqrt(1.0 / (num_paths * (1.0 + k_factor)))
    specular = np.sqrt(k_factor / (1.0 + k_factor))
    return float(diffuse), float(specular)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    # Unit total variance per entry: real and imaginary parts carry 1/2 each.
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) / np.sqrt(2.0)


def draw_channel(geom: ArrayGeometry, link: TerminalLink,
                 rng: np.random.Generator) -> np.ndarray:
    """Draw one small-scale channel realization for a single terminal.

    Returns an ``(num_antennas,)`` complex vector: scaled steering mixture
    of i.i.d. path coefficients plus the deterministic specular part.
    """
    num_paths = link.diffuse_angles_rad.size
    basis = steering_matrix(geom, link.diffuse_angles_rad)
    diffuse, specular = ricean_weights(link.k_factor, num_paths)
    coeff = _complex_normal(rng, num_paths)
    return diffuse * (basis @ coeff) + specular * specular_vector(geom, link)


@dataclass(frozen=True)
class ChannelMatrix:
    """Channels of one drop, one column per terminal, with link metadata."""

    matrix: np.ndarray             # (num_antennas, num_terminals) complex
    links: tuple[TerminalLink, ...]

    def __post_init__(self):
        if self.matrix.shape[1] != len(self.links):
            raise ValueError("one column per link required")

    def __array__(self, dtype=None, copy=None):
        if dtype is not None:
            return self.matrix.astype(dtype)
        return self.matrix


def draw_channel_matrix(geom: ArrayGeometry, links, rng: np.random.Generator) -> ChannelMatrix:
    """Draw one realization for every terminal of a drop.

    Columns are drawn terminal by terminal in list order, so with ``L = 1``
    the single column reproduces :func:`draw_channel` on the same stream.
    """
    cols = [draw_channel(geom, link, rng) for link in links]
    return ChannelMatrix(matrix=np.stack(cols, axis=1), links=tuple(links))


def draw_channel_block(geom: ArrayGeometry, links, rng: np.random.Generator,
                       count: int) -> np.ndarray:
    """Draw ``count`` i.i.d. channel matrices in one batched call.

    Returns a ``(count, num_antennas, num_terminals)`` array. The draw
    order is terminal-major (all realizations of terminal 0, then 1, ...),
    matching :func:`draw_channel_matrix` entry for entry at ``count = 1``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    block = np.empty((count, geom.num_antennas, len(links)), dtype=complex)
    for idx, link in enumerate(links):
        num_paths = link.diffuse_angles_rad.size
        basis = steering_matrix(geom, link.diffuse_angles_rad)
        diffuse, specular = ricean_weights(link.k_factor, num_paths)
        coeff = _complex_normal(rng, (count, num_paths))
        block[:, :, idx] = diffuse * (coeff @ basis.T) \
            + specular * specular_vector(geom, link)
    return block
