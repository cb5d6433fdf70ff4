"""Closed-form approximations of the expected MRC SINR.

The expected SINR is approximated by the ratio of the means of the
numerator and denominator of the instantaneous SINR, which reduces to
three channel moments per drop: the mean squared norm and mean fourth
norm power of each terminal's channel, and the mean squared inner
product between pairs of channels. All moments are exact under the
finite-path Ricean model; only the final ratio is an approximation.

Specialized evaluators cover Rayleigh fading with per-terminal or shared
diffuse bases and Ricean fading with a shared diffuse basis. They repeat
the algebra of their printed forms independently so the general path can
be cross-checked against them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ArrayGeometry, ricean_weights, specular_vector, steering_matrix

_LN2 = float(np.log(2.0))


def _frob_sq(matrix: np.ndarray) -> float:
    """Squared Frobenius norm, returned as a plain float."""
    return float(np.sum(matrix.real ** 2 + matrix.imag ** 2))


def norm4_moment(basis: np.ndarray, specular: np.ndarray, k_factor: float) -> float:
    """Mean fourth power of the channel norm, E[||g||^4].

    ``basis`` is the (M, P) steering matrix of the diffuse paths and
    ``specular`` the (M,) specular response. Quadratic forms are evaluated
    as squared norms, so every term is nonnegative by construction.
    """
    num_antennas, num_paths = basis.shape
    diffuse, spec = ricean_weights(k_factor, num_paths)
    gram_sq = _frob_sq(basis.conj().T @ basis)      # tr[(A^H A)^2]
    spec_quad = _frob_sq(basis.conj().T @ specular)  # h^H A A^H h
    mm = float(num_antennas) ** 2
    return (diffuse ** 4 * (num_paths ** 2 * mm + gram_sq)
            + 2.0 * num_paths * mm * diffuse ** 2 * spec ** 2
            + 2.0 * diffuse ** 2 * spec ** 2 * spec_quad
            + spec ** 4 * mm)


def norm2_moment(k_factor: float, num_paths: int, num_antennas: int) -> float:
    """Mean squared channel norm, E[||g||^2]; equals the antenna count."""
    diffuse, spec = ricean_weights(k_factor, num_paths)
    return num_antennas * (num_paths * diffuse ** 2 + spec ** 2)


def cross_moment(basis_l: np.ndarray, basis_k: np.ndarray,
                 spec_l: np.ndarray, spec_k: np.ndarray,
                 k_l: float, k_k: float) -> float:
    """Mean squared channel inner product, E[|g_l^H g_k|^2], l != k."""
    d_l, s_l = ricean_weights(k_l, basis_l.shape[1])
    d_k, s_k = ricean_weights(k_k, basis_k.shape[1])
    return (d_l ** 2 * d_k ** 2 * _frob_sq(basis_k.conj().T @ basis_l)
            + d_l ** 2 * s_k ** 2 * _frob_sq(basis_l.conj().T @ spec_k)
            + s_l ** 2 * d_k ** 2 * _frob_sq(basis_k.conj().T @ spec_l)
            + s_l ** 2 * s_k ** 2 * abs(np.vdot(spec_l, spec_k)) ** 2)


@dataclass(frozen=True)
class ChannelMoments:
    """Second and fourth channel moments of one drop.

    ``cross`` holds E[|g_l^H g_k|^2] with a zero diagonal, so the
    interference sum of terminal ``l`` is ``cross[l] @ gains``.
    """

    norm4: np.ndarray              # (L,)   E[||g_l||^4]
    norm2: np.ndarray              # (L,)   E[||g_l||^2]
    cross: np.ndarray              # (L, L) E[|g_l^H g_k|^2], diag 0

    def __post_init__(self):
        num = self.norm4.shape[0]
        if self.norm2.shape != (num,) or self.cross.shape != (num, num):
            raise ValueError("inconsistent moment shapes")


def channel_moments(geom: ArrayGeometry, links) -> ChannelMoments:
    """Evaluate all closed-form channel moments for a drop.

    Shares the per-terminal steering matrices across the pairwise terms;
    cost is O(L^2 P^2 M) via P x P cross Gram matrices.
    """
    num = len(links)
    bases = [steering_matrix(geom, link.diffuse_angles_rad) for link in links]
    specs = [specular_vector(geom, link) for link in links]
    k_facs = [link.k_factor for link in links]

    norm4 = np.array([norm4_moment(bases[l], specs[l], k_facs[l])
                      for l in range(num)])
    norm2 = np.array([norm2_moment(k_facs[l], bases[l].shape[1],
                                   geom.num_antennas) for l in range(num)])
    cross = np.zeros((num, num))
    for l in range(num):
        for k in range(num):
            if k != l:
                cross[l, k] = cross_moment(bases[l], bases[k], specs[l],
                                           specs[k], k_facs[l], k_facs[k])
    return ChannelMoments(norm4=norm4, norm2=norm2, cross=cross)


def expected_sinr_all(moments: ChannelMoments, gains, snr: float) -> np.ndarray:
    """Closed-form expected SINR of every terminal (linear)."""
    gains = np.asarray(gains, dtype=float)
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    num = snr * gains * moments.norm4
    den = moments.norm2 + snr * (moments.cross @ gains)
    return num / den


def expected_sinr(moments: ChannelMoments, gains, snr: float, terminal: int) -> float:
    """Closed-form expected SINR of one terminal (linear)."""
    return float(expected_sinr_all(moments, gains, snr)[terminal])


def approx_sum_se(moments: ChannelMoments, gains, snr: float) -> float:
    """Ergodic sum spectral efficiency built from the closed-form SINRs."""
    sinr = expected_sinr_all(moments, gains, snr)
    return float(np.sum(np.log1p(sinr)) / _LN2)


def rayleigh_sinr(bases, gains, snr: float, terminal: int) -> float:
    """Expected SINR without specular parts, one diffuse basis per terminal.

    Independent restatement of the general form at zero K-factor; kept as
    a separate code path so the two can be compared numerically.
    """
    gains = np.asarray(gains, dtype=float)
    basis_l = bases[terminal]
    num_antennas, num_paths = basis_l.shape
    quad = _frob_sq(basis_l.conj().T @ basis_l)
    num = (snr * gains[terminal] / num_paths ** 2
           * (num_paths ** 2 * num_antennas ** 2 + quad))
    interf = 0.0
    for k, basis_k in enumerate(bases):
        if k == terminal:
            continue
        interf += (gains[k] / (num_paths * basis_k.shape[1])
                   * _frob_sq(basis_k.conj().T @ basis_l))
    return float(num / (num_antennas + snr * interf))


def rayleigh_shared_sinr(basis, gains, snr: float, terminal: int) -> float:
    """Expected SINR without specular parts, one diffuse basis shared by all."""
    gains = np.asarray(gains, dtype=float)
    num_antennas, num_paths = basis.shape
    quad = _frob_sq(basis.conj().T @ basis)
    num = (snr * gains[terminal] / num_paths ** 2
           * (num_paths ** 2 * num_antennas ** 2 + quad))
    others = float(np.sum(gains)) - float(gains[terminal])
    den = num_antennas + snr * others * quad / num_paths ** 2
    return float(num / den)


def ricean_shared_sinr(basis, speculars, k_factors, gains, snr: float,
                       terminal: int) -> float:
    """Expected SINR with a shared diffuse basis and per-terminal specular parts.

    The pairwise interference keeps the shared-basis traces and treats
    the specular-specular coupling at its maximum (aligned) value.
    """
    gains = np.asarray(gains, dtype=float)
    num_antennas, num_paths = basis.shape
    quad = _frob_sq(basis.conj().T @ basis)
    d_l, s_l = ricean_weights(k_factors[terminal], num_paths)
    num = snr * gains[terminal] * norm4_moment(basis, speculars[terminal],
                                               k_factors[terminal])
    own_quad = _frob_sq(basis.conj().T @ speculars[terminal])
    interf = 0.0
    for k in range(len(gains)):
        if k == terminal:
            continue
        d_k, s_k = ricean_weights(k_factors[k], num_paths)
        interf += gains[k] * (
            d_l ** 2 * d_k ** 2 * quad
            + d_l ** 2 * s_k ** 2 * _frob_sq(basis.conj().T @ speculars[k])
            + s_l ** 2 * d_k ** 2 * own_quad
            + s_l ** 2 * s_k ** 2 * num_antennas ** 2)
    den = norm2_moment(k_factors[terminal], num_paths, num_antennas) + snr * interf
    return float(num / den)
