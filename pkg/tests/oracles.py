"""Brute-force reference computations for the test suite.

Everything here is written directly against the model definition in
plain numpy and shares no code with the package, so agreement between
the two implementations is evidence rather than tautology.
"""

import numpy as np


def steering(num_antennas, aperture_wl, angles_rad):
    """(M, P) array response with one unit-modulus column per azimuth."""
    spacing = aperture_wl / (num_antennas - 1)
    phase = 2.0 * np.pi * spacing * np.sin(np.atleast_1d(angles_rad))
    return np.exp(1j * np.outer(np.arange(num_antennas), phase))


def draw_channels(rng, num_antennas, aperture_wl, diffuse_angles,
                  los_angle, k_factor, count):
    """(count, M) Ricean draws: steering mixture plus deterministic part."""
    basis = steering(num_antennas, aperture_wl, diffuse_angles)
    specular = steering(num_antennas, aperture_wl, [los_angle])[:, 0]
    num_paths = len(diffuse_angles)
    w_diff = np.sqrt(1.0 / (num_paths * (1.0 + k_factor)))
    w_spec = np.sqrt(k_factor / (1.0 + k_factor))
    coeff = (rng.standard_normal((count, num_paths))
             + 1j * rng.standard_normal((count, num_paths))) / np.sqrt(2.0)
    return w_diff * coeff @ basis.T + w_spec * specular


def moment_estimates(rng, num_antennas, aperture_wl, link_l, link_k,
                     count, chunk=200_000):
    """Sample means of ||g_l||^2, ||g_l||^4 and |g_l^H g_k|^2.

    ``link_l`` and ``link_k`` are (diffuse_angles, los_angle, k_factor)
    triples. Returns {"norm2" | "norm4" | "cross": (mean, std_err)} with
    the running sums kept in float64 across chunks.
    """
    sums = np.zeros(3)
    sums_sq = np.zeros(3)
    done = 0
    while done < count:
        n = min(chunk, count - done)
        g_l = draw_channels(rng, num_antennas, aperture_wl, *link_l, n)
        g_k = draw_channels(rng, num_antennas, aperture_wl, *link_k, n)
        norm2 = np.sum(g_l.real ** 2 + g_l.imag ** 2, axis=1)
        cross = np.abs(np.sum(g_l.conj() * g_k, axis=1)) ** 2
        batch = np.stack([norm2, norm2 ** 2, cross])
        sums += batch.sum(axis=1)
        sums_sq += (batch ** 2).sum(axis=1)
        done += n
    mean = sums / count
    var = np.maximum(sums_sq / count - mean ** 2, 0.0)
    err = np.sqrt(var / count)
    return {"norm2": (mean[0], err[0]),
            "norm4": (mean[1], err[1]),
            "cross": (mean[2], err[2])}


def sinr_direct(matrix, gains, snr, noise_power=1.0):
    """Defining ratio of the combiner output SINR, one entry per terminal."""
    num_terminals = matrix.shape[1]
    out = np.empty(num_terminals)
    for l in range(num_terminals):
        col = matrix[:, l]
        power = np.vdot(col, col).real
        interf = sum(gains[k] * abs(np.vdot(col, matrix[:, k])) ** 2
                     for k in range(num_terminals) if k != l)
        out[l] = (snr * gains[l] * power ** 2
                  / (noise_power * power + snr * interf))
    return out
