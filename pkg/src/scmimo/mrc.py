"""Per-terminal SINR and sum spectral efficiency under maximum-ratio combining.

Monte-Carlo estimation is chunked: realizations are split into fixed-size
chunks, each chunk draws from its own spawned RNG stream and reduces to
partial sums, and partials are combined in chunk order. Results are
therefore bit-identical for any worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ArrayGeometry, draw_channel_block
from .scenario import gains_of

MONTE_CARLO = "monte_carlo"
CLOSED_FORM = "closed_form"
CLOSED_FORM_RAYLEIGH = "closed_form_rayleigh"
CLOSED_FORM_RAYLEIGH_SHARED = "closed_form_rayleigh_shared"
CLOSED_FORM_RICEAN_SHARED = "closed_form_ricean_shared"
LIMIT = "large_m_limit"
LIMIT_FULL = "large_m_limit_full"

#: Per-chunk element budget for batched draws; keeps worker memory flat.
_CHUNK_ELEMENTS = 1 << 20

_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class SinrReport:
    """One method's per-terminal expected SINR and sum spectral efficiency.

    Monte-Carlo reports carry standard errors of each mean and the
    realization count; closed-form reports carry neither.
    """

    method: str
    snr: float
    per_terminal_sinr: np.ndarray          # (num_terminals,), linear
    sum_se_bits: float                     # bits/s/Hz
    mc_std_err: np.ndarray | None = None   # (num_terminals,)
    avg_sinr_std_err: float | None = None
    sum_se_std_err: float | None = None
    n_realizations: int | None = None

    def __post_init__(self):
        is_mc = self.method == MONTE_CARLO
        have_mc = self.mc_std_err is not None and self.n_realizations is not None
        if is_mc != have_mc:
            raise ValueError("Monte-Carlo fields present iff method is monte_carlo")

    @property
    def avg_sinr(self) -> float:
        """Terminal-average expected SINR (linear)."""
        return float(np.mean(self.per_terminal_sinr))


def sinr_decomposition(block: np.ndarray, gains: np.ndarray,
                       noise_power: float = 1.0):
    """Split each realization's SINR into scale-invariant parts.

    For a ``(n, M, L)`` block of channel draws, returns ``(sig, noise,
    interf)`` of shape ``(n, L)`` such that the instantaneous SINR of
    terminal ``l`` at linear SNR ``rho`` is
    ``rho * sig / (noise + rho * interf)``. Scaling every gain by a common
    constant scales ``sig`` and ``interf`` by that constant, which is what
    the attenuation calibration exploits.
    """
    gains = np.asarray(gains, dtype=float)
    gram = block.conj().transpose(0, 2, 1) @ block          # (n, L, L)
    power = np.einsum("nll->nl", gram).real                 # squared norms
    abs_sq = gram.real ** 2 + gram.imag ** 2
    cross = abs_sq @ gains - gains * power ** 2             # sum over k != l
    sig = gains * power ** 2
    noise = noise_power * power
    return sig, noise, np.maximum(cross, 0.0)


def _sinr_from_parts(sig, noise, interf, snr):
    den = noise + snr * interf
    with np.errstate(invalid="ignore", divide="ignore"):
        out = snr * sig / den
    # A zero channel contributes zero SINR rather than 0/0.
    return np.where(den > 0, out, 0.0)


def instantaneous_sinr(channel_matrix, gains, snr: float, terminal: int,
                       noise_power: float = 1.0) -> float:
    """Instantaneous MRC SINR of one terminal for one realization.

    ``channel_matrix`` is an ``(M, L)`` array (or ChannelMatrix); ``snr``
    is the linear transmit SNR shared by all terminals.
    """
    matrix = np.asarray(channel_matrix)
    gains = np.asarray(gains, dtype=float)
    if snr < 0:
        raise ValueError("snr must be nonnegative")
    if not 0 <= terminal < matrix.shape[1]:
        raise ValueError("terminal index out of range")
    if gains.shape != (matrix.shape[1],):
        raise ValueError("one gain per terminal required")
    row = matrix[:, terminal].conj() @ matrix               # (L,)
    power = row[terminal].real
    if power <= 0.0:
        return 0.0
    abs_sq = row.real ** 2 + row.imag ** 2
    interf = float(abs_sq @ gains - gains[terminal] * power ** 2)
    return float(snr * gains[terminal] * power ** 2
                 / (noise_power * power + snr * max(interf, 0.0)))


def all_terminal_sinr(channel_matrix, gains, snr: float,
                      noise_power: float = 1.0) -> np.ndarray:
    """Instantaneous SINR of every terminal for one realization."""
    matrix = np.asarray(channel_matrix)
    sig, noise, interf = sinr_decomposition(matrix[None], gains, noise_power)
    return _sinr_from_parts(sig, noise, interf, snr)[0]


def sum_spectral_efficiency(channel_matrix, gains, snr: float,
                            noise_power: float = 1.0) -> float:
    """Instantaneous sum spectral efficiency in bits/s/Hz."""
    sinr = all_terminal_sinr(channel_matrix, gains, snr, noise_power)
    return float(np.sum(np.log1p(sinr)) / _LN2)


@dataclass(frozen=True)
class McCurve:
    """Monte-Carlo means and standard errors over a grid of SNR points."""

    snrs: np.ndarray               # (S,), linear
    mean_sinr: np.ndarray          # (S, L)
    sinr_std_err: np.ndarray       # (S, L)
    avg_std_err: np.ndarray        # (S,), std err of the terminal average
    mean_sum_se: np.ndarray        # (S,)
    sum_se_std_err: np.ndarray     # (S,)
    n_realizations: int

    def report(self, index: int) -> SinrReport:
        """Package one SNR point as a SinrReport."""
        return SinrReport(
            method=MONTE_CARLO,
            snr=float(self.snrs[index]),
            per_terminal_sinr=self.mean_sinr[index].copy(),
            sum_se_bits=float(self.mean_sum_se[index]),
            mc_std_err=self.sinr_std_err[index].copy(),
            avg_sinr_std_err=float(self.avg_std_err[index]),
            sum_se_std_err=float(self.sum_se_std_err[index]),
            n_realizations=self.n_realizations,
        )


def _chunk_lengths(n_real: int, num_antennas: int, num_terminals: int) -> list[int]:
    # Chunk size depends only on problem dimensions, never on worker count.
    size = max(1, _CHUNK_ELEMENTS // (num_antennas * num_terminals))
    full, rest = divmod(n_real, size)
    return [size] * full + ([rest] if rest else [])


def _chunk_stats(geom, links, gains, snrs, rng, length, noise_power):
    block = draw_channel_block(geom, links, rng, length)
    sig, noise, interf = sinr_decomposition(block, gains, noise_power)
    stats = np.zeros((len(snrs), 6, len(links) + 1))
    for i, snr in enumerate(snrs):
        sinr = _sinr_from_parts(sig, noise, interf, snr)    # (n, L)
        avg = sinr.mean(axis=1)
        se = np.sum(np.log1p(sinr), axis=1) / _LN2
        stats[i, 0, :-1] = sinr.sum(axis=0)
        stats[i, 1, :-1] = np.square(sinr).sum(axis=0)
        stats[i, 2, 0] = avg.sum()
        stats[i, 3, 0] = np.square(avg).sum()
        stats[i, 4, 0] = se.sum()
        stats[i, 5, 0] = np.square(se).sum()
    return stats


def _std_err(total, total_sq, count):
    mean = total / count
    if count < 2:
        return np.zeros_like(mean)
    var = np.maximum(total_sq - count * mean ** 2, 0.0) / (count - 1)
    return np.sqrt(var / count)


def mc_snr_curve(geom: ArrayGeometry, links, snrs, n_real: int,
                 rng: np.random.Generator, noise_power: float = 1.0,
                 threads: int = 1) -> McCurve:
    """Estimate expected SINR and ergodic sum SE at several SNR points.

    All SNR points share the same ``n_real`` fading draws, so curves over
    SNR are smooth functions of a single realization set. ``rng`` must be
    a seeded Generator; chunk streams are spawned from it up front, and
    ``threads`` only distributes chunks without touching the draws.
    """
    if n_real < 1:
        raise ValueError("n_real must be positive")
    snrs = np.atleast_1d(np.asarray(snrs, dtype=float))
    if np.any(snrs < 0):
        raise ValueError("snr must be nonnegative")
    gains = gains_of(links)
    lengths = _chunk_lengths(n_real, geom.num_antennas, len(links))
    streams = rng.spawn(len(lengths))

    def work(args):
        stream, length = args
        return _chunk_stats(geom, links, gains, snrs, stream, length, noise_power)

    jobs = list(zip(streams, lengths))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(work, jobs))
    else:
        partials = [work(job) for job in jobs]
    # Chunk-ordered reduction: identical bytes for any thread count.
    stats = np.sum(np.stack(partials), axis=0)

    num_l = len(links)
    mean_sinr = stats[:, 0, :num_l] / n_real
    return McCurve(
        snrs=snrs,
        mean_sinr=mean_sinr,
        sinr_std_err=_std_err(stats[:, 0, :num_l], stats[:, 1, :num_l], n_real),
        avg_std_err=_std_err(stats[:, 2, 0], stats[:, 3, 0], n_real),
        mean_sum_se=stats[:, 4, 0] / n_real,
        sum_se_std_err=_std_err(stats[:, 4, 0], stats[:, 5, 0], n_real),
        n_realizations=n_real,
    )


def mc_expected_sinr(geom: ArrayGeometry, links, snr: float, n_real: int,
                     rng: np.random.Generator, noise_power: float = 1.0,
                     threads: int = 1) -> SinrReport:
    """Monte-Carlo estimate of each terminal's expected SINR at one SNR."""
    curve = mc_snr_curve(geom, links, [snr], n_real, rng, noise_power, threads)
    return curve.report(0)


def mc_ergodic_sum_se(geom: ArrayGeometry, links, snr: float, n_real: int,
                      rng: np.random.Generator, noise_power: float = 1.0,
                      threads: int = 1) -> SinrReport:
    """Monte-Carlo estimate of the ergodic sum spectral efficiency.

    Same estimator pass as :func:`mc_expected_sinr`; the report's
    ``sum_se_bits`` is the mean over realizations of the instantaneous
    sum spectral efficiency.
    """
    return mc_expected_sinr(geom, links, snr, n_real, rng, noise_power, threads)
