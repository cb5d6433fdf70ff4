"""Uplink analysis of space-constrained massive MIMO under Ricean fading.

The package splits into scenario sampling (:mod:`scmimo.scenario`),
channel draws (:mod:`scmimo.channel`), Monte-Carlo receiver statistics
(:mod:`scmimo.mrc`), moment-based closed forms (:mod:`scmimo.closedform`),
large-array limits (:mod:`scmimo.asymptotics`), and the experiment
harness (:mod:`scmimo.config`, :mod:`scmimo.harness`,
:mod:`scmimo.reporting`, :mod:`scmimo.figures`).
"""

from .asymptotics import (LimitTerms, full_limit_sinr, full_limit_sinr_all,
                          full_limit_sum_se, limit_terms, limiting_sinr,
                          limiting_sinr_all, limiting_sum_se, sinc_kernel)
from .channel import (ArrayGeometry, ChannelMatrix, draw_channel,
                      draw_channel_block, draw_channel_matrix, ricean_weights,
                      specular_vector, steering_matrix, steering_vector)
from .closedform import (ChannelMoments, approx_sum_se, channel_moments,
                         cross_moment, expected_sinr, expected_sinr_all,
                         norm2_moment, norm4_moment, rayleigh_shared_sinr,
                         rayleigh_sinr, ricean_shared_sinr)
from .config import ConfigError, ExperimentSpec, load_spec, parse_spec
from .harness import run_experiment
from .mrc import (McCurve, SinrReport, all_terminal_sinr, instantaneous_sinr,
                  mc_ergodic_sum_se, mc_expected_sinr, mc_snr_curve,
                  sinr_decomposition, sum_spectral_efficiency)
from .presets import PRESETS, preset
from .reporting import ResultRow, emit_results, load_results
from .scenario import (PROFILES, CalibrationError, CellConfig,
                       PropagationProfile, TerminalLink,
                       calibrate_atten_const, link_gain, los_probability,
                       sample_drop, sample_terminal)

__version__ = "0.1.0"
