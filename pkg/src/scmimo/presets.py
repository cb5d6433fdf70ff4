"""Built-in experiment presets.

The ``full-*`` presets mirror the reference large-system setups (256
antennas, 32 terminals, 50 diffuse paths, an 8-wavelength aperture); the
``desk-*`` presets shrink the system so a run finishes in seconds. Each
preset is a plain JSON-able dict accepted by :func:`scmimo.config.parse_spec`.
"""

from __future__ import annotations

import copy
import math

_PI = math.pi
_WIDE = [-_PI / 2, _PI / 2]
_NARROW = [-_PI / 16, _PI / 16]

PRESETS: dict[str, dict] = {
    "full-snr-sweep": {
        "kind": "snr_sweep",
        "name": "full-snr-sweep",
        "seed": 1,
        "system": {"num_antennas": 256, "num_terminals": 32, "num_paths": 50,
                   "aperture_wl": 8.0, "angular_support": _NARROW},
        "snr_db": [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
        "n_fading": 10_000,
        "variants": [
            {"label": "microwave-wide", "profile": "umi-microwave-2ghz",
             "angular_support": _WIDE},
            {"label": "microwave-narrow", "profile": "umi-microwave-2ghz"},
            {"label": "mmwave-narrow", "profile": "umi-mmwave-28ghz"},
            {"label": "rayleigh-narrow", "k_mode": "zero"},
            {"label": "fixed-k5db-narrow", "k_mode": {"fixed_db": 5.0}},
        ],
        "notes": "Expected per-terminal SINR vs transmit SNR; calibrate "
                 "cell.atten_const first for absolute levels.",
    },
    "full-sum-se-cdf": {
        "kind": "sum_se_cdf",
        "name": "full-sum-se-cdf",
        "seed": 2,
        "system": {"num_antennas": 256, "num_terminals": 32, "num_paths": 50,
                   "aperture_wl": 8.0, "angular_support": _NARROW},
        "snr_db": [10.0],
        "n_drops": 200,
        "n_fading": 10_000,
        "variants": [
            {"label": "ricean-unequal", "correlation": "unequal"},
            {"label": "ricean-equal", "correlation": "equal"},
            {"label": "rayleigh-unequal", "k_mode": "zero"},
            {"label": "rayleigh-equal", "k_mode": "zero",
             "correlation": "equal"},
        ],
        "notes": "Ergodic sum spectral efficiency CDF over scenario drops.",
    },
    "full-antenna-sweep": {
        "kind": "antenna_sweep",
        "name": "full-antenna-sweep",
        "seed": 3,
        "system": {"num_antennas": [32, 64, 128, 256, 384, 512, 768, 1024],
                   "num_terminals": 32, "num_paths": 50,
                   "angular_support": _NARROW},
        "snr_db": [10.0],
        "limit_mode": "plain",
        "variants": [
            {"label": "aperture-8wl", "aperture_wl": 8.0},
            {"label": "aperture-4wl", "aperture_wl": 4.0},
        ],
        "notes": "Convergence of the expected SINR to its large-array limit.",
    },
    "full-calibration": {
        "kind": "calibrate",
        "name": "full-calibration",
        "seed": 4,
        "system": {"num_antennas": 256, "num_terminals": 32, "num_paths": 50,
                   "aperture_wl": 8.0, "angular_support": _NARROW},
        "snr_db": [0.0],
        "calibration": {"n_drops": 200, "n_fading": 100,
                        "target_db": -35.0},
        "notes": "Pins the pooled 5th-percentile SINR. Joint scaling of the "
                 "link gains saturates at the interference-limited ceiling "
                 "(about -28 dB at these dimensions), so the target must sit "
                 "below that ceiling to be bracketable.",
    },
    "desk-snr-sweep": {
        "kind": "snr_sweep",
        "name": "desk-snr-sweep",
        "seed": 11,
        "system": {"num_antennas": 64, "num_terminals": 8, "num_paths": 16,
                   "aperture_wl": 8.0, "angular_support": _WIDE},
        "snr_db": [0.0, 10.0, 20.0, 30.0, 40.0],
        "n_fading": 2_000,
    },
    "desk-sum-se-cdf": {
        "kind": "sum_se_cdf",
        "name": "desk-sum-se-cdf",
        "seed": 12,
        "system": {"num_antennas": 64, "num_terminals": 8, "num_paths": 16,
                   "aperture_wl": 8.0, "angular_support": _NARROW},
        "snr_db": [10.0],
        "n_drops": 50,
        "n_fading": 500,
        "variants": [
            {"label": "unequal"},
            {"label": "equal", "correlation": "equal"},
        ],
    },
    "desk-antenna-sweep": {
        "kind": "antenna_sweep",
        "name": "desk-antenna-sweep",
        "seed": 13,
        "system": {"num_antennas": [64, 256, 1024, 4096], "num_terminals": 8,
                   "num_paths": 16, "aperture_wl": 8.0,
                   "angular_support": _NARROW},
        "snr_db": [10.0],
        "k_mode": "zero",
        "limit_mode": "both",
    },
    "desk-calibration": {
        "kind": "calibrate",
        "name": "desk-calibration",
        "seed": 14,
        "system": {"num_antennas": 64, "num_terminals": 8, "num_paths": 16,
                   "aperture_wl": 8.0, "angular_support": _NARROW},
        "snr_db": [0.0],
        "calibration": {"n_drops": 100, "n_fading": 100,
                        "target_db": -30.0},
        "notes": "Ceiling at these dimensions is about -23 dB; see the "
                 "full-calibration notes.",
    },
}


def preset(name: str) -> dict:
    """Deep copy of one preset dict, safe to mutate."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; "
                       f"available: {', '.join(sorted(PRESETS))}")
    return copy.deepcopy(PRESETS[name])
