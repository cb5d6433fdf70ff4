"""Decibel conversions shared by the sampling and reporting layers.

All core math (channel draws, moments, SINR) works in linear units; any
dB value crosses through these two helpers exactly once.
"""

from __future__ import annotations

import numpy as np


def db_to_lin(x_db):
    """Convert a power quantity from dB to linear scale."""
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def lin_to_db(x_lin):
    """Convert a positive power quantity from linear scale to dB."""
    x = np.asarray(x_lin, dtype=float)
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)
