"""Shared constructors for link fixtures."""

import numpy as np
import pytest

from scmimo.scenario import TerminalLink


def make_link(diffuse_angles, los_angle=0.0, k_factor=0.0, gain=1.0,
              distance_m=50.0):
    """TerminalLink with only the small-scale fields left free."""
    return TerminalLink(
        distance_m=distance_m,
        is_los=k_factor > 0,
        shadow_db=0.0,
        k_factor=float(k_factor),
        gain=float(gain),
        los_angle_rad=float(los_angle),
        diffuse_angles_rad=np.asarray(diffuse_angles, dtype=float),
    )


def random_links(rng, num_terminals, num_paths, k_choices=(0.0,),
                 support=(-np.pi / 2, np.pi / 2)):
    """Independent links with uniform angles and K drawn from a fixed set."""
    lo, hi = support
    return [
        make_link(
            rng.uniform(lo, hi, num_paths),
            los_angle=rng.uniform(lo, hi),
            k_factor=rng.choice(k_choices),
            gain=rng.uniform(0.2, 2.0),
        )
        for _ in range(num_terminals)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
