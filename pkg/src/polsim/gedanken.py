"""Two-source thought-experiment model of erasable and inerasable marking.

A photon reaches the detector from one of two sources.  A which-source
marker of quality m (0 = no marking, 1 = perfect marking) tags first-source
emissions; a polarizer angle theta and an erasure angle gamma control how
much of the remaining path information interferes.  The detection
probability splits into a flagged (incoherent) part and a coherent part:

    p = |a1|^2 (1 - m^2) + |a1*m + a2|^2

with path amplitudes a1 = exp(i*phi1) cos(theta - gamma)/2 and
a2 = exp(i*phi2) cos(theta)/2.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError

_COS_TOL = 1e-12


@dataclass(frozen=True)
class GedankenConfig:
    """Parameters of one thought-experiment configuration.

    gamma: erasure rotation angle (rad), cos(gamma) >= 0 required
    m: marker quality in [0, 1]
    phi1, phi2: path phases (rad)
    theta: analyzer angle (rad)
    """

    gamma: float
    m: float
    phi1: float = 0.0
    phi2: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.m <= 1.0:
            raise ParameterError(f"marker quality m = {self.m} outside [0, 1]")
        if math.cos(self.gamma) < -_COS_TOL:
            raise ParameterError(
                f"gamma = {self.gamma} rad has cos < 0; not a valid erasure angle"
            )


def _amplitudes(cfg: GedankenConfig) -> tuple[complex, complex]:
    a1 = cmath.exp(1j * cfg.phi1) * math.cos(cfg.theta - cfg.gamma) / 2.0
    a2 = cmath.exp(1j * cfg.phi2) * math.cos(cfg.theta) / 2.0
    return a1, a2


def detection_probability(cfg: GedankenConfig) -> float:
    """Closed-form detection probability of the three-branch bookkeeping."""
    a1, a2 = _amplitudes(cfg)
    return abs(a1) ** 2 * (1.0 - cfg.m**2) + abs(a1 * cfg.m + a2) ** 2


def extremal_probabilities(gamma: float, m: float) -> tuple[float, float]:
    """(max, min) of the detection probability over the analyzer angle.

    With equal path phases the extrema sit at theta = gamma/2 and
    gamma/2 + pi/2:

        p_max = (1 + m) cos^2(gamma/2) / 2
        p_min = (1 - m) sin^2(gamma/2) / 2
    """
    GedankenConfig(gamma=gamma, m=m)
    half = gamma / 2.0
    return (
        (1.0 + m) * math.cos(half) ** 2 / 2.0,
        (1.0 - m) * math.sin(half) ** 2 / 2.0,
    )


def degree_of_polarization_gedanken(gamma: float, m: float) -> float:
    """Visibility (p_max - p_min)/(p_max + p_min) = (m + cos g)/(1 + m cos g)."""
    GedankenConfig(gamma=gamma, m=m)
    c = math.cos(gamma)
    return (m + c) / (1.0 + m * c)


def monte_carlo_detection(
    cfg: GedankenConfig, samples: int, seed
) -> tuple[float, float]:
    """Sample the detection probability; returns (estimate, std_error).

    Each sample emits from source 1 or 2 with probability 1/2.  A source-1
    photon is reported by the marker with probability 1 - m^2; reported
    samples are distinguishable and detect with the conditional probability
    2|a1|^2, all other samples form the coherent class and detect with
    2|a1*m + a2|^2 / (1 + m^2).  Weighting by the branch probabilities
    (1 - m^2)/2 and (1 + m^2)/2 reproduces the closed form, so the sampler
    checks the probability bookkeeping independently of it.

    Deterministic given (seed, samples); both kernel backends consume the
    same uniform stream and agree exactly.
    """
    if samples < 1:
        raise ParameterError("samples must be >= 1")
    a1, a2 = _amplitudes(cfg)
    one_minus_m2 = 1.0 - cfg.m**2
    p_flagged = 2.0 * abs(a1) ** 2
    p_coherent = 2.0 * abs(a1 * cfg.m + a2) ** 2 / (1.0 + cfg.m**2)
    rng = np.random.default_rng(seed)
    u = rng.random((3, samples))
    hits = kernels.mc_detection_count(
        u[0], u[1], u[2], one_minus_m2, p_flagged, p_coherent
    )
    p_hat = hits / samples
    return p_hat, math.sqrt(p_hat * (1.0 - p_hat) / samples)
