"""Parameter sweeps over (gamma, |T|) producing a flat CSV table.

Every stochastic row derives its generator from (seed, gamma index, t index,
replicate), so a fixed seed reproduces the output byte for byte regardless
of grid shape or replicate count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigRangeError, ParameterError
from .gedanken import GedankenConfig, degree_of_polarization_gedanken, monte_carlo_detection
from .tomography import (
    DEFAULT_SETTINGS,
    DetectorModel,
    reconstruct_run,
    simulate_counts,
)
from .zwm import (
    CoherenceMatrix,
    ZwmConfig,
    analytic_p_general,
    build_state,
    coherence_matrix,
    config_with,
    numeric_degree_of_polarization,
    output_fields,
)

MODES = ("analytic", "numeric", "tomography", "gedanken", "montecarlo")
CSV_HEADER = "gamma_deg,t_abs,mode,p_value,p_stderr"
DEFAULT_MC_SAMPLES = 100_000


@dataclass(frozen=True)
class SweepSpec:
    """Grid description: sorted gamma values (deg), sorted t values, mode."""

    gammas_deg: tuple[float, ...]
    t_values: tuple[float, ...]
    mode: str
    replicates: int = 1
    seed: int = 0
    mc_samples: int = DEFAULT_MC_SAMPLES

    def __post_init__(self):
        if self.mode not in MODES:
            raise ParameterError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.gammas_deg or not self.t_values:
            raise ConfigRangeError("gamma and t lists must be non-empty")
        for g in self.gammas_deg:
            if math.cos(math.radians(g)) < -1e-12:
                raise ConfigRangeError(f"gamma = {g} deg violates cos(gamma) >= 0")
        for t in self.t_values:
            if not 0.0 <= t <= 1.0:
                raise ConfigRangeError(f"t = {t} outside [0, 1]")
        if self.replicates < 1:
            raise ConfigRangeError("replicates must be >= 1")
        if self.mc_samples < 1:
            raise ConfigRangeError("samples must be >= 1")
        object.__setattr__(self, "gammas_deg", tuple(sorted(self.gammas_deg)))
        object.__setattr__(self, "t_values", tuple(sorted(self.t_values)))


def _with_point(cfg: ZwmConfig, gamma_deg: float, t_abs: float) -> ZwmConfig:
    # keep the configured transmission phase, replace only the magnitude
    phase = complex(cfg.t) / abs(complex(cfg.t)) if cfg.t != 0 else 1.0
    return config_with(cfg, gamma=math.radians(gamma_deg), t=t_abs * phase)


def _mc_p_estimate(cfg: ZwmConfig, gamma_deg: float, m: float,
                   samples: int, seed_seq) -> tuple[float, float]:
    gamma = math.radians(gamma_deg)
    children = seed_seq.spawn(2)
    common = dict(m=m, phi1=cfg.phi_s1, phi2=cfg.phi_s2, gamma=gamma)
    p_max, se_max = monte_carlo_detection(
        GedankenConfig(theta=gamma / 2.0, **common), samples, children[0]
    )
    p_min, se_min = monte_carlo_detection(
        GedankenConfig(theta=gamma / 2.0 + math.pi / 2.0, **common), samples, children[1]
    )
    total = p_max + p_min
    if total == 0.0:
        return math.nan, math.nan
    p = (p_max - p_min) / total
    stderr = 2.0 * math.hypot(p_min * se_max, p_max * se_min) / total**2
    return p, stderr


def _tomography_p_estimate(cfg: ZwmConfig, detector: DetectorModel, seed_seq) -> float:
    g = coherence_matrix(build_state(cfg), output_fields(cfg),
                         cfg.imperfections.mu_overlap)
    # kappa is counts per unit intensity; normalize the arbitrary g^2 scale
    normalized = CoherenceMatrix(g.matrix / g.trace)
    raw = simulate_counts(normalized, DEFAULT_SETTINGS, detector, seed_seq)
    return reconstruct_run(DEFAULT_SETTINGS, raw, detector).p_estimate


def run_sweep(spec: SweepSpec, cfg: ZwmConfig, detector: DetectorModel) -> list[tuple]:
    """Rows of (gamma_deg, t_abs, mode, p_value, p_stderr), ordered by
    (gamma, t, replicate)."""
    rows = []
    stochastic = spec.mode in ("tomography", "montecarlo")
    replicates = spec.replicates if stochastic else 1
    for ig, gamma_deg in enumerate(spec.gammas_deg):
        for it, t_abs in enumerate(spec.t_values):
            for rep in range(replicates):
                if spec.mode == "analytic":
                    p, se = analytic_p_general(_with_point(cfg, gamma_deg, t_abs)), 0.0
                elif spec.mode == "numeric":
                    p, se = numeric_degree_of_polarization(
                        _with_point(cfg, gamma_deg, t_abs)), 0.0
                elif spec.mode == "gedanken":
                    p, se = degree_of_polarization_gedanken(
                        math.radians(gamma_deg), t_abs), 0.0
                else:
                    seed_seq = np.random.SeedSequence(
                        entropy=spec.seed, spawn_key=(ig, it, rep))
                    if spec.mode == "montecarlo":
                        p, se = _mc_p_estimate(cfg, gamma_deg, t_abs,
                                               spec.mc_samples, seed_seq)
                    else:
                        p = _tomography_p_estimate(
                            _with_point(cfg, gamma_deg, t_abs), detector, seed_seq)
                        se = 0.0
                rows.append((gamma_deg, t_abs, spec.mode, p, se))
    return rows


def format_rows(rows) -> str:
    lines = [CSV_HEADER]
    for gamma_deg, t_abs, mode, p, se in rows:
        lines.append(f"{gamma_deg:.10g},{t_abs:.10g},{mode},{p:.12g},{se:.12g}")
    return "\n".join(lines) + "\n"
