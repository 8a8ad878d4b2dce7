"""Single-qubit polarization tomography with Poisson counting noise.

A quarter-wave plate followed by a linear polarizer projects the signal
beam; counts collected over a fixed integration window are background
corrected and a maximum-likelihood fit over the positive-semidefinite cone
recovers the coherence matrix.  The intensity scale is absorbed into G, so
only its shape (and hence P) is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import kernels
from .elements import polarizer_jones, waveplate_jones
from .errors import ConfigError, IllPosedError, ParameterError
from .zwm import CoherenceMatrix, degree_of_polarization

_MU_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class MeasurementSetting:
    """One analyzer configuration: QWP fast-axis and polarizer angles (rad)."""

    label: str
    qwp_angle: float
    polarizer_angle: float


DEFAULT_SETTINGS = (
    MeasurementSetting("H", 0.0, 0.0),
    MeasurementSetting("V", 0.0, math.pi / 2),
    MeasurementSetting("D", math.pi / 4, math.pi / 4),
    MeasurementSetting("R", 0.0, math.pi / 4),
)


@dataclass(frozen=True)
class DetectorModel:
    """Counting model: mean = kappa * tr(Pi G) * time + dark_rate * time.

    kappa: counts per second per unit beam intensity
    dark_rate: background counts per second
    integration_time: seconds per setting
    """

    kappa: float = 3333.0
    dark_rate: float = 0.0
    integration_time: float = 15.0

    def __post_init__(self):
        if self.kappa < 0 or self.dark_rate < 0:
            raise ParameterError("count rates must be non-negative")
        if self.integration_time <= 0:
            raise ParameterError("integration_time must be positive")


def projector_from_setting(setting: MeasurementSetting) -> np.ndarray:
    """Pi = J_qwp^dagger Pi_pol J_qwp: the pure state the analyzer passes."""
    j = waveplate_jones("quarter", setting.qwp_angle)
    pol = polarizer_jones(setting.polarizer_angle)
    return j.conj().T @ pol @ j


def _projector_components(settings) -> tuple[np.ndarray, ...]:
    pxx = np.empty(len(settings))
    pyy = np.empty(len(settings))
    rexy = np.empty(len(settings))
    imxy = np.empty(len(settings))
    for i, s in enumerate(settings):
        pi = projector_from_setting(s)
        pxx[i], pyy[i] = pi[0, 0].real, pi[1, 1].real
        rexy[i], imxy[i] = pi[0, 1].real, pi[0, 1].imag
    return pxx, pyy, rexy, imxy


def expected_counts(
    g: CoherenceMatrix, setting: MeasurementSetting, detector: DetectorModel
) -> float:
    """Mean detected counts for one setting, dark counts included."""
    pi = projector_from_setting(setting)
    signal = float(np.trace(pi @ g.matrix).real)
    return detector.kappa * max(signal, 0.0) * detector.integration_time \
        + detector.dark_rate * detector.integration_time


def simulate_counts(
    g: CoherenceMatrix, settings, detector: DetectorModel, seed
) -> np.ndarray:
    """Poisson draw of raw counts for every setting; deterministic per seed."""
    mu = np.array([expected_counts(g, s, detector) for s in settings])
    return np.random.default_rng(seed).poisson(mu)


def background_correct(raw_counts, detector: DetectorModel) -> np.ndarray:
    """Subtract the expected dark counts, clamping at zero."""
    raw = np.asarray(raw_counts, dtype=float)
    if np.any(raw < 0):
        raise ParameterError("raw counts must be non-negative")
    return np.maximum(raw - detector.dark_rate * detector.integration_time, 0.0)


def _params_to_matrix(t: np.ndarray) -> np.ndarray:
    gxx = t[0] * t[0]
    gyy = t[1] * t[1] + t[2] * t[2] + t[3] * t[3]
    gxy = t[0] * (t[2] - 1j * t[3])
    return np.array([[gxx, gxy], [gxy.conjugate(), gyy]])


def _matrix_to_params(g: np.ndarray) -> np.ndarray:
    t0 = math.sqrt(max(g[0, 0].real, 0.0))
    if t0 > 0.0:
        t2 = g[1, 0].real / t0
        t3 = g[1, 0].imag / t0
    else:
        t2 = t3 = 0.0
    rest = g[1, 1].real - t2 * t2 - t3 * t3
    return np.array([t0, math.sqrt(max(rest, 0.0)), t2, t3])


def _linear_inversion_psd(counts, pxx, pyy, rexy, imxy) -> np.ndarray:
    design = np.column_stack([pxx, pyy, 2.0 * rexy, 2.0 * imxy])
    sol, *_ = np.linalg.lstsq(design, counts, rcond=None)
    g = np.array([[sol[0], sol[2] + 1j * sol[3]],
                  [sol[2] - 1j * sol[3], sol[1]]])
    vals, vecs = np.linalg.eigh(g)
    vals = np.maximum(vals, 0.0)
    return (vecs * vals) @ vecs.conj().T


def mle_reconstruct(corrected_counts, settings) -> CoherenceMatrix:
    """Maximum-likelihood coherence matrix from background-corrected counts.

    G = L L^dagger is parameterized by the four real entries of a lower
    triangular L, which keeps every iterate positive semidefinite.  The
    Poisson log-likelihood sum(n log mu - mu) is maximized from a linear
    inversion (projected onto the PSD cone) with L-BFGS-B, then polished
    against a +-{1,2}-step refinement grid per parameter until the grid
    finds no further improvement; the result never has lower likelihood
    than its initializer.  All-zero counts return the zero matrix.
    """
    counts = np.asarray(corrected_counts, dtype=float)
    if np.any(counts < 0):
        raise ParameterError("corrected counts must be non-negative")
    if len(settings) < 4 or counts.shape != (len(settings),):
        raise IllPosedError(
            f"need >= 4 settings with matching counts, got {len(settings)} "
            f"settings and {counts.shape[0]} counts"
        )
    pxx, pyy, rexy, imxy = _projector_components(settings)
    design = np.column_stack([pxx, pyy, math.sqrt(2.0) * rexy, math.sqrt(2.0) * imxy])
    if np.linalg.matrix_rank(design, tol=1e-10 * np.abs(design).max()) < 4:
        raise IllPosedError("projector set is degenerate; cannot identify G")
    if not np.any(counts > 0):
        return CoherenceMatrix(np.zeros((2, 2), dtype=complex))

    floor = _MU_FLOOR_REL * (counts.sum() + 1.0)
    args = (pxx, pyy, rexy, imxy, counts, floor)

    def value_grad(t):
        return kernels.nll_poisson_grad(t, *args)

    t_init = _matrix_to_params(_linear_inversion_psd(counts, pxx, pyy, rexy, imxy))
    scale = math.sqrt(counts.sum())
    if np.linalg.norm(t_init) < 1e-9 * scale:
        t_init = np.full(4, 0.1 * scale)

    best_t = t_init.copy()
    best_nll = value_grad(best_t)[0]
    offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
    for _ in range(8):
        res = minimize(value_grad, best_t, jac=True, method="L-BFGS-B",
                       options={"maxiter": 500, "ftol": 1e-14, "gtol": 1e-10})
        if res.fun <= best_nll:
            best_t, best_nll = np.asarray(res.x), float(res.fun)
        steps = np.maximum(1e-4 * np.abs(best_t), 1e-6 * scale)
        axes = [best_t[k] + offsets * steps[k] for k in range(4)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 4)
        grid_nll = kernels.nll_poisson_batch(grid, *args)
        k_min = int(np.argmin(grid_nll))
        if grid_nll[k_min] >= best_nll - 1e-9:
            break
        best_t, best_nll = grid[k_min].copy(), float(grid_nll[k_min])
    return CoherenceMatrix(_params_to_matrix(best_t))


@dataclass(frozen=True)
class TomographyRun:
    """Bundle of everything one reconstruction consumed and produced."""

    settings: tuple[MeasurementSetting, ...]
    raw_counts: tuple[float, ...]
    corrected_counts: tuple[float, ...]
    reconstruction: CoherenceMatrix
    p_estimate: float


def reconstruct_run(settings, raw_counts, detector: DetectorModel) -> TomographyRun:
    """Correct, fit and summarize one set of raw counts.

    p_estimate is NaN when the corrected counts are all zero (zero-trace
    reconstruction, polarization undefined).
    """
    corrected = background_correct(raw_counts, detector)
    recon = mle_reconstruct(corrected, settings)
    p = degree_of_polarization(recon) if recon.trace > 0.0 else math.nan
    return TomographyRun(
        settings=tuple(settings),
        raw_counts=tuple(float(c) for c in np.asarray(raw_counts, dtype=float)),
        corrected_counts=tuple(float(c) for c in corrected),
        reconstruction=recon,
        p_estimate=p,
    )


def p_from_run(run: TomographyRun) -> float:
    """Degree of polarization of a run; raises on zero-trace reconstructions."""
    return degree_of_polarization(run.reconstruction)


# ---------------------------------------------------------------------------
# Counts table I/O
# ---------------------------------------------------------------------------

_COUNTS_HEADER = ("label", "qwp_angle_deg", "polarizer_angle_deg", "raw_count")


def write_counts_table(path, settings, raw_counts) -> None:
    """Whitespace-delimited table, one row per setting, angles in degrees."""
    lines = ["  ".join(_COUNTS_HEADER)]
    for s, n in zip(settings, raw_counts, strict=True):
        lines.append(
            f"{s.label}  {math.degrees(s.qwp_angle):.6f}  "
            f"{math.degrees(s.polarizer_angle):.6f}  {int(n)}"
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def read_counts_table(path) -> tuple[tuple[MeasurementSetting, ...], np.ndarray]:
    """Parse a counts table; returns (settings, raw counts).

    The header row must name the four columns exactly; each data row is
    label, QWP angle (deg), polarizer angle (deg), non-negative integer count.
    """
    try:
        with open(path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read counts file {path}: {exc}") from None
    rows = [(i + 1, ln.split()) for i, ln in enumerate(lines) if ln.strip()]
    if not rows:
        raise ConfigError("counts file is empty")
    header_line, header = rows[0]
    if tuple(header) != _COUNTS_HEADER:
        raise ConfigError(
            f"expected header {' '.join(_COUNTS_HEADER)!r}", line=header_line
        )
    settings = []
    counts = []
    for line_no, parts in rows[1:]:
        if len(parts) != 4:
            raise ConfigError(f"expected 4 columns, got {len(parts)}", line=line_no)
        label, qwp_s, pol_s, count_s = parts
        try:
            qwp, pol = float(qwp_s), float(pol_s)
            count = int(count_s)
        except ValueError:
            raise ConfigError(f"malformed row {parts}", line=line_no) from None
        if count < 0:
            raise ConfigError(f"negative count {count}", line=line_no)
        settings.append(
            MeasurementSetting(label, math.radians(qwp), math.radians(pol))
        )
        counts.append(count)
    if not settings:
        raise ConfigError("counts file has a header but no data rows")
    return tuple(settings), np.array(counts)
