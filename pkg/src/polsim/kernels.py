"""Hot numeric kernels with two interchangeable backends.

Each kernel exists as a numba @njit loop and as a vectorized pure-numpy
function consuming the same inputs.  Monte-Carlo hit counts are integers and
agree exactly across backends; likelihood values agree to machine rounding
(bit-identically at the default four measurement settings, where numpy sums
in loop order).  The active backend is picked at import time from the
POLSIM_NUMBA environment variable:

    unset / "auto"  use numba when it imports, else numpy
    "0"             force the numpy fallback
    "1"             require numba (RuntimeError when unavailable)

Both variants stay importable (``*_numpy`` / ``*_numba``) so tests and the
benchmark script can compare them directly.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    HAS_NUMBA = False


# ---------------------------------------------------------------------------
# Monte-Carlo detection sampler
# ---------------------------------------------------------------------------
# Per sample: a fair coin picks the source; a first-source photon is flagged
# by the marker with probability one_minus_m2; flagged samples detect with
# probability p_flagged, everything else with p_coherent.

def mc_detection_count_numpy(u_source, u_report, u_detect,
                             one_minus_m2, p_flagged, p_coherent):
    flagged = (u_source < 0.5) & (u_report < one_minus_m2)
    threshold = np.where(flagged, p_flagged, p_coherent)
    return int(np.count_nonzero(u_detect < threshold))


def _mc_detection_count_loop(u_source, u_report, u_detect,
                             one_minus_m2, p_flagged, p_coherent):
    hits = 0
    for i in range(u_source.shape[0]):
        if u_source[i] < 0.5 and u_report[i] < one_minus_m2:
            if u_detect[i] < p_flagged:
                hits += 1
        elif u_detect[i] < p_coherent:
            hits += 1
    return hits


# ---------------------------------------------------------------------------
# Poisson log-likelihood for the 4-parameter coherence-matrix factorization
# ---------------------------------------------------------------------------
# params = (t0, t1, t2, t3) parameterize G = L L^dagger with
# L = [[t0, 0], [t2 + i*t3, t1]], i.e.
#   Gxx = t0^2, Gyy = t1^2 + t2^2 + t3^2, Gxy = t0*(t2 - i*t3).
# Projector p is packed as (pxx, pyy, Re pxy, Im pxy) per setting; the
# negative log-likelihood is sum(mu - n*log(mu)) with mu floored.

def nll_poisson_grad_numpy(params, pxx, pyy, rexy, imxy, counts, floor):
    t0, t1, t2, t3 = params
    gxx = t0 * t0
    gyy = t1 * t1 + t2 * t2 + t3 * t3
    re, im = t0 * t2, -t0 * t3
    mu = pxx * gxx + pyy * gyy + 2.0 * (rexy * re + imxy * im)
    mu = np.maximum(mu, floor)
    nll = float(np.sum(mu - counts * np.log(mu)))
    w = 1.0 - counts / mu
    grad = np.empty(4)
    grad[0] = float(np.sum(w * (2.0 * t0 * pxx + 2.0 * (rexy * t2 - imxy * t3))))
    grad[1] = float(np.sum(w * (2.0 * t1 * pyy)))
    grad[2] = float(np.sum(w * (2.0 * t2 * pyy + 2.0 * rexy * t0)))
    grad[3] = float(np.sum(w * (2.0 * t3 * pyy - 2.0 * imxy * t0)))
    return nll, grad


def _nll_poisson_grad_loop(params, pxx, pyy, rexy, imxy, counts, floor):
    t0, t1, t2, t3 = params[0], params[1], params[2], params[3]
    gxx = t0 * t0
    gyy = t1 * t1 + t2 * t2 + t3 * t3
    re, im = t0 * t2, -t0 * t3
    nll = 0.0
    grad = np.zeros(4)
    for i in range(pxx.shape[0]):
        mu = pxx[i] * gxx + pyy[i] * gyy + 2.0 * (rexy[i] * re + imxy[i] * im)
        if mu < floor:
            mu = floor
        nll += mu - counts[i] * math.log(mu)
        w = 1.0 - counts[i] / mu
        grad[0] += w * (2.0 * t0 * pxx[i] + 2.0 * (rexy[i] * t2 - imxy[i] * t3))
        grad[1] += w * (2.0 * t1 * pyy[i])
        grad[2] += w * (2.0 * t2 * pyy[i] + 2.0 * rexy[i] * t0)
        grad[3] += w * (2.0 * t3 * pyy[i] - 2.0 * imxy[i] * t0)
    return nll, grad


def nll_poisson_batch_numpy(params, pxx, pyy, rexy, imxy, counts, floor):
    t0, t1, t2, t3 = params[:, 0], params[:, 1], params[:, 2], params[:, 3]
    gxx = t0 * t0
    gyy = t1 * t1 + t2 * t2 + t3 * t3
    re, im = t0 * t2, -t0 * t3
    mu = (gxx[:, None] * pxx[None, :] + gyy[:, None] * pyy[None, :]
          + 2.0 * (re[:, None] * rexy[None, :] + im[:, None] * imxy[None, :]))
    np.maximum(mu, floor, out=mu)
    return np.sum(mu - counts[None, :] * np.log(mu), axis=1)


def _nll_poisson_batch_loop(params, pxx, pyy, rexy, imxy, counts, floor):
    out = np.empty(params.shape[0])
    for k in range(params.shape[0]):
        t0, t1, t2, t3 = params[k, 0], params[k, 1], params[k, 2], params[k, 3]
        gxx = t0 * t0
        gyy = t1 * t1 + t2 * t2 + t3 * t3
        re, im = t0 * t2, -t0 * t3
        acc = 0.0
        for i in range(pxx.shape[0]):
            mu = pxx[i] * gxx + pyy[i] * gyy + 2.0 * (rexy[i] * re + imxy[i] * im)
            if mu < floor:
                mu = floor
            acc += mu - counts[i] * math.log(mu)
        out[k] = acc
    return out


# ---------------------------------------------------------------------------
# Backend selection
# ---------------------------------------------------------------------------

if HAS_NUMBA:
    mc_detection_count_numba = njit(cache=True)(_mc_detection_count_loop)
    nll_poisson_grad_numba = njit(cache=True)(_nll_poisson_grad_loop)
    nll_poisson_batch_numba = njit(cache=True)(_nll_poisson_batch_loop)
else:  # pragma: no cover
    mc_detection_count_numba = None
    nll_poisson_grad_numba = None
    nll_poisson_batch_numba = None


def _resolve_backend() -> str:
    raw = os.environ.get("POLSIM_NUMBA", "auto").strip().lower()
    if raw in ("", "auto"):
        return "numba" if HAS_NUMBA else "numpy"
    if raw in ("1", "true", "yes", "on"):
        if not HAS_NUMBA:
            raise RuntimeError("POLSIM_NUMBA=1 but numba is not importable")
        return "numba"
    if raw in ("0", "false", "no", "off"):
        return "numpy"
    raise RuntimeError(f"POLSIM_NUMBA must be 0, 1 or auto, got {raw!r}")


_BACKEND = _resolve_backend()

if _BACKEND == "numba":
    mc_detection_count = mc_detection_count_numba
    nll_poisson_grad = nll_poisson_grad_numba
    nll_poisson_batch = nll_poisson_batch_numba
else:
    mc_detection_count = mc_detection_count_numpy
    nll_poisson_grad = nll_poisson_grad_numpy
    nll_poisson_batch = nll_poisson_batch_numpy


def active_backend() -> str:
    """Name of the kernel backend chosen at import time."""
    return _BACKEND
