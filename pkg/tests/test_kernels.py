"""Kernel backends: cross-implementation agreement and dispatch plumbing."""

import os
import subprocess
import sys

import numpy as np
import pytest

from polsim import kernels


def random_problem(rng, n_settings=4):
    t = rng.normal(size=4) * 150.0
    pxx = rng.uniform(0, 1, n_settings)
    pyy = rng.uniform(0, 1, n_settings)
    rexy = rng.uniform(-0.5, 0.5, n_settings)
    imxy = rng.uniform(-0.5, 0.5, n_settings)
    counts = rng.uniform(0, 1e5, n_settings)
    floor = 1e-12 * (counts.sum() + 1.0)
    return t, (pxx, pyy, rexy, imxy, counts, floor)


def reference_nll(t, pxx, pyy, rexy, imxy, counts, floor):
    """Straightforward reimplementation used as the correctness oracle."""
    gxx = t[0] ** 2
    gyy = t[1] ** 2 + t[2] ** 2 + t[3] ** 2
    gxy = t[0] * (t[2] - 1j * t[3])
    mu = pxx * gxx + pyy * gyy + 2.0 * (rexy * gxy.real + imxy * gxy.imag)
    mu = np.maximum(mu, floor)
    return float(np.sum(mu - counts * np.log(mu)))


def test_active_backend_is_reported():
    assert kernels.active_backend() in ("numpy", "numba")


def test_mc_count_matches_direct_enumeration():
    rng = np.random.default_rng(1)
    u = rng.random((3, 5000))
    one_minus_m2, p_flag, p_coh = 0.64, 0.4, 0.7
    want = 0
    for s, r, d in zip(*u):
        p = p_flag if (s < 0.5 and r < one_minus_m2) else p_coh
        want += d < p
    got = kernels.mc_detection_count_numpy(u[0], u[1], u[2], one_minus_m2, p_flag, p_coh)
    assert got == want
    assert kernels._mc_detection_count_loop(u[0], u[1], u[2], one_minus_m2, p_flag, p_coh) == want


def test_mc_count_backends_agree_exactly():
    rng = np.random.default_rng(2)
    variants = [kernels.mc_detection_count_numpy, kernels._mc_detection_count_loop]
    if kernels.HAS_NUMBA:
        variants.append(kernels.mc_detection_count_numba)
    for _ in range(10):
        u = rng.random((3, 20000))
        args = (u[0], u[1], u[2], rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1))
        hits = {f(*args) for f in variants}
        assert len(hits) == 1


def test_nll_value_matches_reference():
    rng = np.random.default_rng(3)
    for _ in range(20):
        t, args = random_problem(rng)
        nll, _ = kernels.nll_poisson_grad_numpy(t, *args)
        assert nll == pytest.approx(reference_nll(t, *args), rel=1e-13)


def test_nll_gradient_matches_finite_differences():
    rng = np.random.default_rng(4)
    for _ in range(10):
        t, args = random_problem(rng)
        _, grad = kernels.nll_poisson_grad_numpy(t, *args)
        h = 1e-5 * max(1.0, np.max(np.abs(t)))
        for k in range(4):
            tp, tm = t.copy(), t.copy()
            tp[k] += h
            tm[k] -= h
            fd = (reference_nll(tp, *args) - reference_nll(tm, *args)) / (2 * h)
            assert grad[k] == pytest.approx(fd, rel=2e-5, abs=1e-4)


def test_nll_backends_agree():
    rng = np.random.default_rng(5)
    variants = [kernels.nll_poisson_grad_numpy, kernels._nll_poisson_grad_loop]
    if kernels.HAS_NUMBA:
        variants.append(kernels.nll_poisson_grad_numba)
    for n_settings in (4, 6, 12):
        t, args = random_problem(rng, n_settings)
        results = [f(t, *args) for f in variants]
        for nll, grad in results[1:]:
            assert nll == pytest.approx(results[0][0], rel=1e-14)
            np.testing.assert_allclose(grad, results[0][1], rtol=1e-12, atol=1e-12)


def test_nll_batch_rows_equal_single_evaluations():
    rng = np.random.default_rng(6)
    _, args = random_problem(rng)
    batch = rng.normal(size=(25, 4)) * 100.0
    out_numpy = kernels.nll_poisson_batch_numpy(batch, *args)
    out_loop = kernels._nll_poisson_batch_loop(batch, *args)
    np.testing.assert_allclose(out_numpy, out_loop, rtol=1e-14)
    if kernels.HAS_NUMBA:
        out_numba = kernels.nll_poisson_batch_numba(batch, *args)
        np.testing.assert_allclose(out_numba, out_loop, rtol=1e-14)
    for k in (0, 7, 24):
        single, _ = kernels.nll_poisson_grad_numpy(batch[k], *args)
        assert out_numpy[k] == pytest.approx(single, rel=1e-13)


def test_floor_keeps_nll_finite_at_origin():
    rng = np.random.default_rng(7)
    _, args = random_problem(rng)
    nll, grad = kernels.nll_poisson_grad_numpy(np.zeros(4), *args)
    assert np.isfinite(nll)
    assert np.all(np.isfinite(grad))


def _backend_in_subprocess(env_value):
    env = dict(os.environ)
    if env_value is None:
        env.pop("POLSIM_NUMBA", None)
    else:
        env["POLSIM_NUMBA"] = env_value
    return subprocess.run(
        [sys.executable, "-c",
         "import polsim.kernels as k; print(k.active_backend())"],
        capture_output=True, text=True, env=env,
    )


def test_backend_env_flag():
    """POLSIM_NUMBA selects the backend at import time."""
    res = _backend_in_subprocess("0")
    assert res.returncode == 0 and res.stdout.strip() == "numpy"
    res = _backend_in_subprocess(None)
    expected = "numba" if kernels.HAS_NUMBA else "numpy"
    assert res.returncode == 0 and res.stdout.strip() == expected
    if kernels.HAS_NUMBA:
        res = _backend_in_subprocess("1")
        assert res.returncode == 0 and res.stdout.strip() == "numba"
    res = _backend_in_subprocess("maybe")
    assert res.returncode != 0
    assert "POLSIM_NUMBA" in res.stderr
