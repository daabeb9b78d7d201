"""Shared oracles and builders.

The oracles are deliberately independent of the package code paths: Si/Ci via
adaptive quadrature of the defining integrals, mutual impedance via direct
quadrature of the induced-EMF near-field integral.
"""

import numpy as np
import pytest
from scipy.integrate import quad

import dsasim.backend
from dsasim.constants import C0, ETA0, EULER_GAMMA
from dsasim.emcore import FrequencyGrid
from dsasim.geometry import ArrayGeometry, ring_test_points
from dsasim.loads import LoadConfig, VaractorParams

F0 = 2.4e9
LAM0 = C0 / F0


def oracle_sici(x: float):
    """Adaptive-quadrature Si and Ci: finite integrals of sinc and
    (cos t - 1)/t below 4, sin/cos-weighted tail integrals above."""
    if x <= 4:
        si, _ = quad(lambda t: np.sinc(t / np.pi), 0, x, epsabs=1e-13, limit=200)
        cin, _ = quad(lambda t: (np.cos(t) - 1) / t, 0, x, epsabs=1e-13, limit=200)
        return si, EULER_GAMMA + np.log(x) + cin
    tail_sin, _ = quad(lambda t: 1 / t, x, np.inf, weight="sin", wvar=1.0,
                       epsabs=1e-11, limlst=100)
    tail_cos, _ = quad(lambda t: 1 / t, x, np.inf, weight="cos", wvar=1.0,
                       epsabs=1e-11, limlst=100)
    return np.pi / 2 - tail_sin, -tail_cos


def oracle_mutual_max(d: float, s: float, h1: float, h2: float, k: float):
    """Direct quadrature of the induced-EMF mutual integral, current-max
    referenced: minus the field of dipole 1 integrated against the sinusoidal
    current of dipole 2."""
    def ez(z):
        r1 = np.hypot(d, z - h1)
        r2 = np.hypot(d, z + h1)
        r0 = np.hypot(d, z)
        return (np.exp(-1j * k * r1) / r1 + np.exp(-1j * k * r2) / r2
                - 2 * np.cos(k * h1) * np.exp(-1j * k * r0) / r0)

    def piece(fn, a, b):
        val, _ = quad(fn, a, b, epsabs=1e-12, epsrel=1e-12, limit=400)
        return val

    def f_re(z):
        return (np.sin(k * (h2 - abs(z - s))) * ez(z)).real

    def f_im(z):
        return (np.sin(k * (h2 - abs(z - s))) * ez(z)).imag

    total = complex(piece(f_re, s - h2, s) + piece(f_re, s, s + h2),
                    piece(f_im, s - h2, s) + piece(f_im, s, s + h2))
    return 1j * ETA0 / (4 * np.pi) * total


def oracle_mutual(d: float, s: float, l1: float, l2: float, f: float):
    """Feed-referenced version of the quadrature oracle."""
    k = 2 * np.pi * f / C0
    zmax = oracle_mutual_max(d, s, l1 / 2, l2 / 2, k)
    return zmax / (np.sin(k * l1 / 2) * np.sin(k * l2 / 2))


def scenario_loads(na: int, **kwargs) -> LoadConfig:
    return LoadConfig(VaractorParams(), 75.0, na, **kwargs)


def small_random_geometry(rng, n: int, na: int, spread: float = 1.0) -> ArrayGeometry:
    """n well-separated z-parallel dipoles in a box of `spread` wavelengths."""
    while True:
        pos = np.zeros((n, 3))
        pos[:, 0] = rng.uniform(-spread, spread, n) * LAM0
        pos[:, 1] = rng.uniform(-spread, spread, n) * LAM0
        pos[:, 2] = rng.uniform(-0.2, 0.2, n) * LAM0
        d = np.linalg.norm(pos[:, None, :2] - pos[None, :, :2], axis=2)
        d[np.diag_indices(n)] = np.inf
        if d.min() > 0.05 * LAM0:
            return ArrayGeometry(pos, np.full(n, LAM0 / 2), na)


@pytest.fixture
def toy_scene():
    """N=6, Na=2, K=2, T=8 bundle used by objective and gradient tests."""
    from dsasim.network import build_drive_matrix, build_network_model
    from dsasim.synth import build_steering_targets

    rng = np.random.default_rng(7)
    geom = small_random_geometry(rng, 6, 2)
    tests = ring_test_points(8, 50.0)
    freq = FrequencyGrid(F0, 80e6, 2)
    loads = scenario_loads(2)
    model = build_network_model(geom, tests, freq, loads)
    v = build_drive_matrix(6, 2, loads.r)
    target = build_steering_targets(tests, [(1, 1, 90.0), (2, 2, 270.0)])
    return model, v, target


@pytest.fixture
def restore_backend():
    """Let a test switch kernel backends and put the original back."""
    original = dsasim.backend.backend_name()
    yield
    dsasim.backend.set_backend(original)
