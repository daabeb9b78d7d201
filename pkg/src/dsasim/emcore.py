"""Impedance assembly and far-field transimpedance for z-parallel thin dipoles.

Closed forms follow the induced-EMF method with an assumed sinusoidal current;
the kernels return values referenced to the current maximum, and everything
public here is re-referenced to the feed current through the sin(k h) factors.
That same factor appears in the transimpedance rows, which is what makes port
power (i^H Re{Z} i) and integrated pattern power agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .constants import C0, ETA0
from .exceptions import DomainError
from .geometry import ArrayGeometry, TestPointSet
from .special import cosine_integral

# feed referencing divides by sin(k h); lengths too close to a full wave have
# no feed current in this model and are rejected
_SIN_KH_FLOOR = 1e-6


@dataclass(frozen=True)
class FrequencyGrid:
    """Subcarrier grid f_k = f0 + (k-1) * bandwidth / count, k = 1..count."""

    f0: float
    bandwidth: float
    count: int

    def __post_init__(self):
        if self.f0 <= 0:
            raise DomainError("f0 must be positive")
        if self.count < 1:
            raise DomainError("count must be >= 1")
        if self.bandwidth < 0:
            raise DomainError("bandwidth must be nonnegative")

    @property
    def frequencies(self) -> np.ndarray:
        return self.f0 + np.arange(self.count) * (self.bandwidth / self.count)

    @property
    def wavelength0(self) -> float:
        return C0 / self.f0


def wavenumber(f: float) -> float:
    if not np.isfinite(f) or f <= 0:
        raise DomainError("frequency must be positive and finite")
    return 2 * np.pi * f / C0


def _feed_scale(k: float, half_length):
    s = np.sin(k * np.asarray(half_length, dtype=float))
    if np.any(np.abs(s) < _SIN_KH_FLOOR):
        raise DomainError(
            "element length too close to a multiple of the wavelength; feed "
            "referencing is singular there")
    return s


def dipole_self_impedance(length: float, f: float,
                          radius: float | None = None) -> complex:
    """Feed-referenced self impedance of a center-fed thin dipole.

    The default is the radius-free induced-EMF form (exact 73.08 + j42.51 ohms
    at exactly half-wave length). Its reactance never crosses zero near
    half-wave; passing a wire `radius` restores the classical thickness term
    sin(kl) * Ci(2 k a^2 / l) and with it the resonance crossing slightly
    below half-wave.
    """
    if length <= 0:
        raise DomainError("length must be positive")
    k = wavenumber(f)
    z = kernels().self_z_max(length / 2, k)
    if radius is not None:
        if not 0 < radius < length / 10:
            raise DomainError("radius must be positive and small against length")
        z += 1j * (ETA0 / (4 * np.pi)) * np.sin(k * length) * cosine_integral(
            2 * k * radius ** 2 / length)
    s = _feed_scale(k, length / 2)
    return complex(z / (s * s))


def mutual_impedance_parallel(horizontal_separation: float,
                              vertical_offset: float, length1: float,
                              length2: float, f: float) -> complex:
    """Feed-referenced mutual impedance of two z-parallel dipoles whose feed
    points differ by the given horizontal distance and vertical offset.
    Symmetric under element exchange; horizontal_separation = 0 is the
    collinear case and requires non-overlapping wires."""
    d = float(horizontal_separation)
    s = float(vertical_offset)
    if d < 0:
        raise DomainError("horizontal_separation must be nonnegative")
    if length1 <= 0 or length2 <= 0:
        raise DomainError("lengths must be positive")
    if d == 0.0:
        gap = abs(s) - (length1 + length2) / 2
        if gap <= 1e-12 * max(length1, length2):
            raise DomainError(
                "collinear elements overlap or touch; mutual impedance is "
                "singular")
    k = wavenumber(f)
    z = kernels().mutual_z_max(d, s, length1 / 2, length2 / 2, k)
    s1 = _feed_scale(k, length1 / 2)
    s2 = _feed_scale(k, length2 / 2)
    return complex(z / (s1 * s2))


def assemble_impedance_matrix(geometry: ArrayGeometry, f: float) -> np.ndarray:
    """Dense N x N impedance matrix of the array at frequency f; symmetric by
    construction (reciprocity)."""
    k = wavenumber(f)
    h = np.ascontiguousarray(geometry.half_lengths)
    scale = 1.0 / _feed_scale(k, h)
    z_max = kernels().assemble_z_max(
        np.ascontiguousarray(geometry.positions[:, 0]),
        np.ascontiguousarray(geometry.positions[:, 1]),
        np.ascontiguousarray(geometry.positions[:, 2]),
        h, k)
    return z_max * np.outer(scale, scale)


def channel_transimpedance(geometry: ArrayGeometry, tests: TestPointSet,
                           f: float, rx_gain: float = 1.0) -> np.ndarray:
    """T x N transimpedance: open-circuit probe voltage per unit feed current.

    Entry (t, n) is the theta-polarized far field of element n at probe t,
    e^(-jkr)/r spreading included, scaled by sqrt(rx_gain). Probes on an
    element's axis see the pattern-factor limit 0.
    """
    if rx_gain < 0:
        raise DomainError("rx_gain must be nonnegative")
    k = wavenumber(f)
    delta = tests.points[:, None, :] - geometry.positions[None, :, :]
    r = np.sqrt(np.sum(delta * delta, axis=2))
    if np.any(r < 1e-9):
        raise DomainError("a probe coincides with an element feed point")
    cos_psi = delta[:, :, 2] / r
    sin_psi = np.sqrt(np.maximum(0.0, 1.0 - cos_psi ** 2))
    kh = k * geometry.half_lengths
    num = np.cos(kh[None, :] * cos_psi) - np.cos(kh)[None, :]
    pattern = np.divide(num, sin_psi, out=np.zeros_like(num), where=sin_psi > 0)
    feed = _feed_scale(k, geometry.half_lengths)
    return (np.sqrt(rx_gain) * 1j * ETA0 / (2 * np.pi)
            * np.exp(-1j * k * r) / r * pattern / feed[None, :])
