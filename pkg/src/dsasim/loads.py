"""Reconfigurable load modeling.

Each element is terminated in a varactor-based network: L1 in parallel with
the series chain (L2, C, Rv), where the capacitance is steered through an
unbounded real parameter theta via an arctan map. Active ports additionally
embed the source resistance R. The analytic derivative dz/dtheta feeds the
synthesis gradient.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError, SingularityError


@dataclass(frozen=True)
class VaractorParams:
    rv: float = 0.1
    l1: float = 2.5e-9
    l2: float = 0.7e-9
    cmin: float = 0.47e-12
    cmax: float = 2.35e-12

    def __post_init__(self):
        if not 0 < self.cmin < self.cmax:
            raise DomainError("need 0 < cmin < cmax")
        if self.rv < 0:
            raise DomainError("rv must be nonnegative")
        if self.l1 <= 0 or self.l2 <= 0:
            raise DomainError("l1 and l2 must be positive")


@dataclass(frozen=True)
class LoadConfig:
    varactor: VaractorParams
    r: float
    na: int
    active_varactors: bool = True

    def __post_init__(self):
        if self.r <= 0:
            raise DomainError("source resistance must be positive")
        if self.na < 0:
            raise DomainError("na must be nonnegative")


def _check_theta(theta) -> np.ndarray:
    arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("theta entries must be finite")
    return arr


def capacitance_of(theta, params: VaractorParams):
    """C(theta) = cmin + (cmax - cmin) (arctan(theta) + pi/2) / pi; strictly
    increasing with open range (cmin, cmax)."""
    arr = _check_theta(theta)
    c = params.cmin + (params.cmax - params.cmin) * (np.arctan(arr) + np.pi / 2) / np.pi
    return float(c) if arr.ndim == 0 else c


def capacitance_dtheta(theta, params: VaractorParams):
    arr = _check_theta(theta)
    d = (params.cmax - params.cmin) / (np.pi * (1.0 + arr * arr))
    return float(d) if arr.ndim == 0 else d


def _branch_denominator(theta, omega, params):
    c = capacitance_of(theta, params)
    return 1j * omega * (params.l1 + params.l2) + 1.0 / (1j * omega * c) + params.rv


def varactor_impedance(theta, f: float, params: VaractorParams):
    """z(theta, f) = j w L1 (j w L2 + 1/(j w C) + Rv) / (j w (L1+L2) + 1/(j w C) + Rv).

    Passive for Rv >= 0. An exact zero of the denominator (series resonance
    with Rv = 0) is a genuine pole and raises."""
    if f <= 0:
        raise DomainError("frequency must be positive")
    arr = _check_theta(theta)
    omega = 2 * np.pi * f
    den = _branch_denominator(arr, omega, params)
    if np.any(den == 0):
        raise SingularityError(
            "lossless load network at exact series resonance; impedance "
            "unbounded")
    num = 1j * omega * params.l1 * (
        1j * omega * params.l2 + 1.0 / (1j * omega * capacitance_of(arr, params))
        + params.rv)
    z = num / den
    return complex(z) if arr.ndim == 0 else z


def varactor_impedance_dtheta(theta, f: float, params: VaractorParams):
    """Analytic dz/dtheta, chained through dC/dtheta."""
    if f <= 0:
        raise DomainError("frequency must be positive")
    arr = _check_theta(theta)
    omega = 2 * np.pi * f
    c = capacitance_of(arr, params)
    den = _branch_denominator(arr, omega, params)
    if np.any(den == 0):
        raise SingularityError("impedance derivative unbounded at resonance")
    # z = j w L1 + (w L1)^2 / den and d(den)/dC = j / (w C^2)
    dz_dc = -((omega * params.l1) ** 2) / (den * den) * (1j / (omega * c * c))
    dz = dz_dc * capacitance_dtheta(arr, params)
    return complex(dz) if arr.ndim == 0 else dz


def _active_mask(n: int, cfg: LoadConfig) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[: cfg.na] = True
    return mask


def load_diagonal(theta, f: float, cfg: LoadConfig) -> np.ndarray:
    """Diagonal of Z_L(theta) at frequency f: varactor impedance everywhere,
    plus R on the first na (active) ports. With active_varactors False the
    active ports carry only R and their theta entries are inert."""
    arr = np.atleast_1d(_check_theta(theta))
    if arr.size < cfg.na:
        raise DimensionError(
            f"theta has {arr.size} entries but {cfg.na} active ports")
    diag = varactor_impedance(arr, f, cfg.varactor).astype(np.complex128)
    active = _active_mask(arr.size, cfg)
    if not cfg.active_varactors:
        diag[active] = 0
    diag[active] += cfg.r
    return diag


def load_diagonal_dtheta(theta, f: float, cfg: LoadConfig) -> np.ndarray:
    arr = np.atleast_1d(_check_theta(theta))
    if arr.size < cfg.na:
        raise DimensionError(
            f"theta has {arr.size} entries but {cfg.na} active ports")
    dz = varactor_impedance_dtheta(arr, f, cfg.varactor).astype(np.complex128)
    if not cfg.active_varactors:
        dz[_active_mask(arr.size, cfg)] = 0
    return dz


def assemble_load_matrix(theta, f: float, cfg: LoadConfig) -> np.ndarray:
    """Full N x N diagonal load matrix (dense, zeros off the diagonal)."""
    return np.diag(load_diagonal(theta, f, cfg))
