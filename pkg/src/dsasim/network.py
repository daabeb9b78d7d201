"""Loaded-network forward model.

Solves the port equations (Z_L + Z) i = v, maps currents to probe voltages,
and accounts for every watt: source loss, load loss, radiated power. RMS
phasor convention throughout, so P = |i|^2 R with no factor 1/2 and each drive
column carries exactly 1 W of available power.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, get_lapack_funcs, lu_factor, lu_solve

from .constants import C0, ETA0
from .emcore import (FrequencyGrid, assemble_impedance_matrix,
                     channel_transimpedance)
from .exceptions import (DimensionError, DomainError, ModelConsistencyError,
                         SolverError)
from .geometry import ArrayGeometry, TestPointSet
from .loads import LoadConfig, load_diagonal

_CONDITION_CAP = 1e14


def build_drive_matrix(n: int, na: int, r: float) -> np.ndarray:
    """N x Na drive matrix: column j excites input j alone with open-circuit
    voltage sqrt(4R), i.e. 1 W available per column."""
    if not 1 <= na <= n:
        raise DomainError(f"na={na} outside [1, {n}]")
    if r <= 0:
        raise DomainError("source resistance must be positive")
    v = np.zeros((n, na))
    v[np.arange(na), np.arange(na)] = np.sqrt(4 * r)
    return v


def available_power(v, r: float) -> float:
    """Available source power of a drive vector: sum |v_n|^2 / (4R)."""
    return float(np.sum(np.abs(np.asarray(v)) ** 2) / (4 * r))


@dataclass(frozen=True)
class FactorizedNetwork:
    """LU factorization of M = Z + Z_L with its 1-norm condition estimate.
    M is complex symmetric, so the same factorization serves the adjoint
    solves (M^T = M)."""

    lu: tuple
    cond_estimate: float
    n: int

    def solve(self, b: np.ndarray) -> np.ndarray:
        return lu_solve(self.lu, b)


def factorize_network(z: np.ndarray, zl_diag: np.ndarray) -> FactorizedNetwork:
    m = z.copy()
    idx = np.arange(m.shape[0])
    m[idx, idx] += zl_diag
    anorm = np.linalg.norm(m, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LinAlgWarning)
        lu = lu_factor(m, check_finite=False)
    gecon = get_lapack_funcs(("gecon",), (m,))
    rcond, _ = gecon[0](lu[0], anorm, norm="1")
    if rcond == 0 or not np.isfinite(rcond):
        raise SolverError("loaded network matrix is singular",
                          condition_estimate=np.inf)
    cond = 1.0 / float(rcond)
    if cond > _CONDITION_CAP:
        raise SolverError(
            f"loaded network matrix condition estimate {cond:.3e} exceeds "
            f"{_CONDITION_CAP:.0e}", condition_estimate=cond)
    return FactorizedNetwork(lu, cond, m.shape[0])


def _as_diagonal(zl: np.ndarray, n: int) -> np.ndarray:
    zl = np.asarray(zl)
    if zl.ndim == 2:
        if zl.shape != (n, n):
            raise DimensionError("load matrix shape mismatch")
        return np.diagonal(zl)
    if zl.shape != (n,):
        raise DimensionError("load diagonal length mismatch")
    return zl


def solve_currents(z: np.ndarray, zl: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Currents of (Z_L + Z) i = v via dense LU; accepts the load as a full
    diagonal matrix or as its diagonal. v may carry multiple columns."""
    n = z.shape[0]
    if z.shape != (n, n):
        raise DimensionError("impedance matrix must be square")
    if np.asarray(v).shape[0] != n:
        raise DimensionError("drive vector length mismatch")
    fact = factorize_network(z, _as_diagonal(zl, n))
    return fact.solve(np.asarray(v, dtype=np.complex128))


def end_to_end_channel(hc: np.ndarray, z: np.ndarray, zl: np.ndarray,
                       v_drive: np.ndarray) -> np.ndarray:
    """T x Na end-to-end matrix Hc (Z_L + Z)^-1 V; column n is the probe
    response to exciting input n alone."""
    currents = solve_currents(z, zl, v_drive)
    return hc @ currents


def radiated_power(i: np.ndarray, z: np.ndarray) -> float:
    """i^H Re{Z} i. Tiny negatives (above -1e-9 W) clamp to zero; anything
    lower is a passivity violation."""
    p = float(np.real(np.vdot(i, z.real @ i)))
    if p < -1e-9:
        raise ModelConsistencyError(
            f"negative radiated power {p:.3e} W; passivity violated")
    return max(p, 0.0)


@dataclass(frozen=True)
class PowerAccount:
    p_injected: float      # Re{v^H i}, total power pushed by ideal sources
    p_delivered: float     # accepted by the structure = p_load_loss + p_rad
    p_source_loss: float
    p_load_loss: float
    p_rad: float
    p_available: float
    eta1: float
    eta2: float


def power_accounting(i: np.ndarray, v: np.ndarray, z: np.ndarray,
                     zl: np.ndarray, cfg: LoadConfig) -> PowerAccount:
    """Splits Re{v^H i} into source loss, load loss and radiation, verifying
    the balance closes to 1e-6 W, and forms the efficiencies against the
    available power."""
    n = z.shape[0]
    zl_diag = _as_diagonal(zl, n)
    i = np.asarray(i)
    v = np.asarray(v)
    if i.shape != (n,) or v.shape != (n,):
        raise DimensionError("currents and drive must be length-N vectors")
    if np.any(v[cfg.na:] != 0):
        raise DomainError("drive voltage on a passive port")
    p_avail = available_power(v, cfg.r)
    if p_avail == 0:
        raise DomainError("no excitation; efficiencies undefined")
    p_injected = float(np.real(np.vdot(v, i)))
    abs2 = np.abs(i) ** 2
    p_source = cfg.r * float(np.sum(abs2[: cfg.na]))
    load_res = zl_diag.real.copy()
    load_res[: cfg.na] -= cfg.r
    p_load = float(np.sum(load_res * abs2))
    p_rad = radiated_power(i, z)
    residual = p_injected - p_source - p_load - p_rad
    if abs(residual) > 1e-6:
        raise ModelConsistencyError(
            f"power balance open by {residual:.3e} W")
    return PowerAccount(
        p_injected=p_injected,
        p_delivered=p_load + p_rad,
        p_source_loss=p_source,
        p_load_loss=p_load,
        p_rad=p_rad,
        p_available=p_avail,
        eta1=(p_rad + p_load) / p_avail,
        eta2=p_rad / p_avail,
    )


@dataclass(frozen=True)
class PatternResult:
    """Sampled radiation quantities over a probe set for one excitation."""

    angles_deg: np.ndarray
    u: np.ndarray              # radiation intensity, W/sr
    u_normalized: np.ndarray
    gain_db: np.ndarray        # realized gain, vs available power
    directivity_db: np.ndarray
    peak_gain_db: float
    peak_directivity_db: float
    peak_angle_deg: float
    p_rad: float


def pattern_from_samples(y: np.ndarray, tests: TestPointSet, p_rad: float,
                         p_available: float) -> PatternResult:
    """Radiation intensity from probe voltages: U = |y|^2 r^2 / eta0 (RMS),
    then D = 4 pi U / P_rad and realized gain G = 4 pi U / P_avail."""
    if p_rad <= 0:
        raise DomainError("radiated power is zero; directivity undefined")
    r = np.linalg.norm(tests.points, axis=1)
    u = np.abs(y) ** 2 * r ** 2 / ETA0
    peak = float(np.max(u))
    u_norm = u / peak if peak > 0 else np.zeros_like(u)
    with np.errstate(divide="ignore"):
        gain_db = 10 * np.log10(4 * np.pi * u / p_available)
        dir_db = 10 * np.log10(4 * np.pi * u / p_rad)
    imax = int(np.argmax(u))
    return PatternResult(
        angles_deg=tests.angles_deg.copy(),
        u=u,
        u_normalized=u_norm,
        gain_db=gain_db,
        directivity_db=dir_db,
        peak_gain_db=float(gain_db[imax]),
        peak_directivity_db=float(dir_db[imax]),
        peak_angle_deg=float(tests.angles_deg[imax]),
        p_rad=p_rad,
    )


def radiation_pattern(geometry: ArrayGeometry, theta: np.ndarray, f: float,
                      input_index: int, tests: TestPointSet,
                      loads_cfg: LoadConfig,
                      rx_gain: float = 1.0) -> PatternResult:
    """Pattern of one driven input (0-based) with all loads set by theta."""
    if not 0 <= input_index < loads_cfg.na:
        raise DomainError(f"input_index {input_index} outside [0, {loads_cfg.na})")
    z = assemble_impedance_matrix(geometry, f)
    hc = channel_transimpedance(geometry, tests, f, rx_gain)
    zl = load_diagonal(theta, f, loads_cfg)
    v = build_drive_matrix(geometry.n, loads_cfg.na, loads_cfg.r)[:, input_index]
    i = solve_currents(z, zl, v)
    acct = power_accounting(i, v, z, zl, loads_cfg)
    return pattern_from_samples(hc @ i, tests, acct.p_rad, acct.p_available)


def integrate_pattern_power(geometry: ArrayGeometry, i: np.ndarray, f: float,
                            polar_order: int = 96, azimuth_count: int = 192,
                            radius: float | None = None) -> float:
    """Total radiated power by dense spherical quadrature of U over a far
    sphere (Gauss-Legendre in cos(psi), uniform in azimuth). Cross-validates
    the transimpedance rows against i^H Re{Z} i."""
    lam = C0 / f
    extent = float(np.max(np.linalg.norm(geometry.positions, axis=1))
                   + np.max(geometry.lengths))
    r_sphere = radius if radius is not None else max(1000 * lam, 100 * extent)
    nodes, weights = np.polynomial.legendre.leggauss(polar_order)
    phi = 2 * np.pi * (np.arange(azimuth_count) + 0.5) / azimuth_count
    cos_psi = np.repeat(nodes, azimuth_count)
    sin_psi = np.sqrt(1 - cos_psi ** 2)
    phi_all = np.tile(phi, polar_order)
    pts = r_sphere * np.column_stack([
        sin_psi * np.cos(phi_all), sin_psi * np.sin(phi_all), cos_psi])
    probes = TestPointSet(pts, np.degrees(phi_all), r_sphere)
    y = channel_transimpedance(geometry, probes, f, rx_gain=1.0) @ i
    u = np.abs(y) ** 2 * r_sphere ** 2 / ETA0
    w_all = np.repeat(weights, azimuth_count) * (2 * np.pi / azimuth_count)
    return float(np.sum(w_all * u))


def aperture_baseline_gain(geometry: ArrayGeometry, f: float,
                           direction=(0.0, 0.0, 1.0)) -> float:
    """Conventional-aperture reference 10 log10(4 pi A / lambda^2), with A the
    area of the smallest disc (centered on the centroid) enclosing the
    scatterer feed points projected transverse to `direction`. Diagnostic
    only."""
    u = np.asarray(direction, dtype=float)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise DomainError("direction must be nonzero")
    u = u / norm
    pts = geometry.positions[geometry.na:]
    if pts.shape[0] == 0:
        pts = geometry.positions
    proj = pts - np.outer(pts @ u, u)
    center = proj.mean(axis=0)
    radius = float(np.max(np.linalg.norm(proj - center, axis=1)))
    lam = C0 / f
    area = np.pi * radius ** 2
    if area == 0:
        return float("-inf")
    return float(10 * np.log10(4 * np.pi * area / lam ** 2))


@dataclass(frozen=True)
class NetworkModel:
    """Per-subcarrier physics bundle consumed by synthesis and evaluation."""

    freq: FrequencyGrid
    loads: LoadConfig
    z: tuple          # K matrices, each N x N
    hc: tuple         # K matrices, each T x N
    geometry: ArrayGeometry | None = None
    rx_gain: float = 1.0

    @property
    def n(self) -> int:
        return self.z[0].shape[0]

    @property
    def k_count(self) -> int:
        return len(self.z)


def build_network_model(geometry: ArrayGeometry, tests: TestPointSet,
                        freq: FrequencyGrid, loads_cfg: LoadConfig,
                        rx_gain: float = 1.0) -> NetworkModel:
    z_list = []
    hc_list = []
    for f in freq.frequencies:
        z_list.append(assemble_impedance_matrix(geometry, f))
        hc_list.append(channel_transimpedance(geometry, tests, f, rx_gain))
    return NetworkModel(freq=freq, loads=loads_cfg, z=tuple(z_list),
                        hc=tuple(hc_list), geometry=geometry, rx_gain=rx_gain)
