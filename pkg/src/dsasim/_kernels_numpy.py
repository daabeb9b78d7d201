"""Pure numpy/scipy fallback kernels, interface-identical to `_kernels_numba`.

Si/Ci defer to scipy.special.sici; the impedance assembly is vectorized over
all element pairs. Mutual impedances are even in the vertical offset (the
configuration reflects through z -> -z), so the vector path works with |s|
and only the above-source collinear branch.
"""

import numpy as np
from scipy.special import sici as _sp_sici

from .constants import ETA0, EULER_GAMMA


def sici_array(x):
    si, ci = _sp_sici(np.abs(x))
    return np.sign(x) * si, ci


def _ein(x):
    s, c = _sp_sici(x)
    return c - 1j * s


def _self_vec(h, k):
    x = 2.0 * k * np.asarray(h, dtype=float)
    si1, ci1 = _sp_sici(x)
    si2, ci2 = _sp_sici(2.0 * x)
    lg = EULER_GAMMA + np.log(x)
    r = (ETA0 / (2.0 * np.pi)) * (
        lg - ci1
        + 0.5 * np.sin(x) * (si2 - 2.0 * si1)
        + 0.5 * np.cos(x) * (lg - np.log(2.0) + ci2 - 2.0 * ci1)
    )
    xr = (ETA0 / (4.0 * np.pi)) * (
        2.0 * si1
        + np.cos(x) * (2.0 * si1 - si2)
        - np.sin(x) * (2.0 * ci1 - ci2)
    )
    return r + 1j * xr


def _mutual_noncollinear(d, s, h1, h2, k):
    total = np.zeros(d.shape, np.complex128)
    for ray in range(3):
        if ray == 0:
            z0 = h1
            w = 1.0
        elif ray == 1:
            z0 = -h1
            w = 1.0
        else:
            z0 = np.zeros_like(h1)
            w = -2.0 * np.cos(k * h1)
        ejh = np.exp(1j * k * h2)
        ejc = np.exp(1j * k * (s - z0))
        zeta_a = (s - h2) - z0
        zeta_m = s - z0
        zeta_b = (s + h2) - z0
        ra = np.hypot(d, zeta_a)
        rm = np.hypot(d, zeta_m)
        rb = np.hypot(d, zeta_b)
        pm_up = _ein(k * (rb + zeta_b)) - _ein(k * (rm + zeta_m))
        pp_up = -(_ein(k * (rb - zeta_b)) - _ein(k * (rm - zeta_m)))
        pm_lo = _ein(k * (rm + zeta_m)) - _ein(k * (ra + zeta_a))
        pp_lo = -(_ein(k * (rm - zeta_m)) - _ein(k * (ra - zeta_a)))
        term = (
            ejh * ejc * pm_up
            - np.conj(ejc) / ejh * pp_up
            + ejh / ejc * pp_lo
            - ejc / ejh * pm_lo
        ) / 2j
        total += w * term
    return 1j * ETA0 / (4.0 * np.pi) * total


def _mutual_collinear(s, h1, h2, k):
    s = np.abs(s)  # even in the offset; keeps every segment above the sources
    total = np.zeros(s.shape, np.complex128)
    for ray in range(3):
        if ray == 0:
            z0 = h1
            w = 1.0
        elif ray == 1:
            z0 = -h1
            w = 1.0
        else:
            z0 = np.zeros_like(h1)
            w = -2.0 * np.cos(k * h1)
        ejh = np.exp(1j * k * h2)
        ejc = np.exp(1j * k * (s - z0))
        zeta_a = (s - h2) - z0
        zeta_m = s - z0
        zeta_b = (s + h2) - z0
        pm_up = _ein(2.0 * k * zeta_b) - _ein(2.0 * k * zeta_m)
        pm_lo = _ein(2.0 * k * zeta_m) - _ein(2.0 * k * zeta_a)
        pp_up = np.log(zeta_b / zeta_m).astype(np.complex128)
        pp_lo = np.log(zeta_m / zeta_a).astype(np.complex128)
        term = (
            ejh * ejc * pm_up
            - np.conj(ejc) / ejh * pp_up
            + ejh / ejc * pp_lo
            - ejc / ejh * pm_lo
        ) / 2j
        total += w * term
    return 1j * ETA0 / (4.0 * np.pi) * total


def _mutual_vec(d, s, h1, h2, k):
    d, s, h1, h2 = np.broadcast_arrays(
        np.asarray(d, float), np.asarray(s, float),
        np.asarray(h1, float), np.asarray(h2, float))
    out = np.empty(d.shape, np.complex128)
    col = d == 0.0
    if np.any(~col):
        out[~col] = _mutual_noncollinear(d[~col], s[~col], h1[~col], h2[~col], k)
    if np.any(col):
        out[col] = _mutual_collinear(s[col], h1[col], h2[col], k)
    return out


def self_z_max(h, k):
    return complex(_self_vec(np.atleast_1d(float(h)), k)[0])


def mutual_z_max(d, s, h1, h2, k):
    return complex(_mutual_vec(
        np.atleast_1d(float(d)), np.atleast_1d(float(s)),
        np.atleast_1d(float(h1)), np.atleast_1d(float(h2)), k)[0])


def assemble_z_max(x, y, z, h, k):
    n = x.size
    out = np.empty((n, n), np.complex128)
    np.fill_diagonal(out, _self_vec(h, k))
    if n > 1:
        iu, ju = np.triu_indices(n, 1)
        d = np.hypot(x[iu] - x[ju], y[iu] - y[ju])
        vals = _mutual_vec(d, z[ju] - z[iu], h[iu], h[ju], k)
        out[iu, ju] = vals
        out[ju, iu] = vals
    return out
