"""Numba-compiled numeric kernels.

Hot paths of the simulator: Si/Ci evaluation and the pairwise impedance
assembly over all element pairs. The module mirrors `_kernels_numpy` exactly;
`backend` picks one of the two at runtime.

Si and Ci come from scipy's compiled implementation, bound by address via
scipy.special.cython_special so it stays callable inside nopython code. The
address is only valid for the current process, so on-disk caching must stay
off for every jitted function here (the pointer would be baked into the
cache).

Impedances returned here are referenced to the current maximum of the assumed
sinusoidal distribution; feed-point referencing (division by sin(k h) factors)
happens in `emcore`, identically for both backends.
"""

import ctypes

import numpy as np
from numba import njit
from numba.extending import get_cython_function_address

from .constants import ETA0, EULER_GAMMA


def _bind_sici():
    """ctypes handle on the double-precision sici export, signature
    void (double, double*, double*)."""
    last_error = None
    for symbol in ("__pyx_fuse_1sici", "sici"):
        try:
            address = get_cython_function_address(
                "scipy.special.cython_special", symbol)
        except (ImportError, ValueError, KeyError) as exc:
            last_error = exc
            continue
        prototype = ctypes.CFUNCTYPE(
            None, ctypes.c_double, ctypes.c_void_p, ctypes.c_void_p)
        return prototype(address)
    raise ImportError(
        f"scipy.special.cython_special exposes no usable sici: {last_error}")


_csici = _bind_sici()


@njit(cache=False)
def _sici_scalar(x):
    """Si(x) and Ci(|x|)."""
    buf = np.empty(2)
    _csici(abs(x), buf.ctypes.data, buf.ctypes.data + 8)
    if x < 0.0:
        return -buf[0], buf[1]
    return buf[0], buf[1]


@njit(cache=False)
def sici_array(x):
    n = x.size
    si = np.empty(n)
    ci = np.empty(n)
    buf = np.empty(2)
    p_si = buf.ctypes.data
    p_ci = p_si + 8
    for i in range(n):
        _csici(abs(x[i]), p_si, p_ci)
        si[i] = -buf[0] if x[i] < 0.0 else buf[0]
        ci[i] = buf[1]
    return si, ci


@njit(cache=False)
def _ein(x, buf):
    """E(x) = Ci(x) - j Si(x), the exponential-integral primitive (x > 0);
    buf is a caller-owned 2-double scratch so tight loops skip allocation."""
    _csici(x, buf.ctypes.data, buf.ctypes.data + 8)
    return complex(buf[1], -buf[0])


@njit(cache=False)
def self_z_max(h, k):
    """Radius-free induced-EMF self impedance of a dipole of half-length h."""
    x = 2.0 * k * h
    si1, ci1 = _sici_scalar(x)
    si2, ci2 = _sici_scalar(2.0 * x)
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
    return complex(r, xr)


@njit(cache=False)
def mutual_z_max(d, s, h1, h2, k):
    """Induced-EMF mutual impedance of two z-parallel dipoles.

    d: horizontal separation, s: vertical feed offset (z2 - z1), h1/h2 the
    half-lengths. Three-ray field of dipole 1 integrated against the current
    of dipole 2, reduced to exponential-integral primitives evaluated at the
    segment endpoints. d == 0 takes the collinear branch and assumes the
    segments do not overlap (caller validates).
    """
    buf = np.empty(2)
    total = 0.0 + 0.0j
    for ray in range(3):
        if ray == 0:
            z0 = h1
            w = 1.0
        elif ray == 1:
            z0 = -h1
            w = 1.0
        else:
            z0 = 0.0
            w = -2.0 * np.cos(k * h1)
        c_off = s - z0
        ejh = complex(np.cos(k * h2), np.sin(k * h2))
        ejc = complex(np.cos(k * c_off), np.sin(k * c_off))
        za = s - h2
        zm = s
        zb = s + h2
        if d > 0.0:
            ra = np.hypot(d, za - z0)
            rm = np.hypot(d, zm - z0)
            rb = np.hypot(d, zb - z0)
            pm_up = _ein(k * (rb + (zb - z0)), buf) - _ein(k * (rm + (zm - z0)), buf)
            pp_up = -(_ein(k * (rb - (zb - z0)), buf) - _ein(k * (rm - (zm - z0)), buf))
            pm_lo = _ein(k * (rm + (zm - z0)), buf) - _ein(k * (ra + (za - z0)), buf)
            pp_lo = -(_ein(k * (rm - (zm - z0)), buf) - _ein(k * (ra - (za - z0)), buf))
        elif za - z0 > 0.0:
            # collinear, segment entirely above the ray source: u = 2*zeta,
            # v = 0, and the v-primitive degenerates to a logarithm
            pm_up = _ein(2.0 * k * (zb - z0), buf) - _ein(2.0 * k * (zm - z0), buf)
            pm_lo = _ein(2.0 * k * (zm - z0), buf) - _ein(2.0 * k * (za - z0), buf)
            pp_up = complex(np.log((zb - z0) / (zm - z0)), 0.0)
            pp_lo = complex(np.log((zm - z0) / (za - z0)), 0.0)
        else:
            # collinear, segment entirely below the ray source
            pm_up = complex(-(np.log(z0 - zb) - np.log(z0 - zm)), 0.0)
            pm_lo = complex(-(np.log(z0 - zm) - np.log(z0 - za)), 0.0)
            pp_up = -(_ein(2.0 * k * (z0 - zb), buf) - _ein(2.0 * k * (z0 - zm), buf))
            pp_lo = -(_ein(2.0 * k * (z0 - zm), buf) - _ein(2.0 * k * (z0 - za), buf))
        term = (
            ejh * ejc * pm_up
            - np.conj(ejc) / ejh * pp_up
            + ejh / ejc * pp_lo
            - ejc / ejh * pm_lo
        ) / 2j
        total += w * term
    return 1j * ETA0 / (4.0 * np.pi) * total


@njit(cache=False)
def assemble_z_max(x, y, z, h, k):
    """Dense symmetric impedance matrix, current-max referenced."""
    n = x.size
    out = np.empty((n, n), np.complex128)
    for i in range(n):
        out[i, i] = self_z_max(h[i], k)
        for j in range(i + 1, n):
            d = np.hypot(x[i] - x[j], y[i] - y[j])
            zm = mutual_z_max(d, z[j] - z[i], h[i], h[j], k)
            out[i, j] = zm
            out[j, i] = zm
    return out
