"""Timing comparison of the numba and numpy kernel backends.

Covers the two hot paths: vectorized Si/Ci evaluation and full pairwise
impedance-matrix assembly at reproduction scale (7 scatterer rings plus 4
active elements, 176 ports). Run with

    python3 benchmarks/bench_kernels.py

Optional flags control sizes and repeat counts; the numba columns include a
separate one-off compilation time so steady-state numbers stay honest.
"""

import argparse
import time

import numpy as np

from dsasim import backend
from dsasim.emcore import wavenumber
from dsasim.geometry import build_disk_geometry


def _time_best(fn, repeats: int) -> float:
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_sici(n_points: int, repeats: int) -> dict[str, float]:
    rng = np.random.default_rng(11)
    x = rng.uniform(1e-3, 60.0, size=n_points)
    results = {}
    for name in ("numba", "numpy"):
        backend.set_backend(name)
        mod = backend.kernels()
        t0 = time.perf_counter()
        mod.sici_array(x[:8])
        results[f"{name}_first_call"] = time.perf_counter() - t0
        results[name] = _time_best(lambda: mod.sici_array(x), repeats)
    backend.set_backend("numba")
    si_nb, ci_nb = backend.kernels().sici_array(x)
    backend.set_backend("numpy")
    si_np, ci_np = backend.kernels().sici_array(x)
    results["max_abs_diff"] = max(
        float(np.max(np.abs(si_nb - si_np))),
        float(np.max(np.abs(ci_nb - ci_np))),
    )
    return results


def bench_assembly(rings: int, repeats: int) -> dict[str, float]:
    lam = 299792458.0 / 2.4e9
    geom = build_disk_geometry(
        rings=rings, ring_step=lam / 4, arc_spacing=lam / 4,
        element_length=lam / 2, na=4)
    k = wavenumber(2.4e9)
    x, y, z = geom.positions.T.copy()
    h = geom.lengths / 2
    results = {"n_ports": float(geom.n)}
    reference = None
    for name in ("numba", "numpy"):
        backend.set_backend(name)
        mod = backend.kernels()
        t0 = time.perf_counter()
        mod.assemble_z_max(x, y, z, h, k)
        results[f"{name}_first_call"] = time.perf_counter() - t0
        results[name] = _time_best(lambda: mod.assemble_z_max(x, y, z, h, k), repeats)
        out = mod.assemble_z_max(x, y, z, h, k)
        if reference is None:
            reference = out
        else:
            results["max_abs_diff"] = float(np.max(np.abs(out - reference)))
    return results


def _report(title: str, res: dict[str, float]) -> None:
    print(f"\n{title}")
    speedup = res["numpy"] / res["numba"]
    for name in ("numba", "numpy"):
        print(f"  {name:6s}  best {res[name] * 1e3:9.3f} ms   "
              f"(first call {res[f'{name}_first_call'] * 1e3:9.3f} ms)")
    print(f"  numba speedup: {speedup:.2f}x   "
          f"max |difference|: {res['max_abs_diff']:.3e}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=1_000_000,
                        help="Si/Ci sample count (default 1e6)")
    parser.add_argument("--rings", type=int, default=7,
                        help="scatterer rings for matrix assembly (default 7)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best-of (default 5)")
    args = parser.parse_args()

    res = bench_sici(args.points, args.repeats)
    _report(f"Si/Ci over {args.points:,} points", res)

    res = bench_assembly(args.rings, args.repeats)
    _report(f"impedance assembly, {int(res['n_ports'])} ports", res)


if __name__ == "__main__":
    main()
