"""Element placement and far-field probe sets.

All dipoles are parallel to the z axis. The disk builder lays scatterer rings
in the z = 0 plane (dipoles broadside to the ring plane) so that the standard
probe ring, also in z = 0, never falls on an element's axial null; multi-layer
builds replicate the rings with an in-plane offset along +y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionError, DomainError

ROLE_ACTIVE = "active"
ROLE_SCATTERER = "scatterer"

# two elements on the same vertical line must not have interpenetrating wires
_COLLINEAR_TOL = 1e-9


@dataclass(frozen=True)
class ArrayGeometry:
    """z-parallel dipoles; `positions` are feed points (N, 3) in meters,
    `lengths` the physical dipole lengths, and the first `na` entries are the
    actively driven elements."""

    positions: np.ndarray
    lengths: np.ndarray
    na: int

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        lengths = np.asarray(self.lengths, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise DimensionError("positions must have shape (N, 3)")
        if lengths.shape != (pos.shape[0],):
            raise DimensionError("lengths must have shape (N,)")
        if pos.shape[0] == 0:
            raise DomainError("geometry needs at least one element")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(lengths))):
            raise DomainError("positions and lengths must be finite")
        if np.any(lengths <= 0):
            raise DomainError("lengths must be positive")
        if not 0 <= self.na <= pos.shape[0]:
            raise DomainError(f"na={self.na} outside [0, {pos.shape[0]}]")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "lengths", lengths)
        self._check_collisions()

    def _check_collisions(self):
        pos, lengths = self.positions, self.lengths
        n = pos.shape[0]
        if n < 2:
            return
        iu, ju = np.triu_indices(n, 1)
        d_h = np.hypot(pos[iu, 0] - pos[ju, 0], pos[iu, 1] - pos[ju, 1])
        close = d_h < _COLLINEAR_TOL
        if not np.any(close):
            return
        dz = np.abs(pos[iu, 2] - pos[ju, 2])
        need = (lengths[iu] + lengths[ju]) / 2
        bad = close & (dz <= need + _COLLINEAR_TOL)
        if np.any(bad):
            a, b = int(iu[np.argmax(bad)]), int(ju[np.argmax(bad)])
            raise DomainError(
                f"elements {a} and {b} are coincident or overlap on a common "
                "vertical line")

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def ns(self) -> int:
        return self.n - self.na

    @property
    def half_lengths(self) -> np.ndarray:
        return self.lengths / 2

    def roles(self):
        return [ROLE_ACTIVE] * self.na + [ROLE_SCATTERER] * self.ns

    def to_json_dict(self) -> dict:
        elements = [
            {"x": float(p[0]), "y": float(p[1]), "z": float(p[2]),
             "length": float(length), "role": role}
            for p, length, role in zip(self.positions, self.lengths, self.roles())
        ]
        return {"elements": elements, "Na": self.na, "Ns": self.ns}

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ArrayGeometry":
        try:
            elements = doc["elements"]
            na = int(doc["Na"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"geometry document malformed: {exc}") from exc
        if not elements:
            raise DomainError("geometry document has no elements")
        roles = [e.get("role") for e in elements]
        if roles[:na] != [ROLE_ACTIVE] * na or ROLE_ACTIVE in roles[na:]:
            raise DomainError("active elements must come first and match Na")
        pos = np.array([[e["x"], e["y"], e["z"]] for e in elements], float)
        lengths = np.array([e["length"] for e in elements], float)
        return cls(pos, lengths, na)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ArrayGeometry":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def ring_scatterer_counts(rings: int, ring_step: float, arc_spacing: float,
                          policy: str = "floor") -> list[int]:
    """Elements per ring for radii l*ring_step, l = 1..rings: the number of
    arc_spacing segments that fit the circumference, under the given rounding
    policy."""
    if policy not in ("floor", "round", "ceil"):
        raise DomainError(f"unknown count policy {policy!r}")
    fn = {"floor": np.floor, "round": np.round, "ceil": np.ceil}[policy]
    counts = []
    for layer_ring in range(1, rings + 1):
        circumference = 2 * np.pi * layer_ring * ring_step
        counts.append(int(fn(circumference / arc_spacing)))
    return counts


def build_disk_geometry(rings: int, ring_step: float, arc_spacing: float,
                        element_length: float, layers: int = 1,
                        layer_spacing: float = 0.0, na: int = 1,
                        active_placement: str = "center",
                        count_policy: str = "floor") -> ArrayGeometry:
    """Concentric-ring scatterer disk in the z = 0 plane plus `na` active
    elements at the disk center.

    Ring l holds its count of equally spaced elements at radius l*ring_step
    starting on the +x axis. `layers` > 1 replicates the scatterer rings with
    offsets of layer_spacing along +y. Active placement "center" puts a single
    active at the origin, or `na` of them equally spaced on a circle of radius
    ring_step/2 so they stay clear of ring 1.
    """
    if rings < 1 or layers < 1:
        raise DomainError("rings and layers must be >= 1")
    if ring_step <= 0 or arc_spacing <= 0 or element_length <= 0:
        raise DomainError("ring_step, arc_spacing and element_length must be positive")
    if na < 1:
        raise DomainError("need at least one active element")
    if layers > 1 and layer_spacing <= 0:
        raise DomainError("layer_spacing must be positive when layers > 1")

    counts = ring_scatterer_counts(rings, ring_step, arc_spacing, count_policy)
    if sum(counts) == 0:
        raise DomainError(
            "parameters yield zero scatterers (arc_spacing exceeds the "
            "innermost circumference)")

    if active_placement != "center":
        raise DomainError(f"unknown active placement {active_placement!r}")
    if na == 1:
        active = [(0.0, 0.0, 0.0)]
    else:
        r_a = ring_step / 2
        ang = 2 * np.pi * np.arange(na) / na
        active = [(r_a * np.cos(a), r_a * np.sin(a), 0.0) for a in ang]

    scatter = []
    for layer in range(layers):
        y_off = layer * layer_spacing
        for ring_index, count in enumerate(counts, start=1):
            if count == 0:
                continue
            radius = ring_index * ring_step
            ang = 2 * np.pi * np.arange(count) / count
            scatter.extend(
                (radius * np.cos(a), radius * np.sin(a) + y_off, 0.0) for a in ang)

    pos = np.array(active + scatter, dtype=float)
    lengths = np.full(pos.shape[0], float(element_length))
    return ArrayGeometry(pos, lengths, na)


@dataclass(frozen=True)
class TestPointSet:
    """Far-field probe positions with angle labels for reporting."""

    points: np.ndarray       # (T, 3) meters
    angles_deg: np.ndarray   # (T,) in [0, 360)
    distance: float

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        ang = np.asarray(self.angles_deg, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise DimensionError("points must have shape (T, 3)")
        if ang.shape != (pts.shape[0],):
            raise DimensionError("angles_deg must have shape (T,)")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "angles_deg", ang)

    @property
    def count(self) -> int:
        return self.points.shape[0]

    def nearest_index(self, angle_deg: float) -> int:
        """Index of the probe whose label is circularly nearest the angle."""
        diff = (self.angles_deg - angle_deg + 180.0) % 360.0 - 180.0
        return int(np.argmin(np.abs(diff)))


def ring_test_points(count: int = 108, distance: float = 100.0) -> TestPointSet:
    """Probe ring in the z = 0 plane: p_t = d (cos phi_t, sin phi_t, 0) with
    phi_t = 2 pi t / count for t = 1..count; labels reduced to [0, 360)."""
    if count < 1:
        raise DomainError("count must be >= 1")
    if distance <= 0:
        raise DomainError("distance must be positive")
    t = np.arange(1, count + 1)
    phi = 2 * np.pi * t / count
    pts = distance * np.column_stack([np.cos(phi), np.sin(phi), np.zeros(count)])
    angles = np.degrees(phi) % 360.0
    return TestPointSet(pts, angles, float(distance))
