"""Element placement, probe rings, and geometry serialization."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dsasim.exceptions import DimensionError, DomainError
from dsasim.geometry import (ArrayGeometry, build_disk_geometry,
                             ring_scatterer_counts, ring_test_points)
from dsasim.geometry import TestPointSet as PointSet

from conftest import LAM0


def test_ring_counts_quarter_wave():
    """floor(2 pi l r / s) with r = s gives floor(2 pi l) per ring."""
    counts = ring_scatterer_counts(7, LAM0 / 4, LAM0 / 4)
    assert counts == [6, 12, 18, 25, 31, 37, 43]
    assert sum(counts) == 172


def test_ring_counts_policies():
    assert ring_scatterer_counts(1, 1.0, 1.0, "floor") == [6]
    assert ring_scatterer_counts(1, 1.0, 1.0, "round") == [6]
    assert ring_scatterer_counts(1, 1.0, 1.0, "ceil") == [7]
    with pytest.raises(DomainError):
        ring_scatterer_counts(1, 1.0, 1.0, "trunc")


def test_disk_build_full_size():
    geom = build_disk_geometry(7, LAM0 / 4, LAM0 / 4, LAM0 / 2, na=1)
    assert geom.n == 173
    assert geom.na == 1
    assert geom.ns == 172
    assert_allclose(geom.positions[0], [0.0, 0.0, 0.0])
    # ring 1 starts on the +x axis at one ring step
    assert_allclose(geom.positions[1], [LAM0 / 4, 0.0, 0.0], atol=1e-15)
    assert_allclose(geom.lengths, LAM0 / 2)
    # all elements in the z = 0 plane
    assert_allclose(geom.positions[:, 2], 0.0)


def test_disk_build_ring_radii():
    geom = build_disk_geometry(3, 0.1, 0.1, 0.05, na=1)
    radii = np.linalg.norm(geom.positions[1:, :2], axis=1)
    assert_allclose(np.unique(np.round(radii, 12)), [0.1, 0.2, 0.3])


def test_disk_build_multiple_actives_on_inner_circle():
    geom = build_disk_geometry(2, 0.1, 0.1, 0.05, na=4)
    assert geom.na == 4
    r_active = np.linalg.norm(geom.positions[:4, :2], axis=1)
    assert_allclose(r_active, 0.05)
    angles = np.degrees(np.arctan2(geom.positions[:4, 1], geom.positions[:4, 0]))
    assert_allclose(np.sort(angles % 360), [0, 90, 180, 270], atol=1e-12)


def test_disk_build_layers_offset_along_y():
    one = build_disk_geometry(2, 0.1, 0.1, 0.05, na=1)
    two = build_disk_geometry(2, 0.1, 0.1, 0.05, layers=2, layer_spacing=1.0, na=1)
    assert two.ns == 2 * one.ns
    layer2 = two.positions[1 + one.ns:]
    assert_allclose(layer2[:, 1] - one.positions[1:, 1], 1.0)
    assert_allclose(layer2[:, 0], one.positions[1:, 0])


@pytest.mark.parametrize("kwargs", [
    dict(rings=0, ring_step=0.1, arc_spacing=0.1, element_length=0.05),
    dict(rings=1, ring_step=-0.1, arc_spacing=0.1, element_length=0.05),
    dict(rings=1, ring_step=0.1, arc_spacing=0.1, element_length=0.05, na=0),
    dict(rings=1, ring_step=0.1, arc_spacing=0.1, element_length=0.05,
         layers=2, layer_spacing=0.0),
    # arc spacing wider than the innermost circumference leaves no scatterers
    dict(rings=1, ring_step=0.01, arc_spacing=1.0, element_length=0.05),
])
def test_disk_build_rejects(kwargs):
    with pytest.raises(DomainError):
        build_disk_geometry(**kwargs)


def test_geometry_validation():
    with pytest.raises(DimensionError):
        ArrayGeometry(np.zeros((2, 2)), np.ones(2), 1)
    with pytest.raises(DimensionError):
        ArrayGeometry(np.zeros((2, 3)), np.ones(3), 1)
    with pytest.raises(DomainError):
        ArrayGeometry(np.zeros((0, 3)), np.ones(0), 0)
    with pytest.raises(DomainError):
        ArrayGeometry(np.array([[0.0, 0.0, np.nan]]), np.ones(1), 1)
    with pytest.raises(DomainError):
        ArrayGeometry(np.zeros((1, 3)), np.array([-0.5]), 1)
    with pytest.raises(DomainError):
        ArrayGeometry(np.zeros((1, 3)), np.ones(1), 2)


def test_collision_same_axis():
    pos = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.4]])
    with pytest.raises(DomainError):
        ArrayGeometry(pos, np.array([0.5, 0.5]), 1)
    # clear of each other along z is fine
    pos2 = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.51]])
    geom = ArrayGeometry(pos2, np.array([0.5, 0.5]), 1)
    assert geom.n == 2


def test_collision_coincident_points():
    pos = np.zeros((2, 3))
    with pytest.raises(DomainError):
        ArrayGeometry(pos, np.array([0.5, 0.5]), 1)


def test_json_round_trip(tmp_path):
    geom = build_disk_geometry(2, 0.1, 0.1, 0.05, na=2)
    doc = geom.to_json_dict()
    assert doc["Na"] == 2
    assert doc["Ns"] == geom.ns
    assert len(doc["elements"]) == geom.n
    assert doc["elements"][0]["role"] == "active"
    assert doc["elements"][-1]["role"] == "scatterer"

    back = ArrayGeometry.from_json_dict(doc)
    assert_allclose(back.positions, geom.positions)
    assert_allclose(back.lengths, geom.lengths)
    assert back.na == geom.na

    path = tmp_path / "geom.json"
    geom.save(path)
    loaded = ArrayGeometry.load(path)
    assert_allclose(loaded.positions, geom.positions)


def test_json_role_order_enforced():
    geom = build_disk_geometry(1, 0.1, 0.1, 0.05, na=1)
    doc = geom.to_json_dict()
    doc["elements"][0]["role"] = "scatterer"
    with pytest.raises(DomainError):
        ArrayGeometry.from_json_dict(doc)
    with pytest.raises(DomainError):
        ArrayGeometry.from_json_dict({"elements": [], "Na": 0})


def test_ring_test_points_labels():
    tests = ring_test_points(108, 100.0)
    assert tests.count == 108
    assert_allclose(np.linalg.norm(tests.points, axis=1), 100.0)
    assert_allclose(tests.points[:, 2], 0.0)
    # quarter turns land exactly on labeled angles; full turn wraps to 0
    assert_allclose(tests.angles_deg[26], 90.0, atol=1e-12)
    assert_allclose(tests.angles_deg[53], 180.0, atol=1e-12)
    assert_allclose(tests.angles_deg[80], 270.0, atol=1e-12)
    assert_allclose(tests.angles_deg[107], 0.0, atol=1e-12)


def test_nearest_index_is_circular():
    tests = ring_test_points(108, 100.0)
    assert tests.nearest_index(90.0) == 26
    assert tests.nearest_index(180.0) == 53
    assert tests.nearest_index(0.0) == 107
    assert tests.nearest_index(359.5) == 107
    assert tests.nearest_index(1.0) == 107
    assert tests.nearest_index(2.0) == 0


def test_ring_test_points_rejects():
    with pytest.raises(DomainError):
        ring_test_points(0, 100.0)
    with pytest.raises(DomainError):
        ring_test_points(8, 0.0)


def test_test_point_set_validation():
    with pytest.raises(DimensionError):
        PointSet(np.zeros((4, 2)), np.zeros(4), 1.0)
    with pytest.raises(DimensionError):
        PointSet(np.zeros((4, 3)), np.zeros(3), 1.0)
