"""Steering targets, objective/gradient consistency, and the descent loop."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from dsasim.emcore import FrequencyGrid
from dsasim.exceptions import (ConfigError, DimensionError, DomainError)
from dsasim.geometry import ring_test_points
from dsasim.network import build_drive_matrix, build_network_model
from dsasim.reporting import DesignReport
from dsasim.synth import (OptimizerConfig, build_steering_targets,
                          evaluate_design, objective, objective_and_gradient,
                          objective_gradient, synthesize)

from conftest import F0, scenario_loads, small_random_geometry


def test_targets_one_hot_placement():
    tests = ring_test_points(108, 100.0)
    target = build_steering_targets(
        tests, [(1, 1, 180.0), (2, 1, 270.0), (1, 2, 210.0)])
    assert target.k_count == 2
    h1, h2 = target.h_opt
    assert h1.shape == (108, 2) and h2.shape == (108, 2)
    assert h1[tests.nearest_index(180.0), 0] == 1.0
    assert h1[tests.nearest_index(270.0), 1] == 1.0
    assert h2[tests.nearest_index(210.0), 0] == 1.0
    assert h1.sum() == 2.0 and h2.sum() == 1.0
    assert target.angle_for(1, 1) == 180.0
    assert target.angle_for(2, 2) is None
    assert not target.is_zero()


def test_targets_dimension_inference_and_overrides():
    tests = ring_test_points(36, 50.0)
    inferred = build_steering_targets(tests, [(3, 2, 90.0)])
    assert len(inferred.h_opt) == 2
    assert inferred.h_opt[0].shape == (36, 3)
    padded = build_steering_targets(tests, [(1, 1, 90.0)], na=4, k_count=3)
    assert len(padded.h_opt) == 3
    assert padded.h_opt[0].shape == (36, 4)
    empty = build_steering_targets(tests, [], na=2, k_count=2)
    assert empty.is_zero()


def test_targets_reject_bad_assignments():
    tests = ring_test_points(36, 50.0)
    with pytest.raises(ConfigError):
        build_steering_targets(tests, [])
    with pytest.raises(ConfigError):
        build_steering_targets(tests, [(1, 1, 0.0), (1, 1, 90.0)])
    with pytest.raises(ConfigError):
        build_steering_targets(tests, [(0, 1, 0.0)], na=2, k_count=1)
    with pytest.raises(ConfigError):
        build_steering_targets(tests, [(1, 3, 0.0)], na=1, k_count=2)
    with pytest.raises(ConfigError):
        build_steering_targets(tests, [(1, 1, np.inf)])


def test_objective_positive_and_dims(toy_scene):
    model, v, target = toy_scene
    theta = np.zeros(model.n)
    f = objective(theta, model, v, target)
    assert f > 0
    with pytest.raises(DimensionError):
        objective(np.zeros(model.n + 1), model, v, target)
    with pytest.raises(DomainError):
        objective(np.full(model.n, np.nan), model, v, target)


def test_free_scale_beats_fixed(toy_scene):
    model, v, target = toy_scene
    theta = np.linspace(-1, 1, model.n)
    assert objective(theta, model, v, target) <= \
        objective(theta, model, v, target, fixed_alpha=1.0) + 1e-12


def test_gradient_matches_finite_differences(toy_scene):
    model, v, target = toy_scene
    rng = np.random.default_rng(42)
    h = 1e-6
    worst = 0.0
    for _ in range(5):
        theta = rng.uniform(-2, 2, model.n)
        f0, grad = objective_and_gradient(theta, model, v, target)
        assert f0 == pytest.approx(objective(theta, model, v, target))
        fd = np.zeros(model.n)
        for n in range(model.n):
            e = np.zeros(model.n)
            e[n] = h
            fd[n] = (objective(theta + e, model, v, target)
                     - objective(theta - e, model, v, target)) / (2 * h)
        worst = max(worst, float(np.max(np.abs(grad - fd))
                                 / np.max(np.abs(fd))))
    assert worst < 1e-5


def test_gradient_wrapper(toy_scene):
    model, v, target = toy_scene
    theta = np.full(model.n, 0.3)
    g = objective_gradient(theta, model, v, target)
    _, g2 = objective_and_gradient(theta, model, v, target)
    assert_allclose(g, g2, rtol=0, atol=0)


def test_optimizer_config_validation():
    with pytest.raises(DomainError):
        OptimizerConfig(max_iterations=-1)
    with pytest.raises(DomainError):
        OptimizerConfig(gradient_tolerance=0.0)
    with pytest.raises(DomainError):
        OptimizerConfig(memory=0)
    with pytest.raises(DomainError):
        OptimizerConfig(init_policy="ones")
    with pytest.raises(DomainError):
        OptimizerConfig(armijo_c1=1.0)
    with pytest.raises(DomainError):
        OptimizerConfig(fixed_alpha=0.0)
    # zero iterations is a legal probe of the initial point
    assert OptimizerConfig(max_iterations=0).max_iterations == 0


def test_synthesis_descends_and_is_deterministic(toy_scene):
    model, v, target = toy_scene
    cfg = OptimizerConfig(max_iterations=50, seed=3)
    theta1, trace1 = synthesize(model, v, target, cfg)
    theta2, trace2 = synthesize(model, v, target, cfg)
    assert_allclose(theta1, theta2, rtol=0, atol=0)
    assert_allclose(trace1.objective, trace2.objective, rtol=0, atol=0)

    assert trace1.iterations[0] == 0
    assert np.all(np.diff(trace1.objective) <= 0)
    assert trace1.final_objective < 0.9 * trace1.initial_objective
    assert trace1.n_evaluations >= len(trace1.iterations)
    # returned point reproduces the reported best objective
    assert objective(theta1, model, v, target) == pytest.approx(
        trace1.final_objective, rel=1e-12)


def test_synthesis_with_fixed_alpha(toy_scene):
    model, v, target = toy_scene
    cfg = OptimizerConfig(max_iterations=50, seed=3, fixed_alpha=0.5)
    theta, trace = synthesize(model, v, target, cfg)
    assert trace.final_objective < trace.initial_objective
    assert objective(theta, model, v, target, fixed_alpha=0.5) == \
        pytest.approx(trace.final_objective, rel=1e-12)


def test_synthesis_seed_changes_start(toy_scene):
    model, v, target = toy_scene
    a, _ = synthesize(model, v, target, OptimizerConfig(max_iterations=2, seed=0))
    b, _ = synthesize(model, v, target, OptimizerConfig(max_iterations=2, seed=1))
    assert not np.allclose(a, b)


def test_synthesis_zero_iterations(toy_scene):
    model, v, target = toy_scene
    theta, trace = synthesize(model, v, target,
                              OptimizerConfig(max_iterations=0, seed=5))
    assert len(trace.iterations) == 1
    assert trace.final_objective == trace.initial_objective
    assert theta.shape == (model.n,)


def test_synthesis_rejects_zero_target(toy_scene):
    model, v, _ = toy_scene
    tests = ring_test_points(8, 50.0)
    empty = build_steering_targets(tests, [], na=2, k_count=2)
    with pytest.raises(DomainError):
        synthesize(model, v, empty)


def test_evaluate_design_report(toy_scene):
    model, v, target = toy_scene
    tests = ring_test_points(8, 50.0)
    theta, _ = synthesize(model, v, target, OptimizerConfig(max_iterations=30,
                                                            seed=1))
    report = evaluate_design(theta, model, v, target, tests,
                             config_fingerprint="ab12")
    assert isinstance(report, DesignReport)
    assert len(report.entries) == 4
    assert report.na == 2 and report.k_count == 2
    assert report.config_fingerprint == "ab12"
    keys = [(e.input, e.subcarrier) for e in report.entries]
    assert keys == [(1, 1), (1, 2), (2, 1), (2, 2)]
    for e in report.entries:
        assert 0.0 <= e.eta2 <= e.eta1 <= 1.0 + 1e-9
        assert e.p_rad_w > 0
        assert (e.input, e.subcarrier) in report.patterns
    assert report.entries[0].target_angle_deg == 90.0
    assert report.entries[3].target_angle_deg == 270.0
    assert report.entries[1].target_angle_deg is None
    assert report.aperture_baseline_db is not None


def test_evaluate_design_lossless_eta1(toy_scene):
    model, v, target = toy_scene
    theta = np.zeros(model.n)
    tests = ring_test_points(8, 50.0)
    plain = evaluate_design(theta, model, v, target, tests)
    resim = evaluate_design(theta, model, v, target, tests,
                            eta1_resimulate=True)
    for a, b in zip(plain.entries, resim.entries):
        assert a.eta2 == pytest.approx(b.eta2)
        assert b.eta1 >= b.eta2


def test_synthesis_beats_random_loads(toy_scene):
    """Best-of-seeds descent should dominate a batch of random settings.
    A single seed can stall in a worse local minimum on this landscape."""
    model, v, target = toy_scene
    best = min(synthesize(model, v, target,
                          OptimizerConfig(max_iterations=60, seed=s)
                          )[1].final_objective for s in (0, 1, 2))
    rng = np.random.default_rng(0)
    random_best = min(objective(rng.uniform(-3, 3, model.n), model, v, target)
                      for _ in range(20))
    assert best < random_best


def test_multi_frequency_uses_all_subcarriers():
    """Zeroing one subcarrier's target halves the toy objective layout; the
    objective must see both grids."""
    rng = np.random.default_rng(13)
    geom = small_random_geometry(rng, 5, 1)
    tests = ring_test_points(12, 60.0)
    freq = FrequencyGrid(F0, 80e6, 2)
    loads = scenario_loads(1)
    model = build_network_model(geom, tests, freq, loads)
    v = build_drive_matrix(5, 1, loads.r)
    both = build_steering_targets(tests, [(1, 1, 90.0), (1, 2, 180.0)])
    only_first = build_steering_targets(tests, [(1, 1, 90.0)], na=1, k_count=2)
    theta = np.zeros(5)
    f_both = objective(theta, model, v, both)
    f_first = objective(theta, model, v, only_first)
    assert f_both > f_first
