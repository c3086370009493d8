# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


import math
import pickle

import numpy as np
import pytest

from activeverify.exception import ConfigError, DimensionMismatchError, SimulationError, StlEvaluationError
from activeverify.grid import ParamGrid
from activeverify.sim import (
    AUTOPILOT,
    AUTOPILOT4D,
    BENCHMARK_NAMES,
    MRAC2D,
    MRAC3D,
    MracPlant,
    SimConfig,
    calibrate_continuity_bound,
    get_system,
    measure,
    measure_many,
    reference_command,
    rk4,
    satisfied_steps,
    simulate,
    wrap_angle,
)
from activeverify.stl import parse_formula, resolve_formula


BOUND = parse_formula('G[0,40](1 - abs(e1 - 0) >= 0)')


class TestSimConfig:

    def test_steps(self):
        config = SimConfig(40.0, 0.01)
        assert config.steps == 4000
        assert SimConfig(1.0, 0.1).steps == 10

    @pytest.mark.parametrize('t_final, dt', [(1.0, 0.0), (1.0, 2.0), (1.0, 0.3), (-1.0, 0.1)])
    def test_invalid(self, t_final, dt):
        with pytest.raises(ValueError):
            SimConfig(t_final, dt)

    def test_constants_and_replace(self):
        config = SimConfig(10.0, 0.01, {'gain': 2.0})
        assert config['gain'] == 2.0
        with pytest.raises(KeyError):
            config['missing']
        changed = config.replace(dt=0.005, gain=3.0)
        assert changed.dt == 0.005 and changed['gain'] == 3.0
        assert config['gain'] == 2.0
        assert config == SimConfig(10.0, 0.01, {'gain': 2.0})
        assert config != changed

    def test_pickle(self):
        config = MRAC2D.default_config
        again = pickle.loads(pickle.dumps(config))
        assert again == config
        assert hash(again) == hash(config)


class TestRegistry:

    def test_names(self):
        assert set(BENCHMARK_NAMES) == {'mrac2d', 'mrac3d', 'autopilot', 'autopilot4d'}
        assert get_system('mrac3d') is MRAC3D

    def test_unknown(self):
        with pytest.raises(ConfigError):
            get_system('pendulum')

    @pytest.mark.parametrize('spec', [MRAC2D, MRAC3D, AUTOPILOT, AUTOPILOT4D])
    def test_boxes(self, spec):
        assert spec.param_dim == len(spec.default_resolution)
        assert np.all(spec.lower < spec.upper)
        assert spec.contains(spec.lower) and spec.contains(spec.upper)
        assert not spec.contains(spec.upper + 1.0)


class TestMrac:

    def test_zero_uncertainty_tracks_reference_exactly(self):
        trace = simulate(MRAC2D, [0.0, 0.0])
        assert np.max(np.abs(trace['e1'])) <= 1e-6
        np.testing.assert_array_equal(trace['theta_hat1'], 0.0)
        result = measure(MRAC2D, BOUND, [0.0, 0.0])
        assert result.satisfied
        assert result.value == pytest.approx(1.0, abs=1e-6)

    def test_deterministic(self):
        first = simulate(MRAC2D, [3.5, -2.0])
        second = simulate(MRAC2D, [3.5, -2.0])
        for name in first.names:
            np.testing.assert_array_equal(first[name], second[name])

    def test_step_halving(self):
        coarse = simulate(MRAC2D, [1.0, -0.5])
        fine = simulate(MRAC2D, [1.0, -0.5], MRAC2D.default_config.replace(dt=0.005))
        np.testing.assert_allclose(fine.times[::2], coarse.times, atol=1e-12)
        for name in ('x1', 'x2', 'e1', 'theta_hat1', 'theta_hat2'):
            scale = max(1.0, float(np.max(np.abs(coarse[name]))))
            assert np.max(np.abs(fine[name][::2] - coarse[name])) <= 1e-4 * scale

    def test_trace_layout(self):
        trace = simulate(MRAC2D, [-4.0, 4.0])
        assert trace.final_time == pytest.approx(40.0)
        assert trace.times.size == 4001
        assert set(trace.names) == set(MRAC2D.channels)
        np.testing.assert_allclose(trace['e1'], trace['xm1'] - trace['x1'])

    def test_reference_command(self):
        levels = (1.0, 1.4, -1.4, 0.0)
        assert reference_command(0.0, levels, 10.0) == 1.0
        assert reference_command(9.99, levels, 10.0) == 1.0
        assert reference_command(10.0, levels, 10.0) == 1.4
        assert reference_command(35.0, levels, 10.0) == 0.0
        assert reference_command(41.0, levels, 10.0) == 1.0

    def test_history_stack_is_bounded(self):
        config = MRAC2D.default_config
        plant = MracPlant(np.array([2.0, 1.0]), config)
        rk4(plant, config)
        stack = plant.stack
        assert 0 < len(stack) <= config['stack_size']
        for point, delta in stack:
            assert delta == pytest.approx(2.0 * point[0] + 1.0 * point[1])

    def test_initial_offset(self):
        trace = simulate(MRAC3D, [0.0, 0.0, 0.8])
        assert trace['x1'][0] == 0.8
        assert trace['e1'][0] == pytest.approx(-0.8)
        assert measure(MRAC3D, BOUND, [0.0, 0.0, 0.8]).value <= 0.2 + 1e-12

    def test_measure_matches_direct_composition(self):
        for theta in ([0.0, 0.0], [-5.0, 5.0], [7.5, -2.5]):
            trace = simulate(MRAC2D, theta)
            expected = 1.0 - float(np.max(np.abs(trace['e1'])))
            assert measure(MRAC2D, BOUND, theta).value == pytest.approx(expected, abs=1e-12)

    def test_errors(self):
        with pytest.raises(DimensionMismatchError):
            simulate(MRAC2D, [0.0, 0.0, 0.0])
        with pytest.raises(ValueError):
            simulate(MRAC2D, [11.0, 0.0])
        with pytest.raises(StlEvaluationError):
            measure(MRAC2D, parse_formula('G[0,1](altitude >= 0)'), [0.0, 0.0])

    def test_divergence_reported(self):
        config = MRAC2D.default_config.replace(gamma=1e30, gamma_c=1e30)
        with pytest.raises(SimulationError) as info:
            simulate(MRAC2D, [10.0, 10.0], config)
        assert info.value.time is not None and info.value.time > 0
        again = pickle.loads(pickle.dumps(info.value))
        assert again.time == info.value.time

    def test_measure_many_in_order(self):
        thetas = [[0.0, 0.0], [-8.0, 6.0]]
        values = measure_many(MRAC2D, BOUND, thetas)
        assert values.tolist() == [measure(MRAC2D, BOUND, t).value for t in thetas]

    @pytest.mark.slow
    def test_parallel_matches_serial(self):
        thetas = [[0.0, 0.0], [-8.0, 6.0], [4.0, 4.0], [9.0, -9.0]]
        np.testing.assert_array_equal(
            measure_many(MRAC2D, BOUND, thetas, jobs=2), measure_many(MRAC2D, BOUND, thetas)
        )

    @pytest.mark.slow
    def test_sub_grid_recomposition(self):
        grid = ParamGrid.from_box(MRAC2D.lower, MRAC2D.upper, 11)
        values = measure_many(MRAC2D, BOUND, grid.points)
        for theta, value in zip(grid.points, values):
            trace = simulate(MRAC2D, theta)
            assert value == pytest.approx(1.0 - float(np.max(np.abs(trace['xm1'] - trace['x1']))), abs=1e-12)

    @pytest.mark.slow
    def test_both_classes_and_continuity(self):
        grid = ParamGrid.from_box(MRAC2D.lower, MRAC2D.upper, MRAC2D.default_resolution)
        values = measure_many(MRAC2D, BOUND, grid.points).reshape(grid.shape)
        assert np.any(values > 0) and np.any(values <= 0)
        steps = satisfied_steps(values)
        assert steps.size > 0
        assert np.all(steps <= MRAC2D.continuity_bound)

    @pytest.mark.slow
    def test_calibrated_bound(self):
        bound = calibrate_continuity_bound(MRAC2D, BOUND, jobs=2)
        assert 0.0 < bound < MRAC2D.continuity_bound
        assert MRAC3D.continuity_bound == MRAC2D.continuity_bound


class TestContinuity:

    def test_ignores_boundary_crossings(self):
        values = np.array([[0.5, 0.4, -30.0], [0.45, 0.35, -80.0]])
        np.testing.assert_allclose(np.sort(satisfied_steps(values)), [0.05, 0.05, 0.1, 0.1])

    def test_flags_a_spike(self):
        grid = ParamGrid.from_box([-1.0, -1.0], [1.0, 1.0], 11)
        values = (1.0 - np.sum(grid.points ** 2, axis=1) / 4.0).reshape(grid.shape)
        assert satisfied_steps(values).max() < 0.2
        values[5, 5] += 0.5
        assert satisfied_steps(values).max() >= 0.5

    def test_no_satisfied_pairs(self):
        assert satisfied_steps(np.array([[1.0, -1.0], [-1.0, 1.0]])).size == 0

    def test_calibrate_on_coarse_grid(self):
        bound = calibrate_continuity_bound(MRAC2D, BOUND, resolution=3)
        assert 0.0 <= bound <= MRAC2D.continuity_bound


class TestAutopilot:

    def test_wrap_angle(self):
        assert wrap_angle(0.0) == 0.0
        assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
        assert wrap_angle(-3 * math.pi / 2) == pytest.approx(math.pi / 2)
        assert -math.pi <= wrap_angle(math.pi) < math.pi

    def test_trace(self):
        trace = simulate(AUTOPILOT, [20.0, 10.0, 100.0])
        assert trace.final_time == pytest.approx(50.0)
        assert trace['x'][0] == 0.0
        assert trace['phi'][0] == pytest.approx(20.0)
        assert trace['psi'][0] == pytest.approx(100.0)
        for name in AUTOPILOT.channels:
            assert np.all(np.isfinite(trace[name]))

    def test_surfaces_saturate(self):
        config = AUTOPILOT.default_config
        trace = simulate(AUTOPILOT, [-60.0, 19.0, 145.0])
        assert np.max(np.abs(trace['delta_a'])) <= config['aileron_limit'] + 1e-12
        assert np.max(np.abs(trace['delta_e'])) <= config['elevator_limit'] + 1e-12
        assert np.max(np.abs(trace['delta_r'])) <= config['rudder_limit'] + 1e-12

    def test_nominal_inertia_matches_three_parameter_model(self):
        _, formula = resolve_formula('autopilot_height')
        nominal = AUTOPILOT.default_config['nominal_inertia']
        three = measure(AUTOPILOT, formula, [10.0, 8.0, 90.0])
        four = measure(AUTOPILOT4D, formula, [10.0, 8.0, 90.0, nominal])
        assert four.value == three.value

    def test_deterministic(self):
        _, formula = resolve_formula('autopilot_height')
        theta = [-30.0, 15.0, 130.0, 6000.0]
        assert measure(AUTOPILOT4D, formula, theta) == measure(AUTOPILOT4D, formula, theta)
