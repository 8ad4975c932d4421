from __future__ import annotations

import math

import numpy as np
import pytest

from citykit.placement import NonFiniteObjectiveError, powell_minimize


def rosenbrock(v: np.ndarray) -> float:
    x, y = v
    return (1.0 - x) ** 2 + 100.0 * (y - x * x) ** 2


class TestPowell:
    def test_separable_quadratic(self):
        result = powell_minimize(lambda v: (v[0] - 1.0) ** 2 + v[1] ** 2, [2.0, 0.5], xtol=1e-8)
        assert np.allclose(result.x, [1.0, 0.0], atol=1e-6)
        assert result.fval < 1e-10

    def test_start_at_minimum_returns_quickly(self):
        result = powell_minimize(lambda v: (v[0] - 1.0) ** 2, [1.0])
        assert result.iterations <= 1
        assert result.x[0] == pytest.approx(1.0, abs=1e-6)
        assert result.fval == 0.0

    def test_rosenbrock_below_1e8(self):
        result = powell_minimize(rosenbrock, [-1.2, 1.0], ftol=1e-12, xtol=1e-6, max_iters=500)
        assert result.fval < 1e-8
        assert np.allclose(result.x, [1.0, 1.0], atol=1e-3)

    def test_rosenbrock_matches_grid_refinement_oracle(self):
        # independent optimum estimate: dense grid + two refinements
        lo = np.array([-2.0, -2.0])
        hi = np.array([2.0, 3.0])
        best = None
        for _ in range(3):
            xs = np.linspace(lo[0], hi[0], 81)
            ys = np.linspace(lo[1], hi[1], 81)
            vals = [(rosenbrock(np.array([x, y])), x, y) for x in xs for y in ys]
            _, bx, by = min(vals)
            span = (hi - lo) / 8
            lo = np.array([bx, by]) - span
            hi = np.array([bx, by]) + span
            best = (bx, by)
        result = powell_minimize(rosenbrock, [-1.2, 1.0], ftol=1e-12, xtol=1e-6, max_iters=500)
        assert abs(result.x[0] - best[0]) < 1e-4 + (hi - lo)[0]
        assert abs(result.x[1] - best[1]) < 1e-4 + (hi - lo)[1]

    def test_trace_non_increasing(self):
        result = powell_minimize(rosenbrock, [-1.2, 1.0], max_iters=100)
        assert all(b <= a + 1e-15 for a, b in zip(result.trace, result.trace[1:]))
        assert result.fval <= rosenbrock(np.array([-1.2, 1.0]))

    def test_non_finite_objective_raises(self):
        def broken(v):
            return math.nan if v[0] > 1.5 else (v[0] - 3.0) ** 2

        with pytest.raises(NonFiniteObjectiveError):
            powell_minimize(broken, [0.0])

    def test_four_dimensional_quadratic(self):
        target = np.array([0.5, -1.0, 2.0, 0.0])

        def f(v):
            return float(((v - target) ** 2).sum())

        result = powell_minimize(f, [0.0, 0.0, 0.0, 1.0], xtol=1e-6)
        assert np.allclose(result.x, target, atol=1e-4)

    def test_step_scaling(self):
        # narrow valley along x0: tiny steps still converge
        result = powell_minimize(
            lambda v: (v[0] * 100.0 - 1.0) ** 2 + v[1] ** 2,
            [0.5, 0.5],
            steps=[0.01, 1.0],
            xtol=1e-7,
        )
        assert result.x[0] == pytest.approx(0.01, abs=1e-5)

    def test_never_returns_worse_than_start(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            x0 = rng.uniform(-3, 3, size=3)

            def f(v):
                return float(np.sin(v).sum() + 0.1 * (v ** 2).sum())

            result = powell_minimize(f, x0, max_iters=50)
            assert result.fval <= f(x0) + 1e-12
