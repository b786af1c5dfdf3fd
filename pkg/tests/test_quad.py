import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from errors import ConvergenceError, InvalidIntervalError, ParameterError
from quad import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    IntegralResult,
    QuadratureConfig,
    combine_results,
    integrate_finite,
    integrate_semi_infinite,
)


def test_rule_tables():
    assert NODES.size == 15
    assert np.all(np.diff(NODES) > 0)
    assert NODES == pytest.approx(-NODES[::-1], abs=0)
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-14)
    assert np.count_nonzero(GAUSS_WEIGHTS) == 7


class TestConfig:
    def test_defaults(self):
        cfg = QuadratureConfig()
        assert cfg.as_dict() == {
            "rel_tol": 1e-9,
            "abs_tol": 1e-12,
            "max_subdivisions": 2000,
            "tail_cutoff": 1e-14,
        }

    def test_tolerance_takes_the_looser_bound(self):
        cfg = QuadratureConfig()
        assert cfg.tolerance(10.0) == pytest.approx(1e-8)
        assert cfg.tolerance(1e-6) == 1e-12

    @pytest.mark.parametrize("kwargs", [
        {"rel_tol": 0.0},
        {"abs_tol": -1.0},
        {"max_subdivisions": 0},
        {"max_subdivisions": 2.5},
        {"tail_cutoff": math.nan},
    ])
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ParameterError):
            QuadratureConfig(**kwargs)


class TestFinite:
    def test_polynomial(self, qcfg):
        r = integrate_finite(lambda x: x ** 2, 0.0, 1.0, qcfg)
        assert r.converged
        assert r.value == pytest.approx(1 / 3, abs=1e-14)
        assert r.subdivisions_used == 0

    def test_complex_exponential(self, qcfg):
        r = integrate_finite(lambda x: np.exp(1j * x), 0.0, math.pi, qcfg)
        assert r.value == pytest.approx(2j, abs=1e-12)

    def test_hilhorst_normalization_integral(self, qcfg):
        r = integrate_finite(lambda x: 2.0 / x ** 2, 1.0, 2.0, qcfg)
        assert r.value == pytest.approx(1.0, abs=1e-13)
        assert r.abs_err_estimate <= qcfg.tolerance(r.value)

    def test_oscillatory_needs_bisection(self, qcfg):
        r = integrate_finite(lambda x: np.cos(200 * x), 0.0, 1.0, qcfg)
        assert r.converged and r.subdivisions_used > 0
        assert r.value.real == pytest.approx(math.sin(200) / 200, abs=1e-11)

    def test_budget_exhaustion_is_reported(self):
        cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=1e-300, max_subdivisions=1)
        r = integrate_finite(np.sqrt, 0.0, 1.0, cfg)
        assert not r.converged
        assert r.subdivisions_used == 1
        with pytest.raises(ConvergenceError):
            r.require_converged("sqrt")

    def test_non_finite_integrand(self, qcfg):
        with pytest.raises(ConvergenceError):
            integrate_finite(lambda x: np.full(x.shape, np.nan), 0.0, 1.0, qcfg)

    @pytest.mark.parametrize("a, b", [(1.0, 1.0), (2.0, 1.0), (0.0, math.inf), (math.nan, 1.0)])
    def test_invalid_interval(self, qcfg, a, b):
        with pytest.raises(InvalidIntervalError):
            integrate_finite(lambda x: x, a, b, qcfg)

    def test_endpoint_jump_is_never_sampled(self, qcfg):
        # 1 on [0, 1] and 0 at x = 1 itself
        r = integrate_finite(lambda x: np.where(x < 1.0, 1.0, 0.0), 0.0, 1.0, qcfg)
        assert r.value == pytest.approx(1.0, abs=1e-15)

    @settings(max_examples=50, deadline=None)
    @given(w=st.floats(min_value=0.1, max_value=50.0), length=st.floats(min_value=0.1, max_value=5.0))
    def test_cosine_antiderivative(self, w, length):
        r = integrate_finite(lambda x: np.cos(w * x), 0.0, length, QuadratureConfig())
        assert r.converged
        assert r.value.real == pytest.approx(math.sin(w * length) / w, rel=1e-8, abs=1e-10)


class TestSemiInfinite:
    def test_exponential(self, qcfg):
        r = integrate_semi_infinite(lambda x: np.exp(-x), 0.0, True, qcfg)
        assert r.converged
        assert r.value == pytest.approx(1.0, abs=1e-12)

    def test_damped_oscillation(self, qcfg):
        r = integrate_semi_infinite(lambda x: np.exp((-1 + 1j) * x), 0.0, True, qcfg)
        assert r.value == pytest.approx((1 + 1j) / 2, abs=1e-12)

    def test_left_ray(self, qcfg):
        r = integrate_semi_infinite(lambda x: np.exp(x), 0.0, False, qcfg)
        assert r.value == pytest.approx(1.0, abs=1e-12)

    def test_compact_support_matches_finite(self, qcfg):
        def f(x):
            return np.where(x <= 2.0, x * (2.0 - x), 0.0)

        ray = integrate_semi_infinite(f, 0.0, True, qcfg)
        assert ray.converged
        assert ray.value == pytest.approx(4 / 3, abs=1e-12)

    def test_power_tail(self, qcfg):
        r = integrate_semi_infinite(lambda x: 1.0 / (1.0 + x) ** 3, 0.0, True, qcfg)
        assert r.converged
        assert r.value == pytest.approx(0.5, rel=1e-10)

    def test_non_finite_start(self, qcfg):
        with pytest.raises(InvalidIntervalError):
            integrate_semi_infinite(np.exp, -math.inf, True, qcfg)


FINITE_CASES = [
    pytest.param(lambda x: x ** 2, 0.0, 1.0, 1 / 3, id="square"),
    pytest.param(lambda x: np.exp(1j * x), 0.0, math.pi, 2j, id="complex-exp"),
    pytest.param(np.sqrt, 0.0, 1.0, 2 / 3, id="sqrt"),
    pytest.param(np.log, 0.0, 1.0, -1.0, id="log"),
    pytest.param(lambda x: np.cos(200 * x), 0.0, 1.0, math.sin(200) / 200, id="cos200"),
    pytest.param(lambda x: x ** -0.9, 0.0, 1.0, 10.0, id="x^-0.9"),
    pytest.param(lambda x: 2.0 / x ** 2, 1.0, 2.0, 1.0, id="hilhorst"),
]

RAY_CASES = [
    pytest.param(lambda x: 1.0 / (1.0 + x ** 2), True, math.pi / 2, id="lorentzian"),
    pytest.param(lambda x: np.exp(-x), True, 1.0, id="exp"),
    pytest.param(lambda x: x * np.exp(-x ** 2), True, 0.5, id="x-gauss"),
    pytest.param(lambda x: np.exp(-x ** 2), False, math.sqrt(math.pi) / 2, id="left-gauss"),
    pytest.param(lambda x: 1.0 / (1.0 + x) ** 3, True, 0.5, id="cubic-tail"),
    pytest.param(lambda x: np.exp((1j - 1) * x), True, (1 + 1j) / 2, id="damped-osc"),
]


def _slack(exact: complex) -> float:
    # rounding of the closed form itself
    return 4 * np.finfo(float).eps * abs(exact)


class TestErrorEstimates:
    @pytest.mark.parametrize("f, a, b, exact", FINITE_CASES)
    def test_finite_estimate_covers_actual_error(self, qcfg, f, a, b, exact):
        r = integrate_finite(f, a, b, qcfg)
        assert abs(r.value - exact) <= 10 * r.abs_err_estimate + _slack(exact)

    @pytest.mark.parametrize("f, rightward, exact", RAY_CASES)
    def test_ray_estimate_covers_actual_error(self, qcfg, f, rightward, exact):
        r = integrate_semi_infinite(f, 0.0, rightward, qcfg)
        assert r.converged
        assert abs(r.value - exact) <= 10 * r.abs_err_estimate + _slack(exact)

    def test_slow_power_tail_is_not_under_reported(self):
        # panels [1, 2], [2, 4], ... shrink by 2^-0.5, so the unseen tail is 2.4x the last panel
        cfg = QuadratureConfig(tail_cutoff=1e-6)
        r = integrate_semi_infinite(lambda x: x ** -1.5, 1.0, True, cfg)
        actual = abs(r.value - 2.0)
        assert r.converged
        assert actual > 1e-7
        assert actual <= r.abs_err_estimate

    @settings(max_examples=50, deadline=None)
    @given(alpha=st.floats(min_value=-10.0, max_value=10.0),
           c=st.floats(min_value=0.0, max_value=20.0),
           d=st.floats(min_value=0.0, max_value=5.0))
    def test_linearity(self, alpha, c, d):
        cfg = QuadratureConfig()

        def f(x):
            return np.cos(c * x)

        def g(x):
            return np.exp(-d * x)

        combined = integrate_finite(lambda x: alpha * f(x) + g(x), 0.0, 1.0, cfg).value
        separate = (alpha * integrate_finite(f, 0.0, 1.0, cfg).value
                    + integrate_finite(g, 0.0, 1.0, cfg).value)
        assert abs(combined - separate) <= 1e-8 * (1 + abs(alpha))


def test_combine_results():
    parts = [
        IntegralResult(1 + 1j, 1e-12, 3, True),
        IntegralResult(2 - 1j, 2e-12, 4, False),
    ]
    total = combine_results(parts)
    assert total.value == 3 + 0j
    assert total.abs_err_estimate == pytest.approx(3e-12)
    assert total.subdivisions_used == 7
    assert not total.converged
    assert combine_results([]) == IntegralResult(0j, 0.0, 0, True)
