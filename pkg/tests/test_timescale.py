import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tsdyn import (
    IndexOutOfRange,
    NonIncreasing,
    SampledFunction,
    TooShort,
    UnsupportedScale,
    delta_derivative,
    delta_integral,
    graininess,
    make_grid,
    q_scale,
    real_interval,
    scale_from_json,
    uniform,
)
from tsdyn.errors import AnchorNotOnScale, TimeScaleError
from tsdyn.timescale import running_integral, sigma


def sampled(ts, fn):
    return SampledFunction.from_callable(ts, fn)


class TestMakeGrid:
    def test_unit_spacing(self):
        ts = make_grid([0, 1, 2, 3])
        assert ts.kind == "grid"
        assert list(ts.mu) == [1.0, 1.0, 1.0]

    def test_duplicate_point(self):
        with pytest.raises(NonIncreasing):
            make_grid([0, 1, 1, 2])

    def test_decreasing(self):
        with pytest.raises(NonIncreasing):
            make_grid([0, 2, 1])

    def test_irregular_graininess(self):
        ts = make_grid([0, 0.5, 0.75, 2])
        assert list(ts.mu) == [0.5, 0.25, 1.25]

    def test_too_short(self):
        with pytest.raises(TooShort):
            make_grid([0, 1])

    def test_points_stored_verbatim_and_immutable(self):
        pts = [0.1, 0.2, 0.7]
        ts = make_grid(pts)
        assert list(ts.points) == pts
        with pytest.raises(ValueError):
            ts.points[0] = 5.0


class TestKinds:
    def test_uniform_points_by_integer_multiplication(self):
        ts = uniform(0.3, 0.1, 40)
        for j, p in enumerate(ts.points):
            assert p == 0.3 + j * 0.1

    def test_q_scale_points(self):
        ts = q_scale(2.0, 1.0, 6)
        assert list(ts.points) == [1, 2, 4, 8, 16, 32]
        ts = q_scale(1.5, 0.7, 10)
        for j, p in enumerate(ts.points):
            assert p == pytest.approx(0.7 * 1.5**j, rel=1e-15)

    def test_q_scale_requires_q_above_one(self):
        with pytest.raises(TimeScaleError):
            q_scale(0.5, 1.0, 5)

    def test_graininess_uniform(self):
        ts = uniform(0.0, 0.5, 10)
        assert all(graininess(ts, i) == 0.5 for i in range(9))

    def test_graininess_q_scale(self):
        ts = q_scale(2.0, 1.0, 6)
        assert ts.points[3] == 8
        assert graininess(ts, 3) == 8.0

    def test_graininess_real_interval(self):
        ts = real_interval(0.0, 1.0, 11)
        assert graininess(ts, 4) == 0.0
        assert sigma(ts, 4) == ts.points[4]

    def test_graininess_at_last_point(self):
        ts = uniform(0.0, 1.0, 5)
        with pytest.raises(IndexOutOfRange):
            graininess(ts, 4)
        assert sigma(ts, 3) == 4.0

    def test_anchor_lookup(self):
        ts = uniform(0.0, 0.1, 20)
        assert ts.anchor_index(0.1 * 7) == 7
        with pytest.raises(AnchorNotOnScale):
            ts.anchor_index(0.05)


@pytest.mark.parametrize(
    "obj",
    [
        {"kind": "grid", "points": [0, 0.5, 2]},
        {"kind": "uniform", "start": -1.0, "step": 0.25, "count": 9},
        {"kind": "q_scale", "q": 1.5, "first": 1.0, "count": 20},
        {"kind": "real_interval", "a": 0.0, "b": 6.0, "samples": 100},
    ],
)
def test_json_round_trip(obj):
    ts = scale_from_json(json.loads(json.dumps(obj)))
    assert ts.kind == obj["kind"]
    again = scale_from_json(ts.to_json())
    assert np.array_equal(again.points, ts.points)


def test_json_missing_field_is_named():
    with pytest.raises(TimeScaleError, match="'step'"):
        scale_from_json({"kind": "uniform", "start": 0, "count": 5})


class TestDeltaDerivative:
    @pytest.mark.parametrize(
        "ts", [make_grid([0, 0.5, 0.75, 2, 2.1]), uniform(0, 0.5, 7), q_scale(1.5, 1, 8)]
    )
    def test_identity_function(self, ts):
        d = delta_derivative(sampled(ts, lambda t: t))
        assert np.allclose(d.values[:-1], 1.0, rtol=1e-13, atol=0)
        assert not d.defined[-1] and d.defined[:-1].all()
        assert np.isnan(d.values[-1])

    def test_square_on_integers(self):
        ts = uniform(0, 1, 10)
        d = delta_derivative(sampled(ts, lambda t: t * t))
        assert np.array_equal(d.values[:-1], 2 * ts.points[:-1] + 1)

    def test_constant(self):
        ts = make_grid([0, 0.3, 1.0, 4.0])
        d = delta_derivative(sampled(ts, lambda t: 3.5))
        assert np.all(d.values[:-1] == 0)

    def test_real_interval_rejected(self):
        ts = real_interval(0, 1, 5)
        with pytest.raises(UnsupportedScale):
            delta_derivative(sampled(ts, lambda t: t))

    def test_second_derivative_undefined_at_last_two(self):
        ts = uniform(0, 1, 6)
        dd = delta_derivative(delta_derivative(sampled(ts, lambda t: t**3)))
        assert list(dd.defined) == [True] * 4 + [False] * 2


class TestDeltaIntegral:
    def test_constant_one(self):
        ts = make_grid([0, 0.5, 0.75, 2, 3.5])
        one = sampled(ts, lambda t: 1.0)
        for j in range(len(ts)):
            assert delta_integral(one, 0, j) == pytest.approx(ts.points[j] - ts.points[0])

    def test_empty(self):
        ts = uniform(0, 1, 5)
        assert delta_integral(sampled(ts, lambda t: t), 2, 2) == 0

    def test_identity_on_integers(self):
        ts = uniform(0, 1, 6)
        f = sampled(ts, lambda t: t)
        # direct summation oracle: 0 + 1 + 2 + 3
        assert delta_integral(f, 0, 4) == sum(range(4)) == 6

    def test_bad_bounds(self):
        ts = uniform(0, 1, 5)
        f = sampled(ts, lambda t: t)
        with pytest.raises(IndexOutOfRange):
            delta_integral(f, 3, 2)
        with pytest.raises(IndexOutOfRange):
            delta_integral(f, 0, 5)

    def test_real_interval_rejected(self):
        ts = real_interval(0, 1, 5)
        with pytest.raises(UnsupportedScale):
            delta_integral(sampled(ts, lambda t: t), 0, 2)


grids = st.lists(
    st.floats(min_value=0.05, max_value=2.0), min_size=2, max_size=30
).map(lambda steps: make_grid(np.concatenate([[0.0], np.cumsum(steps)])))
values = st.floats(min_value=-100, max_value=100, allow_nan=False, allow_subnormal=False)


@settings(max_examples=200, deadline=None)
@given(grids, st.data())
def test_integral_additivity(ts, data):
    n = len(ts)
    vals = data.draw(st.lists(values, min_size=n, max_size=n))
    f = SampledFunction(ts, vals)
    i, j, k = sorted(data.draw(st.lists(st.integers(0, n - 1), min_size=3, max_size=3)))
    whole = delta_integral(f, i, k)
    parts = delta_integral(f, i, j) + delta_integral(f, j, k)
    scale = sum(abs(m * v) for m, v in zip(ts.mu[i:k], f.values[i:k]))
    assert abs(whole - parts) <= 4 * np.finfo(float).eps * (k - i + 1) * max(scale, 1e-300)


@settings(max_examples=200, deadline=None)
@given(st.integers(3, 40), st.data())
def test_fundamental_theorem_exact_on_integers(n, data):
    # integer data on an integer grid: every partial sum is exact, so the
    # difference quotient recovers f bit for bit
    ts = uniform(0, 1, n)
    vals = data.draw(st.lists(st.integers(-1000, 1000), min_size=n, max_size=n))
    f = SampledFunction(ts, vals)
    for anchor in (0, n // 2, n - 1):
        F = running_integral(f, anchor)
        d = delta_derivative(F)
        assert np.array_equal(d.values[:-1], f.values[:-1])


@settings(max_examples=200, deadline=None)
@given(grids, st.data())
def test_fundamental_theorem_general(ts, data):
    n = len(ts)
    vals = np.array(data.draw(st.lists(values, min_size=n, max_size=n)))
    f = SampledFunction(ts, vals)
    F = running_integral(f, data.draw(st.integers(0, n - 1)))
    d = delta_derivative(F).values[:-1]
    # rounding in the prefix sum is bounded by ulp(F) / mu
    bound = 4 * np.finfo(float).eps * (
        np.abs(vals[:-1]) + (np.abs(F.values[:-1]) + np.abs(F.values[1:])) / ts.mu
    )
    assert np.all(np.abs(d - vals[:-1]) <= bound)


@settings(max_examples=200, deadline=None)
@given(grids, st.data(), values, values)
def test_derivative_linear(ts, data, a, b):
    n = len(ts)
    f = SampledFunction(ts, data.draw(st.lists(values, min_size=n, max_size=n)))
    g = SampledFunction(ts, data.draw(st.lists(values, min_size=n, max_size=n)))
    lhs = delta_derivative(a * f + b * g).values[:-1]
    rhs = (a * delta_derivative(f) + b * delta_derivative(g)).values[:-1]
    scale = (
        (abs(a) * (np.abs(f.values[1:]) + np.abs(f.values[:-1]))
         + abs(b) * (np.abs(g.values[1:]) + np.abs(g.values[:-1])))
        / ts.mu
    )
    assert np.all(np.abs(lhs - rhs) <= 1e-12 * np.maximum(scale, 1e-300))
