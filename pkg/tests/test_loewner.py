import numpy as np
import pytest

from slelab.loewner import (
    ConformalChain,
    DrivingFunction,
    SwallowedError,
    capacity_coefficient,
    chordal_evolve,
    chordal_trace_points,
    elementary_step,
    radial_derivative_at_origin,
    radial_evolve,
    radial_slit_radius,
    radial_step,
    radial_trace_point,
    radial_trace_points,
    trace_point,
)
from slelab.loewner import _evolve_values

# Frozen oracle values.  The generating code lives in tests/oracles.py so
# they can be recomputed; the oracles integrate the Loewner ODEs directly
# (solve_ivp with rtol 1e-12 and >= 1000 substeps) and never touch the
# slit-map scheme under test.
ODE_STEP_1PI = 1.0098915237410562 + 0.9883993507732761j   # z=1+i, U 0->0.3, dt=0.01
ODE_TRACE_LINEAR_T1 = 0.33426285631077984 + 1.9861408422664777j  # U(t)=0.5t
ODE_RADIAL_HALF = -0.5165690364003344 + 0.0j              # z=-0.5, t=0.1, U=0
ODE_RADIAL_TIP_T05 = 0.22905132331899875                  # zero-driving tip


def linear_driving(slope, duration, dt):
    n = int(round(duration / dt))
    return DrivingFunction(dt=dt, values=slope * np.arange(n + 1) * dt)


class TestDrivingFunction:
    def test_validation(self):
        with pytest.raises(ValueError):
            DrivingFunction(dt=0.0, values=np.zeros(3))
        with pytest.raises(ValueError):
            DrivingFunction(dt=0.1, values=np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            DrivingFunction(dt=0.1, values=np.array([0.0, np.inf]))
        with pytest.raises(ValueError):
            DrivingFunction(dt=0.1, values=np.zeros(2), kappa=-1)

    def test_zero_grid(self):
        d = DrivingFunction.zero(1.0, 0.25)
        assert d.n_steps == 4
        assert d.duration == 1.0


class TestElementaryStep:
    def test_slit_tip_maps_to_root(self):
        assert elementary_step(2j, 0.0, 0.0, 1.0) == pytest.approx(0.0)

    def test_interior_slit_point_swallowed(self):
        assert elementary_step(1j, 0.0, 0.0, 1.0) is None

    def test_far_field_expansion(self):
        # g(z) ~ z + 2t/z to leading order
        v = elementary_step(100.0, 0.0, 0.0, 1.0)
        assert v == pytest.approx(100.02, abs=1e-4)

    def test_against_ode_oracle(self):
        # one vertical-slit step carries the O(|dU| sqrt(dt)) scheme error
        v = elementary_step(1 + 1j, 0.0, 0.3, 0.01)
        assert abs(v - ODE_STEP_1PI) < 5e-3
        # refining the same driving segment converges to the oracle
        vals = np.linspace(0.0, 0.3, 101)
        w, _ = _evolve_values(vals, 0.01 / 100, 1 + 1j)
        assert abs(w - ODE_STEP_1PI) < 1e-4

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            elementary_step(complex(np.nan, 1), 0.0, 0.0, 0.1)
        with pytest.raises(ValueError):
            elementary_step(1j, 0.0, 0.0, -0.1)

    def test_left_reals_stay_left(self):
        assert elementary_step(-3.0, 0.0, 0.0, 0.01).real < 0
        assert elementary_step(3.0, 0.0, 0.0, 0.01).real > 0


class TestChordalEvolve:
    def test_zero_driving_closed_form(self):
        d = DrivingFunction.zero(1.0, 1e-3)
        r = chordal_evolve(d, 3j)
        assert r.value == pytest.approx(np.sqrt(5) * 1j, abs=1e-9)

    def test_swallowing_time(self):
        d = DrivingFunction.zero(1.0, 1e-2)
        r = chordal_evolve(d, 1j)
        assert r.swallowed
        assert r.swallowed_time == pytest.approx(0.25, abs=1e-2)

    def test_origin_rejected(self):
        d = DrivingFunction.zero(1.0, 1e-2)
        with pytest.raises(SwallowedError):
            chordal_evolve(d, 0.0)

    def test_translation_covariance(self):
        rng = np.random.default_rng(11)
        dt = 1e-3
        vals = np.concatenate(([0.0], np.cumsum(rng.normal(0, np.sqrt(2 * dt), 300))))
        c = 1.0
        z = 3j + 1
        base, _ = _evolve_values(vals, dt, z)
        shifted, _ = _evolve_values(vals + c, dt, z + c)
        assert abs(shifted - (base + c)) < 1e-9

    def test_imaginary_part_monotone(self):
        rng = np.random.default_rng(5)
        dt = 1e-3
        vals = np.concatenate(([0.0], np.cumsum(rng.normal(0, np.sqrt(6 * dt), 400))))
        w = 0.4 + 1.5j
        heights = [w.imag]
        for k in range(400):
            w = elementary_step(w, vals[k], vals[k + 1], dt)
            if w is None:
                break
            heights.append(w.imag)
        assert np.all(np.diff(heights) <= 1e-15)

    def test_zero_driving_grid_of_points(self):
        # pointwise match with sqrt(z^2 + 4t) at dt = 1e-4
        d = DrivingFunction.zero(0.2, 1e-4)
        rng = np.random.default_rng(0)
        radii = np.linspace(0.5, 10, 20)
        angles = rng.uniform(0.15, np.pi - 0.15, 20)
        zs = radii * np.exp(1j * angles)
        for z in zs:
            got = chordal_evolve(d, z).value
            want = 1j * np.sqrt(-(z * z + 0.8))
            want = want if want.imag > 0 else -want
            assert abs(got - want) <= 1e-6


class TestTracePoint:
    def test_start_is_origin(self):
        d = linear_driving(2.0, 0.5, 1e-3)
        assert trace_point(d, 0) == 0

    def test_zero_driving_vertical(self):
        d = DrivingFunction.zero(1.0, 1e-3)
        assert trace_point(d, d.n_steps) == pytest.approx(2j, abs=1e-9)

    def test_linear_driving_oracle(self):
        d = linear_driving(0.5, 1.0, 1e-3)
        g = trace_point(d, d.n_steps)
        assert abs(g - ODE_TRACE_LINEAR_T1) <= 1e-3

    def test_index_bounds(self):
        d = DrivingFunction.zero(0.1, 1e-2)
        with pytest.raises(IndexError):
            trace_point(d, 11)

    def test_full_trace_matches_single_points(self):
        d = linear_driving(1.0, 0.2, 1e-3)
        tr = chordal_trace_points(d)
        for k in (1, 57, 200):
            assert tr.points[k] == pytest.approx(trace_point(d, k))

    def test_stride_subsamples(self):
        d = linear_driving(1.0, 0.2, 1e-3)
        tr = chordal_trace_points(d, stride=10)
        full = chordal_trace_points(d)
        assert np.allclose(tr.points, full.points[::10])
        assert np.allclose(tr.times, full.times[::10])

    def test_scaling_covariance(self):
        # U'(t) = r U(t/r^2) on the matching grid gives r * trace, exactly
        rng = np.random.default_rng(21)
        dt = 1e-3
        n = 200
        vals = np.concatenate(([0.0], np.cumsum(rng.normal(0, np.sqrt(2 * dt), n))))
        r = 2.0
        d1 = DrivingFunction(dt=dt, values=vals)
        d2 = DrivingFunction(dt=r * r * dt, values=r * vals)
        t1 = chordal_trace_points(d1)
        t2 = chordal_trace_points(d2)
        assert np.allclose(t2.points, r * t1.points, atol=1e-12)

    def test_trace_stays_in_half_plane(self):
        rng = np.random.default_rng(33)
        dt = 1e-3
        vals = np.concatenate(([0.0], np.cumsum(rng.normal(0, np.sqrt(6 * dt), 500))))
        tr = chordal_trace_points(DrivingFunction(dt=dt, values=vals, kappa=6))
        assert tr.points.imag.min() >= -1e-6


class TestRadial:
    def test_origin_fixed(self):
        d = linear_driving(1.0, 0.7, 1e-3)
        assert radial_evolve(d, 0.0).value == 0

    def test_derivative_at_origin(self):
        d = DrivingFunction.zero(1.0, 1e-3)
        # numerical derivative from a small probe
        h = 1e-6
        g = radial_evolve(d, h).value
        assert abs(g / h - np.e) < 1e-3
        assert radial_derivative_at_origin(d) == pytest.approx(np.e)

    def test_zero_driving_against_oracle(self):
        d = DrivingFunction.zero(0.1, 1e-4)
        r = radial_evolve(d, -0.5)
        assert abs(r.value - ODE_RADIAL_HALF) <= 1e-4

    def test_outside_disk_rejected(self):
        d = DrivingFunction.zero(0.1, 1e-2)
        with pytest.raises(ValueError):
            radial_evolve(d, 1.5 + 0j)

    def test_slit_point_swallowed(self):
        r0 = radial_slit_radius(0.5)
        assert radial_step(0.5 * (r0 + 1.0), 0.0, 0.0, 0.5) is None
        assert radial_step(1.0 + 0j, 0.0, 0.0, 0.5) is None

    def test_trace_point_start(self):
        d = linear_driving(0.3, 0.5, 1e-3)
        assert radial_trace_point(d, 0) == 1.0

    def test_zero_driving_trace_real_segment(self):
        d = DrivingFunction.zero(0.2, 1e-3)
        k = d.n_steps // 2
        p = radial_trace_point(d, k)
        assert abs(p.imag) < 1e-12
        assert 0 < p.real < 1

    def test_zero_driving_tip_oracle(self):
        d = DrivingFunction.zero(0.5, 1e-3)
        p = radial_trace_point(d, d.n_steps)
        assert abs(p - ODE_RADIAL_TIP_T05) <= 1e-3

    def test_trace_in_closed_disk(self):
        rng = np.random.default_rng(8)
        dt = 5e-4
        vals = np.concatenate(([0.0], np.cumsum(rng.normal(0, np.sqrt(2 * dt), 400))))
        tr = radial_trace_points(DrivingFunction(dt=dt, values=vals, kappa=2))
        assert np.abs(tr.points).max() <= 1 + 1e-6
        assert tr.points[0] == 1.0


class TestCapacity:
    def test_empty_chain(self):
        chain = ConformalChain(roots=np.array([]), dts=np.array([]))
        assert capacity_coefficient(chain) == 0.0

    def test_zero_driving(self):
        d = DrivingFunction.zero(1.0, 1e-3)
        chain = ConformalChain.from_driving(d)
        assert capacity_coefficient(chain) == pytest.approx(2.0, abs=1e-3)

    @pytest.mark.parametrize("kappa", [2.0, 8.0 / 3.0, 6.0, 8.0])
    def test_sampled_driving(self, kappa):
        rng = np.random.default_rng(int(kappa * 100))
        dt = 1e-3
        n = 500
        vals = np.concatenate(
            ([0.0], np.cumsum(rng.normal(0, np.sqrt(kappa * dt), n))))
        chain = ConformalChain.from_driving(
            DrivingFunction(dt=dt, values=vals, kappa=kappa))
        assert capacity_coefficient(chain) == pytest.approx(1.0, rel=1e-2)
