import math

import numpy as np
import pytest

from monopole_lab import dynamics as dyn


def canonical(lam=1.0, step=1e-3, duration=10.0):
    s0 = dyn.TrajectoryState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    return dyn.integrate(s0, lam, step, duration)


def test_free_particle_is_a_straight_line():
    tr = canonical(lam=0.0, duration=2.0)
    expected = np.column_stack((np.ones(len(tr)), tr.times, np.zeros(len(tr))))
    assert np.allclose(tr.positions, expected, atol=1e-13)
    curve = dyn.unroll_cone(tr)
    assert np.max(dyn.discrete_curvature(curve)) < 1e-5


def test_conserved_vector_of_canonical_state():
    k = dyn.conserved_vector(dyn.TrajectoryState([1, 0, 0], [0, 1, 0]), 1.0)
    assert np.allclose(k, [1.0, 0.0, 1.0])


def test_cone_half_angle_and_development_length():
    tr = canonical()
    assert dyn.cone_half_angle(tr) == pytest.approx(math.pi / 4)
    curve = dyn.unroll_cone(tr)
    assert dyn.polyline_length(curve) == pytest.approx(dyn.path_length(tr), rel=1e-6)
    assert dyn.path_length(tr) == pytest.approx(10.0, rel=1e-12)


def test_unrolled_curve_is_the_planar_line():
    # the canonical geodesic develops onto the line at distance 1 from the apex
    curve = dyn.unroll_cone(canonical())
    assert np.allclose(curve[:, 0], 1.0, atol=1e-9)


def test_time_reversal():
    tr = canonical(duration=3.0)
    end = tr.state(len(tr) - 1)
    back = dyn.integrate(end, 1.0, 1e-3, 3.0, backward=True)
    assert np.allclose(back.positions[-1], [1.0, 0.0, 0.0], atol=1e-12)
    assert back.times[-1] == pytest.approx(0.0, abs=1e-12)


def test_radial_fit_coefficients():
    s0 = dyn.TrajectoryState([1.0, 2.0, 0.0], [0.3, -0.1, 0.5])
    tr = dyn.integrate(s0, 2.0, 1e-3, 5.0)
    fit = dyn.radial_fit(tr)
    assert (fit.C, fit.B, fit.A) == pytest.approx((0.35, 0.1, 5.0), abs=1e-8)


def test_rk4_is_fourth_order():
    # a well-resolved orbit; the canonical one is already at rounding level
    s0 = dyn.TrajectoryState([1.0, 0.0, 0.0], [0.2, 2.0, 0.0])
    coarse = dyn.integrate(s0, 5.0, 2e-3, 10.0)
    fine = dyn.integrate(s0, 5.0, 1e-3, 10.0)
    ratio = dyn.energy_drift(coarse) / dyn.energy_drift(fine)
    assert 12.0 < ratio < 20.0


def test_radial_approach_hits_the_origin():
    s0 = dyn.TrajectoryState([1.0, 0.0, 0.0], [-1.0, 0.0, 0.0])
    with pytest.raises(dyn.SingularOrigin) as info:
        dyn.integrate(s0, 1.0, 1e-3, 2.0)
    partial = info.value.partial
    assert partial is not None and not partial.complete
    assert partial.times[-1] < 1.0 + 1e-9


def test_degenerate_cone():
    s0 = dyn.TrajectoryState([1.0, 0.0, 0.0], [0.5, 0.0, 0.0])
    tr = dyn.integrate(s0, 1.0, 1e-3, 0.01)
    with pytest.raises(dyn.DegenerateCone):
        dyn.unroll_cone(tr)


def test_integrate_validates_step():
    s0 = dyn.TrajectoryState([1, 0, 0], [0, 1, 0])
    with pytest.raises(ValueError):
        dyn.integrate(s0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        dyn.integrate(s0, 1.0, 1.0, 0.5)


def test_report_passes_thresholds():
    rep = dyn.invariants_report(canonical(duration=2.0))
    assert all(rep.passed().values())
