"""Hypothesis property tests for the invariants the modules promise."""

import math

import numpy as np
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from monopole_lab import dynamics as dyn
from monopole_lab import geometry as geo
from monopole_lab import semiclassics as sc
from monopole_lab import spectral as sp

charges = st.integers(-6, 6)
finite = st.floats(-2.0, 2.0, allow_nan=False, allow_infinity=False)


@given(n=st.integers(-25, 25))
def test_chern_equals_charge(n):
    c = geo.chern_number(geo.monopole_field(n))
    assert c.value == n and c.residual < 1e-10


@given(n=charges, t0=st.floats(0.05, math.pi - 0.05))
def test_latitude_holonomy_is_cap_flux(n, t0):
    th, ph = geo.latitude_circle(t0, 32)
    got = geo.holonomy(geo.monopole_field(n), th, ph, reduce=False)
    assert abs(got - 0.5 * n * 2 * math.pi * (1 - math.cos(t0))) < 1e-11


@given(n=charges, t0=st.floats(0.3, 2.8), p0=st.floats(0, 2 * math.pi), r=st.floats(0.05, 0.3),
       a=finite, b=finite)
def test_holonomy_gauge_invariant(n, t0, p0, r, a, b):
    base = geo.monopole_field(n)
    f = a * sympy.cos(geo.theta) + b * sympy.sin(geo.theta) ** 2 * sympy.sin(geo.phi)
    moved = geo.gauge_transform(base, f)
    th, ph = geo.spherical_cap_boundary(t0, p0, r, 128)
    h0 = geo.holonomy(base, th, ph, reduce=False)
    h1 = geo.holonomy(moved, th, ph, reduce=False)
    assert abs(h0 - h1) < 1e-9


@given(n=charges, m=st.integers(-4, 4))
def test_sector_lowest_eigenvalue_is_near_closed_form(n, m):
    s = n / 2
    l = max(abs(s), abs(m - s))
    got = sp.solve_sector(sp.reduce_sector(n, m, 800), 1)[0]
    assert abs(got - (l * (l + 1) - s * s)) <= 1e-3 * (1 + l * l)


@given(n=charges, m=st.integers(-4, 4))
def test_conjugation_maps_sector_m_to_minus_m(n, m):
    a = sp.solve_sector(sp.reduce_sector(n, m, 256), 4)
    b = sp.solve_sector(sp.reduce_sector(-n, -m, 256), 4)
    assert np.allclose(a, b, rtol=0, atol=1e-10)


@given(N=st.integers(0, 6), j=st.integers(0, 8))
def test_almost_levels_shift_by_a_quarter(N, j):
    assert sc.almost_level(N, j) - sp.exact_level(N, j) == 0.25


@given(E=st.floats(0.5, 40.0), P=st.floats(-3.0, 3.0), n=st.integers(-3, 3))
def test_torus_action_closed_form(E, P, n):
    s = n / 2
    assume(E > max(P * P, s * s) - s * s + 1e-3)
    N = max(abs(n), 1)
    try:
        t = sc.torus_actions(E, P, abs(n), n)
    except sc.EmptyTorus:
        return
    expected = 2 * math.pi * (math.sqrt(E + s * s) - max(abs(P), abs(s))) / N
    assert abs(t.actions[0] - expected) < 1e-8 * (1 + expected)


@given(hbar=st.floats(0.05, 2.0), omega=st.floats(0.3, 3.0), q=st.integers(0, 6))
def test_bohr_sommerfeld_harmonic_exact(hbar, omega, q):
    w = sc.WellProblem(lambda x: 0.5 * omega**2 * x * x, hbar=hbar,
                       domain=(-30.0 / omega, 30.0 / omega))
    assume(0.5 * omega**2 * (30.0 / omega) ** 2 > hbar * omega * (q + 1))
    e = sc.bohr_sommerfeld_levels(w, q)[-1]
    assert abs(e - hbar * omega * (q + 0.5)) < 1e-9 * (1 + e)


vec = st.tuples(finite, finite, finite)


@given(lam=st.floats(-3.0, 3.0), r0=vec, v0=vec)
def test_dynamics_conserves_energy_and_vector(lam, r0, v0):
    r0 = np.array(r0)
    assume(np.linalg.norm(r0) > 0.5 and np.linalg.norm(v0) < 2.0)
    s0 = dyn.TrajectoryState(r0, v0)
    # stay well clear of the origin: closest approach of the free-flight line is a lower bound
    assume(np.linalg.norm(np.cross(r0, v0)) > 0.3 * max(np.linalg.norm(v0), 1e-9) or np.linalg.norm(v0) < 1e-3)
    try:
        tr = dyn.integrate(s0, lam, 2e-3, 1.0)
    except dyn.SingularOrigin:
        return
    assert dyn.energy_drift(tr) < 1e-7
    assert dyn.vector_drift(tr) < 1e-7
    assert dyn.cone_residual(tr) < 1e-7
    fit = dyn.radial_fit(tr)
    assert abs(fit.C - float(np.dot(v0, v0))) < 1e-6


@given(values=st.lists(st.floats(0.0, 100.0), min_size=1, max_size=30))
def test_clustering_preserves_total_multiplicity(values):
    pairs = [(v, i) for i, v in enumerate(values)]
    try:
        levels = sp.cluster_levels(pairs, 1e-4)
    except sp.ClusterAmbiguity:
        return
    assert sum(lv.multiplicity for lv in levels) == len(values)
    assert all(a.value < b.value for a, b in zip(levels, levels[1:]))
