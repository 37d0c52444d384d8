import math

import pytest

from monopole_lab import semiclassics as sc
from monopole_lab.spectral import exact_level


def harmonic(x):
    return 0.5 * x * x


def test_turning_points_of_harmonic_well():
    w = sc.WellProblem(harmonic)
    a, b = sc.turning_points(w, 2.0)
    assert (a, b) == pytest.approx((-2.0, 2.0), abs=1e-13)


def test_harmonic_action_is_two_pi_e():
    w = sc.WellProblem(harmonic)
    assert sc.well_action(w, 1.3) == pytest.approx(2 * math.pi * 1.3, rel=1e-14)


def test_mass_rescales_levels():
    w = sc.WellProblem(harmonic, mass=4.0)
    levels = sc.bohr_sommerfeld_levels(w, 3)
    # omega = 1/sqrt(m) = 1/2
    assert levels == pytest.approx([0.5 * (q + 0.5) for q in range(4)], abs=1e-12)


def test_double_well_is_rejected():
    w = sc.WellProblem(lambda x: (x * x - 1.0) ** 2, domain=(-3.0, 3.0))
    with pytest.raises(sc.MultiWell):
        sc.turning_points(w, 0.5)


def test_no_bracket_above_the_domain():
    w = sc.WellProblem(harmonic, domain=(-1.0, 1.0))
    with pytest.raises(sc.NoBracket):
        sc.bohr_sommerfeld_levels(w, 5)


def test_quartic_ground_state_against_finite_differences():
    # Bohr-Sommerfeld undershoots the quartic ground state by about 18%;
    # the error falls quickly with q.
    w = sc.WellProblem(lambda x: x**4, domain=(-6.0, 6.0))
    bs = sc.bohr_sommerfeld_levels(w, 3)
    fd = sc.fd_schrodinger_levels(w, 4)
    assert fd[0] == pytest.approx(0.667986, abs=1e-5)
    rel = [(e - o) / o for e, o in zip(bs, fd)]
    assert rel[0] == pytest.approx(-0.1822, abs=1e-3)
    assert abs(rel[1]) < 0.02 and abs(rel[3]) < abs(rel[2]) < abs(rel[1])


def test_fd_oracle_on_harmonic_well():
    w = sc.WellProblem(harmonic, domain=(-10.0, 10.0))
    fd = sc.fd_schrodinger_levels(w, 3, nodes=4000)
    assert fd == pytest.approx([0.5, 1.5, 2.5], rel=1e-5)


# ---- tori ------------------------------------------------------------------

def test_free_sphere_action_identity():
    # J_theta + |J_phi| = 2 pi sqrt(E) on the eigenvalue scale
    for E, P in [(2.0, 0.5), (6.0, -1.2), (12.25, 3.0)]:
        t = sc.torus_actions(E, P, 0, 0)
        assert t.actions[0] + abs(t.actions[1]) == pytest.approx(2 * math.pi * math.sqrt(E), rel=1e-12)


def test_charged_action_closed_form():
    E, P, n = 5.0, 0.3, -2
    t = sc.torus_actions(E, P, 2, n)
    s = n / 2
    expected = 2 * math.pi * (math.sqrt(E + s * s) - max(abs(P), abs(s))) / 2
    assert t.actions[0] == pytest.approx(expected, rel=1e-12)


def test_turning_points_bracket_the_motion():
    lo, hi = sc.torus_turning_points(3.5, 1.0, -1)
    assert 0 < lo < hi < math.pi
    for t in (lo, hi):
        assert (1.0 - 0.5 * math.cos(t)) ** 2 / math.sin(t) ** 2 == pytest.approx(3.5, rel=1e-10)


def test_empty_torus_below_the_floor():
    with pytest.raises(sc.EmptyTorus):
        sc.torus_actions(0.1, 2.0, 1, -1)


@pytest.mark.parametrize("N,n", [(1, -1), (2, -2), (0, 0)])
def test_quantized_ground_torus(N, n):
    t = sc.solve_torus(N, n, 0, 0)
    assert max(abs(r) for r in sc.quantize_residual(t)) < 1e-9
    assert t.E == pytest.approx(exact_level(N, 0) + 0.25, abs=1e-9)


def test_enumeration_counts_tori():
    levels = sc.enumerate_quantized_tori(2, -2, 6.0)
    assert [round(q.E, 9) for q in levels] == [1.25, 5.25]
    assert [q.multiplicity for q in levels] == [3, 5]
    assert [q.formula_multiplicity for q in levels] == [3, 5]


def test_enumeration_requires_matching_charge():
    with pytest.raises(ValueError):
        sc.enumerate_quantized_tori(2, 1, 5.0)


def test_almost_spectrum():
    al = sc.almost_spectrum(0, 1)
    assert [(lv.value, lv.multiplicity) for lv in al] == [(0.25, 1), (2.25, 3)]


def test_axial_integral_is_p_phi_form():
    chk = sc.check_axial_conservation(3.75, 1.0, -1, steps=4000)
    assert chk.axial_drift < 1e-9
    assert chk.theta_form_drift > 0.1  # the p_theta variant is not conserved
    assert chk.closure < 1e-6
