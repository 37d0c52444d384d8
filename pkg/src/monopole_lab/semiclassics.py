"""Quasi-classical quantization: Bohr-Sommerfeld wells and monopole tori.

Torus conventions.  An :class:`InvariantTorus` of the Dirac monopole is the
level set ``{E, P}`` of a particle on the unit sphere carrying the charge of
``L^N`` (Chern class ``n``) at ``hbar = 1``:

    E = p_theta^2 + p_phi^2 / sin^2 theta,     p_phi(theta) = P + (n/2) cos theta,

where ``p`` is the kinetic momentum.  ``E`` is therefore directly on the
eigenvalue scale of the magnetic Laplacian.  The stored actions and
holonomies are those of the basic bundle ``L`` at ``hbar = 1/N``, which
scales them by ``1/N``; the quantization condition then reads

    N (J_c + h_c) = (pi/2) mu_c   (mod 2 pi)

for the theta-libration cycle (Maslov index 2) and the phi-rotation cycle
(Maslov index 0).  The field-free case ``n = 0`` uses ``N = 1``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .dynamics import rk4_step
from .geometry import Chart, holonomy, latitude_circle, monopole_field
from .spectral import Source, SpectrumLevel, exact_level

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
NEWTON_ITERATIONS = 25
MASLOV = (2, 0)


class NoBracket(ValueError):
    pass


class MultiWell(ValueError):
    pass


class EmptyTorus(ValueError):
    pass


class RootNotConverged(RuntimeError):
    pass


def _wrap(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, 2 * math.pi)
    return math.pi if y == -math.pi else y


def _sine_substitution(lo: float, hi: float, nodes: int):
    """Gauss-Legendre nodes/weights for ``x = c + r sin(psi)`` on [lo, hi].

    The Jacobian ``r cos(psi)`` cancels square-root endpoint behaviour.
    """
    x, w = np.polynomial.legendre.leggauss(nodes)
    psi = 0.5 * np.pi * x
    c, r = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return c + r * np.sin(psi), w * (0.5 * np.pi) * r * np.cos(psi)


# ---------------------------------------------------------------------------
# one-dimensional wells

@dataclass(frozen=True)
class WellProblem:
    potential: Callable[[np.ndarray], np.ndarray]
    mass: float = 1.0
    hbar: float = 1.0
    domain: tuple[float, float] = (-10.0, 10.0)
    samples: int = 4001

    def __post_init__(self):
        if self.mass <= 0 or self.hbar <= 0:
            raise ValueError("mass and hbar must be positive")
        if not self.domain[0] < self.domain[1]:
            raise ValueError("empty domain")

    def grid(self) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], self.samples)


def well_minimum(w: WellProblem) -> tuple[float, float]:
    x = w.grid()
    u = np.asarray(w.potential(x), dtype=float)
    i = int(np.argmin(u))
    if i in (0, x.size - 1):
        raise NoBracket("potential has no interior minimum in the domain")
    lo, hi = x[i - 1], x[i + 1]
    g = (math.sqrt(5) - 1) / 2
    for _ in range(100):  # golden section on the bracketing cell pair
        a, b = hi - g * (hi - lo), lo + g * (hi - lo)
        if float(w.potential(np.array(a))) < float(w.potential(np.array(b))):
            hi = b
        else:
            lo = a
    xm = 0.5 * (lo + hi)
    return xm, float(w.potential(np.array(xm)))


def turning_points(w: WellProblem, energy: float) -> tuple[float, float]:
    """The two roots of ``U(x) = E`` enclosing the classically allowed interval."""
    x = w.grid()
    g = np.asarray(w.potential(x), dtype=float) - energy
    outside = g > 0
    crossings = np.nonzero(outside[:-1] != outside[1:])[0]
    if crossings.size > 2:
        raise MultiWell(f"{crossings.size} turning points at E={energy!r}")
    if crossings.size < 2:
        raise NoBracket(f"no bounded classical interval at E={energy!r}")

    def f(t):
        return float(w.potential(np.array(t))) - energy

    a = brentq(f, x[crossings[0]], x[crossings[0] + 1], xtol=1e-15, rtol=1e-15)
    b = brentq(f, x[crossings[1]], x[crossings[1] + 1], xtol=1e-15, rtol=1e-15)
    return a, b


def well_action(w: WellProblem, energy: float, nodes: int = 64) -> float:
    """Closed-orbit action ``2 int sqrt(2 m (E - U)) dx`` between turning points."""
    a, b = turning_points(w, energy)
    x, wt = _sine_substitution(a, b, nodes)
    p2 = 2.0 * w.mass * (energy - np.asarray(w.potential(x), dtype=float))
    return float(2.0 * np.sum(wt * np.sqrt(np.clip(p2, 0.0, None))))


def bohr_sommerfeld_levels(w: WellProblem, n_max: int) -> list[float]:
    """Energies with ``(1/(2 pi hbar)) oint p dx = q + 1/2`` for ``q = 0..n_max``."""
    _, u_min = well_minimum(w)
    x = w.grid()
    u = np.asarray(w.potential(x), dtype=float)
    e_top = min(u[0], u[-1])
    e_hi = e_top - 1e-9 * (1.0 + abs(e_top))
    top_action = well_action(w, e_hi)

    def residual(e, target):
        if e <= u_min:
            return -target
        return well_action(w, e) - target

    levels = []
    for q in range(n_max + 1):
        target = 2.0 * math.pi * w.hbar * (q + 0.5)
        if top_action < target:
            raise NoBracket(f"action range tops out at {top_action:.6g} < {target:.6g} (q={q})")
        lo = u_min if not levels else levels[-1]
        levels.append(brentq(residual, lo, e_hi, args=(target,), xtol=1e-15, rtol=1e-15))
    return levels


def fd_schrodinger_levels(w: WellProblem, count: int, nodes: int = 4000) -> np.ndarray:
    """Lowest eigenvalues of ``-hbar^2/(2m) d^2/dx^2 + U`` with Dirichlet ends."""
    x = np.linspace(w.domain[0], w.domain[1], nodes + 2)[1:-1]
    h = x[1] - x[0]
    k = w.hbar**2 / (2.0 * w.mass * h * h)
    d = 2.0 * k + np.asarray(w.potential(x), dtype=float)
    e = np.full(nodes - 1, -k)
    return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, count - 1))


# ---------------------------------------------------------------------------
# invariant tori of the Dirac monopole

@dataclass(frozen=True)
class InvariantTorus:
    E: float
    P: float
    N: int
    n: int
    theta_range: tuple[float, float]
    actions: tuple[float, float]
    holonomies: tuple[float, float]
    maslov: tuple[int, int] = MASLOV
    holonomies_lifted: tuple[float, float] = (0.0, 0.0)

    def p_phi(self, t):
        return self.P + 0.5 * self.n * np.cos(t)


def _effective_N(N: int, n: int) -> int:
    if N < 0:
        raise ValueError("N must be nonnegative")
    if N == 0:
        if n != 0:
            raise ValueError("N = 0 requires n = 0")
        return 1
    if n % N:
        raise ValueError(f"n={n} is not a multiple of N={N}")
    return N


def torus_turning_points(E: float, P: float, n: int) -> tuple[float, float]:
    """Roots of ``E sin^2 - (P + (n/2) cos)^2``, a quadratic in ``cos theta``."""
    s = 0.5 * n
    if E <= 0:
        raise EmptyTorus("energy must be positive")
    a = E + s * s
    disc = E * (a - P * P)
    if disc <= 0:
        raise EmptyTorus(f"no classical motion for E={E!r}, P={P!r}")
    root = math.sqrt(disc)
    u_hi = min(1.0, (-P * s + root) / a)
    u_lo = max(-1.0, (-P * s - root) / a)
    t_lo, t_hi = math.acos(u_hi), math.acos(u_lo)
    if t_hi - t_lo <= 1e-12:
        raise EmptyTorus("degenerate torus (turning points coincide)")
    return t_lo, t_hi


def torus_actions(E: float, P: float, N: int, n: int, nodes: int = 96) -> InvariantTorus:
    """Actions, holonomies and Maslov data of the torus ``{E, P}``."""
    Ne = _effective_N(N, n)
    t_lo, t_hi = torus_turning_points(E, P, n)
    t, wt = _sine_substitution(t_lo, t_hi, nodes)
    pphi = P + 0.5 * n * np.cos(t)
    p2 = E - pphi**2 / np.sin(t) ** 2
    j_theta = 2.0 * float(np.sum(wt * np.sqrt(np.clip(p2, 0.0, None)))) / Ne

    t_star = 0.5 * (t_lo + t_hi)
    j_phi = 2.0 * math.pi * float(P + 0.5 * n * math.cos(t_star)) / Ne
    th, ph = latitude_circle(t_star, samples=32)
    h_phi = holonomy(monopole_field(n), th, ph, Chart.NORTH, reduce=False) / Ne
    return InvariantTorus(
        E=float(E), P=float(P), N=N, n=n,
        theta_range=(t_lo, t_hi),
        actions=(j_theta, j_phi),
        holonomies=(0.0, h_phi % (2 * math.pi)),
        holonomies_lifted=(0.0, h_phi),
    )


def quantize_residual(t: InvariantTorus) -> tuple[float, float]:
    """``N (J_c + h_c) - (pi/2) mu_c`` reduced to (-pi, pi] for both cycles."""
    Ne = _effective_N(t.N, t.n)
    return tuple(
        _wrap(Ne * (j + h) - 0.5 * math.pi * mu)
        for j, h, mu in zip(t.actions, t.holonomies, t.maslov)
    )


def lifted_residual(t: InvariantTorus, k: int, M: int) -> np.ndarray:
    """Unreduced residuals aiming at the lattice point ``(k, M)``."""
    Ne = _effective_N(t.N, t.n)
    r_theta = Ne * (t.actions[0] + t.holonomies_lifted[0]) - 0.5 * math.pi * t.maslov[0] - 2 * math.pi * k
    r_phi = Ne * (t.actions[1] + t.holonomies_lifted[1]) - 0.5 * math.pi * t.maslov[1] - 2 * math.pi * M
    return np.array([r_theta, r_phi])


def _energy_floor(P: float, n: int) -> float:
    s = 0.5 * n
    return max(P * P, s * s) - s * s


def solve_torus(N: int, n: int, k: int, M: int) -> InvariantTorus:
    """Quantized torus for lattice indices ``(k, M)``.

    Damped Newton on ``(E, P)`` with a finite-difference Jacobian, seeded
    from the field-free sphere.  After ``NEWTON_ITERATIONS`` the energy is
    finished by bisection at the current ``P``.
    """

    def residual(x):
        return lifted_residual(torus_actions(x[0], x[1], N, n), k, M)

    def safe(x):
        try:
            return residual(x)
        except EmptyTorus:
            return None

    x = np.array([(k + 0.5 + abs(M)) ** 2, float(M)])
    floor = _energy_floor(x[1], n)
    if x[0] <= floor:
        x[0] = floor + 1.0
    r = safe(x)
    while r is None:
        x[0] = 2.0 * x[0] + 1.0
        r = safe(x)

    for _ in range(NEWTON_ITERATIONS):
        if np.max(np.abs(r)) < RESIDUAL_TOL:
            return torus_actions(x[0], x[1], N, n)
        jac = np.empty((2, 2))
        for i in range(2):
            dh = 1e-6 * (1.0 + abs(x[i]))
            up, down = x.copy(), x.copy()
            up[i] += dh
            down[i] -= dh
            ru, rd = safe(up), safe(down)
            if ru is not None and rd is not None:
                jac[:, i] = (ru - rd) / (2 * dh)
            elif ru is not None:
                jac[:, i] = (ru - r) / dh
            elif rd is not None:
                jac[:, i] = (r - rd) / dh
            else:
                raise RootNotConverged(f"torus family collapses near lattice point ({k}, {M})")
        try:
            delta = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            break
        step = 1.0
        while step > 1e-6:
            trial = x + step * delta
            rt = safe(trial)
            if rt is not None and np.max(np.abs(rt)) < np.max(np.abs(r)):
                x, r = trial, rt
                break
            step *= 0.5
        else:
            break

    # bisection fallback on E with P fixed; the phi-residual is independent of E
    P = x[1]
    if abs(r[1]) >= RESIDUAL_TOL:
        raise RootNotConverged(f"phi-cycle residual {r[1]:.3e} at lattice point ({k}, {M})")
    lo = _energy_floor(P, n) * (1 + 1e-14) + 1e-14
    hi = max(x[0], lo) + 1.0

    def g(e):
        return residual((e, P))[0]

    g_lo = g(lo) if safe((lo, P)) is not None else -1.0
    if g_lo > 0:
        raise RootNotConverged(f"lattice point ({k}, {M}) lies below the torus family")
    while g(hi) < 0:
        hi *= 2.0
        if hi > 1e12:
            raise RootNotConverged(f"no energy bracket for lattice point ({k}, {M})")
    e = brentq(g, lo, hi, xtol=1e-15, rtol=1e-15)
    t = torus_actions(e, P, N, n)
    if abs(lifted_residual(t, k, M)[0]) >= RESIDUAL_TOL * 10:
        raise RootNotConverged(f"theta-cycle residual stuck at lattice point ({k}, {M})")
    return t


class QuantizedLevel(NamedTuple):
    E: float
    P: tuple[float, ...]
    multiplicity: int
    formula_multiplicity: int | None


def almost_level(N: int, j: int) -> float:
    return exact_level(N, j) + 0.25


def enumerate_quantized_tori(N: int, n: int, e_max: float,
                             merge_tol: float = 1e-7) -> list[QuantizedLevel]:
    """Distinct quantized torus energies ``<= e_max`` with torus counts.

    ``multiplicity`` is the raw number of quantized tori at that energy;
    ``formula_multiplicity`` is ``2j+1+N`` for the matching closed-form
    level, or ``None`` when no closed-form level is within ``merge_tol``.
    """
    if abs(n) != N:
        raise ValueError("need |n| = N")
    if e_max <= 0:
        raise ValueError("e_max must be positive")
    s = 0.5 * n
    tori = []
    # the lowest energy a torus with P = M - s can reach is _energy_floor(P)
    M_lo = math.floor(-math.sqrt(e_max + s * s) + s) - 1
    M_hi = math.ceil(math.sqrt(e_max + s * s) + s) + 1
    for M in range(M_lo, M_hi + 1):
        if _energy_floor(M - s, n) >= e_max:
            continue
        k = 0
        while True:
            try:
                t = solve_torus(N, n, k, M)
            except RootNotConverged as exc:
                log.warning("skipping lattice point: %s", exc)
                break
            if t.E > e_max:
                break
            tori.append((t.E, t.P))
            k += 1
    tori.sort()

    groups: list[list[tuple[float, float]]] = []
    for e, p in tori:
        if groups and e - groups[-1][-1][0] <= merge_tol * (1 + e):
            groups[-1].append((e, p))
        else:
            groups.append([(e, p)])

    out = []
    for g in groups:
        e = float(np.mean([x for x, _ in g]))
        j = _nearest_j(N, e, merge_tol)
        out.append(QuantizedLevel(
            E=e, P=tuple(p for _, p in g), multiplicity=len(g),
            formula_multiplicity=None if j is None else 2 * j + 1 + N,
        ))
    return out


def _nearest_j(N: int, e: float, tol: float) -> int | None:
    # almost_level is increasing in j; invert the quadratic then check
    disc = (N + 1) ** 2 - 4 * (0.5 * N + 0.25 - e)
    if disc < 0:
        return None
    j = round((-(N + 1) + math.sqrt(disc)) / 2)
    if j < 0 or abs(almost_level(N, j) - e) > tol * (1 + e):
        return None
    return j


def almost_spectrum(N: int, j_max: int) -> list[SpectrumLevel]:
    """Closed-form almost eigenvalues ``E_{N,j} + 1/4`` with multiplicity ``2j+1+N``."""
    if N < 0 or j_max < 0:
        raise ValueError("N and j_max must be nonnegative")
    return [SpectrumLevel(almost_level(N, j), 2 * j + 1 + N, Source.SEMICLASSICAL)
            for j in range(j_max + 1)]


def quantized_spectrum(N: int, j_max: int) -> list[SpectrumLevel]:
    """Levels ``j <= j_max`` from :func:`enumerate_quantized_tori` with ``n = -N``."""
    e_max = 0.5 * (almost_level(N, j_max) + almost_level(N, j_max + 1))
    levels = enumerate_quantized_tori(N, -N, e_max)
    return [SpectrumLevel(q.E, q.multiplicity, Source.SEMICLASSICAL) for q in levels]


# ---------------------------------------------------------------------------
# classical flow on the torus

@dataclass(frozen=True)
class FlowCheck:
    period: float
    axial_drift: float       # max |(p_phi - (n/2) cos) - P|
    theta_form_drift: float  # same with p_theta in place of p_phi
    closure: float           # |theta(T) - theta(0)| + |p_theta(T) - p_theta(0)|


def libration_period(E: float, P: float, n: int, nodes: int = 96) -> float:
    """``2 int dtheta / p_theta`` for ``H = |p|^2 / 2`` (so ``|p|^2 = E``)."""
    t_lo, t_hi = torus_turning_points(E, P, n)
    t, wt = _sine_substitution(t_lo, t_hi, nodes)
    p2 = E - (P + 0.5 * n * np.cos(t)) ** 2 / np.sin(t) ** 2
    return 2.0 * float(np.sum(wt / np.sqrt(p2)))


def twisted_flow_rhs(n: int) -> Callable:
    """Hamilton's equations for ``H = (p_theta^2 + p_phi^2/sin^2)/2`` in kinetic momenta.

    State ``(theta, phi, p_theta, p_phi)``; the field ``F = (n/2) sin theta``
    enters only through the twisted symplectic form.
    """
    s = 0.5 * n

    def f(y):
        t, _, pt, pp = y
        st, ct = math.sin(t), math.cos(t)
        phidot = pp / (st * st)
        return np.array([pt, phidot, pp * pp * ct / st**3 + s * st * phidot, -s * st * pt])

    return f


def check_axial_conservation(E: float, P: float, n: int, steps: int = 20000) -> FlowCheck:
    """Integrate one libration period with RK4 and track both candidate integrals."""
    t_lo, t_hi = torus_turning_points(E, P, n)
    t0 = 0.5 * (t_lo + t_hi)
    pp0 = P + 0.5 * n * math.cos(t0)
    pt0 = math.sqrt(E - pp0**2 / math.sin(t0) ** 2)
    period = libration_period(E, P, n)
    h = period / steps
    f = twisted_flow_rhs(n)
    y = np.array([t0, 0.0, pt0, pp0])
    s = 0.5 * n
    axial0, alt0 = pp0 - s * math.cos(t0), pt0 - s * math.cos(t0)
    axial_drift = alt_drift = 0.0
    for _ in range(steps):
        y = rk4_step(f, y, h)
        axial_drift = max(axial_drift, abs(y[3] - s * math.cos(y[0]) - axial0))
        alt_drift = max(alt_drift, abs(y[2] - s * math.cos(y[0]) - alt0))
    return FlowCheck(period, axial_drift, alt_drift, abs(y[0] - t0) + abs(y[2] - pt0))
