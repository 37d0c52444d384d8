"""Line bundles over S^2: monopole gauge fields, flux, clutching and holonomy.

Coordinates are the usual spherical angles (theta, phi).  The North chart
covers theta != pi and the South chart theta != 0.  Gauge potentials are kept
as sympy expressions so that curvature and gauge transformations are exact;
numerical callables are produced with ``lambdify`` on demand.

Sign conventions (natural units, hbar = c = 1):

* covariant derivative ``d - iA``;
* North potential ``A_phi = (n/2)(1 - cos theta)``, South ``A_phi = -(n/2)(1 + cos theta)``;
* a section's South representative is its North one times ``exp(-i n phi)``.

With n = -1 these reproduce Tamm's lowest level 1/2 with eigensections
``cos(theta/2)`` and ``sin(theta/2) exp(-i phi)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Callable, NamedTuple

import numpy as np
import sympy as sp

theta, phi = sp.symbols("theta phi", real=True)

CHERN_TOLERANCE = 1e-6
CLOSURE_TOLERANCE = 1e-12
POLE_TOLERANCE = 1e-9


class NonIntegralFlux(ValueError):
    """The total flux of a 2-form is not 2*pi times an integer."""

    def __init__(self, flux_over_2pi: float, residual: float):
        super().__init__(
            f"flux/2pi = {flux_over_2pi!r} is not an integer (residual {residual:.3e})"
        )
        self.flux_over_2pi = flux_over_2pi
        self.residual = residual


class CurveCrossesPole(ValueError):
    """A curve reaches the pole excluded from the chart it is integrated in."""


class Chart(enum.Enum):
    NORTH = "north"  # theta != pi
    SOUTH = "south"  # theta != 0

    @property
    def other(self) -> "Chart":
        return Chart.SOUTH if self is Chart.NORTH else Chart.NORTH


def _expr(value) -> sp.Expr:
    if isinstance(value, str):
        return sp.sympify(value, locals={"theta": theta, "phi": phi})
    return sp.sympify(value)


def _numeric(expr: sp.Expr) -> Callable:
    f = sp.lambdify((theta, phi), expr, modules="numpy")

    def evaluate(t, p=0.0):
        t = np.asarray(t, dtype=float)
        p = np.asarray(p, dtype=float)
        return np.broadcast_to(f(t, p), np.broadcast(t, p).shape).astype(float)

    return evaluate


@dataclass(frozen=True)
class GaugeField:
    """A U(1) connection on S^2 given by its two chart potentials.

    ``f_theta_phi`` is the only independent component of the curvature,
    ``F = f_theta_phi dtheta ^ dphi``.  ``n`` is the Chern number the field
    was built for (``None`` for user-supplied curvature that was never
    checked).
    """

    f_theta_phi: sp.Expr
    a_theta: dict
    a_phi: dict
    n: int | None = None
    label: str = field(default="", compare=False)

    def potential(self, chart: Chart) -> tuple[sp.Expr, sp.Expr]:
        return self.a_theta[chart], self.a_phi[chart]

    def curvature_expr(self, chart: Chart) -> sp.Expr:
        a_t, a_p = self.potential(chart)
        return sp.diff(a_p, theta) - sp.diff(a_t, phi)

    @cached_property
    def curvature(self) -> Callable:
        """``F_theta_phi(theta, phi)`` as a vectorized numpy callable."""
        return _numeric(self.f_theta_phi)

    @cached_property
    def _numeric_potentials(self) -> dict:
        return {
            c: (_numeric(self.a_theta[c]), _numeric(self.a_phi[c])) for c in Chart
        }

    def a_theta_at(self, t, p=0.0, chart: Chart = Chart.NORTH):
        return self._numeric_potentials[chart][0](t, p)

    def a_phi_at(self, t, p=0.0, chart: Chart = Chart.NORTH):
        return self._numeric_potentials[chart][1](t, p)

    def is_axisymmetric(self) -> bool:
        """True when neither potential depends on phi (needed for sector reduction)."""
        return all(
            not self.a_theta[c].has(phi) and not self.a_phi[c].has(phi) for c in Chart
        )


def monopole_field(n: int) -> GaugeField:
    """Constant-curvature field of the line bundle with first Chern class ``n``."""
    return _monopole_field(int(n))


@lru_cache(maxsize=64)
def _monopole_field(n: int) -> GaugeField:
    half = sp.Rational(n, 2)
    return GaugeField(
        f_theta_phi=half * sp.sin(theta),
        a_theta={Chart.NORTH: sp.Integer(0), Chart.SOUTH: sp.Integer(0)},
        a_phi={
            Chart.NORTH: half * (1 - sp.cos(theta)),
            Chart.SOUTH: -half * (1 + sp.cos(theta)),
        },
        n=n,
        label=f"monopole(n={n})",
    )


def gauge_field_from_curvature(f_theta_phi) -> GaugeField:
    """Build chart potentials for an axisymmetric curvature ``F_theta_phi(theta)``.

    The North potential is the cap flux ``int_0^theta F``; the South one is
    shifted by the total flux over 2*pi, which is an integer only for a
    genuine bundle curvature.
    """
    f = _expr(f_theta_phi)
    if f.has(phi):
        raise ValueError("only phi-independent curvature is supported")
    s = sp.Symbol("s", real=True)
    north = sp.integrate(f.subs(theta, s), (s, 0, theta))
    total = sp.integrate(f, (theta, 0, sp.pi))
    return GaugeField(
        f_theta_phi=f,
        a_theta={Chart.NORTH: sp.Integer(0), Chart.SOUTH: sp.Integer(0)},
        a_phi={Chart.NORTH: sp.simplify(north), Chart.SOUTH: sp.simplify(north - total)},
        n=None,
        label=f"F={f}",
    )


def flux(field: GaugeField, quadrature_points: int = 64) -> float:
    """Total flux of F over S^2.

    Composite Gauss-Legendre in theta (panels of at most 32 nodes) times the
    periodic trapezoid rule in phi.
    """
    if quadrature_points < 8:
        raise ValueError("quadrature_points must be >= 8")
    panels = max(1, math.ceil(quadrature_points / 32))
    per_panel = math.ceil(quadrature_points / panels)
    x, w = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(0.0, np.pi, panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    p = np.arange(quadrature_points) * (2 * np.pi / quadrature_points)
    values = field.curvature(t[:, None], p[None, :])
    return float(np.sum(wt[:, None] * values) * (2 * np.pi / quadrature_points))


class ChernNumber(NamedTuple):
    value: int
    residual: float


def chern_number(field: GaugeField, quadrature_points: int = 64) -> ChernNumber:
    """First Chern class ``(1/2pi) int F`` rounded to an integer.

    Raises :class:`NonIntegralFlux` when the pre-rounding residual is not
    below ``1e-6``.
    """
    c = flux(field, quadrature_points) / (2 * np.pi)
    value = round(c)
    residual = abs(c - value)
    if residual >= CHERN_TOLERANCE:
        raise NonIntegralFlux(c, residual)
    return ChernNumber(int(value), residual)


def dirac_condition(e_charge: float, g_monopole: float) -> tuple[int, float]:
    """Nearest integer to ``2 e g`` and the distance to it."""
    x = 2.0 * e_charge * g_monopole
    n = round(x)
    return int(n), abs(x - n)


def monopole_mass_estimate(alpha: float) -> float:
    """Monopole-to-electron mass ratio ``1/(2 alpha)^2`` for equal classical radii."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return 1.0 / (2.0 * alpha) ** 2


def transition_phase(n: int, phi_value):
    """Clutching function ``exp(-i n phi)`` taking North to South trivializations."""
    return np.exp(-1j * n * np.asarray(phi_value, dtype=float))


@dataclass(frozen=True)
class SectionChartRep:
    chart: Chart
    values: Callable  # (theta, phi) -> complex

    def __call__(self, t, p):
        return self.values(t, p)


def transform_section(s: SectionChartRep, n: int) -> SectionChartRep:
    """Re-express a section in the other chart of the bundle with Chern class ``n``."""
    sign = 1 if s.chart is Chart.NORTH else -1
    f = s.values

    def values(t, p):
        return f(t, p) * transition_phase(sign * n, p)

    return SectionChartRep(s.chart.other, values)


def gauge_transform(field: GaugeField, f) -> GaugeField:
    """``A -> A - df`` in both charts for a single-valued function ``f(theta, phi)``.

    Sections transform by ``exp(-i f)``; the curvature is untouched.
    """
    f = _expr(f)
    dt, dp = sp.diff(f, theta), sp.diff(f, phi)
    return GaugeField(
        f_theta_phi=field.f_theta_phi,
        a_theta={c: field.a_theta[c] - dt for c in Chart},
        a_phi={c: field.a_phi[c] - dp for c in Chart},
        n=field.n,
        label=f"{field.label} - d({f})",
    )


def _periodic_derivative(y: np.ndarray) -> np.ndarray:
    """Spectral derivative of uniformly sampled periodic data on [0, 1)."""
    k = np.fft.rfftfreq(y.size, d=1.0 / y.size)
    if y.size % 2 == 0:
        k[-1] = 0.0
    return np.fft.irfft(2j * np.pi * k * np.fft.rfft(y), n=y.size)


def holonomy(
    field: GaugeField,
    thetas,
    phis,
    chart: Chart = Chart.NORTH,
    reduce: bool = True,
) -> float:
    """Line integral of the connection around a closed curve.

    The curve is given by samples ``(thetas[k], phis[k])`` taken uniformly in
    a periodic parameter, with the last sample repeating the first point on
    the sphere (phi may differ by a multiple of 2*pi).  Derivatives are taken
    spectrally and the integral is the periodic trapezoid rule.  Returns the
    phase reduced to [0, 2*pi) unless ``reduce`` is False.
    """
    t = np.asarray(thetas, dtype=float)
    p = np.asarray(phis, dtype=float)
    if t.shape != p.shape or t.ndim != 1 or t.size < 3:
        raise ValueError("curve needs matching 1-d theta/phi samples")
    first = _to_cartesian(t[0], p[0])
    last = _to_cartesian(t[-1], p[-1])
    if np.linalg.norm(first - last) > CLOSURE_TOLERANCE:
        raise ValueError("curve is not closed")
    bad_pole = np.pi if chart is Chart.NORTH else 0.0
    if np.min(np.abs(t - bad_pole)) < POLE_TOLERANCE:
        raise CurveCrossesPole(f"curve touches the pole excluded from the {chart.value} chart")

    t, p = t[:-1], np.unwrap(p)[:-1]
    m = t.size
    winding = (np.unwrap(np.asarray(phis, dtype=float))[-1] - p[0]) / (2 * np.pi)
    s = np.arange(m) / m
    p_periodic = p - 2 * np.pi * winding * s
    dt = _periodic_derivative(t)
    dp = _periodic_derivative(p_periodic) + 2 * np.pi * winding
    integrand = field.a_theta_at(t, p, chart) * dt + field.a_phi_at(t, p, chart) * dp
    total = float(np.mean(integrand))
    return total % (2 * np.pi) if reduce else total


def latitude_circle(theta0: float, samples: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Samples of the latitude ``theta = theta0`` traversed once with increasing phi."""
    p = np.linspace(0.0, 2 * np.pi, samples + 1)
    return np.full(samples + 1, float(theta0)), p


def spherical_cap_boundary(
    center_theta: float, center_phi: float, radius: float, samples: int = 256
) -> tuple[np.ndarray, np.ndarray]:
    """Boundary of a geodesic disc, positively oriented around its centre."""
    c = _to_cartesian(center_theta, center_phi)
    e1 = np.array([np.cos(center_theta) * np.cos(center_phi),
                   np.cos(center_theta) * np.sin(center_phi),
                   -np.sin(center_theta)])
    e2 = np.cross(c, e1)
    u = np.linspace(0.0, 2 * np.pi, samples + 1)
    pts = (np.cos(radius) * c[None, :]
           + np.sin(radius) * (np.cos(u)[:, None] * e1 + np.sin(u)[:, None] * e2))
    th = np.arccos(np.clip(pts[:, 2], -1.0, 1.0))
    ph = np.unwrap(np.arctan2(pts[:, 1], pts[:, 0]))
    return th, ph


def _to_cartesian(t: float, p: float) -> np.ndarray:
    return np.array([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)])
