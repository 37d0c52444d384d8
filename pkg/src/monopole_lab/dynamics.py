"""Poincare's charged particle in the field of a magnetic pole at the origin.

Equation of motion ``r'' = (lam / r^3) r x r'``.  Besides the energy
``|r'|^2`` it conserves the vector ``K = r x r' + lam r/|r|``, so the
particle stays on the cone ``<K, r> = lam |r|`` and moves along one of its
geodesics.  ``lam`` relates to the pole strength by ``H0 = -m c lam / q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

SINGULAR_RADIUS = 1e-12


class SingularOrigin(RuntimeError):
    """The particle reached the monopole at the origin."""

    def __init__(self, message: str, partial: "Trajectory | None" = None):
        super().__init__(message)
        self.partial = partial


class DegenerateCone(ValueError):
    pass


@dataclass(frozen=True)
class TrajectoryState:
    r: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float))


@dataclass(frozen=True)
class Trajectory:
    """Uniformly stepped samples; ``positions``/``velocities`` have shape (k, 3)."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    lam: float
    step: float
    complete: bool = True

    def __len__(self):
        return self.times.size

    def state(self, i: int) -> TrajectoryState:
        return TrajectoryState(self.positions[i], self.velocities[i], float(self.times[i]))


def rk4_step(f: Callable, y: np.ndarray, h: float) -> np.ndarray:
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _acceleration(r, v, lam):
    rn = math.sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2])
    if rn < SINGULAR_RADIUS:
        raise SingularOrigin(f"|r| = {rn:.3e} at the monopole")
    return (lam / rn**3) * np.cross(r, v)


def poincare_rhs(s: TrajectoryState, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """``(dr/dt, dv/dt)`` for the state ``s``."""
    return s.v.copy(), _acceleration(s.r, s.v, lam)


def integrate(s0: TrajectoryState, lam: float, step: float = 1e-3, duration: float = 10.0,
              backward: bool = False) -> Trajectory:
    """Fixed-step classical RK4 over ``ceil(duration/step)`` steps.

    With ``backward=True`` time runs from ``s0.t`` towards ``s0.t - duration``.
    On reaching the origin a :class:`SingularOrigin` is raised carrying the
    partial trajectory (``complete=False``).
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if duration < step:
        raise ValueError("duration must be at least one step")
    steps = math.ceil(duration / step - 1e-9)
    h = -step if backward else step

    def f(y):
        return np.concatenate((y[3:], _acceleration(y[:3], y[3:], lam)))

    ys = np.empty((steps + 1, 6))
    ys[0, :3], ys[0, 3:] = s0.r, s0.v
    times = s0.t + h * np.arange(steps + 1)
    for i in range(steps):
        try:
            ys[i + 1] = rk4_step(f, ys[i], h)
        except SingularOrigin as exc:
            partial = Trajectory(times[: i + 1], ys[: i + 1, :3].copy(), ys[: i + 1, 3:].copy(),
                                 lam, step, complete=False)
            raise SingularOrigin(str(exc), partial) from None
    return Trajectory(times, ys[:, :3], ys[:, 3:], lam, step)


def conserved_vector(s: TrajectoryState, lam: float) -> np.ndarray:
    """``r x v + lam r/|r|``."""
    rn = np.linalg.norm(s.r)
    if rn < SINGULAR_RADIUS:
        raise SingularOrigin(f"|r| = {rn:.3e} at the monopole")
    return np.cross(s.r, s.v) + lam * s.r / rn


def conserved_vectors(tr: Trajectory) -> np.ndarray:
    rn = np.linalg.norm(tr.positions, axis=1)
    return np.cross(tr.positions, tr.velocities) + tr.lam * tr.positions / rn[:, None]


def cone_residual(tr: Trajectory) -> float:
    """Largest ``|<K0, r> - lam |r|| / (1 + |r|)`` along the trajectory."""
    k0 = conserved_vector(tr.state(0), tr.lam)
    rn = np.linalg.norm(tr.positions, axis=1)
    return float(np.max(np.abs(tr.positions @ k0 - tr.lam * rn) / (1.0 + rn)))


def energy_drift(tr: Trajectory) -> float:
    speed2 = np.sum(tr.velocities**2, axis=1)
    return float(np.max(np.abs(speed2 - speed2[0])))


def vector_drift(tr: Trajectory) -> float:
    k = conserved_vectors(tr)
    return float(np.max(np.abs(k - k[0])))


@dataclass(frozen=True)
class QuadraticFit:
    C: float
    B: float
    A: float
    rms: float


def radial_fit(tr: Trajectory) -> QuadraticFit:
    """Least-squares fit ``r^2 = C t^2 + 2 B t + A`` (time measured from the start)."""
    t = tr.times - tr.times[0]
    r2 = np.sum(tr.positions**2, axis=1)
    design = np.column_stack((t * t, 2.0 * t, np.ones_like(t)))
    coef, *_ = np.linalg.lstsq(design, r2, rcond=None)
    rms = float(np.sqrt(np.mean((design @ coef - r2) ** 2)))
    return QuadraticFit(float(coef[0]), float(coef[1]), float(coef[2]), rms)


def cone_half_angle(tr: Trajectory) -> float:
    k0 = conserved_vector(tr.state(0), tr.lam)
    kn = np.linalg.norm(k0)
    if kn <= abs(tr.lam) + 1e-12:
        raise DegenerateCone("|K| <= |lambda|: the cone closes to a ray")
    return math.acos(tr.lam / kn)


def unroll_cone(tr: Trajectory) -> np.ndarray:
    """Develop the trajectory's cone isometrically onto the plane.

    A point at distance ``rho`` from the apex and azimuth ``psi`` around the
    axis ``K0`` goes to polar coordinates ``(rho, sin(alpha) psi)``, with the
    azimuth measured from the initial point and unwrapped continuously.
    Returns an array of shape (k, 2).  ``lam = 0`` gives the plane itself.
    """
    alpha = cone_half_angle(tr)
    k0 = conserved_vector(tr.state(0), tr.lam)
    axis = k0 / np.linalg.norm(k0)
    radial = tr.positions - np.outer(tr.positions @ axis, axis)
    e1 = radial[0] / np.linalg.norm(radial[0])
    e2 = np.cross(axis, e1)
    psi = np.unwrap(np.arctan2(radial @ e2, radial @ e1))
    rho = np.linalg.norm(tr.positions, axis=1)
    ang = math.sin(alpha) * psi
    return np.column_stack((rho * np.cos(ang), rho * np.sin(ang)))


def discrete_curvature(curve: np.ndarray) -> np.ndarray:
    """Menger curvature of consecutive point triples."""
    a, b, c = curve[:-2], curve[1:-1], curve[2:]
    ab, bc, ca = b - a, c - b, a - c
    cross = ab[:, 0] * bc[:, 1] - ab[:, 1] * bc[:, 0]
    denom = (np.linalg.norm(ab, axis=1) * np.linalg.norm(bc, axis=1) * np.linalg.norm(ca, axis=1))
    return 2.0 * np.abs(cross) / denom


def polyline_length(curve: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(curve, axis=0), axis=1)))


def path_length(tr: Trajectory) -> float:
    """``int |v| dt`` by the trapezoid rule."""
    speed = np.linalg.norm(tr.velocities, axis=1)
    return float(abs(np.trapezoid(speed, tr.times)))


@dataclass(frozen=True)
class InvariantsReport:
    energy_drift: float
    vector_drift: float
    cone_residual: float
    fit: QuadraticFit
    max_curvature: float

    thresholds = {
        "energy_drift": 1e-8,
        "vector_drift": 1e-8,
        "cone_residual": 1e-7,
        "quadratic_fit_rms": 1e-8,
        "unrolled_curvature": 1e-5,
    }

    def metrics(self) -> dict:
        return {
            "energy_drift": self.energy_drift,
            "vector_drift": self.vector_drift,
            "cone_residual": self.cone_residual,
            "quadratic_fit_rms": self.fit.rms,
            "unrolled_curvature": self.max_curvature,
        }

    def passed(self) -> dict:
        return {k: v < self.thresholds[k] for k, v in self.metrics().items()}


def invariants_report(tr: Trajectory) -> InvariantsReport:
    curve = unroll_cone(tr)
    return InvariantsReport(
        energy_drift=energy_drift(tr),
        vector_drift=vector_drift(tr),
        cone_residual=cone_residual(tr),
        fit=radial_fit(tr),
        max_curvature=float(np.max(discrete_curvature(curve))) if len(tr) >= 3 else 0.0,
    )
