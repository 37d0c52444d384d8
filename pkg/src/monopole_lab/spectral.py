"""Spectra of the magnetic Laplacian on the round S^2.

A section ``f(theta) exp(i m phi)`` in the North chart of the bundle with
Chern class ``n`` reduces the magnetic Laplacian to the sector operator

    -(1/sin t) d/dt (sin t d/dt) + (m - a(t))^2 / sin^2 t,   a(t) = (n/2)(1 - cos t)

which is discretized by cell-centred second-order differences on
``t_i = (i + 1/2) pi / M`` and symmetrized with ``sqrt(sin t)``.  A
theta-component of the connection enters through unit-modulus link phases,
so gauge-equivalent potentials give unitarily equivalent matrices.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _tridiag
from .geometry import Chart, GaugeField, monopole_field

MIN_GRID = 64
DEFAULT_GRID = 2000
DEFAULT_CLUSTER_TOL = 1e-4
_MAX_BISECTION_STEPS = 200


class GridTooCoarse(ValueError):
    pass


class ConvergenceFailure(RuntimeError):
    pass


class ClusterAmbiguity(RuntimeError):
    pass


class Source(str, enum.Enum):
    EXACT = "ExactFormula"
    NUMERIC = "Numeric"
    SEMICLASSICAL = "Semiclassical"


@dataclass(frozen=True)
class SpectrumLevel:
    value: float
    multiplicity: int
    source: Source
    sectors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")


@dataclass(frozen=True, eq=False)
class SectorProblem:
    """Discretized sector operator ``T = B^{-1/2} K B^{-1/2}``.

    ``diag`` and ``offdiag`` are the real symmetric tridiagonal obtained
    after removing the link phases; ``link_phase`` restores the Hermitian
    matrix for a connection with nonzero theta-component.
    """

    n: int
    m: int
    grid: np.ndarray
    diag: np.ndarray
    offdiag: np.ndarray
    link_phase: np.ndarray
    potential: np.ndarray  # (m - A_phi)^2 / sin^2 at the nodes

    @property
    def size(self) -> int:
        return self.grid.size

    def hermitian_offdiag(self) -> np.ndarray:
        return self.offdiag * self.link_phase

    def dense(self) -> np.ndarray:
        """The full complex Hermitian matrix (for small grids and cross-checks)."""
        e = self.hermitian_offdiag()
        return np.diag(self.diag).astype(complex) + np.diag(e, 1) + np.diag(e.conj(), -1)


def _link_integrals(field: GaugeField, nodes: np.ndarray) -> np.ndarray:
    x, w = np.polynomial.legendre.leggauss(8)
    a, b = nodes[:-1], nodes[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    t = mid[:, None] + half[:, None] * x[None, :]
    return np.sum(w[None, :] * field.a_theta_at(t, 0.0, Chart.NORTH), axis=1) * half


def reduce_sector(n: int, m: int, grid_size: int = DEFAULT_GRID,
                  field: GaugeField | None = None) -> SectorProblem:
    """Finite-difference sector operator for Fourier index ``m`` (North chart)."""
    if grid_size < MIN_GRID:
        raise GridTooCoarse(f"grid_size must be >= {MIN_GRID}, got {grid_size}")
    if field is None:
        field = monopole_field(n)
    if not field.is_axisymmetric():
        raise ValueError("sector reduction needs a phi-independent connection")

    h = np.pi / grid_size
    t = (np.arange(grid_size) + 0.5) * h
    s = np.sin(t)
    s_half = np.sin(np.arange(1, grid_size) * h)
    s_left = np.concatenate(([0.0], s_half))
    s_right = np.concatenate((s_half, [0.0]))

    a_phi = field.a_phi_at(t, 0.0, Chart.NORTH)
    potential = (m - a_phi) ** 2 / s**2
    diag = (s_left + s_right) / (h * h * s) + potential
    offdiag = -s_half / (h * h * np.sqrt(s[:-1] * s[1:]))
    phase = np.exp(-1j * _link_integrals(field, t))

    return SectorProblem(n=n, m=m, grid=t, diag=diag, offdiag=offdiag,
                         link_phase=phase, potential=potential)


def _sturm_inputs(p: SectorProblem):
    # |U e|^2 with |U| = 1 up to rounding; use the modulus of the Hermitian entry
    e = np.abs(p.hermitian_offdiag())
    return np.ascontiguousarray(p.diag), np.ascontiguousarray(e * e), e


def solve_sector(p: SectorProblem, count: int) -> list[float]:
    """The ``count`` smallest eigenvalues of a sector, ascending.

    Sturm-sequence bisection, then two steps of inverse iteration and a
    Rayleigh quotient to polish each value.
    """
    if not 1 <= count <= p.size:
        raise ValueError(f"count must lie in [1, {p.size}]")
    d, e2, e = _sturm_inputs(p)
    values, widths = _tridiag.bisect_eigenvalues(d, e2, count, _MAX_BISECTION_STEPS)
    scale = 1e-12 * np.max(np.abs(d))
    bad = (widths < 0) & (np.abs(widths) > scale)
    if np.any(bad):
        raise ConvergenceFailure(
            f"bisection bracket stuck at width {np.abs(widths[bad]).max():.3e} (n={p.n}, m={p.m})"
        )
    out = []
    for sigma in values:
        _, rq = _tridiag.inverse_iteration(d, -e, sigma, 2)
        out.append(float(rq) if abs(rq - sigma) <= 1e-8 * (1.0 + abs(sigma)) else float(sigma))
    return sorted(out)


def count_below(p: SectorProblem, e_max: float) -> int:
    d, e2, _ = _sturm_inputs(p)
    return int(_tridiag.sturm_count(d, e2, float(e_max)))


def eigenvalues_below(p: SectorProblem, e_max: float) -> list[float]:
    k = count_below(p, e_max)
    if k == 0:
        return []
    return [v for v in solve_sector(p, k) if v <= e_max]


def _thread_count() -> int:
    raw = os.environ.get("MONOPOLE_LAB_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"MONOPOLE_LAB_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError("MONOPOLE_LAB_THREADS must be >= 0")
    return value or (os.cpu_count() or 1)


def sector_range(n: int, e_max: float, grid_size: int = DEFAULT_GRID,
                 field: GaugeField | None = None) -> list[int]:
    """Fourier indices whose sector can hold an eigenvalue ``<= e_max``.

    The discrete kinetic part is positive semidefinite, so a sector whose
    effective potential exceeds ``e_max`` at every node has no eigenvalue
    below it.  Beyond the range of ``A_phi`` the potential grows with ``|m|``,
    which ends the scan in each direction.
    """
    if field is None:
        field = monopole_field(n)
    h = np.pi / grid_size
    t = (np.arange(grid_size) + 0.5) * h
    s2 = np.sin(t) ** 2
    a = field.a_phi_at(t, 0.0, Chart.NORTH)
    a_lo, a_hi = float(np.min(a)), float(np.max(a))

    def admissible(m):
        return float(np.min((m - a) ** 2 / s2)) <= e_max

    ms = []
    for direction in (1, -1):
        m = 0 if direction == 1 else -1
        while True:
            if admissible(m):
                ms.append(m)
            elif (direction == 1 and m > a_hi) or (direction == -1 and m < a_lo):
                break
            m += direction
    return sorted(ms)


def cluster_levels(pairs, cluster_tol: float = DEFAULT_CLUSTER_TOL,
                   source: Source = Source.NUMERIC) -> list[SpectrumLevel]:
    """Group sorted ``(value, sector)`` pairs into degenerate levels.

    Consecutive values closer than ``cluster_tol * (1 + |E|)`` join one
    level.  Two levels closer than twice that tolerance are ambiguous.
    """
    pairs = sorted(pairs)
    groups: list[list[tuple[float, int]]] = []
    for value, m in pairs:
        if groups and value - groups[-1][-1][0] <= cluster_tol * (1.0 + abs(groups[-1][-1][0])):
            groups[-1].append((value, m))
        else:
            groups.append([(value, m)])
    for left, right in zip(groups, groups[1:]):
        gap = right[0][0] - left[-1][0]
        if gap < 2.0 * cluster_tol * (1.0 + abs(left[-1][0])):
            raise ClusterAmbiguity(
                f"levels near {left[-1][0]:.6g} and {right[0][0]:.6g} are only {gap:.3e} apart"
            )
    return [
        SpectrumLevel(
            value=float(np.mean([v for v, _ in g])),
            multiplicity=len(g),
            source=source,
            sectors=tuple(sorted(m for _, m in g)),
        )
        for g in groups
    ]


def numeric_spectrum(n: int, e_max: float, grid_size: int = DEFAULT_GRID,
                     cluster_tol: float = DEFAULT_CLUSTER_TOL,
                     field: GaugeField | None = None,
                     threads: int | None = None) -> list[SpectrumLevel]:
    """All numerically resolved levels ``<= e_max`` with multiplicities."""
    if e_max <= 0:
        raise ValueError("e_max must be positive")
    if field is None:
        field = monopole_field(n)
    ms = sector_range(n, e_max, grid_size, field)

    def run(m):
        return [(v, m) for v in eigenvalues_below(reduce_sector(n, m, grid_size, field), e_max)]

    workers = _thread_count() if threads is None else max(1, threads)
    if workers == 1 or len(ms) == 1:
        chunks = [run(m) for m in ms]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(run, ms))
    return cluster_levels([pair for chunk in chunks for pair in chunk], cluster_tol)


def exact_level(N: int, j: int) -> float:
    return j * (j + 1) + 0.5 * N * (2 * j + 1)


def exact_spectrum(N: int, j_max: int) -> list[SpectrumLevel]:
    """Closed-form levels ``j(j+1) + (N/2)(2j+1)`` with multiplicity ``2j+1+N``."""
    if N < 0 or j_max < 0:
        raise ValueError("N and j_max must be nonnegative")
    return [SpectrumLevel(exact_level(N, j), 2 * j + 1 + N, Source.EXACT) for j in range(j_max + 1)]


def tamm_spectrum(j_max: int) -> list[SpectrumLevel]:
    """Tamm's levels ``j^2 + 2j + 1/2`` with multiplicity ``2j+2`` (the n = -1 monopole)."""
    return [SpectrumLevel(j * j + 2 * j + 0.5, 2 * j + 2, Source.EXACT) for j in range(j_max + 1)]


@dataclass(frozen=True)
class LevelComparison:
    index: int
    value_a: float
    value_b: float
    abs_error: float
    rel_error: float
    multiplicity_a: int
    multiplicity_b: int

    @property
    def multiplicity_match(self) -> bool:
        return self.multiplicity_a == self.multiplicity_b


@dataclass(frozen=True)
class SpectrumComparison:
    rows: list[LevelComparison] = field(default_factory=list)

    @property
    def max_abs_error(self) -> float:
        return max((r.abs_error for r in self.rows), default=0.0)

    @property
    def max_rel_error(self) -> float:
        return max((r.rel_error for r in self.rows), default=0.0)

    @property
    def multiplicity_mismatches(self) -> list[int]:
        return [r.index for r in self.rows if not r.multiplicity_match]

    def passes(self, rel_tol: float) -> bool:
        return self.max_rel_error <= rel_tol and not self.multiplicity_mismatches


def compare_spectra(a: list[SpectrumLevel], b: list[SpectrumLevel], k: int) -> SpectrumComparison:
    """Level-by-level errors of ``a`` against reference ``b`` for the first ``k`` levels.

    The relative error falls back to the absolute one where the reference is 0.
    """
    if k > min(len(a), len(b)):
        raise ValueError(f"k={k} exceeds available levels ({len(a)}, {len(b)})")
    rows = []
    for i in range(k):
        x, y = a[i], b[i]
        err = abs(x.value - y.value)
        rows.append(LevelComparison(
            index=i, value_a=x.value, value_b=y.value, abs_error=err,
            rel_error=err / abs(y.value) if y.value != 0 else err,
            multiplicity_a=x.multiplicity, multiplicity_b=y.multiplicity,
        ))
    return SpectrumComparison(rows)
