"""Sturm-sequence bisection for real symmetric tridiagonal matrices.

``d`` is the diagonal, ``e2`` the squared off-diagonal (length ``len(d) - 1``).
Only ``|e|`` matters, so complex Hermitian tridiagonals are handled by
passing ``|e|**2``.
"""

import numpy as np
from numba import njit

_TINY = 1e-300


@njit(cache=True, nogil=True)
def sturm_count(d, e2, x):
    """Number of eigenvalues strictly below ``x``."""
    count = 0
    q = d[0] - x
    if q < 0.0:
        count += 1
    for i in range(1, d.size):
        if q == 0.0:
            q = _TINY
        q = d[i] - x - e2[i - 1] / q
        if q < 0.0:
            count += 1
    return count


@njit(cache=True, nogil=True)
def gershgorin(d, e2):
    e = np.sqrt(e2)
    lo = np.inf
    hi = -np.inf
    n = d.size
    for i in range(n):
        r = 0.0
        if i > 0:
            r += e[i - 1]
        if i < n - 1:
            r += e[i]
        lo = min(lo, d[i] - r)
        hi = max(hi, d[i] + r)
    return lo, hi


@njit(cache=True, nogil=True)
def bisect_eigenvalues(d, e2, k, max_iter):
    """The ``k`` smallest eigenvalues and the final bracket widths.

    A negative width flags an eigenvalue whose bracket failed to collapse
    within ``max_iter`` halvings.
    """
    lo0, hi0 = gershgorin(d, e2)
    span = hi0 - lo0
    lo0 -= 1e-12 * span + _TINY
    hi0 += 1e-12 * span + _TINY
    eps = 2.220446049250313e-16
    values = np.empty(k)
    widths = np.empty(k)
    for idx in range(k):
        lo = lo0
        hi = hi0
        converged = False
        for _ in range(max_iter):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                converged = True
                break
            if sturm_count(d, e2, mid) > idx:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 2.0 * eps * max(abs(lo), abs(hi)) + _TINY:
                converged = True
                break
        values[idx] = 0.5 * (lo + hi)
        widths[idx] = (hi - lo) if converged else -(hi - lo)
        lo0 = lo  # eigenvalues ascend; reuse the lower end
    return values, widths


@njit(cache=True, nogil=True)
def _solve_shifted(d, e, sigma, b):
    # Thomas algorithm with partial safeguarding of tiny pivots.
    n = d.size
    c = np.empty(n)
    x = np.empty(n)
    piv = d[0] - sigma
    if abs(piv) < _TINY:
        piv = _TINY
    x[0] = b[0] / piv
    for i in range(1, n):
        c[i - 1] = e[i - 1] / piv
        piv = d[i] - sigma - e[i - 1] * c[i - 1]
        if abs(piv) < 1e-290:
            piv = 1e-290
        x[i] = (b[i] - e[i - 1] * x[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        x[i] -= c[i] * x[i + 1]
    return x


@njit(cache=True, nogil=True)
def inverse_iteration(d, e, sigma, steps):
    """Eigenvector near ``sigma`` and its Rayleigh quotient."""
    n = d.size
    v = np.empty(n)
    for i in range(n):
        v[i] = 1.0 + 0.01 * ((i * 7919) % 101) / 101.0
    v /= np.sqrt(np.sum(v * v))
    for _ in range(steps):
        v = _solve_shifted(d, e, sigma, v)
        v /= np.sqrt(np.sum(v * v))
    tv = d * v
    tv[:-1] += e * v[1:]
    tv[1:] += e * v[:-1]
    return v, np.sum(v * tv)
