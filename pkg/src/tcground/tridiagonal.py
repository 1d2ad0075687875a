"""Lowest eigenpair of a real symmetric tridiagonal matrix.

Bisection on the Sturm sequence count brackets the smallest eigenvalue to
working precision; inverse iteration with a pivoted tridiagonal LU then
recovers its eigenvector. Only the extreme pair is ever needed here.
"""
from __future__ import annotations

import math
import sys

import numpy as np

EPS = np.finfo(float).eps
SAFE_MIN = sys.float_info.min


class ConvergenceError(RuntimeError):
    pass


def gershgorin_bounds(diag, offdiag) -> tuple[float, float]:
    radius = np.zeros(len(diag))
    a = np.abs(offdiag)
    radius[:-1] += a
    radius[1:] += a
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def sturm_count(diag, offdiag_sq, x: float, pivmin: float) -> int:
    """Number of eigenvalues strictly less than ``x``."""
    count = 0
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    if q < 0:
        count += 1
    for i in range(1, len(diag)):
        q = diag[i] - x - offdiag_sq[i - 1] / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0:
            count += 1
    return count


def smallest_eigenvalue(diag, offdiag, max_iter: int = 200) -> float:
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if len(diag) == 1:
        return float(diag[0])
    off_sq = offdiag ** 2
    pivmin = SAFE_MIN * max(1.0, float(off_sq.max(initial=0.0)))
    lo, hi = gershgorin_bounds(diag, offdiag)
    scale = max(abs(lo), abs(hi), SAFE_MIN)
    atol = EPS * scale
    lo -= 2 * atol + pivmin
    hi += 2 * atol + pivmin
    for _ in range(max_iter):
        if hi - lo <= 2 * EPS * max(abs(lo), abs(hi)) + atol:
            break
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if sturm_count(diag, off_sq, mid, pivmin) >= 1:
            hi = mid
        else:
            lo = mid
    else:
        raise ConvergenceError(f"bisection did not converge in {max_iter} steps")
    return 0.5 * (lo + hi)


def _lu_factor(lower, diag, upper, tiny):
    """Gaussian elimination with partial pivoting (LAPACK gttrf layout)."""
    n = len(diag)
    dl, d, du = lower.copy(), diag.copy(), upper.copy()
    du2 = np.zeros(max(n - 2, 0))
    swap = np.zeros(max(n - 1, 0), dtype=bool)
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if abs(d[i]) < tiny:
                d[i] = math.copysign(tiny, d[i])
            fact = dl[i] / d[i]
            dl[i] = fact
            d[i + 1] -= fact * du[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -fact * du[i + 1]
            swap[i] = True
    if abs(d[n - 1]) < tiny:
        d[n - 1] = math.copysign(tiny, d[n - 1])
    return dl, d, du, du2, swap


def _lu_solve(factors, rhs):
    dl, d, du, du2, swap = factors
    b = rhs.copy()
    n = len(b)
    for i in range(n - 1):
        if swap[i]:
            temp = b[i] - dl[i] * b[i + 1]
            b[i] = b[i + 1]
            b[i + 1] = temp
        else:
            b[i + 1] -= dl[i] * b[i]
    b[n - 1] /= d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]
    return b


def tridiagonal_solve(lower, diag, upper, rhs):
    """Solve a general tridiagonal system with partial pivoting."""
    diag = np.asarray(diag, dtype=float)
    norm = float(np.abs(diag).max(initial=0.0)) or 1.0
    factors = _lu_factor(np.asarray(lower, float), diag, np.asarray(upper, float), EPS * norm)
    return _lu_solve(factors, np.asarray(rhs, dtype=float))


def matvec(diag, offdiag, x):
    y = diag * x
    y[:-1] += offdiag * x[1:]
    y[1:] += offdiag * x[:-1]
    return y


def inf_norm(diag, offdiag) -> float:
    row = np.abs(diag).astype(float)
    a = np.abs(offdiag)
    row[:-1] += a
    row[1:] += a
    return float(row.max())


def lowest_eigenpair(diag, offdiag, rtol: float = 1e-10,
                     max_iter: int = 8) -> tuple[float, np.ndarray, float]:
    """Smallest eigenvalue, its unit eigenvector and the residual norm.

    The eigenvector sign is fixed so that its largest-magnitude entry is
    positive. Raises :class:`ConvergenceError` when the residual
    ``||T v - E v||`` cannot be brought below ``rtol * max(1, ||T||_inf)``.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    n = len(diag)
    if n == 1:
        return float(diag[0]), np.ones(1), 0.0

    norm = inf_norm(diag, offdiag)
    bound = rtol * max(1.0, norm)
    # Work on T / ||T|| so tiny or huge entries neither underflow nor overflow,
    # and split off couplings below working precision.
    scale = norm or 1.0
    d, e = diag / scale, offdiag / scale
    e = np.where(np.abs(e) < EPS, 0.0, e)
    shift = smallest_eigenvalue(d, e)
    value = shift * scale
    factors = _lu_factor(e, d - shift, e, EPS)

    # Deterministic start with no special alignment to any eigenvector.
    x = 1.0 + 0.5 * np.cos(np.arange(n) * 1.7)
    residual = math.inf
    for _ in range(max_iter):
        x = _lu_solve(factors, x)
        x /= np.linalg.norm(x)
        residual = float(np.linalg.norm(matvec(diag, offdiag, x) - value * x))
        if residual <= bound:
            break
    else:
        raise ConvergenceError(f"inverse iteration residual {residual:.3g} exceeds {bound:.3g}")

    if x[np.argmax(np.abs(x))] < 0:
        x = -x
    return value, x, residual
