"""One-dimensional search and sequence extrapolation."""
import math

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_min(f, lo, hi, tol=1e-10, max_iter=200):
    """Minimize a unimodal ``f`` on ``[lo, hi]``.

    Returns ``(x_min, f_min)``.  The endpoints are compared at the end so a
    boundary minimum is reported exactly.
    """
    a, b = float(lo), float(hi)
    x1 = b - INV_PHI * (b - a)
    x2 = a + INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_PHI * (b - a)
            f2 = f(x2)
    x, fx = (x1, f1) if f1 <= f2 else (x2, f2)
    return x, fx


def grid_then_golden(f, lo, hi, n_grid=64, tol=1e-10, maximize=False, grid=None):
    """Global grid scan followed by golden-section refinement of the best cell.

    The grid is kept for multi-modal objectives; only the bracket around the
    best grid point is refined.  Returns ``(x_opt, f_opt)``.
    """
    sign = -1.0 if maximize else 1.0

    def g(x):
        val = f(x)
        return sign * val if np.isfinite(val) else np.inf

    xs = np.linspace(lo, hi, n_grid) if grid is None else np.asarray(grid, dtype=float)
    vals = np.array([g(x) for x in xs])
    k = int(np.argmin(vals))
    a = xs[max(k - 1, 0)]
    b = xs[min(k + 1, len(xs) - 1)]
    x, fx = golden_section_min(g, a, b, tol=tol)
    if vals[k] < fx:
        x, fx = xs[k], vals[k]
    return float(x), float(sign * fx)


def richardson(steps, values, order=1):
    """Extrapolate ``values(step) -> step = 0`` assuming an expansion in powers of ``step``.

    ``steps`` must be decreasing.  Builds the Neville-Richardson tableau to
    the requested order and returns its last entry.
    """
    h = np.asarray(steps, dtype=float)
    table = np.asarray(values, dtype=float).copy()
    order = min(order, len(table) - 1)
    for m in range(1, order + 1):
        # T_k^(m) = (h_{k-m} T_k - h_k T_{k-1}) / (h_{k-m} - h_k)
        table = (h[:-m] * table[1:] - h[m:] * table[:-1]) / (h[:-m] - h[m:])
    return float(table[-1])
