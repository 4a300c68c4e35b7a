"""Hypothesis-testing exponents and finite-copy optimal errors.

Exponents are optimized over theta by a global grid followed by
golden-section refinement of the best cell.  Finite-``n`` quantities build
the tensor powers explicitly, so they are limited to a total dimension of
``DIM_CAP``.
"""
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import linops as la
from .divergences import relative_entropy, sandwiched, supports_orthogonal
from .errors import CapExceededError, ParameterError
from .numerics import grid_then_golden

DIM_CAP = 4096
N_GRID = 64
THETA_MAX = 64.0


@dataclass(frozen=True)
class HypothesisSet:
    """Null state ``omega`` with alternatives ``psi_1..psi_k``."""

    null_state: np.ndarray
    alternatives: tuple

    def __post_init__(self):
        omega = la.hermitize(la.as_matrix(self.null_state))
        alts = tuple(la.hermitize(la.as_matrix(a)) for a in self.alternatives)
        if not alts:
            raise ParameterError("a hypothesis set needs at least one alternative")
        if any(a.shape != omega.shape for a in alts):
            raise ParameterError("all hypotheses must share one dimension")
        object.__setattr__(self, "null_state", omega)
        object.__setattr__(self, "alternatives", alts)

    def pooled(self):
        """All states, alternatives first and the null state last."""
        return list(self.alternatives) + [self.null_state]


@dataclass(frozen=True)
class ExponentResult:
    """Exponent in nats per copy with the optimizing theta.

    ``at_edge`` is set when the optimizer sits on the boundary of a
    truncated search window, so the reported value is only a bound.
    """

    value: float
    optimizer: float
    grid_resolution: float
    finite: bool = True
    at_edge: bool = False
    extra: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _pair(psi, omega):
    psi, omega = la.hermitize(la.as_matrix(psi)), la.hermitize(la.as_matrix(omega))
    if psi.shape != omega.shape:
        raise ParameterError(f"state shapes differ: {psi.shape} vs {omega.shape}")
    return psi, omega


def _overlap(psi_es, omega_es, theta):
    """``tr(psi^theta omega^(1-theta))`` with the support-projector convention at 0 and 1."""
    P = la.mpow(None, theta, es=psi_es)
    W = la.mpow(None, 1.0 - theta, es=omega_es)
    return float(np.real(np.trace(P @ W)))


def chernoff(psi, omega, n_grid=N_GRID, tol=1e-10):
    """Quantum Chernoff distance ``-log inf_theta tr(psi^theta omega^(1-theta))``."""
    psi, omega = _pair(psi, omega)
    if supports_orthogonal(psi, omega):
        return ExponentResult(float("inf"), 0.5, 1.0 / (n_grid - 1), finite=False)
    pe, oe = la.eigh(psi), la.eigh(omega)

    def log_q(t):
        q = _overlap(pe, oe, t)
        return np.log(q) if q > 0 else -np.inf

    theta, val = grid_then_golden(log_q, 0.0, 1.0, n_grid=n_grid, tol=tol)
    return ExponentResult(max(-val, 0.0), theta, 1.0 / (n_grid - 1))


def hoeffding_objective(theta, r, psi, omega):
    """``((theta - 1)/theta)(r - D_theta)`` with the Petz divergence ``D_theta``.

    Written as ``((theta - 1) r - log Q_theta) / theta`` so it stays finite
    wherever the overlap ``Q_theta`` is positive.
    """
    psi, omega = _pair(psi, omega)
    q = float(np.real(np.trace(la.mpow(psi, theta) @ la.mpow(omega, 1.0 - theta))))
    if q <= 0:
        return -np.inf
    return ((theta - 1.0) * r - np.log(q)) / theta


def hoeffding(r, psi, omega, n_grid=N_GRID, tol=1e-10):
    """Hoeffding divergence ``sup_{theta in (0,1)} ((theta-1)/theta)(r - D_theta(psi||omega))``.

    The objective tends to 0 as ``theta -> 1``; that limit is a candidate for
    the supremum and is reported with optimizer 1.
    """
    if r < 0:
        raise ParameterError(f"hoeffding rate must be nonnegative, got {r}")
    psi, omega = _pair(psi, omega)
    pe, oe = la.eigh(psi), la.eigh(omega)

    def obj(t):
        q = _overlap(pe, oe, t)
        return ((t - 1.0) * r - np.log(q)) / t if q > 0 else -np.inf

    grid = np.linspace(0.0, 1.0, n_grid + 2)[1:-1]
    theta, val = grid_then_golden(obj, grid[0], grid[-1], tol=tol, maximize=True, grid=grid)
    if not val > 0.0:
        theta, val = 1.0, 0.0
    return ExponentResult(val, theta, 1.0 / (n_grid + 1), finite=bool(np.isfinite(val)))


def converse_hoeffding(r, psi, omega, theta_max=THETA_MAX, n_grid=N_GRID, tol=1e-10):
    """Converse Hoeffding divergence, ``sup_{theta > 1} ((theta-1)/theta)(r - sandwiched_theta)``.

    The supremum is taken over ``(1, theta_max]`` on a geometric grid in
    ``theta - 1``; ``at_edge`` flags an optimizer at ``theta_max``.
    """
    if not theta_max > 1:
        raise ParameterError(f"theta_max must exceed 1, got {theta_max}")
    psi, omega = _pair(psi, omega)

    def obj(t):
        d = sandwiched(t, psi, omega)
        if not d.finite:
            return -np.inf
        return (t - 1.0) / t * (r - d.value)

    grid = 1.0 + np.geomspace(1e-6, theta_max - 1.0, n_grid)
    theta, val = grid_then_golden(obj, grid[0], grid[-1], tol=tol, maximize=True, grid=grid)
    at_edge = bool(theta >= theta_max * (1 - 1e-12))
    resolution = float(np.log(grid[-1] - 1.0) - np.log(grid[-2] - 1.0))
    return ExponentResult(val, theta, resolution, finite=bool(np.isfinite(val)), at_edge=at_edge)


def sanov(K):
    """``min_i S(psi_i || omega)`` and the lowest index attaining it."""
    if not isinstance(K, HypothesisSet):
        raise ParameterError("sanov expects a HypothesisSet")
    vals = [relative_entropy(a, K.null_state).value for a in K.alternatives]
    idx = int(np.argmin(vals))
    return float(vals[idx]), idx


def multi_chernoff(K):
    """Minimum pairwise Chernoff distance over the pooled states.

    ``K`` is a :class:`HypothesisSet` (alternatives plus null) or a plain
    sequence of states.  Returns ``(value, (i, j))``.
    """
    states = K.pooled() if isinstance(K, HypothesisSet) else [la.as_matrix(s) for s in K]
    if len(states) < 2:
        raise ParameterError("multi_chernoff needs at least two states")
    best, arg = float("inf"), None
    for i, j in combinations(range(len(states)), 2):
        c = chernoff(states[i], states[j]).value
        if arg is None or c < best:
            best, arg = c, (i, j)
    return best, arg


# ---------------------------------------------------------------- finite n


def tensor_power(rho, n, cap=DIM_CAP):
    rho = la.as_matrix(rho)
    if n < 1:
        raise ParameterError(f"number of copies must be at least 1, got {n}")
    d = rho.shape[0]
    if d**n > cap:
        raise CapExceededError(d, n, cap)
    out = rho
    for _ in range(n - 1):
        out = np.kron(out, rho)
    return out


def helstrom_error(rho0, rho1, prior0, n=1, cap=DIM_CAP):
    """Minimal average error ``(1 - ||p rho0^n - (1-p) rho1^n||_1) / 2``."""
    if not 0 < prior0 < 1:
        raise ParameterError(f"prior must lie in (0,1), got {prior0}")
    rho0, rho1 = _pair(rho0, rho1)
    gap = prior0 * tensor_power(rho0, n, cap) - (1.0 - prior0) * tensor_power(rho1, n, cap)
    trace_norm = float(np.sum(np.abs(la.eigh(gap).values)))
    return max(0.5 * (1.0 - trace_norm), 0.0)


def _np_point(psi_n, omega_n, t):
    values, vectors = la.eigh(psi_n - t * omega_n)
    keep = values > la.CLIP_REL * max(np.max(np.abs(values)), 1e-300)
    V = vectors[:, keep]
    alpha = 1.0 - float(np.real(np.trace(la.dagger(V) @ psi_n @ V)))
    beta = float(np.real(np.trace(la.dagger(V) @ omega_n @ V)))
    return max(alpha, 0.0), max(beta, 0.0)


def neyman_pearson_curve(psi, omega, n, t_grid, cap=DIM_CAP):
    """Type I/II errors ``(alpha, beta)`` of the projector tests ``{psi^n - t omega^n > 0}``."""
    psi, omega = _pair(psi, omega)
    psi_n, omega_n = tensor_power(psi, n, cap), tensor_power(omega, n, cap)
    return [_np_point(psi_n, omega_n, float(t)) for t in np.atleast_1d(t_grid)]


def beta_at_alpha(psi, omega, n, alpha_max=0.05, cap=DIM_CAP, iters=200):
    """Smallest type II error of the projector tests with type I error ``<= alpha_max``.

    ``alpha`` grows with the threshold ``t`` while ``beta`` shrinks, so the
    largest admissible ``log t`` is located by bisection.  Returns
    ``(alpha, beta, t)``.
    """
    psi, omega = _pair(psi, omega)
    psi_n, omega_n = tensor_power(psi, n, cap), tensor_power(omega, n, cap)
    lo, hi = -50.0 * n, 50.0 * n
    best = _np_point(psi_n, omega_n, np.exp(lo))
    if best[0] > alpha_max:
        return best[0], best[1], float(np.exp(lo))
    t_best = lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        a, b = _np_point(psi_n, omega_n, np.exp(mid))
        if a <= alpha_max:
            lo, best, t_best = mid, (a, b), mid
        else:
            hi = mid
        if hi - lo < 1e-12:
            break
    return best[0], best[1], float(np.exp(t_best))


def stein_exponent(psi, omega, n, alpha_max=0.05, cap=DIM_CAP):
    """Finite-``n`` estimate ``-log beta_n / n`` at type I error ``<= alpha_max``."""
    _, beta, _ = beta_at_alpha(psi, omega, n, alpha_max, cap)
    return float("inf") if beta <= 0 else -np.log(beta) / n


def helstrom_slope(rho0, rho1, n, prior0=0.5, cap=DIM_CAP):
    """``-log E_n / n`` from :func:`helstrom_error`."""
    err = helstrom_error(rho0, rho1, prior0, n, cap)
    return float("inf") if err <= 0 else -np.log(err) / n


__all__ = [
    "HypothesisSet",
    "ExponentResult",
    "chernoff",
    "hoeffding",
    "hoeffding_objective",
    "converse_hoeffding",
    "sanov",
    "multi_chernoff",
    "tensor_power",
    "helstrom_error",
    "helstrom_slope",
    "neyman_pearson_curve",
    "beta_at_alpha",
    "stein_exponent",
]
