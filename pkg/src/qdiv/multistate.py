"""Kubo-Ando means and multi-state Renyi divergences.

The multi-state measure of ``psi_1..psi_n`` relative to ``omega`` with
weights ``theta_1..theta_n`` (``theta_0 = 1 - sum theta_i``) and geometric
mean chain ``alpha_1..alpha_{n-1}`` is

    -2r / prod(1 - theta_i) * log || (X_1 #_a1 (X_2 #_a2 ... X_n))^(1/2) omega^(theta_0/2r) ||_2r

with ``X_i = psi_i^(theta_i / (r gamma_i))``.  The chain associates to the
right, and the exponents are scaled by the gamma weights so that commuting
inputs give an alpha-independent value.
"""
from dataclasses import dataclass

import numpy as np

from . import linops as la
from .divergences import DivergenceValue, relative_entropy
from .errors import ParameterError, PreconditionError
from .numerics import richardson
from .states import ModularOp, omega_vector, pnorm_omega, require_full_rank


@dataclass(frozen=True)
class ThetaWeights:
    thetas: tuple

    def __post_init__(self):
        th = tuple(float(t) for t in np.atleast_1d(self.thetas))
        object.__setattr__(self, "thetas", th)
        if any(t < 0 or t > 1 for t in th):
            raise ParameterError(f"each theta must lie in [0,1], got {th}")
        if sum(th) > 1 + 1e-12:
            raise ParameterError(f"thetas sum to {sum(th)} > 1")

    @property
    def theta0(self):
        return max(0.0, 1.0 - sum(self.thetas))

    def __len__(self):
        return len(self.thetas)


def gamma_weights(alphas):
    """``gamma_i = (1 - alpha_i) * alpha_1 ... alpha_{i-1}`` with ``alpha_n = 0``."""
    alphas = [float(a) for a in alphas]
    if any(a < 0 or a > 1 for a in alphas):
        raise ParameterError(f"alphas must lie in [0,1], got {alphas}")
    gammas = []
    prefix = 1.0
    for a in alphas + [0.0]:
        gammas.append((1.0 - a) * prefix)
        prefix *= a
    return np.array(gammas)


@dataclass(frozen=True)
class AlphaChain:
    alphas: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        gamma_weights(self.alphas)

    @property
    def gammas(self):
        return gamma_weights(self.alphas)


@dataclass(frozen=True)
class MeanSpec:
    """Operator mean ``#_f``; ``kind="power"`` is the weighted geometric mean."""

    kind: str = "power"
    alpha: float = 0.5
    f: object = None

    def __post_init__(self):
        if self.kind not in ("power", "general"):
            raise ParameterError(f"unknown mean kind {self.kind!r}")
        if self.kind == "general":
            if not callable(self.f):
                raise ParameterError("general mean needs a callable f")
            one = float(np.real(np.asarray(self.f(np.array([1.0])))[0]))
            if abs(one - 1.0) > la.TOL_EQ:
                raise ParameterError(f"mean function must satisfy f(1) = 1, got {one}")
        elif not 0 <= self.alpha <= 1:
            raise ParameterError(f"geometric mean weight must lie in [0,1], got {self.alpha}")

    @classmethod
    def power(cls, alpha):
        return cls("power", float(alpha))

    @classmethod
    def general(cls, f):
        return cls("general", f=f)

    def __call__(self, x):
        if self.kind == "power":
            return np.power(x, self.alpha)
        return self.f(x)


def _as_spec(spec):
    return spec if isinstance(spec, MeanSpec) else MeanSpec.power(spec)


def kubo_ando_mean(X, Y, spec):
    """``X^(1/2) f(X^(-1/2) Y X^(-1/2)) X^(1/2)`` for positive definite ``X``.

    ``spec`` is a :class:`MeanSpec` or a float ``alpha`` for the weighted
    geometric mean.
    """
    spec = _as_spec(spec)
    X, Y = la.as_matrix(X), la.as_matrix(Y)
    es = la.eigh(X)
    if not es.values[0] > la.CLIP_REL * es.values[-1]:
        raise PreconditionError(
            f"outer argument of the mean must be positive definite (min eigenvalue {es.values[0]:.3e})"
        )
    if spec.kind == "power" and spec.alpha == 0.0:
        return la.hermitize(X)
    x_half = la.mpow(X, 0.5, es=es)
    x_ihalf = la.mpow(X, -0.5, es=es)
    inner = la.hermitize(x_ihalf @ Y @ x_ihalf)
    if spec.kind == "power":
        middle = la.mpow(inner, spec.alpha)
    else:
        middle = la.apply_fn(inner, spec)
    return la.hermitize(x_half @ middle @ x_half)


def chained_mean(ops, specs):
    """Right-associated fold ``X_1 #_f1 (X_2 #_f2 (... X_n))``."""
    ops = list(ops)
    specs = list(specs)
    if len(specs) != len(ops) - 1:
        raise ParameterError(f"need {len(ops) - 1} means for {len(ops)} operators, got {len(specs)}")
    acc = la.as_matrix(ops[-1])
    for X, spec in zip(reversed(ops[:-1]), reversed(specs)):
        acc = kubo_ando_mean(X, acc, spec)
    return acc


def _exponents(thetas, r, gammas):
    out = []
    for i, (t, g) in enumerate(zip(thetas, gammas)):
        if g == 0.0:
            if t > 0:
                raise ParameterError(f"gamma_{i + 1} = 0 with theta_{i + 1} = {t} > 0: exponent undefined")
            out.append(0.0)
        else:
            out.append(t / (r * g))
    return out


def _is_identity_power(base, e):
    """True when ``base^e`` is the identity: ``e = 0`` on a full-rank base."""
    if e != 0.0:
        return False
    values = la.eigh(base).values
    return bool(values[0] > la.rank_floor(values))


def _power_chain_norm(bases, exponents, alphas, omega, omega_exp, p):
    """``|| (X_1 #_a1 (... X_n))^(1/2) omega^omega_exp ||_p`` with ``X_i = base_i^e_i``.

    The chain is kept as a power ``base_n^e`` while the leading factors are
    identities, using ``I #_a Y^e = Y^(e a)``.  Materializing a large power
    and taking a small power of it again would lose every eigenvalue below
    the rank floor of the intermediate matrix.
    """
    base, e, acc = bases[-1], exponents[-1], None
    for X, x_exp, a in zip(reversed(bases[:-1]), reversed(exponents[:-1]), reversed(alphas)):
        if _is_identity_power(X, x_exp):
            if acc is None:
                e *= a
            else:
                acc = la.mpow(acc, a)
            continue
        if acc is None:
            acc = la.mpow(base, e)
        acc = kubo_ando_mean(la.mpow(X, x_exp), acc, a)
    if acc is None:
        return la.power_product_norm(base, e / 2.0, omega, omega_exp, p)
    return la.power_product_norm(acc, 0.5, omega, omega_exp, p)


def _prefactor(thetas, r):
    return -2.0 * r / float(np.prod([1.0 - t for t in thetas]))


def _validate_multi(weights, chain, states, omega, r):
    if not isinstance(weights, ThetaWeights):
        weights = ThetaWeights(tuple(weights))
    if not isinstance(chain, AlphaChain):
        chain = AlphaChain(tuple(chain))
    states = [la.hermitize(la.as_matrix(s)) for s in states]
    omega = la.hermitize(la.as_matrix(omega))
    n = len(states)
    if len(weights) != n:
        raise ParameterError(f"{len(weights)} weights for {n} states")
    if len(chain.alphas) != n - 1:
        raise ParameterError(f"alpha chain of length {len(chain.alphas)} for {n} states")
    if any(s.shape != omega.shape for s in states):
        raise ParameterError("state dimensions differ")
    if any(t == 1.0 for t in weights.thetas):
        raise ParameterError("theta_i = 1 makes the prefactor singular")
    if not r > 0:
        raise ParameterError(f"r must be positive, got {r}")
    require_full_rank(omega)
    return weights, chain, states, omega


def multi_state(weights, r, chain, states, omega, normalized=False):
    """Multi-state Renyi divergence in matrix form.

    Parameters
    ----------
    weights : ThetaWeights or sequence of float
        ``theta_1..theta_n``; ``theta_0`` is the remainder.
    r : float
        Schatten index parameter (norm index ``2r``).
    chain : AlphaChain or sequence of float
        Geometric mean weights ``alpha_1..alpha_{n-1}``.
    states : sequence of ndarray
        ``psi_1..psi_n``; all but the last must be positive definite.
    omega : ndarray
        Full-rank reference state.
    normalized : bool
        Divide by ``1 - theta_0`` (the hat-normalized variant).
    """
    weights, chain, states, omega = _validate_multi(weights, chain, states, omega, r)
    thetas = weights.thetas
    expo = _exponents(thetas, r, chain.gammas)
    log_norm = np.log(_power_chain_norm(states, expo, list(chain.alphas), omega, weights.theta0 / (2.0 * r), 2.0 * r))
    value = _prefactor(thetas, r) * log_norm
    family = "multi_state"
    if normalized:
        if weights.theta0 == 1.0:
            raise ParameterError("hat normalization needs theta_0 < 1")
        value /= 1.0 - weights.theta0
        family = "multi_state_hat"
    return DivergenceValue(float(value), True, family,
                           {"thetas": thetas, "r": r, "alphas": chain.alphas})


def three_state(theta1, theta2, r, alpha, psi1, psi2, omega):
    """Three-state Renyi divergence in matrix form.

    ``-2r/((1-t1)(1-t2)) log || (psi1^(t1/((1-a) r)) #_a psi2^(t2/(a r)))^(1/2) omega^(t0/2r) ||_2r``
    """
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0,1), got {alpha}")
    weights = ThetaWeights((theta1, theta2))
    if theta1 == 1.0 or theta2 == 1.0:
        raise ParameterError("theta_i = 1 makes the prefactor singular")
    psi1, psi2, omega = (la.hermitize(la.as_matrix(m)) for m in (psi1, psi2, omega))
    require_full_rank(omega)
    expo = [theta1 / ((1.0 - alpha) * r), theta2 / (alpha * r)]
    norm = _power_chain_norm([psi1, psi2], expo, [alpha], omega, weights.theta0 / (2.0 * r), 2.0 * r)
    value = -2.0 * r / ((1.0 - theta1) * (1.0 - theta2)) * np.log(norm)
    return DivergenceValue(float(value), True, "three_state",
                           {"thetas": (theta1, theta2), "r": r, "alpha": alpha})


def _modular_chain_norm(exponents, specs, states, omega, r):
    deltas = [ModularOp(s, omega).matrix(e) for s, e in zip(states, exponents)]
    M = chained_mean(deltas, specs)
    root = la.mpow(M, 0.5)
    return pnorm_omega(root @ omega_vector(omega), omega, 2.0 * r)


def multi_state_modular(weights, r, chain, states, omega, normalized=False):
    """Multi-state divergence via dense relative modular superoperators."""
    weights, chain, states, omega = _validate_multi(weights, chain, states, omega, r)
    expo = _exponents(weights.thetas, r, chain.gammas)
    norm = _modular_chain_norm(expo, list(chain.alphas), states, omega, r)
    value = _prefactor(weights.thetas, r) * np.log(norm)
    family = "multi_state_modular"
    if normalized:
        value /= 1.0 - weights.theta0
        family += "_hat"
    return DivergenceValue(float(value), True, family,
                           {"thetas": weights.thetas, "r": r, "alphas": chain.alphas})


def three_state_modular(theta1, theta2, r, mean, psi1, psi2, omega):
    """Three-state divergence built from relative modular superoperators.

    With ``mean`` a float ``alpha`` this is the geometric-mean family and
    matches :func:`three_state`.  With ``mean`` a general :class:`MeanSpec`
    it is the three-state f-divergence
    ``-2r log || (Delta_1^(t1/r) #_f Delta_2^(t2/r))^(1/2) Omega ||_{2r,omega}``.
    """
    weights = ThetaWeights((theta1, theta2))
    psi1, psi2, omega = (la.hermitize(la.as_matrix(m)) for m in (psi1, psi2, omega))
    require_full_rank(omega)
    if isinstance(mean, MeanSpec) and mean.kind == "general":
        norm = _modular_chain_norm([theta1 / r, theta2 / r], [mean], [psi1, psi2], omega, r)
        value = -2.0 * r * np.log(norm)
        return DivergenceValue(float(value), True, "three_state_f",
                               {"thetas": weights.thetas, "r": r})
    alpha = mean.alpha if isinstance(mean, MeanSpec) else float(mean)
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must lie in (0,1), got {alpha}")
    if theta1 == 1.0 or theta2 == 1.0:
        raise ParameterError("theta_i = 1 makes the prefactor singular")
    expo = [theta1 / ((1.0 - alpha) * r), theta2 / (alpha * r)]
    norm = _modular_chain_norm(expo, [alpha], [psi1, psi2], omega, r)
    value = -2.0 * r / ((1.0 - theta1) * (1.0 - theta2)) * np.log(norm)
    return DivergenceValue(float(value), True, "three_state_modular",
                           {"thetas": weights.thetas, "r": r, "alpha": alpha})


def classical_multi(weights, dists):
    """``-1/prod(1 - theta_i) * log sum_x prod_i p_i(x)^theta_i`` with ``0^theta = 0``."""
    thetas = np.asarray(weights, dtype=float)
    P = np.asarray(dists, dtype=float)
    if P.ndim != 2 or P.shape[0] != len(thetas):
        raise ParameterError("need one distribution per weight")
    if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > la.TOL_EQ):
        raise ParameterError("each distribution must be a probability vector")
    if abs(thetas.sum() - 1.0) > la.TOL_EQ:
        raise ParameterError(f"weights must sum to 1, got {thetas.sum()}")
    if np.any(thetas >= 1.0):
        raise ParameterError("theta_i = 1 makes the prefactor singular")
    terms = np.ones(P.shape[1])
    for t, p in zip(thetas, P):
        if t > 0:
            terms = terms * np.where(p > 0, np.power(np.where(p > 0, p, 1.0), t), 0.0)
    total = terms.sum()
    if total == 0.0:
        return float("inf")
    return float(-np.log(total) / np.prod(1.0 - thetas))


DEFAULT_EPS = tuple(2.0 ** -k for k in range(3, 11))


def weighted_relent_limit(beta, r, chain, states, omega, eps_sequence=DEFAULT_EPS, order=1):
    """Extrapolate the hat-normalized measure at ``theta_i = eps * beta_i`` to ``eps -> 0``.

    Returns ``(extrapolated, target)`` with ``target = sum beta_i S(omega || psi_i)``.
    The reference state carries weight ``1 - eps`` and dominates, so the
    limit is the weighted relative entropy of ``omega`` to each ``psi_i``.
    """
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0) or abs(beta.sum() - 1.0) > la.TOL_EQ:
        raise ParameterError("beta must be a probability vector")
    eps = np.sort(np.asarray(eps_sequence, dtype=float))[::-1]
    values = [multi_state(tuple(e * beta), r, chain, states, omega, normalized=True).value for e in eps]
    extrapolated = richardson(eps, values, order=order)
    target = float(sum(b * relative_entropy(omega, s).value for b, s in zip(beta, states)))
    return extrapolated, target


def multi_r_infinity(weights, states, omega):
    """``-1/prod(1-theta_i) log tr exp(sum theta_i log psi_i + theta_0 log omega)``."""
    if not isinstance(weights, ThetaWeights):
        weights = ThetaWeights(tuple(weights))
    states = [la.hermitize(la.as_matrix(s)) for s in states]
    omega = la.hermitize(la.as_matrix(omega))
    if len(states) != len(weights):
        raise ParameterError(f"{len(weights)} weights for {len(states)} states")
    for i, s in enumerate(states):
        require_full_rank(s, role=f"psi_{i + 1}")
    require_full_rank(omega)
    H = weights.theta0 * la.mlog(omega)
    for t, s in zip(weights.thetas, states):
        H = H + t * la.mlog(s)
    Q = float(np.real(np.trace(la.mexp(la.hermitize(H)))))
    value = -np.log(Q) / float(np.prod([1.0 - t for t in weights.thetas]))
    return DivergenceValue(float(value), True, "multi_r_infinity", {"thetas": weights.thetas})
