"""Two-state quantum Renyi divergences.

All values are in nats.  Matrix-form evaluations are the default; the
``*_modular`` functions go through the dense relative modular superoperator
and the Araki-Masuda norm instead, as an independent route to the same
numbers.
"""
from dataclasses import dataclass, field

import numpy as np

from . import linops as la
from .errors import DomainError, ParameterError
from .states import ModularOp, omega_vector, pnorm_omega, require_full_rank

SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class DivergenceValue:
    """A divergence value together with its family tag and parameters.

    ``finite`` is False exactly when a support condition failed, in which
    case ``value`` is ``+inf``.
    """

    value: float
    finite: bool
    family: str
    params: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.value)


def _finite(value, family, **params):
    return DivergenceValue(float(value), True, family, params)


def _infinite(family, **params):
    return DivergenceValue(float("inf"), False, family, params)


def _matrix(A):
    return la.hermitize(la.as_matrix(A))


def supports_orthogonal(psi, omega, tol=SUPPORT_TOL):
    return la.opnorm(la.support_projector(psi) @ la.support_projector(omega)) <= tol


def support_contained(psi, omega, tol=SUPPORT_TOL):
    """True when ``supp psi`` lies inside ``supp omega``."""
    kernel = np.eye(omega.shape[0]) - la.support_projector(omega)
    return float(np.real(np.trace(psi @ kernel))) <= tol * max(1.0, float(np.real(np.trace(psi))))


def _check_theta(theta, lo, hi, name, open_lo=True, open_hi=True):
    ok_lo = theta > lo if open_lo else theta >= lo
    ok_hi = theta < hi if open_hi else theta <= hi
    if not (ok_lo and ok_hi):
        raise ParameterError(f"{name} = {theta} outside its admissible range")


def relative_entropy(psi, omega):
    """Umegaki relative entropy ``tr psi (log psi - log omega)``."""
    psi, omega = _matrix(psi), _matrix(omega)
    if not support_contained(psi, omega):
        return _infinite("relative_entropy")
    p, u = la.eigh(psi)
    keep = p > la.rank_floor(p)
    plogp = float(np.sum(p[keep] * np.log(p[keep])))
    q, v = la.eigh(omega)
    qkeep = q > la.rank_floor(q)
    log_omega = (v[:, qkeep] * np.log(q[qkeep])) @ la.dagger(v[:, qkeep])
    cross = float(np.real(np.trace(psi @ log_omega)))
    return _finite(plogp - cross, "relative_entropy")


def petz(theta, psi, omega):
    """Petz divergence ``log tr(psi^theta omega^(1-theta)) / (theta - 1)``, theta in (0, 1)."""
    _check_theta(theta, 0.0, 1.0, "theta")
    psi, omega = _matrix(psi), _matrix(omega)
    if supports_orthogonal(psi, omega):
        return _infinite("petz", theta=theta)
    Q = float(np.real(np.trace(la.mpow(psi, theta) @ la.mpow(omega, 1.0 - theta))))
    return _finite(np.log(Q) / (theta - 1.0), "petz", theta=theta)


def sandwiched(theta, psi, omega):
    """Sandwiched divergence for theta in (0, 1) or (1, inf)."""
    if theta <= 0 or theta == 1.0:
        raise ParameterError(f"sandwiched divergence needs theta in (0,1) U (1,inf), got {theta}")
    psi, omega = _matrix(psi), _matrix(omega)
    if theta < 1 and supports_orthogonal(psi, omega):
        return _infinite("sandwiched", theta=theta)
    if theta > 1 and not support_contained(psi, omega):
        return _infinite("sandwiched", theta=theta)
    # tr (w psi w)^theta = || psi^(1/2) omega^((1-theta)/2theta) ||_(2theta)^(2theta)
    norm = la.power_product_norm(psi, 0.5, omega, (1.0 - theta) / (2.0 * theta), 2.0 * theta)
    return _finite(2.0 * theta / (theta - 1.0) * np.log(norm), "sandwiched", theta=theta)


def log_fidelity(psi, omega):
    """``-2 log tr sqrt(omega^1/2 psi omega^1/2)``."""
    psi, omega = _matrix(psi), _matrix(omega)
    if supports_orthogonal(psi, omega):
        return _infinite("log_fidelity")
    fid = la.power_product_norm(psi, 0.5, omega, 0.5, 1)
    return _finite(-2.0 * np.log(fid), "log_fidelity")


def _theta_r_core(theta, r, psi, omega):
    """``|| psi^(theta/2r) omega^((1-theta)/2r) ||_{2r}`` with support handling."""
    return la.power_product_norm(psi, theta / (2.0 * r), omega, (1.0 - theta) / (2.0 * r), 2.0 * r)


def theta_r(theta, r, psi, omega):
    """(theta, r)-Renyi divergence in matrix form.

    ``log tr[(omega^((1-theta)/2r) psi^(theta/r) omega^((1-theta)/2r))^r] / (theta - 1)``.
    ``theta = 0`` uses the support projector of ``psi``; ``theta > 1`` is
    computable but outside the range where monotonicity is established.
    """
    if theta < 0 or theta == 1.0:
        raise ParameterError(f"theta_r needs theta in [0,1) U (1,inf), got {theta}")
    if not r > 0:
        raise ParameterError(f"theta_r needs r > 0, got {r}")
    psi, omega = _matrix(psi), _matrix(omega)
    params = {"theta": theta, "r": r}
    if theta < 1 and supports_orthogonal(psi, omega):
        return _infinite("theta_r", **params)
    if theta > 1 and not support_contained(psi, omega):
        return _infinite("theta_r", **params)
    norm = _theta_r_core(theta, r, psi, omega)
    return _finite(2.0 * r / (theta - 1.0) * np.log(norm), "theta_r", **params)


def theta_r_modular(theta, r, psi, omega):
    """(theta, r)-Renyi divergence as ``-2r/(1-theta) log ||Delta^(theta/2r) Omega||_{2r,omega}``."""
    if not 0 <= theta < 1:
        raise ParameterError(f"theta_r_modular needs theta in [0,1), got {theta}")
    if not r >= 0.5:
        raise ParameterError(f"theta_r_modular needs r >= 1/2, got {r}")
    psi, omega = _matrix(psi), _matrix(omega)
    params = {"theta": theta, "r": r}
    if supports_orthogonal(psi, omega):
        return _infinite("theta_r_modular", **params)
    delta = ModularOp(psi, omega)
    v = delta.matrix(theta / (2.0 * r)) @ omega_vector(omega)
    norm = pnorm_omega(v, omega, 2.0 * r)
    return _finite(-2.0 * r / (1.0 - theta) * np.log(norm), "theta_r_modular", **params)


def power_function(alpha):
    def f(x):
        return np.power(x, alpha)

    f.__name__ = f"power_{alpha}"
    return f


def _logarithmic_mean(x):
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    away = np.abs(x - 1.0) > 1e-8
    out[away] = (x[away] - 1.0) / np.log(x[away])
    # second-order expansion around x = 1
    out[~away] = 1.0 + (x[~away] - 1.0) / 2.0
    return out


OPERATOR_MONOTONE = {
    "arithmetic": lambda x: (1.0 + np.asarray(x)) / 2.0,
    "harmonic": lambda x: 2.0 * np.asarray(x) / (1.0 + np.asarray(x)),
    "logarithmic": _logarithmic_mean,
}


def resolve_function(f):
    """Map a name (``"power:0.3"``, ``"arithmetic"``...) or callable to a callable."""
    if callable(f):
        return f
    if isinstance(f, str):
        if f.startswith("power:"):
            return power_function(float(f.split(":", 1)[1]))
        if f in OPERATOR_MONOTONE:
            return OPERATOR_MONOTONE[f]
    raise ParameterError(f"unknown operator monotone function {f!r}")


def check_normalized(f):
    one = float(np.real(np.asarray(f(np.array([1.0])))[0]))
    if abs(one - 1.0) > la.TOL_EQ:
        raise ParameterError(f"f(1) must equal 1, got {one}")


def f_divergence(f, r, psi, omega):
    """``-2r log || f(Delta^(1/r))^(1/2) Omega ||_{2r, omega}`` for operator monotone ``f``.

    ``f`` must satisfy ``f(1) = 1`` (asserted numerically) and be positive on
    the clipped spectrum of ``Delta^(1/r)``; operator monotonicity itself is
    the caller's responsibility.
    """
    f = resolve_function(f)
    check_normalized(f)
    if not r >= 1:
        raise ParameterError(f"f_divergence needs r >= 1, got {r}")
    psi, omega = _matrix(psi), _matrix(omega)
    D = ModularOp(psi, omega).matrix(1.0 / r)
    es = la.eigh(D)
    clip = la.rank_floor(es.values)
    fvals = np.asarray(f(np.maximum(es.values, clip)), dtype=float)
    if np.any(~np.isfinite(fvals)) or np.any(fvals <= 0):
        raise DomainError("f is not positive on the clipped spectrum of Delta^(1/r)")
    root = (es.vectors * np.sqrt(fvals)) @ la.dagger(es.vectors)
    norm = pnorm_omega(root @ omega_vector(omega), omega, 2.0 * r)
    return _finite(-2.0 * r * np.log(norm), "f_divergence", r=r, f=getattr(f, "__name__", "f"))


def majorization_constant(psi, omega):
    """Smallest ``c`` with ``c psi >= omega``: ``|| psi^-1/2 omega psi^-1/2 ||_inf``.

    Returns ``inf`` when ``supp omega`` is not contained in ``supp psi``.
    """
    psi, omega = _matrix(psi), _matrix(omega)
    if not support_contained(omega, psi):
        return float("inf")
    w = la.mpow(psi, -0.5, pinv=True)
    return la.opnorm(la.hermitize(w @ omega @ w))


def extended_theta_r(theta, r, psi, omega, variant="hat"):
    """(theta, r) measure on the extended range theta in (-1, 1) minus {0}.

    ``variant="hat"`` uses the prefactor ``-2r / (theta (1 - theta))``;
    ``variant="signed"`` uses ``-2r sign(theta) / (1 - theta)``.  The
    majorization witness ``c`` is returned in ``params``.
    """
    if not (-1 < theta < 1) or theta == 0:
        raise ParameterError(f"extended_theta_r needs theta in (-1,1) minus 0, got {theta}")
    if not r >= 1:
        raise ParameterError(f"extended_theta_r needs r >= 1, got {r}")
    if variant not in ("hat", "signed"):
        raise ParameterError(f"unknown variant {variant!r}")
    psi, omega = _matrix(psi), _matrix(omega)
    c = majorization_constant(psi, omega)
    family = f"extended_theta_r_{variant}"
    params = {"theta": theta, "r": r, "c": c}
    if theta < 0 and not np.isfinite(c):
        return _infinite(family, **params)
    if theta > 0 and supports_orthogonal(psi, omega):
        return _infinite(family, **params)
    log_norm = np.log(_theta_r_core(theta, r, psi, omega))
    if variant == "hat":
        value = -2.0 * r / (theta * (1.0 - theta)) * log_norm
    else:
        value = -2.0 * r * np.sign(theta) / (1.0 - theta) * log_norm
    return _finite(value, family, **params)


def r_infinity(theta, psi, omega):
    """``log tr exp(theta log psi + (1-theta) log omega) / (theta - 1)``, the r -> inf limit."""
    _check_theta(theta, 0.0, 1.0, "theta")
    psi, omega = _matrix(psi), _matrix(omega)
    require_full_rank(psi, role="psi")
    require_full_rank(omega, role="omega")
    H = theta * la.mlog(psi) + (1.0 - theta) * la.mlog(omega)
    Q = float(np.real(np.trace(la.mexp(la.hermitize(H)))))
    return _finite(np.log(Q) / (theta - 1.0), "r_infinity", theta=theta)


# ---------------------------------------------------------------- classical


def classical_renyi(theta, q, p):
    """``log sum q^theta p^(1-theta) / (theta - 1)`` with ``0^x = 0``."""
    q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
    mask = (q > 0) & (p > 0)
    total = float(np.sum(q[mask] ** theta * p[mask] ** (1.0 - theta)))
    if theta > 1 and np.any((q > 0) & (p == 0)):
        return float("inf")
    if total == 0.0:
        return float("inf")
    return np.log(total) / (theta - 1.0)


def classical_kl(q, p):
    q, p = np.asarray(q, dtype=float), np.asarray(p, dtype=float)
    if np.any((q > 0) & (p == 0)):
        return float("inf")
    mask = q > 0
    return float(np.sum(q[mask] * np.log(q[mask] / p[mask])))


def commuting_spectra(psi, omega, tol=1e-12):
    """Eigenvalues of ``psi`` and ``omega`` in a common eigenbasis, or ``None``.

    Returns ``None`` when the two matrices do not commute.
    """
    psi, omega = _matrix(psi), _matrix(omega)
    scale = max(la.opnorm(psi), la.opnorm(omega), 1e-300)
    if np.max(np.abs(psi @ omega - omega @ psi)) > tol * scale**2:
        return None
    # a generic combination separates the joint eigenspaces
    _, U = la.eigh(psi + np.pi * omega)
    p = np.real(np.diag(la.dagger(U) @ psi @ U))
    q = np.real(np.diag(la.dagger(U) @ omega @ U))
    return np.clip(p, 0.0, None), np.clip(q, 0.0, None)


__all__ = [
    "DivergenceValue",
    "relative_entropy",
    "petz",
    "sandwiched",
    "log_fidelity",
    "theta_r",
    "theta_r_modular",
    "f_divergence",
    "extended_theta_r",
    "majorization_constant",
    "r_infinity",
    "classical_renyi",
    "classical_kl",
    "commuting_spectra",
]
