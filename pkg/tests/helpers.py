"""Shared instance generators and independent oracles for the tests."""
import numpy as np
import scipy.linalg as sla


def rand_state(rng, d, rank=None):
    rank = d if rank is None else rank
    G = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = G @ G.conj().T
    return rho / np.trace(rho).real


def rand_unitary(rng, d):
    Z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def rand_probs(rng, d):
    p = rng.random(d) + 0.05
    return p / p.sum()


def commuting_pair(rng, d, unitary=True):
    """Two states diagonal in a common (random) basis, with their spectra."""
    q, p = rand_probs(rng, d), rand_probs(rng, d)
    U = rand_unitary(rng, d) if unitary else np.eye(d)
    return U @ np.diag(q) @ U.conj().T, U @ np.diag(p) @ U.conj().T, q, p


def powm(A, z):
    """Oracle matrix power via scipy."""
    return sla.fractional_matrix_power(A, z)


def petz_oracle(theta, psi, omega):
    Q = np.trace(powm(psi, theta) @ powm(omega, 1 - theta)).real
    return np.log(Q) / (theta - 1)


def sandwiched_oracle(theta, psi, omega):
    w = powm(omega, (1 - theta) / (2 * theta))
    Q = np.trace(powm(w @ psi @ w, theta)).real
    return np.log(Q) / (theta - 1)


def theta_r_oracle(theta, r, psi, omega):
    w = powm(omega, (1 - theta) / (2 * r))
    inner = w @ powm(psi, theta / r) @ w
    Q = np.trace(powm(inner, r)).real
    return np.log(Q) / (theta - 1)


def relent_oracle(psi, omega):
    return np.trace(psi @ (sla.logm(psi) - sla.logm(omega))).real


def classical_renyi(theta, q, p):
    return np.log(np.sum(q**theta * p ** (1 - theta))) / (theta - 1)
