"""Density matrices, channels, GNS vectors and relative modular operators.

Operators on the GNS space of a full-rank reference state ``omega`` are
represented by their row-major vectorizations: the algebra element ``a`` maps
to ``vec(a @ omega**0.5)``.  The relative modular operator of ``(psi, omega)``
acts as ``X -> psi @ X @ inv(omega)``.
"""
import json
from dataclasses import dataclass, field

import numpy as np

from . import linops as la
from .errors import DegenerateInstanceError, ParameterError, PreconditionError

RANK_FLOOR = la.CLIP_REL


def make_rng(seed):
    """Accept an int, a ``SeedSequence`` or an existing ``Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------- states


def check_density(rho, tol=la.TOL_EQ):
    """Validate and return ``rho`` as a complex density matrix."""
    rho = la.as_matrix(rho)
    if rho.shape[0] != rho.shape[1]:
        raise ParameterError(f"density matrix must be square, got {rho.shape}")
    values = la.eigh(rho).values
    if values[0] < -la.TOL_PSD * max(1.0, values[-1]):
        raise ParameterError(f"density matrix is not PSD: min eigenvalue {values[0]:.3e}")
    tr = float(np.real(np.trace(rho)))
    if abs(tr - 1.0) > tol:
        raise ParameterError(f"density matrix trace is {tr!r}, expected 1")
    return la.hermitize(rho)


def is_full_rank(rho, floor=RANK_FLOOR):
    values = la.eigh(rho).values
    return bool(values[0] > floor * max(values[-1], 0.0))


def require_full_rank(rho, role="reference state"):
    values = la.eigh(rho).values
    if not values[0] > RANK_FLOOR * max(values[-1], 0.0):
        raise PreconditionError(
            f"{role} must be full rank: smallest eigenvalue {values[0]:.3e}, "
            f"largest {values[-1]:.3e}"
        )


def random_density(dim, rank=None, seed=None):
    """Hilbert-Schmidt-induced random state ``G G^dag / tr(G G^dag)``.

    ``G`` is ``dim x rank`` with independent standard complex Gaussian entries.
    """
    rank = dim if rank is None else rank
    if dim < 1 or not 1 <= rank <= dim:
        raise ParameterError(f"need 1 <= rank <= dim, got dim={dim}, rank={rank}")
    rng = make_rng(seed)
    G = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = G @ la.dagger(G)
    return la.hermitize(rho / np.trace(rho).real)


def maximally_mixed(dim):
    return np.eye(dim, dtype=complex) / dim


def pure_state(ket):
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    return np.outer(ket, ket.conj())


def haar_isometry(d_in, d_out, seed=None):
    """Haar-random isometry ``d_in -> d_out`` (QR of a Ginibre matrix, phase-fixed)."""
    if d_out < d_in:
        raise ParameterError(f"isometry needs d_out >= d_in, got {d_in} -> {d_out}")
    rng = make_rng(seed)
    Z = rng.standard_normal((d_out, d_in)) + 1j * rng.standard_normal((d_out, d_in))
    Q, R = np.linalg.qr(Z)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def haar_unitary(dim, seed=None):
    return haar_isometry(dim, dim, seed)


# ---------------------------------------------------------------- channels


@dataclass
class Channel:
    """Quantum channel in Kraus form, ``rho -> sum_i K_i rho K_i^dag``.

    Each Kraus operator is ``d_out x d_in``.
    """

    kraus: list
    d_in: int = field(init=False)
    d_out: int = field(init=False)

    def __post_init__(self):
        ops = [la.as_matrix(K) for K in self.kraus]
        if not ops:
            raise ParameterError("channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(K.shape != shape for K in ops):
            raise ParameterError("Kraus operators have inconsistent shapes")
        self.kraus = ops
        self.d_out, self.d_in = shape

    def cptp_defect(self):
        total = sum(la.dagger(K) @ K for K in self.kraus)
        return float(np.max(np.abs(total - np.eye(self.d_in))))

    def check(self, tol=la.TOL_EQ):
        defect = self.cptp_defect()
        if defect > tol:
            raise ParameterError(f"Kraus operators are not trace preserving (defect {defect:.3e})")
        return self

    def __call__(self, rho):
        return apply_channel(self, rho)

    def dual(self, b):
        return heisenberg_dual(self)(b)


def apply_channel(channel, rho):
    """Schrodinger picture action ``sum K rho K^dag``."""
    rho = la.as_matrix(rho)
    if rho.shape != (channel.d_in, channel.d_in):
        raise ParameterError(f"state of shape {rho.shape} does not fit channel input {channel.d_in}")
    out = sum(K @ rho @ la.dagger(K) for K in channel.kraus)
    return la.hermitize(out)


def heisenberg_dual(channel):
    """Unital dual map ``b -> sum K^dag b K`` on output-side observables."""

    def dual(b):
        b = la.as_matrix(b)
        if b.shape != (channel.d_out, channel.d_out):
            raise ParameterError(f"observable of shape {b.shape} does not fit channel output {channel.d_out}")
        return sum(la.dagger(K) @ b @ K for K in channel.kraus)

    return dual


def identity_channel(dim):
    return Channel([np.eye(dim)])


def unitary_channel(U):
    return Channel([U])


def replacer_channel(d_in, sigma):
    """Channel sending every input state to the fixed state ``sigma``."""
    values, vectors = la.eigh(sigma)
    d_out = sigma.shape[0]
    kraus = []
    for i in range(d_out):
        if values[i] <= 0:
            continue
        for j in range(d_in):
            K = np.zeros((d_out, d_in), dtype=complex)
            K[:, j] = np.sqrt(values[i]) * vectors[:, i]
            kraus.append(K)
    return Channel(kraus)


def weyl_operators(dim):
    """The ``dim**2`` clock-and-shift unitaries (a unitary 1-design)."""
    omega = np.exp(2j * np.pi / dim)
    X = np.roll(np.eye(dim), 1, axis=0)
    Z = np.diag(omega ** np.arange(dim))
    return [np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(Z, b)
            for a in range(dim) for b in range(dim)]


def depolarizing_channel(dim, p=1.0):
    """``rho -> (1-p) rho + p I/dim``; p=1 is full depolarization."""
    ops = weyl_operators(dim)
    n = len(ops)
    kraus = [np.sqrt(1 - p + p / n) * ops[0]]
    kraus += [np.sqrt(p / n) * W for W in ops[1:]]
    return Channel(kraus)


def random_channel(d_in, d_out, env_dim, seed=None):
    """Blocks of a Haar-random isometry ``d_in -> d_out (x) env``."""
    if d_out * env_dim < d_in:
        raise ParameterError(
            f"infeasible dilation: d_out*env_dim = {d_out * env_dim} < d_in = {d_in}"
        )
    V = haar_isometry(d_in, d_out * env_dim, seed)
    # rows indexed by (out, env) in row-major order
    V = V.reshape(d_out, env_dim, d_in)
    return Channel([V[:, e, :] for e in range(env_dim)])


# ---------------------------------------------------------------- GNS space


def purify(rho):
    """Natural-cone purification ``vec(rho**0.5)``."""
    return la.vec(la.msqrt(rho))


def modular_conjugation(v):
    d = int(round(np.sqrt(len(v))))
    return la.vec(la.dagger(la.mat(v, d)))


def modular_cone_ops(v, tol=la.TOL_PSD):
    """Return ``(J v, in_cone)`` for a GNS vector ``v``.

    ``J`` is the modular conjugation ``vec(X) -> vec(X^dag)``; ``v`` lies in
    the natural cone iff ``mat(v)`` is Hermitian PSD.
    """
    v = np.asarray(v, dtype=complex)
    d = int(round(np.sqrt(len(v))))
    if d * d != len(v):
        raise ParameterError(f"GNS vector length {len(v)} is not a square")
    X = la.mat(v, d)
    jv = la.vec(la.dagger(X))
    in_cone = False
    if la.hermitian_defect(X) <= la.TOL_HERM:
        values = la.eigh(X).values
        in_cone = bool(values[0] >= -tol * max(1.0, abs(values[-1])))
    return jv, in_cone


class ModularOp:
    """Relative modular operator ``X -> psi X omega^-1`` via cached eigendata.

    ``psi`` may be rank deficient (its powers vanish on the kernel for
    ``Re z >= 0``); ``omega`` must be full rank.
    """

    def __init__(self, psi, omega):
        self.psi = la.hermitize(la.as_matrix(psi))
        self.omega = la.hermitize(la.as_matrix(omega))
        if self.psi.shape != self.omega.shape:
            raise ParameterError("psi and omega dimensions differ")
        require_full_rank(self.omega)
        self.dim = self.omega.shape[0]
        self.psi_es = la.eigh(self.psi)
        self.omega_es = la.eigh(self.omega)

    @property
    def spectrum(self):
        p = self.psi_es.values
        q = self.omega_es.values
        return np.sort(np.outer(np.maximum(p, 0.0), 1.0 / q).ravel())

    def factors(self, z):
        """``(psi**z, omega**-z)`` so that ``Delta**z X = left @ X @ right``."""
        return la.mpow(self.psi, z, es=self.psi_es), la.mpow(self.omega, -z, es=self.omega_es)

    def apply(self, v, z=1.0):
        left, right = self.factors(z)
        X = la.mat(np.asarray(v), self.dim)
        return la.vec(left @ X @ right)

    def matrix(self, z=1.0):
        """Dense ``d**2 x d**2`` matrix of ``Delta**z``."""
        left, right = self.factors(z)
        return la.superop(left, right)


def relative_modular(psi, omega):
    return ModularOp(psi, omega)


def omega_vector(omega):
    """The cyclic vector ``vec(omega**0.5)`` of the GNS space."""
    return la.vec(la.msqrt(omega))


def pnorm_omega(v, omega, p):
    """Araki-Masuda ``(p, omega)``-norm ``|| mat(v) omega**(1/p - 1/2) ||_p``."""
    p = float(p)
    if not p >= 1:
        raise ParameterError(f"(p, omega)-norm needs p >= 1, got {p}")
    require_full_rank(omega)
    d = omega.shape[0]
    X = la.mat(np.asarray(v, dtype=complex), d)
    expo = -0.5 if np.isinf(p) else 1.0 / p - 0.5
    if expo == 0.0:
        return float(np.linalg.norm(X))
    return la.schatten_norm(X @ la.mpow(omega, expo), p)


def _variational_value(G, X, omega_pow, s):
    chi = G @ la.dagger(G)
    chi = chi / np.trace(chi).real
    return float(np.linalg.norm(la.mpow(chi, s) @ X @ omega_pow))


def pnorm_variational_bound(v, omega, p, n_samples=200, seed=None, ascent_steps=100, decay=0.7):
    """Sampled one-sided estimate of the ``(p, omega)``-norm.

    Evaluates ``|| Delta_{chi|omega}**(1/2 - 1/p) v ||`` over random full-rank
    states ``chi`` followed by coordinate-perturbation ascent.  For ``p >= 2``
    the result is a maximum and never exceeds :func:`pnorm_omega`; for
    ``p < 2`` it is a minimum and never falls below it.
    """
    p = float(p)
    if not p >= 1:
        raise ParameterError(f"(p, omega)-norm needs p >= 1, got {p}")
    require_full_rank(omega)
    d = omega.shape[0]
    X = la.mat(np.asarray(v, dtype=complex), d)
    s = 0.5 if np.isinf(p) else 0.5 - 1.0 / p
    if s == 0.0:
        return float(np.linalg.norm(X))
    sign = 1.0 if p >= 2 else -1.0
    omega_pow = la.mpow(omega, -s)
    rng = make_rng(seed)

    def score(G):
        return sign * _variational_value(G, X, omega_pow, s)

    best_G, best = None, -np.inf
    for _ in range(max(1, n_samples)):
        G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        val = score(G)
        if val > best:
            best_G, best = G, val
    step = 0.5 * np.linalg.norm(best_G) / d
    for _ in range(ascent_steps):
        i, j = rng.integers(d), rng.integers(d)
        delta = step * (1.0 if rng.random() < 0.5 else 1j) * rng.choice([-1.0, 1.0])
        trial = best_G.copy()
        trial[i, j] += delta
        val = score(trial)
        if val > best:
            best_G, best = trial, val
        else:
            step *= decay
            if step < 1e-14:
                break
    return sign * best


def gns_contraction(channel, omega_A):
    """Dense matrix of ``F: H_B -> H_A`` with ``Phi(b) |Omega_A> = F b |Omega_B>``.

    ``F vec(X) = vec(Phi(X omega_B**-1/2) omega_A**1/2)`` where ``Phi`` is the
    Heisenberg dual.  Raises :class:`DegenerateInstanceError` when the output
    reference state is singular.
    """
    require_full_rank(omega_A)
    omega_B = apply_channel(channel, omega_A)
    try:
        require_full_rank(omega_B, role="channel output of the reference state")
    except PreconditionError as exc:
        raise DegenerateInstanceError(str(exc)) from exc
    b_inv_half = la.mpow(omega_B, -0.5)
    a_half = la.mpow(omega_A, 0.5)
    return sum(la.superop(la.dagger(K), b_inv_half @ K @ a_half) for K in channel.kraus)


# ---------------------------------------------------------------- JSON


def matrix_to_json(A):
    A = np.asarray(A, dtype=complex)
    obj = {"dim": A.shape[0]} if A.shape[0] == A.shape[1] else {"rows": A.shape[0], "cols": A.shape[1]}
    obj["re"] = [float(x) for x in A.real.ravel()]
    obj["im"] = [float(x) for x in A.imag.ravel()]
    return obj


def matrix_from_json(obj):
    try:
        if "dim" in obj:
            rows = cols = int(obj["dim"])
        else:
            rows, cols = int(obj["rows"]), int(obj["cols"])
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", [0.0] * len(re)), dtype=float)
    except KeyError as exc:
        raise ParameterError(f"matrix object is missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"matrix object has malformed entries: {exc}") from exc
    if re.size != rows * cols:
        raise ParameterError(f"field 're' has {re.size} entries, expected {rows * cols}")
    if im.size != rows * cols:
        raise ParameterError(f"field 'im' has {im.size} entries, expected {rows * cols}")
    return (re + 1j * im).reshape(rows, cols)


def channel_to_json(channel):
    return [matrix_to_json(K) for K in channel.kraus]


def channel_from_json(obj):
    if isinstance(obj, dict):
        obj = obj.get("kraus")
    if not isinstance(obj, list):
        raise ParameterError("channel must be a JSON array of Kraus matrices")
    return Channel([matrix_from_json(K) for K in obj])


def dumps_matrix(A):
    return json.dumps(matrix_to_json(A))


def loads_matrix(text):
    return matrix_from_json(json.loads(text))
