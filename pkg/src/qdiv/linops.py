"""Dense complex linear algebra kernel.

Every matrix function in the package goes through :func:`eigh` and
:func:`apply_fn`, so support and clipping conventions live in one place.

Vectorization is row-major throughout: ``vec(A)`` is ``A.reshape(-1)``, and
``vec(a @ X @ b) == kron(a, b.T) @ vec(X)``.
"""
from collections import namedtuple

import numpy as np
from scipy.linalg.lapack import dgejsv

from .errors import DomainError, HermiticityError, ParameterError

TOL_HERM = 1e-10
TOL_PSD = 1e-10
TOL_EQ = 1e-8
TOL_INEQ = 1e-9
TOL_RECON = 1e-10
TOL_UNITARY = 1e-10
CLIP_REL = 1e-12

EigenSystem = namedtuple("EigenSystem", ["values", "vectors"])


def as_matrix(A):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2:
        raise ParameterError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ParameterError("matrix has non-finite entries")
    return A


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def hermitian_defect(H):
    """Relative asymmetry ``||H - H^dag||_F / ||H||_F`` (0 for the zero matrix)."""
    H = np.asarray(H)
    scale = np.linalg.norm(H)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(H - dagger(H)) / scale)


def is_hermitian(H, tol=TOL_HERM):
    H = np.asarray(H)
    return H.ndim == 2 and H.shape[0] == H.shape[1] and hermitian_defect(H) <= tol


def hermitize(H):
    return 0.5 * (H + dagger(H))


def eigh(H, tol=TOL_HERM):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    H : array_like
        Square matrix, Hermitian up to ``tol`` (relative Frobenius asymmetry).
    tol : float
        Admissible asymmetry before rejecting the input.

    Returns
    -------
    EigenSystem
        ``values`` real and ascending, ``vectors`` unitary with the
        eigenvectors as columns.

    Raises
    ------
    HermiticityError
        If the measured asymmetry exceeds ``tol``.
    """
    H = as_matrix(H)
    if H.shape[0] != H.shape[1]:
        raise ParameterError(f"eigh needs a square matrix, got {H.shape}")
    defect = hermitian_defect(H)
    if defect > tol:
        raise HermiticityError(defect, tol)
    values, vectors = np.linalg.eigh(hermitize(H))
    return EigenSystem(values, vectors)


def rank_floor(values, clip_rel=CLIP_REL):
    """Eigenvalue threshold below which a PSD spectrum is treated as kernel."""
    top = float(np.max(np.abs(values))) if len(values) else 0.0
    return clip_rel * top


def _check_psd(values, tol=TOL_PSD):
    top = max(float(np.max(np.abs(values))), 1.0) if len(values) else 1.0
    if len(values) and values[0] < -tol * top:
        raise DomainError(f"matrix is not PSD: smallest eigenvalue {values[0]:.3e}")


def _rebuild(vectors, fvals):
    return (vectors * fvals) @ dagger(vectors)


def apply_fn(H, f, clip=0.0, kernel_value=None, es=None):
    """Spectral calculus ``U diag(f(max(lam, clip))) U^dag`` on a PSD matrix.

    When ``kernel_value`` is given, eigenvalues at or below the rank floor
    (``CLIP_REL`` times the largest eigenvalue) are mapped to that value
    instead of through ``f``; ``kernel_value=0`` with ``f = x**0`` yields the
    support projector.
    """
    if es is None:
        es = eigh(H)
    values, vectors = es
    _check_psd(values)
    clipped = np.maximum(values, clip)
    with np.errstate(all="ignore"):
        fvals = np.asarray(f(clipped), dtype=complex)
    if kernel_value is not None:
        fvals = np.where(values <= rank_floor(values), kernel_value, fvals)
    if not np.all(np.isfinite(fvals)):
        raise DomainError("function is undefined on part of the clipped spectrum")
    return _rebuild(vectors, fvals)


def mpow(H, z, es=None, clip_rel=CLIP_REL, pinv=False):
    """Support-aware matrix power of a PSD matrix, ``z`` real or complex.

    On the kernel (eigenvalues at or below the rank floor) the result is 0
    for ``Re z >= 0``, so ``z = 0`` gives the support projector.  For
    ``Re z < 0`` kernel eigenvalues are clipped up to the floor, unless
    ``pinv`` is set, in which case the power is taken on the support only.
    """
    if es is None:
        es = eigh(H)
    values, vectors = es
    _check_psd(values)
    floor = rank_floor(values, clip_rel)
    if floor == 0.0:
        floor = np.finfo(float).tiny
    return _rebuild(vectors, _power_values(values, z, floor, pinv))


def _power_values(values, z, floor, pinv):
    support = values > floor
    dtype = complex if np.iscomplexobj(z) else float
    if np.real(z) >= 0 or pinv:
        fvals = np.zeros(len(values), dtype=dtype)
        fvals[support] = values[support].astype(dtype) ** z
    else:
        fvals = np.maximum(values, floor).astype(dtype) ** z
    return fvals


def mlog(H, es=None, clip_rel=CLIP_REL):
    """Matrix logarithm with eigenvalues clipped to the rank floor."""
    if es is None:
        es = eigh(H)
    values, vectors = es
    _check_psd(values)
    floor = max(rank_floor(values, clip_rel), np.finfo(float).tiny)
    return _rebuild(vectors, np.log(np.maximum(values, floor)))


def mexp(H):
    """Exponential of a Hermitian matrix."""
    values, vectors = eigh(H)
    return _rebuild(vectors, np.exp(values))


def msqrt(H, es=None):
    return mpow(H, 0.5, es=es)


def support_projector(H, es=None):
    return mpow(H, 0.0, es=es)


def singular_values(A):
    """Singular values in descending order.

    Hermitian input uses ``|eigenvalues|``; otherwise the square roots of the
    eigenvalues of ``A^dag A`` (the Hermitian solver is the only one used).
    """
    A = as_matrix(A)
    if A.shape[0] == A.shape[1] and hermitian_defect(A) <= 1e-14:
        sv = np.abs(eigh(A).values)
    else:
        gram = dagger(A) @ A if A.shape[1] <= A.shape[0] else A @ dagger(A)
        sv = np.sqrt(np.maximum(eigh(gram).values, 0.0))
    return np.sort(sv)[::-1]


def schatten_norm(A, p):
    """Schatten p-norm ``(sum s_i^p)^(1/p)``; quasi-norm for ``0 < p < 1``."""
    p = float(p)
    if not p > 0:
        raise ParameterError(f"Schatten index must be positive, got {p}")
    return _schatten_from_values(singular_values(A), p)


def _schatten_from_values(sv, p):
    if np.isinf(p):
        return float(sv[0]) if len(sv) else 0.0
    top = sv[0] if len(sv) else 0.0
    if top == 0.0:
        return 0.0
    # scale out the largest singular value to avoid overflow at large p
    return float(top * np.sum((sv / top) ** p) ** (1.0 / p))


def power_product_svdvals(A, a, B, b, clip_rel=CLIP_REL):
    """Singular values of ``A^a B^b`` for PSD ``A`` and ``B``, in descending order.

    Powers follow :func:`mpow` with ``pinv=True``.  The product equals
    ``U diag(x^a) (U^H V) diag(y^b) V^H``: a unitary core scaled on both
    sides.  LAPACK's preconditioned Jacobi SVD keeps every singular value
    of such a matrix to high relative accuracy, including values far below
    machine precision times the largest one, which a plain SVD or
    eigendecomposition of the product loses.  The complex core is embedded
    as a real matrix of twice the size, so each value appears twice.
    """
    ea, eb = eigh(A), eigh(B)
    for vals in (ea.values, eb.values):
        _check_psd(vals)
    fa = np.real(_power_values(ea.values, a, max(rank_floor(ea.values, clip_rel), np.finfo(float).tiny), True))
    fb = np.real(_power_values(eb.values, b, max(rank_floor(eb.values, clip_rel), np.finfo(float).tiny), True))
    M = (fa[:, None] * (dagger(ea.vectors) @ eb.vectors)) * fb[None, :]
    if not np.any(M):
        return np.zeros(M.shape[0])
    R = np.block([[M.real, -M.imag], [M.imag, M.real]])
    sva, _, _, work, _, info = dgejsv(R, joba=2, jobu=3, jobv=3, jobr=0, jobt=0, jobp=0)
    if info != 0:
        # fall back to the ordinary SVD if the Jacobi iteration did not converge
        return singular_values(M)
    sv = np.sort(np.abs(sva) * (work[0] / work[1]))[::-1]
    return sv[::2]


def power_product_norm(A, a, B, b, p, clip_rel=CLIP_REL):
    """Schatten p-norm of ``A^a B^b`` from :func:`power_product_svdvals`."""
    p = float(p)
    if not p > 0:
        raise ParameterError(f"Schatten index must be positive, got {p}")
    return _schatten_from_values(power_product_svdvals(A, a, B, b, clip_rel), p)


def opnorm(A):
    return schatten_norm(A, np.inf)


def min_eig(H):
    return float(eigh(H).values[0])


def kron(*ops):
    out = np.asarray(ops[0], dtype=complex)
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op, dtype=complex))
    return out


def vec(A):
    A = np.asarray(A)
    if A.ndim != 2:
        raise ParameterError(f"vec needs a matrix, got shape {A.shape}")
    return A.reshape(-1).copy()


def mat(v, rows, cols=None):
    v = np.asarray(v)
    cols = rows if cols is None else cols
    if v.ndim != 1 or v.size != rows * cols:
        raise ParameterError(f"cannot reshape vector of size {v.size} to {rows}x{cols}")
    return v.reshape(rows, cols).copy()


def partial_trace(M, dims, which):
    """Trace out one factor of a bipartite operator.

    ``which`` is the index (0 or 1) of the subsystem removed.
    """
    d1, d2 = dims
    M = np.asarray(M)
    if M.shape != (d1 * d2, d1 * d2):
        raise ParameterError(f"operator of shape {M.shape} does not match dims {dims}")
    if which not in (0, 1):
        raise ParameterError("which must be 0 or 1")
    T = M.reshape(d1, d2, d1, d2)
    if which == 1:
        return np.einsum("ijkj->ik", T)
    return np.einsum("ijil->jl", T)


def superop(left, right):
    """Matrix of ``X -> left @ X @ right`` acting on row-major vec."""
    return np.kron(left, np.asarray(right).T)
