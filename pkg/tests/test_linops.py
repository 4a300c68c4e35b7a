import numpy as np
import pytest
import scipy.linalg as sla

from qdiv import linops as la
from qdiv.errors import DomainError, HermiticityError, ParameterError

from helpers import powm, rand_state, rand_unitary


def test_eigh_identity_and_diag():
    es = la.eigh(np.eye(3))
    assert np.allclose(es.values, [1, 1, 1])
    assert np.allclose(es.vectors.conj().T @ es.vectors, np.eye(3), atol=la.TOL_UNITARY)
    assert np.allclose(la.eigh(np.diag([2.0, -1.0])).values, [-1, 2])


def test_eigh_pauli_x():
    values, vectors = la.eigh(np.array([[0, 1], [1, 0]]))
    assert np.allclose(values, [-1, 1])
    for k, sign in enumerate([-1, 1]):
        target = np.array([1, sign]) / np.sqrt(2)
        assert abs(abs(np.vdot(target, vectors[:, k])) - 1) < 1e-12


def test_eigh_reconstruction(rng):
    A = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    H = A + A.conj().T
    values, U = la.eigh(H)
    assert np.all(np.diff(values) >= 0)
    assert np.max(np.abs(U @ np.diag(values) @ U.conj().T - H)) < la.TOL_RECON * np.abs(H).max()
    assert np.max(np.abs(U.conj().T @ U - np.eye(5))) < la.TOL_UNITARY
    assert np.allclose(values, sla.eigh(H, eigvals_only=True))


def test_eigh_deterministic(rng):
    H = rand_state(rng, 4)
    a, b = la.eigh(H), la.eigh(H.copy())
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(HermiticityError) as info:
        la.eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))
    assert info.value.asymmetry > 0.5


def test_apply_fn_examples():
    assert np.allclose(la.apply_fn(np.diag([4.0, 9.0]), np.sqrt), np.diag([2, 3]))
    assert np.allclose(la.apply_fn(np.diag([np.e, np.e**2]), np.log), np.diag([1, 2]))
    P = la.apply_fn(np.diag([0.7, 0.0]), lambda x: x**0, kernel_value=0.0)
    assert np.allclose(P, np.diag([1, 0]))


def test_apply_fn_log_at_zero_is_domain_error():
    with pytest.raises(DomainError):
        la.apply_fn(np.diag([1.0, 0.0]), np.log, clip=0.0)


def test_apply_fn_identity_function(rng):
    H = rand_state(rng, 4)
    assert np.max(np.abs(la.apply_fn(H, lambda x: x) - H)) < la.TOL_RECON


def test_mpow_against_scipy(rng):
    H = rand_state(rng, 4)
    for z in (0.5, -0.5, 0.3, 1.7, -1.2):
        assert np.allclose(la.mpow(H, z), sla.fractional_matrix_power(H, z), atol=1e-9)
    assert np.allclose(la.mlog(H), sla.logm(H), atol=1e-9)
    assert np.allclose(la.mexp(la.mlog(H)), H, atol=1e-10)


def test_mpow_support_conventions(rng):
    rho = rand_state(rng, 3, rank=2)
    P = la.mpow(rho, 0.0)
    assert np.allclose(P @ P, P, atol=1e-10) and abs(np.trace(P).real - 2) < 1e-10
    inv = la.mpow(rho, -1.0, pinv=True)
    assert np.allclose(rho @ inv @ rho, rho, atol=1e-9)


def test_schatten_examples():
    D = np.diag([3.0, 4.0])
    assert la.schatten_norm(D, 2) == pytest.approx(5)
    assert la.schatten_norm(D, 1) == pytest.approx(7)
    assert la.schatten_norm(D, np.inf) == pytest.approx(4)
    assert la.schatten_norm(D, 0.5) == pytest.approx((3**0.5 + 4**0.5) ** 2)
    with pytest.raises(ParameterError):
        la.schatten_norm(D, 0)


def test_schatten_unitary_invariance_and_svd_oracle(rng):
    A = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    u, v = rand_unitary(rng, 4), rand_unitary(rng, 3)
    sv = sla.svdvals(A)
    for p in (1, 1.5, 2, 3, np.inf):
        ref = sv.max() if np.isinf(p) else np.sum(sv**p) ** (1 / p)
        assert la.schatten_norm(A, p) == pytest.approx(ref, rel=1e-10)
        assert la.schatten_norm(u @ A @ v, p) == pytest.approx(ref, rel=1e-8)


def test_schatten_psd_matches_eigenvalues(rng):
    H = rand_state(rng, 5)
    lam = la.eigh(H).values
    for p in (1, 2, 4):
        assert la.schatten_norm(H, p) == pytest.approx(np.sum(lam**p) ** (1 / p), abs=la.TOL_EQ)


def test_holder_inequalities(rng):
    for _ in range(50):
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        p = 1 + 3 * rng.random()
        q = p / (p - 1)
        lhs = la.schatten_norm(A.conj().T @ B, 1)
        assert la.schatten_norm(A, q) * la.schatten_norm(B, p) - lhs >= -la.TOL_INEQ
        # Hoelder with a quasi-norm on the left: ||AB||_p0 <= ||A||_p ||B||_q, 1/p0 = 1/p + 1/q, p0 < 1
        p0 = 0.3 + 0.6 * rng.random()
        s = 1 / p0
        a = 0.5 * s
        assert la.schatten_norm(A, 1 / a) * la.schatten_norm(B, 1 / (s - a)) - la.schatten_norm(A @ B, p0) >= -la.TOL_INEQ


def test_vec_mat_roundtrip_and_superop(rng):
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(la.mat(la.vec(A), 3), A)
    a, X, b = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3))
    assert np.allclose(la.vec(a @ X @ b), la.kron(a, b.T) @ la.vec(X))
    assert np.allclose(la.vec(a @ X @ b), la.superop(a, b) @ la.vec(X))
    with pytest.raises(ParameterError):
        la.mat(np.ones(5), 2)


def test_kron_associative_and_partial_trace(rng):
    A, B, C = (rand_state(rng, 2) for _ in range(3))
    assert np.allclose(la.kron(la.kron(A, B), C), la.kron(A, la.kron(B, C)))
    rho, sigma = rand_state(rng, 3), rand_state(rng, 2)
    assert np.allclose(la.partial_trace(la.kron(rho, sigma), (3, 2), 1), rho)
    assert np.allclose(la.partial_trace(la.kron(rho, sigma), (3, 2), 0), sigma)
    with pytest.raises(ParameterError):
        la.partial_trace(rho, (2, 2), 1)


def test_function_basis_independence_on_degenerate_spectrum(rng):
    U = rand_unitary(rng, 3)
    H = U @ np.diag([0.25, 0.25, 0.5]) @ U.conj().T
    ref = U @ np.diag(np.sqrt([0.25, 0.25, 0.5])) @ U.conj().T
    assert np.allclose(la.msqrt(H), ref, atol=1e-12)


def _neg_norm(B, p):
    # ||b||_p for p < 0 on invertible b: (sum s_i^p)^(1/p)
    s = sla.svdvals(B)
    return np.sum(s**p) ** (1 / p)


def test_reverse_holder(rng):
    for _ in range(100):
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        p0 = 0.1 + 0.8 * rng.random()
        r = p0 + 0.05 + 2 * rng.random()
        p1 = 1 / (1 / r - 1 / p0)
        assert p1 < 0
        lhs = la.schatten_norm(A, p0) * _neg_norm(B, p1)
        assert la.schatten_norm(A.conj().T @ B, r) - lhs >= -la.TOL_INEQ * lhs


def test_power_product_svdvals_commuting():
    p, q = np.array([1 - 1e-12, 1e-12]), np.array([1e-10, 1 - 1e-10])
    sv = la.power_product_svdvals(np.diag(p), 3.0, np.diag(q), 2.5)
    assert np.allclose(np.sort(sv), np.sort(p**3.0 * q**2.5), rtol=1e-12, atol=0)


def test_power_product_svdvals_keeps_tiny_values(rng):
    # sigma_1 sigma_2 = |det|, so the small value is fixed by the determinants
    for _ in range(10):
        A, B = rand_state(rng, 2), rand_state(rng, 2)
        a, b = 0.5, 7.5
        sv = la.power_product_svdvals(A, a, B, b)
        det = np.linalg.det(A).real ** a * np.linalg.det(B).real ** b
        assert sv[0] == pytest.approx(np.linalg.svd(powm(A, a) @ powm(B, b), compute_uv=False)[0], rel=1e-10)
        assert sv[1] == pytest.approx(det / sv[0], rel=1e-8)


def test_power_product_kernel_and_norm(rng):
    A = np.diag([1.0, 0.0])
    B = rand_state(rng, 2)
    sv = la.power_product_svdvals(A, 0.5, B, -0.5)
    assert sv[1] == 0.0
    C = B @ B
    M = powm(B, 0.3) @ powm(C, 0.2)
    assert la.power_product_norm(B, 0.3, C, 0.2, 3) == pytest.approx(la.schatten_norm(M, 3), rel=1e-10)
