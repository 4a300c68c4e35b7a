import numpy as np
import pytest

from qdiv import divergences as dv
from qdiv import linops as la
from qdiv import multistate as ms
from qdiv.errors import ParameterError, PreconditionError

from helpers import powm, rand_probs, rand_state, rand_unitary


def _psd_above(rng, X, scale=0.3):
    G = rng.standard_normal(X.shape) + 1j * rng.standard_normal(X.shape)
    return X + scale * G @ G.conj().T


def test_gamma_weights():
    assert np.allclose(ms.gamma_weights([0.3]), [0.7, 0.3])
    assert np.allclose(ms.gamma_weights([0.5, 0.5]), [0.5, 0.25, 0.25])
    assert ms.gamma_weights([0.2, 0.9, 0.4]).sum() == pytest.approx(1.0)
    assert np.allclose(ms.AlphaChain((0.5, 0.5)).gammas, [0.5, 0.25, 0.25])
    with pytest.raises(ParameterError):
        ms.gamma_weights([1.2])


def test_theta_weights():
    w = ms.ThetaWeights((0.2, 0.3))
    assert w.theta0 == pytest.approx(0.5) and len(w) == 2
    with pytest.raises(ParameterError):
        ms.ThetaWeights((0.7, 0.6))
    with pytest.raises(ParameterError):
        ms.ThetaWeights((-0.1,))


def test_kubo_ando_examples(rng):
    X = rand_state(rng, 3)
    assert np.allclose(ms.kubo_ando_mean(X, X, 0.3), X)
    assert np.allclose(ms.kubo_ando_mean(np.diag([1.0, 4.0]), np.diag([4.0, 1.0]), 0.5), np.diag([2.0, 2.0]))
    U = rand_unitary(rng, 3)
    a, b = rand_probs(rng, 3), rand_probs(rng, 3)
    Xc, Yc = U @ np.diag(a) @ U.conj().T, U @ np.diag(b) @ U.conj().T
    expected = U @ np.diag(a**0.7 * b**0.3) @ U.conj().T
    assert np.allclose(ms.kubo_ando_mean(Xc, Yc, 0.3), expected)
    with pytest.raises(PreconditionError):
        ms.kubo_ando_mean(np.diag([1.0, 0.0]), X[:2, :2], 0.5)


def test_kubo_ando_geometric_oracle(rng):
    X, Y = rand_state(rng, 3), rand_state(rng, 3)
    Xh, Xmh = powm(X, 0.5), powm(X, -0.5)
    oracle = Xh @ powm(Xmh @ Y @ Xmh, 0.4) @ Xh
    assert np.allclose(ms.kubo_ando_mean(X, Y, 0.4), oracle, atol=1e-10)
    f = ms.MeanSpec.general(lambda x: (1 + x) / 2)
    assert np.allclose(ms.kubo_ando_mean(X, Y, f), (X + Y) / 2)
    with pytest.raises(ParameterError):
        ms.MeanSpec.general(lambda x: 2 * x)


def test_kubo_ando_monotonicity_and_transformer(rng):
    for _ in range(20):
        XA, YA = rand_state(rng, 3), rand_state(rng, 3)
        XB, YB = _psd_above(rng, XA), _psd_above(rng, YA)
        for spec in (0.3, ms.MeanSpec.general(lambda x: 2 * x / (1 + x))):
            gap = ms.kubo_ando_mean(XB, YB, spec) - ms.kubo_ando_mean(XA, YA, spec)
            assert la.min_eig(la.hermitize(gap)) >= -la.TOL_INEQ
            T = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
            T /= 1.1 * la.opnorm(T)
            lhs = T @ ms.kubo_ando_mean(XA, YA, spec) @ T.conj().T
            rhs = ms.kubo_ando_mean(T @ XA @ T.conj().T, T @ YA @ T.conj().T, spec)
            assert la.min_eig(la.hermitize(rhs - lhs)) >= -la.TOL_INEQ
            assert np.allclose(lhs, rhs, atol=1e-9)  # invertible T gives equality


def test_chained_mean(rng):
    X = rand_state(rng, 2)
    assert np.allclose(ms.chained_mean([X], []), X)
    assert np.allclose(ms.chained_mean([X, X, X], [0.3, 0.6]), X)
    ds = [rand_probs(rng, 3) for _ in range(3)]
    out = ms.chained_mean([np.diag(d) for d in ds], [0.5, 0.5])
    g = ms.gamma_weights([0.5, 0.5])
    assert np.allclose(out, np.diag(ds[0] ** g[0] * ds[1] ** g[1] * ds[2] ** g[2]))
    A, B, C = (rand_state(rng, 2) for _ in range(3))
    assert np.allclose(
        ms.chained_mean([A, B, C], [0.4, 0.7]),
        ms.kubo_ando_mean(A, ms.kubo_ando_mean(B, C, 0.7), 0.4),
    )


def test_three_state_examples(rng):
    psi1, psi2, omega = (rand_state(rng, 2) for _ in range(3))
    for theta2 in (0.3, 0.6):
        val = ms.three_state(0.0, theta2, 2.0, 0.4, psi1, psi2, omega).value
        assert val == pytest.approx(dv.theta_r(theta2, 2.0, psi2, omega).value, abs=1e-10)
    t1, t2, r = 0.2, 0.3, 1.5
    t0 = 1 - t1 - t2
    val = ms.three_state(t1, t2, r, 0.6, psi1, psi1, omega).value
    expected = t0 / ((t1 - 1) * (t2 - 1)) * dv.theta_r(t1 + t2, r, psi1, omega).value
    assert val == pytest.approx(expected, abs=1e-10)
    assert ms.three_state(t1, t2, r, 0.5, omega, omega, omega).value == pytest.approx(0.0, abs=1e-12)


def test_three_state_commuting_alpha_independent(rng):
    ds = [rand_probs(rng, 3) for _ in range(3)]
    U = rand_unitary(rng, 3)
    psi1, psi2, omega = (U @ np.diag(d) @ U.conj().T for d in ds)
    t1, t2 = 0.25, 0.35
    t0 = 1 - t1 - t2
    ref = (1 - t0) * ms.classical_multi([t1, t2, t0], [ds[0], ds[1], ds[2]])
    for alpha in (0.2, 0.5, 0.8):
        for r in (1.0, 3.0):
            assert ms.three_state(t1, t2, r, alpha, psi1, psi2, omega).value == pytest.approx(ref, abs=1e-10)


def test_three_state_modular_cross_path(rng):
    worst = 0.0
    for k in range(100):
        psi1, psi2, omega = (rand_state(rng, 2) for _ in range(3))
        t1 = (0.2, 0.4)[k % 2]
        t2 = (0.2, 0.4)[(k // 2) % 2]
        r = (1.0, 2.0)[(k // 4) % 2]
        alpha = (0.3, 0.5, 0.7)[k % 3]
        a = ms.three_state(t1, t2, r, alpha, psi1, psi2, omega).value
        b = ms.three_state_modular(t1, t2, r, alpha, psi1, psi2, omega).value
        worst = max(worst, abs(a - b))
    assert worst < 1e-8
    omega = rand_state(rng, 2)
    assert ms.three_state_modular(0.3, 0.3, 1.0, 0.5, omega, omega, omega).value == pytest.approx(0.0, abs=1e-12)


def test_three_state_f_with_square_root(rng):
    psi1, psi2, omega = (rand_state(rng, 2) for _ in range(3))
    t1, t2, r = 0.4, 0.6, 1.0
    spec = ms.MeanSpec.general(lambda x: np.sqrt(x))
    general = ms.three_state_modular(t1, t2, r, spec, psi1, psi2, omega).value
    geo = ms.three_state(t1 / 2, t2 / 2, r, 0.5, psi1, psi2, omega).value
    assert general == pytest.approx((1 - t1 / 2) * (1 - t2 / 2) * geo, abs=1e-10)


def test_multi_state_reductions(rng):
    psi1, psi2, omega = (rand_state(rng, 2) for _ in range(3))
    val = ms.multi_state((0.4,), 2.0, (), [psi1], omega).value
    assert val == pytest.approx(dv.theta_r(0.4, 2.0, psi1, omega).value, abs=1e-10)
    val = ms.multi_state((0.2, 0.3), 1.5, (0.6,), [psi1, psi2], omega).value
    assert val == pytest.approx(ms.three_state(0.2, 0.3, 1.5, 0.6, psi1, psi2, omega).value, abs=1e-10)
    assert ms.multi_state((0.2, 0.3, 0.1), 2.0, (0.5, 0.5), [omega] * 3, omega).value == pytest.approx(0.0, abs=1e-12)
    hat = ms.multi_state((0.2, 0.3), 1.5, (0.6,), [psi1, psi2], omega, normalized=True).value
    assert hat == pytest.approx(val / 0.5)


def test_multi_state_modular_cross_path(rng):
    for _ in range(10):
        states = [rand_state(rng, 2) for _ in range(3)]
        omega = rand_state(rng, 2)
        a = ms.multi_state((0.2, 0.25, 0.15), 2.0, (0.4, 0.6), states, omega).value
        b = ms.multi_state_modular((0.2, 0.25, 0.15), 2.0, (0.4, 0.6), states, omega).value
        assert a == pytest.approx(b, abs=1e-8)


def test_multi_state_commuting_matches_classical(rng):
    ds = [rand_probs(rng, 3) for _ in range(3)]
    thetas = (0.5, 0.3, 0.2)
    U = rand_unitary(rng, 3)
    states = [U @ np.diag(d) @ U.conj().T for d in ds]
    ref = ms.classical_multi(thetas, ds)
    for r in (1.0, 2.5):
        for chain in ((0.5, 0.5), (0.3, 0.6)):
            # theta_0 = 0, so omega only enters with exponent zero
            val = ms.multi_state(thetas, r, chain, states, rand_state(rng, 3)).value
            assert val == pytest.approx(ref, abs=1e-10)


def test_classical_multi(rng):
    q, p = rand_probs(rng, 4), rand_probs(rng, 4)
    theta = 0.3
    # two distributions with weights (theta, 1 - theta) reduce to a scaled Renyi divergence
    val = ms.classical_multi([theta, 1 - theta], [q, p])
    assert val == pytest.approx(dv.classical_renyi(theta, q, p) / theta, abs=1e-12)
    assert ms.classical_multi([0.2, 0.3, 0.5], [q, q, q]) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ParameterError):
        ms.classical_multi([0.2, 0.3], [q, p])


def test_weighted_relent_limit(rng):
    psi, omega = rand_state(rng, 2), rand_state(rng, 2)
    extrap, target = ms.weighted_relent_limit([1.0], 1.0, (), [psi], omega)
    assert target == pytest.approx(dv.relative_entropy(omega, psi).value)
    assert extrap == pytest.approx(target, abs=1e-4)
    extrap, target = ms.weighted_relent_limit([0.5, 0.5], 2.0, (0.5,), [omega, omega], omega)
    assert extrap == pytest.approx(0.0, abs=1e-10) and target == pytest.approx(0.0, abs=1e-12)


def test_weighted_relent_limit_commuting(rng):
    ds = [rand_probs(rng, 3) for _ in range(3)]
    q = rand_probs(rng, 3)
    beta = np.array([0.2, 0.5, 0.3])
    extrap, target = ms.weighted_relent_limit(beta, 1.0, (0.5, 0.5), [np.diag(d) for d in ds], np.diag(q))
    classical = sum(b * dv.classical_kl(q, d) for b, d in zip(beta, ds))
    assert target == pytest.approx(classical, abs=1e-12)
    assert extrap == pytest.approx(classical, abs=1e-4)


def test_multi_r_infinity(rng):
    states = [rand_state(rng, 2) for _ in range(3)]
    omega = rand_state(rng, 2)
    thetas = (0.2, 0.3, 0.1)
    ref = ms.multi_r_infinity(thetas, states, omega).value
    perm = [2, 0, 1]
    assert ms.multi_r_infinity([thetas[i] for i in perm], [states[i] for i in perm], omega).value == pytest.approx(ref)
    assert ms.multi_r_infinity(thetas, [omega] * 3, omega).value == pytest.approx(0.0, abs=1e-12)
    gaps = [abs(ms.multi_state(thetas, 2.0**k, (0.5, 0.5), states, omega).value - ref) for k in range(2, 9)]
    assert gaps[-1] < gaps[0] and gaps[-1] < 1e-3
