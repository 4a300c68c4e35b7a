"""Seeded randomized property suites.

Every suite draws independent random instances, evaluates a signed margin
(``>= 0`` when the property holds) and returns one :class:`TrialReport` per
trial.  A trial passes when its margin is at least ``-tolerance``.

Trial seeds are derived from ``(master_seed, suite tag, trial_index,
resample)`` through ``numpy.random.SeedSequence``, so a report depends only
on the configuration and never on scheduling.  Instances that turn out to be
numerically degenerate are redrawn up to ``MAX_RESAMPLES`` times.
"""
import json
import math
import os
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import divergences as dv
from . import linops as la
from . import multistate as ms
from .errors import DegenerateInstanceError, ParameterError, PreconditionError
from .states import (
    ModularOp,
    apply_channel,
    gns_contraction,
    omega_vector,
    pnorm_omega,
    random_channel,
    random_density,
    require_full_rank,
)

MAX_RESAMPLES = 16
DEFAULT_TOL = 1e-8
LIMIT_TOL = 1e-4

DEFAULT_GRID = {
    "theta": [0.1, 0.25, 0.5, 0.75, 0.9],
    "r": [1.0, 1.5, 2.0, 4.0],
    "alpha": [0.3, 0.5],
}


@dataclass(frozen=True)
class TrialReport:
    suite: str
    trial_index: int
    seed: int
    dims: tuple
    params: dict
    margin: float
    passed: bool
    resamples: int

    def to_json(self):
        margin = self.margin if math.isfinite(self.margin) else None
        return json.dumps(
            {
                "suite": self.suite,
                "trial_index": self.trial_index,
                "seed": self.seed,
                "dims": list(self.dims),
                "params": self.params,
                "margin": margin,
                "pass": self.passed,
                "resamples": self.resamples,
            },
            sort_keys=True,
        )


@dataclass(frozen=True)
class SuiteConfig:
    """Trial count, dimensions, tolerance, parameter grid and master seed.

    ``out_dims`` lists channel output dimensions and ``n_samples`` the
    number of random starts for sampled norm bounds.
    """

    n_trials: int = 100
    dims: tuple = (2, 3, 4)
    tolerance: float = DEFAULT_TOL
    param_grid: dict = field(default_factory=lambda: dict(DEFAULT_GRID))
    master_seed: int = 0
    out_dims: tuple = (2, 3)
    n_samples: int = 24

    def __post_init__(self):
        if int(self.n_trials) < 1:
            raise ParameterError(f"n_trials must be at least 1, got {self.n_trials}")
        # tolerance 0 demands exact inequalities; useful to exercise failure reporting
        if not self.tolerance >= 0:
            raise ParameterError(f"tolerance must be nonnegative, got {self.tolerance}")
        if not self.dims or not self.out_dims:
            raise ParameterError("dims and out_dims must be nonempty")

    def grid(self, key):
        vals = self.param_grid.get(key, DEFAULT_GRID.get(key))
        if not vals:
            raise ParameterError(f"parameter grid {key!r} is empty")
        return [float(v) for v in vals]


def trial_seed(master_seed, tag, trial_index, resample=0):
    """64-bit seed derived from the master seed, suite tag and trial index."""
    ss = np.random.SeedSequence([int(master_seed), zlib.crc32(tag.encode()), int(trial_index), int(resample)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def worker_count():
    """Worker threads, capped by ``QDIV_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("QDIV_THREADS", "1")))
    except ValueError:
        return 1


def _run_trial(tag, config, index, trial_fn):
    for resample in range(MAX_RESAMPLES + 1):
        seed = trial_seed(config.master_seed, tag, index, resample)
        rng = np.random.default_rng(seed)
        try:
            margin, dims, params = trial_fn(rng, config)
        except (DegenerateInstanceError, PreconditionError):
            continue
        margin = float(margin)
        ok = bool(margin >= -config.tolerance)
        return TrialReport(tag, index, seed, tuple(int(d) for d in dims), params, margin, ok, resample)
    # no usable instance after all resamples: fail explicitly
    seed = trial_seed(config.master_seed, tag, index, MAX_RESAMPLES)
    return TrialReport(tag, index, seed, (), {"degenerate": 1.0}, float("-inf"), False, MAX_RESAMPLES)


def _run_suite(tag, config, trial_fn):
    indices = range(int(config.n_trials))
    workers = worker_count()
    if workers == 1:
        reports = [_run_trial(tag, config, i, trial_fn) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda i: _run_trial(tag, config, i, trial_fn), indices))
    return sorted(reports, key=lambda rep: rep.trial_index)


# ---------------------------------------------------------------- sampling


def _draw_channel(rng, config):
    d_in = int(rng.choice(config.dims))
    d_out = int(rng.choice(config.out_dims))
    # env * d_in >= d_out keeps outputs of full-rank inputs full rank
    env = max(-(-d_in // d_out), -(-d_out // d_in), 1) + int(rng.integers(0, 2))
    return d_in, d_out, random_channel(d_in, d_out, env, seed=rng)


def _push(channel, states):
    out = [apply_channel(channel, s) for s in states]
    for s in out:
        try:
            require_full_rank(s, role="channel output")
        except PreconditionError as exc:
            raise DegenerateInstanceError(str(exc)) from exc
    return out


def _random_thetas(rng, total, n):
    return tuple(float(x) for x in total * rng.dirichlet(np.ones(n)))


def _pair_instance(rng, config):
    d_in, d_out, ch = _draw_channel(rng, config)
    psi, omega = random_density(d_in, seed=rng), random_density(d_in, seed=rng)
    psi_b, omega_b = _push(ch, [psi, omega])
    return (d_in, d_out), ch, (psi, omega), (psi_b, omega_b)


# ---------------------------------------------------------------- DPI


def _dpi_grid(family, config):
    th, rs = config.grid("theta"), config.grid("r")
    if family == "theta_r":
        return [{"theta": t, "r": r} for t in th for r in rs]
    if family == "petz":
        return [{"theta": t} for t in th]
    if family == "sandwiched":
        return [{"theta": t} for t in th + [1.5, 2.0] if t >= 0.5]
    if family == "relative_entropy":
        return [{}]
    if family == "f_divergence":
        fs = ["power:0.3", "power:0.7", "arithmetic", "harmonic", "logarithmic"]
        return [{"f": f, "r": r} for f in fs for r in rs if r >= 1]
    if family == "extended_theta_r":
        return [{"theta": t, "r": r} for t in (-0.5, -0.25) for r in (1.0, 2.0)]
    raise ParameterError(f"unknown DPI family {family!r}")


def _two_state_value(family, p, psi, omega):
    if family == "theta_r":
        return dv.theta_r(p["theta"], p["r"], psi, omega).value
    if family == "petz":
        return dv.petz(p["theta"], psi, omega).value
    if family == "sandwiched":
        return dv.sandwiched(p["theta"], psi, omega).value
    if family == "relative_entropy":
        return dv.relative_entropy(psi, omega).value
    if family == "f_divergence":
        return dv.f_divergence(p["f"], p["r"], psi, omega).value
    return dv.extended_theta_r(p["theta"], p["r"], psi, omega).value


def _numeric(params):
    return {k: float(v) for k, v in params.items() if isinstance(v, (int, float))}


def _two_state_dpi(family):
    def trial(rng, config):
        dims, _, before, after = _pair_instance(rng, config)
        worst, arg = np.inf, None
        for p in _dpi_grid(family, config):
            m = _two_state_value(family, p, *before) - _two_state_value(family, p, *after)
            if m < worst:
                worst, arg = m, p
        params = _numeric(arg)
        if "f" in arg:
            params["f_index"] = float(_dpi_grid(family, config).index(arg))
        return worst, dims, params

    return trial


MULTI_CHAINS = ((0.3,), (0.5,), (0.5, 0.5))


def _multi_dpi(rng, config):
    d_in, d_out, ch = _draw_channel(rng, config)
    chain = MULTI_CHAINS[int(rng.integers(len(MULTI_CHAINS)))]
    n = len(chain) + 1
    r = float(rng.choice([r for r in config.grid("r") if r >= 1]))
    total = float(rng.choice(config.grid("theta")))
    thetas = _random_thetas(rng, total, n)
    states = [random_density(d_in, seed=rng) for _ in range(n)]
    omega = random_density(d_in, seed=rng)
    pushed = _push(ch, states + [omega])
    before = ms.multi_state(thetas, r, chain, states, omega).value
    after = ms.multi_state(thetas, r, chain, pushed[:-1], pushed[-1]).value
    params = {"r": r, "n": float(n), "theta_total": total}
    params.update({f"theta{i + 1}": t for i, t in enumerate(thetas)})
    params.update({f"alpha{i + 1}": a for i, a in enumerate(chain)})
    return before - after, (d_in, d_out), params


def _three_state_dpi(rng, config):
    d_in, d_out, ch = _draw_channel(rng, config)
    r = float(rng.choice([r for r in config.grid("r") if r >= 1]))
    alpha = float(rng.choice(config.grid("alpha")))
    total = float(rng.choice(config.grid("theta")))
    t1, t2 = _random_thetas(rng, total, 2)
    psi1, psi2, omega = (random_density(d_in, seed=rng) for _ in range(3))
    b1, b2, bo = _push(ch, [psi1, psi2, omega])
    before = ms.three_state(t1, t2, r, alpha, psi1, psi2, omega).value
    after = ms.three_state(t1, t2, r, alpha, b1, b2, bo).value
    return before - after, (d_in, d_out), {"theta1": t1, "theta2": t2, "r": r, "alpha": alpha}


DPI_FAMILIES = (
    "theta_r",
    "petz",
    "sandwiched",
    "relative_entropy",
    "f_divergence",
    "three_state",
    "multi_state",
    "extended_theta_r",
)


def dpi_suite(family, config):
    """Data processing: margin = divergence before the channel minus after.

    Two-state families evaluate every grid point on each instance and report
    the worst one.
    """
    if family == "multi_state":
        trial = _multi_dpi
    elif family == "three_state":
        trial = _three_state_dpi
    elif family in DPI_FAMILIES:
        trial = _two_state_dpi(family)
    else:
        raise ParameterError(f"unknown DPI family {family!r}")
    return _run_suite(f"dpi:{family}", config, trial)


# ---------------------------------------------------------------- operator inequalities

MONO_LIFTS = (0.3, 0.7)


def _psd_part(D, power):
    values, vectors = la.eigh(D)
    return (vectors * np.maximum(values, 0.0) ** power) @ la.dagger(vectors)


def modular_monotonicity_suite(config):
    """Margin = min eigenvalue of ``Delta_B - F^dag Delta_A F``.

    The same is checked for ``f(Delta)`` with ``f(x) = x^0.3, x^0.7``; the
    reported margin is the smallest of the three, relative to ``||Delta_B||``.
    """

    def trial(rng, config):
        dims, ch, (psi, omega), (psi_b, omega_b) = _pair_instance(rng, config)
        F = gns_contraction(ch, omega)
        DA = ModularOp(psi, omega).matrix(1.0)
        DB = ModularOp(psi_b, omega_b).matrix(1.0)
        Fd = la.dagger(F)
        scale = max(la.opnorm(DB), 1.0)
        margins = {"p1": la.min_eig(la.hermitize(DB - Fd @ DA @ F)) / scale}
        for s in MONO_LIFTS:
            gap = _psd_part(DB, s) - Fd @ _psd_part(DA, s) @ F
            margins[f"p{s}"] = la.min_eig(la.hermitize(gap)) / scale**s
        key = min(margins, key=margins.get)
        return margins[key], dims, {"power": float(key[1:])}

    return _run_suite("modular_monotonicity", config, trial)


def kubo_ando_suite(config):
    """Monotonicity and the transformer inequality of the weighted geometric mean.

    For ``X <= X'``, ``Y <= Y'``: ``X #_a Y <= X' #_a Y'``; for a contraction
    ``C``: ``C (X #_a Y) C^dag <= (C X C^dag) #_a (C Y C^dag)`` (with ``C X C^dag``
    kept invertible).  The margin is the smaller minimum eigenvalue.
    """

    def trial(rng, config):
        d = int(rng.choice(config.dims))
        a = float(rng.choice(config.grid("alpha") + [0.25, 0.75]))
        X, Y = random_density(d, seed=rng), random_density(d, seed=rng)
        X2 = X + 0.5 * random_density(d, seed=rng)
        Y2 = Y + 0.5 * random_density(d, seed=rng)
        mono = la.min_eig(la.hermitize(ms.kubo_ando_mean(X2, Y2, a) - ms.kubo_ando_mean(X, Y, a)))
        G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        C = G / (la.opnorm(G) * (1.0 + rng.random()))
        lhs = C @ ms.kubo_ando_mean(X, Y, a) @ la.dagger(C)
        rhs = ms.kubo_ando_mean(C @ X @ la.dagger(C), C @ Y @ la.dagger(C), a)
        trans = la.min_eig(la.hermitize(rhs - lhs))
        return min(mono, trans), (d,), {"alpha": a}

    return _run_suite("kubo_ando", config, trial)


HOLDER_GRIDS = ((4.0, 4.0), (2.0, 4.0, 4.0), (3.0, 3.0, 3.0))


def holder_suite(config):
    """Generalized Hoelder inequality for the (p, omega)-norms.

    Margin = ``prod ||psi_i||_1^(1/p_i) - ||Delta_1^(1/p_1)...Delta_n^(1/p_n) Omega||_(r, omega)``
    with ``1/r = sum 1/p_i``; the states are scaled by random positive
    factors so homogeneity is exercised too.
    """

    def trial(rng, config):
        d = int(rng.choice(config.dims))
        ps = HOLDER_GRIDS[int(rng.integers(len(HOLDER_GRIDS)))]
        r = 1.0 / sum(1.0 / p for p in ps)
        omega = random_density(d, seed=rng)
        scales = np.exp(rng.uniform(-1.0, 1.0, len(ps)))
        states = [c * random_density(d, seed=rng) for c in scales]
        v = omega_vector(omega)
        for psi, p in zip(reversed(states), reversed(ps)):
            v = ModularOp(psi, omega).apply(v, 1.0 / p)
        lhs = float(np.prod([c ** (1.0 / p) for c, p in zip(scales, ps)]))
        rhs = pnorm_omega(v, omega, r)
        params = {"r": r, "n": float(len(ps))}
        params.update({f"p{i + 1}": p for i, p in enumerate(ps)})
        return (lhs - rhs) / lhs, (d,), params

    return _run_suite("holder", config, trial)


# ---------------------------------------------------------------- contraction norms


def _norm_ratio(F, X, omega_a, omega_b, sq_b, p):
    v = la.vec(X @ sq_b)
    den = pnorm_omega(v, omega_b, p)
    if den == 0.0:
        return 0.0
    return pnorm_omega(F @ v, omega_a, p) / den


def sampled_contraction_norm(F, omega_a, omega_b, p, n_samples, rng, ascent_steps=100, decay=0.7):
    """Lower bound on ``||F||_{(p, Omega_B) -> (p, Omega_A)}`` by sampling.

    Inputs are ``b |Omega_B>`` with Gaussian ``b`` (the identity is always
    included), refined by coordinate-perturbation ascent.  The result is a
    certified lower bound, never a claim of the exact norm.
    """
    d = omega_b.shape[0]
    sq_b = la.msqrt(omega_b)
    best_X = np.eye(d, dtype=complex)
    best = _norm_ratio(F, best_X, omega_a, omega_b, sq_b, p)
    for _ in range(n_samples):
        X = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        val = _norm_ratio(F, X, omega_a, omega_b, sq_b, p)
        if val > best:
            best_X, best = X, val
    step = 0.5 * np.linalg.norm(best_X) / d
    for _ in range(ascent_steps):
        i, j = rng.integers(d), rng.integers(d)
        trial = best_X.copy()
        trial[i, j] += step * (1.0 if rng.random() < 0.5 else 1j) * rng.choice([-1.0, 1.0])
        val = _norm_ratio(F, trial, omega_a, omega_b, sq_b, p)
        if val > best:
            best_X, best = trial, val
        else:
            step *= decay
            if step < 1e-14:
                break
    return best


def _contraction_instance(rng, config):
    d_in, d_out, ch = _draw_channel(rng, config)
    omega = random_density(d_in, seed=rng)
    F = gns_contraction(ch, omega)
    return (d_in, d_out), F, omega, apply_channel(ch, omega)


CONTRACTION_PS = (2.0, 4.0, 8.0, np.inf)


def contraction_norm_suite(config):
    """``||F||_{p -> p} <= 1``: exact at ``p = 2``, sampled lower bounds otherwise.

    Margin = ``1 - L(p)`` minimized over ``p`` in {2, 4, 8, inf}.
    """

    def trial(rng, config):
        dims, F, omega_a, omega_b = _contraction_instance(rng, config)
        bounds = {2.0: la.opnorm(F)}
        for p in CONTRACTION_PS[1:]:
            bounds[p] = sampled_contraction_norm(F, omega_a, omega_b, p, config.n_samples, rng)
        worst = max(bounds, key=bounds.get)
        return 1.0 - bounds[worst], dims, {"p": float(worst), "norm2": bounds[2.0]}

    return _run_suite("contraction_norm", config, trial)


RT_THETAS = (0.25, 0.5, 0.75)


def riesz_thorin_suite(config):
    """Interpolation consistency between the ``p = inf`` and ``p = 2`` endpoints.

    Margin = ``U(inf)^(1-t) U(2)^t - L(p_t)`` with ``1/p_t = t/2``; ``U(2)`` is
    exact, ``U(inf)`` is the sampled supremum (identity included) and ``L``
    a sampled lower bound.  A consistency check, not a proof.
    """

    def trial(rng, config):
        dims, F, omega_a, omega_b = _contraction_instance(rng, config)
        u2 = la.opnorm(F)
        uinf = sampled_contraction_norm(F, omega_a, omega_b, np.inf, config.n_samples, rng)
        worst, arg = np.inf, None
        for t in RT_THETAS:
            lower = sampled_contraction_norm(F, omega_a, omega_b, 2.0 / t, config.n_samples, rng)
            m = uinf ** (1.0 - t) * u2**t - lower
            if m < worst:
                worst, arg = m, t
        return worst, dims, {"theta": arg, "p": 2.0 / arg}

    return _run_suite("riesz_thorin", config, trial)


# ---------------------------------------------------------------- extended range

EXT_THETAS = (0.25, 0.5, 0.75, 1.0)


def extended_witness_margin(psi, omega, theta):
    """``c^theta - ||Delta_{psi|omega}^(-theta/2) Delta_omega^(theta/2)||`` on the materialized product.

    At ``theta = 1`` the margin is instead the minimum eigenvalue of
    ``c Delta_{psi|omega} - Delta_omega`` (relative to its norm).
    """
    c = dv.majorization_constant(psi, omega)
    if theta == 1.0:
        gap = c * ModularOp(psi, omega).matrix(1.0) - ModularOp(omega, omega).matrix(1.0)
        return la.min_eig(gap) / max(la.opnorm(gap), 1.0)
    prod = ModularOp(psi, omega).matrix(-theta / 2.0) @ ModularOp(omega, omega).matrix(theta / 2.0)
    return c**theta - la.opnorm(prod)


def extended_range_suite(config):
    """Majorization witness for every theta in {0.25, 0.5, 0.75, 1} plus DPI at negative theta."""

    def trial(rng, config):
        d = int(rng.choice(config.dims))
        psi, omega = random_density(d, seed=rng), random_density(d, seed=rng)
        margins = {t: extended_witness_margin(psi, omega, t) for t in EXT_THETAS}
        t = min(margins, key=margins.get)
        return margins[t], (d,), {"theta": t}

    reports = _run_suite("extended_witness", config, trial)
    return reports + dpi_suite("extended_theta_r", config)


# ---------------------------------------------------------------- limits

R_EXPONENTS = tuple(range(9))


def r_infinity_gaps(theta, psi, omega, exponents=R_EXPONENTS):
    """``|theta_r(theta, 2^k) - r_infinity(theta)|`` for each ``k``."""
    limit = dv.r_infinity(theta, psi, omega).value
    return np.array([abs(dv.theta_r(theta, 2.0**k, psi, omega).value - limit) for k in exponents])


def limit_suite(config):
    """Large-r and epsilon -> 0 limits.

    ``limit:r_infinity`` margin: the smallest decrease between consecutive
    gaps, and ``1e-3`` minus the final gap (qubits).  ``limit:relent``
    margin: ``1e-4`` minus the distance between the Richardson extrapolation
    and the weighted relative entropy.
    """

    def rinf_trial(rng, config):
        theta = float(rng.choice(config.grid("theta")))
        psi, omega = random_density(2, seed=rng), random_density(2, seed=rng)
        gaps = r_infinity_gaps(theta, psi, omega)
        margin = min(float(np.min(gaps[:-1] - gaps[1:])), 1e-3 - gaps[-1])
        return margin, (2,), {"theta": theta, "final_gap": float(gaps[-1])}

    def relent_trial(rng, config):
        d = int(rng.choice(config.dims))
        chain = MULTI_CHAINS[int(rng.integers(len(MULTI_CHAINS)))]
        n = len(chain) + 1
        beta = tuple(float(b) for b in rng.dirichlet(np.ones(n)))
        r = float(rng.choice([r for r in config.grid("r") if r >= 1]))
        states = [random_density(d, seed=rng) for _ in range(n)]
        omega = random_density(d, seed=rng)
        extrap, target = ms.weighted_relent_limit(beta, r, chain, states, omega)
        return LIMIT_TOL - abs(extrap - target), (d,), {"r": r, "n": float(n), "target": target}

    return _run_suite("limit:r_infinity", config, rinf_trial) + _run_suite("limit:relent", config, relent_trial)


# ---------------------------------------------------------------- orchestration

SUITE_SIZES = {
    "dpi:theta_r": 500,
    "dpi:petz": 100,
    "dpi:sandwiched": 100,
    "dpi:relative_entropy": 100,
    "dpi:f_divergence": 100,
    "dpi:three_state": 100,
    "dpi:multi_state": 200,
    "modular_monotonicity": 300,
    "kubo_ando": 300,
    "holder": 300,
    "contraction_norm": 100,
    "riesz_thorin": 50,
    "extended_range": 100,
    "limit": 50,
}


def _suite_runners():
    runners = {f"dpi:{fam}": (lambda cfg, fam=fam: dpi_suite(fam, cfg)) for fam in DPI_FAMILIES if fam != "extended_theta_r"}
    runners.update(
        {
            "modular_monotonicity": modular_monotonicity_suite,
            "kubo_ando": kubo_ando_suite,
            "holder": holder_suite,
            "contraction_norm": contraction_norm_suite,
            "riesz_thorin": riesz_thorin_suite,
            "extended_range": extended_range_suite,
            "limit": limit_suite,
        }
    )
    return runners


def run_all(config=None, sizes=None, suites=None):
    """Run every suite; returns ``(reports, summary)``.

    ``config`` supplies the master seed, tolerance, dimensions and grid;
    its ``n_trials`` is replaced per suite by ``sizes`` (defaults to
    :data:`SUITE_SIZES`).  ``suites`` restricts the run to a subset.
    """
    config = SuiteConfig() if config is None else config
    sizes = dict(SUITE_SIZES, **(sizes or {}))
    runners = _suite_runners()
    names = list(runners) if suites is None else list(suites)
    unknown = [n for n in names if n not in runners]
    if unknown:
        raise ParameterError(f"unknown suites: {unknown}")
    reports = []
    for name in names:
        reports.extend(runners[name](replace(config, n_trials=int(sizes[name]))))
    return reports, summarize(reports, config)


def summarize(reports, config):
    per_suite = {}
    for rep in reports:
        entry = per_suite.setdefault(rep.suite, {"trials": 0, "passed": 0, "resamples": 0, "min_margin": np.inf})
        entry["trials"] += 1
        entry["passed"] += int(rep.passed)
        entry["resamples"] += rep.resamples
        entry["min_margin"] = min(entry["min_margin"], rep.margin)
    for entry in per_suite.values():
        if not math.isfinite(entry["min_margin"]):
            entry["min_margin"] = None
    total = len(reports)
    passed = sum(rep.passed for rep in reports)
    return {
        "master_seed": int(config.master_seed),
        "tolerance": float(config.tolerance),
        "trials": total,
        "passed": passed,
        "failed": total - passed,
        "all_pass": passed == total,
        "suites": per_suite,
    }


def write_report(path, reports, summary):
    """JSON lines, one report per line, then ``{"summary": ...}``; written atomically."""
    text = format_report(reports, summary)
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def format_report(reports, summary):
    lines = [rep.to_json() for rep in reports]
    lines.append(json.dumps({"summary": summary}, sort_keys=True))
    return "\n".join(lines) + "\n"


__all__ = [
    "TrialReport",
    "SuiteConfig",
    "trial_seed",
    "dpi_suite",
    "modular_monotonicity_suite",
    "kubo_ando_suite",
    "holder_suite",
    "contraction_norm_suite",
    "sampled_contraction_norm",
    "riesz_thorin_suite",
    "extended_range_suite",
    "extended_witness_margin",
    "limit_suite",
    "r_infinity_gaps",
    "run_all",
    "summarize",
    "write_report",
    "format_report",
]
