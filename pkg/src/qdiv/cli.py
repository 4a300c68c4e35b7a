"""``qdiv`` command-line interface.

    qdiv divergence   --config run.json [--out table.csv] [--format csv|json] [--timing]
    qdiv verify       [--config verify.json] [--seed N] [--out report.jsonl]
    qdiv discriminate --config pair.json [--out sweep.csv]

The configuration is a single JSON document.  Matrices are inline objects
``{"dim": d, "re": [...], "im": [...]}`` (row-major) or paths, relative to
the configuration file, of JSON files holding such an object.  Output is
written atomically, so a failed run never leaves a partial file.

Exit status: 0 on success, 1 when a verification property fails, 2 on any
input or runtime error.
"""
import argparse
import csv
import io
import json
import os
import sys
import time

import numpy as np

from . import discrimination as dsc
from . import divergences as dv
from . import multistate as ms
from . import verify
from .errors import CapExceededError, ParameterError, QdivError
from .states import check_density, matrix_from_json

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class ConfigError(QdivError):
    """The configuration file is missing, malformed or inconsistent."""


# ---------------------------------------------------------------- formatting


def fmt(x):
    """17 significant digits, locale independent; empty for ``None``."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (list, tuple)):
        return ";".join(fmt(v) for v in x)
    return str(x)


def _json_safe(x):
    if isinstance(x, (float, np.floating)):
        return float(x) if np.isfinite(x) else None
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def render(columns, rows, form):
    if form == "json":
        return json.dumps([{c: _json_safe(row.get(c)) for c in columns} for row in rows], indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def emit(text, out):
    if out is None:
        sys.stdout.write(text)
        return
    tmp = f"{out}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, out)


# ---------------------------------------------------------------- config


def load_config(path):
    if path is None:
        return {}, "."
    try:
        with open(path, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg, os.path.dirname(os.path.abspath(path))


def load_matrix(value, field, base):
    if isinstance(value, str):
        path = os.path.join(base, value)
        try:
            with open(path, encoding="utf-8") as fh:
                value = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"field {field!r}: cannot read {path!r}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"field {field!r}: {path!r} is not valid JSON: {exc.msg}") from exc
    if not isinstance(value, dict):
        raise ConfigError(f"field {field!r}: expected a matrix object or a path")
    try:
        return matrix_from_json(value)
    except ParameterError as exc:
        raise ConfigError(f"field {field!r}: {exc}") from exc


def load_state(cfg, field, base):
    if field not in cfg:
        raise ConfigError(f"missing field {field!r}")
    try:
        return check_density(load_matrix(cfg[field], field, base))
    except ConfigError:
        raise
    except QdivError as exc:
        raise ConfigError(f"field {field!r}: {exc}") from exc


def load_states(cfg, field, base):
    items = cfg.get(field, [])
    if not isinstance(items, list):
        raise ConfigError(f"field {field!r} must be a list of matrices")
    out = []
    for i, item in enumerate(items):
        out.append(load_state({f"{field}[{i}]": item}, f"{field}[{i}]", base))
    return out


def _grid(cfg, key, default):
    vals = cfg.get("grid", {}).get(key, default)
    if not isinstance(vals, list) or not vals:
        raise ConfigError(f"grid field {key!r} must be a nonempty list")
    return vals


# ---------------------------------------------------------------- divergence

TWO_STATE = ("relative_entropy", "petz", "sandwiched", "theta_r", "r_infinity", "extended_theta_r", "f_divergence")
DIV_COLUMNS = ["family", "theta", "r", "alpha", "f", "value", "finite", "classical"]


def _classical_two(family, theta, r, spectra):
    if spectra is None:
        return None
    q, p = spectra
    if family == "relative_entropy":
        return dv.classical_kl(q, p)
    if family in ("petz", "sandwiched", "theta_r", "r_infinity"):
        return dv.classical_renyi(theta, q, p)
    if family == "extended_theta_r":
        return dv.classical_renyi(theta, q, p) / theta
    return None


def _two_state_rows(family, cfg, psi, omega, spectra):
    thetas = [float(t) for t in _grid(cfg, "theta", [0.5])]
    rs = [float(r) for r in _grid(cfg, "r", [1.0])]
    if family == "relative_entropy":
        res = dv.relative_entropy(psi, omega)
        yield {"value": res.value, "finite": res.finite, "classical": _classical_two(family, None, None, spectra)}
        return
    if family in ("petz", "sandwiched", "r_infinity"):
        fn = getattr(dv, family)
        for t in thetas:
            res = fn(t, psi, omega)
            yield {"theta": t, "value": res.value, "finite": res.finite,
                   "classical": _classical_two(family, t, None, spectra)}
        return
    if family == "f_divergence":
        for f in _grid(cfg, "f", ["power:0.5"]):
            for r in rs:
                res = dv.f_divergence(f, r, psi, omega)
                yield {"r": r, "f": f, "value": res.value, "finite": res.finite}
        return
    fn = dv.theta_r if family == "theta_r" else dv.extended_theta_r
    for t in thetas:
        for r in rs:
            res = fn(t, r, psi, omega)
            yield {"theta": t, "r": r, "value": res.value, "finite": res.finite,
                   "classical": _classical_two(family, t, r, spectra)}


def _joint_spectra(states, omega):
    """Joint eigenvalues when all states commute pairwise, else ``None``."""
    mats = list(states) + [omega]
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if dv.commuting_spectra(mats[i], mats[j]) is None:
                return None
    _, U = np.linalg.eigh(sum(np.pi ** (k + 1) / 10 * m for k, m in enumerate(mats)))
    return [np.clip(np.real(np.diag(U.conj().T @ m @ U)), 0.0, None) for m in mats]


def _multi_rows(cfg, states, omega):
    n = len(states)
    if n < 2:
        raise ConfigError("multi_state needs at least two entries in 'states'")
    weights = _grid(cfg, "thetas", [[0.5 / n] * n])
    chains = _grid(cfg, "alphas", [[0.5] * (n - 1)])
    rs = [float(r) for r in _grid(cfg, "r", [1.0])]
    spectra = _joint_spectra(states, omega)
    for w in weights:
        for chain in chains:
            for r in rs:
                res = ms.multi_state(w, r, chain, states, omega)
                classical = None
                if spectra is not None:
                    # the generating functional includes (1 - theta_0) in its prefactor
                    theta0 = max(0.0, 1.0 - sum(w))
                    classical = (1.0 - theta0) * ms.classical_multi(list(w) + [theta0], spectra)
                yield {"family": "multi_state", "theta": list(w), "r": r, "alpha": list(chain),
                       "value": res.value, "finite": res.finite, "classical": classical}


def cmd_divergence(cfg, base, args):
    families = cfg.get("families", ["relative_entropy", "petz", "sandwiched", "theta_r"])
    if not isinstance(families, list) or not families:
        raise ConfigError("field 'families' must be a nonempty list")
    unknown = [f for f in families if f not in TWO_STATE + ("multi_state",)]
    if unknown:
        raise ConfigError(f"field 'families': unknown entries {unknown}")
    omega = load_state(cfg, "omega", base)
    psi = load_state(cfg, "psi", base) if any(f in TWO_STATE for f in families) else None
    states = load_states(cfg, "states", base) if "multi_state" in families else []
    spectra = dv.commuting_spectra(psi, omega) if psi is not None else None
    rows = []
    for family in families:
        start = time.perf_counter()
        if family == "multi_state":
            produced = list(_multi_rows(cfg, states, omega))
        else:
            produced = [dict(row, family=family) for row in _two_state_rows(family, cfg, psi, omega, spectra)]
        elapsed = (time.perf_counter() - start) / max(len(produced), 1)
        for row in produced:
            if args.timing:
                row["wall_time"] = elapsed
            rows.append(row)
    columns = DIV_COLUMNS + (["wall_time"] if args.timing else [])
    emit(render(columns, rows, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- verify


def verify_config(cfg, seed):
    try:
        kwargs = {"master_seed": int(seed if seed is not None else cfg.get("master_seed", 0))}
        if "tolerance" in cfg:
            kwargs["tolerance"] = float(cfg["tolerance"])
        if "dims" in cfg:
            kwargs["dims"] = tuple(int(d) for d in cfg["dims"])
        if "out_dims" in cfg:
            kwargs["out_dims"] = tuple(int(d) for d in cfg["out_dims"])
        if "n_samples" in cfg:
            kwargs["n_samples"] = int(cfg["n_samples"])
        if "grid" in cfg:
            kwargs["param_grid"] = dict(verify.DEFAULT_GRID, **cfg["grid"])
        return verify.SuiteConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid verify config: {exc}") from exc


def cmd_verify(cfg, base, args):
    config = verify_config(cfg, args.seed)
    sizes = cfg.get("sizes")
    if sizes is not None and any(int(v) < 1 for v in sizes.values()):
        raise ConfigError("every entry of 'sizes' must be at least 1")
    reports, summary = verify.run_all(config, sizes=sizes, suites=cfg.get("suites"))
    if args.format == "csv":
        cols = ["suite", "trial_index", "seed", "dims", "margin", "pass", "resamples"]
        rows = [{"suite": r.suite, "trial_index": r.trial_index, "seed": r.seed, "dims": list(r.dims),
                 "margin": r.margin, "pass": r.passed, "resamples": r.resamples} for r in reports]
        text = render(cols, rows, "csv")
    else:
        text = verify.format_report(reports, summary)
    emit(text, args.out)
    print(
        f"qdiv verify: {summary['passed']}/{summary['trials']} trials passed (seed {summary['master_seed']})",
        file=sys.stderr,
    )
    return EXIT_OK if summary["all_pass"] else EXIT_FAIL


# ---------------------------------------------------------------- discriminate

DISC_COLUMNS = [
    "n", "helstrom_error", "helstrom_slope", "np_alpha", "np_beta", "stein_exponent",
    "chernoff", "chernoff_optimizer", "relative_entropy",
    "hoeffding_rate", "hoeffding", "hoeffding_optimizer",
    "converse_rate", "converse_hoeffding", "converse_optimizer", "converse_at_edge",
    "sanov", "sanov_index", "multi_chernoff", "multi_chernoff_pair",
]


def cmd_discriminate(cfg, base, args):
    psi, omega = load_state(cfg, "psi", base), load_state(cfg, "omega", base)
    alternatives = load_states(cfg, "alternatives", base) or [psi]
    try:
        n_max = int(cfg.get("n_max", 8))
        prior = float(cfg.get("prior", 0.5))
        alpha_max = float(cfg.get("alpha", 0.05))
        theta_max = float(cfg.get("theta_max", dsc.THETA_MAX))
        cap = int(cfg.get("cap", dsc.DIM_CAP))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid discriminate config: {exc}") from exc
    if n_max < 1:
        raise ConfigError(f"field 'n_max' must be at least 1, got {n_max}")
    d = psi.shape[0]
    if d**n_max > cap:
        raise CapExceededError(d, n_max, cap)
    S = dv.relative_entropy(psi, omega).value
    h_rate = float(cfg.get("hoeffding_rate", 0.5 * S if np.isfinite(S) else 1.0))
    c_rate = float(cfg.get("converse_rate", 2.0 * S if np.isfinite(S) else 1.0))
    ch = dsc.chernoff(psi, omega)
    ho = dsc.hoeffding(h_rate, psi, omega)
    co = dsc.converse_hoeffding(c_rate, psi, omega, theta_max=theta_max)
    K = dsc.HypothesisSet(omega, alternatives)
    sv, si = dsc.sanov(K)
    mc, mp = dsc.multi_chernoff(K)
    scalars = {
        "chernoff": ch.value, "chernoff_optimizer": ch.optimizer, "relative_entropy": S,
        "hoeffding_rate": h_rate, "hoeffding": ho.value, "hoeffding_optimizer": ho.optimizer,
        "converse_rate": c_rate, "converse_hoeffding": co.value, "converse_optimizer": co.optimizer,
        "converse_at_edge": co.at_edge, "sanov": sv, "sanov_index": si,
        "multi_chernoff": mc, "multi_chernoff_pair": list(mp),
    }
    rows = []
    for n in range(1, n_max + 1):
        err = dsc.helstrom_error(psi, omega, prior, n, cap)
        a, b, _ = dsc.beta_at_alpha(psi, omega, n, alpha_max, cap)
        rows.append(dict(
            scalars, n=n, helstrom_error=err,
            helstrom_slope=-np.log(err) / n if err > 0 else float("inf"),
            np_alpha=a, np_beta=b, stein_exponent=-np.log(b) / n if b > 0 else float("inf"),
        ))
    emit(render(DISC_COLUMNS, rows, args.format), args.out)
    return EXIT_OK


# ---------------------------------------------------------------- entry point

COMMANDS = {"divergence": cmd_divergence, "verify": cmd_verify, "discriminate": cmd_discriminate}


def build_parser():
    parser = argparse.ArgumentParser(prog="qdiv", description="Quantum Renyi divergences and property checks.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=name != "verify", help="JSON configuration file")
        p.add_argument("--seed", type=int, default=None, help="master seed (overrides the config)")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=["csv", "json"], default=None)
        if name == "divergence":
            p.add_argument("--timing", action="store_true", help="add a wall_time column (not reproducible)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command == "verify" else "csv"
    try:
        cfg, base = load_config(args.config)
        return COMMANDS[args.command](cfg, base, args)
    except QdivError as exc:
        print(f"qdiv {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"qdiv {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
