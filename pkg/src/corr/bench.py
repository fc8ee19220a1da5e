"""Experiment runner: seeded trials, CSV persistence and aggregates.

A run writes ``<output_dir>/run_<timestamp>_<confighash>/`` containing
``config.json``, ``trials.csv``, ``aggregate.csv``, experiment-specific CSVs,
SVG charts and ``manifest.json``. Every trial row is a pure function of the
config and its trial index; ``wall_ms`` is the only column that varies
between reruns.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from . import __version__
from .baselines import nelder_mead, random_search, simulated_annealing
from .driver import CorrConfig, corr_optimize, search_mu
from .envelope import write_lp
from .sampler import GENERATOR_VERSION, ball_uniform, draw_sample_sets, make_rng
from .surrogate import h_eval
from .testbed import FUNCTION_NAMES, make_function

EXPERIMENTS = ("optimize", "sweep", "scale", "compare", "mu_trace")
COMPARE_METHODS = ("corr", "corr_hybrid", "random_search", "simulated_annealing", "nelder_mead")
SWEEP_T = (20, 50, 100, 200, 500, 1000)
TRACE_POINTS = 401


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    experiment: str = "optimize"
    functions: list = field(default_factory=lambda: ["salomon"])
    dims: list = field(default_factory=lambda: [1])
    t_values: list = field(default_factory=lambda: [500])
    trials: int = 20
    base_seed: int = 0
    methods: list = field(default_factory=lambda: list(COMPARE_METHODS))
    corr: dict = field(default_factory=dict)  # CorrConfig overrides
    output_dir: str = "results"
    workers: int = 1
    mu_values: list | None = None  # surrogates to trace in mu_trace

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        if not self.functions:
            raise ConfigError("no function given")
        for name in self.functions:
            if name not in FUNCTION_NAMES:
                raise ConfigError(f"unknown function {name!r}; choose from {FUNCTION_NAMES}")
        if not self.dims:
            raise ConfigError("dims must not be empty")
        if any(int(d) != d or d < 1 for d in self.dims):
            raise ConfigError("all dims must be positive integers")
        if not self.t_values or any(int(t) != t or t < 1 for t in self.t_values):
            raise ConfigError("t_values must be positive integers")
        if any(b <= a for a, b in zip(self.t_values, self.t_values[1:])):
            raise ConfigError("t_values must be strictly increasing")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.experiment == "compare":
            if not self.methods:
                raise ConfigError("compare needs at least one method")
            for m in self.methods:
                if m not in COMPARE_METHODS:
                    raise ConfigError(f"unknown method {m!r}; choose from {COMPARE_METHODS}")
        bad = set(self.corr) - {f.name for f in fields(CorrConfig)} | ({"T", "seed"} & set(self.corr))
        if bad:
            raise ConfigError(f"invalid corr overrides: {sorted(bad)}")
        try:
            CorrConfig(**self.corr)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid corr overrides: {exc}") from None
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        return self

    def corr_config(self, T, seed, polish=None):
        over = dict(self.corr)
        if polish is not None:
            over["polish"] = polish
        return CorrConfig(T=int(T), seed=int(seed), **over)

    def digest(self):
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:10]


def load_config(path=None, **overrides):
    """Read a JSON config (optional) and apply non-``None`` overrides."""
    data = {}
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    if "function" in data:
        data.setdefault("functions", [data.pop("function")])
    data.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return ExperimentConfig(**data).validate()


@dataclass
class TrialRecord:
    function: str
    dim: int
    T: int
    trial_index: int
    seed: int
    method: str
    mu_hat: float | None
    f_hat: float
    error: float
    eval_count: int
    wall_ms: float
    generator_version: str = GENERATOR_VERSION


TRIAL_COLUMNS = [f.name for f in fields(TrialRecord)]
AGG_COLUMNS = ["function", "dim", "T", "method", "trials", "mean", "median", "q25", "q75", "min", "max", "mean_evals"]


def derive_seed(base_seed, dim, T, trial_index, method):
    """``base_seed XOR hash(dim, T, trial_index, method)`` as a 64-bit integer.

    The method does not enter the hash for the CoRR variants, so ``corr`` and
    ``corr_hybrid`` rows of one trial share their samples.
    """
    tag = "corr" if method in ("corr", "corr_hybrid") else method
    key = f"{int(dim)}|{int(T)}|{int(trial_index)}|{tag}".encode()
    h = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return (int(base_seed) ^ h) & 0xFFFFFFFFFFFFFFFF


def compare_budget(cfg, T):
    """Evaluation budget shared by every method of a compare cell."""
    cc = cfg.corr_config(T, 0, polish=True)
    return 2 * T + cc.probes + cc.polish_budget


def run_trial(job):
    """Run one trial. ``job`` is ``(cfg, function, dim, T, trial_index, method)``."""
    cfg, name, dim, T, trial, method = job
    fn = make_function(name, dim)
    seed = derive_seed(cfg.base_seed, dim, T, trial, method)
    t0 = time.perf_counter()
    mu_hat = None
    if method in ("corr", "corr_hybrid"):
        res = corr_optimize(fn, cfg.corr_config(T, seed, polish=(method == "corr_hybrid")))
        x, f, evals, mu_hat = res.x_hat, res.f_hat, res.eval_count, res.mu_hat
    else:
        budget = compare_budget(cfg, T)
        if method == "random_search":
            res = random_search(fn, budget, seed)
        elif method == "simulated_annealing":
            res = simulated_annealing(fn, budget, seed)
        elif method == "nelder_mead":
            x0 = ball_uniform(make_rng(seed, 12), dim, fn.domain_radius, 1)[0]
            res = nelder_mead(fn, x0, budget)
        else:
            raise ConfigError(f"unknown method {method!r}")
        x, f, evals = res.x_best, res.f_best, res.eval_count
    wall_ms = (time.perf_counter() - t0) * 1e3
    return TrialRecord(
        function=name,
        dim=int(dim),
        T=int(T),
        trial_index=int(trial),
        seed=seed,
        method=method,
        mu_hat=None if mu_hat is None else float(mu_hat),
        f_hat=float(f),
        error=float(f - fn.f_star),
        eval_count=int(evals),
        wall_ms=float(wall_ms),
    )


def run_trials(cfg, jobs):
    """Run trial jobs, in parallel when ``cfg.workers > 1``; order is preserved."""
    jobs = list(jobs)
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(run_trial, jobs))
    return [run_trial(s) for s in jobs]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_trials(path, records):
    write_csv(path, TRIAL_COLUMNS, ([getattr(r, c) for c in TRIAL_COLUMNS] for r in records))


def read_trials(path):
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                TrialRecord(
                    function=row["function"],
                    dim=int(row["dim"]),
                    T=int(row["T"]),
                    trial_index=int(row["trial_index"]),
                    seed=int(row["seed"]),
                    method=row["method"],
                    mu_hat=float(row["mu_hat"]) if row["mu_hat"] else None,
                    f_hat=float(row["f_hat"]),
                    error=float(row["error"]),
                    eval_count=int(row["eval_count"]),
                    wall_ms=float(row["wall_ms"]),
                    generator_version=row["generator_version"],
                )
            )
    return out


def aggregate(records):
    """Summary rows per ``(function, dim, T, method)`` in first-seen order."""
    groups = {}
    for r in records:
        groups.setdefault((r.function, r.dim, r.T, r.method), []).append(r)
    rows = []
    for (name, dim, T, method), rs in groups.items():
        e = np.array([r.error for r in rs])
        q25, med, q75 = np.percentile(e, [25, 50, 75])
        rows.append(
            {
                "function": name,
                "dim": dim,
                "T": T,
                "method": method,
                "trials": len(rs),
                "mean": float(np.mean(e)),
                "median": float(med),
                "q25": float(q25),
                "q75": float(q75),
                "min": float(e.min()),
                "max": float(e.max()),
                "mean_evals": float(np.mean([r.eval_count for r in rs])),
            }
        )
    return rows


def write_aggregate(path, rows):
    write_csv(path, AGG_COLUMNS, ([row[c] for c in AGG_COLUMNS] for row in rows))


def read_csv_dicts(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@dataclass
class Report:
    run_dir: str
    records: list
    aggregate: list
    files: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def make_run_dir(cfg):
    stamp = time.strftime("%Y%m%dT%H%M%S")
    base = os.path.join(cfg.output_dir, f"run_{stamp}_{cfg.digest()}")
    path, k = base, 1
    while os.path.exists(path):
        path = f"{base}_{k}"
        k += 1
    try:
        os.makedirs(path)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc}") from None
    with open(os.path.join(path, "config.json"), "w") as fh:
        json.dump(asdict(cfg), fh, indent=2, sort_keys=True)
    return path


def _finish(cfg, run_dir, records, files, extra=None):
    trials_csv = os.path.join(run_dir, "trials.csv")
    agg_csv = os.path.join(run_dir, "aggregate.csv")
    write_trials(trials_csv, records)
    # aggregates come from the CSV so the two files always agree
    agg = aggregate(read_trials(trials_csv))
    write_aggregate(agg_csv, agg)
    files = {"trials": trials_csv, "aggregate": agg_csv, **files}
    manifest = {
        "artifact": "corr",
        "artifact_version": __version__,
        "generator_version": GENERATOR_VERSION,
        "experiment": cfg.experiment,
        "config_hash": cfg.digest(),
        "files": {k: os.path.basename(v) for k, v in files.items()},
    }
    with open(os.path.join(run_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return Report(run_dir, records, agg, files, extra or {})


def _corr_method(cfg):
    return "corr_hybrid" if cfg.corr.get("polish") else "corr"


def run_optimize(cfg):
    run_dir = make_run_dir(cfg)
    jobs = [
        (cfg, name, dim, T, k, _corr_method(cfg))
        for name in cfg.functions
        for dim in cfg.dims
        for T in cfg.t_values
        for k in range(cfg.trials)
    ]
    return _finish(cfg, run_dir, run_trials(cfg, jobs), {})


def run_sweep(cfg):
    """Error versus T for each function (one dimension per row group)."""
    from .plots import plot_sweep

    run_dir = make_run_dir(cfg)
    jobs = [
        (cfg, name, dim, T, k, _corr_method(cfg))
        for name in cfg.functions
        for dim in cfg.dims
        for T in cfg.t_values
        for k in range(cfg.trials)
    ]
    records = run_trials(cfg, jobs)
    rep = _finish(cfg, run_dir, records, {})
    svg = os.path.join(run_dir, "sweep.svg")
    plot_sweep(rep.files["aggregate"], svg)
    rep.files["sweep_svg"] = svg
    return rep


def scale_matrix(agg_rows, dims, t_values, stat="mean"):
    table = {(int(r["dim"]), int(r["T"])): float(r[stat]) for r in agg_rows}
    return [[table[(d, t)] for t in t_values] for d in dims]


def run_scale(cfg):
    """Mean error over a dim x T grid for one function."""
    from .plots import plot_scale

    if len(cfg.functions) != 1:
        raise ConfigError("scale takes exactly one function")
    run_dir = make_run_dir(cfg)
    name = cfg.functions[0]
    jobs = [(cfg, name, d, T, k, _corr_method(cfg)) for d in cfg.dims for T in cfg.t_values for k in range(cfg.trials)]
    rep = _finish(cfg, run_dir, run_trials(cfg, jobs), {})
    mat = scale_matrix(read_csv_dicts(rep.files["aggregate"]), cfg.dims, cfg.t_values)
    mpath = os.path.join(run_dir, "scale_matrix.csv")
    write_csv(mpath, ["dim"] + [f"T={t}" for t in cfg.t_values], ([d] + row for d, row in zip(cfg.dims, mat)))
    svg = os.path.join(run_dir, "scale.svg")
    plot_scale(mpath, svg)
    rep.files.update({"scale_matrix": mpath, "scale_svg": svg})
    rep.extra["matrix"] = mat
    return rep


def run_compare(cfg):
    """Budget-matched error versus dimension for several methods (one T)."""
    from .plots import plot_compare

    if len(cfg.functions) != 1 or len(cfg.t_values) != 1:
        raise ConfigError("compare takes exactly one function and one T")
    run_dir = make_run_dir(cfg)
    name, T = cfg.functions[0], cfg.t_values[0]
    jobs = [(cfg, name, d, T, k, m) for d in cfg.dims for m in cfg.methods for k in range(cfg.trials)]
    rep = _finish(cfg, run_dir, run_trials(cfg, jobs), {})
    agg = read_csv_dicts(rep.files["aggregate"])
    table = {(int(r["dim"]), r["method"]): r["median"] for r in agg}
    tpath = os.path.join(run_dir, "compare_table.csv")
    write_csv(tpath, ["dim"] + list(cfg.methods), ([d] + [table[(d, m)] for m in cfg.methods] for d in cfg.dims))
    svg = os.path.join(run_dir, "compare.svg")
    plot_compare(tpath, svg)
    rep.files.update({"compare_table": tpath, "compare_svg": svg})
    rep.extra["budget"] = compare_budget(cfg, T)
    return rep


def lower_convex_hull(x, y):
    """Indices of the lower convex hull of points sorted by ``x``."""
    hull = []
    for i in range(len(x)):
        while len(hull) >= 2:
            a, b = hull[-2], hull[-1]
            # drop b when it lies on or above the chord from a to i
            if (y[b] - y[a]) * (x[i] - x[a]) >= (y[i] - y[a]) * (x[b] - x[a]):
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def envelope_1d(fn, grid_points=200001):
    """Convex envelope of a 1-D benchmark on a fine grid, as a callable."""
    if fn.dim != 1:
        raise ValueError("envelope_1d needs a 1-D function")
    x = np.linspace(-fn.domain_radius, fn.domain_radius, grid_points)
    y = fn.evaluate_many(x[:, None])
    idx = lower_convex_hull(x, y)
    hx, hy = x[idx], y[idx]
    return lambda z: np.interp(np.asarray(z, dtype=float).ravel(), hx, hy)


def run_mu_trace(cfg):
    """Profile ``mu -> f(x_mu)`` and trace selected surrogates over a 1-D grid."""
    from .plots import plot_mu_trace

    if len(cfg.functions) != 1 or len(cfg.dims) != 1 or len(cfg.t_values) != 1:
        raise ConfigError("mu_trace takes exactly one function, one dim and one T")
    run_dir = make_run_dir(cfg)
    name, dim, T = cfg.functions[0], cfg.dims[0], cfg.t_values[0]
    fn = make_function(name, dim)
    seed = derive_seed(cfg.base_seed, dim, T, 0, "corr")
    cc = cfg.corr_config(T, seed, polish=False)
    t0 = time.perf_counter()
    samples = draw_sample_sets(fn, T, seed)
    mu_hat, profile, search = search_mu(fn, samples, cc)
    wall_ms = (time.perf_counter() - t0) * 1e3
    f_hat, x_hat, _ = search.best()[1]
    record = TrialRecord(
        function=name, dim=dim, T=T, trial_index=0, seed=seed, method="corr", mu_hat=mu_hat,
        f_hat=float(f_hat), error=float(f_hat - fn.f_star), eval_count=2 * T + search.evaluations,
        wall_ms=wall_ms,
    )
    ppath = os.path.join(run_dir, "mu_profile.csv")
    ordered = sorted(profile)
    write_csv(ppath, ["mu", "f_x_mu", "error"], ((m, g, g - fn.f_star) for m, g in ordered))
    extra = {"mu_hat": mu_hat, "r_hat": search.r_hat, "profile": ordered}
    files = {"mu_profile": ppath}
    if dim == 1:
        env = envelope_1d(fn)
        mu_env = float(np.mean(env(samples[1].points)))
        extra["mu_envelope"] = mu_env
        if cfg.mu_values is not None:
            mus = [float(m) for m in cfg.mu_values]
        else:
            R = search.r_hat
            mus = [-0.5 * R, mu_env, mu_hat, 0.9 * R]
        xs = np.linspace(-fn.domain_radius, fn.domain_radius, TRACE_POINTS)
        cols, header = [xs, fn.evaluate_many(xs[:, None]), env(xs)], ["x", "f", "envelope"]
        for mu in mus:
            theta = search.opt(mu)[1]
            cols.append(h_eval(theta, xs[:, None]))
            header.append(f"h_mu={mu!r}")
        tpath = os.path.join(run_dir, "surrogate_trace.csv")
        write_csv(tpath, header, zip(*[c.tolist() for c in cols]))
        files["surrogate_trace"] = tpath
        extra["trace_mus"] = mus
    rep = _finish(cfg, run_dir, [record], files, extra)
    svg = os.path.join(run_dir, "mu_trace.svg")
    plot_mu_trace(ppath, files.get("surrogate_trace"), svg)
    rep.files["mu_trace_svg"] = svg
    return rep


RUNNERS = {
    "optimize": run_optimize,
    "sweep": run_sweep,
    "scale": run_scale,
    "compare": run_compare,
    "mu_trace": run_mu_trace,
}


def run_experiment(cfg):
    cfg.validate()
    return RUNNERS[cfg.experiment](cfg)


def with_overrides(cfg, **kw):
    return replace(cfg, **kw).validate()


def dump_debug(cfg, run_dir):
    """Write the sample sets and the fit LP at ``mu_hat`` for the first trial.

    Files: ``samples_one.csv``, ``samples_two.csv`` and ``fit.lp``.
    """
    from .envelope import FitProblem

    name, dim, T = cfg.functions[0], cfg.dims[0], cfg.t_values[0]
    fn = make_function(name, dim)
    seed = derive_seed(cfg.base_seed, dim, T, 0, "corr")
    cc = cfg.corr_config(T, seed, polish=False)
    samples = draw_sample_sets(fn, T, seed)
    mu_hat = search_mu(fn, samples, cc)[0]
    out = {}
    for s in samples:
        out[f"samples_{s.set_id}"] = p = os.path.join(run_dir, f"samples_{s.set_id}.csv")
        s.to_csv(p)
    out["fit_lp"] = p = os.path.join(run_dir, "fit.lp")
    write_lp(FitProblem(samples[0], samples[1], mu_hat, cc.box_bound, cc.lp_tol), p)
    return out
