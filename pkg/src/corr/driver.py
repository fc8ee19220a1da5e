"""Convex relaxation regression: the end-to-end optimizer.

One run draws two sample sets, then searches the scalar ``mu`` that pins
the surrogate's mean. Each probe ``g(mu)`` fits the surrogate at ``mu``,
minimizes it over the domain and spends one true evaluation at that
minimizer. The search is a uniform grid over ``[-R, R]`` followed by
golden-section refinement around the best grid point.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import nelder_mead
from .envelope import BOX_BOUND, LP_TOL, EnvelopeFitter
from .sampler import draw_sample_sets
from .surrogate import QuadSurrogate, minimize_on_ball

INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CorrConfig:
    T: int = 500
    seed: int = 0
    mu_grid_points: int = 33
    refine_iters: int = 40
    r_override: float | None = None
    box_bound: float = BOX_BOUND
    lp_tol: float = LP_TOL
    polish: bool = False
    polish_budget: int = 2000
    polish_step: float = 0.05

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be >= 1")
        if self.mu_grid_points < 3:
            raise ValueError("mu_grid_points must be >= 3")
        if self.refine_iters < 0:
            raise ValueError("refine_iters must be >= 0")
        if self.polish_budget < 0:
            raise ValueError("polish_budget must be >= 0")

    @property
    def probes(self):
        """Number of ``g(mu)`` evaluations one search spends."""
        return self.mu_grid_points + self.refine_iters


@dataclass
class CorrResult:
    x_hat: np.ndarray
    f_hat: float
    mu_hat: float
    theta_hat: QuadSurrogate
    profile: list  # (mu, g(mu)) in probe order
    eval_count: int
    wall_ms: float
    r_hat: float = float("nan")
    polished: bool = False
    refine_trace: list = field(default_factory=list, repr=False)


class MuSearch:
    """Memoized ``g(mu)`` on a fixed pair of sample sets."""

    def __init__(self, fn, samples, cfg):
        self.fn = fn
        self.cfg = cfg
        self.fitter = EnvelopeFitter(samples[0], samples[1], cfg.box_bound, cfg.lp_tol)
        self.radius = fn.domain_radius
        self.profile = []
        self._cache = {}

    def opt(self, mu):
        """Fit at ``mu`` and minimize the fit over the domain."""
        res = self.fitter.fit(mu)
        return minimize_on_ball(res.theta, self.radius), res.theta

    def g(self, mu):
        mu = float(mu)
        if mu not in self._cache:
            x, theta = self.opt(mu)
            val = self.fn(x)
            self._cache[mu] = (val, x, theta)
            self.profile.append((mu, val))
        return self._cache[mu][0]

    def best(self):
        # ties go to the smaller mu
        mu = min(self._cache, key=lambda m: (self._cache[m][0], m))
        return mu, self._cache[mu]

    @property
    def evaluations(self):
        return len(self._cache)


def estimate_R(samples, r_override=None):
    if r_override is not None:
        return float(r_override)
    vals = [np.asarray(s.values) for s in samples]
    if sum(v.size for v in vals) == 0:
        raise ValueError("no samples to estimate R from")
    return float(max(np.max(np.abs(v)) for v in vals if v.size))


def opt_procedure(mu, samples, cfg=None, fn=None):
    """Fit the surrogate at ``mu`` and return ``(x_mu, theta)``."""
    cfg = cfg or CorrConfig()
    fitter = EnvelopeFitter(samples[0], samples[1], cfg.box_bound, cfg.lp_tol)
    theta = fitter.fit(mu).theta
    radius = fn.domain_radius if fn is not None else 2.0
    return minimize_on_ball(theta, radius), theta


def _golden(search, a, b, iters, trace):
    """Golden-section on ``[a, b]`` spending exactly ``iters`` probes."""
    if iters <= 0 or b <= a:
        return
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = search.g(c)
    trace.append(search.best()[1][0])
    if iters == 1:
        return
    fd = search.g(d)
    trace.append(search.best()[1][0])
    for _ in range(iters - 2):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = search.g(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = search.g(d)
        trace.append(search.best()[1][0])


def search_mu(fn, samples, cfg=None):
    """Grid plus golden-section search over ``mu``.

    Returns ``(mu_hat, profile, search)`` where ``search`` keeps every probed
    fit and ``profile`` lists ``(mu, g(mu))`` in probe order.
    """
    cfg = cfg or CorrConfig()
    search = MuSearch(fn, samples, cfg)
    R = estimate_R(samples, cfg.r_override)
    search.r_hat = R
    grid = np.linspace(-R, R, cfg.mu_grid_points)
    gvals = [search.g(mu) for mu in grid]
    k = min(range(len(grid)), key=lambda i: (gvals[i], grid[i]))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    search.refine_trace = []
    _golden(search, lo, hi, cfg.refine_iters, search.refine_trace)
    mu_hat, _ = search.best()
    return mu_hat, list(search.profile), search


def polish(fn, x0, budget, f0=None, step=0.05):
    """Nelder-Mead refinement from ``x0``; never returns a worse point."""
    res = nelder_mead(fn, x0, budget, step=step, f0=f0)
    return res.x_best, res.f_best, res.eval_count


def corr_optimize(fn, cfg=None):
    cfg = cfg or CorrConfig()
    t0 = time.perf_counter()
    samples = draw_sample_sets(fn, cfg.T, cfg.seed)
    mu_hat, profile, search = search_mu(fn, samples, cfg)
    _, (f_hat, x_hat, theta) = search.best()
    evals = sum(s.size for s in samples) + search.evaluations
    polished = False
    if cfg.polish and cfg.polish_budget > 0:
        x_p, f_p, used = polish(fn, x_hat, cfg.polish_budget, f0=f_hat, step=cfg.polish_step)
        evals += used
        if f_p < f_hat:
            x_hat, f_hat, polished = x_p, f_p, True
    wall_ms = (time.perf_counter() - t0) * 1e3
    return CorrResult(
        x_hat=np.asarray(x_hat, dtype=float),
        f_hat=float(f_hat),
        mu_hat=float(mu_hat),
        theta_hat=theta,
        profile=profile,
        eval_count=int(evals),
        wall_ms=wall_ms,
        r_hat=search.r_hat,
        polished=polished,
        refine_trace=search.refine_trace,
    )
