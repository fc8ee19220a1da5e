"""Primal-dual interior point solver for inequality-constrained LAD fits.

Solves ::

    min_b  sum_i |Z[i] @ b - y[i]|   subject to   G @ b <= h

written as the linear program ::

    min  1'(s+ + s-)
    s.t. Z b - s+ + s- = y,   G b + w = h,   s+, s-, w >= 0

with Mehrotra's predictor-corrector. The residual and slack variables are
eliminated from each Newton system, which leaves a ``q x q`` positive
definite solve (``q = Z.shape[1]``) per iteration, so the cost is
``O(T q**2)`` for ``T`` rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

STEP_DAMPING = 0.9995


@dataclass
class LadSolution:
    beta: np.ndarray
    status: str  # "optimal" or "iteration_cap"
    iterations: int
    primal: float
    dual: float


def _max_step(v, dv):
    # largest a <= 1 with v + a * dv >= 0, for v > 0
    if v.size == 0:
        return 1.0
    t = float(np.max(-dv / v))
    return 1.0 if t <= 1.0 else 1.0 / t


def _solve_normal(M, rhs):
    # symmetric diagonal scaling first: active bound rows push single
    # diagonal entries many orders of magnitude above the rest
    dg = np.sqrt(np.maximum(np.diag(M), 1e-300))
    Ms = M / dg[:, None] / dg[None, :]
    Ms[np.diag_indices_from(Ms)] += 1e-14
    try:
        L = np.linalg.cholesky(Ms)
        x = np.linalg.solve(L.T, np.linalg.solve(L, rhs / dg))
    except np.linalg.LinAlgError:
        x = np.linalg.lstsq(Ms, rhs / dg, rcond=None)[0]
    return x / dg


def lad_ipm(Z, y, G, h, gap_tol=1e-10, feas_tol=1e-11, maxiter=120):
    """Minimize ``||Z b - y||_1`` over ``G b <= h``.

    ``gap_tol`` bounds the absolute duality gap of the unscaled objective;
    ``feas_tol`` bounds the primal and dual residuals relative to the data
    scale (row by row for ``G b <= h``).
    """
    Z = np.asfortranarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    G = np.asarray(G, dtype=float)
    h = np.asarray(h, dtype=float)
    T, q = Z.shape
    m = len(h)
    N = 2 * T + m

    beta = np.zeros(q)
    sp = np.maximum(-y, 0.0) + 1.0
    sm = np.maximum(y, 0.0) + 1.0
    w = np.maximum(h, 1.0)
    # dual multipliers lam in (-1, 1) are carried as zp = 1 + lam, zm = 1 - lam
    zp = np.ones(T)
    zm = np.ones(T)
    nu = np.ones(m)

    yscale = 1.0 + np.max(np.abs(y))
    hscale = 1.0 + np.abs(h)
    dscale = 1.0 + np.max(np.abs(Z)) * np.sqrt(T)

    status = "iteration_cap"
    it = 0
    for it in range(1, maxiter + 1):
        lam = 0.5 * (zp - zm)
        Zb = Z @ beta
        rp = y - Zb + sp - sm
        rg = h - G @ beta - w
        rd = Z.T @ lam - G.T @ nu
        primal = float(np.sum(np.abs(Zb - y)))
        dual = float(y @ lam - h @ nu)
        mu = (sp @ zp + sm @ zm + w @ nu) / N
        if (
            np.max(np.abs(rp)) <= feas_tol * yscale
            and (m == 0 or np.max(np.abs(rg) / hscale) <= feas_tol)
            and np.max(np.abs(rd)) <= feas_tol * dscale
            and abs(primal - dual) <= gap_tol
        ):
            status = "optimal"
            break

        d = np.clip(sp / zp + sm / zm, 1e-150, 1e150)
        D = 1.0 / d
        W = nu / w
        M = (Z * D[:, None]).T @ Z + (G * W[:, None]).T @ G

        def direction(cp, cm, cw):
            e = rp + cp / zp - cm / zm
            rhs = rd + Z.T @ (e * D) - G.T @ (W * (cw / nu - rg))
            dbeta = _solve_normal(M, rhs)
            dlam = (e - Z @ dbeta) * D
            dnu = W * (G @ dbeta + cw / nu - rg)
            dsp = (cp - sp * dlam) / zp
            dsm = (cm + sm * dlam) / zm
            dw = (cw - w * dnu) / nu
            return dbeta, dsp, dsm, dw, dlam, dnu

        def steps(dsp, dsm, dw, dlam, dnu):
            ap = min(_max_step(sp, dsp), _max_step(sm, dsm), _max_step(w, dw))
            ad = min(_max_step(zp, dlam), _max_step(zm, -dlam), _max_step(nu, dnu))
            return ap, ad

        # predictor
        dbeta, dsp, dsm, dw, dlam, dnu = direction(-sp * zp, -sm * zm, -w * nu)
        ap, ad = steps(dsp, dsm, dw, dlam, dnu)
        mu_aff = (
            (sp + ap * dsp) @ (zp + ad * dlam)
            + (sm + ap * dsm) @ (zm - ad * dlam)
            + (w + ap * dw) @ (nu + ad * dnu)
        ) / N
        sigma = (mu_aff / mu) ** 3 if mu > 0 else 0.0
        # corrector
        cp = sigma * mu - sp * zp - dsp * dlam
        cm = sigma * mu - sm * zm + dsm * dlam
        cw = sigma * mu - w * nu - dw * dnu
        dbeta, dsp, dsm, dw, dlam, dnu = direction(cp, cm, cw)
        ap, ad = steps(dsp, dsm, dw, dlam, dnu)
        ap = min(1.0, STEP_DAMPING * ap)
        ad = min(1.0, STEP_DAMPING * ad)

        beta = beta + ap * dbeta
        sp = sp + ap * dsp
        sm = sm + ap * dsm
        w = w + ap * dw
        zp = zp + ad * dlam
        zm = zm - ad * dlam
        nu = nu + ad * dnu

    return LadSolution(beta=beta, status=status, iterations=it, primal=primal, dual=dual)


GLOB_MIN_ROWS = 4000
GLOB_MAX_ROUNDS = 3


def _band_rows(T, q):
    return int(2 * (q * T) ** (2.0 / 3.0))


def lad_solve(Z, y, G, h, gap_tol=1e-10, beta_hint=None):
    """Same problem as :func:`lad_ipm`, accelerated for many rows.

    Rows whose residual sign at the optimum can be predicted from a nearby
    solution ``beta_hint`` (or from a fit to an evenly strided subsample) are
    collapsed into two aggregate rows, one per sign. Since
    ``|sum_i r_i| <= sum_i |r_i|`` the reduced objective never exceeds the
    full one, so its dual value is a lower bound for the full problem; the
    reduced solution is accepted only when the full objective is within
    ``gap_tol`` of that bound. Otherwise the band of kept rows is widened and
    the reduced problem solved again, falling back to the full problem when
    the predicted signs turn out badly wrong.
    """
    Z = np.asfortranarray(Z, dtype=float)
    y = np.asarray(y, dtype=float)
    T, q = Z.shape
    M = _band_rows(T, q)
    if T < GLOB_MIN_ROWS or 2 * M >= T:
        return lad_ipm(Z, y, G, h, gap_tol=gap_tol)
    if beta_hint is None:
        idx = np.linspace(0, T - 1, M).astype(np.intp)
        beta_hint = lad_ipm(Z[idx], y[idx], G, h, gap_tol=gap_tol * M / T).beta
    beta = np.asarray(beta_hint, dtype=float)
    iterations = 0
    for _ in range(GLOB_MAX_ROUNDS):
        r = Z @ beta - y
        a = np.abs(r)
        kappa = np.partition(a, M - 1)[M - 1]
        band = a <= kappa
        pos = ~band & (r > 0)
        neg = ~band & (r < 0)
        rows = [Z[band]]
        rhs = [y[band]]
        for sel in (pos, neg):
            if np.any(sel):
                rows.append(Z[sel].sum(axis=0)[None, :])
                rhs.append([y[sel].sum()])
        sol = lad_ipm(np.vstack(rows), np.concatenate(rhs), G, h, gap_tol=gap_tol)
        iterations += sol.iterations
        full = float(np.sum(np.abs(Z @ sol.beta - y)))
        if sol.status == "optimal" and full - sol.dual <= gap_tol:
            return LadSolution(sol.beta, "optimal", iterations, full, sol.dual)
        rs = Z @ sol.beta - y
        wrong = int(np.count_nonzero(pos & (rs < 0)) + np.count_nonzero(neg & (rs > 0)))
        M += 4 * wrong + q
        beta = sol.beta
        if wrong > M // 4 or 2 * M >= T:
            break
    sol = lad_ipm(Z, y, G, h, gap_tol=gap_tol)
    sol.iterations += iterations
    return sol
