import logging
import re

import numpy as np
import pytest
from oracles import fit_lp_vertex_oracle
from scipy.optimize import linprog

from corr.envelope import EnvelopeFitter, FitProblem, fit_envelope, write_lp
from corr.sampler import SampleSet, draw_sample_sets
from corr.surrogate import features
from corr.testbed import make_function


def sset(points, values, set_id="one"):
    return SampleSet(np.array(points, dtype=float, ndmin=2).reshape(len(values), -1), np.array(values, dtype=float), 0, set_id)


def problem(X1, f, X2, mu, box=1e6):
    return FitProblem(sset(X1, f), sset(X2, np.zeros(len(X2)), "two"), mu, box)


def test_constant_fit_examples():
    r = fit_envelope(problem([[0.0]], [1.0], [[0.0]], 1.0))
    assert r.status == "optimal"
    assert r.objective == pytest.approx(0.0, abs=1e-9)
    # theta1 and theta2 are free on this face; the offset is pinned
    assert r.theta.theta3 == pytest.approx(1.0, abs=1e-9)
    r0 = fit_envelope(problem([[0.0]], [1.0], [[0.0]], 0.0))
    assert r0.objective == pytest.approx(1.0, abs=1e-9)
    r2 = fit_envelope(problem([[-1.0], [1.0]], [1.0, 1.0], [[-1.0], [1.0]], 1.0))
    assert r2.objective == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("seed", range(15))
def test_matches_vertex_oracle(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 3))
    T = int(rng.integers(1, 7))
    box = float(rng.choice([2.0, 10.0, 1e6]))
    X1 = rng.uniform(-2, 2, (T, n))
    X2 = rng.uniform(-2, 2, (T, n))
    f = rng.uniform(-1, 3, T)
    mu = float(rng.uniform(-1.5, 1.5))
    r = fit_envelope(problem(X1, f, X2, mu, box))
    ref, _ = fit_lp_vertex_oracle(X1, f, X2, mu, box)
    assert abs(r.objective - ref) <= 1e-6
    assert r.constraint_residual <= 1e-8


def test_vertex_oracle_agrees_with_highs():
    rng = np.random.default_rng(99)
    for _ in range(10):
        n, T = 2, 5
        X1, X2 = rng.uniform(-2, 2, (T, n)), rng.uniform(-2, 2, (T, n))
        f, mu, box = rng.uniform(0, 2, T), 0.3, 10.0
        phi1 = features(X1)
        mbar = features(X2).mean(axis=0)
        p = phi1.shape[1]
        c = np.r_[np.zeros(p), np.ones(T) / T]
        A = np.block([[phi1, -np.eye(T)], [-phi1, -np.eye(T)]])
        bounds = [(0, box)] * n + [(-box, box)] * (p - n) + [(0, None)] * T
        res = linprog(c, A_ub=A, b_ub=np.r_[f, -f], A_eq=np.r_[mbar, np.zeros(T)][None], b_eq=[mu], bounds=bounds)
        assert abs(res.fun - fit_lp_vertex_oracle(X1, f, X2, mu, box)[0]) <= 1e-9


def salomon_sets(T=200, dim=1, seed=4):
    return draw_sample_sets(make_function("salomon", dim), T, seed)


@pytest.mark.parametrize("mu", [-2.0, 0.0, 0.4, 1.3])
def test_feasibility_witness_and_dominance(mu):
    one, two = salomon_sets(dim=2)
    r = fit_envelope(FitProblem(one, two, mu))
    assert r.objective <= np.mean(np.abs(mu - one.values)) + 1e-12
    assert r.constraint_residual <= 1e-8
    assert np.all(r.theta.theta1 >= 0)
    rng = np.random.default_rng(1)
    phi1, mbar = features(one.points), features(two.points).mean(axis=0)
    for _ in range(1000):
        th = rng.uniform(-5, 5, 5)
        th[:2] = np.abs(th[:2])
        th[4] += mu - mbar @ th
        assert r.objective <= np.mean(np.abs(phi1 @ th - one.values)) + 1e-8


def test_exact_recovery_of_planted_quadratic():
    rng = np.random.default_rng(2)
    X1, X2 = rng.uniform(-1, 1, (80, 3)), rng.uniform(-1, 1, (80, 3))
    theta = np.array([1.0, 0.5, 2.0, -0.3, 0.2, 0.0, 0.7])
    f1 = features(X1) @ theta
    mu = float(np.mean(features(X2) @ theta))
    r = fit_envelope(problem(X1, f1, X2, mu))
    assert r.objective <= 1e-8
    np.testing.assert_allclose(r.theta.flat, theta, atol=1e-7)


def test_deterministic():
    one, two = salomon_sets()
    a = fit_envelope(FitProblem(one, two, 0.5))
    b = fit_envelope(FitProblem(one, two, 0.5))
    assert a.theta.flat.tobytes() == b.theta.flat.tobytes()
    assert a.objective == b.objective


def test_fitter_reuse_matches_fresh_fit():
    one, two = salomon_sets(T=300)
    fitter = EnvelopeFitter(one, two)
    for mu in (0.2, 0.9, 0.5):
        r = fitter.fit(mu)
        fresh = fit_envelope(FitProblem(one, two, mu))
        assert abs(r.objective - fresh.objective) <= 1e-8


def test_box_respected():
    one, two = salomon_sets()
    r = fit_envelope(FitProblem(one, two, 0.5, box_bound=0.6))
    assert r.status == "optimal"
    assert np.all(np.abs(r.theta.flat) <= 0.6 + 1e-9)
    assert r.constraint_residual <= 1e-8


def test_box_mean_conflict_reported():
    # no theta in a 0.05 box can average 0.5 over the samples
    one, two = salomon_sets()
    r = fit_envelope(FitProblem(one, two, 0.5, box_bound=0.05))
    assert r.status == "infeasible_numeric"


def test_problem_validation():
    one, _ = salomon_sets()
    other = draw_sample_sets(make_function("salomon", 2), 10, 0)[1]
    with pytest.raises(ValueError):
        FitProblem(one, other, 0.0)
    with pytest.raises(ValueError):
        FitProblem(one, one, float("nan"))
    with pytest.raises(ValueError):
        EnvelopeFitter(one, other)
    with pytest.raises(ValueError):
        EnvelopeFitter(one, one).fit(float("inf"))


def test_no_warning_on_regular_fits(caplog):
    one, two = salomon_sets(T=500)
    with caplog.at_level(logging.WARNING, logger="corr.envelope"):
        for mu in np.linspace(-2, 2, 9):
            fit_envelope(FitProblem(one, two, float(mu)))
    assert not caplog.records


def parse_lp(path):
    """Read the LP file back into linprog arrays (independent of the writer's internals)."""
    text = open(path).read().split("\n")
    sec = None
    obj, ub_rows, eq_rows, bounds = {}, [], [], {}
    term = re.compile(r"([+-]?)\s*([-0-9.e+]+|inf)\s+([ts]\d+)")

    def terms(expr):
        out = {}
        for sign, c, v in term.findall(expr):
            out[v] = float(c) * (-1 if sign == "-" else 1)
        return out

    for line in text:
        s = line.strip()
        if s in ("Minimize", "Subject To", "Bounds", "End") or not s or s.startswith("\\"):
            sec = s if s in ("Minimize", "Subject To", "Bounds") else sec
            continue
        if sec == "Minimize":
            obj = terms(s.split(":", 1)[1])
        elif sec == "Subject To":
            body = s.split(":", 1)[1]
            for op in ("<=", ">=", "="):
                if op in body:
                    lhs, rhs = body.split(op)
                    break
            row = terms(lhs)
            if op == ">=":
                ub_rows.append(({k: -v for k, v in row.items()}, -float(rhs)))
            elif op == "<=":
                ub_rows.append((row, float(rhs)))
            else:
                eq_rows.append((row, float(rhs)))
        elif sec == "Bounds":
            parts = s.split()
            if len(parts) == 5:
                bounds[parts[2]] = (float(parts[0]), float(parts[4]))
            else:
                bounds[parts[0]] = (float(parts[2]), None)
    return obj, ub_rows, eq_rows, bounds


def test_lp_dump_round_trip(tmp_path):
    one, two = salomon_sets(T=12, dim=2)
    prob = FitProblem(one, two, 0.7)
    path = tmp_path / "fit.lp"
    write_lp(prob, path)
    obj, ub_rows, eq_rows, bounds = parse_lp(path)
    names = sorted(bounds, key=lambda v: (v[0] != "t", int(v[1:])))
    idx = {v: i for i, v in enumerate(names)}

    def dense(rows):
        A = np.zeros((len(rows), len(names)))
        for r, (row, _) in enumerate(rows):
            for v, c in row.items():
                A[r, idx[v]] = c
        return A, np.array([b for _, b in rows])

    c = np.zeros(len(names))
    for v, val in obj.items():
        c[idx[v]] = val
    A_ub, b_ub = dense(ub_rows)
    A_eq, b_eq = dense(eq_rows)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=[bounds[v] for v in names])
    assert res.status == 0
    assert abs(res.fun - fit_envelope(prob).objective) <= 1e-7
