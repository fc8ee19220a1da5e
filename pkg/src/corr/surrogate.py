"""Diagonal convex quadratic ``h(x) = <a, x**2> + <b, x> + c`` and its
exact minimization over a Euclidean ball."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SECULAR_TOL = 1e-10
SECULAR_MAXITER = 200


class ConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadSurrogate:
    theta1: np.ndarray
    theta2: np.ndarray
    theta3: float

    def __post_init__(self):
        t1 = np.array(self.theta1, dtype=float, ndmin=1)
        t2 = np.array(self.theta2, dtype=float, ndmin=1)
        if t1.shape != t2.shape or t1.ndim != 1:
            raise ValueError("theta1 and theta2 must be vectors of equal length")
        t1.setflags(write=False)
        t2.setflags(write=False)
        object.__setattr__(self, "theta1", t1)
        object.__setattr__(self, "theta2", t2)
        object.__setattr__(self, "theta3", float(self.theta3))

    @property
    def dim(self):
        return len(self.theta1)

    @property
    def flat(self):
        """Parameters in feature order ``(theta1, theta2, theta3)``."""
        return np.concatenate([self.theta1, self.theta2, [self.theta3]])

    @classmethod
    def from_flat(cls, theta):
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or len(theta) % 2 != 1:
            raise ValueError("flat parameter vector must have length 2n + 1")
        n = (len(theta) - 1) // 2
        return cls(theta[:n], theta[n:2 * n], theta[2 * n])

    def __call__(self, x):
        return h_eval(self, x)


def features(x):
    """Basis ``(x**2, x, 1)`` of a point, or row-wise for an ``(m, n)`` array."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return np.concatenate([x * x, x, [1.0]])
    return np.hstack([x * x, x, np.ones((len(x), 1))])


def h_eval(s, x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != s.dim:
        raise ValueError(f"point has dimension {x.shape[-1]}, surrogate has {s.dim}")
    return (x * x) @ s.theta1 + x @ s.theta2 + s.theta3


def _secular_point(a, b, lam):
    return -b / (2.0 * a + 2.0 * lam)


def minimize_on_ball(s, radius=2.0, tol=SECULAR_TOL, maxiter=SECULAR_MAXITER):
    """Exact minimizer of a convex diagonal quadratic over B(0, radius).

    Interior case: the unconstrained minimizer ``-b / (2a)`` (zero on
    coordinates with ``a = b = 0``). Otherwise the KKT point on the sphere
    ``x(lam) = -b / (2a + 2lam)`` with ``lam > 0`` chosen so that
    ``||x(lam)|| = radius``; found by bisection on ``lam`` with a Newton
    step accepted whenever it stays inside the bracket.
    """
    a, b = s.theta1, s.theta2
    if np.any(a < 0):
        raise ValueError("surrogate is not convex: theta1 has negative entries")
    if radius <= 0:
        raise ValueError("radius must be positive")
    flat = a == 0
    if not np.any(flat & (b != 0)):
        x = np.zeros_like(b)
        curved = ~flat
        with np.errstate(over="ignore"):
            x[curved] = -b[curved] / (2.0 * a[curved])
        if np.linalg.norm(x) <= radius:
            return x

    # boundary case: b != 0 somewhere and ||x(lam)|| decreases strictly on (0, inf).
    # Each coordinate alone gives ||x(lam)|| >= |b_i| / (2 a_i + 2 lam), so the
    # root is above max_i |b_i| / (2 radius) - a_i; and ||x(lam)|| <= ||b|| / (2 lam)
    # puts it below ||b|| / (2 radius).
    def phi(lam):
        return np.linalg.norm(_secular_point(a, b, lam)) - radius

    lo = max(0.0, float(np.max(np.abs(b) / (2.0 * radius) - a)))
    hi = max(np.linalg.norm(b) / (2.0 * radius), np.nextafter(lo, np.inf))
    lam = hi
    for _ in range(maxiter):
        r = phi(lam)
        if abs(r) <= tol:
            return project_to_ball(_secular_point(a, b, lam), radius)
        if r > 0:
            lo = lam
        else:
            hi = lam
        # Newton on 1/||x(lam)|| - 1/radius, which is nearly linear in lam
        x = _secular_point(a, b, lam)
        nx = np.linalg.norm(x)
        dnx = -np.sum(x * x / (a + lam)) / nx
        step = lam - (1.0 / nx - 1.0 / radius) / (-dnx / nx**2)
        if lo < step < hi:
            lam = step
        elif lo > 0:
            # geometric midpoint: the bracket can span many orders of magnitude
            lam = np.sqrt(lo * hi)
        else:
            lam = 0.5 * (lo + hi)
        if lam <= lo or lam >= hi:
            # bracket exhausted at floating-point resolution
            return project_to_ball(_secular_point(a, b, hi), radius)
    raise ConvergenceError(f"secular equation did not converge in {maxiter} steps")


def project_to_ball(x, radius):
    """Radial projection onto B(0, radius); the result's norm never exceeds it."""
    x = np.asarray(x, dtype=float)
    nx = np.linalg.norm(x)
    if nx <= radius:
        return x
    scale = radius / nx
    y = x * scale
    while np.linalg.norm(y) > radius:
        scale = np.nextafter(scale, 0.0)
        y = x * scale
    return y
