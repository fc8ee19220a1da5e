"""Benchmark objectives on the common domain B(0, 2).

Each function is defined on its own native ball B(0, r) and exposed on
B(0, 2) through ``f(x) = f_native(x * r / 2)``.

Three choices depart from the usual literal transcription of these
functions and are deliberate:

* Langerman uses ``-exp(-d2 / pi) * cos(pi * d2) + 1`` (decaying
  exponential), so that its minimum value is 0 at the center.
* Salomon-Langerman is ``f_S + f_L`` outside the native ball of radius 0.2
  and identically 0 inside it, giving a convex minimizer set that contains
  the origin.
* Griewank uses the standard product ``prod_i cos(x_i / sqrt(i))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DOMAIN_RADIUS = 2.0
FUNCTION_NAMES = ("salomon", "salomon_sq", "salomon_langerman", "langerman", "griewank")

# native ball radius of each function before rescaling to B(0, 2)
_NATIVE_RADIUS = {
    "salomon": 2.0,
    "salomon_sq": 2.0,
    "salomon_langerman": 10.0,
    "langerman": 5.0,
    "griewank": 200.0,
}
LANGERMAN_C = 0.5
SL_MASK_RADIUS = 0.2

# slack on the domain check so points drawn at radius 2 up to rounding pass
_DOMAIN_SLACK = 1e-12


class DomainError(ValueError):
    """Raised when a point lies outside the function's domain."""


def _sq_norm(x):
    # column-by-column accumulation keeps row results independent of batch size
    s = x[:, 0] * x[:, 0]
    for j in range(1, x.shape[1]):
        s = s + x[:, j] * x[:, j]
    return s


def salomon_native(x):
    r = np.sqrt(_sq_norm(x))
    return 1.0 - np.cos(2.0 * np.pi * r) + 0.5 * r


def salomon_sq_native(x):
    return 0.1 * salomon_native(x) ** 2


def langerman_native(x, center):
    d2 = _sq_norm(x - center)
    return -np.exp(-d2 / np.pi) * np.cos(np.pi * d2) + 1.0


def salomon_langerman_native(x, center):
    out = salomon_native(x) + langerman_native(x, center)
    inside = np.sqrt(_sq_norm(x)) <= SL_MASK_RADIUS
    return np.where(inside, 0.0, out)


def griewank_native(x):
    s = _sq_norm(x) / 4000.0
    prod = np.cos(x[:, 0])
    for j in range(1, x.shape[1]):
        prod = prod * np.cos(x[:, j] / np.sqrt(j + 1.0))
    return 0.1 * (1.0 + s - prod)


@dataclass(frozen=True)
class TestFunction:
    """A named benchmark objective on B(0, 2) with known optimum.

    ``center`` is the Langerman center in native coordinates (``None`` for
    the functions that do not use one).
    """

    __test__ = False  # not a pytest class

    name: str
    dim: int
    domain_radius: float
    rescale_factor: float
    f_star: float
    x_star: np.ndarray = field(repr=False)
    center: np.ndarray | None = field(default=None, repr=False)

    def native(self, z):
        """Native formula on an ``(m, dim)`` array of native coordinates."""
        if self.name == "salomon":
            return salomon_native(z)
        if self.name == "salomon_sq":
            return salomon_sq_native(z)
        if self.name == "salomon_langerman":
            return salomon_langerman_native(z, self.center)
        if self.name == "langerman":
            return langerman_native(z, self.center)
        return griewank_native(z)

    def evaluate_many(self, points):
        """Evaluate on an ``(m, dim)`` array of points in B(0, 2)."""
        x = np.asarray(points, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(f"expected points of shape (m, {self.dim}), got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise DomainError("non-finite coordinates")
        norms = np.sqrt(_sq_norm(x))
        if np.any(norms > self.domain_radius * (1.0 + _DOMAIN_SLACK)):
            raise DomainError(
                f"point outside B(0, {self.domain_radius:g}): max norm {norms.max():.17g}"
            )
        return self.native(x * self.rescale_factor)

    def __call__(self, x):
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return float(self.evaluate_many(x)[0])


def make_function(name, dim):
    """Build benchmark ``name`` in ``dim`` dimensions, rescaled to B(0, 2)."""
    if name not in _NATIVE_RADIUS:
        raise ValueError(f"unknown function {name!r}; choose from {FUNCTION_NAMES}")
    if int(dim) != dim or dim < 1:
        raise ValueError(f"dim must be a positive integer, got {dim!r}")
    dim = int(dim)
    factor = _NATIVE_RADIUS[name] / DOMAIN_RADIUS
    center = None
    x_star = np.zeros(dim)
    if name in ("langerman", "salomon_langerman"):
        center = np.full(dim, LANGERMAN_C)
    if name == "langerman":
        x_star = center / factor
        if np.linalg.norm(x_star) > DOMAIN_RADIUS:
            raise ValueError(f"langerman minimizer leaves the domain for dim={dim}")
    fn = TestFunction(
        name=name,
        dim=dim,
        domain_radius=DOMAIN_RADIUS,
        rescale_factor=factor,
        f_star=0.0,
        x_star=x_star,
        center=center,
    )
    fn.x_star.setflags(write=False)
    if center is not None:
        center.setflags(write=False)
    return fn


def evaluate(fn, x):
    return fn(x)


def global_min(fn):
    """Return ``(f_star, x_star)``."""
    return fn.f_star, fn.x_star.copy()
