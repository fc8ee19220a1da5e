"""Uniform sampling on the ball and paired sample sets.

Points come from numpy's ``PCG64`` bit generator seeded through
``SeedSequence``. The two sets used by a CoRR run share the user seed but
get distinct spawn keys, so their streams never overlap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

SET_IDS = ("one", "two")
GENERATOR_VERSION = f"PCG64+SeedSequence/numpy-{np.__version__}"


def make_rng(seed, *key):
    """Generator for ``seed`` on the stream labelled by integer ``key``."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def ball_uniform(rng, dim, radius, count):
    """Draw ``count`` points uniformly from B(0, radius) with ``rng``.

    Gaussian direction normalized to the unit sphere, radius ``R * U**(1/n)``.
    """
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    u = rng.random(count)
    return g * (radius * u ** (1.0 / dim))[:, None]


def draw_ball_uniform(dim, radius, count, seed, stream=0):
    if count < 1:
        raise ValueError("count must be >= 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return ball_uniform(make_rng(seed, stream), dim, radius, count)


@dataclass(frozen=True)
class SampleSet:
    points: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    seed: int
    set_id: str

    def __post_init__(self):
        if self.points.ndim != 2 or len(self.points) < 1:
            raise ValueError("a sample set needs at least one point")
        if len(self.points) != len(self.values):
            raise ValueError("points and values differ in length")
        if self.set_id not in SET_IDS:
            raise ValueError(f"set_id must be one of {SET_IDS}")
        self.points.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def size(self):
        return len(self.values)

    @property
    def dim(self):
        return self.points.shape[1]

    def to_csv(self, path):
        """Write ``index, x_1..x_n, f`` rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index"] + [f"x_{j + 1}" for j in range(self.dim)] + ["f"])
            for i, (x, v) in enumerate(zip(self.points, self.values)):
                w.writerow([i] + [repr(float(c)) for c in x] + [repr(float(v))])


def evaluate_set(fn, points, seed, set_id):
    points = np.array(points, dtype=float, ndmin=2)
    values = fn.evaluate_many(points)
    return SampleSet(points=points, values=np.asarray(values, dtype=float), seed=int(seed), set_id=set_id)


def draw_sample_sets(fn, T, seed):
    """Draw and evaluate the two independent sets of size ``T`` each."""
    sets = []
    for k, set_id in enumerate(SET_IDS):
        pts = draw_ball_uniform(fn.dim, fn.domain_radius, T, seed, stream=k)
        sets.append(evaluate_set(fn, pts, seed, set_id))
    return tuple(sets)
