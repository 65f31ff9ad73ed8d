# src/ssvlab/core/rng.py
"""
Seeded randomness.

All draws go through numpy's PCG64 bit generator, whose output stream is fixed by
the seed on every platform numpy supports. Seed splits used across the package:

* network initialisation: ``seed ^ 1``
* training-sample stream:  ``seed ^ 2``
"""

import numpy as np

from ssvlab.core.errors import DomainError

INIT_STREAM = 1
SAMPLING_STREAM = 2


class SeededRng:
    """Owned, mutable random stream; one per training loop or worker."""

    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._generator = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def for_stream(cls, seed: int, stream: int) -> "SeededRng":
        """Derive the documented split ``seed XOR stream``."""
        return cls(int(seed) ^ int(stream))

    def random(self, shape) -> np.ndarray:
        """Uniform draws on [0, 1)."""
        return self._generator.random(shape)


def sample_uniform_disk(rng: SeededRng, C: float, M: int) -> np.ndarray:
    """
    Draw M points uniformly on the disk |xi| <= C by inverse-CDF radius.

    Each point consumes exactly two uniforms (radius, angle).

    :param rng: Stream to draw from
    :param C: Disk radius (>= 0)
    :param M: Number of points (>= 0)
    :return: Array of shape (M, 2)
    """
    if C < 0 or M < 0:
        raise DomainError(f"Disk sampling needs C >= 0 and M >= 0, got C={C}, M={M}")
    u = rng.random((int(M), 2))
    radius = C * np.sqrt(u[:, 0])
    angle = 2.0 * np.pi * u[:, 1]
    points = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    # cos/sin rounding can push |xi| a few ulps past C
    norms = np.hypot(points[:, 0], points[:, 1])
    over = norms > C
    if np.any(over):
        points[over] *= (C / norms[over])[:, None]
    return points


def sample_uniform_interval(rng: SeededRng, a: float, b: float, M: int) -> np.ndarray:
    """
    Draw M i.i.d. uniforms on [a, b].

    :param rng: Stream to draw from
    :param a: Lower end
    :param b: Upper end (>= a)
    :param M: Number of draws
    :return: Array of shape (M,)
    """
    if a > b:
        raise DomainError(f"Interval sampling needs a <= b, got a={a}, b={b}")
    if M < 0:
        raise DomainError(f"Sample count must be >= 0, got {M}")
    return a + (b - a) * rng.random(int(M))
