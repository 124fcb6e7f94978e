"""Seeded SplitMix64 generator and the random instances built from it.

The stream is defined bit-exactly so that other implementations can
regenerate the same test instances::

    state <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (mod 2**64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB      (mod 2**64)
    output z ^ (z >> 31)

``uniform()`` is ``(next_u64() >> 11) * 2**-53`` and normals come from the
Box-Muller transform of two consecutive uniforms ``u1, u2`` as
``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`` (the sine branch is discarded).
Matrices are filled in row-major order, real part before imaginary part.
"""
from __future__ import annotations

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * (1.0 / (1 << 53))
        return low + (high - low) * u

    def integer(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high]`` (inclusive), by rejection."""
        span = high - low + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            x = self.next_u64()
            if x < limit:
                return low + x % span

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def complex_normal(self, rows: int, cols: int) -> np.ndarray:
        out = np.empty((rows, cols), complex)
        for i in range(rows):
            for j in range(cols):
                re = self.normal()
                im = self.normal()
                out[i, j] = complex(re, im)
        return out

    def spawn(self) -> "SplitMix64":
        """Independent child stream seeded from the next output."""
        return SplitMix64(self.next_u64())


def random_unitary(rng: SplitMix64, d: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.complex_normal(d, d))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_isometry(rng: SplitMix64, d: int, k: int) -> np.ndarray:
    Q, R = np.linalg.qr(rng.complex_normal(d, k))
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_matrix(rng: SplitMix64, d: int) -> np.ndarray:
    return rng.complex_normal(d, d) / math.sqrt(2 * d)


def random_probabilities(rng: SplitMix64, d: int, low: float = 0.2) -> np.ndarray:
    """Strictly positive weights drawn from ``[low, 1]``, normalized to sum one."""
    p = np.array([rng.uniform(low, 1.0) for _ in range(d)])
    return p / p.sum()


def random_density(rng: SplitMix64, d: int, low: float = 0.2) -> np.ndarray:
    p = random_probabilities(rng, d, low)
    U = random_unitary(rng, d)
    rho = (U * p) @ U.conj().T
    return 0.5 * (rho + rho.conj().T)


def random_projection(rng: SplitMix64, d: int, k: int) -> np.ndarray:
    V = random_isometry(rng, d, k)
    E = V @ V.conj().T
    return 0.5 * (E + E.conj().T)
