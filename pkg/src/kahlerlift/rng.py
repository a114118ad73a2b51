"""SplitMix64, a tiny seedable generator with a fully documented recurrence.

The stream is defined by 64-bit unsigned arithmetic::

    state <- state + 0x9E3779B97F4A7C15
    z     <- state
    z     <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9
    z     <- (z XOR (z >> 27)) * 0x94D049BB133111EB
    out   <- z XOR (z >> 31)

and a uniform double in [0, 1) is ``(out >> 11) * 2**-53``.  Any language
with wrapping 64-bit integers reproduces the same sample points, which is
the point of not relying on numpy's generators for report determinism.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """Deterministic 64-bit generator.

    Parameters
    ----------
    seed : int
        Any integer; reduced modulo 2**64.
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, low=0.0, high=1.0, size: int | None = None):
        """Uniform samples on ``[low, high)``; scalar when ``size`` is None."""
        if size is None:
            return low + (high - low) * ((self.next_u64() >> 11) * 2.0**-53)
        u = np.array([(self.next_u64() >> 11) * 2.0**-53 for _ in range(size)])
        return low + (high - low) * u

    def box(self, lower, upper) -> np.ndarray:
        """One point uniform in the axis-aligned box ``[lower, upper)``."""
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        return np.array([self.uniform(lo, hi) for lo, hi in zip(lower, upper)])

    def spawn(self, stream: int) -> "SplitMix64":
        """An independent child generator keyed by an integer label."""
        child = SplitMix64(self.state ^ ((stream * GOLDEN_GAMMA) & MASK64))
        child.next_u64()
        return child
