"""Deterministic splittable random streams.

Every stochastic routine in the package draws through an :class:`RngStream`.
A stream is identified by a 64-bit master seed plus a path of integers
(chain index, replication index, purpose tag, ...).  The same
``(master_seed, path)`` always produces the same bit sequence, and distinct
paths give statistically independent streams, so runs are reproducible no
matter how work is split across chains, replications, or worker threads.

Streams are backed by numpy's Philox generator, which is counter based:
spawning a child never consumes state from the parent.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DomainError

__all__ = ["RngStream"]

_U32 = 2**32
_U64 = 2**64


class RngStream:
    """A named, reproducible source of randomness.

    Parameters
    ----------
    master_seed : int
        Root seed in ``[0, 2**64)``.
    path : tuple of int, optional
        Stream coordinates, each in ``[0, 2**32)``.  The empty path is the
        root stream.
    """

    __slots__ = ("master_seed", "path", "_gen")

    def __init__(self, master_seed: int, path: tuple[int, ...] = ()):
        seed = int(master_seed)
        if not 0 <= seed < _U64:
            raise DomainError(f"master seed must lie in [0, 2**64), got {master_seed}")
        ids = tuple(int(i) for i in path)
        if any(not 0 <= i < _U32 for i in ids):
            raise DomainError(f"stream path entries must lie in [0, 2**32), got {path}")
        self.master_seed = seed
        self.path = ids
        self._gen: np.random.Generator | None = None

    @property
    def gen(self) -> np.random.Generator:
        """The underlying numpy Generator (created lazily, then stateful)."""
        if self._gen is None:
            ss = np.random.SeedSequence(self.master_seed, spawn_key=self.path)
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen

    def child(self, *ids: int) -> "RngStream":
        """Independent stream at ``path + ids``; does not touch this stream."""
        return RngStream(self.master_seed, self.path + tuple(int(i) for i in ids))

    def __repr__(self) -> str:  # pragma: no cover
        return f"RngStream(master_seed={self.master_seed}, path={self.path})"

    # Primitive draws.  These are thin, validated wrappers over the
    # Generator so that samplers and tests share one vocabulary of
    # primitives (uniform, std normal, exponential/gamma by rate, beta,
    # bernoulli, binomial).

    def uniform(self, size=None):
        return self.gen.random(size)

    def std_normal(self, size=None):
        return self.gen.standard_normal(size)

    def exponential(self, rate: float = 1.0, size=None):
        if not np.isfinite(rate) or rate <= 0:
            raise DomainError(f"exponential rate must be positive, got {rate}")
        return self.gen.exponential(1.0 / rate, size)

    def gamma(self, shape: float, rate: float = 1.0, size=None):
        if not np.isfinite(shape) or shape <= 0:
            raise DomainError(f"gamma shape must be positive, got {shape}")
        if not np.isfinite(rate) or rate <= 0:
            raise DomainError(f"gamma rate must be positive, got {rate}")
        return self.gen.gamma(shape, 1.0 / rate, size)

    def beta(self, a: float, b: float, size=None):
        if not (np.isfinite(a) and np.isfinite(b)) or a <= 0 or b <= 0:
            raise DomainError(f"beta parameters must be positive, got ({a}, {b})")
        return self.gen.beta(a, b, size)

    def bernoulli(self, prob, size=None):
        p = np.asarray(prob, dtype=float)
        if not np.all(np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise DomainError("bernoulli probability must lie in [0, 1]")
        if size is None:
            size = p.shape if p.shape else None
        u = self.gen.random(size)
        out = u < p
        if np.ndim(out) == 0:
            return int(out)
        return out.astype(np.int64)

    def binomial(self, n: int, prob: float, size=None):
        if int(n) != n or n < 0:
            raise DomainError(f"binomial count must be a nonnegative integer, got {n}")
        if not np.isfinite(prob) or not 0.0 <= prob <= 1.0:
            raise DomainError(f"binomial probability must lie in [0, 1], got {prob}")
        out = self.gen.binomial(int(n), prob, size)
        return int(out) if np.ndim(out) == 0 else out
