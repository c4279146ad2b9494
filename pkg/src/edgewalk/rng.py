"""Deterministic substream randomness.

All ±1 step sequences in this package come from a counter-based SplitMix64
generator: word k of a stream is ``mix64(base + GOLDEN * (k + 1))`` where the
stream base is derived from ``(master_seed, stream_index)``.  The same pair
yields the same words (and hence the same steps) on every platform, with no
state to carry around, so replicas can be generated independently and in any
order.

Distributional sampling (geometric offspring, etc.) uses a numpy Generator on
a Philox counter keyed from the same stream base.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def mix64(z: int | np.uint64 | np.ndarray) -> np.uint64 | np.ndarray:
    """SplitMix64 finalizer; accepts scalars or uint64 arrays."""
    z = np.uint64(z) if np.isscalar(z) or isinstance(z, int) else z
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


def master_mixed(master_seed: int) -> np.uint64:
    """Mixed master word; stream bases are mix64(master_mixed + GOLDEN*k)."""
    m = np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return mix64(m + GOLDEN)


def stream_base(master_seed: int, stream_index: int) -> np.uint64:
    """64-bit base state of substream ``stream_index`` under ``master_seed``."""
    s = np.uint64(stream_index & 0xFFFFFFFFFFFFFFFF)
    with np.errstate(over="ignore"):
        return mix64(master_mixed(master_seed) + GOLDEN * s)


@dataclass(frozen=True)
class StepGenerator:
    """Counter-based source of fair ±1 steps for one (seed, stream) pair."""

    master_seed: int
    stream_index: int = 0

    @property
    def base(self) -> np.uint64:
        return stream_base(self.master_seed, self.stream_index)

    def words(self, count: int, first: int = 0) -> np.ndarray:
        """Raw output words ``first .. first+count-1`` of the stream."""
        k = np.arange(first + 1, first + count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            return mix64(self.base + GOLDEN * k)

    def steps(self, n: int) -> np.ndarray:
        """First ``n`` steps of the walk, as an int8 array of ±1.

        Step ``64*k + b`` is +1 iff bit ``b`` (LSB first) of word ``k`` is set.
        """
        nwords = (n + 63) // 64
        w = self.words(nwords)
        bits = (w[:, None] >> np.arange(64, dtype=np.uint64)) & np.uint64(1)
        steps = bits.astype(np.int8).reshape(-1) * 2 - 1
        return steps[:n]

    def generator(self, tag: int = 0) -> np.random.Generator:
        """Numpy Generator on a Philox counter keyed from this stream.

        ``tag`` separates independent sampling purposes within one stream.
        """
        b = self.base
        with np.errstate(over="ignore"):
            key = np.array([mix64(b + GOLDEN * np.uint64(2 * tag + 1)),
                            mix64(b ^ GOLDEN) + np.uint64(tag)], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def spawn(master_seed: int, n_streams: int, first: int = 0) -> list[StepGenerator]:
    """Independent replica streams ``first .. first+n_streams-1``."""
    return [StepGenerator(master_seed, first + i) for i in range(n_streams)]
