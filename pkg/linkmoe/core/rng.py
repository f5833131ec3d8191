"""Seeded random streams.

Every stochastic step draws from a numpy ``Generator`` backed by the PCG64
bit generator. Stages get their own stream through ``derive(tag)``: the child
seed is the parent seed XOR the first 64 bits of sha256(tag), so adding a new
stage never perturbs the streams of existing ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from linkmoe.utils.helpers.encryption import sha256_hex

ALGORITHM = "PCG64"
_MASK64 = (1 << 64) - 1


def stage_seed(seed: int, tag: str) -> int:
    return (int(seed) ^ int(sha256_hex(tag)[:16], 16)) & _MASK64


@dataclass
class Rng:
    seed: int
    algorithm: str = ALGORITHM
    generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.seed = int(self.seed) & _MASK64
        self.generator = np.random.Generator(np.random.PCG64(self.seed))

    def derive(self, tag: str) -> "Rng":
        return Rng(stage_seed(self.seed, tag))

    # thin pass-throughs keep call sites short
    def random(self, shape) -> np.ndarray:
        return self.generator.random(shape)

    def uniform(self, low: float, high: float, shape) -> np.ndarray:
        return self.generator.uniform(low, high, shape)

    def normal(self, loc: float, scale: float, shape) -> np.ndarray:
        return self.generator.normal(loc, scale, shape)

    def integers(self, low: int, high: int, shape=None) -> np.ndarray:
        return self.generator.integers(low, high, shape)

    def permutation(self, n: int) -> np.ndarray:
        return self.generator.permutation(n)
