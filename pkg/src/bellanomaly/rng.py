"""Replayable random streams.

Every stochastic routine takes a :class:`SeededRng` and derives one
independent numpy ``Generator`` per work unit through ``SeedSequence``
spawn keys. A work unit's stream depends only on ``(seed, key)``, never on
the order in which units execute, so threaded and serial runs agree bit
for bit.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

ALGORITHM = "philox4x64-seedseq-v1"


def _key_part(part) -> int:
    if isinstance(part, (int, np.integer)):
        if part < 0:
            raise ValueError("spawn key parts must be non-negative")
        return int(part)
    return zlib.crc32(str(part).encode("utf-8"))


@dataclass(frozen=True)
class SeededRng:
    seed: int
    algorithm: str = ALGORITHM

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.algorithm != ALGORITHM:
            raise ValueError(f"unknown rng algorithm {self.algorithm!r}")

    def generator(self, *key) -> np.random.Generator:
        """Independent stream for the work unit named by ``key``."""
        ss = np.random.SeedSequence(int(self.seed), spawn_key=tuple(_key_part(k) for k in key))
        return np.random.Generator(np.random.Philox(ss))

    def child(self, *key) -> "SeededRng":
        """A new SeededRng whose seed is derived from this one and ``key``."""
        seed = int(self.generator("child", *key).integers(0, 2**63, dtype=np.int64))
        return SeededRng(seed, self.algorithm)

    def to_dict(self) -> dict:
        return {"seed": int(self.seed), "algorithm": self.algorithm}


def fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, dtype=np.uint64)[0])
