"""
Sayaç tabanlı rastgele sayı üreteci yardımcıları
"""

from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, None]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Philox (64-bit, sayaç tabanlı) üreteci döndürür"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(seed))


def derive_seed(master_seed: int, *indices: int) -> int:
    """(master_seed, indeksler) çiftinden çakışmayan bir alt tohum türetir"""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(i) for i in indices))
    lo, hi = seq.generate_state(2, dtype=np.uint32)
    return (int(hi) << 32) | int(lo)


def child_rng(rng: np.random.Generator) -> np.random.Generator:
    """Mevcut akıştan bağımsız bir alt üreteç çeker"""
    return make_rng(int(rng.integers(0, 2**63 - 1)))
