"""
Rastgele sütun süreci (A_m)

Her sütun için önce [n] içinden düzgün rastgele k-altküme seçilir, sonra
değerler permütasyona-değişmez 𝒫 dağılımından çekilir. Süreç monoton
büyür: process_extend eski sütunlara dokunmaz.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
from math import comb, factorial
from collections import Counter
from typing import Any, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from matroidphase.services.gf import Field
from matroidphase.services.spmat import Column, SparseMatrix
from matroidphase.utils.errors import DimensionError, DistributionError
from matroidphase.utils.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

MAX_ENUMERATED_ATOMS = 200_000
Atom = Tuple[Tuple[int, ...], float]


def _multinomial(values: Sequence[int]) -> int:
    count = factorial(len(values))
    for mult in Counter(values).values():
        count //= factorial(mult)
    return count


@dataclass(frozen=True)
class ColumnDistribution:
    """
    (𝔽*)^k üzerinde permütasyona-değişmez dağılım.

    Atomlar sıralı çoklu küme olarak tutulur; böylece permütasyon
    değişmezliği yapı gereği sağlanır.
    """

    field: Field
    k: int
    kind: str
    explicit_atoms: Tuple[Atom, ...] = ()

    @cached_property
    def atoms(self) -> Tuple[Atom, ...]:
        if self.kind == "all-ones":
            return (((1,) * self.k, 1.0),)
        if self.kind == "atoms":
            return self.explicit_atoms
        q = self.field.q
        total = (q - 1) ** self.k
        n_atoms = _count_multisets(q - 1, self.k)
        if n_atoms > MAX_ENUMERATED_ATOMS:
            raise DistributionError(
                f"GF({q}), k={self.k} için {n_atoms} atom listelenemeyecek kadar çok"
            )
        return tuple(
            (values, _multinomial(values) / total)
            for values in combinations_with_replacement(range(1, q), self.k)
        )

    @cached_property
    def _probs(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms], dtype=float)

    def sample_values(self, rng: np.random.Generator) -> List[int]:
        """Bir atom çekip değerlerini düzgün rastgele permüte eder"""
        if self.kind == "all-ones":
            return [1] * self.k
        if self.kind == "uniform":
            # i.i.d. düzgün çekim, "atom + permütasyon" ile aynı dağılımdır
            return [int(v) for v in rng.integers(1, self.field.q, size=self.k)]
        atoms = self.atoms
        idx = int(rng.choice(len(atoms), p=self._probs)) if len(atoms) > 1 else 0
        values = atoms[idx][0]
        perm = rng.permutation(self.k)
        return [values[i] for i in perm]


def _count_multisets(n: int, k: int) -> int:
    return comb(n + k - 1, k)


def dist_make(field: Field, k: int, spec: Any = "uniform") -> ColumnDistribution:
    """
    spec: "uniform", "all-ones", {"kind": ...} sözlüğü, DistributionSpec modeli
    ya da [(değerler, olasılık), ...] listesi.
    """
    if k < 2:
        raise DistributionError(f"k={k}; en az 2 olmalı")
    if hasattr(spec, "model_dump"):
        spec = spec.model_dump()
    if isinstance(spec, str):
        spec = {"kind": spec}
    if isinstance(spec, (list, tuple)):
        spec = {"kind": "atoms", "atoms": [{"values": list(v), "p": p} for v, p in spec]}
    if not isinstance(spec, Mapping) or "kind" not in spec:
        raise DistributionError(f"dağılım tanımı anlaşılamadı: {spec!r}")

    kind = spec["kind"]
    if kind in ("uniform", "all-ones"):
        return ColumnDistribution(field, k, kind)
    if kind != "atoms":
        raise DistributionError(f"bilinmeyen dağılım türü: {kind}")

    merged = {}
    for atom in spec.get("atoms") or []:
        values = tuple(int(v) for v in atom["values"])
        prob = float(atom["p"])
        if len(values) != k:
            raise DistributionError(f"atom {values} {k} elemanlı değil")
        if any(v == 0 for v in values):
            raise DistributionError(f"atom {values} sıfır içeriyor")
        if any(not 0 < v < field.q for v in values):
            raise DistributionError(f"atom {values} GF({field.q}) dışında")
        if prob < 0:
            raise DistributionError(f"negatif olasılık: {prob}")
        key = tuple(sorted(values))
        merged[key] = merged.get(key, 0.0) + prob
    total = sum(merged.values())
    if not merged or abs(total - 1.0) > 1e-12:
        raise DistributionError(f"olasılıkların toplamı 1 değil ({total!r})")
    atoms = tuple((values, p / total) for values, p in sorted(merged.items()) if p > 0)
    return ColumnDistribution(field, k, "atoms", atoms)


def _k_subset(n: int, k: int, rng: np.random.Generator) -> List[int]:
    """Kısmi Fisher–Yates; yalnızca dokunulan konumlar saklanır"""
    swapped = {}
    chosen = []
    for i in range(k):
        j = int(rng.integers(i, n))
        at_i = swapped.get(i, i)
        at_j = swapped.get(j, j)
        swapped[j] = at_i
        swapped[i] = at_j
        chosen.append(at_j)
    return chosen


def sample_column(dist: ColumnDistribution, n: int, rng: np.random.Generator) -> Column:
    if n < dist.k:
        raise DimensionError(f"n={n} < k={dist.k}")
    support = _k_subset(n, dist.k, rng)
    values = dist.sample_values(rng)
    pairs = sorted(zip(support, values))
    assert len(pairs) == dist.k and all(v for _, v in pairs)
    return Column(tuple(r for r, _ in pairs), tuple(v for _, v in pairs))


@dataclass(frozen=True)
class ProcessState:
    dist: ColumnDistribution
    n: int
    matrix: SparseMatrix
    rng: np.random.Generator

    @property
    def m(self) -> int:
        return self.matrix.n_cols


def process_start(dist: ColumnDistribution, n: int, seed: SeedLike = None) -> ProcessState:
    """Boş A_0 (n satır, 0 sütun)"""
    if n < dist.k:
        raise DimensionError(f"n={n} < k={dist.k}")
    empty = SparseMatrix(dist.field, n, ())
    return ProcessState(dist, n, empty, make_rng(seed))


def process_extend(state: ProcessState, count: int, rng: Optional[np.random.Generator] = None) -> ProcessState:
    """count adet bağımsız sütun ekler; önceki sütunlar değişmez"""
    if count < 0:
        raise DimensionError(f"count={count} negatif olamaz")
    if count == 0:
        return state
    rng = state.rng if rng is None else rng
    start = state.m
    new_cols = [sample_column(state.dist, state.n, rng) for _ in range(count)]
    matrix = state.matrix.with_columns(new_cols, range(start, start + count))
    logger.debug("süreç %d -> %d sütun", start, matrix.n_cols)
    return ProcessState(state.dist, state.n, matrix, rng)


def process_matrix(dist: ColumnDistribution, n: int, m: int, seed: SeedLike = None) -> ProcessState:
    return process_extend(process_start(dist, n, seed), m)
