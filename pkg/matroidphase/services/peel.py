"""
Matrisin 2-çekirdeği ve çekirdek hipergrafı

Soyma kuralları: sıfır satırlar silinir; tek sıfırdan farklı girdisi olan
satır, o girdinin sütunuyla birlikte silinir. Sabit nokta tektir, bu
yüzden kuyruk sırası sonucu değiştirmez.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np

from matroidphase.services.spmat import Column, Label, SparseMatrix, rank
from matroidphase.utils.errors import DimensionError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PeelResult:
    core: SparseMatrix
    kept_rows: Tuple[int, ...]
    kept_cols: Tuple[Label, ...]
    peel_trace: Tuple[Tuple[int, Optional[Label]], ...]
    source_shape: Tuple[int, int]

    @property
    def peeled_cols(self) -> Tuple[Label, ...]:
        return tuple(col for _, col in self.peel_trace if col is not None)

    @property
    def is_empty(self) -> bool:
        return self.core.n_cols == 0 and self.core.n_rows == 0

    @property
    def row_fraction(self) -> float:
        return len(self.kept_rows) / self.source_shape[0] if self.source_shape[0] else 0.0

    @property
    def col_fraction(self) -> float:
        # çekirdek sütunları da n'e bölünür
        return len(self.kept_cols) / self.source_shape[0] if self.source_shape[0] else 0.0


class _WorkSet:
    """FIFO ya da rastgele sırayla satır çeken iş kümesi"""

    def __init__(self, items, rng: Optional[np.random.Generator]):
        self.rng = rng
        self.items = deque(items) if rng is None else list(items)

    def push(self, item: int) -> None:
        self.items.append(item)

    def pop(self) -> int:
        if self.rng is None:
            return self.items.popleft()
        i = int(self.rng.integers(len(self.items)))
        self.items[i], self.items[-1] = self.items[-1], self.items[i]
        return self.items.pop()

    def __bool__(self) -> bool:
        return bool(self.items)


def two_core(matrix: SparseMatrix, order: str = "fifo", rng: Optional[np.random.Generator] = None) -> PeelResult:
    """
    2-çekirdeği döndürür. order="random" ise rng ile rastgele soyma sırası
    kullanılır (sonuç aynıdır, yalnızca iz farklıdır).
    """
    n, m = matrix.shape
    degree = [0] * n
    col_xor = [0] * n
    for j, col in enumerate(matrix.columns):
        for r in col.rows:
            degree[r] += 1
            col_xor[r] ^= j

    row_alive = [True] * n
    col_alive = [True] * m
    if order == "random":
        if rng is None:
            raise ValueError("random sıra için rng gerekli")
        work = _WorkSet((r for r in range(n) if degree[r] <= 1), rng)
    else:
        work = _WorkSet((r for r in range(n) if degree[r] <= 1), None)

    trace: List[Tuple[int, Optional[Label]]] = []
    while work:
        r = work.pop()
        if not row_alive[r]:
            continue
        row_alive[r] = False
        if degree[r] == 0:
            trace.append((matrix.row_ids[r], None))
            continue
        # tek canlı sütun, XOR içinde kalan indekstir
        c = col_xor[r]
        col_alive[c] = False
        trace.append((matrix.row_ids[r], matrix.labels[c]))
        for r2 in matrix.columns[c].rows:
            if r2 == r:
                continue
            degree[r2] -= 1
            col_xor[r2] ^= c
            if row_alive[r2] and degree[r2] <= 1:
                work.push(r2)

    kept_rows = [r for r in range(n) if row_alive[r]]
    new_index = {r: i for i, r in enumerate(kept_rows)}
    kept_idx = [j for j in range(m) if col_alive[j]]
    core_cols = []
    for j in kept_idx:
        col = matrix.columns[j]
        core_cols.append(Column(tuple(new_index[r] for r in col.rows), col.values))
    core = SparseMatrix(
        matrix.field,
        len(kept_rows),
        tuple(core_cols),
        tuple(matrix.labels[j] for j in kept_idx),
        tuple(matrix.row_ids[r] for r in kept_rows),
    )
    logger.debug("2-çekirdek: %dx%d -> %dx%d", n, m, core.n_rows, core.n_cols)
    return PeelResult(
        core=core,
        kept_rows=core.row_ids,
        kept_cols=core.labels,
        peel_trace=tuple(trace),
        source_shape=(n, m),
    )


def rank_via_core(matrix: SparseMatrix, peeled: Optional[PeelResult] = None) -> int:
    """
    rank(A) = soyulan sütun sayısı + rank(çekirdek).
    Soyulan her sütun, soyulduğu anda tek başına bir satırı kapsadığı için
    bir coloop'tur.
    """
    pr = peeled if peeled is not None else two_core(matrix)
    return len(pr.peeled_cols) + rank(pr.core)


@dataclass(frozen=True)
class Hypergraph:
    """
    Çekirdek hipergrafı: köşeler çekirdek sütunları, her çekirdek satırı bir
    kenar. 2-kenarlar kırmızıdır.
    """

    vertices: Tuple[Label, ...]
    edges: Tuple[Tuple[int, ...], ...]
    edge_values: Tuple[Tuple[int, ...], ...] = ()
    edge_rows: Tuple[int, ...] = ()

    def __post_init__(self):
        if not self.edge_values:
            object.__setattr__(self, "edge_values", tuple((1,) * len(e) for e in self.edges))
        if not self.edge_rows:
            object.__setattr__(self, "edge_rows", tuple(range(len(self.edges))))
        if len(self.edge_values) != len(self.edges) or len(self.edge_rows) != len(self.edges):
            raise DimensionError("kenar değerleri/satırları kenar sayısıyla uyuşmuyor")
        n = len(self.vertices)
        for e in self.edges:
            if any(not 0 <= v < n for v in e) or len(set(e)) != len(e):
                raise DimensionError(f"geçersiz kenar {e}")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def red(self) -> Tuple[bool, ...]:
        return tuple(len(e) == 2 for e in self.edges)

    @cached_property
    def degrees(self) -> Tuple[int, ...]:
        deg = [0] * self.n_vertices
        for e in self.edges:
            for v in e:
                deg[v] += 1
        return tuple(deg)

    def edge_size_counts(self) -> dict:
        counts: dict = {}
        for e in self.edges:
            counts[len(e)] = counts.get(len(e), 0) + 1
        return dict(sorted(counts.items()))


def hypergraph_of(pr: PeelResult) -> Hypergraph:
    core = pr.core
    if core.n_cols == 0 or core.n_rows == 0:
        raise DimensionError("boş çekirdeğin hipergrafı yok")
    members: List[List[int]] = [[] for _ in range(core.n_rows)]
    values: List[List[int]] = [[] for _ in range(core.n_rows)]
    for j, col in enumerate(core.columns):
        for r, v in zip(col.rows, col.values):
            members[r].append(j)
            values[r].append(v)
    return Hypergraph(
        vertices=core.labels,
        edges=tuple(tuple(e) for e in members),
        edge_values=tuple(tuple(v) for v in values),
        edge_rows=core.row_ids,
    )
