"""
Yapısal inşalar: δ-yoğun taban, ℓ-tamlıktan (ℓ+1)-tamlığa adım ve
3-tam temsilden PG(t−1,q) minörü.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass
from itertools import combinations, product
from math import comb
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from matroidphase.services.gf import Field
from matroidphase.services.minors import MinorWitness, TargetMinor, _build_witness, verify_witness
from matroidphase.services.spmat import (
    DenseMatrix,
    Label,
    SparseMatrix,
    eliminate,
    projective_key,
)
from matroidphase.utils.errors import HypothesisError

logger = logging.getLogger(__name__)


# --- tamlık ---


def _column_keys(matrix: SparseMatrix) -> Dict[tuple, Label]:
    keys: Dict[tuple, Label] = {}
    for label, col in zip(matrix.labels, matrix.columns):
        key = projective_key(matrix.field, col.rows, col.values)
        if key is not None and key not in keys:
            keys[key] = label
    return keys


def support_vectors(field: Field, n: int, max_support: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """Desteği ≤ max_support olan, ilk girdisi 1 olan vektörler (satırlar, değerler)"""
    for size in range(1, max_support + 1):
        for rows in combinations(range(n), size):
            for tail in product(range(1, field.q), repeat=size - 1):
                yield rows, (1,) + tail


def missing_vector(matrix: SparseMatrix, ell: int) -> Optional[Tuple[int, ...]]:
    """ℓ-tamlığı bozan ilk vektör (yoğun), ya da None"""
    keys = _column_keys(matrix)
    for rows, values in support_vectors(matrix.field, matrix.n_rows, ell):
        if (rows, values) not in keys:
            vec = [0] * matrix.n_rows
            for r, v in zip(rows, values):
                vec[r] = v
            return tuple(vec)
    return None


def is_complete(matrix: SparseMatrix, ell: int) -> bool:
    return matrix.n_rows >= ell and missing_vector(matrix, ell) is None


# --- δ-yoğun taban ---


def dense_basis(b_r: DenseMatrix, delta: float) -> Optional[List[Tuple[int, ...]]]:
    """
    B^{[r]} sütun değerlerinden (δ/q^r)-yoğun olanları sıklık sırasıyla
    açgözlü biçimde bağımsız kümeye ekler. r vektör bulunamazsa None.
    """
    field = b_r.field
    r, n_prime = b_r.shape
    if r < 1:
        raise HypothesisError("r en az 1 olmalı")
    threshold = (delta / field.q**r) * n_prime
    counts = Counter(tuple(int(v) for v in b_r.data[:, j]) for j in range(n_prime))
    candidates = sorted(
        (vec for vec, c in counts.items() if c >= threshold and any(vec)),
        key=lambda vec: (-counts[vec], vec),
    )
    chosen: List[Tuple[int, ...]] = []
    for vec in candidates:
        trial = np.array(chosen + [vec], dtype=np.uint8).T
        _, pivots = eliminate(trial, field, reduce_all=False)
        if len(pivots) == len(chosen) + 1:
            chosen.append(vec)
            if len(chosen) == r:
                return chosen
    logger.debug("yoğun taban %d/%d vektörde tıkandı", len(chosen), r)
    return None


# --- adım ---


@dataclass(frozen=True)
class StepUpResult:
    matrix: SparseMatrix
    contracted: Tuple[Label, ...]
    ell: int


def _unit_labels(matrix: SparseMatrix) -> Dict[int, Label]:
    """satır -> o satırın birim vektörüne paralel sütun"""
    units: Dict[int, Label] = {}
    for label, col in zip(matrix.labels, matrix.columns):
        if len(col.rows) == 1 and col.rows[0] not in units:
            units[col.rows[0]] = label
    return units


def truncate_rows(grid: np.ndarray, labels: List[Label], units: Dict[int, Label], keep: int) -> Tuple[np.ndarray, List[Label], List[Label]]:
    """
    keep'ten sonraki her satır için birim sütun büzülür: satır ve sütun
    silinir, diğer sütunlar o satırdaki girdilerini kaybeder.
    """
    drop_labels = [units[r] for r in range(keep, grid.shape[0])]
    drop = set(drop_labels)
    cols = [j for j, label in enumerate(labels) if label not in drop]
    return grid[:keep][:, cols], [labels[j] for j in cols], drop_labels


def _dense_columns(grid: np.ndarray, field: Field, labels: Sequence[Label]) -> SparseMatrix:
    return SparseMatrix.from_dense(DenseMatrix(field, grid), labels=labels)


def step_up(matrix: SparseMatrix, ell: int, s: int) -> StepUpResult:
    """
    ℓ-tam temsilden rank'ı s olan (ℓ+1)-tam minör.

    Satırlar s + q²·C(s,2)'ye indirilir; R2 satırları (I, α, β) ile
    indekslenir. Her (α, β, I) için y − αx_i − βx_j'ye paralel sütun C'ye
    girer; i satırına α·y satırı, j satırına β·y satırı eklenir; R2 satırları
    ve C sütunları silinir.
    """
    field = matrix.field
    q = field.q
    if ell < 3:
        raise HypothesisError(f"ℓ={ell}; en az 3 olmalı")
    if s < ell:
        raise HypothesisError(f"s={s} < ℓ={ell}")
    needed = s + q * q * comb(s, 2)
    gap = missing_vector(matrix, ell)
    if gap is not None:
        raise HypothesisError(f"girdi {ell}-tam değil; eksik vektör {gap}", missing_vector=gap)
    if matrix.n_rows < needed:
        raise HypothesisError(f"rank {matrix.n_rows} < s + q²C(s,2) = {needed}")

    grid, labels, contracted = truncate_rows(
        matrix.to_dense().data.copy(), list(matrix.labels), _unit_labels(matrix), needed
    )
    work = _dense_columns(grid, field, labels)
    keys = _column_keys(work)
    grid = np.array(grid, dtype=np.uint8, copy=True)
    add, mul, neg = field.add_table, field.mul_table, field.neg_table

    c_labels = []
    y = s
    for i, j in combinations(range(s), 2):
        for alpha in range(q):
            for beta in range(q):
                vec = {y: 1}
                if alpha:
                    vec[i] = int(neg[alpha])
                if beta:
                    vec[j] = int(neg[beta])
                rows = tuple(sorted(vec))
                key = projective_key(field, rows, tuple(vec[r] for r in rows))
                label = keys.get(key)
                if label is None:
                    dense = [0] * needed
                    for r, v in vec.items():
                        dense[r] = v
                    raise HypothesisError(f"C için sütun yok: {tuple(dense)}", missing_vector=dense)
                c_labels.append(label)
                if alpha:
                    grid[i] = add[grid[i], mul[alpha, grid[y]]]
                if beta:
                    grid[j] = add[grid[j], mul[beta, grid[y]]]
                y += 1

    c_set = set(c_labels)
    cols = [idx for idx, label in enumerate(labels) if label not in c_set]
    result = _dense_columns(grid[:s][:, cols], field, [labels[idx] for idx in cols])
    gap = missing_vector(result, ell + 1)
    if gap is not None:
        raise HypothesisError(f"adım sonrası {ell + 1}-tamlık bozuk; eksik {gap}", missing_vector=gap)
    logger.info("step_up: %d satır -> %d satır, ℓ=%d -> %d", matrix.n_rows, s, ell, ell + 1)
    return StepUpResult(result, tuple(contracted) + tuple(c_labels), ell + 1)


def pg_schedule(t: int, q: int) -> List[int]:
    """n_k = (q²t)^{2^{t−k}} / q², k = 3..t"""
    return [(q * q * t) ** (2 ** (t - k)) // (q * q) for k in range(3, t + 1)]


def pg_from_3complete(matrix: SparseMatrix, t: int, q: Optional[int] = None) -> MinorWitness:
    """
    3-tam temsilden PG(t−1,q) minörü. Rank en az n_3 olmalı; step_up n_k
    takvimi boyunca uygulanır, son adımda t satıra indirilir.
    """
    field = matrix.field
    if q is not None and q != field.q:
        raise HypothesisError(f"q={q}, matris GF({field.q}) üzerinde")
    if t < 3:
        raise HypothesisError(f"t={t}; en az 3 olmalı")
    gap = missing_vector(matrix, 3)
    if gap is not None:
        raise HypothesisError(f"girdi 3-tam değil; eksik vektör {gap}", missing_vector=gap)
    schedule = pg_schedule(t, field.q)
    if matrix.n_rows < schedule[0]:
        raise HypothesisError(f"rank {matrix.n_rows} < n_3 = {schedule[0]}")

    contracted: List[Label] = []
    current = matrix
    for ell, target_rank in zip(range(3, t), schedule[1:]):
        step = step_up(current, ell, target_rank)
        contracted.extend(step.contracted)
        current = step.matrix

    if current.n_rows > t:
        grid, labels, dropped = truncate_rows(current.to_dense().data, list(current.labels), _unit_labels(current), t)
        contracted.extend(dropped)
        current = _dense_columns(grid, field, labels)

    target = TargetMinor.pg(t, field)
    keys = _column_keys(current)
    image = []
    for col in target.matrix.columns:
        label = keys.get(projective_key(field, col.rows, col.values))
        if label is None:
            raise HypothesisError(f"PG({t - 1},{field.q}) noktası eksik: {col}")
        image.append(label)

    witness = _build_witness(matrix, target, contracted, image)
    if not verify_witness(matrix, target, witness):
        raise HypothesisError("PG tanığı doğrulanamadı")
    return witness
