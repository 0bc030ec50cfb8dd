"""
Sonlu cisim üzerinde seyrek/yoğun matrisler

Rank, indirgenmiş satır eşelon formu, ters alma, span üyeliği ve matroid
düzeyinde silme/büzme (deletion/contraction) işlemleri.

Eliminasyon kuralı sabittir: sütunlar sırayla işlenir, pivot olarak henüz
kullanılmamış satırlar arasında yukarıdan aşağı ilk sıfırdan farklı eleman
seçilir. Satırlar yer değiştirmez, bu yüzden büzme sonrası kalan satırlar
orijinal satır kimliklerini korur.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from matroidphase.config import settings
from matroidphase.services.gf import Field, as_value
from matroidphase.utils.errors import (
    DimensionError,
    FieldMismatchError,
    FieldError,
    SingularMatrixError,
    UnknownLabelError,
)

logger = logging.getLogger(__name__)

Label = Hashable
_WORD = np.dtype("<u8")
_ONE = np.uint64(1)


class Column(NamedTuple):
    rows: Tuple[int, ...]
    values: Tuple[int, ...]


EMPTY_COLUMN = Column((), ())


@dataclass(frozen=True)
class SparseMatrix:
    """Sütun tabanlı seyrek matris; etiketler dış dünyaya sabit kimlik verir"""

    field: Field
    n_rows: int
    columns: Tuple[Column, ...]
    labels: Tuple[Label, ...] = None
    row_ids: Tuple[int, ...] = None

    def __post_init__(self):
        cols = tuple(c if isinstance(c, Column) else Column(tuple(c[0]), tuple(c[1])) for c in self.columns)
        object.__setattr__(self, "columns", cols)
        if self.labels is None:
            object.__setattr__(self, "labels", tuple(range(len(cols))))
        else:
            object.__setattr__(self, "labels", tuple(self.labels))
        if self.row_ids is None:
            object.__setattr__(self, "row_ids", tuple(range(self.n_rows)))
        else:
            object.__setattr__(self, "row_ids", tuple(self.row_ids))
        self._validate()

    def _validate(self) -> None:
        if self.n_rows < 0:
            raise DimensionError("satır sayısı negatif olamaz")
        if len(self.labels) != len(self.columns):
            raise DimensionError(f"{len(self.labels)} etiket, {len(self.columns)} sütun")
        if len(set(self.labels)) != len(self.labels):
            raise DimensionError("sütun etiketleri benzersiz olmalı")
        if len(self.row_ids) != self.n_rows:
            raise DimensionError("row_ids uzunluğu satır sayısıyla uyuşmuyor")
        q = self.field.q
        for col in self.columns:
            if len(col.rows) != len(col.values):
                raise DimensionError("sütun satır/değer uzunlukları farklı")
            prev = -1
            for r, v in zip(col.rows, col.values):
                if r <= prev or r >= self.n_rows:
                    raise DimensionError(f"geçersiz satır indeksi {r}")
                if not 0 < v < q:
                    raise FieldError(f"saklanan değer {v} sıfırdan farklı bir GF({q}) kodu değil")
                prev = r

    # --- kurucular ---

    @classmethod
    def from_columns(
        cls,
        field: Field,
        n_rows: int,
        columns: Iterable,
        labels: Optional[Sequence[Label]] = None,
        row_ids: Optional[Sequence[int]] = None,
    ) -> "SparseMatrix":
        """
        Sütunları (satır, değer) çiftlerinden ya da {satır: değer} sözlüklerinden kurar.
        Sıfır değerler atılır, satırlar sıralanır.
        """
        built = []
        for col in columns:
            pairs = col.items() if isinstance(col, dict) else col
            entries = {}
            for r, v in pairs:
                val = as_value(field, v)
                if val:
                    entries[int(r)] = val
            rows = tuple(sorted(entries))
            built.append(Column(rows, tuple(entries[r] for r in rows)))
        return cls(field, n_rows, tuple(built), labels, row_ids)

    @classmethod
    def from_dense(
        cls,
        dense: "DenseMatrix",
        labels: Optional[Sequence[Label]] = None,
        row_ids: Optional[Sequence[int]] = None,
    ) -> "SparseMatrix":
        data = dense.data
        cols = []
        for j in range(data.shape[1]):
            nz = np.flatnonzero(data[:, j])
            cols.append(Column(tuple(int(r) for r in nz), tuple(int(v) for v in data[nz, j])))
        if labels is None:
            labels = dense.col_labels
        if row_ids is None and dense.row_labels is not None and all(isinstance(r, (int, np.integer)) for r in dense.row_labels):
            row_ids = tuple(int(r) for r in dense.row_labels)
        return cls(dense.field, data.shape[0], tuple(cols), labels, row_ids)

    # --- erişim ---

    @property
    def n_cols(self) -> int:
        return len(self.columns)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def nnz(self) -> int:
        return sum(len(c.rows) for c in self.columns)

    @property
    def density(self) -> float:
        if self.n_rows == 0 or self.n_cols == 0:
            return 0.0
        return self.nnz / (self.n_rows * self.n_cols)

    @cached_property
    def label_index(self) -> Dict[Label, int]:
        return {label: j for j, label in enumerate(self.labels)}

    def index_of(self, label: Label) -> int:
        try:
            return self.label_index[label]
        except KeyError:
            raise UnknownLabelError(f"bilinmeyen sütun etiketi: {label!r}") from None

    def column(self, label: Label) -> Column:
        return self.columns[self.index_of(label)]

    def select(self, labels: Iterable[Label]) -> "SparseMatrix":
        """Verilen etiketlerin sütunlarını (verilen sırada) tutar"""
        idx = [self.index_of(label) for label in labels]
        return SparseMatrix(
            self.field,
            self.n_rows,
            tuple(self.columns[j] for j in idx),
            tuple(self.labels[j] for j in idx),
            self.row_ids,
        )

    def with_columns(self, columns: Sequence[Column], labels: Sequence[Label]) -> "SparseMatrix":
        """Sağa yeni sütunlar ekler"""
        return SparseMatrix(
            self.field,
            self.n_rows,
            self.columns + tuple(columns),
            self.labels + tuple(labels),
            self.row_ids,
        )

    def to_dense(self) -> "DenseMatrix":
        grid = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for j, col in enumerate(self.columns):
            if col.rows:
                grid[list(col.rows), j] = col.values
        return DenseMatrix(self.field, grid, self.row_ids, self.labels)

    def row_degrees(self) -> np.ndarray:
        deg = np.zeros(self.n_rows, dtype=np.int64)
        for col in self.columns:
            if col.rows:
                deg[list(col.rows)] += 1
        return deg

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.n_rows == other.n_rows
            and self.columns == other.columns
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.field, self.n_rows, self.columns, self.labels))


@dataclass(frozen=True, eq=False)
class DenseMatrix:
    """Satır öncelikli yoğun matris (uint8 kodlar)"""

    field: Field
    data: np.ndarray
    row_labels: Optional[Tuple] = None
    col_labels: Optional[Tuple] = None

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.int64, copy=True)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise DimensionError("yoğun matris iki boyutlu olmalı")
        if arr.size and (arr.min() < 0 or arr.max() >= self.field.q):
            raise FieldError(f"matris girdileri GF({self.field.q}) kodları olmalı")
        arr = arr.astype(np.uint8)
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        if self.row_labels is not None:
            object.__setattr__(self, "row_labels", tuple(self.row_labels))
            if len(self.row_labels) != arr.shape[0]:
                raise DimensionError("satır etiketi sayısı uyuşmuyor")
        if self.col_labels is not None:
            object.__setattr__(self, "col_labels", tuple(self.col_labels))
            if len(self.col_labels) != arr.shape[1]:
                raise DimensionError("sütun etiketi sayısı uyuşmuyor")

    @classmethod
    def from_rows(cls, field: Field, rows: Sequence[Sequence[int]], **kwargs) -> "DenseMatrix":
        data = [[as_value(field, x) for x in row] for row in rows]
        return cls(field, np.array(data, dtype=np.int64).reshape(len(data), -1 if data else 0), **kwargs)

    @classmethod
    def identity(cls, field: Field, n: int) -> "DenseMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: Field, n_rows: int, n_cols: int) -> "DenseMatrix":
        return cls(field, np.zeros((n_rows, n_cols), dtype=np.int64))

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    def transpose(self) -> "DenseMatrix":
        return DenseMatrix(self.field, self.data.T, self.col_labels, self.row_labels)

    def to_sparse(self, labels: Optional[Sequence[Label]] = None) -> SparseMatrix:
        return SparseMatrix.from_dense(self, labels)

    def __matmul__(self, other: "DenseMatrix") -> "DenseMatrix":
        if other.field != self.field:
            raise FieldMismatchError("farklı cisimlerde matris çarpımı")
        if self.n_cols != other.n_rows:
            raise DimensionError(f"{self.shape} @ {other.shape} boyutları uyuşmuyor")
        return DenseMatrix(self.field, matmul(self.field, self.data, other.data), self.row_labels, other.col_labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.field == other.field and np.array_equal(self.data, other.data)

    def __hash__(self) -> int:
        return hash((self.field, self.data.shape, self.data.tobytes()))


Matrix = Union[SparseMatrix, DenseMatrix]


@dataclass(frozen=True)
class RrefResult:
    rref: DenseMatrix
    pivot_columns: Tuple[int, ...]
    rank: int


@dataclass(frozen=True)
class SpanCertificate:
    """
    member=True ise M·coefficients = v; aksi halde functional·M = 0 ve
    functional·v != 0.
    """

    member: bool
    coefficients: Optional[Tuple[int, ...]] = None
    functional: Optional[Tuple[int, ...]] = None


# --- cisim üzerinde çarpım ---


def matmul(field: Field, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """GF(q) üzerinde a @ b"""
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"{a.shape} @ {b.shape} boyutları uyuşmuyor")
    if field.e == 1:
        out = (a.astype(np.int64) @ b.astype(np.int64)) % field.p
        return out.astype(np.uint8)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    add, mul = field.add_table, field.mul_table
    for t in range(a.shape[1]):
        col, row = a[:, t], b[t]
        if not col.any() or not row.any():
            continue
        out = add[out, mul[col[:, None], row[None, :]]]
    return out


# --- eliminasyon çekirdekleri ---


def _pack_dense(grid: np.ndarray) -> np.ndarray:
    packed = np.packbits(grid.astype(bool), axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return np.ascontiguousarray(packed).view(_WORD).copy()


def _pack_sparse(matrix: SparseMatrix) -> np.ndarray:
    n_words = (matrix.n_cols + 63) // 64
    words = np.zeros((matrix.n_rows, n_words), dtype=_WORD)
    rows: List[int] = []
    cols: List[int] = []
    for j, col in enumerate(matrix.columns):
        rows.extend(col.rows)
        cols.extend([j] * len(col.rows))
    if rows:
        r = np.asarray(rows, dtype=np.int64)
        c = np.asarray(cols, dtype=np.int64)
        bits = np.left_shift(_ONE, (c & 63).astype(np.uint64))
        np.bitwise_or.at(words, (r, c >> 6), bits)
    return words


def _unpack(words: np.ndarray, n_cols: int) -> np.ndarray:
    if n_cols == 0:
        return np.zeros((words.shape[0], 0), dtype=np.uint8)
    as_bytes = np.ascontiguousarray(words).view(np.uint8)
    return np.unpackbits(as_bytes, axis=1, count=n_cols, bitorder="little")


def _eliminate_gf2(words: np.ndarray, columns: Iterable[int], reduce_all: bool) -> List[Tuple[int, int]]:
    n_rows = words.shape[0]
    used = np.zeros(n_rows, dtype=bool)
    pivots: List[Tuple[int, int]] = []
    for c in columns:
        bits = ((words[:, c >> 6] >> np.uint64(c & 63)) & _ONE).astype(bool)
        cand = np.flatnonzero(bits & ~used)
        if cand.size == 0:
            continue
        r = int(cand[0])
        used[r] = True
        targets = bits if reduce_all else bits & ~used
        targets[r] = False
        idx = np.flatnonzero(targets)
        if idx.size:
            words[idx] ^= words[r]
        pivots.append((r, c))
        if len(pivots) == n_rows:
            break
    return pivots


def _eliminate_generic(grid: np.ndarray, field: Field, columns: Iterable[int], reduce_all: bool) -> List[Tuple[int, int]]:
    n_rows = grid.shape[0]
    add, mul, neg, inv = field.add_table, field.mul_table, field.neg_table, field.inv_table
    used = np.zeros(n_rows, dtype=bool)
    pivots: List[Tuple[int, int]] = []
    for c in columns:
        nz = grid[:, c] != 0
        cand = np.flatnonzero(nz & ~used)
        if cand.size == 0:
            continue
        r = int(cand[0])
        used[r] = True
        lead = grid[r, c]
        if lead != 1:
            grid[r] = mul[inv[lead], grid[r]]
        targets = nz if reduce_all else nz & ~used
        targets[r] = False
        idx = np.flatnonzero(targets)
        if idx.size:
            factors = neg[grid[idx, c]]
            grid[idx] = add[grid[idx], mul[factors[:, None], grid[r][None, :]]]
        pivots.append((r, c))
        if len(pivots) == n_rows:
            break
    return pivots


def _use_gf2(field: Field, engine: str) -> bool:
    if engine == "generic":
        return False
    if engine == "gf2":
        if field.q != 2:
            raise FieldMismatchError("bit-paketli yol yalnızca GF(2) içindir")
        return True
    return field.q == 2


def _dense_bytes(matrix: SparseMatrix) -> int:
    """Yoğunlaştırılmış ızgaranın bayt boyu (GF(2) için 64-bit kelimeler)"""
    if matrix.field.q == 2:
        return matrix.n_rows * ((matrix.n_cols + 63) // 64) * 8
    return matrix.n_rows * matrix.n_cols


def _note_densify(matrix: SparseMatrix) -> None:
    size_mb = _dense_bytes(matrix) / 2**20
    if size_mb > settings.DENSE_WARN_MB:
        logger.warning(
            "%dx%d matris yoğun eliminasyon için ~%.0f MB tutacak; süre satır sayısının küpüyle büyür",
            matrix.n_rows,
            matrix.n_cols,
            size_mb,
        )
    elif matrix.density <= settings.DENSIFY_DENSITY and matrix.n_rows > settings.DENSIFY_MAX_ROWS:
        logger.debug(
            "seyrek %dx%d matris (yoğunluk %.4f) eliminasyon için yoğunlaştırılıyor",
            matrix.n_rows,
            matrix.n_cols,
            matrix.density,
        )


def eliminate(
    matrix: Union[Matrix, np.ndarray],
    field: Optional[Field] = None,
    columns: Optional[Iterable[int]] = None,
    reduce_all: bool = True,
    engine: str = "auto",
) -> Tuple[np.ndarray, List[Tuple[int, int]]]:
    """
    Verilen sütunlar üzerinde pivotlama yapar.

    Dönüş: (indirgenmiş ızgara, [(satır, sütun), ...] pivot listesi).
    reduce_all=False iken yalnızca henüz pivot olmamış satırlar temizlenir.
    """
    if isinstance(matrix, SparseMatrix):
        field = matrix.field
        n_rows, n_cols = matrix.shape
        _note_densify(matrix)
    elif isinstance(matrix, DenseMatrix):
        field = matrix.field
        n_rows, n_cols = matrix.shape
    else:
        if field is None:
            raise FieldError("ham ızgara için cisim verilmeli")
        n_rows, n_cols = matrix.shape
    cols = range(n_cols) if columns is None else list(columns)

    if n_rows == 0 or n_cols == 0:
        return np.zeros((n_rows, n_cols), dtype=np.uint8), []

    if _use_gf2(field, engine):
        if isinstance(matrix, SparseMatrix):
            words = _pack_sparse(matrix)
        else:
            grid = matrix.data if isinstance(matrix, DenseMatrix) else matrix
            words = _pack_dense(grid)
        pivots = _eliminate_gf2(words, cols, reduce_all)
        return _unpack(words, n_cols), pivots

    if isinstance(matrix, SparseMatrix):
        grid = matrix.to_dense().data.copy()
    elif isinstance(matrix, DenseMatrix):
        grid = matrix.data.copy()
    else:
        grid = np.array(matrix, dtype=np.uint8, copy=True)
    pivots = _eliminate_generic(grid, field, cols, reduce_all)
    return grid, pivots


# --- genel işlemler ---


def rank(matrix: Matrix, engine: str = "auto") -> int:
    if matrix.n_rows == 0 or matrix.n_cols == 0:
        return 0
    if _use_gf2(matrix.field, engine):
        if isinstance(matrix, SparseMatrix):
            _note_densify(matrix)
            words = _pack_sparse(matrix)
        else:
            words = _pack_dense(matrix.data)
        return len(_eliminate_gf2(words, range(matrix.n_cols), reduce_all=False))
    _, pivots = eliminate(matrix, columns=None, reduce_all=False, engine=engine)
    return len(pivots)


def rref(matrix: Matrix, engine: str = "auto") -> RrefResult:
    grid, pivots = eliminate(matrix, reduce_all=True, engine=engine)
    pivots = sorted(pivots, key=lambda rc: rc[1])
    pivot_rows = [r for r, _ in pivots]
    pivot_set = set(pivot_rows)
    rest = [r for r in range(grid.shape[0]) if r not in pivot_set]
    out = grid[pivot_rows + rest] if grid.shape[0] else grid
    # eşelon formda pivot olmayan satırlar sıfırdır
    out = out.copy()
    out[len(pivot_rows):] = 0
    col_labels = matrix.labels if isinstance(matrix, SparseMatrix) else matrix.col_labels
    return RrefResult(
        DenseMatrix(matrix.field, out, None, col_labels),
        tuple(c for _, c in pivots),
        len(pivots),
    )


def invert(matrix: Matrix) -> DenseMatrix:
    """
    Kare matrisin tersi. Etiketler yer değiştirir: tersin satırları girdinin
    sütunlarıyla, sütunları girdinin satırlarıyla etiketlenir.
    """
    dense = matrix.to_dense() if isinstance(matrix, SparseMatrix) else matrix
    n = dense.n_rows
    if dense.n_cols != n:
        raise DimensionError(f"{dense.shape} kare değil")
    aug = np.concatenate([dense.data, np.eye(n, dtype=np.uint8)], axis=1)
    grid, pivots = eliminate(aug, dense.field, columns=range(n), reduce_all=True)
    if len(pivots) < n:
        raise SingularMatrixError(f"{n}x{n} matris tekil (rank {len(pivots)})", rank=len(pivots))
    order = [r for r, _ in sorted(pivots, key=lambda rc: rc[1])]
    return DenseMatrix(dense.field, grid[order, n:], dense.col_labels, dense.row_labels)


def _as_grid(matrix: Matrix) -> np.ndarray:
    if isinstance(matrix, SparseMatrix):
        _note_densify(matrix)
        return matrix.to_dense().data
    return matrix.data


def in_span(matrix: Matrix, vector: Sequence) -> SpanCertificate:
    field = matrix.field
    grid = _as_grid(matrix)
    n, m = grid.shape
    v = np.array([as_value(field, x) for x in vector], dtype=np.uint8)
    if v.shape[0] != n:
        raise DimensionError(f"vektör uzunluğu {v.shape[0]}, satır sayısı {n}")
    if n == 0:
        return SpanCertificate(True, tuple([0] * m), None)
    aug = np.concatenate([grid, v[:, None], np.eye(n, dtype=np.uint8)], axis=1)
    reduced, pivots = eliminate(aug, field, columns=range(m + 1), reduce_all=True)
    row_of = {c: r for r, c in pivots}
    if m in row_of:
        functional = reduced[row_of[m], m + 1:]
        return SpanCertificate(False, None, tuple(int(x) for x in functional))
    coeffs = [0] * m
    for c, r in row_of.items():
        coeffs[c] = int(reduced[r, m])
    return SpanCertificate(True, tuple(coeffs), None)


def _indices(matrix: SparseMatrix, labels: Iterable[Label]) -> List[int]:
    idx = [matrix.index_of(label) for label in labels]
    return sorted(set(idx))


def delete_rep(matrix: SparseMatrix, labels: Iterable[Label]) -> SparseMatrix:
    """M[A]∖X: X'in sütunları atılır, satırlar aynen kalır"""
    drop = set(_indices(matrix, labels))
    keep = [matrix.labels[j] for j in range(matrix.n_cols) if j not in drop]
    return matrix.select(keep)


def contract_rep(matrix: SparseMatrix, labels: Iterable[Label]) -> SparseMatrix:
    """
    M[A]/X temsili: A_X üzerinde pivotlanır, pivot satırları ve X sütunları
    silinir. Kalan satırlar row_ids ile orijinal kimliklerini taşır.
    """
    x_idx = _indices(matrix, labels)
    if not x_idx:
        return matrix
    grid, pivots = eliminate(matrix, columns=x_idx, reduce_all=False)
    pivot_rows = {r for r, _ in pivots}
    keep_rows = [r for r in range(matrix.n_rows) if r not in pivot_rows]
    x_set = set(x_idx)
    keep_cols = [j for j in range(matrix.n_cols) if j not in x_set]
    sub = grid[np.ix_(keep_rows, keep_cols)] if keep_rows and keep_cols else np.zeros((len(keep_rows), len(keep_cols)), dtype=np.uint8)
    dense = DenseMatrix(matrix.field, sub)
    return SparseMatrix.from_dense(
        dense,
        labels=[matrix.labels[j] for j in keep_cols],
        row_ids=[matrix.row_ids[r] for r in keep_rows],
    )


def projective_key(field: Field, rows: Sequence[int], values: Sequence[int]) -> Optional[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """İlk sıfırdan farklı girdisi 1 olacak şekilde ölçeklenmiş sütun; sıfır sütun için None"""
    if not rows:
        return None
    scale = field.inv_table[values[0]]
    return tuple(rows), tuple(int(field.mul_table[scale, v]) for v in values)


def _label_order(labels: Sequence[Label]) -> List[int]:
    try:
        return sorted(range(len(labels)), key=lambda j: labels[j])
    except TypeError:
        return list(range(len(labels)))


def simplify(matrix: SparseMatrix) -> SparseMatrix:
    """Sıfır sütunları atar, her paralel sınıftan en küçük etiketli temsilciyi tutar"""
    seen = set()
    keep = set()
    for j in _label_order(matrix.labels):
        col = matrix.columns[j]
        key = projective_key(matrix.field, col.rows, col.values)
        if key is None or key in seen:
            continue
        seen.add(key)
        keep.add(j)
    return matrix.select([matrix.labels[j] for j in range(matrix.n_cols) if j in keep])
