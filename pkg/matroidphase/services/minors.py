"""
Minor arama servisi

Hedef matroidler (PG(t−1,q), U(2,3), açık temsil), tanıklar (M/X∖Y ≅ N),
bağımsızlık karşılaştırması, kaba kuvvet kahini ve rastgele arayıcı.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from matroidphase.config import settings
from matroidphase.models.schemas import WitnessSummary
from matroidphase.services.gf import Field, field_make, field_of_order
from matroidphase.services.matrix_io import read_matrix
from matroidphase.services.peel import two_core
from matroidphase.services.process import dist_make, process_matrix
from matroidphase.services.spmat import (
    Column,
    DenseMatrix,
    Label,
    SparseMatrix,
    contract_rep,
    delete_rep,
    eliminate,
    invert,
    matmul,
    projective_key,
    rank,
    rref,
    simplify,
)
from matroidphase.utils.errors import (
    DimensionError,
    FieldError,
    FieldMismatchError,
    InstanceTooLargeError,
    SingularMatrixError,
    TargetError,
    UnknownLabelError,
)
from matroidphase.utils.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

# gömme aramasında tek denemede bakılan taban görüntüsü sayısı
EMBEDDING_TRIES = 32
MAX_SCALAR_VECTORS = 4096


# --- bağımsızlık kahini ---


def _dense_data(matrix: Union[SparseMatrix, DenseMatrix]) -> np.ndarray:
    if isinstance(matrix, SparseMatrix):
        return matrix.to_dense().data
    return matrix.data


class IndependenceOracle:
    """Sütun indeks kümeleri için önbellekli bağımsızlık testi"""

    def __init__(self, matrix: Union[SparseMatrix, DenseMatrix]):
        self.field = matrix.field
        self.grid = _dense_data(matrix)
        self.n_cols = self.grid.shape[1]
        self._cache: Dict[FrozenSet[int], bool] = {}

    def __call__(self, cols: Sequence[int]) -> bool:
        key = frozenset(cols)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if not key:
            result = True
        elif len(key) > self.grid.shape[0]:
            result = False
        else:
            _, pivots = eliminate(self.grid[:, sorted(key)], self.field, reduce_all=False)
            result = len(pivots) == len(key)
        self._cache[key] = result
        return result

    def rank(self) -> int:
        if self.grid.shape[0] == 0 or self.n_cols == 0:
            return 0
        _, pivots = eliminate(self.grid, self.field, reduce_all=False)
        return len(pivots)


def same_matroid(left: Union[SparseMatrix, DenseMatrix], right: Union[SparseMatrix, DenseMatrix]) -> bool:
    """
    Sütun sırasıyla eşlenen iki temsilin aynı matroidi verip vermediği.
    Ranklar eşitse rank'tan büyük altkümeler ikisinde de bağımlıdır, bu
    yüzden boyu rank'a kadar olan altkümeler yeterlidir.
    """
    if left.field != right.field:
        raise FieldMismatchError(f"{left.field!r} ile {right.field!r} karşılaştırılamaz")
    lo, ro = IndependenceOracle(left), IndependenceOracle(right)
    if lo.n_cols != ro.n_cols:
        return False
    r = lo.rank()
    if r != ro.rank():
        return False
    for size in range(1, r + 1):
        for subset in combinations(range(lo.n_cols), size):
            if lo(subset) != ro(subset):
                return False
    return True


# --- hedefler ---


def projective_points(field: Field, t: int) -> List[Tuple[int, ...]]:
    """GF(q)^t içindeki her 1-boyutlu alt uzaydan, ilk sıfırdan farklı girdisi 1 olan temsilci"""
    points = []
    for lead in range(t):
        for tail in product(range(field.q), repeat=t - lead - 1):
            points.append((0,) * lead + (1,) + tail)
    return points


@dataclass(frozen=True)
class TargetMinor:
    """Aranan sabit basit matroid N ve kanonik temsili"""

    kind: str
    matrix: SparseMatrix
    rank: int
    name: str

    @property
    def field(self) -> Field:
        return self.matrix.field

    @property
    def n_cols(self) -> int:
        return self.matrix.n_cols

    @property
    def has_circuit(self) -> bool:
        return self.rank < self.n_cols

    @classmethod
    def pg(cls, t: int, q: Union[int, Field] = 2) -> "TargetMinor":
        field = q if isinstance(q, Field) else _field_or_target_error(q)
        if t < 2:
            raise TargetError(f"PG(t−1,q) için t ≥ 2 olmalı (t={t})")
        points = projective_points(field, t)
        matrix = SparseMatrix.from_columns(field, t, [list(enumerate(p)) for p in points])
        return cls("pg", matrix, t, f"pg:{t}:{field.q}")

    @classmethod
    def u23(cls, field: Optional[Field] = None) -> "TargetMinor":
        field = field or field_make(2)
        matrix = SparseMatrix.from_columns(field, 2, [[(0, 1)], [(1, 1)], [(0, 1), (1, 1)]])
        return cls("u23", matrix, 2, "u23")

    @classmethod
    def explicit(cls, matrix: SparseMatrix, require_circuit: bool = True, name: str = "explicit") -> "TargetMinor":
        if matrix.n_cols == 0:
            raise TargetError("hedef matrisin sütunu yok")
        if simplify(matrix).n_cols != matrix.n_cols:
            raise TargetError("hedef matroid basit değil (sıfır ya da paralel sütun var)")
        rr = rref(matrix)
        if require_circuit and rr.rank == matrix.n_cols:
            raise TargetError("hedef matroid devre içermiyor")
        canonical = SparseMatrix.from_dense(
            DenseMatrix(matrix.field, rr.rref.data[: rr.rank]),
            labels=matrix.labels,
        )
        return cls("explicit", canonical, rr.rank, name)

    @classmethod
    def parse(cls, spec: str, field: Optional[Field] = None) -> "TargetMinor":
        """'pg:t:q', 'u23' ya da 'file:yol'"""
        spec = spec.strip()
        if spec == "u23":
            return cls.u23(field)
        if spec.startswith("pg:"):
            parts = spec.split(":")
            if len(parts) != 3:
                raise TargetError(f"hedef anlaşılamadı: {spec!r}")
            try:
                t, q = int(parts[1]), int(parts[2])
            except ValueError:
                raise TargetError(f"hedef anlaşılamadı: {spec!r}") from None
            target = cls.pg(t, q)
        elif spec.startswith("file:"):
            target = cls.explicit(read_matrix(spec[len("file:"):]), name=spec)
        else:
            raise TargetError(f"bilinmeyen hedef: {spec!r}")
        if field is not None and target.field != field:
            raise TargetError(f"hedef {target.field!r} üzerinde, matris {field!r} üzerinde")
        return target

    def canonical(self) -> Tuple[np.ndarray, Tuple[int, ...]]:
        """(rank × |N| indirgenmiş temsil, pivot sütunları)"""
        rr = rref(self.matrix)
        return rr.rref.data[: rr.rank], rr.pivot_columns


def _field_or_target_error(q: int) -> Field:
    try:
        return field_of_order(q)
    except FieldError as exc:
        raise TargetError(str(exc)) from exc


# --- tanık ---


@dataclass(frozen=True)
class MinorWitness:
    """
    M/X∖Y ≅ N tanığı. embedding, N'nin sütun etiketlerini kalan sütunlara
    eşler; scalars (boş olabilir) ortak satır dönüşümünden sonra sütun
    başına çarpanlardır.
    """

    contract_set: Tuple[Label, ...]
    delete_set: Tuple[Label, ...]
    embedding: Tuple[Tuple[Label, Label], ...]
    scalars: Tuple[int, ...] = ()

    def __post_init__(self):
        if set(self.contract_set) & set(self.delete_set):
            raise DimensionError("büzülen ve silinen kümeler ayrık olmalı")

    @property
    def image(self) -> Tuple[Label, ...]:
        return tuple(a for _, a in self.embedding)

    def summary(self, verified: Optional[bool] = None) -> WitnessSummary:
        return WitnessSummary(
            contract_set=list(self.contract_set),
            delete_size=len(self.delete_set),
            embedding={str(n): a for n, a in self.embedding},
            scalars=list(self.scalars),
            verified=verified,
        )


def _match_scalars(witnessed: SparseMatrix, target: SparseMatrix) -> Tuple[int, ...]:
    """
    T·W = N·diag(s) olacak şekilde ortak T ve sütun çarpanları s. İkisi de
    N'nin pivot tabanına göre indirgenince T köşegen kalır; satır ve sütun
    çarpanları sıfırdan farklı girdiler üzerinden yayılarak bulunur.
    Temsiller projektif olarak denk değilse boş döner.
    """
    field = target.field
    tr, wr = rref(target), rref(witnessed)
    if tr.rank != wr.rank:
        return ()
    r = tr.rank
    n_t, w_t = tr.rref.data[:r], wr.rref.data[:r]
    basis = list(tr.pivot_columns)
    try:
        to_basis = invert(DenseMatrix(field, w_t[:, basis])).data
    except SingularMatrixError:
        return ()
    reduced = matmul(field, to_basis, w_t)
    if not np.array_equal(reduced != 0, n_t != 0):
        return ()

    row_scale = [0] * r
    col_scale = [0] * n_t.shape[1]
    for start in range(r):
        if row_scale[start]:
            continue
        row_scale[start] = 1
        stack = [(True, start)]
        while stack:
            is_row, idx = stack.pop()
            if is_row:
                for j in np.flatnonzero(n_t[idx]):
                    if not col_scale[j]:
                        col_scale[j] = field.div(field.mul(row_scale[idx], int(reduced[idx, j])), int(n_t[idx, j]))
                        stack.append((False, int(j)))
            else:
                for i in np.flatnonzero(n_t[:, idx]):
                    if not row_scale[i]:
                        row_scale[i] = field.div(field.mul(col_scale[idx], int(n_t[i, idx])), int(reduced[i, idx]))
                        stack.append((True, int(i)))
    if not all(col_scale):
        return ()
    rows = np.asarray(row_scale, dtype=np.uint8)[:, None]
    cols = np.asarray(col_scale, dtype=np.uint8)[None, :]
    if not np.array_equal(field.mul_table[rows, reduced], field.mul_table[cols, n_t]):
        return ()
    return tuple(col_scale)


def _witnessed_columns(matrix: SparseMatrix, target: TargetMinor, witness: MinorWitness) -> SparseMatrix:
    contracted = contract_rep(matrix, witness.contract_set)
    minor = delete_rep(contracted, witness.delete_set)
    emb = dict(witness.embedding)
    return minor.select([emb[label] for label in target.matrix.labels])


def verify_witness(matrix: SparseMatrix, target: TargetMinor, witness: MinorWitness) -> bool:
    """Tanığı yeniden oynatır: X büzülür, Y silinir, kalan sütunlar N ile karşılaştırılır"""
    x, y = set(witness.contract_set), set(witness.delete_set)
    image = witness.image
    if len(set(image)) != len(image) or set(image) & (x | y):
        return False
    if set(matrix.labels) != x | y | set(image):
        return False
    if {n for n, _ in witness.embedding} != set(target.matrix.labels):
        return False
    try:
        witnessed = _witnessed_columns(matrix, target, witness)
    except UnknownLabelError:
        return False
    if not same_matroid(witnessed, target.matrix):
        return False
    if witness.scalars and _match_scalars(witnessed, target.matrix) != witness.scalars:
        return False
    return True


def _build_witness(
    matrix: SparseMatrix,
    target: TargetMinor,
    contract_set: Sequence[Label],
    image: Sequence[Label],
) -> MinorWitness:
    used = set(contract_set) | set(image)
    delete_set = tuple(label for label in matrix.labels if label not in used)
    embedding = tuple(zip(target.matrix.labels, image))
    draft = MinorWitness(tuple(contract_set), delete_set, embedding)
    scalars = _match_scalars(_witnessed_columns(matrix, target, draft), target.matrix)
    return MinorWitness(tuple(contract_set), delete_set, embedding, scalars)


def _check_fields(matrix: SparseMatrix, target: TargetMinor) -> None:
    if matrix.field != target.field:
        raise TargetError(f"hedef {target.field!r} üzerinde, matris {matrix.field!r} üzerinde")


def _free_witness(matrix: SparseMatrix, target: TargetMinor) -> Optional[MinorWitness]:
    """Devresiz hedef: herhangi bir tabanın ilk |N| elemanı yeterli"""
    rr = rref(matrix)
    if rr.rank < target.n_cols:
        return None
    basis = [matrix.labels[c] for c in rr.pivot_columns]
    return _build_witness(matrix, target, basis[target.n_cols:], basis[: target.n_cols])


# --- kaba kuvvet ---


def _embed(host: IndependenceOracle, pattern: IndependenceOracle, size: int, rank_limit: int) -> Optional[List[int]]:
    """Desenin sütunlarını host sütunlarına, bağımsızlıkları koruyarak geri izlemeyle eşler"""
    chosen: List[int] = []

    def consistent() -> bool:
        new = len(chosen) - 1
        for s in range(0, min(rank_limit - 1, new) + 1):
            for subset in combinations(range(new), s):
                p_cols = subset + (new,)
                h_cols = tuple(chosen[i] for i in p_cols)
                if pattern(p_cols) != host(h_cols):
                    return False
        return True

    def extend() -> bool:
        if len(chosen) == size:
            return True
        for c in range(host.n_cols):
            if c in chosen:
                continue
            chosen.append(c)
            if consistent() and extend():
                return True
            chosen.pop()
        return False

    return list(chosen) if extend() else None


def minor_bruteforce(matrix: SparseMatrix, target: TargetMinor) -> Optional[MinorWitness]:
    """
    Tüm bağımsız X (|X| = r(A) − r(N)) ve sütun eşlemeleri üzerinde tam arama.
    None kesin yokluk sertifikasıdır.
    """
    _check_fields(matrix, target)
    cap = settings.BRUTEFORCE_MAX_COLUMNS
    if matrix.n_cols > cap:
        raise InstanceTooLargeError(f"{matrix.n_cols} sütun, kaba kuvvet sınırı {cap}")

    oracle = IndependenceOracle(matrix)
    r_a = oracle.rank()
    t, s = target.rank, target.n_cols
    if t > r_a or s > matrix.n_cols:
        return None
    pattern = IndependenceOracle(target.matrix)

    for x in combinations(range(matrix.n_cols), r_a - t):
        if not oracle(x):
            continue
        contract_set = [matrix.labels[j] for j in x]
        contracted = contract_rep(matrix, contract_set)
        assignment = _embed(IndependenceOracle(contracted), pattern, s, t)
        if assignment is None:
            continue
        image = [contracted.labels[j] for j in assignment]
        witness = _build_witness(matrix, target, contract_set, image)
        if not verify_witness(matrix, target, witness):
            raise RuntimeError("kaba kuvvet tanığı doğrulanamadı")
        return witness
    return None


# --- rastgele arayıcı ---


@dataclass(frozen=True)
class FinderOutcome:
    witness: Optional[MinorWitness]
    failure_code: str
    attempts: int

    @property
    def found(self) -> bool:
        return self.witness is not None


def _scalar_vectors(field: Field, t: int, rng: np.random.Generator):
    """(1, λ_2, …, λ_t) çarpan vektörleri; çok fazlaysa rastgele örneklem"""
    count = (field.q - 1) ** (t - 1)
    if count <= MAX_SCALAR_VECTORS:
        for tail in product(range(1, field.q), repeat=t - 1):
            yield (1,) + tail
        return
    for _ in range(64):
        yield (1,) + tuple(int(v) for v in rng.integers(1, field.q, size=t - 1))


def _basis_candidates(n_host: int, t: int, rng: np.random.Generator):
    total = 1
    for i in range(t):
        total *= n_host - i
    if total <= EMBEDDING_TRIES * 4:
        yield from permutations(range(n_host), t)
        return
    for _ in range(EMBEDDING_TRIES):
        yield tuple(int(c) for c in rng.choice(n_host, size=t, replace=False))


def _find_embedding(host: SparseMatrix, target: TargetMinor, rng: np.random.Generator) -> Optional[List[Label]]:
    """
    Basitleştirilmiş host içinde N'nin bir kopyası. PG için projektif nokta
    kapsaması, diğer hedefler için taban görüntüsü × çarpan araması.
    """
    field = host.field
    simple = simplify(host)
    keys: Dict[tuple, Label] = {}
    for label, col in zip(simple.labels, simple.columns):
        keys[projective_key(field, col.rows, col.values)] = label

    if target.kind == "pg":
        if len(keys) < target.n_cols or host.n_rows != target.rank:
            return None
        image = []
        for col in target.matrix.columns:
            hit = keys.get(projective_key(field, col.rows, col.values))
            if hit is None:
                return None
            image.append(hit)
        return image

    t = target.rank
    if simple.n_cols < target.n_cols:
        return None
    pattern, pivots = target.canonical()
    others = [j for j in range(target.n_cols) if j not in set(pivots)]
    grid = simple.to_dense().data
    for basis in _basis_candidates(simple.n_cols, t, rng):
        hb = grid[:, list(basis)]
        _, piv = eliminate(hb, field, reduce_all=False)
        if len(piv) < t:
            continue
        for lam in _scalar_vectors(field, t, rng):
            scaled = field.mul_table[np.asarray(lam, dtype=np.uint8)[None, :], hb]
            images = matmul(field, scaled, pattern[:, others]) if others else np.zeros((hb.shape[0], 0), dtype=np.uint8)
            chosen: Dict[int, Label] = {pivots[i]: simple.labels[basis[i]] for i in range(t)}
            ok = True
            for pos, j in enumerate(others):
                vec = images[:, pos]
                nz = np.flatnonzero(vec)
                hit = keys.get(projective_key(field, tuple(int(r) for r in nz), tuple(int(v) for v in vec[nz])))
                if hit is None or hit in chosen.values():
                    ok = False
                    break
                chosen[j] = hit
            if ok:
                return [chosen[j] for j in range(target.n_cols)]
    return None


def search_randomized(
    matrix: SparseMatrix,
    target: TargetMinor,
    budget: Optional[int] = None,
    rng: SeedLike = None,
) -> FinderOutcome:
    """
    Çekirdeğin rref'i üzerinde rastgele t pivot satırı tutulur, diğer pivot
    sütunları büzülür; kalan matris basitleştirilip N aranır. Sütun sırası
    FINDER_RESHUFFLE_EVERY denemede bir karıştırılır.

    Arama yalnızca 2-çekirdekte yapılır. Soyulan sütunlar M'nin coloop'larıdır
    ve M = M[çekirdek] ⊕ serbest kısım olur; coloop içermeyen hedefler
    (U(2,3), PG, bağlantılı açık hedefler) için bu bir kayıp değildir. Coloop
    içeren açık bir hedefin gömülmesi soyulan sütunlara ihtiyaç duyuyorsa
    bulunamaz ve "rank-too-small" ya da "budget-exhausted" döner; böyle
    hedefler için kaba kuvvet kullanılmalıdır.
    """
    _check_fields(matrix, target)
    budget = settings.FINDER_BUDGET if budget is None else budget
    rng = make_rng(rng)

    if not target.has_circuit:
        witness = _free_witness(matrix, target)
        return FinderOutcome(witness, "none" if witness else "rank-too-small", 1)

    pr = two_core(matrix)
    core = pr.core
    core_rank = rank(core)
    if len(pr.peeled_cols) + core_rank == matrix.n_cols:
        return FinderOutcome(None, "full-rank", 0)
    t = target.rank
    if core_rank < t:
        return FinderOutcome(None, "rank-too-small", 0)

    field = matrix.field
    labels = list(core.labels)
    reshuffle = max(1, settings.FINDER_RESHUFFLE_EVERY)
    for attempt in range(budget):
        if attempt % reshuffle == 0:
            order = rng.permutation(len(labels))
            shuffled = core.select([labels[i] for i in order])
            rr = rref(shuffled)
            reduced = rr.rref.data[: rr.rank]
            pivots = rr.pivot_columns

        keep = np.sort(rng.choice(core_rank, size=t, replace=False))
        keep_set = set(int(i) for i in keep)
        dropped = [pivots[i] for i in range(core_rank) if i not in keep_set]
        dropped_set = set(dropped)
        cols = [j for j in range(shuffled.n_cols) if j not in dropped_set]
        host = SparseMatrix.from_dense(
            DenseMatrix(field, reduced[np.ix_(keep, cols)]),
            labels=[shuffled.labels[j] for j in cols],
        )
        image = _find_embedding(host, target, rng)
        if image is None:
            continue
        contract_set = [shuffled.labels[j] for j in dropped]
        witness = _build_witness(matrix, target, contract_set, image)
        if verify_witness(matrix, target, witness):
            logger.info("%s minörü %d. denemede bulundu", target.name, attempt + 1)
            return FinderOutcome(witness, "none", attempt + 1)
        logger.warning("rastgele tanık doğrulanamadı (deneme %d)", attempt + 1)
    return FinderOutcome(None, "budget-exhausted", budget)


def minor_randomized(
    matrix: SparseMatrix,
    target: TargetMinor,
    budget: Optional[int] = None,
    rng: SeedLike = None,
) -> Optional[MinorWitness]:
    """Bulunamaması yokluk sertifikası değildir"""
    return search_randomized(matrix, target, budget, rng).witness


def find_minor(
    matrix: SparseMatrix,
    target: TargetMinor,
    mode: str = "random",
    budget: Optional[int] = None,
    rng: SeedLike = None,
) -> FinderOutcome:
    if mode == "brute":
        witness = minor_bruteforce(matrix, target)
        return FinderOutcome(witness, "none" if witness else "absent", 1)
    if mode == "random":
        return search_randomized(matrix, target, budget, rng)
    raise ValueError(f"bilinmeyen arama modu: {mode}")


# --- yerleştirilmiş örnekler ---


def planted_instance(
    field: Field,
    block: SparseMatrix,
    k: int,
    n_pad: int,
    rng: SeedLike = None,
    ratio: float = 0.3,
) -> SparseMatrix:
    """
    [P' 0; 0 R] blok matrisi. P', bloğun sütunlarını k ağırlığa k adet
    dolgu satırıyla tamamlar ve her dolgu satırı için bir birim sütun
    ekler; bu birim sütunlar büzülünce blok geri gelir. R, n_pad satırlı
    (alt-kritik) rastgele süreç matrisidir.
    """
    if block.field != field:
        raise FieldMismatchError("blok başka bir cisim üzerinde")
    rng = make_rng(rng)
    b_rows = block.n_rows
    columns: List[Column] = []
    for col in block.columns:
        rows, values = list(col.rows), list(col.values)
        missing = k - len(rows)
        if missing > 0:
            pad = np.sort(rng.choice(k, size=missing, replace=False))
            rows += [b_rows + int(r) for r in pad]
            values += [int(v) for v in rng.integers(1, field.q, size=missing)]
        columns.append(Column(tuple(rows), tuple(values)))
    for i in range(k):
        columns.append(Column((b_rows + i,), (1,)))

    top = b_rows + k
    m_pad = int(round(ratio * n_pad))
    if n_pad:
        pad_state = process_matrix(dist_make(field, k, "uniform"), n_pad, m_pad, rng)
        for col in pad_state.matrix.columns:
            columns.append(Column(tuple(top + r for r in col.rows), col.values))
    return SparseMatrix(field, top + n_pad, tuple(columns))
