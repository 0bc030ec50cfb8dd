"""
Süper-kritik boru hattı

A¹ alt-kritik matrisinden başlayıp iki serpiştirme turu, A″ tersi ve
U∖[r] büzmesiyle rank'ı r olan A⁶ matrisine ulaşır. Her adımın
değişmezleri burada doğrulanır. Sonlu n'de olası başarısızlıklar iz
üzerinde failure_code olarak kaydedilir.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field
from itertools import combinations, product
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from matroidphase.config import settings
from matroidphase.services.constructions import dense_basis
from matroidphase.services.gf import Field
from matroidphase.services.peel import Hypergraph, hypergraph_of, two_core
from matroidphase.services.process import ColumnDistribution, ProcessState, dist_make, process_extend, process_matrix
from matroidphase.services.spmat import (
    DenseMatrix,
    Label,
    SparseMatrix,
    contract_rep,
    eliminate,
    invert,
    matmul,
    rank,
    rref,
)
from matroidphase.services.tanner import alpha_subgraph
from matroidphase.utils.errors import DimensionError, PipelineError, SingularMatrixError
from matroidphase.utils.rng import SeedLike, make_rng

logger = logging.getLogger(__name__)

WEIGHT_MAX_SET = 3


@dataclass(frozen=True)
class PipelineParams:
    eta: float
    eps1: float
    r: int = 8
    delta: float = 0.01
    seed: SeedLike = None

    @classmethod
    def defaults(cls, n: int, seed: SeedLike = None, **overrides) -> "PipelineParams":
        """ε₁ = n^{−1/4}, η = n^{−1/8} (ε₁ = o(η))"""
        values = dict(
            eta=n ** (-1 / 8),
            eps1=n ** (-1 / 4),
            r=settings.PIPELINE_R,
            delta=settings.DENSE_WEIGHT_DELTA,
            seed=seed,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class PipelineTrace:
    n: int
    m1: int
    eta: float
    eps1: float
    eps2: float = 0.0
    r: int = 8
    delta: float = 0.01
    U0: Tuple[Label, ...] = ()
    U: Tuple[Label, ...] = ()
    A3: Optional[SparseMatrix] = None
    A_dd: Optional[DenseMatrix] = None
    A_star: Optional[DenseMatrix] = None
    B: Optional[DenseMatrix] = None
    B_r: Optional[DenseMatrix] = None
    V: Tuple[Label, ...] = ()
    A6: Optional[DenseMatrix] = None
    dense_basis: Optional[List[Tuple[int, ...]]] = None
    failure_code: str = "none"
    diagnostics: Dict[str, Any] = dc_field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.failure_code == "none"

    def summary(self) -> Dict[str, Any]:
        out = {
            "n": self.n,
            "m1": self.m1,
            "eta": self.eta,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "r": self.r,
            "delta": self.delta,
            "U0": len(self.U0),
            "U": len(self.U),
            "V": len(self.V),
            "rank_A6": int(rank(self.A6)) if self.A6 is not None else None,
            "dense_basis": [list(u) for u in self.dense_basis] if self.dense_basis else None,
            "failure_code": self.failure_code,
        }
        out.update(self.diagnostics)
        return out


def initial_state(field: Field, dist: ColumnDistribution, n: int, d: float, rng: SeedLike = None) -> ProcessState:
    """A¹: m₁ = round(d·n/k) sütunlu süreç durumu"""
    m1 = int(round(d * n / dist.k))
    return process_matrix(dist, n, m1, rng)


def _infer_dist(matrix: SparseMatrix) -> ColumnDistribution:
    weights = {len(col.rows) for col in matrix.columns}
    if len(weights) != 1:
        raise DimensionError("sütun ağırlıkları sabit değil; dağılım açıkça verilmeli")
    return dist_make(matrix.field, weights.pop(), "uniform")


def _within(col_rows, allowed: set) -> bool:
    return all(r in allowed for r in col_rows)


def _restrict(matrix: SparseMatrix, labels: List[Label], row_index: Dict[int, int]) -> SparseMatrix:
    """Sütunları çekirdek satırlarına (yeniden indekslenmiş) kısıtlar"""
    cols = []
    for label in labels:
        col = matrix.column(label)
        cols.append([(row_index[r], v) for r, v in zip(col.rows, col.values)])
    row_ids = sorted(row_index, key=row_index.get)
    return SparseMatrix.from_columns(matrix.field, len(row_index), cols, labels, row_ids)


def _weight_diagnostics(trace: PipelineTrace, hypergraph: Hypergraph, field: Field) -> None:
    """
    J ⊆ [r], |J| ≤ 3 ve sıfırdan farklı α için Σ α_j b_j ağırlığı (ölçek
    bağımsız olduğundan α_1 = 1) ve H^α_J içinde J dışındaki 1-dereceli
    köşeler.
    """
    first = list(trace.U[: trace.r])
    min_weight = None
    violations = 0
    checked = 0
    for size in range(1, min(WEIGHT_MAX_SET, len(first)) + 1):
        for J in combinations(first, size):
            for tail in product(range(1, field.q), repeat=size - 1):
                alpha = (1,) + tail
                sub = alpha_subgraph(hypergraph, trace.B, J, alpha)
                checked += 1
                min_weight = sub.weight if min_weight is None else min(min_weight, sub.weight)
                violations += len(sub.degree_one_outside())
    n_prime = len(trace.U)
    trace.diagnostics.update(
        weight_min_weight=min_weight,
        weight_threshold=trace.delta * n_prime,
        weight_ok=min_weight is not None and min_weight >= trace.delta * n_prime,
        alpha_subgraphs=checked,
        alpha_violations=violations,
    )
    if not trace.diagnostics["weight_ok"]:
        logger.warning("ağırlık diagnostiği: en küçük ağırlık %s < δn′=%.2f", min_weight, trace.delta * n_prime)


def _s_pattern_hits(a6: DenseMatrix, basis: List[Tuple[int, ...]], k: int) -> Dict[str, int]:
    """A⁶'nın V sütunlarından, yoğun taban koordinatlarında desteği ≤ k olanlar"""
    field = a6.field
    r = a6.n_rows
    u = DenseMatrix(field, np.array(basis, dtype=np.uint8).T)
    coords = matmul(field, invert(u).data, a6.data[:, r:])
    supports = np.count_nonzero(coords, axis=0)
    hits = supports <= k
    distinct = {tuple(int(v) for v in coords[:, j]) for j in np.flatnonzero(hits)}
    return {"s_pattern_hits": int(hits.sum()), "s_pattern_distinct": len(distinct)}


def pipeline_run(
    a1: SparseMatrix,
    params: Optional[PipelineParams] = None,
    dist: Optional[ColumnDistribution] = None,
) -> PipelineTrace:
    """
    Adımlar:
      2. ηn sütun serpiştirilir; desteği çekirdek satırlarında olup A²_U
         span'ında olmayanlar U'ya eklenir (U₀ önce, bir kez karıştırılır).
      3. A″ = A³'ün pivot satırları, B = (A″)⁻¹.
      4. ε₁n sütun daha; desteği çekirdekte olup span'da olanlar V'dir ve
         her biri için y′ − A*Bx′ = 0 sağlanmalı.
      5. U∖[r] büzülür: A⁶ = [I_r | B^{[r]}x′].
    """
    n = a1.n_rows
    params = params or PipelineParams.defaults(n)
    dist = dist or _infer_dist(a1)
    field = a1.field
    rng = make_rng(params.seed)

    pr = two_core(a1)
    if pr.core.n_cols == 0 or pr.core.n_rows == 0:
        raise PipelineError("A¹'in 2-çekirdeği boş", code="empty-core")

    trace = PipelineTrace(n=n, m1=a1.n_cols, eta=params.eta, eps1=params.eps1, r=params.r, delta=params.delta)
    core_rows = set(pr.kept_rows)
    row_index = {r: i for i, r in enumerate(sorted(core_rows))}

    # adım 2
    order = rng.permutation(len(pr.kept_cols))
    u0 = [pr.kept_cols[i] for i in order]
    state = ProcessState(dist, n, a1, rng)
    state = process_extend(state, int(round(params.eta * n)))
    sprinkled = state.matrix.labels[a1.n_cols:]
    candidates = [label for label in sprinkled if _within(state.matrix.column(label).rows, core_rows)]
    trace.diagnostics["step2_sprinkled"] = len(sprinkled)
    trace.diagnostics["step2_in_core"] = len(candidates)

    stage = _restrict(state.matrix, u0 + candidates, row_index)
    _, pivots = eliminate(stage, reduce_all=False)
    pivot_of = {c: r for r, c in pivots}
    if any(j not in pivot_of for j in range(len(u0))):
        trace.failure_code = "dependent-core"
        trace.U0 = tuple(u0)
        logger.info("çekirdek sütunları bağımlı; iz atıldı")
        return trace
    accepted = [j for j in range(stage.n_cols) if j in pivot_of]
    trace.U0 = tuple(u0)
    trace.U = tuple(stage.labels[j] for j in accepted)
    a3 = stage.select(trace.U)
    trace.A3 = a3

    if len(trace.U) < params.r:
        trace.failure_code = "undersized-U"
        return trace

    # adım 3
    dd_rows = [pivot_of[j] for j in accepted]
    dd_set = set(dd_rows)
    star_rows = [i for i in range(a3.n_rows) if i not in dd_set]
    dense3 = a3.to_dense().data
    trace.A_dd = DenseMatrix(field, dense3[dd_rows], tuple(a3.row_ids[i] for i in dd_rows), trace.U)
    trace.A_star = DenseMatrix(field, dense3[star_rows], tuple(a3.row_ids[i] for i in star_rows), trace.U)
    try:
        trace.B = invert(trace.A_dd)
    except SingularMatrixError as exc:
        trace.failure_code = "singular"
        logger.info("A″ tekil (rank %d)", exc.rank)
        return trace
    identity = np.eye(len(trace.U), dtype=np.uint8)
    if not np.array_equal(matmul(field, trace.B.data, trace.A_dd.data), identity):
        raise PipelineError("B·A″ ≠ I", code="inverse-check")
    trace.B_r = DenseMatrix(field, trace.B.data[: params.r], trace.U[: params.r], trace.B.col_labels)
    _weight_diagnostics(trace, hypergraph_of(pr), field)

    # adım 4
    before = state.matrix.n_cols
    state = process_extend(state, int(round(params.eps1 * n)))
    second = state.matrix.labels[before:]
    in_core = [label for label in second if _within(state.matrix.column(label).rows, core_rows)]
    trace.diagnostics["step4_sprinkled"] = len(second)
    trace.diagnostics["step4_in_core"] = len(in_core)

    stage4 = _restrict(state.matrix, list(trace.U) + in_core, row_index)
    u_count = len(trace.U)
    # yalnızca U üzerinde pivotlanır; pivot olmayan satırlarda artığı sıfır kalan aday span'dadır
    reduced4, pivots4 = eliminate(stage4, columns=range(u_count), reduce_all=False)
    free_rows = sorted(set(range(stage4.n_rows)) - {r for r, _ in pivots4})
    members = [
        stage4.labels[j]
        for j in range(u_count, stage4.n_cols)
        if not reduced4[free_rows, j].any()
    ]
    trace.V = tuple(members)
    trace.eps2 = len(members) / n

    dense4 = stage4.to_dense().data
    v_idx = [stage4.index_of(label) for label in in_core]
    x_all = dense4[np.ix_(dd_rows, v_idx)] if v_idx else np.zeros((u_count, 0), dtype=np.uint8)
    y_all = dense4[np.ix_(star_rows, v_idx)] if v_idx else np.zeros((len(star_rows), 0), dtype=np.uint8)
    bx = matmul(field, trace.B.data, x_all) if v_idx else x_all
    predicted = matmul(field, trace.A_star.data, bx) if v_idx and star_rows else np.zeros_like(y_all)
    residual_zero = np.all(y_all == predicted, axis=0) if v_idx else np.zeros(0, dtype=bool)
    member_set = set(members)
    mismatches = sum(1 for pos, label in enumerate(in_core) if bool(residual_zero[pos]) != (label in member_set))
    trace.diagnostics["residual_mismatches"] = mismatches
    if mismatches:
        raise PipelineError(f"{mismatches} serpiştirilmiş sütunda y′ − A*Bx′ span üyeliğiyle uyuşmuyor", code="residual")

    # adım 5
    r = params.r
    member_pos = [in_core.index(label) for label in members]
    tail = bx[:r][:, member_pos] if member_pos else np.zeros((r, 0), dtype=np.uint8)
    a6 = np.concatenate([np.eye(r, dtype=np.uint8), tail], axis=1)
    trace.A6 = DenseMatrix(field, a6, None, trace.U[:r] + trace.V)

    a5 = stage4.select(list(trace.U) + members)
    contracted = contract_rep(a5, trace.U[r:])
    reduced = rref(contracted)
    if reduced.rank != r or not np.array_equal(reduced.rref.data[:r], trace.A6.data):
        raise PipelineError("A⁶, A⁵/(U∖[r]) ile uyuşmuyor", code="contraction-check")
    trace.diagnostics["rank_A6"] = reduced.rank

    trace.dense_basis = dense_basis(trace.B_r, params.delta)
    if trace.dense_basis is not None and members:
        trace.diagnostics.update(_s_pattern_hits(trace.A6, trace.dense_basis, dist.k))
    if params.eps1 * n >= 1 and not members:
        trace.failure_code = "empty-V"
    logger.info(
        "pipeline: |U0|=%d |U|=%d |V|=%d rank(A6)=%d", len(trace.U0), len(trace.U), len(trace.V), reduced.rank
    )
    return trace
