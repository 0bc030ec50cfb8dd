"""
Monte Carlo deney düzeneği

Tek deneme, yoğunluk taraması ve oran başına özet. Tohumlar
(master_seed, oran indeksi, deneme indeksi) üçlüsünden türetilir; denemeler
arasında RNG durumu taşınmaz.
"""

from __future__ import annotations

import csv
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from itertools import groupby
from pathlib import Path
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np
from tqdm import tqdm

from matroidphase.config import settings
from matroidphase.models.schemas import CSV_COLUMNS, SweepConfig, SweepSummaryRow, TrialRecord
from matroidphase.services.gf import field_make
from matroidphase.services.minors import TargetMinor, find_minor, verify_witness
from matroidphase.services.peel import PeelResult, hypergraph_of, rank_via_core, two_core
from matroidphase.services.process import dist_make, process_matrix
from matroidphase.services.spmat import SparseMatrix
from matroidphase.services.tanner import red_diagnostics
from matroidphase.services.thresholds import rank_limit
from matroidphase.utils.rng import child_rng, derive_seed, make_rng

logger = logging.getLogger(__name__)

PARTIAL_MARKER = "# partial: sweep aborted"


def trial_matrix(config: SweepConfig, trial_index: int, ratio_index: int = 0) -> Tuple[SparseMatrix, int]:
    """Denemenin A_m matrisi ve tohumu"""
    seed = derive_seed(config.master_seed, ratio_index, trial_index)
    field = field_make(config.p, config.e)
    dist = dist_make(field, config.k, config.distribution)
    m = int(round(config.ratios[ratio_index] * config.n))
    state = process_matrix(dist, config.n, m, seed)
    return state.matrix, seed


def _diagnostics(pr: PeelResult, rank_value: int, n: int) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "core_row_frac": pr.row_fraction,
        "core_col_frac": pr.col_fraction,
        "rank_frac": rank_value / n,
    }
    if pr.core.n_rows and pr.core.n_cols:
        out.update(red_diagnostics(hypergraph_of(pr)))
    else:
        out.update(red_edges=0, red_fraction=0.0, max_red_component=0)
    return out


def run_trial(config: SweepConfig, trial_index: int, ratio_index: int = 0) -> TrialRecord:
    """
    A_m'yi kurar, rank ve çekirdeği hesaplar, arayıcıyı çalıştırır. Hatalar
    failure_code="error:<tür>" ile kayda geçer, taramayı durdurmaz.
    """
    started = time.perf_counter()
    ratio = config.ratios[ratio_index]
    seed = derive_seed(config.master_seed, ratio_index, trial_index)
    m = int(round(ratio * config.n))
    fields: Dict[str, Any] = dict(
        k=config.k,
        q=config.q,
        n=config.n,
        m=m,
        ratio=ratio,
        seed=seed,
        ratio_index=ratio_index,
        trial_index=trial_index,
        rank=0,
        full_rank=m == 0,
        core_rows=0,
        core_cols=0,
        minor_found=False,
    )

    try:
        field = field_make(config.p, config.e)
        dist = dist_make(field, config.k, config.distribution)
        rng = make_rng(seed)
        matrix = process_matrix(dist, config.n, m, rng).matrix
        pr = two_core(matrix)
        rank_value = rank_via_core(matrix, pr)
        fields.update(
            rank=rank_value,
            full_rank=rank_value == m,
            core_rows=len(pr.kept_rows),
            core_cols=len(pr.kept_cols),
        )

        target = TargetMinor.parse(config.target, field)
        outcome = find_minor(matrix, target, mode=config.finder, budget=config.budget, rng=child_rng(rng))
        code = outcome.failure_code
        if outcome.found:
            verified = None
            if rng.random() < settings.WITNESS_SPOT_CHECK:
                verified = verify_witness(matrix, target, outcome.witness)
                if not verified:
                    logger.error("tanık tekrar oynatmada reddedildi (seed=%d)", seed)
                    code = "witness-rejected"
            fields.update(minor_found=code == "none", witness=outcome.witness.summary(verified))
        fields["failure_code"] = code
        if config.diagnostics:
            fields["diagnostics"] = _diagnostics(pr, rank_value, config.n)
    except Exception as e:
        logger.error("deneme başarısız (oran=%s, deneme=%d)", ratio, trial_index, exc_info=True)
        fields["failure_code"] = f"error:{type(e).__name__}"

    if config.record_time:
        fields["time_ms"] = int((time.perf_counter() - started) * 1000)
    return TrialRecord(**fields)


def _trial_task(config: SweepConfig, indices: Tuple[int, int]) -> TrialRecord:
    ratio_index, trial_index = indices
    return run_trial(config, trial_index, ratio_index)


def sweep_tasks(config: SweepConfig) -> List[Tuple[int, int]]:
    return [(ri, ti) for ri in range(len(config.ratios)) for ti in range(config.trials)]


def _records(config: SweepConfig, threads: int) -> Iterator[TrialRecord]:
    tasks = sweep_tasks(config)
    task = partial(_trial_task, config)
    if threads <= 1 or len(tasks) <= 1:
        yield from map(task, tasks)
        return
    # map sıralı döner; yazıcı tek tüketicidir
    with ProcessPoolExecutor(max_workers=threads) as executor:
        yield from executor.map(task, tasks, chunksize=max(1, len(tasks) // (threads * 4)))


def write_header(handle: TextIO) -> Any:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    return writer


def run_sweep(
    config: SweepConfig,
    threads: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> List[TrialRecord]:
    """
    oranlar × denemeler kaydını (oran, deneme) sırasında CSV olarak yazar.
    Yazma hatasında dosyaya kısmi-dosya işareti eklenip hata yükseltilir.
    """
    threads = settings.THREADS if threads is None else threads
    threads = max(1, min(threads, settings.THREADS))
    total = len(config.ratios) * config.trials
    logger.info("tarama: %d oran × %d deneme, %d işçi", len(config.ratios), config.trials, threads)

    handle = out
    owned = False
    if handle is None and config.output:
        handle = open(config.output, "w", newline="", encoding="utf-8")
        owned = True

    records: List[TrialRecord] = []
    try:
        writer = write_header(handle) if handle is not None else None
        stream = _records(config, threads)
        if settings.PROGRESS:
            stream = tqdm(stream, total=total, desc="sweep", file=sys.stderr)
        for record in stream:
            records.append(record)
            if writer is not None:
                writer.writerow(record.csv_row())
        if handle is not None:
            handle.flush()
    except OSError:
        logger.error("tarama çıktısı yazılamadı; %d kayıt tamamlandı", len(records), exc_info=True)
        if handle is not None:
            try:
                handle.write(f"{PARTIAL_MARKER} after {len(records)} of {total} records\n")
                handle.flush()
            except OSError:
                pass
        raise
    finally:
        if owned:
            handle.close()
    return records


def summarize(records: Iterable[TrialRecord]) -> List[SweepSummaryRow]:
    """Oran başına tek satır: bulunma sıklığı, tam rank sıklığı, ortalama oranlar"""
    ordered = sorted(records, key=lambda r: (r.ratio_index, r.ratio, r.trial_index))
    rows = []
    for (_, ratio), group in groupby(ordered, key=lambda r: (r.ratio_index, r.ratio)):
        batch = list(group)
        found = np.array([r.minor_found for r in batch], dtype=float)
        freq = float(found.mean())
        k, n = batch[0].k, batch[0].n
        rows.append(
            SweepSummaryRow(
                ratio=ratio,
                trials=len(batch),
                found_freq=freq,
                found_stderr=math.sqrt(freq * (1 - freq) / len(batch)),
                full_rank_freq=float(np.mean([r.full_rank for r in batch])),
                mean_rank_frac=float(np.mean([r.rank / n for r in batch])),
                mean_core_row_frac=float(np.mean([r.core_rows / n for r in batch])),
                mean_core_col_frac=float(np.mean([r.core_cols / n for r in batch])),
                predicted_rank_limit=rank_limit(k, k * ratio).limit,
            )
        )
    return rows


def write_summary(rows: Sequence[SweepSummaryRow], path: Union[str, Path]) -> None:
    names = list(SweepSummaryRow.model_fields)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(names)
        for row in rows:
            writer.writerow([getattr(row, name) for name in names])


def load_config(path: Union[str, Path]) -> SweepConfig:
    """SweepConfig alan adlarını taşıyan JSON dosyası"""
    return SweepConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
