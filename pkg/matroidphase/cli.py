"""
Komut satırı arayüzü

stdout yalnızca makine tarafından okunur çıktı (JSON/CSV) taşır, loglar
stderr'e gider. Çıkış kodları: 0 başarı, 1 olumsuz sonuç (minör yok),
2 kullanım hatası (geçersiz parametre ya da hedef dahil), 3 çalışma
zamanı hatası.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from matroidphase import __version__
from matroidphase.config import settings
from matroidphase.models.schemas import DistributionSpec, SweepConfig
from matroidphase.services.experiment import load_config, run_sweep, run_trial, summarize, trial_matrix, write_summary
from matroidphase.services.gf import field_make
from matroidphase.services.matrix_io import format_matrix, read_matrix, write_matrix
from matroidphase.services.minors import TargetMinor, find_minor
from matroidphase.services.peel import rank_via_core, two_core
from matroidphase.services.pipeline import PipelineParams, initial_state, pipeline_run
from matroidphase.services.process import dist_make
from matroidphase.services.thresholds import threshold_report
from matroidphase.utils.errors import MatroidPhaseError, OutOfRangeError, TargetError

logger = logging.getLogger("matroidphase.cli")

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, sort_keys=True) + "\n")


def _distribution(text: str) -> DistributionSpec:
    if text in ("uniform", "all-ones"):
        return DistributionSpec(kind=text)
    try:
        return DistributionSpec.model_validate_json(text)
    except ValidationError as e:
        raise UsageError(f"--distribution: {e}") from e


# --- alt komutlar ---


def cmd_thresholds(args) -> int:
    report = threshold_report(args.k, args.d)
    if args.json:
        sys.stdout.write(report.model_dump_json() + "\n")
    else:
        for name, value in report.model_dump().items():
            if value is not None and name != "tolerances":
                sys.stdout.write(f"{name}\t{value}\n")
    return EXIT_OK


def _simulate_config(args) -> SweepConfig:
    return SweepConfig(
        p=args.p,
        e=args.e,
        k=args.k,
        n=args.n,
        ratios=[args.ratio],
        trials=args.trial + 1,
        target=args.target,
        distribution=_distribution(args.distribution),
        finder=args.mode,
        budget=args.budget,
        master_seed=args.seed,
        diagnostics=args.diagnostics,
        record_time=args.record_time,
    )


def cmd_simulate(args) -> int:
    config = _simulate_config(args)
    record = run_trial(config, args.trial)
    if args.emit_matrix:
        matrix, _ = trial_matrix(config, args.trial)
        write_matrix(args.emit_matrix, matrix)
    sys.stdout.write(record.model_dump_json() + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    if args.output:
        config = config.model_copy(update={"output": args.output})
    out = None if config.output else sys.stdout
    records = run_sweep(config, threads=args.threads, out=out)
    if args.summary:
        write_summary(summarize(records), args.summary)
    logger.info("tarama bitti: %d kayıt", len(records))
    return EXIT_OK


def cmd_peel(args) -> int:
    matrix = read_matrix(args.input)
    pr = two_core(matrix)
    payload = {
        "rows": matrix.n_rows,
        "cols": matrix.n_cols,
        "core_rows": pr.core.n_rows,
        "core_cols": pr.core.n_cols,
        "peeled_cols": len(pr.peeled_cols),
        "rank": rank_via_core(matrix, pr),
    }
    if args.output:
        write_matrix(args.output, pr.core)
    elif args.print_core:
        payload["core"] = format_matrix(pr.core)
    _emit(payload)
    return EXIT_OK


def cmd_find_minor(args) -> int:
    matrix = read_matrix(args.input)
    target = TargetMinor.parse(args.target, matrix.field)
    outcome = find_minor(matrix, target, mode=args.mode, budget=args.budget, rng=args.seed)
    payload = {
        "target": target.name,
        "found": outcome.found,
        "failure_code": outcome.failure_code,
        "attempts": outcome.attempts,
        "witness": outcome.witness.summary(True).model_dump() if outcome.found else None,
    }
    _emit(payload)
    return EXIT_OK if outcome.found else EXIT_NEGATIVE


def cmd_pipeline(args) -> int:
    if args.input:
        a1 = read_matrix(args.input)
        dist = None
        n = a1.n_rows
    else:
        field = field_make(args.p, args.e)
        dist = dist_make(field, args.k, _distribution(args.distribution))
        n = args.n
        a1 = initial_state(field, dist, n, args.d, args.seed).matrix
    params = PipelineParams.defaults(n, seed=args.seed, r=args.r, delta=args.delta, eta=args.eta, eps1=args.eps1)
    trace = pipeline_run(a1, params, dist)
    _emit(trace.summary())
    return EXIT_OK


# --- ayrıştırıcı ---


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS, help="log ayrıntısı (-v INFO, -vv DEBUG)")
    common.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return common


def _field_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, default=2, help="cisim karakteristiği")
    parser.add_argument("--e", type=int, default=1, help="genişleme derecesi (q = p^e)")
    parser.add_argument("--k", type=int, default=3, help="sütun desteği")
    parser.add_argument("--distribution", default="uniform", help="uniform, all-ones ya da DistributionSpec JSON")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="matroidphase", description=settings.APP_NAME, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("thresholds", parents=[common], help="d*_k, d_k ve türev sabitler")
    p.add_argument("--k", type=int, required=True, help="sütun desteği (tamsayı, ≥ 2)")
    p.add_argument("--d", type=float, default=None, help="yoğunluk d = k·m/n")
    p.add_argument("--json", action="store_true", help="JSON çıktı")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("simulate", parents=[common], help="tek deneme, TrialRecord JSON")
    _field_args(p)
    p.add_argument("--n", type=int, required=True, help="satır sayısı")
    p.add_argument("--ratio", type=float, required=True, help="m/n")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="ana tohum")
    p.add_argument("--trial", type=int, default=0, help="deneme indeksi")
    p.add_argument("--target", default="u23", help="u23, pg:t:q ya da file:N.mat")
    p.add_argument("--mode", choices=["random", "brute"], default="random", help="arama modu")
    p.add_argument("--budget", type=int, default=settings.FINDER_BUDGET, help="rastgele arama bütçesi")
    p.add_argument("--diagnostics", action="store_true", help="kırmızı kenar ve çekirdek diagnostikleri")
    p.add_argument("--record-time", action="store_true", help="time_ms alanını doldur")
    p.add_argument("--emit-matrix", default=None, help="A_m'yi matris formatında yaz")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", parents=[common], help="oran taraması, CSV")
    p.add_argument("--config", required=True, help="SweepConfig JSON dosyası")
    p.add_argument("--output", default=None, help="CSV yolu (yoksa stdout)")
    p.add_argument("--threads", type=int, default=None, help="işçi sayısı (MATROIDPHASE_THREADS ile sınırlı)")
    p.add_argument("--summary", default=None, help="oran başına özet CSV yolu")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("peel", parents=[common], help="2-çekirdek boyutları")
    p.add_argument("--input", required=True, help="matris dosyası")
    p.add_argument("--output", default=None, help="çekirdeği matris formatında yaz")
    p.add_argument("--print-core", action="store_true", help="çekirdeği JSON içinde döndür")
    p.set_defaults(func=cmd_peel)

    p = sub.add_parser("find-minor", parents=[common], help="minör arama, JSON tanık")
    p.add_argument("--input", required=True, help="matris dosyası")
    p.add_argument("--target", default="u23", help="u23, pg:t:q ya da file:N.mat")
    p.add_argument("--mode", choices=["random", "brute"], default="random", help="arama modu")
    p.add_argument("--budget", type=int, default=settings.FINDER_BUDGET, help="rastgele arama bütçesi")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="tohum")
    p.set_defaults(func=cmd_find_minor)

    p = sub.add_parser("pipeline", parents=[common], help="süper-kritik boru hattı izi, JSON")
    _field_args(p)
    p.add_argument("--n", type=int, default=2000, help="satır sayısı")
    p.add_argument("--d", type=float, default=2.6, help="A¹ yoğunluğu")
    p.add_argument("--input", default=None, help="A¹'i dosyadan oku")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="tohum")
    p.add_argument("--r", type=int, default=None, help="korunan U sütunu sayısı")
    p.add_argument("--delta", type=float, default=None, help="yoğun taban eşiği")
    p.add_argument("--eta", type=float, default=None, help="ilk serpiştirme oranı")
    p.add_argument("--eps1", type=float, default=None, help="ikinci serpiştirme oranı")
    p.set_defaults(func=cmd_pipeline)
    return parser


def _configure_logging(verbose: int) -> None:
    level = getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING)
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    verbose = getattr(args, "verbose", 0)
    _configure_logging(verbose)
    try:
        return args.func(args)
    except (UsageError, ValidationError, OutOfRangeError, TargetError) as e:
        sys.stderr.write(f"{parser.prog}: error: {e}\n")
        return EXIT_USAGE
    except (MatroidPhaseError, OSError) as e:
        logger.error("%s: %s", type(e).__name__, e, exc_info=verbose >= 2)
        return EXIT_RUNTIME
    except Exception as e:
        logger.error("beklenmeyen hata: %s: %s", type(e).__name__, e, exc_info=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
