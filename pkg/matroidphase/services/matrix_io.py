"""
Matris metin formatı (matroidphase-mat v1)

    matroidphase-mat v1 q=<q> p=<p> e=<e> rows=<n> cols=<m>
    <sütun 1: "satır:değer" çiftleri, satırlar 1'den başlar>
    ...
Boş satır sıfır sütundur.
"""

import logging
import re
from pathlib import Path
from typing import Union

from matroidphase.services.gf import field_make
from matroidphase.services.spmat import SparseMatrix
from matroidphase.utils.errors import FieldError, MatrixFormatError

logger = logging.getLogger(__name__)

MAGIC = "matroidphase-mat"
VERSION = "v1"
_HEADER = re.compile(
    r"^matroidphase-mat\s+v1\s+q=(\d+)\s+p=(\d+)\s+e=(\d+)\s+rows=(\d+)\s+cols=(\d+)\s*$"
)


def format_matrix(matrix: SparseMatrix) -> str:
    field = matrix.field
    lines = [f"{MAGIC} {VERSION} q={field.q} p={field.p} e={field.e} rows={matrix.n_rows} cols={matrix.n_cols}"]
    for col in matrix.columns:
        lines.append(" ".join(f"{r + 1}:{v}" for r, v in zip(col.rows, col.values)))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, allow_zero_columns: bool = True) -> SparseMatrix:
    """Metni SparseMatrix'e çevirir; hatalı girdide MatrixFormatError fırlatır"""
    lines = text.split("\n")
    header = _HEADER.match(lines[0].strip()) if lines else None
    if header is None:
        raise MatrixFormatError("başlık satırı 'matroidphase-mat v1 q= p= e= rows= cols=' biçiminde değil")
    q, p, e, n_rows, n_cols = (int(g) for g in header.groups())
    try:
        field = field_make(p, e)
    except FieldError as exc:
        raise MatrixFormatError(f"geçersiz cisim: {exc}") from exc
    if field.q != q:
        raise MatrixFormatError(f"q={q} ile p^e={field.q} uyuşmuyor")

    body = lines[1:]
    if len(body) < n_cols:
        raise MatrixFormatError(f"{n_cols} sütun bekleniyordu, {len(body)} satır var")
    extra = [ln for ln in body[n_cols:] if ln.strip()]
    if extra:
        raise MatrixFormatError(f"beklenenden fazla sütun satırı ({len(extra)})")

    columns = []
    for j, line in enumerate(body[:n_cols]):
        tokens = line.split()
        if not tokens and not allow_zero_columns:
            raise MatrixFormatError(f"sütun {j + 1} sıfır sütun")
        pairs = []
        for tok in tokens:
            try:
                r_str, v_str = tok.split(":")
                r, v = int(r_str), int(v_str)
            except ValueError:
                raise MatrixFormatError(f"sütun {j + 1}: '{tok}' çözümlenemedi") from None
            if not 1 <= r <= n_rows:
                raise MatrixFormatError(f"sütun {j + 1}: satır {r} aralık dışında")
            if not 1 <= v < q:
                raise MatrixFormatError(f"sütun {j + 1}: değer {v} 1..{q - 1} aralığında değil")
            pairs.append((r - 1, v))
        rows = [r for r, _ in pairs]
        if rows != sorted(set(rows)):
            raise MatrixFormatError(f"sütun {j + 1}: satırlar kesin artan olmalı")
        columns.append(pairs)
    return SparseMatrix.from_columns(field, n_rows, columns)


def read_matrix(path: Union[str, Path], allow_zero_columns: bool = True) -> SparseMatrix:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Dosya bulunamadı: {path}")
    try:
        # BOM varsa atılır
        text = path.read_text(encoding="utf-8-sig")
    except UnicodeDecodeError as e:
        logger.error("matris dosyası UTF-8 değil: %s", path, exc_info=True)
        raise MatrixFormatError(f"{path}: UTF-8 olarak çözülemedi (bayt {e.start})") from e
    logger.info("matris okunuyor: %s", path)
    return parse_matrix(text, allow_zero_columns=allow_zero_columns)


def write_matrix(path: Union[str, Path], matrix: SparseMatrix) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_matrix(matrix), encoding="utf-8")
    logger.info("matris yazıldı: %s (%dx%d)", path, matrix.n_rows, matrix.n_cols)
