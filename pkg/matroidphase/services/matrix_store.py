"""
HTTP yüzeyi için bellek içi matris deposu ve servis
"""

import logging
import uuid
from dataclasses import dataclass, field
from typing import Dict, Optional

from matroidphase.services.matrix_io import parse_matrix
from matroidphase.services.minors import FinderOutcome, TargetMinor, find_minor
from matroidphase.services.peel import PeelResult, rank_via_core, two_core
from matroidphase.services.spmat import SparseMatrix

logger = logging.getLogger(__name__)


@dataclass
class StoredMatrix:
    name: str
    matrix: SparseMatrix
    peel: Optional[PeelResult] = None
    rank: Optional[int] = None
    meta: Dict[str, str] = field(default_factory=dict)


# Oturum deposu
MATRIX_DB: Dict[str, StoredMatrix] = {}


class MatrixService:
    def __init__(self, store: Optional[Dict[str, StoredMatrix]] = None):
        self.store = MATRIX_DB if store is None else store

    def add_text(self, text: str, name: str = "upload") -> str:
        """Metni çözüp depoya ekler; MatrixFormatError yukarı iletilir"""
        matrix = parse_matrix(text)
        mat_id = str(uuid.uuid4())
        self.store[mat_id] = StoredMatrix(name=name, matrix=matrix)
        logger.info("matris eklendi: %s (%dx%d)", mat_id, matrix.n_rows, matrix.n_cols)
        return mat_id

    def get(self, mat_id: str) -> StoredMatrix:
        return self.store[mat_id]

    def peel(self, mat_id: str) -> StoredMatrix:
        entry = self.store[mat_id]
        # çekirdek ve rank ilk istekte hesaplanıp saklanır
        if entry.peel is None:
            entry.peel = two_core(entry.matrix)
            entry.rank = rank_via_core(entry.matrix, entry.peel)
        return entry

    def find(self, mat_id: str, target: str, mode: str, budget: int, seed: int) -> FinderOutcome:
        entry = self.store[mat_id]
        goal = TargetMinor.parse(target, entry.matrix.field)
        return find_minor(entry.matrix, goal, mode=mode, budget=budget, rng=seed)

    def __len__(self) -> int:
        return len(self.store)
