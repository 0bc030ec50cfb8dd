"""
GF(q) aritmetiği (q = p^e <= 256)

Elemanlar kanonik tamsayı kodlamasıyla tutulur: c0 + c1*p + ... + c_{e-1}*p^{e-1}
polinomu Σ c_i X^i'yi temsil eder. Genişleme cisimleri sabit Conway
polinomlarıyla kurulur, böylece dosya formatları ve test vektörleri her
ortamda aynı kalır.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Tuple, Union

import numpy as np

from matroidphase.utils.errors import (
    FieldDivisionError,
    FieldError,
    FieldMismatchError,
)

logger = logging.getLogger(__name__)

MAX_ORDER = 256

# (p, e) -> katsayılar, sabit terimden başlayarak (monik)
CONWAY_POLYNOMIALS: Dict[Tuple[int, int], Tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (2, 6): (1, 1, 0, 1, 1, 0, 1),
    (2, 7): (1, 1, 0, 0, 0, 0, 0, 1),
    (2, 8): (1, 0, 1, 1, 1, 0, 0, 0, 1),
    (3, 2): (2, 2, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 0, 0, 2, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (5, 2): (2, 4, 1),
    (5, 3): (3, 3, 0, 1),
    (7, 2): (3, 6, 1),
    (11, 2): (2, 7, 1),
    (13, 2): (2, 12, 1),
}


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


class Field:
    """
    Sonlu cisim GF(p^e).

    Toplama, çarpma, negatif ve ters tabloları numpy dizileri olarak tutulur;
    matris katmanı bunları vektörel indeksleme ile kullanır.
    """

    def __init__(self, p: int, e: int):
        if not isinstance(p, (int, np.integer)) or not _is_prime(int(p)):
            raise FieldError(f"p={p} asal değil")
        if e < 1:
            raise FieldError(f"e={e} en az 1 olmalı")
        if p**e > MAX_ORDER:
            raise FieldError(f"q={p}^{e} desteklenen {MAX_ORDER} sınırını aşıyor")

        self.p = int(p)
        self.e = int(e)
        self.q = self.p**self.e
        self.reduction_poly: Tuple[int, ...] = CONWAY_POLYNOMIALS.get((self.p, self.e), ())
        self.exp_table = None
        self.log_table = None

        self._powers = np.array([self.p**i for i in range(self.e)], dtype=np.int64)
        self._digits = np.array([self.decode(v) for v in range(self.q)], dtype=np.int64).reshape(self.q, self.e)
        self._build_tables()

    # --- kodlama ---

    def encode(self, coeffs) -> int:
        """Katsayı dizisini (sabit terim önce) kanonik tamsayıya çevirir"""
        if len(coeffs) > self.e:
            raise FieldError(f"{len(coeffs)} katsayı, derece {self.e} için fazla")
        value = 0
        for i, c in enumerate(coeffs):
            if not 0 <= c < self.p:
                raise FieldError(f"katsayı {c} GF({self.p}) dışında")
            value += int(c) * self.p**i
        return value

    def decode(self, value: int) -> Tuple[int, ...]:
        self._check(value)
        out = []
        for _ in range(self.e):
            out.append(value % self.p)
            value //= self.p
        return tuple(out)

    # --- tablolar ---

    def _times_x(self, coeffs: np.ndarray) -> np.ndarray:
        carry = coeffs[-1]
        shifted = np.concatenate(([0], coeffs[:-1]))
        poly = np.array(self.reduction_poly[:-1], dtype=np.int64)
        return (shifted - carry * poly) % self.p

    def _build_tables(self) -> None:
        q, p = self.q, self.p
        digits = self._digits
        summed = (digits[:, None, :] + digits[None, :, :]) % p
        self.add_table = (summed @ self._powers).astype(np.uint8)
        self.neg_table = (((-digits) % p) @ self._powers).astype(np.uint8)

        if self.e == 1:
            a = np.arange(q, dtype=np.int64)
            self.mul_table = ((a[:, None] * a[None, :]) % p).astype(np.uint8)
            inv = np.zeros(q, dtype=np.uint8)
            for v in range(1, q):
                inv[v] = pow(v, p - 2, p)
            self.inv_table = inv
            return

        exp = np.zeros(q - 1, dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        cur = np.zeros(self.e, dtype=np.int64)
        cur[0] = 1
        for i in range(q - 1):
            enc = int(cur @ self._powers)
            if log[enc] != -1:
                raise FieldError(
                    f"GF({q}) indirgeme polinomu {self.reduction_poly} primitif değil"
                )
            exp[i] = enc
            log[enc] = i
            cur = self._times_x(cur)
        if int(cur @ self._powers) != 1:
            raise FieldError(f"GF({q}) üstel tablosu 1'e dönmedi")

        self.exp_table = exp.astype(np.uint8)
        self.log_table = log
        mul = np.zeros((q, q), dtype=np.uint8)
        logs = log[1:]
        mul[1:, 1:] = exp[(logs[:, None] + logs[None, :]) % (q - 1)]
        self.mul_table = mul
        inv = np.zeros(q, dtype=np.uint8)
        inv[1:] = exp[(-logs) % (q - 1)]
        self.inv_table = inv

    # --- tamsayı düzeyinde aritmetik ---

    def _check(self, value: int) -> None:
        if not 0 <= value < self.q:
            raise FieldError(f"{value} GF({self.q}) kodlaması değil")

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldDivisionError(f"GF({self.q}) içinde 0'ın tersi yok")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def power(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        result = 1
        while n:
            if n & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            n >>= 1
        return result

    def elem(self, value: int) -> "Elem":
        return Elem(self, int(value))

    def __eq__(self, other) -> bool:
        return isinstance(other, Field) and (self.p, self.e) == (other.p, other.e)

    def __hash__(self) -> int:
        return hash((self.p, self.e))

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __reduce__(self):
        return (field_make, (self.p, self.e))


@lru_cache(maxsize=None)
def field_make(p: int, e: int = 1) -> Field:
    """GF(p^e) nesnesini (önbellekli) döndürür"""
    field = Field(p, e)
    logger.debug("%r kuruldu (indirgeme=%s)", field, field.reduction_poly or "mod p")
    return field


def field_of_order(q: int) -> Field:
    """q = p^e mertebeli cisim; q asal kuvvet değilse FieldError"""
    q = int(q)
    for p in range(2, q + 1):
        if q % p == 0:
            e, rest = 0, q
            while rest % p == 0:
                rest //= p
                e += 1
            if rest != 1:
                raise FieldError(f"q={q} bir asal kuvveti değil")
            return field_make(p, e)
    raise FieldError(f"q={q} bir asal kuvveti değil")


@dataclass(frozen=True)
class Elem:
    field: Field
    value: int

    def __post_init__(self):
        self.field._check(self.value)

    def _same(self, other: "Elem") -> None:
        if not isinstance(other, Elem):
            raise FieldMismatchError(f"{other!r} bir cisim elemanı değil")
        if other.field != self.field:
            raise FieldMismatchError(f"{self.field!r} ile {other.field!r} karıştırılamaz")

    def __add__(self, other: "Elem") -> "Elem":
        self._same(other)
        return Elem(self.field, self.field.add(self.value, other.value))

    def __sub__(self, other: "Elem") -> "Elem":
        self._same(other)
        return Elem(self.field, self.field.sub(self.value, other.value))

    def __neg__(self) -> "Elem":
        return Elem(self.field, self.field.neg(self.value))

    def __mul__(self, other: "Elem") -> "Elem":
        return fe_mul(self, other)

    def __truediv__(self, other: "Elem") -> "Elem":
        return fe_mul(self, fe_inv(other))

    def __pow__(self, n: int) -> "Elem":
        return Elem(self.field, self.field.power(self.value, n))

    def inverse(self) -> "Elem":
        return fe_inv(self)

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value}@GF({self.field.q})"


def fe_mul(a: Elem, b: Elem) -> Elem:
    a._same(b)
    return Elem(a.field, a.field.mul(a.value, b.value))


def fe_inv(a: Elem) -> Elem:
    return Elem(a.field, a.field.inv(a.value))


ElemLike = Union[Elem, int]


def as_value(field: Field, x: ElemLike) -> int:
    """Elem veya tamsayıyı kanonik koda çevirir; cisim uyuşmazlığını yakalar"""
    if isinstance(x, Elem):
        if x.field != field:
            raise FieldMismatchError(f"{x.field!r} elemanı {field!r} içinde kullanılamaz")
        return x.value
    value = int(x)
    field._check(value)
    return value
