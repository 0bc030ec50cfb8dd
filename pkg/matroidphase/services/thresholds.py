"""
Eşik sabitleri: ρ_{k,d}, d_k, d_k*, rank limiti, çekirdek oranları, f/μ/β_k

Tüm transandantal ifadeler 0 civarında expm1/log1p biçimleriyle hesaplanır.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from matroidphase.config import settings
from matroidphase.models.schemas import RankLimitResult, ThresholdReport
from matroidphase.utils.errors import OutOfRangeError, ThresholdError

logger = logging.getLogger(__name__)

_EPS = np.finfo(float).eps
SMALL_RHO = 1e-3
# d_k için tekil işaret değişimi kontrolünde kullanılan kaba ızgara adımı
SIGN_GRID_STEP = 1e-2


def _check_k(k: int, minimum: int = 2) -> int:
    if int(k) != k or k < minimum:
        raise OutOfRangeError(f"k={k}; en az {minimum} olan bir tamsayı olmalı")
    return int(k)


def _check_d(d: float) -> float:
    if not d >= 0 or math.isinf(d):
        raise OutOfRangeError(f"d={d}; sonlu ve negatif olmayan bir sayı olmalı")
    return float(d)


def _fixed_point_sign(x, k: int, d: float):
    """x > 0 için x − (1 − e^{−d x^{k−1}}) ile aynı işaretli ifade"""
    return 1.0 + np.expm1(-d * np.power(x, k - 1)) / x


def rho(k: int, d: float) -> float:
    """
    ρ_{k,d}: [0,1] içindeki en büyük sabit nokta.

    x=1'den aşağı doğru 1e-4 adımla işaret değişimi aranır, sonra brentq ile
    daraltılır. Doğrusal ızgarada değişim yoksa 0'a doğru geometrik bir
    kuyruk taranır (k=2, d≳1 durumunda kök çok küçüktür).
    """
    k = _check_k(k)
    d = _check_d(d)
    if d == 0:
        return 0.0

    step = settings.THRESHOLD_GRID_STEP
    n_steps = int(round(1.0 / step))
    xs = 1.0 - step * np.arange(n_steps)
    vals = _fixed_point_sign(xs, k, d)
    neg = np.flatnonzero(vals <= 0)
    if neg.size:
        i = int(neg[0])
        lo, hi = xs[i], xs[i - 1]
    else:
        tail = step * np.power(10.0, -np.arange(1, 1201) / 4.0)
        vals = _fixed_point_sign(tail, k, d)
        neg = np.flatnonzero(vals <= 0)
        if not neg.size:
            return 0.0
        i = int(neg[0])
        lo, hi = tail[i], (tail[i - 1] if i else xs[-1])

    f_lo = float(_fixed_point_sign(lo, k, d))
    if f_lo == 0.0:
        return float(lo)
    root = brentq(lambda x: float(_fixed_point_sign(x, k, d)), lo, hi, xtol=1e-300, rtol=4 * _EPS, maxiter=500)
    return float(root)


def fixed_point_residual(k: int, d: float, x: float) -> float:
    return abs(x - (-math.expm1(-d * x ** (k - 1))))


def core_surplus(k: int, d: float, rho_value: Optional[float] = None) -> float:
    """ρ − dρ^{k−1} + (1 − 1/k)dρ^k"""
    r = rho(k, d) if rho_value is None else rho_value
    return r - d * r ** (k - 1) + (1.0 - 1.0 / k) * d * r**k


def _surplus_over_rho_small(k: int, r: float) -> float:
    """
    Çekirdek fazlası / ρ, sabit nokta özdeşliği d = −log(1−ρ)/ρ^{k−1} ile, küçük ρ için
    seri açılımıyla (k=2 yakınında sadeleşme olur).
    """
    s = 0.0
    term = 1.0
    for j in range(1, 40):
        term *= r
        s += term / (j + 1)
        if term / (j + 1) < 1e-30 * max(s, 1e-300):
            break
    log_term = r * (1.0 + s)
    return (1.0 - 1.0 / k) * log_term - s


def _surplus_negative(k: int, d: float) -> bool:
    r = rho(k, d)
    if r == 0.0:
        return False
    if r < SMALL_RHO:
        return _surplus_over_rho_small(k, r) < 0
    return core_surplus(k, d, r) < 0


def _bisect(predicate, lo: float, hi: float, width: float) -> Tuple[float, float]:
    while hi - lo >= width:
        mid = 0.5 * (lo + hi)
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


@dataclass(frozen=True)
class DkBracket:
    k: int
    d_star_lo: float
    d_star_hi: float
    d_k_lo: float
    d_k_hi: float

    @property
    def d_star(self) -> float:
        return self.d_star_hi

    @property
    def d_k(self) -> float:
        return self.d_k_hi


@lru_cache(maxsize=None)
def dk_bracket(k: int) -> DkBracket:
    """d_k* ve d_k için dış ikiye bölme aralıkları"""
    k = _check_k(k)
    width = settings.THRESHOLD_BRACKET_WIDTH / 2

    def core_exists(d: float) -> bool:
        return rho(k, d) > 0

    hi = 1.0
    while not core_exists(hi):
        hi *= 2.0
    star_lo, star_hi = _bisect(core_exists, 0.0 if hi == 1.0 else hi / 2.0, hi, width)

    def negative(d: float) -> bool:
        return _surplus_negative(k, d)

    hi = max(star_hi, 1.0)
    while not negative(hi):
        hi *= 2.0
        if hi > 1e6:
            raise ThresholdError(f"k={k} için çekirdek fazlasının negatif olduğu bölge bulunamadı")
    k_lo, k_hi = _bisect(negative, star_lo, hi, width)

    _check_single_sign_change(k, star_hi, 2.0 * k_hi + 1.0, negative)
    logger.info("k=%d: d*=%.10f d_k=%.10f", k, star_hi, k_hi)
    return DkBracket(k, star_lo, star_hi, k_lo, k_hi)


def _check_single_sign_change(k: int, lo: float, hi: float, negative) -> None:
    grid = np.arange(lo, hi, SIGN_GRID_STEP)
    signs = np.array([negative(float(d)) for d in grid], dtype=bool)
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    if changes > 1:
        raise ThresholdError(f"k={k}: çekirdek fazlası {changes} kez işaret değiştiriyor")


def dk(k: int) -> Tuple[float, float]:
    """(d_k*, d_k)"""
    bracket = dk_bracket(k)
    return bracket.d_star, bracket.d_k


def rank_limit(k: int, d: float) -> RankLimitResult:
    k = _check_k(k, minimum=1)
    d = _check_d(d)

    def objective(a):
        a = np.asarray(a, dtype=float)
        return np.exp(-d * np.power(a, k - 1)) - (d / k) * (1.0 - k * np.power(a, k - 1) + (k - 1) * np.power(a, k))

    step = settings.THRESHOLD_GRID_STEP
    alphas = np.linspace(0.0, 1.0, int(round(1.0 / step)) + 1)
    vals = objective(alphas)
    i = int(np.argmax(vals))
    best_a, best = float(alphas[i]), float(vals[i])
    if 0 < i < alphas.size - 1:
        res = minimize_scalar(
            lambda a: -float(objective(a)),
            bounds=(float(alphas[i - 1]), float(alphas[i + 1])),
            method="bounded",
            options={"xatol": 1e-12},
        )
        if -res.fun > best:
            best_a, best = float(res.x), float(-res.fun)

    at_zero = float(objective(0.0))
    if at_zero >= best - 1e-15:
        best_a, best = 0.0, at_zero
    if best_a == 0.0 and k >= 2:
        limit = d / k
    else:
        limit = 1.0 - best
    limit = min(max(limit, 0.0), min(1.0, d / k))
    return RankLimitResult(k=k, d=d, limit=limit, alpha_star=best_a)


def _expm1_minus_x(x: float) -> float:
    """e^x − 1 − x, küçük x için seriyle"""
    if abs(x) < 1e-2:
        term = x * x / 2.0
        total = term
        for j in range(3, 12):
            term *= x / j
            total += term
        return total
    return math.expm1(x) - x


def f(x: float) -> float:
    """f(x) = x(e^x − 1)/(e^x − 1 − x); x→0⁺ iken 2'ye gider"""
    if x <= 0:
        raise OutOfRangeError(f"f yalnızca x>0 için tanımlı (x={x})")
    return x * math.expm1(x) / _expm1_minus_x(x)


def mu_of(c: float) -> float:
    """f(μ) = c denkleminin pozitif kökü (c > 2)"""
    if not c > 2:
        raise OutOfRangeError(f"c={c}; f(μ)=c yalnızca c>2 için çözülebilir")
    lo = min(1e-6, c - 2.0)
    return float(brentq(lambda x: f(x) - c, lo, float(c), xtol=1e-15, rtol=4 * _EPS, maxiter=500))


def _truncated_poisson_two(lam: float) -> float:
    return (lam * lam / 2.0) / _expm1_minus_x(lam)


def beta(k: int) -> float:
    k = _check_k(k, minimum=3)
    return _truncated_poisson_two(mu_of(k))


def core_sizes(k: int, d: float) -> Tuple[float, float]:
    """(satır oranı, sütun oranı), ikisi de n'e göre"""
    k = _check_k(k)
    d = _check_d(d)
    r = rho(k, d)
    if r == 0.0:
        return 0.0, 0.0
    rows = r - d * r ** (k - 1) + d * r**k
    cols = d * r**k / k
    return rows, cols


def core_density(k: int, d: float) -> float:
    """π_k(d) = sütun/satır; çekirdek yoksa 0"""
    rows, cols = core_sizes(k, d)
    return cols / rows if rows > 0 else 0.0


def core_row_lambda(k: int, d: float) -> float:
    """Çekirdek satır derecelerinin (kesik) Poisson parametresi λ = dρ^{k−1}"""
    r = rho(k, d)
    return d * r ** (k - 1)


def red_fraction(k: int, d: float) -> float:
    """Çekirdek satırlarından 2-kenar olanların beklenen oranı; d=d_k iken β_k"""
    lam = core_row_lambda(k, d)
    if lam == 0.0:
        return 0.0
    return _truncated_poisson_two(lam)


def edge_size_pmf(k: int, d: float, size: int) -> float:
    """P(kenar boyu = size), size ≥ 2"""
    if size < 2:
        return 0.0
    lam = core_row_lambda(k, d)
    if lam == 0.0:
        return 0.0
    log_p = size * math.log(lam) - math.lgamma(size + 1) - math.log(_expm1_minus_x(lam))
    return math.exp(log_p)


def threshold_report(k: int, d: Optional[float] = None) -> ThresholdReport:
    k = _check_k(k)
    bracket = dk_bracket(k)
    report = dict(
        k=k,
        d=d,
        d_star=bracket.d_star,
        d_k=bracket.d_k,
        ratio=bracket.d_k / k,
        d_star_bracket=(bracket.d_star_lo, bracket.d_star_hi),
        d_k_bracket=(bracket.d_k_lo, bracket.d_k_hi),
        tolerances={
            "grid_step": settings.THRESHOLD_GRID_STEP,
            "bracket_width": settings.THRESHOLD_BRACKET_WIDTH,
            "fixed_point_residual": 1e-12,
        },
    )
    if k >= 3:
        report["mu"] = mu_of(k)
        report["beta"] = beta(k)
    if d is not None:
        r = rho(k, d)
        rows, cols = core_sizes(k, d)
        report.update(
            rho=r,
            core_row_frac=rows,
            core_col_frac=cols,
            pi=cols / rows if rows > 0 else 0.0,
            rank_limit=rank_limit(k, d).limit,
            red_fraction=red_fraction(k, d),
        )
    return ThresholdReport(**report)
