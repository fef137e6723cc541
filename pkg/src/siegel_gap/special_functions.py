"""Riemann zeta and real-character L-functions in the right half-plane.

Two evaluation routes are provided:

* scalar, arbitrary precision (mpmath): the accelerated alternating eta
  series for ``zeta`` near the real axis, and Euler-Maclaurin summation over
  residue classes (Hurwitz decomposition) for everything else;
* vectorized, double precision (numpy): the same Euler-Maclaurin formulas
  applied to whole arrays of points on a vertical line, for quadrature.

Every value comes with a truncation bound.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .characters import RealPrimitiveCharacter
from .reports import INCONCLUSIVE, PASS, LemmaReport

DEFAULT_DPS = 30
ETA_MAX_IMAG = 40.0


class PoleError(ValueError):
    pass


class DomainError(ValueError):
    pass


class CutoffTooSmall(ValueError):
    """A truncation parameter cannot meet the requested error; carries the required value."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


@dataclass
class EvalResult:
    value: object
    error_bound: float
    heuristic: bool = False
    method: str = ""

    def __complex__(self):
        return complex(self.value)


# ---------------------------------------------------------------------------
# scalar evaluation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _bernoulli_fraction(k2: int) -> Fraction:
    num, den = mpmath.bernfrac(k2)
    return Fraction(int(num), int(den) * math.factorial(k2))


def _bernoulli_over_factorial(k2: int) -> mpmath.mpf:
    """``B_{k2} / k2!`` at the current working precision."""
    f = _bernoulli_fraction(k2)
    return mpmath.mpf(f.numerator) / f.denominator


@lru_cache(maxsize=64)
def _borwein_d(n: int) -> Tuple[int, ...]:
    d = []
    acc = 0
    for i in range(n + 1):
        num = n * math.factorial(n + i - 1) * 4**i
        den = math.factorial(n - i) * math.factorial(2 * i)
        acc += num // den
        d.append(acc)
    return tuple(d)


def _check_zeta_arg(s) -> mpmath.mpc:
    s = mpmath.mpc(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real <= 0:
        raise DomainError("zeta evaluation requires Re s > 0")
    return s


def zeta_eta(s, dps: int = DEFAULT_DPS) -> EvalResult:
    """``zeta(s)`` from the alternating series with Borwein's binomial-weighted acceleration.

    The remainder bound is ``3 (1 + 2|t|) e^{pi|t|/2} / ((3 + sqrt 8)^n |Gamma(s)| |1 - 2^{1-s}|)``.
    """
    s = _check_zeta_arg(s)
    t = abs(float(s.imag))
    guard = int(0.7 * t) + 10
    with mpmath.workdps(dps + guard):
        one_minus = 1 - mpmath.power(2, 1 - s)
        log_pref = (mpmath.log(3 * (1 + 2 * t)) + mpmath.pi * t / 2
                    - mpmath.log(abs(mpmath.gamma(s))) - mpmath.log(abs(one_minus)))
        rate = mpmath.log(3 + mpmath.sqrt(8))
        target = (dps + 2) * mpmath.log(10)
        n = max(8, int(mpmath.ceil((log_pref + target) / rate)))
        d = _borwein_d(n)
        dn = d[n]
        acc = mpmath.mpc(0)
        for k in range(n):
            term = (d[k] - dn) / mpmath.power(k + 1, s)
            acc += term if k % 2 == 0 else -term
        value = -acc / (dn * one_minus)
        bound = mpmath.exp(log_pref - n * rate)
    with mpmath.workdps(dps):
        value = +value
    if s.imag == 0:
        value = value.real
    return EvalResult(value, float(bound), method=f"eta-borwein(n={n})")


def _em_correction(s, x, order: int, log_form: bool = False):
    """Euler-Maclaurin tail of ``sum_{m >= 0} (x + m)^{-s}`` and its remainder bound."""
    xs = mpmath.power(x, -s)
    if log_form:
        head = -mpmath.log(x)
    else:
        head = x * xs / (s - 1)
    total = head + xs / 2
    poch = s
    xpow = xs / x
    for k in range(1, order + 1):
        total += _bernoulli_over_factorial(2 * k) * poch * xpow
        poch *= (s + 2 * k - 1) * (s + 2 * k)
        xpow /= x * x
    # poch is now (s)_{2 order + 1}, xpow is x^{-s - 2 order - 1}
    sigma = s.real
    last = abs(_bernoulli_over_factorial(2 * order + 2) * poch * xpow)
    bound = abs(s + 2 * order + 1) / (sigma + 2 * order + 1) * last
    return total, bound


def _pick_em(s, tol, q: int = 1) -> Tuple[int, int]:
    """Smallest block count ``M`` (with a fixed order) meeting ``tol``."""
    abss = float(abs(s))
    sigma = float(s.real)
    order = 24
    M = max(16, int(math.ceil(abss / 4)))
    while True:
        x = mpmath.mpf(M)
        poch = mpmath.rf(s, 2 * order + 1)
        last = abs(_bernoulli_over_factorial(2 * order + 2) * poch) * x ** (-sigma - 2 * order - 1)
        b = abs(s + 2 * order + 1) / (sigma + 2 * order + 1) * last * q
        if b < tol:
            return M, order
        M = int(M * 1.5) + 1


def zeta_em(s, dps: int = DEFAULT_DPS) -> EvalResult:
    """``zeta(s)`` by Euler-Maclaurin summation with a rigorous remainder bound."""
    s = _check_zeta_arg(s)
    with mpmath.workdps(dps + 10):
        M, order = _pick_em(s, mpmath.mpf(10) ** (-dps - 2))
        direct = mpmath.fsum(mpmath.power(n, -s) for n in range(1, M))
        tail, bound = _em_correction(s, mpmath.mpf(M), order)
        value = direct + tail
    with mpmath.workdps(dps):
        value = +value
    if s.imag == 0:
        value = value.real
    return EvalResult(value, float(bound), method=f"euler-maclaurin(N={M},order={order})")


def zeta(s, dps: int = DEFAULT_DPS, method: str = "auto") -> EvalResult:
    """Riemann zeta for ``Re s > 0``, ``s != 1``.

    ``method='auto'`` uses the accelerated eta series for ``|Im s| <= 40``
    and Euler-Maclaurin above that (the eta route needs ~0.7|t| guard digits).
    """
    s = _check_zeta_arg(s)
    if method == "eta" or (method == "auto" and abs(s.imag) <= ETA_MAX_IMAG):
        return zeta_eta(s, dps)
    if method in ("em", "auto"):
        return zeta_em(s, dps)
    raise ValueError(f"unknown method {method!r}")


def dirichlet_L(s, chi: RealPrimitiveCharacter, dps: int = DEFAULT_DPS) -> EvalResult:
    """``L(s, chi)`` for ``Re s > 0`` via Euler-Maclaurin on each residue class mod q.

    ``s = 1`` is allowed: the ``1/(s-1)`` terms cancel over a full period and
    the logarithmic limit is used.
    """
    s = mpmath.mpc(s)
    if s.real <= 0:
        raise DomainError("L evaluation requires Re s > 0")
    q = chi.q
    vals = chi.values()
    with mpmath.workdps(dps + 10):
        M, order = _pick_em(s, mpmath.mpf(10) ** (-dps - 2), q)
        direct = mpmath.fsum(vals[n % q] * mpmath.power(n, -s) for n in range(1, M * q + 1) if vals[n % q])
        tail = mpmath.mpc(0)
        bound = mpmath.mpf(0)
        at_one = s == 1
        for a in range(1, q + 1):
            c = vals[a % q]
            if not c:
                continue
            t, b = _em_correction(s, M + mpmath.mpf(a) / q, order, log_form=at_one)
            tail += c * t
            bound += b
        qs = mpmath.power(q, -s)
        value = direct + qs * tail
        bound *= abs(qs)
    with mpmath.workdps(dps):
        value = +value
    if s.imag == 0:
        value = value.real
    return EvalResult(value, float(bound), method=f"hurwitz-euler-maclaurin(M={M},order={order})")


def L_chi(s, chi: RealPrimitiveCharacter, N: int, max_error: Optional[float] = None,
          dps: int = DEFAULT_DPS) -> EvalResult:
    """Partial sum ``sum_{n <= N} chi(n) n^{-s}`` with the Abel-summation tail bound.

    The bound is ``(max partial sum of chi) (1 + |s|/Re s) N^{-Re s}``. With
    ``max_error`` set, raises :class:`CutoffTooSmall` carrying the cutoff
    that would be needed.
    """
    s = mpmath.mpc(s)
    if s.real <= 0.5:
        raise DomainError("L_chi partial sums require Re s > 1/2")
    sigma = float(s.real)
    H = chi.max_partial_sum()
    K = H * (1 + float(abs(s)) / sigma)
    bound = K * N ** (-sigma)
    if max_error is not None and bound > max_error:
        required = int(math.ceil((K / max_error) ** (1 / sigma)))
        raise CutoffTooSmall(f"N={N} gives tail bound {bound:.3g} > {max_error:.3g}; need N >= {required}", required)
    q = chi.q
    vals = chi.values()
    with mpmath.workdps(dps + 5):
        if s.imag == 0:
            sr = s.real
            value = mpmath.fsum(vals[n % q] * mpmath.power(n, -sr) for n in range(1, N + 1) if vals[n % q])
        else:
            value = mpmath.fsum(vals[n % q] * mpmath.power(n, -s) for n in range(1, N + 1) if vals[n % q])
    with mpmath.workdps(dps):
        value = +value
    return EvalResult(value, bound, method=f"partial-sum(N={N})")


# ---------------------------------------------------------------------------
# vectorized evaluation on arrays of points
# ---------------------------------------------------------------------------

_EM_ORDER_VEC = 24
_BF_VEC = np.array([float(_bernoulli_fraction(2 * k)) for k in range(1, _EM_ORDER_VEC + 2)])


def _em_vec_chunk(s: np.ndarray, vals: Sequence[int], q: int, M: int, order: int):
    n = np.arange(1, M * q + 1)
    coef = np.array([vals[k % q] for k in n], dtype=float)
    keep = coef != 0
    n, coef = n[keep], coef[keep]
    logn = np.log(n.astype(float))
    direct = np.exp(-np.outer(s, logn)) @ coef
    tail = np.zeros_like(s)
    bound = np.zeros(s.shape, dtype=float)
    sigma = s.real
    for a in range(1, q + 1):
        c = vals[a % q]
        if not c:
            continue
        x = M + a / q
        xs = np.exp(-s * math.log(x))
        tot = x * xs / (s - 1) + xs / 2
        poch = s.copy()
        xpow = xs / x
        for k in range(1, order + 1):
            tot = tot + _BF_VEC[k - 1] * poch * xpow
            poch = poch * (s + 2 * k - 1) * (s + 2 * k)
            xpow = xpow / (x * x)
        last = np.abs(_BF_VEC[order] * poch * xpow)
        bound += np.abs(s + 2 * order + 1) / (sigma + 2 * order + 1) * last
        tail = tail + c * tot
    qs = np.exp(-s * math.log(q))
    return direct + qs * tail, bound * np.abs(qs)


def _em_vec(s, vals: Sequence[int], q: int, chunk: int = 128):
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s.real <= 0):
        raise DomainError("vectorized evaluation requires Re s > 0")
    out = np.empty_like(s)
    err = np.empty(s.shape, dtype=float)
    order = _EM_ORDER_VEC
    idx = np.argsort(np.abs(s))
    for start in range(0, len(s), chunk):
        sel = idx[start : start + chunk]
        smax = float(np.max(np.abs(s[sel])))
        M = max(16, int(math.ceil(smax / 4)))
        out[sel], err[sel] = _em_vec_chunk(s[sel], vals, q, M, order)
    return out, err


def zeta_vec(s) -> Tuple[np.ndarray, np.ndarray]:
    """Double-precision ``zeta`` at an array of points; returns ``(values, bounds)``."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s == 1):
        raise PoleError("zeta has a pole at s = 1")
    return _em_vec(s, (1,), 1)


def L_vec(s, chi: RealPrimitiveCharacter) -> Tuple[np.ndarray, np.ndarray]:
    """Double-precision ``L(s, chi)`` at an array of points; returns ``(values, bounds)``."""
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(s == 1):
        raise ValueError("use dirichlet_L for s = 1")
    return _em_vec(s, chi.values(), chi.q)


# ---------------------------------------------------------------------------
# real zeros
# ---------------------------------------------------------------------------


@dataclass
class RealZero:
    bracket: Tuple[float, float]
    beta: float
    tol: float
    value: float


@dataclass
class RealZeroScan:
    d: Optional[int]
    interval: Tuple[float, float]
    step: float
    zeros: List[RealZero] = field(default_factory=list)
    inconclusive: bool = False
    min_abs_value: float = math.inf
    max_error_bound: float = 0.0


def scan_real_zeros(func: Callable[[float], EvalResult], a: float, b: float,
                    step: float = 1e-3, tol: float = 1e-10, d: Optional[int] = None) -> RealZeroScan:
    """Grid sign scan of a real function followed by bisection of every sign change.

    A grid value whose magnitude does not exceed its error bound makes the
    scan inconclusive (the sign there is not certified).
    """
    if not a < b:
        raise ValueError("need a < b")
    if step <= 0 or tol <= 0:
        raise ValueError("step and tol must be positive")
    n = max(1, int(math.ceil((b - a) / step)))
    grid = [a + (b - a) * i / n for i in range(n + 1)]
    out = RealZeroScan(d, (a, b), step)

    def val(x):
        r = func(x)
        v = float(mpmath.re(r.value))
        out.max_error_bound = max(out.max_error_bound, r.error_bound)
        if abs(v) <= r.error_bound:
            out.inconclusive = True
        return v

    values = [val(x) for x in grid]
    out.min_abs_value = min(abs(v) for v in values)
    for i in range(n):
        lo, hi = grid[i], grid[i + 1]
        flo, fhi = values[i], values[i + 1]
        if flo == 0:
            out.zeros.append(RealZero((lo, lo), lo, 0.0, 0.0))
            continue
        if flo * fhi > 0:
            continue
        if fhi == 0:
            continue  # recorded as the left endpoint of the next bracket
        x0, x1, f0 = lo, hi, flo
        while x1 - x0 > tol:
            mid = (x0 + x1) / 2
            fm = val(mid)
            if fm == 0:
                x0 = x1 = mid
                break
            if (fm < 0) == (f0 < 0):
                x0, f0 = mid, fm
            else:
                x1 = mid
        beta = (x0 + x1) / 2
        out.zeros.append(RealZero((lo, hi), beta, tol, val(beta)))
    if values[-1] == 0:
        out.zeros.append(RealZero((grid[-1], grid[-1]), grid[-1], 0.0, 0.0))
    return out


def find_real_zeros(chi: RealPrimitiveCharacter, interval: Tuple[float, float] = (0.6, 0.99),
                    step: float = 1e-3, tol: float = 1e-10, dps: int = 20) -> RealZeroScan:
    a, b = interval
    if not (0.5 < a < b < 1):
        raise DomainError("interval must lie inside (1/2, 1)")
    return scan_real_zeros(lambda x: dirichlet_L(mpmath.mpf(x), chi, dps), a, b, step, tol, chi.d)


# ---------------------------------------------------------------------------
# empirical scans for the growth lemma and the L(1) ratio lemma
# ---------------------------------------------------------------------------


def lemma1_constant_scan(t_range: Tuple[float, float] = (-100.0, 100.0), samples: int = 2001,
                         chi: Optional[RealPrimitiveCharacter] = None, sigma: float = 0.75) -> LemmaReport:
    """Fit ``max |zeta(sigma+it)| / ((|t|+2)^{1/8} log(|t|+2))`` over a grid (and the L analogue)."""
    if samples < 10:
        raise ValueError("need at least 10 samples")
    lo, hi = t_range
    t = np.linspace(lo, hi, samples)
    s = sigma + 1j * t
    z, zerr = zeta_vec(s)
    ref = (np.abs(t) + 2) ** 0.125 * np.log(np.abs(t) + 2)
    ratio = np.abs(z) / ref
    k = int(np.argmax(ratio))
    fitted = {"zeta_constant": float(ratio[k]), "zeta_argmax_t": float(t[k])}
    measured = {"max_abs_zeta": float(np.max(np.abs(z))), "max_eval_error": float(np.max(zerr))}
    if chi is not None:
        L, lerr = L_vec(s, chi)
        qt = chi.q * (np.abs(t) + 2)
        lratio = np.abs(L) / (qt**0.125 * np.log(qt))
        j = int(np.argmax(lratio))
        fitted.update({"L_constant": float(lratio[j]), "L_argmax_t": float(t[j])})
        measured.update({"max_abs_L": float(np.max(np.abs(L))), "max_L_eval_error": float(np.max(lerr))})
    inputs = {"sigma": sigma, "t_lo": lo, "t_hi": hi, "samples": samples, "d": chi.d if chi else None}
    return LemmaReport("1-scan", inputs, measured, verdict=PASS, fitted=fitted,
                       notes=["implied constants are fitted on the sample grid, not proved"])


def lemma2_ratios(chi: RealPrimitiveCharacter, beta: float, dps: int = DEFAULT_DPS) -> LemmaReport:
    """``L(1,chi)/(1-beta)`` and ``L(1,chi)/((1-beta) log^2 q)``; reported, never asserted."""
    if not (0.5 < beta < 1):
        raise DomainError("beta must lie in (1/2, 1)")
    L1 = dirichlet_L(1, chi, dps)
    with mpmath.workdps(dps):
        gap = 1 - mpmath.mpf(beta)
        rho1 = L1.value / gap
        rho2 = rho1 / mpmath.log(chi.q) ** 2
    rel = L1.error_bound / abs(float(L1.value))
    verdict = PASS if L1.error_bound < abs(float(L1.value)) else INCONCLUSIVE
    return LemmaReport(
        "2", {"d": chi.d, "beta": beta},
        {"L1": L1.value, "L1_error_bound": L1.error_bound, "rho1": rho1, "rho2": rho2,
         "rho1_error_bound": float(rho1) * rel, "rho2_error_bound": float(rho2) * rel},
        verdict=verdict,
        notes=["beta need not be a zero of L; ratios are reported only"],
    )
