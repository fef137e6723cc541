"""The correction products ``Q(w)`` and ``P_{r,t}(w)``.

``Q`` is an infinite product over primes, convergent for ``Re w > 1/2``:
local factor ``1 - 3x^2 + 2x^3`` when ``chi(p) = 1``, ``1 - x^2`` when
``chi(p) = -1`` and ``1 - x`` when ``p | q``, with ``x = p^{-w}``.

``P_{r,t}`` is the finite product over primes ``p | rt`` with ``chi(p) = 1`` of
``(1 + 2 f_r(p) f_t(p) x) / (1 + 2x)``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .arith import default_sieve, prime_divisors, pseudo_f_r_at_prime, squarefree_coprime_to_6, trial_factorize
from .characters import RealPrimitiveCharacter
from .reports import FAIL, PASS, LemmaReport
from .special_functions import CutoffTooSmall, DomainError, EvalResult, L_vec, dirichlet_L, zeta, zeta_vec

# Rosser-Schoenfeld: pi(x) < 1.25506 x / log x for x > 1
_PI_UPPER = 1.25506


class ContractError(ValueError):
    """Arguments violate the squarefree / coprime-to-6 contract."""


def check_rt(r: int, t: int) -> None:
    for name, v in (("r", r), ("t", t)):
        if v < 1:
            raise ContractError(f"{name}={v} must be positive")
        if math.gcd(v, 6) != 1:
            raise ContractError(f"{name}={v} is not coprime to 6")
        if any(e > 1 for _, e in trial_factorize(v)):
            raise ContractError(f"{name}={v} is not squarefree")


def Q_local(p: int, chi: RealPrimitiveCharacter) -> Tuple[int, ...]:
    """Coefficients (ascending in ``x = p^{-w}``) of the local factor of ``Q`` at ``p``."""
    c = chi(p)
    if c == 0:
        return (1, -1)
    if c == 1:
        return (1, 0, -3, 2)
    return (1, 0, -1)


def _prime_sum_bound(P: float, exponent: float) -> float:
    """Upper bound for ``sum_{p > P} p^{-exponent}`` (``exponent > 1``)."""
    return _PI_UPPER * exponent * P ** (1 - exponent) / ((exponent - 1) * math.log(P))


def Q_tail_bound(sigma: float, P_max: int) -> float:
    """Bound on ``|log prod_{p > P_max, p !| q} local factor|`` at ``Re w = sigma``."""
    if sigma <= 0.5:
        raise DomainError("Q requires Re w > 1/2")
    c = 3 + 2 * P_max ** (-sigma)
    zmax = c * P_max ** (-2 * sigma)
    return c * _prime_sum_bound(P_max, 2 * sigma) / (1 - zmax)


def _truncated_Q(chi: RealPrimitiveCharacter, w, primes: Iterable[int]) -> mpmath.mpc:
    out = mpmath.mpc(1)
    for p in primes:
        x = mpmath.power(p, -w)
        c = chi(int(p))
        if c == 1:
            out *= 1 - 3 * x * x + 2 * x * x * x
        elif c == -1:
            out *= 1 - x * x
        else:
            out *= 1 - x
    return out


def Q_eval(chi: RealPrimitiveCharacter, w, P_max: int = 10**4, max_error: Optional[float] = None,
           dps: int = 30) -> EvalResult:
    """Truncated Euler product over ``p <= P_max`` (and every ``p | q``) with a rigorous tail bound.

    With ``max_error`` set and unreachable, raises :class:`CutoffTooSmall`
    carrying a cutoff that suffices.
    """
    if P_max < 5:
        raise ValueError("P_max must be at least 5")
    with mpmath.workdps(dps + 5):
        w = mpmath.mpc(w)
        sigma = float(w.real)
        if sigma <= 0.5:
            raise DomainError("Q requires Re w > 1/2")
        primes = [int(p) for p in default_sieve(P_max).primes(P_max)]
        extra = [p for p in prime_divisors(chi.q) if p > P_max]
        value = _truncated_Q(chi, w, primes + extra)
        lam = Q_tail_bound(sigma, P_max)
        bound = float(abs(value)) * math.expm1(lam)
    if max_error is not None and bound > max_error:
        P = P_max
        while float(abs(value)) * math.expm1(Q_tail_bound(sigma, P)) > max_error:
            P *= 2
        raise CutoffTooSmall(f"P_max={P_max} gives tail bound {bound:.3g}; need P_max >= {P}", P)
    with mpmath.workdps(dps):
        value = +value
    if w.imag == 0:
        value = value.real
    return EvalResult(value, bound, method=f"truncated-product(P_max={P_max})")


# ---------------------------------------------------------------------------
# accelerated Q: Q(w) = zeta(2w)^-2 L(2w,chi)^-1 prod_p corr_p(w)
# ---------------------------------------------------------------------------


def _corr_tail_bound(sigma: float, P: int) -> float:
    # |log corr_p| <= 4|x|^3 / (1 - 2|x|) for every p !| q
    return 4 / (1 - 2 * P ** (-sigma)) * _prime_sum_bound(P, 3 * sigma)


def Q_accelerated(chi: RealPrimitiveCharacter, w, P_max: int = 30000, dps: int = 30) -> EvalResult:
    """``Q(w)`` with ``zeta(2w)^2 L(2w, chi)`` divided out of the Euler product.

    The remaining product converges like ``sum p^{-3 Re w}``.
    """
    with mpmath.workdps(dps + 5):
        w = mpmath.mpc(w)
        sigma = float(w.real)
        if sigma <= 0.5:
            raise DomainError("Q requires Re w > 1/2")
        z2 = zeta(2 * w, dps + 5)
        L2 = dirichlet_L(2 * w, chi, dps + 5)
        primes = [int(p) for p in default_sieve(P_max).primes(P_max)]
        primes += [p for p in prime_divisors(chi.q) if p > P_max]
        logc = mpmath.mpc(0)
        for p in primes:
            x = mpmath.power(p, -w)
            c = chi(p)
            if c == 1:
                logc += mpmath.log(1 + 2 * x) - mpmath.log(1 - x) - 3 * mpmath.log(1 + x)
            elif c == -1:
                logc -= mpmath.log(1 - x**4)
            else:
                logc -= mpmath.log(1 - x) + 2 * mpmath.log(1 + x)
        value = mpmath.exp(logc) / (z2.value**2 * L2.value)
        lam = _corr_tail_bound(sigma, P_max)
        rel = 2 * z2.error_bound / float(abs(z2.value)) + L2.error_bound / float(abs(L2.value))
        bound = float(abs(value)) * (math.expm1(lam) + rel)
    with mpmath.workdps(dps):
        value = +value
    if w.imag == 0:
        value = value.real
    return EvalResult(value, bound, method=f"accelerated-product(P_max={P_max})")


def Q_vec(chi: RealPrimitiveCharacter, w, P_max: int = 30000, chunk: int = 512):
    """Double-precision accelerated ``Q`` on an array of points; returns ``(values, bounds)``."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    sigma = float(np.min(w.real))
    if sigma <= 0.5:
        raise DomainError("Q requires Re w > 1/2")
    z2, ez = zeta_vec(2 * w)
    L2, el = L_vec(2 * w, chi)
    primes = [int(p) for p in default_sieve(P_max).primes(P_max)]
    primes += [p for p in prime_divisors(chi.q) if p > P_max]
    primes = np.array(primes, dtype=float)
    cls = np.array([chi(int(p)) for p in primes])
    logp = np.log(primes)
    logc = np.zeros_like(w)
    for start in range(0, len(w), chunk):
        ws = w[start : start + chunk]
        x = np.exp(-np.outer(ws, logp))
        lc = np.where(cls == 1, np.log1p(2 * x) - np.log1p(-x) - 3 * np.log1p(x),
                      np.where(cls == -1, -np.log1p(-(x**4)), -np.log1p(-x) - 2 * np.log1p(x)))
        logc[start : start + chunk] = lc.sum(axis=1)
    value = np.exp(logc) / (z2**2 * L2)
    rel = math.expm1(_corr_tail_bound(sigma, P_max)) + 2 * ez / np.abs(z2) + el / np.abs(L2)
    return value, np.abs(value) * rel


# ---------------------------------------------------------------------------
# P_{r,t}
# ---------------------------------------------------------------------------


def P_primes(r: int, t: int, chi: RealPrimitiveCharacter) -> List[int]:
    """Primes ``p | rt`` with ``chi(p) = 1``, ascending."""
    return [p for p in prime_divisors(r * t) if chi(p) == 1]


def _ff(p: int, r: int, t: int) -> Fraction:
    return pseudo_f_r_at_prime(p, r) * pseudo_f_r_at_prime(p, t)


def P_eval(chi: RealPrimitiveCharacter, r: int, t: int, w):
    """``P_{r,t}(w)``.

    Exact :class:`~fractions.Fraction` when ``w`` is a positive integer (then
    ``p^{-w}`` is rational); otherwise an mpmath complex number.
    """
    check_rt(r, t)
    primes = P_primes(r, t, chi)
    exact = isinstance(w, (int, Fraction)) and not isinstance(w, bool) and Fraction(w).denominator == 1 and w > 0
    if exact:
        out = Fraction(1)
        for p in primes:
            x = Fraction(1, p ** int(w))
            out *= (1 + 2 * _ff(p, r, t) * x) / (1 + 2 * x)
        return out
    w = mpmath.mpc(w)
    out = mpmath.mpc(1)
    for p in primes:
        x = mpmath.power(p, -w)
        f = _ff(p, r, t)
        out *= (1 + 2 * (mpmath.mpf(f.numerator) / f.denominator) * x) / (1 + 2 * x)
    return out


def P_vec(chi: RealPrimitiveCharacter, r: int, t: int, w) -> np.ndarray:
    check_rt(r, t)
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    out = np.ones_like(w)
    for p in P_primes(r, t, chi):
        x = np.exp(-w * math.log(p))
        f = float(_ff(p, r, t))
        out *= (1 + 2 * f * x) / (1 + 2 * x)
    return out


def P_at_one_closed(r: int, t: int, chi: RealPrimitiveCharacter) -> Fraction:
    """Closed form of ``P_{r,t}(1)``.

    A prime ``p`` with ``chi(p) = 1`` dividing exactly one of ``r, t`` has
    ``f_r f_t(p) = -p/2`` and kills the product; a common such prime gives
    ``(1 + p/2)/(1 + 2/p) = p/2``. Primes with ``chi(p) != 1`` never enter, so
    ``r != t`` alone does not force zero.
    """
    check_rt(r, t)
    out = Fraction(1)
    for p in P_primes(r, t, chi):
        if (r % p == 0) != (t % p == 0):
            return Fraction(0)
        out *= Fraction(p, 2)
    return out


def P_at_one_displayed(r: int, t: int, chi: RealPrimitiveCharacter) -> Fraction:
    """The two-case form ``prod_{p | r, chi(p)=1} p/2`` if ``r = t``, else ``0``.

    Agrees with :func:`P_at_one_closed` exactly when the split parts
    (primes with ``chi(p) = 1``) of ``r`` and ``t`` are both equal or
    differ whenever ``r != t``.
    """
    check_rt(r, t)
    if r != t:
        return Fraction(0)
    out = Fraction(1)
    for p in P_primes(r, r, chi):
        out *= Fraction(p, 2)
    return out


def lemma6_orthogonality(R: int, discriminants: Iterable[int]) -> LemmaReport:
    """Compare ``P_{r,t}(1)`` with both closed forms over squarefree ``r, t <= R`` coprime to 6.

    The verdict follows the two-case form (zero off the diagonal); agreement
    with :func:`P_at_one_closed` is reported separately, with the first few
    off-diagonal pairs where ``P_{r,t}(1) != 0``.
    """
    from .characters import character

    rs = squarefree_coprime_to_6(R)
    discriminants = list(discriminants)
    checks = closed_bad = displayed_bad = 0
    witnesses: List[dict] = []
    for d in discriminants:
        chi = character(d)
        for r in rs:
            for t in rs:
                val = P_eval(chi, r, t, 1)
                checks += 1
                if val != P_at_one_closed(r, t, chi):
                    closed_bad += 1
                if val != P_at_one_displayed(r, t, chi):
                    displayed_bad += 1
                    if len(witnesses) < 5:
                        witnesses.append({"d": d, "r": r, "t": t, "P_rt_1": val})
    measured = {"checks": checks, "mismatch_two_case_form": displayed_bad, "mismatch_corrected_form": closed_bad,
                "witnesses": witnesses}
    notes = []
    if displayed_bad:
        notes.append("P_{r,t}(1) is nonzero for some r != t: the product only sees primes with chi(p) = 1, "
                     "so pairs whose split parts agree survive")
    return LemmaReport("6-orthogonality", {"R": R, "discriminants": discriminants}, measured, tolerance=0,
                       verdict=PASS if displayed_bad == 0 and closed_bad == 0 else FAIL, notes=notes)


def split_part(r: int, chi: RealPrimitiveCharacter) -> int:
    """Product of the primes ``p | r`` with ``chi(p) = 1``."""
    u = 1
    for p in prime_divisors(r):
        if chi(p) == 1:
            u *= p
    return u


def lemma6_double_sum(R: int, chi: RealPrimitiveCharacter, full_limit: int = 300,
                      exact_limit: int = 5000) -> LemmaReport:
    """``sum_{r,t <= R} mu^2(r)/r mu^2(t)/t P_{r,t}(1)`` over ``(rt, 6) = 1``.

    Computed by the full double loop (``R <= full_limit``) and by grouping
    ``r = u s`` with ``u`` the split part: only pairs with equal split parts
    survive, giving ``sum_u prod_{p|u}(p/2) / u^2 (sum_{s <= R/u} 1/s)^2``.
    The pure diagonal ``r = t`` is reported alongside.
    """
    if R < 1:
        raise ValueError("R must be positive")
    rs = squarefree_coprime_to_6(R)
    exact = R <= exact_limit
    one = Fraction(1) if exact else 1.0

    def frac(a, b):
        return Fraction(a, b) if exact else a / b

    # grouped form
    by_u: Dict[int, List[int]] = {}
    for r in rs:
        u = split_part(r, chi)
        by_u.setdefault(u, []).append(r // u)
    grouped = 0 * one
    for u, ss in by_u.items():
        weight = one
        for p in prime_divisors(u):
            weight *= frac(p, 2)
        inner = sum((frac(1, s) for s in ss), 0 * one)
        grouped += weight * frac(1, u * u) * inner * inner
    diagonal = 0 * one
    for r in rs:
        w = one
        for p in P_primes(r, r, chi):
            w *= frac(p, 2)
        diagonal += w * frac(1, r * r)
    measured = {"grouped": grouped, "diagonal_r_eq_t": diagonal}
    notes = []
    verdict = PASS
    if R <= full_limit:
        full = Fraction(0)
        for r in rs:
            for t in rs:
                P1 = P_eval(chi, r, t, 1)
                if P1:
                    full += Fraction(1, r * t) * P1
        measured["full"] = full
        measured["full_equals_grouped"] = full == grouped
        measured["full_equals_diagonal"] = full == diagonal
        if full != grouped:
            verdict = FAIL
        if full != diagonal:
            notes.append("off-diagonal pairs with equal split parts contribute; the r = t diagonal alone is incomplete")
    sq = math.sqrt(math.log(R)) if R > 1 else 0.0
    gval = float(grouped)
    fitted = {"C_grouped": gval / sq if sq else math.inf, "C_diagonal": float(diagonal) / sq if sq else math.inf}
    return LemmaReport("6-sum", {"R": R, "d": chi.d, "exact": exact}, measured,
                       {"sqrt_log_R": sq}, verdict=verdict, fitted=fitted, notes=notes)


# ---------------------------------------------------------------------------
# scans
# ---------------------------------------------------------------------------


def lemma4_scan(chi: RealPrimitiveCharacter, vmax: float = 50.0, samples: int = 1001,
                P_max: int = 30000) -> LemmaReport:
    """Fit ``max_v |Q(3/4 + iv)|`` against ``q^{1/8}`` and ``q^{1/4}``; check ``Q(1) <= prod (1 + 2p^{-3})``."""
    v = np.linspace(-vmax, vmax, samples)
    Qv, err = Q_vec(chi, 0.75 + 1j * v, P_max)
    m = float(np.max(np.abs(Qv)))
    Q1 = Q_eval(chi, 1, P_max)
    primes = default_sieve(P_max).primes(P_max).astype(float)
    cap = float(np.exp(np.sum(np.log1p(2 * primes**-3.0)))) * math.exp(2 * _prime_sum_bound(P_max, 3))
    ok = float(Q1.value) - Q1.error_bound <= cap and float(Q1.value) > 0
    q = chi.q
    return LemmaReport(
        "4-scan", {"d": chi.d, "vmax": vmax, "samples": samples, "P_max": P_max},
        {"max_abs_Q_line": m, "argmax_v": float(v[int(np.argmax(np.abs(Qv)))]),
         "max_eval_error": float(np.max(err)), "Q1": Q1.value, "Q1_error_bound": Q1.error_bound},
        {"Q1_cap": cap},
        verdict=PASS if ok else FAIL,
        fitted={"C_q_1_8": m / q**0.125, "C_q_1_4": m / q**0.25},
    )


def P_growth_scan(chi: RealPrimitiveCharacter, R: int = 100, vmax: float = 50.0,
                  samples: int = 401) -> LemmaReport:
    """Fit ``max |P_{r,t}(3/4 + iv)| / (r t)^{3/2}`` over squarefree ``r, t <= R`` coprime to 6."""
    v = np.linspace(-vmax, vmax, samples)
    w = 0.75 + 1j * v
    rs = squarefree_coprime_to_6(R)
    best, arg = 0.0, (1, 1)
    for r in rs:
        for t in rs:
            val = float(np.max(np.abs(P_vec(chi, r, t, w)))) / (r * t) ** 1.5
            if val > best:
                best, arg = val, (r, t)
    return LemmaReport("6-growth", {"d": chi.d, "R": R, "vmax": vmax, "samples": samples},
                       {"argmax_r": arg[0], "argmax_t": arg[1]}, verdict=PASS,
                       fitted={"C_rt_3_2": best})
