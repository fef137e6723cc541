"""Exact and numerical checks of the Euler-factor identity, the Mellin weight
and the two partial-sum asymptotics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .arith import FactorSieve, a_coeff, default_sieve, mobius, pseudo_f_r, pseudo_f_r_at_prime, squarefree_coprime_to_6
from .characters import RealPrimitiveCharacter, chi0
from .euler_products import P_primes, Q_local, check_rt
from .reports import FAIL, INCONCLUSIVE, PASS, LemmaReport

Series = Tuple[Fraction, ...]


def _pad(c: Sequence, D: int) -> Series:
    c = [Fraction(v) for v in c[: D + 1]]
    return tuple(c + [Fraction(0)] * (D + 1 - len(c)))


def series_mul(a: Series, b: Series, D: int) -> Series:
    out = [Fraction(0)] * (D + 1)
    for i, ai in enumerate(a[: D + 1]):
        if ai:
            for j, bj in enumerate(b[: D + 1 - i]):
                out[i + j] += ai * bj
    return tuple(out)


def series_inv(a: Series, D: int) -> Series:
    """Inverse of a power series with constant term 1, truncated at degree ``D``."""
    if a[0] != 1:
        raise ValueError("constant term must be 1")
    a = _pad(a, D)
    out = [Fraction(1)] + [Fraction(0)] * D
    for n in range(1, D + 1):
        out[n] = -sum(a[k] * out[n - k] for k in range(1, n + 1))
    return tuple(out)


@dataclass(frozen=True)
class LocalFactorPolynomial:
    """Truncated power series in ``x = p^{-w}`` for the local factor at ``p``."""

    p: int
    coeffs: Series

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def of(cls, p: int, coeffs: Sequence, D: int) -> "LocalFactorPolynomial":
        return cls(p, _pad(coeffs, D))

    def __mul__(self, other: "LocalFactorPolynomial") -> "LocalFactorPolynomial":
        if other.p != self.p:
            raise ValueError("local factors at different primes")
        D = min(self.degree, other.degree)
        return LocalFactorPolynomial(self.p, series_mul(self.coeffs, other.coeffs, D))

    def inverse(self) -> "LocalFactorPolynomial":
        return LocalFactorPolynomial(self.p, series_inv(self.coeffs, self.degree))

    def first_mismatch(self, other: "LocalFactorPolynomial") -> Optional[int]:
        for k, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return k
        return None


def lemma7_local_sides(p: int, r: int, t: int, chi: RealPrimitiveCharacter, D: int = 6):
    """Left and right local factors at ``p``, each as a :class:`LocalFactorPolynomial`."""
    return _local_sides(p, chi(p), chi.q % p == 0, r % p == 0, t % p == 0, D)


@lru_cache(maxsize=None)
def _local_sides(p: int, cp: int, p_div_q: bool, p_div_r: bool, p_div_t: bool, D: int):
    fr = Fraction(-p, 2) if p_div_r else Fraction(1)
    ft = Fraction(-p, 2) if p_div_t else Fraction(1)
    principal = 0 if p_div_q else 1
    a_p = 1 + cp
    lhs = LocalFactorPolynomial.of(p, [1, principal * a_p * fr * ft], D)

    zeta_p = LocalFactorPolynomial.of(p, [1, -1], D).inverse()
    L_p = LocalFactorPolynomial.of(p, [1, -cp], D).inverse()
    if p_div_q:
        q_coeffs = [1, -1]
    elif cp == 1:
        q_coeffs = [1, 0, -3, 2]
    else:
        q_coeffs = [1, 0, -1]
    Q_p = LocalFactorPolynomial.of(p, q_coeffs, D)
    rhs = zeta_p * L_p * Q_p
    if cp == 1 and (p_div_r or p_div_t):
        num = LocalFactorPolynomial.of(p, [1, 2 * fr * ft], D)
        den = LocalFactorPolynomial.of(p, [1, 2], D)
        rhs = rhs * num * den.inverse()
    return lhs, rhs


def lemma7_local_check(p: int, r: int, t: int, chi: RealPrimitiveCharacter, D: int = 6) -> LemmaReport:
    """Coefficient-wise exact comparison of both local factors at ``p`` up to degree ``D``."""
    if D < 3:
        raise ValueError("degree must be at least 3")
    check_rt(r, t)
    lhs, rhs = lemma7_local_sides(p, r, t, chi, D)
    bad = lhs.first_mismatch(rhs)
    return LemmaReport(
        "7-local", {"p": p, "r": r, "t": t, "d": chi.d, "D": D},
        {"lhs": list(lhs.coeffs)}, {"rhs": list(rhs.coeffs)}, tolerance=0,
        verdict=PASS if bad is None else FAIL,
        notes=[] if bad is None else [f"coefficients differ at degree {bad}"],
    )


def lemma7_sweep(primes: Iterable[int], discriminants: Iterable[int], pairs: Iterable[Tuple[int, int]],
                 D: int = 6) -> LemmaReport:
    """Run :func:`lemma7_local_check` over a grid; one aggregated report."""
    from .characters import character

    primes, pairs, discriminants = list(primes), list(pairs), list(discriminants)
    checks = 0
    failures: List[dict] = []
    for d in discriminants:
        chi = character(d)
        for r, t in pairs:
            check_rt(r, t)
            for p in primes:
                lhs, rhs = lemma7_local_sides(p, r, t, chi, D)
                checks += 1
                if lhs.coeffs != rhs.coeffs:
                    failures.append({"d": d, "r": r, "t": t, "p": p, "degree": lhs.first_mismatch(rhs)})
    return LemmaReport(
        "7-local-sweep", {"primes": len(primes), "max_prime": max(primes), "discriminants": discriminants,
                          "pairs": len(pairs), "D": D},
        {"checks": checks, "failures": len(failures)}, tolerance=0,
        verdict=PASS if not failures else FAIL,
        notes=[str(f) for f in failures[:10]],
    )


def _multiplicative_table(N: int, local, sieve: FactorSieve) -> list:
    """``c[n]`` for ``n <= N`` from ``local(p, k)`` (coefficient of ``p^k``)."""
    out = [0] * (N + 1)
    out[1] = 1
    for n in range(2, N + 1):
        v = 1
        for p, k in sieve.factorize(n):
            v *= local(p, k)
            if not v:
                break
        out[n] = v
    return out


def dirichlet_convolve(a: list, b: list, N: int) -> list:
    out = [0] * (N + 1)
    for m in range(1, N + 1):
        am = a[m]
        if not am:
            continue
        for n in range(1, N // m + 1):
            bn = b[n]
            if bn:
                out[m * n] += am * bn
    return out


def lemma7_series_check(N: int, r: int, t: int, chi: RealPrimitiveCharacter,
                        sieve: Optional[FactorSieve] = None) -> LemmaReport:
    """Compare the first ``N`` Dirichlet coefficients of ``zeta L Q P`` with
    ``mu^2(n) chi_0(n) a(n) f_r(n) f_t(n)``, exactly."""
    if N > 10**4:
        raise ValueError("series check is limited to N <= 10^4")
    check_rt(r, t)
    sieve = sieve or default_sieve(max(N, 10))
    q = chi.q

    lhs = [Fraction(0)] * (N + 1)
    for n in range(1, N + 1):
        mu = mobius(n, sieve)
        if mu == 0 or chi0(q, n) == 0:
            continue
        a = a_coeff(n, chi, sieve)
        if a:
            lhs[n] = a * pseudo_f_r(n, r, sieve) * pseudo_f_r(n, t, sieve)

    ones = [0] + [1] * N
    L = [0] + [chi(n) for n in range(1, N + 1)]

    def q_local(p, k):
        c = Q_local(p, chi)
        return c[k] if k < len(c) else 0

    Qc = _multiplicative_table(N, q_local, sieve)
    pset = set(P_primes(r, t, chi))
    p_series = {}
    for p in pset:
        f = pseudo_f_r_at_prime(p, r) * pseudo_f_r_at_prime(p, t)
        kmax = int(math.log(N, p)) + 1
        p_series[p] = series_mul(_pad([1, 2 * f], kmax), series_inv(_pad([1, 2], kmax), kmax), kmax)

    def p_local(p, k):
        if p in pset:
            return p_series[p][k]
        return 0

    Pc = _multiplicative_table(N, p_local, sieve)
    rhs = dirichlet_convolve(dirichlet_convolve(dirichlet_convolve(ones, L, N), Qc, N), Pc, N)
    mismatch = next((n for n in range(1, N + 1) if Fraction(rhs[n]) != lhs[n]), None)
    return LemmaReport(
        "7-series", {"N": N, "r": r, "t": t, "d": chi.d},
        {"nonzero_coefficients": sum(1 for v in lhs[1:] if v), "first_mismatch": mismatch},
        tolerance=0, verdict=PASS if mismatch is None else FAIL,
    )


# ---------------------------------------------------------------------------
# Mellin weight y^w / (w (w+1)) on a vertical line
# ---------------------------------------------------------------------------


def _gl_panels(f, a: float, b: float, width: float, nodes: int = 20) -> float:
    x, wts = np.polynomial.legendre.leggauss(nodes)
    n = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    w = (half[:, None] * wts[None, :]).ravel()
    return float(np.sum(f(pts) * w))


def mellin_weight_exact(y: float) -> float:
    return max(0.0, 1.0 - 1.0 / y)


def lemma8_quadrature(y: float, b: float = 2.0, V: Optional[float] = None, step: Optional[float] = None,
                      tol: float = 1e-8, tail: str = "fourier") -> LemmaReport:
    """``(1/2 pi i) int_{(b)} y^w / (w (w+1)) dw`` by Gauss-Legendre panels on ``|Im w| <= V``.

    The integrand at ``-v`` is the conjugate of that at ``v``, so only
    ``[0, V]`` is integrated. ``tail='fourier'`` adds ``|Im w| > V`` by
    QUADPACK's Fourier-integral routine; ``tail='none'`` omits it and the
    verdict then rests on the bound ``y^b / (pi V)``.
    """
    if y <= 0 or b <= 0:
        raise ValueError("need y > 0 and b > 0")
    lam = math.log(y)
    if V is None:
        V = 200.0
    if step is None:
        step = min(1.0, math.pi / (2 * abs(lam))) if lam else 1.0
    yb = y**b

    def g(v):
        return 1.0 / ((b + 1j * v) * (b + 1 + 1j * v))

    def re_integrand(v):
        return (yb * np.exp(1j * lam * v) * g(v)).real

    core = _gl_panels(re_integrand, 0.0, V, step) / math.pi
    tail_estimate = yb / (math.pi * V)
    tail_value = 0.0
    if tail == "fourier":
        gr = lambda v: g(v).real
        gi = lambda v: g(v).imag
        if lam == 0:
            val, _ = integrate.quad(gr, V, np.inf, limit=200, epsabs=1e-15, epsrel=1e-12)
        else:
            om = abs(lam)
            sgn = 1.0 if lam > 0 else -1.0
            c, _ = integrate.quad(gr, V, np.inf, weight="cos", wvar=om, limlst=200, epsabs=1e-15)
            s, _ = integrate.quad(gi, V, np.inf, weight="sin", wvar=om, limlst=200, epsabs=1e-15)
            val = c - sgn * s
        tail_value = yb * val / math.pi
    elif tail != "none":
        raise ValueError(f"unknown tail mode {tail!r}")
    numeric = core + tail_value
    exact = mellin_weight_exact(y)
    err = abs(numeric - exact)
    notes = []
    if tail == "none" and tail_estimate > tol:
        verdict = INCONCLUSIVE
        notes.append(f"tail estimate exceeds tolerance; need V >= {yb / (math.pi * tol):.3g}")
    else:
        verdict = PASS if err < tol else FAIL
    return LemmaReport(
        "8", {"y": y, "b": b, "V": V, "step": step, "tail": tail},
        {"numeric": numeric, "core": core, "tail_correction": tail_value, "abs_error": err},
        {"closed_form": exact, "tail_estimate": tail_estimate}, tolerance=tol,
        verdict=verdict, notes=notes,
    )


# ---------------------------------------------------------------------------
# partial sums
# ---------------------------------------------------------------------------

EXACT_SUM_LIMIT = 2000
LEMMA3_REFERENCE_R = 10**6


def _sf_coprime6_mask(limit: int) -> np.ndarray:
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    sf[2::2] = False
    sf[3::3] = False
    for p in default_sieve(max(10, math.isqrt(limit))).primes(math.isqrt(limit)):
        sf[p * p :: p * p] = False
    return sf


def squarefree_reciprocal_sum(R: int):
    """``sum_{r <= R, (r,6)=1} mu^2(r)/r``: exact for small ``R``, compensated float otherwise."""
    if R <= EXACT_SUM_LIMIT:
        return sum((Fraction(1, r) for r in squarefree_coprime_to_6(R)), Fraction(0))
    rs = np.nonzero(_sf_coprime6_mask(R))[0]
    return math.fsum(1.0 / rs)


def lemma3_partial_sum(R: int) -> LemmaReport:
    """Squarefree reciprocal sum coprime to 6 against ``(3/pi^2) log R``."""
    if R < 1:
        raise ValueError("R must be positive")
    c = 3 / math.pi**2
    S = squarefree_reciprocal_sum(R)
    reduction = (1 + Fraction(1, 2)) * (1 + Fraction(1, 3))  # 6/pi^2 divided by this gives 3/pi^2
    if R < 10:
        return LemmaReport("3", {"R": R}, {"sum": S}, {"main_term": c * math.log(R)},
                           verdict=INCONCLUSIVE, fitted={"euler_factor_reduction": reduction},
                           notes=["asymptotic comparison needs R >= 10"])
    D = [float(squarefree_reciprocal_sum(k * R)) - c * math.log(k * R) for k in (1, 2, 4)]
    ratio = float(S) / (c * math.log(R))
    if abs(ratio - 1) <= 0.2:
        verdict, notes = PASS, []
    elif R < LEMMA3_REFERENCE_R:
        # the secondary term is about 0.64, so the ratio only settles near 1 for R in the 10^5 range
        verdict, notes = INCONCLUSIVE, [f"ratio outside the band below the reference scale R = {LEMMA3_REFERENCE_R}"]
    else:
        verdict, notes = FAIL, []
    return LemmaReport(
        "3", {"R": R},
        {"sum": S, "ratio": ratio, "D_R": D[0], "D_2R": D[1], "D_4R": D[2],
         "diff_2R_R": abs(D[1] - D[0]), "diff_4R_2R": abs(D[2] - D[1])},
        {"main_term": c * math.log(R)}, tolerance=0.2,
        verdict=verdict, fitted={"euler_factor_reduction": reduction}, notes=notes,
    )


def two_pow_minus_omega_sum(x: int, sieve: Optional[FactorSieve] = None) -> Fraction:
    """``sum_{n <= x} 2^{-omega(n)}`` exactly (integer arithmetic on a common power of two)."""
    if x < 1:
        return Fraction(0)
    sieve = sieve or default_sieve(x)
    w = sieve.omega_table()[1 : x + 1].astype(np.int64)
    K = int(w.max())
    return Fraction(int(np.sum(np.left_shift(np.int64(1), K - w))), 2**K)


def lemma5_partial_sum(x: int, sieve: Optional[FactorSieve] = None) -> LemmaReport:
    """``S(x) = sum 2^{-omega(n)}`` and the fitted ``lambda(x) = S(x) sqrt(log x) / x``.

    Stability is judged against ``lambda(x/10)`` with a 5% threshold.
    """
    if x < 3:
        raise ValueError("x must be at least 3")
    S = two_pow_minus_omega_sum(x, sieve)
    lam = float(S) * math.sqrt(math.log(x)) / x
    measured = {"S": S, "lambda": lam}
    if x >= 100:
        xp = x // 10
        Sp = two_pow_minus_omega_sum(xp, sieve)
        lam_prev = float(Sp) * math.sqrt(math.log(xp)) / xp
        rel = abs(lam - lam_prev) / lam
        measured.update({"lambda_prev_decade": lam_prev, "relative_change": rel})
        verdict = PASS if rel < 0.05 else FAIL
    else:
        verdict = INCONCLUSIVE
    return LemmaReport("5", {"x": x}, measured, tolerance=0.05, verdict=verdict,
                       fitted={"lambda": lam}, notes=["lambda is fitted, not a closed form"])
