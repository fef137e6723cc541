"""The smoothed weighted sum, its contour-shift decomposition, the sum over
``r, t`` with its lower bound, and the closing inequality chain."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy import integrate

from .arith import DEFAULT_SIEVE_LIMIT, SieveRangeError, a_coeff, default_sieve, pseudo_f, squarefree_coprime_to_6
from .characters import RealPrimitiveCharacter, character
from .euler_products import P_at_one_closed, P_at_one_displayed, P_eval, P_vec, Q_accelerated, Q_vec, check_rt, lemma6_double_sum
from .reports import FAIL, INCONCLUSIVE, PASS
from .special_functions import L_vec, dirichlet_L, zeta, zeta_vec

DPS = 30
DEFAULT_WORK_LIMIT = 10**8
MAX_R = 1000
EXPLORATORY = "EXPLORATORY: c1 is fitted from finite runs, not proved"


class ResourceLimitError(RuntimeError):
    """A requested run exceeds the configured work limit."""

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required


@dataclass(frozen=True)
class WeightedSumSpec:
    chi: RealPrimitiveCharacter
    beta: float
    y: float
    r: int = 1
    t: int = 1

    def __post_init__(self):
        if not (7 / 8 <= self.beta < 1):
            raise ValueError(f"beta={self.beta} outside [7/8, 1)")
        if self.y < 2:
            raise ValueError("y must be at least 2")
        check_rt(self.r, self.t)


# ---------------------------------------------------------------------------
# direct sums
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _support(d: int, Y: int) -> Tuple[Tuple[int, int], ...]:
    """``(n, a(n))`` for ``n <= Y`` with ``mu^2(n) chi_0(n) a(n) != 0``.

    Those are the squarefree ``n`` built from primes with ``chi(p) = 1``;
    there ``a(n) = 2^omega(n)``.
    """
    chi = character(d)
    sieve = default_sieve(max(Y, 10))
    out = []
    for n in range(1, Y + 1):
        ok = True
        m = n
        spf = sieve.spf
        while m > 1:
            p = int(spf[m])
            m //= p
            if m % p == 0 or chi(p) != 1:
                ok = False
                break
        if ok:
            out.append((n, a_coeff(n, chi, sieve)))
    return tuple(out)


def _smoothing(n: int, y) -> mpmath.mpf:
    return 1 - mpmath.mpf(n) / y


def _check_y(y: float, sieve_limit: int) -> None:
    if y > sieve_limit:
        raise SieveRangeError(f"y = {y:g} exceeds sieve limit {sieve_limit}")


def weighted_sum(spec: WeightedSumSpec, dps: int = DPS, sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> mpmath.mpf:
    """``sum_{n <= y} mu^2(n) chi_0(n) a(n) f_r(n) f_t(n) n^{-beta} (1 - n/y)``."""
    _check_y(spec.y, sieve_limit)
    with mpmath.workdps(dps):
        y = mpmath.mpf(spec.y)
        beta = mpmath.mpf(spec.beta)
        total = mpmath.mpf(0)
        for n, a in _support(spec.chi.d, int(math.floor(spec.y))):
            c = a * pseudo_f(math.gcd(n, spec.r)) * pseudo_f(math.gcd(n, spec.t))
            if c:
                total += (mpmath.mpf(c.numerator) / c.denominator) * mpmath.power(n, -beta) * _smoothing(n, y)
        return total


# ---------------------------------------------------------------------------
# contour decomposition
# ---------------------------------------------------------------------------


@dataclass
class ContourDecomposition:
    d: int
    beta: float
    y: float
    r: int
    t: int
    direct_sum: mpmath.mpf
    main_term: mpmath.mpf
    zero_residue: mpmath.mpf
    remainder_integral: float
    quadrature_error: float
    truncation_estimate: float
    evaluation_error: float
    analytic_tail_bound: float
    V: float
    identity_defect: float
    error_budget: float
    relative_defect: float
    L_at_beta: mpmath.mpf
    verdict: str
    notes: List[str] = field(default_factory=list)


def G_line(chi: RealPrimitiveCharacter, r: int, t: int, w: np.ndarray, P_max: int = 5000):
    """``zeta(w) L(w) Q(w) P_{r,t}(w)`` at an array of points, with a propagated error bound."""
    z, ez = zeta_vec(w)
    L, eL = L_vec(w, chi)
    Q, eQ = Q_vec(chi, w, P_max)
    P = P_vec(chi, r, t, w)
    G = z * L * Q * P
    rel = ez / np.abs(z) + eL / np.abs(L) + eQ / np.abs(Q)
    return G, np.abs(G) * rel


def _panel_rule(a: float, b: float, width: float, nodes: int):
    x, wts = np.polynomial.legendre.leggauss(nodes)
    n = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n + 1)
    mid = (edges[:-1] + edges[1:]) / 2
    half = (edges[1:] - edges[:-1]) / 2
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    w = (half[:, None] * wts[None, :]).ravel()
    return pts, w


class _LineIntegral:
    """``(1/pi) Re int_a^b G(3/4+iv) y^{3/4-beta+iv} / ((3/4-beta+iv)(7/4-beta+iv)) dv``."""

    def __init__(self, chi, r, t, beta, y, width, nodes, threads, P_max):
        self.chi, self.r, self.t = chi, r, t
        self.a0 = 0.75 - beta
        self.logy = math.log(y)
        self.width, self.nodes = width, nodes
        self.threads = threads
        self.P_max = P_max
        self.max_ratio = 0.0  # sup of |G| / ((v+2)^{1/4} log^2(v+2)) seen so far

    def _segment(self, a: float, b: float, nodes: int):
        v, wts = _panel_rule(a, b, self.width, nodes)
        G, eG = G_line(self.chi, self.r, self.t, 0.75 + 1j * v, self.P_max)
        w = self.a0 + 1j * v
        kern = np.exp(w * self.logy) / (w * (w + 1))
        val = float(np.sum((G * kern).real * wts)) / math.pi
        err = float(np.sum(eG * np.abs(kern) * wts)) / math.pi
        ratio = np.abs(G) / ((v + 2) ** 0.25 * np.log(v + 2) ** 2)
        return val, err, float(np.max(ratio[v >= b / 2])) if np.any(v >= b / 2) else 0.0

    def integrate(self, a: float, b: float, chunk: float = 64.0):
        edges = list(np.arange(a, b, chunk)) + [b]
        pieces = list(zip(edges[:-1], edges[1:]))
        work = [(lo, hi, n) for lo, hi in pieces for n in (self.nodes, self.nodes // 2)]
        if self.threads and self.threads > 1:
            with ThreadPoolExecutor(self.threads) as ex:
                res = list(ex.map(lambda job: self._segment(*job), work))
        else:
            res = [self._segment(*job) for job in work]
        val = err = quad_err = 0.0
        for i in range(0, len(res), 2):
            hi_rule, lo_rule = res[i], res[i + 1]
            val += hi_rule[0]
            err += hi_rule[1]
            quad_err += abs(hi_rule[0] - lo_rule[0])
            self.max_ratio = max(self.max_ratio, hi_rule[2])
        return val, err, quad_err


def _paper_tail_integral(V: float) -> float:
    f = lambda v: (v + 2) ** 0.25 * math.log(v + 2) ** 2 / v**2
    val, _ = integrate.quad(f, V, np.inf, limit=200)
    return val


def contour_decomposition(spec: WeightedSumSpec, V: Optional[float] = None, tol: float = 1e-4,
                          V_start: float = 256.0, V_max: float = 8192.0, width: float = 0.5,
                          nodes: int = 16, threads: Optional[int] = None, P_max: int = 5000,
                          dps: int = DPS, sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> ContourDecomposition:
    """Decompose the weighted sum into main term, ``w = 0`` residue and the remainder on ``Re w = 3/4 - beta``.

    With ``V`` given the remainder is integrated over ``|v| <= V``; otherwise
    ``V`` doubles from ``V_start`` until the last doubling changes the
    integral by less than ``tol`` (relative to ``max(1, |direct|)``) or
    ``V_max`` is reached. The ``w = 0`` residue ``G(beta)`` is always kept;
    it vanishes only when ``beta`` is a zero of ``L``.
    """
    chi, beta, y, r, t = spec.chi, spec.beta, spec.y, spec.r, spec.t
    threads = threads if threads is not None else (os.cpu_count() or 1)
    with mpmath.workdps(dps):
        direct = weighted_sum(spec, dps, sieve_limit)
        b = mpmath.mpf(beta)
        yy = mpmath.mpf(y)
        L1 = dirichlet_L(1, chi, dps)
        Q1 = Q_accelerated(chi, 1, dps=dps)
        P1 = P_eval(chi, r, t, 1)
        P1m = mpmath.mpf(P1.numerator) / P1.denominator
        main = mpmath.re(L1.value) * mpmath.re(Q1.value) * P1m * mpmath.power(yy, 1 - b) / ((1 - b) * (2 - b))
        main_err = abs(main) * (L1.error_bound / abs(L1.value) + Q1.error_bound / abs(Q1.value))
        zb = zeta(b, dps)
        Lb = dirichlet_L(b, chi, dps)
        Qb = Q_accelerated(chi, b, dps=dps)
        Pb = mpmath.re(P_eval(chi, r, t, b))
        residue = mpmath.re(zb.value) * mpmath.re(Lb.value) * mpmath.re(Qb.value) * Pb
        res_err = abs(residue) * (zb.error_bound / abs(zb.value) + Lb.error_bound / abs(Lb.value)
                                  + Qb.error_bound / abs(Qb.value))

    scale = max(1.0, abs(float(direct)))
    line = _LineIntegral(chi, r, t, beta, y, width, nodes, threads, P_max)
    notes: List[str] = []
    if V is not None:
        rem, eval_err, quad_err = line.integrate(0.0, V)
        half, _, _ = _LineIntegral(chi, r, t, beta, y, width, nodes, threads, P_max).integrate(0.0, V / 2)
        trunc = abs(rem - half)
    else:
        V = V_start
        rem, eval_err, quad_err = line.integrate(0.0, V)
        trunc = math.inf
        while True:
            more, e2, q2 = line.integrate(V, 2 * V)
            rem += more
            eval_err += e2
            quad_err += q2
            V *= 2
            trunc = abs(more)
            if trunc < tol * scale or V >= V_max:
                break
        if trunc >= tol * scale:
            notes.append(f"V_max={V_max} reached before the doubling criterion was met")

    yfac = y ** (0.75 - beta)
    analytic_tail = line.max_ratio * yfac / math.pi * _paper_tail_integral(V)

    total = main + residue + rem
    defect = abs(float(direct - total))
    budget = float(main_err + res_err) + eval_err + 10 * quad_err + trunc
    if defect <= budget:
        verdict = PASS
    elif trunc >= tol * scale:
        verdict = INCONCLUSIVE
    else:
        verdict = FAIL
    return ContourDecomposition(
        d=chi.d, beta=beta, y=y, r=r, t=t, direct_sum=direct, main_term=main, zero_residue=residue,
        remainder_integral=rem, quadrature_error=quad_err, truncation_estimate=trunc,
        evaluation_error=eval_err, analytic_tail_bound=analytic_tail, V=V,
        identity_defect=defect, error_budget=budget, relative_defect=defect / scale,
        L_at_beta=mpmath.re(Lb.value), verdict=verdict, notes=notes,
    )


# ---------------------------------------------------------------------------
# sum over r, t
# ---------------------------------------------------------------------------


@dataclass
class AggregatedSum:
    d: int
    q: int
    beta: float
    R: int
    y: float
    lhs: mpmath.mpf
    lower_bound: mpmath.mpf
    rhs_main: mpmath.mpf
    rhs_main_diagonal: mpmath.mpf
    double_sum: Fraction
    defect: mpmath.mpf
    min_term: mpmath.mpf


def _inner_sum(n: int, rs: Sequence[int], cache: Dict[int, Fraction], rad: int) -> Fraction:
    g = math.gcd(n, rad)
    val = cache.get(g)
    if val is None:
        val = sum((pseudo_f(math.gcd(g, r)) / r for r in rs), Fraction(0))
        cache[g] = val
    return val


def aggregated_sum(chi: RealPrimitiveCharacter, beta: float, R: int, y: float,
                   work_limit: int = DEFAULT_WORK_LIMIT, dps: int = DPS,
                   sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> AggregatedSum:
    """The squared-pseudocharacter sum, its ``n = 1`` lower bound and the main-term prediction."""
    if R < 1:
        raise ValueError("R must be positive")
    if y < 2:
        raise ValueError("y must be at least 2")
    if R * y > work_limit:
        raise ResourceLimitError(f"R*y = {R * y:.3g} exceeds work limit {work_limit:.3g}", int(math.ceil(R * y)))
    if R > MAX_R:
        raise ResourceLimitError(f"R = {R} exceeds the cap {MAX_R}", R)
    _check_y(y, sieve_limit)
    rs = squarefree_coprime_to_6(R)
    rad = 1
    for p in default_sieve(max(R, 10)).primes(R):
        if p > 3:
            rad *= int(p)
    cache: Dict[int, Fraction] = {}
    with mpmath.workdps(dps):
        b = mpmath.mpf(beta)
        yy = mpmath.mpf(y)
        S1 = sum((Fraction(1, r) for r in rs), Fraction(0))
        lower = mpmath.mpf(S1.numerator) ** 2 / mpmath.mpf(S1.denominator) ** 2 * _smoothing(1, yy)
        lhs = mpmath.mpf(0)
        min_term = mpmath.inf
        for n, a in _support(chi.d, int(math.floor(y))):
            inner = _inner_sum(n, rs, cache, rad)
            sq = inner * inner * a
            term = (mpmath.mpf(sq.numerator) / sq.denominator) * mpmath.power(n, -b) * _smoothing(n, yy)
            min_term = min(min_term, term)
            lhs += term
        L1 = mpmath.re(dirichlet_L(1, chi, dps).value)
        Q1 = mpmath.re(Q_accelerated(chi, 1, dps=dps).value)
        pref = L1 * Q1 * mpmath.power(yy, 1 - b) / ((1 - b) * (2 - b))
        ds = lemma6_double_sum(R, chi, full_limit=0).measured
        DS = ds["grouped"]
        diag = ds["diagonal_r_eq_t"]
        rhs = pref * mpmath.mpf(DS.numerator) / DS.denominator if isinstance(DS, Fraction) else pref * DS
        rhs_diag = pref * (mpmath.mpf(diag.numerator) / diag.denominator if isinstance(diag, Fraction) else diag)
    return AggregatedSum(chi.d, chi.q, beta, R, y, lhs, lower, rhs, rhs_diag, DS, lhs - rhs, min_term)


AGGREGATE_CSV_COLUMNS = ["q", "d", "beta", "R", "y", "lhs", "lower_bound", "rhs_main", "defect"]


def aggregate_row(a: AggregatedSum) -> Dict[str, object]:
    return {"q": a.q, "d": a.d, "beta": a.beta, "R": a.R, "y": a.y, "lhs": a.lhs,
            "lower_bound": a.lower_bound, "rhs_main": a.rhs_main, "defect": a.defect}


# ---------------------------------------------------------------------------
# closing inequality chain
# ---------------------------------------------------------------------------


@dataclass
class BoundReport:
    q: int
    c1: float
    log_R: float
    R: float
    log_y: float
    R_exceeds_q: bool
    lower_bound_side: float
    chain_lhs: float
    chain_rhs_at_bound: float
    c: float
    beta_bound: float
    gap: float
    label: str = EXPLORATORY


def bound_report(q: int, c1: float) -> BoundReport:
    """Evaluate the closing chain with ``R = exp((3 log^2 q / c1)^{2/3})`` and ``y = R^32``.

    The chain reads ``c1 log^{3/2} R / log^2 q <= y^{1-beta}``; the left side
    is exactly 3 at this ``R``, and ``log 3 <= 32 (1-beta) log R`` gives
    ``beta <= 1 - c / log^{4/3} q`` with ``c = (log 3 / 32)(c1/3)^{2/3}``.
    ``lower_bound_side`` is the ``(9/pi^4) log^2 R`` term the chain starts from.
    """
    if q < 3:
        raise ValueError("q must be at least 3")
    if not (c1 > 0 and math.isfinite(c1)):
        raise ValueError("c1 must be positive")
    lq = math.log(q)
    log_R = (3 / c1 * lq**2) ** (2 / 3)
    R = math.exp(log_R) if log_R < 700 else math.inf
    chain = c1 * log_R**1.5 / lq**2
    c = math.log(3) / 32 * (c1 / 3) ** (2 / 3)
    gap = c / lq ** (4 / 3)
    chain_rhs = math.exp(32 * gap * log_R)
    lower_side = 9 / math.pi**4 * log_R**2
    return BoundReport(q, c1, log_R, R, 32 * log_R, log_R > lq, lower_side, chain, chain_rhs, c, 1 - gap, gap)


def fit_c1(runs: Sequence[AggregatedSum]) -> float:
    """Largest ``c1`` with ``c1 log^{3/2} R / log^2 q <= y^{1-beta}`` consistent with every run.

    Each run contributes ``lower_bound / (log^2 R C)`` where
    ``C = rhs_main / (y^{1-beta} log^2 q log^{1/2} R)``; the minimum over runs is returned.
    """
    vals = []
    for a in runs:
        if a.R < 2 or a.q < 3:
            continue
        lR, lq = math.log(a.R), math.log(a.q)
        C = float(a.rhs_main) / (a.y ** (1 - a.beta) * lq**2 * math.sqrt(lR))
        vals.append(float(a.lower_bound) / (lR**2 * C))
    if not vals:
        raise ValueError("no run with R >= 2 and q >= 3")
    return min(vals)
