"""Integer factorization sieve and the elementary multiplicative functions.

Everything here is exact: integers and :class:`fractions.Fraction`.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

DEFAULT_SIEVE_LIMIT = 10**7
CACHE_ENV = "SIEGEL_GAP_CACHE"
CACHE_MAGIC = b"SGSV1"

Factorization = List[Tuple[int, int]]


class SieveRangeError(ValueError):
    """Raised when an argument exceeds the sieve limit."""


def _spf_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.uint32)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    idx = np.nonzero(spf == 0)[0]
    spf[idx] = idx
    return spf


class FactorSieve:
    """Smallest-prime-factor table for ``2 <= n <= limit``.

    The table is built once and never mutated afterwards. If the environment
    variable ``SIEGEL_GAP_CACHE`` names a directory, tables are persisted
    there (magic ``SGSV1`` followed by little-endian uint32 entries for
    ``n = 0..limit``).
    """

    def __init__(self, limit: int = DEFAULT_SIEVE_LIMIT, cache_dir: Optional[str] = None):
        if limit < 2:
            raise ValueError("sieve limit must be at least 2")
        self.limit = int(limit)
        cache_dir = cache_dir if cache_dir is not None else os.environ.get(CACHE_ENV)
        spf = None
        if cache_dir:
            path = Path(cache_dir) / f"spf_{self.limit}.sgsv"
            if path.exists():
                spf = load_spf(path)
                if len(spf) != self.limit + 1:
                    spf = None
            if spf is None:
                spf = _spf_table(self.limit)
                Path(cache_dir).mkdir(parents=True, exist_ok=True)
                save_spf(path, spf)
        else:
            spf = _spf_table(self.limit)
        spf.setflags(write=False)
        self.spf = spf
        self._omega = None
        self._primes = None

    def __repr__(self) -> str:
        return f"FactorSieve(limit={self.limit})"

    def _check(self, n: int) -> None:
        if n < 1:
            raise ValueError(f"expected a positive integer, got {n}")
        if n > self.limit:
            raise SieveRangeError(f"{n} exceeds sieve limit {self.limit}")

    def factorize(self, n: int) -> Factorization:
        self._check(n)
        out: Factorization = []
        spf = self.spf
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        return out

    def primes(self, upto: Optional[int] = None) -> np.ndarray:
        if self._primes is None:
            idx = np.arange(self.limit + 1, dtype=np.int64)
            mask = self.spf == idx
            mask[:2] = False
            self._primes = np.nonzero(mask)[0]
        if upto is None:
            return self._primes
        if upto > self.limit:
            raise SieveRangeError(f"{upto} exceeds sieve limit {self.limit}")
        return self._primes[: np.searchsorted(self._primes, upto, side="right")]

    def is_prime(self, n: int) -> bool:
        if n < 2:
            return False
        self._check(n)
        return int(self.spf[n]) == n

    def omega_table(self) -> np.ndarray:
        """Array ``w`` with ``w[n] = omega(n)`` for ``0 <= n <= limit`` (``w[0] = 0``)."""
        if self._omega is None:
            w = np.zeros(self.limit + 1, dtype=np.uint8)
            for p in self.primes():
                w[p::p] += 1
            w.setflags(write=False)
            self._omega = w
        return self._omega

    def squarefree_mask(self) -> np.ndarray:
        """Boolean array, True at squarefree ``n >= 1``."""
        sf = np.ones(self.limit + 1, dtype=bool)
        sf[0] = False
        for p in self.primes(math.isqrt(self.limit)):
            sf[p * p :: p * p] = False
        return sf


def save_spf(path, spf: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(CACHE_MAGIC)
        fh.write(np.asarray(spf, dtype="<u4").tobytes())


def load_spf(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[: len(CACHE_MAGIC)] != CACHE_MAGIC:
        raise ValueError(f"{path}: not a sieve cache file")
    return np.frombuffer(raw[len(CACHE_MAGIC) :], dtype="<u4").astype(np.uint32)


_default_sieve: Optional[FactorSieve] = None


def default_sieve(min_limit: int = 10**5) -> FactorSieve:
    """Shared sieve, grown on demand (never shrunk)."""
    global _default_sieve
    if _default_sieve is None or _default_sieve.limit < min_limit:
        grown = 2 * _default_sieve.limit if _default_sieve is not None else 10**5
        limit = max(min_limit, min(grown, DEFAULT_SIEVE_LIMIT))
        _default_sieve = FactorSieve(limit)
    return _default_sieve


def factorize(n: int, sieve: Optional[FactorSieve] = None) -> Factorization:
    if n == 1:
        return []
    if sieve is None:
        sieve = default_sieve(n)
    return sieve.factorize(n)


def trial_factorize(n: int) -> Factorization:
    """Plain trial division; slow, used as a cross-check and for small ad-hoc inputs."""
    if n < 1:
        raise ValueError(n)
    out: Factorization = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def prime_divisors(n: int) -> List[int]:
    return [p for p, _ in trial_factorize(n)]


def is_squarefree(n: int, sieve: Optional[FactorSieve] = None) -> bool:
    return all(e == 1 for _, e in factorize(n, sieve))


def mobius(n: int, sieve: Optional[FactorSieve] = None) -> int:
    fac = factorize(n, sieve)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def omega(n: int, sieve: Optional[FactorSieve] = None) -> int:
    return len(factorize(n, sieve))


def a_coeff(n: int, chi, sieve: Optional[FactorSieve] = None) -> int:
    """``sum_{d | n} chi(d)`` via the product over ``p^alpha || n`` of ``1 + chi(p) + ... + chi(p)^alpha``."""
    out = 1
    for p, e in factorize(n, sieve):
        c = chi(p)
        if c == 1:
            out *= e + 1
        elif c == -1:
            # 1 - 1 + 1 - ... : 1 for even alpha, 0 for odd
            if e % 2:
                return 0
        # c == 0 contributes a factor 1
    return out


def a_coeff_bruteforce(n: int, chi) -> int:
    return sum(chi(d) for d in range(1, n + 1) if n % d == 0)


def pseudo_f(n: int, sieve: Optional[FactorSieve] = None) -> Fraction:
    """``mu(n) n / 2^omega(n)``; zero when ``n`` is not squarefree."""
    fac = factorize(n, sieve)
    if any(e > 1 for _, e in fac):
        return Fraction(0)
    sign = -1 if len(fac) % 2 else 1
    return Fraction(sign * n, 2 ** len(fac))


def pseudo_f_r(n: int, r: int, sieve: Optional[FactorSieve] = None) -> Fraction:
    """The pseudocharacter ``f_r(n) = f(gcd(n, r))``."""
    if n < 1 or r < 1:
        raise ValueError("n and r must be positive")
    return pseudo_f(math.gcd(n, r), sieve)


def pseudo_f_r_at_prime(p: int, r: int) -> Fraction:
    return Fraction(-p, 2) if r % p == 0 else Fraction(1)


def squarefree_coprime_to_6(limit: int) -> List[int]:
    """Squarefree ``r <= limit`` with ``gcd(r, 6) = 1``, ascending."""
    if limit < 1:
        return []
    sf = np.ones(limit + 1, dtype=bool)
    sf[0] = False
    sf[2::2] = False
    sf[3::3] = False
    p = 5
    while p * p <= limit:
        sf[p * p :: p * p] = False
        p += 2
    return [int(r) for r in np.nonzero(sf)[0]]
