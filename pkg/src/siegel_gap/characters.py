"""Real primitive Dirichlet characters as Kronecker symbols of fundamental discriminants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

from .arith import trial_factorize

# (2/b) for odd b, indexed by b mod 8
_TAB2 = (0, 1, 0, -1, 0, -1, 0, 1)


def kronecker(a: int, b: int) -> int:
    """Kronecker symbol ``(a/b)``, defined for all integer pairs."""
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    v = 0
    while b % 2 == 0:
        v += 1
        b //= 2
    k = 1 if v % 2 == 0 else _TAB2[a & 7]
    if b < 0:
        b = -b
        if a < 0:
            k = -k
    while True:
        # b odd and positive here
        if a == 0:
            return k if b == 1 else 0
        v = 0
        while a % 2 == 0:
            v += 1
            a //= 2
        if v % 2:
            k *= _TAB2[b & 7]
        if a & b & 2:
            k = -k
        r = abs(a)
        a = b % r
        b = r


def _squarefree(m: int) -> bool:
    return m != 0 and all(e == 1 for _, e in trial_factorize(abs(m)))


def is_fundamental_discriminant(d: int) -> bool:
    """True for fundamental discriminants other than 1."""
    if d in (0, 1):
        return False
    if d % 4 == 1:
        return _squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and _squarefree(m)
    return False


def enumerate_fundamental_discriminants(lo: int, hi: int) -> List[int]:
    if lo > hi:
        raise ValueError("empty range: lo > hi")
    return [d for d in range(lo, hi + 1) if is_fundamental_discriminant(d)]


@dataclass(frozen=True)
class RealPrimitiveCharacter:
    """The character ``n -> (d/n)`` of conductor ``q = |d|``."""

    d: int
    _table: Tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_fundamental_discriminant(self.d):
            raise ValueError(f"{self.d} is not a fundamental discriminant")
        q = abs(self.d)
        object.__setattr__(self, "_table", tuple(kronecker(self.d, n) for n in range(q)))

    @property
    def q(self) -> int:
        return abs(self.d)

    @property
    def parity(self) -> int:
        """``chi(-1)``: +1 for even (real quadratic), -1 for odd characters."""
        return 1 if self.d > 0 else -1

    def __call__(self, n: int) -> int:
        return self._table[n % self.q]

    def values(self) -> Tuple[int, ...]:
        """``chi(0), ..., chi(q - 1)``."""
        return self._table

    def prime_divisors_of_modulus(self) -> List[int]:
        return [p for p, _ in trial_factorize(self.q)]

    def max_partial_sum(self) -> int:
        """``max_x |sum_{n <= x} chi(n)|``; finite because period sums vanish."""
        s = best = 0
        for v in self._table[1:] + (self._table[0],):
            s += v
            best = max(best, abs(s))
        return best


def chi(c: RealPrimitiveCharacter, n: int) -> int:
    return c(n)


def chi0(q: int, n: int) -> int:
    """Principal character modulo ``q``."""
    if q < 1:
        raise ValueError("modulus must be positive")
    return 1 if math.gcd(n, q) == 1 else 0


def character(d: int) -> RealPrimitiveCharacter:
    return RealPrimitiveCharacter(d)
