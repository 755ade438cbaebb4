"""Exact integer primitives: square roots, inverses, divisor counts, characters.

Nothing in here touches floating point.  Python integers never wrap, but the
counting paths promise signed 128-bit semantics, so :func:`check_width`
rejects anything outside that range instead of pretending to support it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    BadDiscriminant,
    IntegerOverflow,
    NonPositive,
    NotCoprime,
)

INT_LIMIT = 1 << 127


def check_width(*values: int) -> None:
    for v in values:
        if not -INT_LIMIT <= v < INT_LIMIT:
            raise IntegerOverflow(f"{v} exceeds the signed 128-bit range")


def isqrt(x: int) -> int:
    if x < 0:
        raise NonPositive(f"isqrt of negative number {x}")
    return math.isqrt(x)


def is_square(x: int) -> bool:
    return x >= 0 and math.isqrt(x) ** 2 == x


def modinv(x: int, m: int) -> int:
    """Inverse of ``x`` modulo ``m`` as a representative in ``{1, ..., m}``.

    The range is closed at ``m`` rather than at 0, so ``modinv(x, 1) == 1``.
    """
    if m < 1:
        raise NonPositive(f"modulus must be positive, got {m}")
    if math.gcd(x, m) != 1:
        raise NotCoprime(f"gcd({x}, {m}) = {math.gcd(x, m)}")
    if m == 1:
        return 1
    return pow(x, -1, m)


# -- primes and factorisation ------------------------------------------------

_prime_cache = np.array([2, 3, 5, 7], dtype=np.int64)
_prime_cache_limit = 10
_SIEVE_CAP = 10**7


def primes_upto(n: int) -> np.ndarray:
    """All primes ``<= n`` as an int64 array (Eratosthenes, cached)."""
    global _prime_cache, _prime_cache_limit
    if n <= _prime_cache_limit:
        return _prime_cache[: np.searchsorted(_prime_cache, n, side="right")]
    limit = max(n, 2 * _prime_cache_limit)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    _prime_cache = np.flatnonzero(sieve).astype(np.int64)
    _prime_cache_limit = limit
    return _prime_cache[: np.searchsorted(_prime_cache, n, side="right")]


def factorize(x: int) -> dict[int, int]:
    """Prime factorisation of ``x >= 1`` by trial division over sieved primes."""
    if x < 1:
        raise NonPositive(f"cannot factor {x}")
    out: dict[int, int] = {}
    root = math.isqrt(x)
    for p in primes_upto(min(root, _SIEVE_CAP)).tolist():
        if p * p > x:
            break
        if x % p == 0:
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            out[p] = e
    if root > _SIEVE_CAP:
        # beyond the sieve: plain odd trial division
        p = _SIEVE_CAP + 1 if _SIEVE_CAP % 2 == 0 else _SIEVE_CAP + 2
        while p * p <= x:
            while x % p == 0:
                x //= p
                out[p] = out.get(p, 0) + 1
            p += 2
    if x > 1:
        out[x] = out.get(x, 0) + 1
    return out


def divisors(x: int) -> list[int]:
    """Sorted list of the positive divisors of ``x``."""
    divs = [1]
    for p, e in factorize(x).items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def divisor_count(x: int) -> int:
    if x < 1:
        raise NonPositive(f"divisor_count needs x >= 1, got {x}")
    check_width(x)
    n = 1
    for e in factorize(x).values():
        n *= e + 1
    return n


def divisor_count_below(x: int, n: int) -> int:
    """Number of positive divisors of ``x`` strictly less than the integer ``n``."""
    if x < 1:
        raise NonPositive(f"divisor_count_below needs x >= 1, got {x}")
    if n > x:
        return divisor_count(x)
    return sum(1 for k in divisors(x) if k < n)


def divisor_count_below_halfsum(x: int, m: int, X: int) -> int:
    """Number of divisors ``k`` of ``x`` with ``k < (m + sqrt(X)) / 2``.

    The irrational cutoff is decided by squaring: ``2k - m < sqrt(X)`` holds
    iff ``2k - m < 0`` or ``(2k - m)**2 < X``.
    """
    if x < 1:
        raise NonPositive(f"divisor_count_below_halfsum needs x >= 1, got {x}")
    if X < 0:
        raise NonPositive(f"X must be nonnegative, got {X}")
    check_width(x, m, X)
    count = 0
    for k in divisors(x):
        t = 2 * k - m
        if t < 0 or t * t < X:
            count += 1
        else:
            break  # divisors are sorted and the condition is monotone in k
    return count


def mobius(n: int) -> int:
    if n < 1:
        raise NonPositive(f"mobius needs n >= 1, got {n}")
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for arbitrary integers.

    ``(D/0)`` is 1 for ``D = ±1`` and 0 otherwise.
    """
    if n == 0:
        return 1 if abs(D) == 1 else 0
    result = 1
    if n < 0:
        n = -n
        if D < 0:
            result = -result
    v = (n & -n).bit_length() - 1
    n >>= v
    if v:
        if D % 2 == 0:
            return 0
        if v % 2 and D % 8 in (3, 5):
            result = -result
    # n is now odd and positive: Jacobi symbol with a possibly negative top
    a = D % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# -- discriminants -----------------------------------------------------------


def is_squarefree(n: int) -> bool:
    if n == 0:
        return False
    return all(e == 1 for e in factorize(abs(n)).values())


def is_fundamental(D: int) -> bool:
    """True for fundamental discriminants, including ``D = 1``."""
    if D % 4 == 1:
        return is_squarefree(D)
    if D % 4 == 0:
        k = D // 4
        return k % 4 in (2, 3) and is_squarefree(k)
    return False


@dataclass(frozen=True)
class DiscDecomp:
    X: int
    D: int
    r: int


@lru_cache(maxsize=65536)
def fund_disc_decompose(X: int) -> DiscDecomp:
    """Write ``X = D * r**2`` with ``D`` a fundamental discriminant, ``r >= 1``."""
    if X == 0 or X % 4 not in (0, 1):
        raise BadDiscriminant(f"{X} is not a nonzero discriminant (need X = 0, 1 mod 4)")
    check_width(X)
    core, root = (1 if X > 0 else -1), 1
    for p, e in factorize(abs(X)).items():
        root *= p ** (e // 2)
        if e % 2:
            core *= p
    if core % 4 == 1:
        return DiscDecomp(X, core, root)
    # core = 2, 3 mod 4 forces root to be even
    return DiscDecomp(X, 4 * core, root // 2)


# -- batch divisor counts ----------------------------------------------------


def divisor_count_segment(lo: int, hi: int, primes: np.ndarray | None = None) -> np.ndarray:
    """``d(v)`` for every ``v`` in ``[lo, hi)`` as an int64 array.

    Segmented sieve: every prime ``p <= sqrt(hi)`` is divided out of a running
    remainder, one power at a time, and whatever survives is a single large
    prime.  ``primes`` must contain all primes up to ``isqrt(hi - 1)``.
    """
    if lo < 1:
        raise NonPositive(f"segment must start at 1 or above, got {lo}")
    if hi <= lo:
        return np.zeros(0, dtype=np.int64)
    root = math.isqrt(hi - 1)
    if primes is None:
        primes = primes_upto(root)
    rem = np.arange(lo, hi, dtype=np.int64)
    d = np.ones(hi - lo, dtype=np.int64)
    for p in primes.tolist():
        if p > root:
            break
        pk, k = p, 1
        while pk < hi:
            start = (-lo) % pk
            if start < hi - lo:
                rem[start::pk] //= p
                view = d[start::pk]
                view //= k
                view *= k + 1
            pk *= p
            k += 1
    d[rem > 1] *= 2
    return d
