"""Closed-form state counts and the lattice counts behind them.

Three ways to get Phi(N) without walking the monoid:

* :func:`phi` -- the lattice count ``upsilon(N**2 - 4)`` (production path);
* :func:`phi_divisor_sum` -- twice a sum of restricted divisor counts;
* :func:`phi_boca` -- pairs and triples tied together by modular inverses.

:func:`psi_batch` tabulates Phi and its prefix sums for every trace up to a
bound with a segmented divisor sieve; the tables in this module are exact
int64 arithmetic throughout.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .arith import (
    check_width,
    divisor_count,
    divisor_count_below,
    divisor_count_below_halfsum,
    divisor_count_segment,
    divisors,
    is_square,
    modinv,
    primes_upto,
)
from .errors import (
    BadBinning,
    BadResidue,
    BadTrace,
    IntegerOverflow,
    NonPositive,
    SquareInput,
)


class LatticeTriple(NamedTuple):
    lam: int
    mu: int
    m: int


def _check_trace(N: int) -> None:
    if N < 3:
        raise BadTrace(f"trace must be >= 3, got {N}")


def _check_residue(X: int) -> None:
    if X < 1:
        raise NonPositive(f"X must be positive, got {X}")
    if X % 4 not in (0, 1):
        raise BadResidue(f"X = {X} is {X % 4} mod 4; need 0 or 1")


def _m_values(X: int) -> range:
    """Integers ``m`` with ``m*m < X`` and ``m*m = X (mod 4)``, ascending."""
    top = math.isqrt(X - 1)
    parity = X % 2
    start = -top if (top - parity) % 2 == 0 else -top + 1
    return range(start, top + 1, 2)


# -- lattice counts ----------------------------------------------------------


def upsilon(X: int) -> int:
    """Number of triples ``(lam, mu, m)``, ``lam, mu >= 1``, with ``4*lam*mu + m*m = X``."""
    if X < 1:
        raise NonPositive(f"X must be positive, got {X}")
    check_width(X)
    if X % 4 not in (0, 1):
        return 0
    total = 0
    for m in _m_values(X):
        if m >= 0:
            c = divisor_count((X - m * m) // 4)
            total += c if m == 0 else 2 * c
    return total


def upsilon_cut(X: int) -> int:
    """Like :func:`upsilon` but only counting ``lam < (m + sqrt(X)) / 2``."""
    _check_residue(X)
    check_width(X)
    return sum(divisor_count_below_halfsum((X - m * m) // 4, m, X) for m in _m_values(X))


def key_lemma_delta(X: int) -> int:
    """``upsilon(X) - 2 * upsilon_cut(X)``; zero unless ``X`` is a perfect square."""
    _check_residue(X)
    return upsilon(X) - 2 * upsilon_cut(X)


def lattice_triples(X: int) -> Iterator[LatticeTriple]:
    if X < 1:
        raise NonPositive(f"X must be positive, got {X}")
    if X % 4 not in (0, 1):
        return
    for m in _m_values(X):
        n = (X - m * m) // 4
        for lam in divisors(n):
            yield LatticeTriple(lam, n // lam, m)


@dataclass(frozen=True)
class PartitionCensus:
    X: int
    L0: int
    L0_less: int
    L1: int
    L2: int
    L3: int


def partition_census(X: int) -> PartitionCensus:
    """Sizes of the pieces of the triple set used to compare the two lattice counts.

    ``L0`` holds the triples with ``m = 0`` and ``L0_less`` those among them
    with ``2*lam < sqrt(X)``.  Triples with ``m > 0`` are split by where
    ``2*lam`` falls relative to ``sqrt(X) - m`` and ``sqrt(X) + m``:
    below (``L1``), between inclusive (``L2``), above (``L3``).
    """
    _check_residue(X)
    if is_square(X):
        raise SquareInput(f"X = {X} is a perfect square")
    L0 = L0_less = L1 = L2 = L3 = 0
    for lam, _, m in lattice_triples(X):
        if m == 0:
            L0 += 1
            if 4 * lam * lam < X:
                L0_less += 1
        elif m > 0:
            below = (2 * lam + m) ** 2 < X
            above = 2 * lam - m > 0 and (2 * lam - m) ** 2 > X
            if below:
                L1 += 1
            elif above:
                L3 += 1
            else:
                L2 += 1
    return PartitionCensus(X, L0, L0_less, L1, L2, L3)


def upsilon_table(X_max: int) -> np.ndarray:
    """``out[X] = upsilon(X)`` for ``0 <= X <= X_max``, from a divisor sieve."""
    out = np.zeros(X_max + 1, dtype=np.int64)
    if X_max < 5:
        return out
    d = divisor_count_segment(1, X_max // 4 + 1)
    for m in range(math.isqrt(X_max - 4) + 1):
        n = (X_max - m * m) // 4
        out[m * m + 4 :: 4][:n] += d[:n] if m == 0 else 2 * d[:n]
    return out


def upsilon_cut_table(X_max: int) -> np.ndarray:
    """``out[X] = upsilon_cut(X)`` for ``0 <= X <= X_max`` (zero off the 0, 1 mod 4 classes).

    Walks every triple directly: all products ``lam * mu <= X_max / 4``
    against every admissible ``m``, keeping those with ``2*lam - m < sqrt(X)``.
    """
    out = np.zeros(X_max + 1, dtype=np.int64)
    P_max = X_max // 4
    if P_max < 1:
        return out
    lam_parts, prod_parts = [], []
    for lam in range(1, P_max + 1):
        mu = np.arange(1, P_max // lam + 1, dtype=np.int64)
        lam_parts.append(np.full(mu.size, lam, dtype=np.int64))
        prod_parts.append(lam * mu)
    lam_all = np.concatenate(lam_parts)
    prod_all = np.concatenate(prod_parts)
    order = np.argsort(prod_all, kind="stable")
    lam_all, prod_all = lam_all[order], prod_all[order]
    top = math.isqrt(X_max - 4)
    for m in range(-top, top + 1):
        k = np.searchsorted(prod_all, (X_max - m * m) // 4, side="right")
        lam, X = lam_all[:k], 4 * prod_all[:k] + m * m
        t = 2 * lam - m
        keep = (t < 0) | (t * t < X)
        out += np.bincount(X[keep], minlength=X_max + 1)
    return out


# -- Phi by three formulas ---------------------------------------------------


def phi_divisor_sum(N: int) -> int:
    """``2 * sum_{1 <= n < N} #{k | nN - n^2 - 1 : k < n}``."""
    _check_trace(N)
    check_width(N * N)
    return 2 * sum(divisor_count_below(n * (N - n) - 1, n) for n in range(1, N))


@lru_cache(maxsize=4096)
def _inverse_table(m: int) -> np.ndarray:
    """``tab[r] = inv_m(r)`` in ``{1, ..., m}`` for ``r`` coprime to ``m``, else 0."""
    tab = np.zeros(m, dtype=np.int64)
    for r in range(m):
        if math.gcd(r, m) == 1:
            tab[r] = modinv(r, m)
    return tab


def boca_counts(N: int) -> tuple[int, int, int]:
    """``(pairs, triples, merged)`` for the modular-inverse description of Phi(N)/2.

    ``pairs`` counts coprime ``1 <= q < q' < N`` with ``q' + inv_q(q') = N``;
    ``triples`` counts coprime ``1 <= p < q < N`` and ``t >= 1`` with
    ``q + inv_p(q) + p*t = N``; ``merged`` is the triple count with ``t >= 0``
    allowed, which must equal ``pairs + triples``.
    """
    _check_trace(N)
    pairs = triples = merged = 0
    for p in range(1, N - 1):
        inv = _inverse_table(p)
        q = np.arange(p + 1, N, dtype=np.int64)
        iq = inv[q % p]
        coprime = iq > 0
        # pair (p, q): q plays q', p plays q
        pairs += int(np.count_nonzero(coprime & (q + iq == N)))
        rest = N - q - iq
        ok = coprime & (rest >= 0) & (rest % p == 0)
        merged += int(np.count_nonzero(ok))
        triples += int(np.count_nonzero(ok & (rest >= p)))
    return pairs, triples, merged


def phi_boca(N: int) -> int:
    pairs, triples, merged = boca_counts(N)
    if merged != pairs + triples:
        raise ArithmeticError(
            f"N={N}: t>=0 triple count {merged} != pairs {pairs} + triples {triples}"
        )
    return 2 * (pairs + triples)


def phi(N: int) -> int:
    """Phi(N) computed as ``upsilon(N**2 - 4)``."""
    _check_trace(N)
    check_width(N * N)
    return upsilon(N * N - 4)


# -- batch tabulation --------------------------------------------------------


class PsiRow(NamedTuple):
    n: int
    phi: int
    psi: int


SEGMENT_SIZE = 1 << 22


def _phi_segment(args: tuple[int, int, int, np.ndarray]) -> np.ndarray:
    """Contribution of values ``v`` in ``[lo, hi)`` to ``Phi(n) = sum_m d((n^2-4-m^2)/4)``."""
    lo, hi, n_max, primes = args
    d = divisor_count_segment(lo, hi, primes)
    acc = np.zeros(n_max + 1, dtype=np.int64)
    n_first = max(3, math.isqrt(4 * lo + 4))
    for n in range(n_first, n_max + 1):
        T = n * n - 4
        if T < 4 * lo:
            continue
        m_hi = math.isqrt(T - 4 * lo)
        m_lo = 0 if T - 4 * hi < 0 else math.isqrt(T - 4 * hi) + 1
        parity = n & 1
        if (m_lo & 1) != parity:
            m_lo += 1
        if (m_hi & 1) != parity:
            m_hi -= 1
        if m_hi < m_lo:
            continue
        ms = np.arange(m_lo, m_hi + 1, 2, dtype=np.int64)
        vals = d[(T - ms * ms) // 4 - lo]
        s = 2 * int(vals.sum())
        if m_lo == 0:
            s -= int(vals[0])  # m = 0 has no mirror image
        acc[n] += s
    return acc


def phi_table(n_max: int, jobs: int = 1, segment_size: int = SEGMENT_SIZE) -> np.ndarray:
    """``out[n] = Phi(n)`` for ``3 <= n <= n_max`` (entries below 3 are zero).

    The values ``(n^2 - 4 - m^2) / 4`` are swept in fixed segments; each
    segment gets its divisor counts from a sieve over primes up to
    ``n_max / 2`` and adds into every ``Phi(n)`` whose terms land there.
    Memory is ``O(segment_size + n_max)``.  Segments are farmed out to
    ``jobs`` processes and merged in segment order.
    """
    _check_trace(n_max)
    if n_max * n_max >= 1 << 62:
        raise IntegerOverflow(f"n_max = {n_max} exceeds the int64 batch range")
    v_max = (n_max * n_max - 4) // 4
    primes = primes_upto(math.isqrt(v_max))
    tasks = [
        (lo, min(lo + segment_size, v_max + 1), n_max, primes)
        for lo in range(1, v_max + 1, segment_size)
    ]
    out = np.zeros(n_max + 1, dtype=np.int64)
    if jobs <= 1 or len(tasks) == 1:
        for part in map(_phi_segment, tasks):
            out += part
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_phi_segment, tasks):
                out += part
    return out


def psi_batch(N_max: int, jobs: int = 1) -> list[PsiRow]:
    """Rows ``(n, Phi(n), Psi(n))`` for ``3 <= n <= N_max``."""
    table = phi_table(N_max, jobs)
    rows, psi = [], 0
    for n in range(3, N_max + 1):
        v = int(table[n])
        psi += v
        rows.append(PsiRow(n, v, psi))
    return rows


# -- rho ---------------------------------------------------------------------


def rho(m: int, a: int) -> int:
    """Count ``0 <= b < 2a`` with ``b^2 = m (mod 4a)`` and ``gcd(a, b, c) = 1``, ``c = (b^2 - m) / 4a``.

    ``c`` may be zero or negative; the gcd is over absolute values.
    """
    if a < 1:
        raise NonPositive(f"rho needs a >= 1, got {a}")
    check_width(m, a)
    if a < 10**8 and abs(m) < 10**9:
        b = np.arange(2 * a, dtype=np.int64)
        num = b * b - m
        hit = num % (4 * a) == 0
        b, c = b[hit], num[hit] // (4 * a)
        return int(np.count_nonzero(np.gcd(np.gcd(a, b), np.abs(c)) == 1))
    count = 0
    for b in range(2 * a):
        if (b * b - m) % (4 * a) == 0:
            c = (b * b - m) // (4 * a)
            if math.gcd(math.gcd(a, b), c) == 1:
                count += 1
    return count


# -- normalised counts -------------------------------------------------------


class PhiStarSample(NamedTuple):
    n: int
    phi: int
    phi_star: float


def phi_star_samples(N_max: int, phi_values: Sequence[int] | None = None) -> list[PhiStarSample]:
    """``Phi(n) / (n log n)`` for ``3 <= n <= N_max``.

    ``phi_values`` may supply a precomputed table indexed by ``n``.
    """
    _check_trace(N_max)
    if phi_values is None:
        phi_values = phi_table(N_max)
    return [
        PhiStarSample(n, int(phi_values[n]), int(phi_values[n]) / (n * math.log(n)))
        for n in range(3, N_max + 1)
    ]


@dataclass(frozen=True)
class Histogram:
    N_max: int
    edges: np.ndarray  # bin k is (edges[k], edges[k+1]]
    freq: np.ndarray
    overflow: float

    @property
    def centers(self) -> np.ndarray:
        return (self.edges[:-1] + self.edges[1:]) / 2

    def rows(self) -> list[tuple[float, float]]:
        return list(zip(self.centers.tolist(), self.freq.tolist()))


def phi_star_histogram(
    N_max: int,
    bin_width: float,
    t_max: float,
    phi_values: Sequence[int] | None = None,
) -> Histogram:
    """Frequencies ``#{3 <= n <= N_max : Phi*(n) in (a, b]} / N_max`` on a fixed grid.

    Bins are half-open on the left and cover ``(0, t_max]``; anything larger
    goes to ``overflow``.
    """
    if not bin_width > 0 or not t_max > 0:
        raise BadBinning(f"bin_width and t_max must be positive, got {bin_width}, {t_max}")
    samples = phi_star_samples(N_max, phi_values)
    v = np.array([s.phi_star for s in samples])
    nbins = max(1, math.ceil(t_max / bin_width - 1e-12))
    edges = np.minimum(np.arange(nbins + 1) * bin_width, t_max)
    idx = np.searchsorted(edges, v, side="left") - 1
    inside = v <= t_max
    counts = np.bincount(idx[inside], minlength=nbins)[:nbins]
    return Histogram(N_max, edges, counts / N_max, float(np.count_nonzero(~inside)) / N_max)
