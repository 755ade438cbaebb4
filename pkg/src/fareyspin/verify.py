"""Cross-checks between the independent routes to Phi and the lattice counts."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import monoid, spinchain
from .arith import isqrt, is_square

# the two count tables cost about X log X; larger X is left to the library calls
KEY_LEMMA_X_MAX = 10**5


@dataclass(frozen=True)
class CheckResult:
    name: str
    lo: int
    hi: int
    cases: int
    mismatch: str | None = None

    @property
    def ok(self) -> bool:
        return self.mismatch is None


def _slow_routes(N: int) -> tuple[int, int, int, int]:
    X = N * N - 4
    return (
        spinchain.phi_divisor_sum(N),
        spinchain.phi_boca(N),
        spinchain.upsilon(X),
        2 * spinchain.upsilon_cut(X),
    )


def four_way(lo: int, hi: int, jobs: int = 1) -> CheckResult:
    """Enumeration vs divisor sum vs modular inverses vs lattice count, for ``lo <= N <= hi``.

    ``2 * upsilon_cut(N^2 - 4)`` rides along as a fifth column.
    """
    lo = max(lo, 3)
    oracle = monoid.trace_counts(hi, jobs)
    table = spinchain.phi_table(hi, jobs)
    Ns = list(range(lo, hi + 1))
    if jobs <= 1:
        slow = list(map(_slow_routes, Ns))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            slow = list(pool.map(_slow_routes, Ns, chunksize=8))
    for N, (ds, boca, ups, cut2) in zip(Ns, slow):
        values = (oracle[N], ds, boca, ups, cut2, int(table[N]))
        if len(set(values)) != 1:
            return CheckResult(
                "four_way", lo, hi, len(Ns),
                f"N={N}: oracle={values[0]} divisor={ds} boca={boca} "
                f"upsilon={ups} 2*upsilon_cut={cut2} batch={values[5]}",
            )
    return CheckResult("four_way", lo, hi, len(Ns))


def key_lemma(X_max: int) -> CheckResult:
    """``upsilon(X) - 2 upsilon_cut(X)`` is 0, or ``sqrt(X) - 1`` for squares, for ``X <= X_max``."""
    ups = spinchain.upsilon_table(X_max)
    cut = spinchain.upsilon_cut_table(X_max)
    cases = 0
    for X in range(1, X_max + 1):
        if X % 4 not in (0, 1):
            continue
        cases += 1
        expect = isqrt(X) - 1 if is_square(X) else 0
        got = int(ups[X]) - 2 * int(cut[X])
        if got != expect:
            return CheckResult(
                "key_lemma", 1, X_max, cases,
                f"X={X}: upsilon={int(ups[X])} upsilon_cut={int(cut[X])} delta={got} expected={expect}",
            )
    return CheckResult("key_lemma", 1, X_max, cases)


def verify_range(lo: int, hi: int, jobs: int = 1) -> list[CheckResult]:
    """The full suite behind the ``verify`` command."""
    return [four_way(lo, hi, jobs), key_lemma(min(hi * hi, KEY_LEMMA_X_MAX))]
