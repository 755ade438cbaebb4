"""Analytic main terms: the Psi(N) asymptotics and the main term A(X) for upsilon(X).

Everything here is floating point with an explicit ``tol``.  The exact counts
come in from :mod:`fareyspin.spinchain`.

Two evaluators for ``L_D(1)`` and ``L_D'(1)/L_D(1)``, with ``L_D`` the
Dirichlet series of the Kronecker character ``n -> (D/n)``:

``"periodic"``
    direct sums over ``K`` complete periods of the character, closed off by
    summation by parts.  The partial character sums ``S(a)`` repeat with
    period ``|D|`` and average out, so the tail is ``sum_a S(a) * sum_k
    [w(kq+a) - w(kq+a+1)]``; the inner sum is replaced by its midpoint
    integral, leaving an ``O(K**-3)`` error.  ``K`` doubles until two
    successive estimates agree to ``tol``.  Works for every fundamental
    ``D != 1`` but costs ``O(|D|)`` per period.

``"theta"``
    for ``D > 1`` the character is even and primitive, and the completed
    function ``(D/pi)^(s/2) Gamma(s/2) L_D(s)`` is invariant under
    ``s -> 1 - s``.  Splitting its theta integral at 1 gives rapidly
    convergent series in ``y_n = pi n^2 / D``, about ``sqrt(D log(1/tol))``
    terms in all.

``"auto"`` takes the periodic sums for ``|D| <= 1000`` or ``D < 0`` and
the theta series otherwise.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy import special

from .arith import (
    divisors,
    fund_disc_decompose,
    is_fundamental,
    is_square,
    kronecker,
    mobius,
    primes_upto,
)
from .errors import (
    BadResidue,
    BadTrace,
    DegenerateSample,
    NoConvergence,
    NonPositive,
    NotFundamental,
    SquareInput,
)

ZETA2 = math.pi**2 / 6

# Leading constant of A(X).  Counting every sign of m, upsilon(X) tracks
# (1/zeta(2)) sqrt(X) L_D(1) eta (log X + ...); a free regression of
# upsilon/(sqrt(X) L eta / zeta(2)) on log X gives slope 1.00 +- 0.01 for
# X = n^2 - 4, n <= 4000, and doubling the constant halves the ratio.
PREFACTOR = 1 / ZETA2
PREFACTOR_DOUBLED = 2 / ZETA2

# c3 fitted on X = n^2 - 4, 100 <= n <= 2000 (fit_c3, tol 1e-10, PREFACTOR).
# Empirical: the closed form of this constant is not reproduced here.
DEFAULT_C3 = 1.3931089268

PERIODIC_MAX_TERMS = 1 << 26
_CHUNK = 1 << 20


# -- constants ---------------------------------------------------------------


@lru_cache(maxsize=None)
def euler_gamma() -> float:
    """Euler-Mascheroni constant by Euler-Maclaurin on the harmonic numbers."""
    n = 20
    h = math.fsum(1 / k for k in range(1, n + 1))
    return (
        h - math.log(n) - 1 / (2 * n) + 1 / (12 * n**2) - 1 / (120 * n**4)
        + 1 / (252 * n**6) - 1 / (240 * n**8)
    )


@lru_cache(maxsize=None)
def zeta_prime_2() -> float:
    """``zeta'(2) = -sum log(n)/n^2``, head summed directly, tail by Euler-Maclaurin."""
    N = 2000
    head = math.fsum(math.log(n) / n**2 for n in range(2, N))
    f = math.log(N) / N**2
    df = (1 - 2 * math.log(N)) / N**3
    tail = (math.log(N) + 1) / N + f / 2 - df / 12
    return -(head + tail)


def const_c1() -> float:
    return 1 / ZETA2


def const_c2() -> float:
    return (euler_gamma() - 1.5 - zeta_prime_2() / ZETA2) / ZETA2


def psi_main(N: int) -> float:
    """Two-term approximation ``c1 N^2 log N + c2 N^2`` to Psi(N)."""
    if N < 3:
        raise BadTrace(f"psi_main needs N >= 3, got {N}")
    return const_c1() * N * N * math.log(N) + const_c2() * N * N


# -- the character -----------------------------------------------------------


def kronecker_vector(D: int, n_max: int) -> np.ndarray:
    """``chi[n] = (D/n)`` for ``0 <= n <= n_max``, built multiplicatively from primes."""
    chi = np.ones(n_max + 1, dtype=np.int8)
    chi[0] = kronecker(D, 0)
    for p in primes_upto(n_max).tolist():
        c = kronecker(D, p)
        if c == 0:
            chi[p::p] = 0
        elif c == -1:
            pk = p
            while pk <= n_max:
                chi[pk::pk] *= -1
                pk *= p
    return chi


def _check_fundamental(D: int) -> None:
    if D == 1 or not is_fundamental(D):
        raise NotFundamental(f"{D} is not a fundamental discriminant of a non-principal character")


# -- periodic sums -----------------------------------------------------------


def _periodic_estimates(D: int, tol: float) -> tuple[float, float]:
    q = abs(D)
    period = kronecker_vector(D, q)[1:].astype(np.float64)  # chi(1..q)
    S = np.cumsum(period)  # partial sums, S[q-1] == 0
    a = np.arange(1, q + 1, dtype=np.float64)

    def tails(M: int) -> tuple[float, float]:
        x0 = M + a - q / 2
        t_l = np.dot(S, np.log1p(1 / x0)) / q
        lx0, lx1 = np.log(x0), np.log(x0 + 1)
        t_d = np.dot(S, (lx1 * lx1 - lx0 * lx0) / 2) / q
        return float(t_l), float(t_d)

    head_l = head_d = 0.0  # sum chi(n)/n and sum chi(n) log(n)/n over n <= M
    M, prev = 0, None
    K = 1
    while True:
        target = K * q
        while M < target:
            hi = min(target, M + _CHUNK)
            n = np.arange(M + 1, hi + 1, dtype=np.float64)
            c = period[(np.arange(M, hi)) % q]
            head_l += float(np.dot(c, 1 / n))
            head_d += float(np.dot(c, np.log(n) / n))
            M = hi
        t_l, t_d = tails(M)
        est = (head_l + t_l, -(head_d + t_d))
        if prev is not None and abs(est[0] - prev[0]) < tol and abs(est[1] - prev[1]) < tol:
            return est
        if 2 * target > PERIODIC_MAX_TERMS:
            raise NoConvergence(f"D={D}: tol {tol} not reached within {PERIODIC_MAX_TERMS} terms")
        prev = est
        K *= 2


# -- theta series ------------------------------------------------------------

_SERIES_CUT = 20.0
_SERIES_TERMS = 100
_LAG_X, _LAG_W = np.polynomial.laguerre.laggauss(48)


def _log_moments(y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``int_1^inf log(u) u^(a-1) e^(-y u) du`` at ``a = 0`` and ``a = 1/2``.

    Power series (plus the log terms) for small ``y``, Gauss-Laguerre in
    ``u = 1 + v/y`` above ``_SERIES_CUT``.
    """
    f0 = np.empty_like(y)
    f1 = np.empty_like(y)
    small = y <= _SERIES_CUT
    ys = y[small]
    if ys.size:
        g = euler_gamma()
        L = np.log(ys)
        s0 = np.zeros_like(ys)
        s1 = np.full_like(ys, 4.0)  # k = 0 term of the a = 1/2 series
        term = np.ones_like(ys)
        for k in range(1, _SERIES_TERMS):
            term = term * (-ys) / k
            s0 += term / (k * k)
            s1 += term / (k + 0.5) ** 2
        f0[small] = g * g / 2 + math.pi**2 / 12 + g * L + L * L / 2 + s0
        psi_half = -g - 2 * math.log(2)
        f1[small] = np.sqrt(math.pi / ys) * (psi_half - L) + s1
    yb = y[~small]
    if yb.size:
        u = 1 + _LAG_X[None, :] / yb[:, None]
        lu = np.log(u)
        scale = np.exp(-yb) / yb
        f0[~small] = scale * ((lu / u) @ _LAG_W)
        f1[~small] = scale * ((lu / np.sqrt(u)) @ _LAG_W)
    return f0, f1


def _theta_estimates(D: int, tol: float) -> tuple[float, float]:
    if D <= 1:
        raise ValueError("theta series needs a positive discriminant")
    q = float(D)
    y_max = max(math.log(1 / tol), 0.0) + 12.0
    n_top = math.isqrt(int(D * y_max / math.pi)) + 1
    chi = kronecker_vector(D, n_top)[1:].astype(np.float64)
    n = np.arange(1, n_top + 1, dtype=np.float64)
    nz = chi != 0
    chi, n = chi[nz], n[nz]
    y = math.pi * n * n / q
    lam = np.dot(chi, math.sqrt(q) / n * special.erfc(np.sqrt(y)) + special.exp1(y))
    f0, f1 = _log_moments(y)
    dlam = 0.5 * np.dot(chi, f1 - f0)
    psi_half = -euler_gamma() - 2 * math.log(2)
    L1 = float(lam) / math.sqrt(q)
    logderiv = float(dlam / lam) - 0.5 * math.log(q / math.pi) - 0.5 * psi_half
    return L1, logderiv


@lru_cache(maxsize=8192)
def L_pair(D: int, tol: float = 1e-10, method: str = "auto") -> tuple[float, float]:
    """``(L_D(1), L_D'(1) / L_D(1))``."""
    _check_fundamental(D)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    if method == "auto":
        method = "periodic" if D < 0 or abs(D) <= 1000 else "theta"
    if method == "periodic":
        L1, dL = _periodic_estimates(D, tol)
        return L1, dL / L1
    if method == "theta":
        return _theta_estimates(D, tol)
    raise ValueError(f"unknown method {method!r}")


def L_value(D: int, tol: float = 1e-10, method: str = "auto") -> float:
    return L_pair(D, tol, method)[0]


def L_log_deriv(D: int, tol: float = 1e-10, method: str = "auto") -> float:
    return L_pair(D, tol, method)[1]


# -- eta ---------------------------------------------------------------------


@dataclass(frozen=True)
class EtaValue:
    r: int
    D: int
    value: float
    derivative: float


def eta_pair(r: int, D: int) -> EtaValue:
    """The finite sum ``eta_s(r; D)`` and its ``s``-derivative at ``s = 1/2``.

    ``eta_s = sum_{l | r} (D/l) mu(l) l^(-2s) sum_{d | r/l} d^(1-4s)``,
    differentiated term by term.
    """
    if r < 1:
        raise NonPositive(f"eta needs r >= 1, got {r}")
    value, deriv = [], []
    for l in divisors(r):
        c = kronecker(D, l) * mobius(l)
        if c == 0:
            continue
        ds = divisors(r // l)
        s = math.fsum(1 / d for d in ds)
        s_log = math.fsum(math.log(d) / d for d in ds)
        value.append(c * s / l)
        deriv.append(c / l * (-2 * math.log(l) * s - 4 * s_log))
    return EtaValue(r, D, math.fsum(value), math.fsum(deriv))


# -- main term ---------------------------------------------------------------


@dataclass(frozen=True)
class MainTermReport:
    X: int
    D: int
    r: int
    upsilon: float
    L1: float
    Llogderiv: float
    eta: EtaValue
    c3: float
    A: float
    residual: float
    prefactor: float = PREFACTOR

    @property
    def scale(self) -> float:
        """Coefficient of ``c3`` in ``A``: ``prefactor * sqrt(X) * L_D(1) * eta``."""
        return self.prefactor * math.sqrt(self.X) * self.L1 * self.eta.value

    @property
    def log_part(self) -> float:
        """Everything inside the bracket of ``A`` except ``c3``."""
        return math.log(self.X) + 2 * self.Llogderiv + self.eta.derivative / self.eta.value


def main_term(
    X: int,
    c3: float = DEFAULT_C3,
    tol: float = 1e-10,
    upsilon_value: float | None = None,
    prefactor: float = PREFACTOR,
) -> MainTermReport:
    """Evaluate ``A(X)`` and compare it with the exact count ``upsilon(X)``.

    ``A(X) = k sqrt(X) L_D(1) eta (log X + 2 L_D'/L_D(1) + eta'/eta + c3)``
    with ``X = D r^2`` and ``k = prefactor``.  Pass ``upsilon_value`` to skip
    recounting.
    """
    from .spinchain import upsilon

    if X < 1:
        raise NonPositive(f"X must be positive, got {X}")
    if X % 4 not in (0, 1):
        raise BadResidue(f"X = {X} is {X % 4} mod 4")
    if is_square(X):
        raise SquareInput(f"X = {X} is a perfect square; its character is principal")
    dec = fund_disc_decompose(X)
    L1, ld = L_pair(dec.D, tol)
    eta = eta_pair(dec.r, dec.D)
    B = prefactor * math.sqrt(X) * L1 * eta.value
    A = B * (math.log(X) + 2 * ld + eta.derivative / eta.value + c3)
    ups = upsilon(X) if upsilon_value is None else upsilon_value
    return MainTermReport(
        X, dec.D, dec.r, ups, L1, ld, eta, c3, A, (ups - A) / math.sqrt(X), prefactor
    )


def _main_term_args(args: tuple) -> MainTermReport:
    return main_term(*args)


def main_terms(
    xs: Sequence[int],
    c3: float = DEFAULT_C3,
    tol: float = 1e-10,
    upsilon_values: Sequence[float] | None = None,
    jobs: int = 1,
    prefactor: float = PREFACTOR,
) -> list[MainTermReport]:
    """:func:`main_term` over a sample, in input order regardless of ``jobs``."""
    ups = list(upsilon_values) if upsilon_values is not None else [None] * len(xs)
    if len(ups) != len(xs):
        raise ValueError("upsilon_values must match xs in length")
    tasks = [(int(x), c3, tol, u, prefactor) for x, u in zip(xs, ups)]
    if jobs <= 1:
        return [_main_term_args(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_main_term_args, tasks, chunksize=16))


def fit_c3(
    X_sample: Sequence[int],
    tol: float = 1e-10,
    upsilon_values: Sequence[float] | None = None,
    weights: Sequence[float] | None = None,
    jobs: int = 1,
    min_size: int = 100,
    prefactor: float = PREFACTOR,
) -> float:
    """Weighted least-squares ``c3`` for ``upsilon(X) ~ A(X; c3)``.

    ``A`` is affine in ``c3`` (``A = B*(K + c3)``), so the minimiser of
    ``sum w (upsilon - A)^2`` is ``sum w B (upsilon - B K) / sum w B^2``.
    The default weights are ``1/X``.
    """
    if len(X_sample) < min_size:
        raise DegenerateSample(f"need at least {min_size} sample points, got {len(X_sample)}")
    reports = main_terms(X_sample, 0.0, tol, upsilon_values, jobs, prefactor)
    if weights is None:
        weights = [1 / r.X for r in reports]
    num, den = [], []
    for rep, w in zip(reports, weights):
        B = rep.scale
        num.append(w * B * (rep.upsilon - B * rep.log_part))
        den.append(w * B * B)
    total = math.fsum(den)
    if not total > 0:
        raise DegenerateSample("all weights vanish")
    return math.fsum(num) / total
