"""Brute-force enumeration of the monoid generated by A = (1 0 / 1 1) and B = (1 1 / 0 1).

This is the slow reference for the state counts: every word is visited, so
the work grows like the number of states with trace at most ``N`` (roughly
``N**2 log N``).  Practical up to ``N`` of a couple of thousand.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Iterator, NamedTuple

from .arith import check_width
from .errors import BadTrace


class Mat2(NamedTuple):
    """Row-major 2x2 matrix ``(a b / c d)``."""

    a: int
    b: int
    c: int
    d: int

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )


IDENTITY = Mat2(1, 0, 0, 1)
A = Mat2(1, 0, 1, 1)
B = Mat2(1, 1, 0, 1)
GENERATORS = {"A": A, "B": B}


def right_multiply(state: Mat2, letter: str) -> Mat2:
    """``state @ A`` or ``state @ B`` without a general matrix product."""
    a, b, c, d = state
    if letter == "A":
        out = Mat2(a + b, b, c + d, d)
    elif letter == "B":
        out = Mat2(a, a + b, c, c + d)
    else:
        raise ValueError(f"unknown letter {letter!r}")
    check_width(*out)
    return out


def word_matrix(word: str) -> Mat2:
    m = IDENTITY
    for letter in word:
        m = right_multiply(m, letter)
    return m


def words_upto(length: int) -> Iterator[str]:
    """All nonempty words over ``{A, B}`` of length at most ``length``."""
    layer = [""]
    for _ in range(length):
        layer = [w + x for w in layer for x in "AB"]
        yield from layer


def mixed_roots(n_max: int) -> list[tuple[str, Mat2]]:
    """Roots ``A^k B`` and ``B^k A`` (trace ``k + 2``) with trace at most ``n_max``.

    Every word containing both letters starts with exactly one of these
    prefixes, so the subtrees below them partition the states of trace >= 3.
    """
    roots = []
    for k in range(1, n_max - 1):
        roots.append(("A" * k + "B", Mat2(1, 1, k, k + 1)))
        roots.append(("B" * k + "A", Mat2(k + 1, k, 1, 1)))
    return roots


def _count_subtree(root: Mat2, n_max: int) -> list[int]:
    # counts[t] = number of states in the subtree with trace t
    counts = [0] * (n_max + 1)
    stack = [root]
    pop, push = stack.pop, stack.append
    while stack:
        a, b, c, d = pop()
        t = a + d
        counts[t] += 1
        # right-multiplying by A adds b to the trace, by B adds c
        if t + b <= n_max:
            push((a + b, b, c + d, d))
        if t + c <= n_max:
            push((a, a + b, c, c + d))
    return counts


def _count_roots(args: tuple[list[Mat2], int]) -> list[int]:
    roots, n_max = args
    total = [0] * (n_max + 1)
    for root in roots:
        for t, v in enumerate(_count_subtree(root, n_max)):
            total[t] += v
    return total


def trace_counts(n_max: int, jobs: int = 1) -> list[int]:
    """``counts[t]`` = number of words with trace ``t``, for ``3 <= t <= n_max``.

    Entries 0..2 are left at zero (trace 2 holds infinitely many pure powers).
    With ``jobs > 1`` the root subtrees are dealt round-robin to worker
    processes; the merge is a plain sum, so the result does not depend on
    ``jobs``.
    """
    if n_max < 3:
        raise BadTrace(f"trace bound must be >= 3, got {n_max}")
    roots = [m for _, m in mixed_roots(n_max)]
    jobs = max(1, min(jobs, len(roots)))
    chunks = [(roots[i::jobs], n_max) for i in range(jobs)]
    if jobs == 1:
        parts = [_count_roots(chunks[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_count_roots, chunks))
    total = [0] * (n_max + 1)
    for part in parts:
        for t, v in enumerate(part):
            total[t] += v
    return total


def phi_oracle(N: int, jobs: int = 1) -> int:
    """Number of products of A and B with trace exactly ``N``, by enumeration."""
    if N < 3:
        raise BadTrace(f"Phi(N) is only finite for N >= 3, got {N}")
    return trace_counts(N, jobs)[N]


def psi_oracle(N: int, jobs: int = 1) -> int:
    """Number of products of A and B with ``3 <= trace <= N``, by enumeration."""
    if N < 3:
        raise BadTrace(f"Psi(N) needs N >= 3, got {N}")
    return sum(trace_counts(N, jobs))
