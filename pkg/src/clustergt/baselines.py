"""Adaptive baselines: generalized binary splitting and individual testing.

The pooled-test oracle answers OR-of-membership queries against a hidden
infected set and counts queries, which is all an adaptive algorithm may see.
"""

from __future__ import annotations

from fractions import Fraction
from math import floor, log2
from typing import Iterable, Sequence

from .errors import KMismatch


class PoolOracle:
    """Ground-truth infected set behind an OR-query interface."""

    def __init__(self, infected: Iterable[int], n: int):
        self.infected = frozenset(infected)
        self.n = n
        self.tests_used = 0
        for v in self.infected:
            if not (1 <= v <= n):
                raise ValueError(f"infected vertex {v} outside 1..{n}")

    def query(self, group: Iterable[int]) -> bool:
        self.tests_used += 1
        return any(v in self.infected for v in group)


def hwang_generalized(oracle: PoolOracle, n: int, k: int):
    """Generalized binary splitting with the infection count known exactly.

    Classic schedule: while many candidates remain, test a group of size
    2^floor(log2((|pool| - d + 1) / d)); a negative discards the group, a
    positive is binary-searched for one infected member (unresolved items
    return to the pool). Pool-wide pretests that are provably positive are
    skipped, and once d infected are found (or only d candidates remain) the
    rest is inferred without further tests. Returns (infected set, tests).
    """
    if k < 1:
        raise KMismatch("k must be >= 1")
    if len(oracle.infected) != k:
        raise KMismatch(
            f"oracle holds {len(oracle.infected)} infected, caller declared {k}"
        )
    start_tests = oracle.tests_used
    pool = list(range(1, n + 1))
    found: set[int] = set()

    while True:
        d = k - len(found)
        if d == 0:
            break
        if len(pool) <= d:
            # exactly the remaining infected (counts must match)
            found.update(pool)
            pool = []
            break
        if len(pool) <= 2 * d - 2:
            # individual phase with count-based early exit
            nxt = []
            for idx, v in enumerate(pool):
                remaining_after = pool[idx + 1:]
                if k - len(found) == 0:
                    nxt = []
                    break
                if len(remaining_after) + 1 == k - len(found):
                    # everyone left must be infected
                    found.add(v)
                    found.update(remaining_after)
                    nxt = []
                    break
                if oracle.query([v]):
                    found.add(v)
            pool = nxt
            continue
        alpha = floor(log2((len(pool) - d + 1) / d))
        size = 1 << alpha
        group = pool[:size]
        rest = pool[size:]
        if size < len(pool):
            positive = oracle.query(group)
        else:
            positive = True  # the pool provably contains an infected member
        if not positive:
            pool = rest
            continue
        # binary search one infected member of a known-positive group
        unresolved: list[int] = []
        while len(group) > 1:
            half = group[: (len(group) + 1) // 2]
            if oracle.query(half):
                unresolved = group[len(half):] + unresolved
                group = half
            else:
                group = group[len(half):]
        found.add(group[0])
        pool = unresolved + rest

    return frozenset(found), oracle.tests_used - start_tests


def individual_testing(oracle: PoolOracle, n: int):
    """Test every individual once; exact recovery in n tests."""
    found = {v for v in range(1, n + 1) if oracle.query([v])}
    return frozenset(found), oracle.tests_used


def hwang_expected_tests_formula(f: int) -> Fraction:
    """Leading closed part of the expected test count on the exponentially
    split infection-size distribution: (2^f - f - 1) / f."""
    if f < 1:
        raise ValueError("f must be >= 1")
    return Fraction((1 << f) - f - 1, f)
