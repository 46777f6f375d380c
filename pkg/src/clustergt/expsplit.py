"""Exponentially split formation trees and their closed-form metrics.

The symmetric family: level i has 2^(i-1) equal clusters, every cluster
splits in half one level down, level probabilities are uniform. Closed forms
for the expected misclassifications, expected infections, and the minimum
row count are implemented in exact arithmetic; the binomial-sum inequalities
behind the row-count bound are exposed as checkable predicates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import PreconditionViolated, TooLarge
from .model import ClusterFormation, FormationEnsemble
from .tree import FormationTree, validate_tree

MAX_LEVELS = 24


@dataclass(frozen=True)
class ExpSplitParams:
    """f levels with bottom clusters of delta individuals (n = 2^(f-1) * delta)."""

    f: int
    delta: int

    def __post_init__(self):
        if self.f < 1:
            raise ValueError("f must be >= 1")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")

    @property
    def n(self) -> int:
        return (1 << (self.f - 1)) * self.delta


def generate(params: ExpSplitParams) -> FormationTree:
    """Build the tree over contiguous index blocks with uniform probabilities."""
    if params.f > MAX_LEVELS:
        raise TooLarge(f"f={params.f} exceeds level cap {MAX_LEVELS}")
    f, delta, n = params.f, params.delta, params.n
    prob = Fraction(1, f)
    items = []
    for level in range(1, f + 1):
        width = (1 << (f - level)) * delta
        clusters = [
            tuple(range(start, start + width)) for start in range(1, n + 1, width)
        ]
        items.append((ClusterFormation(n, tuple(clusters)), prob))
    return validate_tree(FormationEnsemble.build(items))


def closed_form_ef(params: ExpSplitParams, m: int) -> Fraction:
    """Expected false classifications at sampling level m, in closed form:
    delta/(3f) * (2^(f-m+2) + 2^(m-f+1) - 6)."""
    if not (1 <= m <= params.f):
        raise PreconditionViolated(f"m={m} outside 1..{params.f}")
    f = params.f
    term = (
        Fraction(2) ** (f - m + 2)
        + Fraction(2) ** (m - f + 1)
        - 6
    )
    return Fraction(params.delta, 3 * f) * term


def expected_infections(params: ExpSplitParams) -> Fraction:
    """(delta/f) * (2^f - 1)."""
    return Fraction(params.delta, params.f) * ((1 << params.f) - 1)


def _binom_sum_holds(f: int, k: int) -> bool:
    """sum_{i=1..k+1} C(f+k, i) >= 2^(f-1), in exact integers."""
    total = 0
    for i in range(1, k + 2):
        total += comb(f + k, i)
        if total >= 1 << (f - 1):
            return True
    return total >= 1 << (f - 1)


def min_tests(f: int) -> int:
    """Minimum achievable row count at the bottom level: f + k* where k* is
    the least k making the binomial-sum condition hold."""
    if f < 1:
        raise PreconditionViolated("f must be >= 1")
    k = 0
    while not _binom_sum_holds(f, k):
        k += 1
    return f + k


def check_lemma_binomsum(f: int) -> bool:
    """Does k = ceil(f/3) already satisfy the binomial-sum condition?"""
    if f < 3:
        raise PreconditionViolated("defined for f >= 3")
    k = -(-f // 3)
    return _binom_sum_holds(f, k)


def check_lemma_half_sum(n: int, k: int) -> bool:
    """Does (1/2) * sum_{i=1..k} C(n,i) < C(n,k+1) hold?

    Only claimed for 1 <= k <= (2n-8)/5; arguments outside that range raise.
    """
    if k < 1 or 5 * k > 2 * n - 8:
        raise PreconditionViolated(f"k={k} outside 1..(2n-8)/5 for n={n}")
    lhs = sum(comb(n, i) for i in range(1, k + 1))
    return lhs < 2 * comb(n, k + 1)
