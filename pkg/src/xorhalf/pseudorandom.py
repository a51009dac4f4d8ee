"""Partial-tuple frequency statistics and closeness-to-uniform checks.

A partial tuple fixes literals at a subset of the K positions of a
constraint tuple.  A formula is (t, tau)-pseudo-random when every partial
tuple of size at most t appears with frequency within tau of its uniform
expectation; that expectation is 1 / ((2n)(2n-2)...(2n+2-2t)) for size-t
partial tuples, position-sensitively.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Optional

import numpy as np

from .common import Bound, ResourceLimitError
from .formulas import Assignment, KTuple, Literal, XorFormula

#: Cells above which exact-mode reporting refuses to run without streaming.
CELL_LIMIT_DEFAULT = 50_000_000


@dataclass(frozen=True, slots=True)
class PartialKTuple:
    """A constraint tuple with literals on a support and wildcards elsewhere."""

    slots: tuple[Optional[Literal], ...]

    def __post_init__(self):
        if len(self.slots) == 0:
            raise ValueError("arity must be positive")
        vars_ = [lit.var for lit in self.slots if lit is not None]
        if len(set(vars_)) != len(vars_):
            raise ValueError(f"duplicate variable in partial tuple: {sorted(vars_)}")

    @property
    def k(self) -> int:
        return len(self.slots)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, lit in enumerate(self.slots) if lit is not None)

    @property
    def size(self) -> int:
        return sum(1 for lit in self.slots if lit is not None)

    @classmethod
    def from_restriction(cls, C: KTuple, support: tuple[int, ...]) -> "PartialKTuple":
        slots: list[Optional[Literal]] = [None] * C.k
        for i in support:
            slots[i] = C.literals[i]
        return cls(tuple(slots))


@dataclass(frozen=True)
class FrequencyReport:
    """Outcome of a pseudo-randomness scan up to support size t."""

    t: int
    tau: Fraction
    max_deviation: Fraction
    worst_tuple: Optional[PartialKTuple]
    passed: bool
    tested_count: int
    mode: str

    def __post_init__(self):
        if self.passed != (self.max_deviation < self.tau):
            raise ValueError("passed flag inconsistent with max_deviation and tau")


@dataclass(frozen=True)
class ClosenessReport:
    passed: bool
    max_deviation: Fraction
    worst_pattern: Optional[tuple[int, ...]]


@dataclass(frozen=True)
class EmpiricalBlockDistribution:
    """Exact pattern counts of tuple evaluations under one assignment."""

    k: int
    m: int
    counts: Mapping[tuple[int, ...], int]

    def __post_init__(self):
        if sum(self.counts.values()) != self.m:
            raise ValueError("pattern counts must sum to m")
        for pattern in self.counts:
            if len(pattern) != self.k or any(v not in (-1, 1) for v in pattern):
                raise ValueError(f"bad pattern {pattern}")


def partial_tuple_count(n: int, t: int) -> int:
    """Number of ordered size-t literal choices on a fixed support:
    (2n)(2n-2)...(2n+2-2t)."""
    if t < 0 or t > n:
        raise ValueError(f"t must be in [0, n], got t={t}, n={n}")
    count = 1
    for i in range(t):
        count *= 2 * n - 2 * i
    return count


def uniform_partial_probability(n: int, t: int) -> Fraction:
    """Uniform frequency of one size-t partial tuple on a fixed support."""
    return Fraction(1, partial_tuple_count(n, t))


def frequency(J: XorFormula, P: PartialKTuple) -> Fraction:
    """Exact fraction of J's tuples whose restriction to P's support equals P."""
    if P.k != J.K:
        raise ValueError(f"partial tuple arity {P.k} != formula arity {J.K}")
    for lit in P.slots:
        if lit is not None and lit.var > J.n:
            raise ValueError(f"partial tuple references variable {lit.var} > n={J.n}")
    support = P.support
    count = sum(
        1 for tup in J.tuples
        if all(tup.literals[i] == P.slots[i] for i in support)
    )
    return Fraction(count, J.m)


def _restriction_key(tup: KTuple, support: tuple[int, ...]) -> tuple:
    return tuple((tup.literals[i].var, tup.literals[i].sign) for i in support)


def _first_unobserved(
    n: int, k: int, support: tuple[int, ...], observed: set
) -> PartialKTuple:
    """Lexicographically first partial tuple on ``support`` absent from J."""
    t = len(support)
    for vars_ in itertools.permutations(range(1, n + 1), t):
        for sign_bits in itertools.product((1, -1), repeat=t):
            key = tuple(zip(vars_, sign_bits))
            if key not in observed:
                slots: list[Optional[Literal]] = [None] * k
                for pos, (v, s) in zip(support, key):
                    slots[pos] = Literal(v, s)
                return PartialKTuple(tuple(slots))
    raise AssertionError("support is fully covered; no unobserved tuple exists")


def pseudorandom_test(
    J: XorFormula,
    t: int,
    tau,
    *,
    streaming: bool = False,
    cell_limit: int = CELL_LIMIT_DEFAULT,
) -> FrequencyReport:
    """Scan every partial tuple of size <= t and compare against uniform.

    Frequencies of tuples never occurring in J are handled analytically
    (they all deviate by exactly the uniform probability of their size), so
    the reported maximum deviation is exact in both modes.  Exact mode
    additionally accounts for the full cell space and refuses to run when
    it exceeds ``cell_limit``; pass ``streaming=True`` to lift that.
    """
    if not 0 <= t <= J.K:
        raise ValueError(f"t must be in [0, K], got t={t}, K={J.K}")
    tau = Fraction(tau)
    n, m = J.n, J.m

    total_cells = sum(
        math.comb(J.K, size) * partial_tuple_count(n, size)
        for size in range(t + 1)
    )
    if not streaming and total_cells > cell_limit:
        raise ResourceLimitError(
            f"{total_cells} partial-tuple cells exceed the limit {cell_limit}; "
            f"enable streaming mode")

    max_dev = Fraction(0)
    worst: Optional[PartialKTuple] = None
    observed_cells = 0

    for size in range(t + 1):
        p = uniform_partial_probability(n, size)
        for support in itertools.combinations(range(J.K), size):
            tally: dict = {}
            for tup in J.tuples:
                key = _restriction_key(tup, support)
                tally[key] = tally.get(key, 0) + 1
            observed_cells += len(tally)
            for key, count in tally.items():
                dev = abs(Fraction(count, m) - p)
                if dev > max_dev:
                    max_dev = dev
                    slots: list[Optional[Literal]] = [None] * J.K
                    for pos, (v, s) in zip(support, key):
                        slots[pos] = Literal(v, s)
                    worst = PartialKTuple(tuple(slots))
            unobserved = partial_tuple_count(n, size) - len(tally)
            if unobserved > 0 and p > max_dev:
                max_dev = p
                worst = _first_unobserved(n, J.K, support, set(tally))

    tested = total_cells if not streaming else observed_cells
    return FrequencyReport(
        t=t,
        tau=tau,
        max_deviation=max_dev,
        worst_tuple=worst,
        passed=max_dev < tau,
        tested_count=tested,
        mode="streaming" if streaming else "exact",
    )


def bound_frequency_deviation(m: int, tau: float) -> float:
    """Hoeffding tail for one partial tuple's frequency: 2 exp(-2 m tau^2)."""
    return 2.0 * math.exp(-2.0 * m * tau * tau)


def bound_pseudorandom_failure(n: int, K: int, m: int, tau: float) -> Bound:
    """Union bound over all partial tuples: (2n)^(2K) * 2 exp(-2 m tau^2)."""
    if n < 1 or K < 1 or m < 1 or tau < 0:
        raise ValueError("all parameters must be positive")
    log_value = 2 * K * math.log(2 * n) + math.log(2.0) - 2.0 * m * tau * tau
    try:
        value = math.exp(log_value)
    except OverflowError:
        value = math.inf
    return Bound(value, value >= 1.0)


def block_distribution(J: XorFormula, psi: Assignment) -> EmpiricalBlockDistribution:
    """Exact histogram of tuple evaluations under psi."""
    if psi.n != J.n:
        raise ValueError(f"assignment has n={psi.n}, formula has n={J.n}")
    vars0, signs = J.arrays()
    z = signs * psi.as_array()[vars0]                       # (m, K)
    bits = ((1 - z) // 2).astype(np.int64)
    codes = bits @ (1 << np.arange(J.K - 1, -1, -1, dtype=np.int64))
    freq = np.bincount(codes, minlength=1 << J.K)
    counts = {}
    for code in np.nonzero(freq)[0]:
        pattern = tuple(
            1 - 2 * ((int(code) >> (J.K - 1 - i)) & 1) for i in range(J.K)
        )
        counts[pattern] = int(freq[code])
    return EmpiricalBlockDistribution(J.K, J.m, counts)


def closeness_check(
    dist: EmpiricalBlockDistribution, t: int, mu
) -> ClosenessReport:
    """Check every <=t-coordinate marginal against the uniform distribution.

    Passes when each pattern probability is within mu of 2^-|support|
    (non-strict, matching the definition of (t, mu)-closeness).
    """
    if not 0 <= t <= dist.k:
        raise ValueError(f"t must be in [0, k], got t={t}, k={dist.k}")
    mu = Fraction(mu)
    max_dev = Fraction(0)
    worst: Optional[tuple[int, ...]] = None
    for size in range(t + 1):
        target = Fraction(1, 1 << size)
        for support in itertools.combinations(range(dist.k), size):
            marginal: dict[tuple[int, ...], int] = {}
            for pattern, count in dist.counts.items():
                key = tuple(pattern[i] for i in support)
                marginal[key] = marginal.get(key, 0) + count
            for values in itertools.product((1, -1), repeat=size):
                prob = Fraction(marginal.get(values, 0), dist.m)
                dev = abs(prob - target)
                if dev > max_dev:
                    max_dev = dev
                    full = [0] * dist.k
                    for pos, v in zip(support, values):
                        full[pos] = v
                    worst = tuple(full)
    return ClosenessReport(max_dev <= mu, max_dev, worst)
