"""Statistical-query oracle simulation and query translation across lifts.

Oracles answer expectation queries within a tolerance.  Over an explicit
distribution the exact expectation is a rational number, so both shipped
perturbation policies (deterministic rounding to the tolerance grid, and a
seeded adversary pushing toward the boundary) are checkable against it.
Translating a query through an instance-space lift queries the base oracle
with Q(lift(x), y), whose expectation equals the lifted one exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .common import ResourceLimitError, rng_stream

#: Query over an example space: (instance tuple, ±1 label) -> ±1.
Query = Callable[[tuple, int], int]

#: Instance-space lift mapping base instances to lifted instances.
Lift = Callable[[tuple], tuple]

_ENUMERATION_LIMIT = 1 << 22


@dataclass(frozen=True)
class SparseParityTarget:
    """Parity of K unknown coordinates of a uniform ±1 instance (0-based)."""

    n: int
    support: frozenset[int]

    def __post_init__(self):
        if len(self.support) < 1:
            raise ValueError("support must contain at least one coordinate")
        if not all(0 <= i < self.n for i in self.support):
            raise ValueError("support indices must lie in [0, n)")

    def label(self, x: Sequence[int]) -> int:
        out = 1
        for i in self.support:
            out *= x[i]
        return out


@dataclass(frozen=True)
class ExplicitDistribution:
    """A finite labeled-example distribution with exact point masses."""

    points: tuple[tuple[tuple, int], ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.points) != len(self.probs):
            raise ValueError("points and probs must have equal length")
        if sum(self.probs, Fraction(0)) != 1:
            raise ValueError("probabilities must sum to 1")
        if any(p < 0 for p in self.probs):
            raise ValueError("probabilities must be nonnegative")

    @classmethod
    def uniform_parity(cls, target: SparseParityTarget) -> "ExplicitDistribution":
        if (1 << target.n) > _ENUMERATION_LIMIT:
            raise ResourceLimitError(
                f"enumerating 2^{target.n} instances exceeds the limit")
        points = []
        for code in range(1 << target.n):
            x = tuple(
                1 - 2 * ((code >> (target.n - 1 - i)) & 1) for i in range(target.n)
            )
            points.append((x, target.label(x)))
        prob = Fraction(1, 1 << target.n)
        return cls(tuple(points), (prob,) * len(points))

    def expectation(self, Q: Query) -> Fraction:
        total = Fraction(0)
        for (x, y), p in zip(self.points, self.probs):
            value = Q(x, y)
            if value not in (-1, 1):
                raise ValueError(f"query returned {value}, expected +1 or -1")
            total += p * value
        return total

    def map_instances(self, lift: Lift) -> "ExplicitDistribution":
        """Pushforward along an instance-space lift (labels unchanged)."""
        points = tuple((tuple(lift(x)), y) for x, y in self.points)
        return ExplicitDistribution(points, self.probs)


@dataclass
class SqOracle:
    """Tolerance-limited expectation oracle over an explicit distribution.

    Policies: "rounding" answers the exact expectation rounded to the
    nearest multiple of the tolerance; "adversarial-seeded" pushes each
    answer a full tolerance toward a seeded direction, clamped to [-1, 1].
    Every answer differs from the exact expectation by at most the
    tolerance, and the transcript records (label, answer) pairs for audit.
    """

    dist: ExplicitDistribution
    tolerance: Fraction
    policy: str = "rounding"
    seed: int = 0
    transcript: list[tuple[str, Fraction]] = field(default_factory=list)

    def __post_init__(self):
        self.tolerance = Fraction(self.tolerance)
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.policy not in ("rounding", "adversarial-seeded"):
            raise ValueError(f"unknown policy {self.policy!r}")

    def exact_expectation(self, Q: Query) -> Fraction:
        return self.dist.expectation(Q)

    def query(self, Q: Query, label: Optional[str] = None) -> Fraction:
        exact = self.dist.expectation(Q)
        lam = self.tolerance
        if self.policy == "rounding":
            answer = math.floor(exact / lam + Fraction(1, 2)) * lam
        else:
            coin = int(rng_stream(
                self.seed, "sq-adversary", len(self.transcript)).integers(2))
            answer = exact + lam if coin == 0 else exact - lam
        answer = min(Fraction(1), max(Fraction(-1), answer))
        assert abs(answer - exact) <= lam
        self.transcript.append((label or f"q{len(self.transcript)}", answer))
        return answer


def sq_query(oracle: SqOracle, Q: Query, label: Optional[str] = None) -> Fraction:
    """Ask one statistical query; the answer is within the oracle tolerance
    of the exact expectation."""
    return oracle.query(Q, label)


def translate_query(Q: Query, lift: Lift) -> Query:
    """Rewrite a lifted-space query as a base-space query: x -> Q(lift(x), y).

    The base-space expectation of the translated query equals the
    pushforward expectation of the original query exactly.
    """
    def translated(x: tuple, y: int) -> int:
        return Q(tuple(lift(x)), y)
    return translated
