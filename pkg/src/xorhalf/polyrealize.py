"""Realizing parity through the coordinate sum with a low-degree polynomial.

The parity of a ±1 vector is a function of its coordinate sum, which takes
at most d+1 values inside [-d, d].  Interpolating on exactly those values
gives a degree <= d univariate polynomial whose composition with the sum
agrees with parity on every input whose sum is small.  Exact rational
arithmetic keeps the agreement literal; the tail-bound calculators are
ordinary floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .common import Bound, PreconditionError
from .formulas import Assignment, XorFormula


@dataclass(frozen=True)
class UnivariatePoly:
    """Exact-rational polynomial, coefficients in ascending degree order."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coefficients) - 1

    def __call__(self, x) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc


def _poly_add(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * max(len(a), len(b))
    for i, c in enumerate(a):
        out[i] += c
    for i, c in enumerate(b):
        out[i] += c
    return out


def _poly_mul_linear(a: list[Fraction], root: int) -> list[Fraction]:
    """Multiply by (x - root)."""
    out = [Fraction(0)] * (len(a) + 1)
    for i, c in enumerate(a):
        out[i] -= c * root
        out[i + 1] += c
    return out


def lagrange_interpolate(
    nodes: Sequence[int], values: Sequence[Fraction]
) -> UnivariatePoly:
    """Unique degree <= len(nodes)-1 polynomial through (node, value) pairs."""
    if len(nodes) != len(values):
        raise ValueError("nodes and values must have the same length")
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    result: list[Fraction] = []
    for i, (xi, yi) in enumerate(zip(nodes, values)):
        basis = [Fraction(1)]
        denom = 1
        for j, xj in enumerate(nodes):
            if j == i:
                continue
            basis = _poly_mul_linear(basis, xj)
            denom *= xi - xj
        scale = Fraction(yi, denom)
        result = _poly_add(result, [c * scale for c in basis])
    return UnivariatePoly(tuple(result))


@dataclass(frozen=True)
class XorRealization:
    """Degree <= d polynomial matching parity at every small coordinate sum."""

    k: int
    d: int
    qpoly: UnivariatePoly
    node_set: tuple[int, ...]

    def __post_init__(self):
        if self.qpoly.degree > len(self.node_set) - 1 or self.qpoly.degree > self.d:
            raise ValueError("polynomial degree exceeds the node budget")
        for s in self.node_set:
            want = Fraction((-1) ** ((self.k - s) // 2))
            if self.qpoly(s) != want:
                raise ValueError(f"polynomial misses target at node {s}")


def lambda_sum(z: Sequence[int]) -> int:
    """Coordinate sum of a ±1 vector."""
    total = 0
    for v in z:
        if v not in (-1, 1):
            raise ValueError(f"entries must be +1 or -1, got {v}")
        total += v
    return total


def interpolate_xor_poly(K: int, d: int) -> XorRealization:
    """Interpolate parity-as-a-function-of-the-sum on all admissible sums in
    [-d, d].

    Admissible sums have the same parity as K; the target at sum s is
    (-1)^((K-s)/2).  With d = K the composition equals parity everywhere.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if d > K:
        raise ValueError(f"d={d} exceeds K={K}")
    nodes = tuple(s for s in range(-d, d + 1) if (K - s) % 2 == 0)
    values = [Fraction((-1) ** ((K - s) // 2)) for s in nodes]
    qpoly = lagrange_interpolate(nodes, values)
    return XorRealization(K, d, qpoly, nodes)


def kl_bernoulli(a: float, b: float) -> float:
    """Bernoulli relative entropy a ln(a/b) + (1-a) ln((1-a)/(1-b)).

    Endpoints follow the 0 ln 0 = 0 convention; a divergent combination
    returns +inf.
    """
    if not (0 <= a <= 1 and 0 <= b <= 1):
        raise ValueError(f"arguments must lie in [0, 1], got a={a}, b={b}")

    def term(p: float, q: float) -> float:
        if p == 0:
            return 0.0
        if q == 0:
            return math.inf
        return p * math.log(p / q)

    return term(a, b) + term(1 - a, 1 - b)


def xor_disagreement_bound(K: int, d: int, mu: float) -> Bound:
    """Tail bound 2 exp(-D(1/2 + d/2K, 1/2 + 2^(d-1) mu / d) K) on the
    probability that a (d, mu)-close-to-uniform ±1 vector has coordinate
    sum exceeding d in absolute value."""
    if d < 1 or d > K:
        raise PreconditionError(f"required 1 <= d <= K, got d={d}, K={K}")
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    if K * (2 ** d) * mu / d >= d:
        raise PreconditionError(
            f"required K*2^d*mu/d < d, got {K * 2 ** d * mu / d} >= {d}")
    a = 0.5 + d / (2 * K)
    alpha = 0.5 + (2 ** (d - 1)) * mu / d
    value = 2.0 * math.exp(-kl_bernoulli(a, alpha) * K)
    return Bound(value, value >= 1.0)


def agreement_on_formula(
    J: XorFormula, psi: Assignment, real: XorRealization
) -> Fraction:
    """Exact fraction of tuples where the realized polynomial reproduces the
    tuple's parity under psi."""
    if real.k != J.K:
        raise ValueError(f"realization arity {real.k} != formula arity {J.K}")
    if psi.n != J.n:
        raise ValueError(f"assignment has n={psi.n}, formula has n={J.n}")
    cache: dict[int, Fraction] = {}
    agree = 0
    for tup in J.tuples:
        z = [lit.sign * psi.values[lit.var - 1] for lit in tup.literals]
        lam = sum(z)
        if lam not in cache:
            cache[lam] = real.qpoly(lam)
        parity = 1
        for v in z:
            parity *= v
        if cache[lam] == parity:
            agree += 1
    return Fraction(agree, J.m)
