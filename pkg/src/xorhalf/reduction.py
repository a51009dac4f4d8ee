"""Five-stage pipeline from parity formulas to halfspace-learning samples.

Stage I bundles constraints into odd-size groups scored by majority of
parities.  Stage II randomizes labels while flipping first literals, which
preserves the value of every assignment.  Stage III filters on the
pseudo-randomness statistics.  Stage IV embeds bundles as sparse ternary
vectors of literal indicators.  Stage V lifts through degree-bounded
monomials and doubles coordinates so ternary halfspaces become binary
halfspaces.

The witness halfspace is the polynomial built from a hidden assignment and
a parity realization, expanded over the monomial coordinates.  Its weight
vector is kept in functional form (the expansion is reconstructible on
demand), because at interesting sizes the lifted dimension is far too
large to materialize while scores are cheap to evaluate exactly.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Union

import numpy as np

from .common import Bound, PreconditionError, ResourceLimitError, rng_stream, threshold_sign
from .formulas import (
    Assignment,
    LabeledQKFormula,
    PlantedInstance,
    QKTuple,
    XorFormula,
    eval_qktuple,
    mxor_value,
)
from .polyrealize import XorRealization, interpolate_xor_poly, kl_bernoulli
from .pseudorandom import FrequencyReport, pseudorandom_test

#: Default cap on materialized sample cells (entries x binary dimension).
MEMORY_BUDGET_DEFAULT = 50_000_000

#: Default cap on materialized witness weight entries.
WEIGHT_LIMIT_DEFAULT = 500_000


# ---------------------------------------------------------------------------
# samples


@dataclass(frozen=True, slots=True)
class SparseTernary:
    """A ternary vector stored as sorted indices of its nonzero ±1 entries."""

    indices: tuple[int, ...]
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must have equal length")
        if any(v not in (-1, 1) for v in self.values):
            raise ValueError("nonzero entries must be +1 or -1")
        if any(a >= b for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=np.int8)
        for i, v in zip(self.indices, self.values):
            out[i] = v
        return out

    @classmethod
    def from_dense(cls, x: Sequence[int]) -> "SparseTernary":
        idx = tuple(i for i, v in enumerate(x) if v != 0)
        return cls(idx, tuple(int(x[i]) for i in idx))


@dataclass(frozen=True)
class TernarySample:
    """Labeled sparse ternary vectors."""

    dim: int
    entries: tuple[tuple[SparseTernary, int], ...]

    def __post_init__(self):
        for j, (vec, label) in enumerate(self.entries):
            if label not in (-1, 1):
                raise ValueError(f"entry {j} label must be +1 or -1")
            if vec.indices and vec.indices[-1] >= self.dim:
                raise ValueError(f"entry {j} index {vec.indices[-1]} >= dim {self.dim}")

    @property
    def m(self) -> int:
        return len(self.entries)

    def labels(self) -> tuple[int, ...]:
        return tuple(label for _, label in self.entries)


@dataclass(frozen=True)
class BinarySample:
    """Labeled dense ±1 vectors; rows is an (m, dim) int8 matrix."""

    dim: int
    labels: tuple[int, ...]
    rows: np.ndarray

    def __post_init__(self):
        if self.rows.shape != (len(self.labels), self.dim):
            raise ValueError(f"rows shape {self.rows.shape} does not match "
                             f"({len(self.labels)}, {self.dim})")
        if any(y not in (-1, 1) for y in self.labels):
            raise ValueError("labels must be +1 or -1")
        if not np.isin(self.rows, (-1, 1)).all():
            raise ValueError("entries must be +1 or -1")

    @property
    def m(self) -> int:
        return len(self.labels)


# ---------------------------------------------------------------------------
# monomial indexing


@dataclass(frozen=True)
class MonomialIndex:
    """Canonical ordering of the degree <= d monomials over u coordinates.

    Monomials are multisets of coordinate indices (the empty multiset is
    the constant), ordered by size then lexicographically.  Positions are
    computed arithmetically, so no enumeration is needed even when the
    ambient dimension is astronomically large.  ``padded`` declares the
    ambient dimension (u+1)^d with zero padding beyond the monomials;
    unpadded indexes hold exactly the distinct monomials.
    """

    u: int
    d: int
    padded: bool = True

    def __post_init__(self):
        if self.u < 1 or self.d < 0:
            raise ValueError("u must be positive and d nonnegative")

    @property
    def monomial_count(self) -> int:
        return sum(math.comb(self.u + e - 1, e) for e in range(self.d + 1))

    @property
    def ambient(self) -> int:
        return (self.u + 1) ** self.d if self.padded else self.monomial_count

    def _offset(self, size: int) -> int:
        return sum(math.comb(self.u + e - 1, e) for e in range(size))

    def position(self, multiset: tuple[int, ...]) -> int:
        """Position of a nondecreasing index tuple of size <= d."""
        e = len(multiset)
        if e > self.d:
            raise ValueError(f"monomial degree {e} exceeds d={self.d}")
        if any(a > b for a, b in zip(multiset, multiset[1:])):
            raise ValueError("multiset must be nondecreasing")
        if multiset and not (0 <= multiset[0] and multiset[-1] < self.u):
            raise ValueError(f"indices must lie in [0, {self.u})")
        rank = 0
        lo = 0
        for k, value in enumerate(multiset):
            remaining = e - k - 1
            for v in range(lo, value):
                rank += math.comb((self.u - v) + remaining - 1, remaining)
            lo = value
        return self._offset(e) + rank

    def multisets(self) -> Iterator[tuple[int, ...]]:
        """All monomials in position order (requires a small index)."""
        for e in range(self.d + 1):
            yield from itertools.combinations_with_replacement(range(self.u), e)


# ---------------------------------------------------------------------------
# the ternary-to-binary coordinate doubling


def ternary_to_binary(x: Sequence[int]) -> np.ndarray:
    """Coordinate doubling: +1 -> (1,1), -1 -> (-1,-1), 0 -> (-1,1)."""
    arr = np.asarray(x, dtype=np.int8)
    out = np.empty(2 * arr.shape[-1], dtype=np.int8)
    out[0::2] = np.where(arr == 1, 1, -1)
    out[1::2] = np.where(arr == -1, -1, 1)
    return out


def duplicate_weights(w: Sequence) -> list:
    """Push a ternary-space weight vector through the doubling: each weight
    w_i becomes the pair (w_i/2, w_i/2), so scores are preserved exactly."""
    out = []
    for wi in w:
        half = Fraction(wi) / 2 if not isinstance(wi, float) else wi / 2
        out.extend((half, half))
    return out


# ---------------------------------------------------------------------------
# pipeline stages


def step1_amplify(J: XorFormula, q: int, seed: int) -> tuple[QKTuple, ...]:
    """Discard m mod q tuples at random and bundle the rest into ordered
    groups of q."""
    if q % 2 == 0:
        raise ValueError(f"q must be odd, got {q}")
    if q > J.m:
        raise ValueError(f"q={q} exceeds m={J.m}")
    rng = rng_stream(seed, "amplify-partition")
    perm = rng.permutation(J.m)
    kept = perm[: (J.m // q) * q]
    return tuple(
        QKTuple(tuple(J.tuples[int(i)] for i in kept[b * q:(b + 1) * q]))
        for b in range(J.m // q)
    )


def step2_scatter(
    bundles: Sequence[QKTuple], n: int, seed: int
) -> LabeledQKFormula:
    """Keep each bundle as (C, +1) or replace it by (C', -1) with independent
    fair coins, where C' flips the first literal of every block."""
    if len(bundles) == 0:
        raise ValueError("empty bundle sequence")
    entries = []
    for j, bundle in enumerate(bundles):
        coin = int(rng_stream(seed, "scatter-coin", j).integers(2))
        if coin == 0:
            entries.append((bundle, 1))
        else:
            entries.append((bundle.flip_firsts(), -1))
    q, K = bundles[0].q, bundles[0].k
    return LabeledQKFormula(n, q, K, tuple(entries))


@dataclass(frozen=True)
class FilterOutcome:
    verdict: str  # "pass" or "not-random"
    report: FrequencyReport
    formula: LabeledQKFormula


def step3_filter(
    F: LabeledQKFormula, t: int, tau, *, streaming: bool = False
) -> FilterOutcome:
    """Run the pseudo-randomness test on the formula of all blocks."""
    report = pseudorandom_test(F.flat_formula(), t, tau, streaming=streaming)
    return FilterOutcome("pass" if report.passed else "not-random", report, F)


def _embed_position(n: int, K: int, block: int, slot: int, var: int) -> int:
    return (block * K + slot) * n + (var - 1)


def step4_embed(F: LabeledQKFormula) -> TernarySample:
    """Concatenated literal-indicator embedding; one ±1 per literal."""
    n, q, K = F.n, F.q, F.K
    entries = []
    for tup, label in F.entries:
        pairs = []
        for b, block in enumerate(tup.blocks):
            for i, lit in enumerate(block.literals):
                pairs.append((_embed_position(n, K, b, i, lit.var), lit.sign))
        pairs.sort()
        idx = tuple(p for p, _ in pairs)
        vals = tuple(v for _, v in pairs)
        entries.append((SparseTernary(idx, vals), label))
    return TernarySample(n * q * K, tuple(entries))


def _rho_sparse(
    vec: SparseTernary, idx: MonomialIndex
) -> list[tuple[int, int]]:
    """Nonzero coordinates of the monomial lift of a sparse ternary vector."""
    out = []
    support = vec.indices
    values = dict(zip(vec.indices, vec.values))
    for e in range(idx.d + 1):
        for mono in itertools.combinations_with_replacement(support, e):
            value = 1
            for coord in mono:
                value *= values[coord]
            out.append((idx.position(mono), value))
    return out


def _rho_strict_row(x: np.ndarray, u: int, d: int) -> np.ndarray:
    """Monomial lift with the redundant function-based indexing.

    Coordinates are indexed by maps from d slots to a coordinate or a
    skip marker; repeated and reordered index patterns each get their own
    coordinate, for dimension-exact parity with the padded canonical lift.
    The row is the d-fold Kronecker power of (1, x_1, ..., x_u).
    """
    values = np.concatenate(([1], np.asarray(x, dtype=np.int64)))
    row = np.ones(1, dtype=np.int64)
    for _ in range(d):
        row = np.kron(row, values)
    return row.astype(np.int8)


def step5_lift(
    S: TernarySample,
    d: int,
    *,
    mode: str = "canonical",
    budget: int = MEMORY_BUDGET_DEFAULT,
) -> tuple[BinarySample, MonomialIndex]:
    """Monomial lift followed by the ternary-to-binary doubling.

    ``canonical`` keeps one coordinate per distinct monomial and pads with
    zeros to the ambient dimension (u+1)^d; ``truncated`` drops the
    padding; ``strict-paper`` reproduces the redundant function indexing.
    """
    if mode not in ("canonical", "truncated", "strict-paper"):
        raise ValueError(f"unknown lift mode {mode!r}")
    u = S.dim
    idx = MonomialIndex(u, d, padded=(mode != "truncated"))
    ambient = (u + 1) ** d if mode == "strict-paper" else idx.ambient
    cells = S.m * 2 * ambient
    if cells > budget:
        raise ResourceLimitError(
            f"materializing {S.m} x {2 * ambient} binary cells exceeds the "
            f"budget {budget}")

    rows = np.empty((S.m, 2 * ambient), dtype=np.int8)
    base = np.tile(np.array([-1, 1], dtype=np.int8), ambient)
    labels = []
    for j, (vec, label) in enumerate(S.entries):
        labels.append(label)
        if mode == "strict-paper":
            ternary = _rho_strict_row(vec.to_dense(u), u, d)
            rows[j] = ternary_to_binary(ternary)
        else:
            row = base.copy()
            for pos, value in _rho_sparse(vec, idx):
                row[2 * pos] = value
                row[2 * pos + 1] = value
            rows[j] = row
    return BinarySample(2 * ambient, tuple(labels), rows), idx


# ---------------------------------------------------------------------------
# the witness halfspace


@dataclass(frozen=True)
class MarginStats:
    min_correct_margin: Optional[Fraction]
    weight_l1: Fraction


@dataclass(frozen=True)
class PipelineParams:
    """Free parameters of the pipeline; q odd, 1 <= d <= K, 0 <= t <= K."""

    n: int
    K: int
    q: int
    d: int
    t: int
    tau: Fraction
    eta: Fraction = Fraction(0)
    seed: int = 0
    r: Optional[int] = None
    c_schedule: int = 4

    def __post_init__(self):
        object.__setattr__(self, "tau", Fraction(self.tau))
        object.__setattr__(self, "eta", Fraction(self.eta))
        if self.q % 2 == 0 or self.q < 1:
            raise ValueError(f"q must be odd and positive, got {self.q}")
        if not 1 <= self.d <= self.K:
            raise ValueError(f"need 1 <= d <= K, got d={self.d}, K={self.K}")
        if not 0 <= self.t <= self.K:
            raise ValueError(f"need 0 <= t <= K, got t={self.t}, K={self.K}")
        if self.K > self.n:
            raise ValueError(f"K={self.K} exceeds n={self.n}")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")


@dataclass(frozen=True)
class WitnessHalfspace:
    """Halfspace over the lifted binary space certifying near-realizability.

    The weight vector is determined by (assignment, realization, index):
    per block, expand qpoly(sum of psi-weighted block coordinates) into
    monomial coefficients, then halve-and-duplicate through the coordinate
    doubling.  Scores are evaluated through that polynomial identity, which
    agrees with the literal inner product on every ternary vector.
    """

    psi: Assignment
    realization: XorRealization
    index: MonomialIndex
    n: int
    q: int
    K: int
    margin_stats: Optional[MarginStats] = None

    def __post_init__(self):
        if self.index.u != self.n * self.q * self.K:
            raise ValueError(
                f"index dimension {self.index.u} != n*q*K = {self.n * self.q * self.K}")
        if self.realization.qpoly.degree > self.index.d:
            raise ValueError("realization degree exceeds the index depth")
        if self.realization.k != self.K:
            raise ValueError("realization arity differs from K")
        if self.psi.n != self.n:
            raise ValueError("assignment length differs from n")

    def weight_l1(self) -> Fraction:
        """Sum of absolute weights over the binary dimension, in closed form.

        Within one block the size-e monomial coefficients of (sum of nK
        signed coordinates)^e have absolute values summing to (nK)^e, so
        the total is |q a_0| + q * sum_e |a_e| (nK)^e; the doubling halves
        each weight but duplicates it, leaving the sum unchanged.
        """
        coeffs = self.realization.qpoly.coefficients
        if not coeffs:
            return Fraction(0)
        nk = self.n * self.K
        total = abs(self.q * coeffs[0])
        for e in range(1, len(coeffs)):
            total += self.q * abs(coeffs[e]) * Fraction(nk) ** e
        return total

    def score(self, vec: SparseTernary) -> Fraction:
        """Exact halfspace score of a ternary vector (before doubling)."""
        nk = self.n * self.K
        inner = [0] * self.q
        for pos, value in zip(vec.indices, vec.values):
            block = pos // nk
            var = pos % self.n
            inner[block] += value * self.psi.values[var]
        qpoly = self.realization.qpoly
        return sum((qpoly(s) for s in inner), Fraction(0))

    def scores(self, sample: TernarySample) -> list[Fraction]:
        if sample.dim != self.index.u:
            raise ValueError(f"sample dim {sample.dim} != index dim {self.index.u}")
        cache: dict[tuple[int, ...], Fraction] = {}
        qpoly = self.realization.qpoly
        nk = self.n * self.K
        out = []
        for vec, _ in sample.entries:
            inner = [0] * self.q
            for pos, value in zip(vec.indices, vec.values):
                inner[pos // nk] += value * self.psi.values[pos % self.n]
            key = tuple(sorted(inner))
            if key not in cache:
                cache[key] = sum((qpoly(s) for s in inner), Fraction(0))
            out.append(cache[key])
        return out

    def classify(self, vec: SparseTernary) -> int:
        return threshold_sign(self.score(vec))

    def pre_lift_weights(
        self, limit: int = WEIGHT_LIMIT_DEFAULT
    ) -> dict[tuple[int, ...], Fraction]:
        """Materialized monomial coefficients (multiset -> weight)."""
        coeffs = self.realization.qpoly.coefficients
        nk = self.n * self.K
        degree = len(coeffs) - 1
        count = self.q * sum(
            math.comb(nk + e - 1, e) for e in range(1, degree + 1)
        ) + 1
        if count > limit:
            raise ResourceLimitError(
                f"{count} weight entries exceed the limit {limit}")
        weights: dict[tuple[int, ...], Fraction] = {}
        if coeffs and self.q * coeffs[0] != 0:
            weights[()] = self.q * coeffs[0]
        for block in range(self.q):
            lo = block * nk
            for e in range(1, degree + 1):
                if coeffs[e] == 0:
                    continue
                fact_e = math.factorial(e)
                for mono in itertools.combinations_with_replacement(
                        range(lo, lo + nk), e):
                    mult = Counter(mono)
                    multinom = fact_e
                    for r in mult.values():
                        multinom //= math.factorial(r)
                    sign = 1
                    for coord, r in mult.items():
                        if self.psi.values[coord % self.n] == -1 and r % 2 == 1:
                            sign = -sign
                    weight = coeffs[e] * multinom * sign
                    if weight != 0:
                        weights[mono] = weights.get(mono, Fraction(0)) + weight
        return weights

    def dense_pre_lift_weights(
        self, limit: int = WEIGHT_LIMIT_DEFAULT
    ) -> list[Fraction]:
        """Weight per canonical monomial position, padding included."""
        if self.index.ambient > limit:
            raise ResourceLimitError(
                f"ambient dimension {self.index.ambient} exceeds the limit {limit}")
        dense = [Fraction(0)] * self.index.ambient
        for mono, weight in self.pre_lift_weights(limit).items():
            dense[self.index.position(mono)] = weight
        return dense

    def dense_binary_weights(
        self, limit: int = WEIGHT_LIMIT_DEFAULT
    ) -> list[Fraction]:
        """Weights over the doubled binary coordinates (the 1/2 duplication)."""
        return duplicate_weights(self.dense_pre_lift_weights(limit))


def build_witness(
    psi: Assignment,
    real: XorRealization,
    idx: MonomialIndex,
    params: PipelineParams,
    sample: Optional[TernarySample] = None,
) -> WitnessHalfspace:
    """Assemble the witness halfspace; margins are measured on ``sample``."""
    witness = WitnessHalfspace(
        psi=psi, realization=real, index=idx,
        n=params.n, q=params.q, K=params.K,
    )
    margin = None
    if sample is not None:
        scores = witness.scores(sample)
        correct = [
            abs(s) for s, (_, label) in zip(scores, sample.entries)
            if threshold_sign(s) == label
        ]
        margin = min(correct) if correct else None
    stats = MarginStats(margin, witness.weight_l1())
    return WitnessHalfspace(
        psi=psi, realization=real, index=idx,
        n=params.n, q=params.q, K=params.K, margin_stats=stats,
    )


# ---------------------------------------------------------------------------
# bound and schedule helpers


def eta_prime(
    eta, q: int, K: int, d: int, n: int, tau: float, *, t: Optional[int] = None
) -> Bound:
    """Error bound eta + 2q exp(-D(1/2 + d/2K, 1/2 + 2^(d-1) n^d tau / d) K)
    for the lifted sample, under the side condition K 2^d n^d tau / d < d."""
    if not 1 <= d <= K:
        raise PreconditionError(f"required 1 <= d <= K, got d={d}, K={K}")
    if t is not None and d > t:
        raise PreconditionError(f"required d <= t, got d={d}, t={t}")
    mu = float(n) ** d * float(tau)
    if K * (2.0 ** d) * mu / d >= d:
        raise PreconditionError(
            f"required K*2^d*n^d*tau/d < d, got {K * 2.0 ** d * mu / d} >= {d}")
    a = 0.5 + d / (2 * K)
    alpha = 0.5 + (2.0 ** (d - 1)) * mu / d
    value = float(eta) + 2 * q * math.exp(-kl_bernoulli(a, alpha) * K)
    return Bound(value, value >= 0.5)


def round_up_to_odd(x: float) -> int:
    k = max(1, math.ceil(x))
    return k if k % 2 == 1 else k + 1


def preset_params(
    name: str, n: int, K: int, eta=Fraction(1, 20), seed: int = 0, C: int = 4
) -> PipelineParams:
    """Named parameter schedules; desk-scale integerizations of the two
    asymptotic regimes (d near sqrt(K) log^(2/3) K, and d near K/loglog K)."""
    if K < 2:
        raise ValueError("presets need K >= 2")
    log_k = math.log(K)
    if name == "case1":
        r = max(4, math.ceil(C * log_k * math.sqrt(K)))
        d = round(log_k ** (2 / 3) * math.sqrt(K))
    elif name == "case2":
        r = max(4, C * K)
        loglog = math.log(max(math.e, log_k))
        d = round(K / loglog)
    else:
        raise ValueError(f"unknown preset {name!r}")
    t = min(r, K)
    d = max(1, min(d, t))
    tau = Fraction(float(n) ** (-r / 4))
    return PipelineParams(
        n=n, K=K, q=round_up_to_odd(C * K), d=d, t=t, tau=tau,
        eta=Fraction(eta), seed=seed, r=r, c_schedule=C,
    )


# ---------------------------------------------------------------------------
# the full pipeline


@dataclass
class PipelineResult:
    params: PipelineParams
    bundles: tuple[QKTuple, ...]
    labeled: LabeledQKFormula
    filter_outcome: FilterOutcome
    ternary: TernarySample
    index: MonomialIndex
    binary_dim: int
    binary: Optional[BinarySample]
    witness: Optional[WitnessHalfspace]
    witness_error: Optional[Fraction]
    mismatch_fraction: Optional[Fraction]
    unbalanced_fraction: Optional[Fraction]
    eta_prime_bound: Optional[Bound]
    eta_prime_note: Optional[str]


def run_pipeline(
    instance: Union[XorFormula, PlantedInstance],
    params: PipelineParams,
    *,
    lift_mode: str = "canonical",
    materialize: Union[bool, str] = "auto",
    budget: int = MEMORY_BUDGET_DEFAULT,
    streaming_freq: bool = False,
) -> PipelineResult:
    """Chain the five stages and collect witness statistics.

    With a planted instance the hidden assignment drives the witness:
    ``mismatch_fraction`` counts entries whose label disagrees with the
    majority-parity at the assignment, ``unbalanced_fraction`` counts
    entries with some block coordinate sum exceeding d in absolute value,
    and the witness classifies every entry outside those two sets
    correctly, so witness_error <= mismatch + unbalanced always.

    The binary sample is materialized only when it fits the budget
    (``materialize="auto"``); its would-be dimension is always recorded.
    """
    if isinstance(instance, PlantedInstance):
        J, psi = instance.formula, instance.planted
    else:
        J, psi = instance, None
    if J.n != params.n or J.K != params.K:
        raise ValueError("formula shape differs from params")

    bundles = step1_amplify(J, params.q, params.seed)
    labeled = step2_scatter(bundles, params.n, params.seed)
    filter_outcome = step3_filter(
        labeled, params.t, params.tau, streaming=streaming_freq)
    ternary = step4_embed(labeled)

    idx = MonomialIndex(ternary.dim, params.d, padded=(lift_mode != "truncated"))
    ambient = ((ternary.dim + 1) ** params.d
               if lift_mode == "strict-paper" else idx.ambient)
    binary_dim = 2 * ambient
    binary = None
    want = materialize is True or (
        materialize == "auto" and ternary.m * binary_dim <= budget)
    if want:
        binary, idx = step5_lift(ternary, params.d, mode=lift_mode, budget=budget)

    eta_bound = None
    eta_note = None
    try:
        eta_bound = eta_prime(
            params.eta, params.q, params.K, params.d, params.n,
            float(params.tau), t=params.t)
    except PreconditionError as exc:
        eta_note = str(exc)

    witness = None
    witness_error = None
    mismatch = None
    unbalanced = None
    if psi is not None:
        real = interpolate_xor_poly(params.K, params.d)
        witness = build_witness(psi, real, idx, params, sample=ternary)
        scores = witness.scores(ternary)
        m = labeled.m
        wrong = 0
        mismatched = 0
        unbal = 0
        for (tup, label), score in zip(labeled.entries, scores):
            if threshold_sign(score) != label:
                wrong += 1
            if mxor_value(eval_qktuple(tup, psi), params.q, params.K) != label:
                mismatched += 1
            if any(
                abs(sum(lit.sign * psi.values[lit.var - 1]
                        for lit in block.literals)) > params.d
                for block in tup.blocks
            ):
                unbal += 1
        witness_error = Fraction(wrong, m)
        mismatch = Fraction(mismatched, m)
        unbalanced = Fraction(unbal, m)

    return PipelineResult(
        params=params,
        bundles=bundles,
        labeled=labeled,
        filter_outcome=filter_outcome,
        ternary=ternary,
        index=idx,
        binary_dim=binary_dim,
        binary=binary,
        witness=witness,
        witness_error=witness_error,
        mismatch_fraction=mismatch,
        unbalanced_fraction=unbalanced,
        eta_prime_bound=eta_bound,
        eta_prime_note=eta_note,
    )
