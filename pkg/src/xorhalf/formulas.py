"""Parity constraint instances: signed tuples, values, and generators.

A constraint is an ordered tuple of K literals over K distinct variables;
a formula is a collection of such tuples.  Satisfaction of a tuple under a
±1 assignment is the product of its literal values, with +1 meaning
"satisfied".  Bundled (q-block) constraints take the majority of the q
per-block parities, which is well defined because q is required to be odd.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .common import ResourceLimitError, rng_stream

#: Largest variable count brute_force_value will sweep exhaustively.
EXHAUSTIVE_LIMIT_DEFAULT = 24

#: Rough cap on scratch cells (assignments x tuples x arity) per sweep chunk.
_SWEEP_CHUNK_CELLS = 8_000_000


@dataclass(frozen=True, slots=True)
class Literal:
    """A signed variable occurrence; ``var`` is 1-based."""

    var: int
    sign: int

    def __post_init__(self):
        if self.var < 1:
            raise ValueError(f"variable index must be >= 1, got {self.var}")
        if self.sign not in (-1, 1):
            raise ValueError(f"literal sign must be +1 or -1, got {self.sign}")

    def flipped(self) -> "Literal":
        return Literal(self.var, -self.sign)


@dataclass(frozen=True, slots=True)
class KTuple:
    """An ordered tuple of literals over pairwise-distinct variables."""

    literals: tuple[Literal, ...]

    def __post_init__(self):
        if len(self.literals) == 0:
            raise ValueError("a constraint tuple needs at least one literal")
        vars_ = [lit.var for lit in self.literals]
        if len(set(vars_)) != len(vars_):
            raise ValueError(f"duplicate variable in tuple: {sorted(vars_)}")

    @property
    def k(self) -> int:
        return len(self.literals)

    def flip_first(self) -> "KTuple":
        first = self.literals[0].flipped()
        return KTuple((first,) + self.literals[1:])


@dataclass(frozen=True, slots=True)
class Assignment:
    """A ±1 value per variable."""

    values: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (-1, 1) for v in self.values):
            raise ValueError("assignment entries must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.int8)

    @classmethod
    def from_index(cls, index: int, n: int) -> "Assignment":
        """Assignment number ``index`` in lexicographic order (+1 < -1).

        Variable 1 is the most significant position, so index 0 is the
        all-+1 assignment and 2**n - 1 is the all--1 one.
        """
        if not 0 <= index < (1 << n):
            raise ValueError(f"index {index} out of range for n={n}")
        return cls(tuple(1 - 2 * ((index >> (n - v)) & 1) for v in range(1, n + 1)))


@dataclass(frozen=True, slots=True)
class XorFormula:
    """A collection of m parity constraints over n variables."""

    n: int
    K: int
    tuples: tuple[KTuple, ...]

    def __post_init__(self):
        if self.n < 1 or self.K < 1:
            raise ValueError("n and K must be positive")
        if len(self.tuples) < 1:
            raise ValueError("a formula needs at least one tuple")
        for j, tup in enumerate(self.tuples):
            if tup.k != self.K:
                raise ValueError(f"tuple {j} has arity {tup.k}, expected {self.K}")
            for lit in tup.literals:
                if lit.var > self.n:
                    raise ValueError(
                        f"tuple {j} references variable {lit.var} > n={self.n}"
                    )

    @property
    def m(self) -> int:
        return len(self.tuples)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(m, K) 0-based variable indices and (m, K) signs."""
        vars0 = np.empty((self.m, self.K), dtype=np.int64)
        signs = np.empty((self.m, self.K), dtype=np.int8)
        for j, tup in enumerate(self.tuples):
            for i, lit in enumerate(tup.literals):
                vars0[j, i] = lit.var - 1
                signs[j, i] = lit.sign
        return vars0, signs


@dataclass(frozen=True, slots=True)
class QKTuple:
    """An odd number of same-arity constraint tuples, evaluated by majority."""

    blocks: tuple[KTuple, ...]

    def __post_init__(self):
        if len(self.blocks) % 2 == 0:
            raise ValueError(f"block count must be odd, got {len(self.blocks)}")
        ks = {b.k for b in self.blocks}
        if len(ks) != 1:
            raise ValueError(f"blocks must share one arity, got {sorted(ks)}")

    @property
    def q(self) -> int:
        return len(self.blocks)

    @property
    def k(self) -> int:
        return self.blocks[0].k

    def flip_firsts(self) -> "QKTuple":
        return QKTuple(tuple(b.flip_first() for b in self.blocks))


@dataclass(frozen=True, slots=True)
class LabeledQKFormula:
    """Bundled constraints with ±1 labels."""

    n: int
    q: int
    K: int
    entries: tuple[tuple[QKTuple, int], ...]

    def __post_init__(self):
        if self.q % 2 == 0:
            raise ValueError(f"q must be odd, got {self.q}")
        if len(self.entries) < 1:
            raise ValueError("a labeled formula needs at least one entry")
        for j, (tup, label) in enumerate(self.entries):
            if label not in (-1, 1):
                raise ValueError(f"entry {j} label must be +1 or -1, got {label}")
            if tup.q != self.q or tup.k != self.K:
                raise ValueError(f"entry {j} has shape ({tup.q},{tup.k}), "
                                 f"expected ({self.q},{self.K})")
            for block in tup.blocks:
                for lit in block.literals:
                    if lit.var > self.n:
                        raise ValueError(
                            f"entry {j} references variable {lit.var} > n={self.n}")

    @property
    def m(self) -> int:
        return len(self.entries)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(m, q, K) variable indices (0-based), signs, and (m,) labels."""
        m = self.m
        vars0 = np.empty((m, self.q, self.K), dtype=np.int64)
        signs = np.empty((m, self.q, self.K), dtype=np.int8)
        labels = np.empty(m, dtype=np.int8)
        for j, (tup, label) in enumerate(self.entries):
            labels[j] = label
            for b, block in enumerate(tup.blocks):
                for i, lit in enumerate(block.literals):
                    vars0[j, b, i] = lit.var - 1
                    signs[j, b, i] = lit.sign
        return vars0, signs, labels

    def flat_formula(self) -> XorFormula:
        """All blocks of all entries as one plain formula (entry-major order)."""
        flat = tuple(block for tup, _ in self.entries for block in tup.blocks)
        return XorFormula(self.n, self.K, flat)


@dataclass(frozen=True, slots=True)
class PlantedInstance:
    """A formula built around a hidden assignment with an exact violation count.

    Exactly ``floor(noise_rate * m)`` tuples are violated at ``planted``;
    every other tuple is satisfied.  Checked at construction.
    """

    formula: XorFormula
    planted: Assignment
    noise_rate: Fraction
    flipped_indices: frozenset[int]

    def __post_init__(self):
        if not (0 <= self.noise_rate < Fraction(1, 2)):
            raise ValueError(f"noise rate must be in [0, 1/2), got {self.noise_rate}")
        if self.planted.n != self.formula.n:
            raise ValueError("planted assignment length differs from formula n")
        m = self.formula.m
        expected = math.floor(self.noise_rate * m)
        if len(self.flipped_indices) != expected:
            raise ValueError(
                f"expected {expected} flipped tuples, got {len(self.flipped_indices)}")
        for j, tup in enumerate(self.formula.tuples):
            value = xor_value(eval_tuple(tup, self.planted))
            want = -1 if j in self.flipped_indices else 1
            if value != want:
                raise ValueError(f"tuple {j} has parity {value}, expected {want}")


# ---------------------------------------------------------------------------
# evaluation


def eval_tuple(C: KTuple, psi: Assignment) -> tuple[int, ...]:
    """Literal values of C under psi, in tuple order."""
    n = psi.n
    out = []
    for lit in C.literals:
        if lit.var > n:
            raise ValueError(f"tuple references variable {lit.var} > n={n}")
        out.append(lit.sign * psi.values[lit.var - 1])
    return tuple(out)


def xor_value(z: Sequence[int]) -> int:
    """Parity of a ±1 vector: the product of its entries."""
    out = 1
    for v in z:
        if v not in (-1, 1):
            raise ValueError(f"entries must be +1 or -1, got {v}")
        out *= v
    return out


def mxor_value(z: Sequence[int], q: int, K: int) -> int:
    """Majority of the q per-block parities of a ±1 vector of length q*K."""
    if q % 2 == 0:
        raise ValueError(f"q must be odd, got {q}")
    if len(z) != q * K:
        raise ValueError(f"expected length {q * K}, got {len(z)}")
    total = sum(xor_value(z[b * K:(b + 1) * K]) for b in range(q))
    # q odd, so the sum of q odd terms is never zero
    return 1 if total > 0 else -1


def eval_qktuple(C: QKTuple, psi: Assignment) -> tuple[int, ...]:
    out: list[int] = []
    for block in C.blocks:
        out.extend(eval_tuple(block, psi))
    return tuple(out)


def val_xor(J: XorFormula, psi: Assignment) -> Fraction:
    """Exact fraction of satisfied tuples under psi."""
    if psi.n != J.n:
        raise ValueError(f"assignment has n={psi.n}, formula has n={J.n}")
    sat = sum(1 for tup in J.tuples if xor_value(eval_tuple(tup, psi)) == 1)
    return Fraction(sat, J.m)


def val_mxor(bundles: Sequence[QKTuple], psi: Assignment) -> Fraction:
    """Exact fraction of bundles whose majority-parity is +1 under psi."""
    if len(bundles) == 0:
        raise ValueError("empty bundle sequence")
    q, K = bundles[0].q, bundles[0].k
    sat = sum(
        1 for tup in bundles if mxor_value(eval_qktuple(tup, psi), q, K) == 1
    )
    return Fraction(sat, len(bundles))


def val_mxor_labeled(J: LabeledQKFormula, psi: Assignment) -> Fraction:
    """Exact fraction of entries whose majority-parity equals their label."""
    if psi.n != J.n:
        raise ValueError(f"assignment has n={psi.n}, formula has n={J.n}")
    sat = sum(
        1 for tup, label in J.entries
        if mxor_value(eval_qktuple(tup, psi), J.q, J.K) == label
    )
    return Fraction(sat, J.m)


# ---------------------------------------------------------------------------
# exhaustive sweeps

def _assignment_block(start: int, count: int, n: int) -> np.ndarray:
    """(count, n) ±1 matrix for assignment indices start..start+count-1."""
    idx = np.arange(start, start + count, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts[None, :]) & 1
    return (1 - 2 * bits).astype(np.int8)


def xor_satisfied_profile(J: XorFormula) -> np.ndarray:
    """Satisfied-tuple count for every assignment, in lexicographic order.

    Exhaustive over 2**n assignments; callers guard n.
    """
    vars0, signs = J.arrays()
    n, m, K = J.n, J.m, J.K
    total = 1 << n
    chunk = max(1, min(total, _SWEEP_CHUNK_CELLS // max(1, m * K)))
    out = np.empty(total, dtype=np.int64)
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        psis = _assignment_block(start, count, n)               # (c, n)
        z = signs[None, :, :] * psis[:, vars0]                  # (c, m, K)
        sat = (z.prod(axis=2) == 1).sum(axis=1)
        out[start:start + count] = sat
    return out


def mxor_satisfied_profile(
    entries_vars: np.ndarray,
    entries_signs: np.ndarray,
    labels: np.ndarray | None,
    n: int,
) -> np.ndarray:
    """Label-agreement count per assignment for bundled constraints.

    ``entries_vars``/``entries_signs`` have shape (m, q, K); ``labels`` is
    (m,) or None for the unlabeled +1 convention.
    """
    m, q, K = entries_vars.shape
    if labels is None:
        labels = np.ones(m, dtype=np.int8)
    total = 1 << n
    chunk = max(1, min(total, _SWEEP_CHUNK_CELLS // max(1, m * q * K)))
    out = np.empty(total, dtype=np.int64)
    for start in range(0, total, chunk):
        count = min(chunk, total - start)
        psis = _assignment_block(start, count, n)
        z = entries_signs[None, :, :, :] * psis[:, entries_vars]    # (c, m, q, K)
        block_xor = z.prod(axis=3)                                  # (c, m, q)
        mx = np.where(block_xor.sum(axis=2) > 0, 1, -1)
        out[start:start + count] = (mx == labels[None, :]).sum(axis=1)
    return out


def brute_force_value(
    J: Union[XorFormula, LabeledQKFormula],
    limit: int = EXHAUSTIVE_LIMIT_DEFAULT,
) -> tuple[Assignment, Fraction]:
    """Exhaustive argmax of the value, ties broken lexicographically (+1 < -1)."""
    if J.n > limit:
        raise ResourceLimitError(
            f"exhaustive search over n={J.n} exceeds the limit {limit}")
    if isinstance(J, XorFormula):
        profile = xor_satisfied_profile(J)
        denom = J.m
    else:
        vars0, signs, labels = J.arrays()
        profile = mxor_satisfied_profile(vars0, signs, labels, J.n)
        denom = J.m
    best = int(np.argmax(profile))  # first occurrence = lexicographically least
    return Assignment.from_index(best, J.n), Fraction(int(profile[best]), denom)


# ---------------------------------------------------------------------------
# generators


def _draw_distinct_vars(rng: np.random.Generator, n: int, K: int) -> list[int]:
    """Ordered uniform sample of K distinct variables (1-based)."""
    pool = list(range(1, n + 1))
    for i in range(K):
        j = i + int(rng.integers(n - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:K]


def gen_random_formula(n: int, m: int, K: int, seed: int) -> XorFormula:
    """m constraints drawn uniformly and independently.

    Each tuple comes from its own (seed, index) stream, so the result does
    not depend on generation order.
    """
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}")
    if m < 1:
        raise ValueError("m must be >= 1")
    tuples = []
    for j in range(m):
        rng = rng_stream(seed, "random-tuple", j)
        vars_ = _draw_distinct_vars(rng, n, K)
        signs = rng.integers(0, 2, size=K) * 2 - 1
        tuples.append(KTuple(tuple(
            Literal(v, int(s)) for v, s in zip(vars_, signs))))
    return XorFormula(n, K, tuple(tuples))


def gen_planted_formula(
    n: int, m: int, K: int, eta, seed: int
) -> PlantedInstance:
    """Formula satisfied by a hidden assignment except for floor(eta*m) flips.

    Signs are uniform conditioned on satisfaction; then exactly
    floor(eta*m) tuples, chosen without replacement, get one uniformly
    chosen literal negated.
    """
    if K > n:
        raise ValueError(f"K={K} exceeds n={n}")
    if m < 1:
        raise ValueError("m must be >= 1")
    eta = Fraction(eta)
    if not (0 <= eta < Fraction(1, 2)):
        raise ValueError(f"eta must be in [0, 1/2), got {eta}")

    psi_rng = rng_stream(seed, "planted-assignment")
    psi = Assignment(tuple(int(v) for v in psi_rng.integers(0, 2, size=n) * 2 - 1))

    sign_rows: list[list[int]] = []
    var_rows: list[list[int]] = []
    for j in range(m):
        rng = rng_stream(seed, "planted-tuple", j)
        vars_ = _draw_distinct_vars(rng, n, K)
        signs = [int(s) for s in rng.integers(0, 2, size=K - 1) * 2 - 1]
        z_last = 1
        for v, s in zip(vars_[:-1], signs):
            z_last *= s * psi.values[v - 1]
        signs.append(z_last * psi.values[vars_[-1] - 1])
        var_rows.append(vars_)
        sign_rows.append(signs)

    n_flips = math.floor(eta * m)
    flip_rng = rng_stream(seed, "planted-flips")
    pool = list(range(m))
    for i in range(n_flips):
        j = i + int(flip_rng.integers(m - i))
        pool[i], pool[j] = pool[j], pool[i]
    flipped = sorted(pool[:n_flips])
    for row in flipped:
        col = int(flip_rng.integers(K))
        sign_rows[row][col] = -sign_rows[row][col]

    tuples = tuple(
        KTuple(tuple(Literal(v, s) for v, s in zip(vars_, signs)))
        for vars_, signs in zip(var_rows, sign_rows)
    )
    formula = XorFormula(n, K, tuples)
    return PlantedInstance(formula, psi, eta, frozenset(flipped))
