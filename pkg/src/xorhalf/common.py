"""Shared plumbing: error types, bound values, deterministic RNG streams."""
from __future__ import annotations

import hashlib
from typing import NamedTuple

import numpy as np


class ResourceLimitError(RuntimeError):
    """A requested computation exceeds a configured size budget."""


class PreconditionError(ValueError):
    """A stated side condition of a bound or lemma-style calculator fails."""


class FormatError(ValueError):
    """Malformed text in one of the file formats."""


class Bound(NamedTuple):
    """A tail-bound value together with a vacuity flag.

    ``vacuous`` is set when the bound exceeds the threshold at which it
    stops saying anything (1 for probabilities, 1/2 for error rates).
    """

    value: float
    vacuous: bool


def threshold_sign(x) -> int:
    """Sign with the fixed convention sign(0) = +1."""
    return 1 if x >= 0 else -1


def _mix(seed: int, path: tuple) -> bytes:
    h = hashlib.blake2s(digest_size=16)
    h.update(b"xorhalf\x00")
    h.update(int(seed).to_bytes(16, "little", signed=True))
    for part in path:
        if isinstance(part, str):
            h.update(b"s" + part.encode("utf-8") + b"\x00")
        else:
            h.update(b"i" + int(part).to_bytes(16, "little", signed=True))
    return h.digest()


def rng_stream(seed: int, *path: int | str) -> np.random.Generator:
    """Counter-based generator for the sub-stream named by ``path``.

    Streams for distinct (seed, path) pairs are independent, and building
    a stream does not consume state anywhere else, so per-index generation
    is schedule-independent.
    """
    key = int.from_bytes(_mix(seed, path), "little")
    return np.random.Generator(np.random.Philox(key=key))
