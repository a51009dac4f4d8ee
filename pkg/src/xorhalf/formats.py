"""Text formats for formulas and samples.

Formula files ("xnf"):

    p xnf <n> <m> <K>
    <K signed ints> 0          # sign = literal sign, magnitude = variable

Sample files:

    p sample <dim> <m> ternary
    <±1 label> <index>:<±1> ...     # sparse entries; an empty tail is all-zero

    p sample <dim> <m> binary
    <±1 label> <run> <run> ...      # run lengths, first run counts +1s

Lines starting with "c" are comments and ignored on parse; emitters write
none, so emit(parse(text)) is the identity on canonical text.
"""
from __future__ import annotations

import numpy as np

from .common import FormatError
from .formulas import KTuple, Literal, XorFormula
from .reduction import BinarySample, SparseTernary, TernarySample


def _content_lines(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        yield number, line


def parse_xnf(text: str) -> XorFormula:
    lines = _content_lines(text)
    try:
        number, header = next(lines)
    except StopIteration:
        raise FormatError("empty input, expected 'p xnf <n> <m> <K>' header")
    fields = header.split()
    if len(fields) != 5 or fields[0] != "p" or fields[1] != "xnf":
        raise FormatError(f"line {number}: bad header {header!r}")
    try:
        n, m, K = (int(f) for f in fields[2:])
    except ValueError:
        raise FormatError(f"line {number}: non-integer header field in {header!r}")
    if n < 1 or m < 1 or K < 1:
        raise FormatError(f"line {number}: header values must be positive")

    tuples = []
    for number, line in lines:
        try:
            ints = [int(tok) for tok in line.split()]
        except ValueError:
            raise FormatError(f"line {number}: non-integer literal field")
        if not ints or ints[-1] != 0:
            raise FormatError(f"line {number}: tuple line must end with 0")
        lits = ints[:-1]
        if len(lits) != K:
            raise FormatError(
                f"line {number}: expected {K} literals, got {len(lits)}")
        if any(v == 0 for v in lits):
            raise FormatError(f"line {number}: zero literal before terminator")
        if any(abs(v) > n for v in lits):
            raise FormatError(f"line {number}: variable out of range 1..{n}")
        vars_ = [abs(v) for v in lits]
        if len(set(vars_)) != len(vars_):
            raise FormatError(f"line {number}: duplicate variable in tuple")
        tuples.append(KTuple(tuple(
            Literal(abs(v), 1 if v > 0 else -1) for v in lits)))
    if len(tuples) != m:
        raise FormatError(f"expected {m} tuples, got {len(tuples)}")
    return XorFormula(n, K, tuple(tuples))


def emit_xnf(J: XorFormula) -> str:
    out = [f"p xnf {J.n} {J.m} {J.K}"]
    for tup in J.tuples:
        out.append(" ".join(str(lit.sign * lit.var) for lit in tup.literals) + " 0")
    return "\n".join(out) + "\n"


def _parse_label(token: str, number: int) -> int:
    if token == "+1" or token == "1":
        return 1
    if token == "-1":
        return -1
    raise FormatError(f"line {number}: label must be +1 or -1, got {token!r}")


def _sample_header(text: str):
    lines = _content_lines(text)
    try:
        number, header = next(lines)
    except StopIteration:
        raise FormatError("empty input, expected 'p sample' header")
    fields = header.split()
    if len(fields) != 5 or fields[0] != "p" or fields[1] != "sample":
        raise FormatError(f"line {number}: bad header {header!r}")
    try:
        dim, m = int(fields[2]), int(fields[3])
    except ValueError:
        raise FormatError(f"line {number}: non-integer header field")
    kind = fields[4]
    if kind not in ("ternary", "binary"):
        raise FormatError(f"line {number}: kind must be ternary or binary")
    if dim < 1 or m < 1:
        raise FormatError(f"line {number}: header values must be positive")
    return dim, m, kind, lines


def parse_sample(text: str):
    """Parse a sample file; returns a TernarySample or BinarySample."""
    dim, m, kind, lines = _sample_header(text)
    if kind == "ternary":
        entries = []
        for number, line in lines:
            tokens = line.split()
            label = _parse_label(tokens[0], number)
            pairs = []
            for tok in tokens[1:]:
                if ":" not in tok:
                    raise FormatError(f"line {number}: expected index:value, got {tok!r}")
                idx_s, val_s = tok.split(":", 1)
                try:
                    idx, val = int(idx_s), int(val_s)
                except ValueError:
                    raise FormatError(f"line {number}: non-integer field in {tok!r}")
                if not 0 <= idx < dim:
                    raise FormatError(f"line {number}: index {idx} out of range")
                if val not in (-1, 1):
                    raise FormatError(f"line {number}: value must be +1 or -1")
                pairs.append((idx, val))
            if sorted(p for p, _ in pairs) != [p for p, _ in pairs]:
                raise FormatError(f"line {number}: indices must be increasing")
            entries.append((SparseTernary(
                tuple(p for p, _ in pairs), tuple(v for _, v in pairs)), label))
        if len(entries) != m:
            raise FormatError(f"expected {m} entries, got {len(entries)}")
        return TernarySample(dim, tuple(entries))

    labels = []
    rows = np.empty((m, dim), dtype=np.int8)
    count = 0
    for number, line in lines:
        tokens = line.split()
        label = _parse_label(tokens[0], number)
        try:
            runs = [int(tok) for tok in tokens[1:]]
        except ValueError:
            raise FormatError(f"line {number}: non-integer run length")
        if any(r < 0 for r in runs) or (len(runs) > 1 and 0 in runs[1:]):
            raise FormatError(f"line {number}: run lengths must be positive "
                              f"(a leading 0 starts with -1)")
        if sum(runs) != dim:
            raise FormatError(
                f"line {number}: run lengths sum to {sum(runs)}, expected {dim}")
        if count >= m:
            raise FormatError(f"line {number}: more than {m} entries")
        row = np.empty(dim, dtype=np.int8)
        pos = 0
        value = 1
        for run in runs:
            row[pos:pos + run] = value
            pos += run
            value = -value
        rows[count] = row
        labels.append(label)
        count += 1
    if count != m:
        raise FormatError(f"expected {m} entries, got {count}")
    return BinarySample(dim, tuple(labels), rows)


def emit_sample(S) -> str:
    if isinstance(S, TernarySample):
        out = [f"p sample {S.dim} {S.m} ternary"]
        for vec, label in S.entries:
            tokens = [f"{label:+d}"]
            tokens.extend(f"{i}:{v:d}" for i, v in zip(vec.indices, vec.values))
            out.append(" ".join(tokens))
        return "\n".join(out) + "\n"
    if isinstance(S, BinarySample):
        out = [f"p sample {S.dim} {S.m} binary"]
        for row, label in zip(S.rows, S.labels):
            runs = []
            value = 1
            pos = 0
            arr = row
            while pos < len(arr):
                run = 0
                while pos < len(arr) and arr[pos] == value:
                    run += 1
                    pos += 1
                runs.append(run)
                value = -value
            out.append(" ".join([f"{label:+d}"] + [str(r) for r in runs]))
        return "\n".join(out) + "\n"
    raise TypeError(f"cannot emit {type(S).__name__}")
