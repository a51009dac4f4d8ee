"""Line-oriented key-value reports with a versioned header.

Values keep their exact form: fractions serialize as "a/b", so invariant
checks on report contents are bit-exact.  A report is a pure function of
(config, seeds): no timestamps, stable ordering, byte-reproducible.
"""
from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from . import __version__

REPORT_FORMAT_VERSION = 1


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    return str(value)


class Report:
    """An ordered sequence of key-value lines under a provenance header."""

    def __init__(self, command: str, params: dict, seeds: Iterable[int]):
        self.command = command
        self.params = dict(params)
        self.seeds = list(seeds)
        self.lines: list[tuple[str, str]] = []

    def add(self, key: str, value) -> None:
        if " " in key or "\n" in key:
            raise ValueError(f"bad report key {key!r}")
        self.lines.append((key, format_value(value)))

    def add_seed(self, seed: int, key: str, value) -> None:
        self.add(f"seed.{seed}.{key}", value)

    def render(self) -> str:
        out = [
            f"xorhalf-report {REPORT_FORMAT_VERSION}",
            f"tool xorhalf {__version__}",
            f"command {self.command}",
        ]
        for key in sorted(self.params):
            out.append(f"param.{key} {format_value(self.params[key])}")
        out.append(f"seeds {format_value(self.seeds)}")
        for key, value in self.lines:
            out.append(f"{key} {value}")
        return "\n".join(out) + "\n"

    def write(self, path: Optional[str]) -> None:
        if path is None or path == "-":
            print(self.render(), end="")
        else:
            Path(path).write_text(self.render())
