"""Eventually periodic one-way binary tapes.

An :class:`EPTape` denotes the infinite word ``prefix + period + period + ...``
over cells ``0, 1, 2, ...``.  Instances are always stored in canonical form
(primitive period, shortest prefix) so structural equality is equality of the
denoted sequences.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import lcm
from typing import Callable, Iterable

_BITS = re.compile(r"^[01]*$")
_TEXT = re.compile(r"^([01]*)(?:\(([01]+)\))?$")


def _primitive_root(word: str) -> str:
    n = len(word)
    for k in range(1, n + 1):
        if n % k == 0 and word[:k] * (n // k) == word:
            return word[:k]
    return word


@dataclass(frozen=True)
class EPTape:
    prefix: str = ""
    period: str = "0"

    def __post_init__(self) -> None:
        if not self.period:
            raise ValueError("period must be nonempty")
        if not _BITS.match(self.prefix) or not _BITS.match(self.period):
            raise ValueError(f"tape words must be binary: {self.prefix!r}, {self.period!r}")
        prefix, period = self.prefix, _primitive_root(self.period)
        while prefix and prefix[-1] == period[-1]:
            prefix = prefix[:-1]
            period = period[-1] + period[:-1]
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    # -- construction -----------------------------------------------------

    @classmethod
    def blank(cls) -> EPTape:
        return cls("", "0")

    @classmethod
    def from_cells(cls, cells: Iterable[int], tail: EPTape | None = None) -> EPTape:
        """Finite cells followed by ``tail`` (blank by default)."""
        head = "".join("1" if c else "0" for c in cells)
        if tail is None:
            return cls(head, "0")
        return cls(head + tail.prefix, tail.period)

    @classmethod
    def parse(cls, text: str) -> EPTape:
        """Read ``prefix(period)``; a bare bit string means ``bits(0)``."""
        m = _TEXT.match(text.strip())
        if m is None:
            raise ValueError(f"not a tape: {text!r} (expected e.g. 110 or 10(01))")
        return cls(m.group(1), m.group(2) or "0")

    # -- queries ----------------------------------------------------------

    def __getitem__(self, i: int) -> int:
        if i < 0:
            raise IndexError(i)
        if i < len(self.prefix):
            return int(self.prefix[i])
        return int(self.period[(i - len(self.prefix)) % len(self.period)])

    def cells(self, n: int) -> list[int]:
        return [self[i] for i in range(n)]

    def suffix(self, start: int) -> EPTape:
        """The tape read from cell ``start`` onwards."""
        if start <= len(self.prefix):
            return EPTape(self.prefix[start:], self.period)
        k = (start - len(self.prefix)) % len(self.period)
        return EPTape("", self.period[k:] + self.period[:k])

    def ones(self) -> int | None:
        """Number of 1 cells, or None when there are infinitely many."""
        if "1" in self.period:
            return None
        return self.prefix.count("1")

    @property
    def is_blank(self) -> bool:
        return self.prefix == "" and self.period == "0"

    def zip_with(self, other: EPTape, op: Callable[[int, int], int]) -> EPTape:
        n = max(len(self.prefix), len(other.prefix))
        p = lcm(len(self.period), len(other.period))
        bits = [op(self[i], other[i]) for i in range(n + p)]
        return EPTape("".join(map(str, bits[:n])), "".join(map(str, bits[n:])))

    def __or__(self, other: EPTape) -> EPTape:
        return self.zip_with(other, lambda a, b: a | b)

    def __and__(self, other: EPTape) -> EPTape:
        return self.zip_with(other, lambda a, b: a & b)

    def __invert__(self) -> EPTape:
        flip = str.maketrans("01", "10")
        return EPTape(self.prefix.translate(flip), self.period.translate(flip))

    def below(self, other: EPTape) -> bool:
        """Cellwise order: every 1 of ``self`` is a 1 of ``other``."""
        return (self & ~other).is_blank

    def __str__(self) -> str:
        return f"{self.prefix}({self.period})"
