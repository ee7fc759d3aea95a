"""Infinite-time Turing machines: three aligned one-way tapes, one head.

At successor stages the machine behaves like a classical machine reading and
writing a bit-triple ``(input, output, scratch)``.  At a limit stage every
cell takes the limsup (or, by flag, liminf) of its earlier values, the head
returns to cell 0 and the machine enters the reserved Limit state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

from .eptape import EPTape

L, R = -1, 1
HALT = -1
LIMIT = -2
LIMSUP, LIMINF = "limsup", "liminf"
RULES = (LIMSUP, LIMINF)
INPUT, OUTPUT, SCRATCH = 0, 1, 2
TAPE_NAMES = ("input", "output", "scratch")

Triple = tuple[int, int, int]
TRIPLES: tuple[Triple, ...] = tuple((a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1))


def triple_index(t: Sequence[int]) -> int:
    return t[0] << 2 | t[1] << 1 | t[2]


class ITTAction(NamedTuple):
    write: Triple
    move: int
    next: int  # ordinary state or HALT


def row_index(n_states: int, state: int) -> int:
    """Row of ``state`` in a flat table; the Limit row comes last."""
    return n_states if state == LIMIT else state


@dataclass(frozen=True)
class ITTMachine:
    """``table[8*row + triple_index]`` with rows ``0..n_states-1`` then Limit."""

    n_states: int
    table: tuple[ITTAction, ...]
    rule: str = LIMSUP

    def __post_init__(self) -> None:
        if self.n_states < 1:
            raise ValueError("an ITTM needs at least one ordinary state")
        if self.rule not in RULES:
            raise ValueError(f"rule must be one of {RULES}")
        if len(self.table) != 8 * (self.n_states + 1):
            raise ValueError(f"table must have {8 * (self.n_states + 1)} entries, got {len(self.table)}")
        table = tuple(ITTAction(tuple(a[0]), a[1], a[2]) for a in self.table)
        for a in table:
            if len(a.write) != 3 or any(b not in (0, 1) for b in a.write) or a.move not in (L, R):
                raise ValueError(f"bad action {a}")
            if a.next == LIMIT:
                raise ValueError("limit state not a valid target")
            if a.next != HALT and not 0 <= a.next < self.n_states:
                raise ValueError(f"bad target state {a.next}")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_rows(cls, n_states: int, rows: dict[tuple[int, Triple], tuple[Triple, int, int]],
                  rule: str = LIMSUP) -> ITTMachine:
        table = []
        for state in list(range(n_states)) + [LIMIT]:
            for t in TRIPLES:
                if (state, t) not in rows:
                    raise KeyError((state, t))
                table.append(ITTAction(*rows[state, t]))
        return cls(n_states, tuple(table), rule)

    def action(self, state: int, triple: Sequence[int]) -> ITTAction:
        return self.table[8 * row_index(self.n_states, state) + triple_index(triple)]

    def with_rule(self, rule: str) -> ITTMachine:
        return ITTMachine(self.n_states, self.table, rule)


@dataclass(frozen=True, order=True)
class OrdinalStage:
    """The ordinal ``omega*b + c``; tuple order is the ordinal order."""

    b: int = 0
    c: int = 0

    def __post_init__(self) -> None:
        if self.b < 0 or self.c < 0:
            raise ValueError("stage components are natural numbers")

    def succ(self) -> OrdinalStage:
        return OrdinalStage(self.b, self.c + 1)

    def next_limit(self) -> OrdinalStage:
        return OrdinalStage(self.b + 1, 0)

    @property
    def is_limit(self) -> bool:
        return self.c == 0 and self.b > 0

    def __str__(self) -> str:
        return f"w*{self.b}+{self.c}"

    def pretty(self) -> str:
        return f"ω·{self.b}+{self.c}"

    @classmethod
    def parse(cls, text: str) -> OrdinalStage:
        b, c = text.replace("w*", "").split("+")
        return cls(int(b), int(c))


@dataclass(frozen=True)
class Snapshot:
    tapes: tuple[EPTape, EPTape, EPTape]
    head: int = 0
    state: int = 0
    stage: OrdinalStage = field(default_factory=OrdinalStage)

    def __post_init__(self) -> None:
        if self.head < 0:
            raise ValueError("head position must be >= 0")
        if self.stage.is_limit and (self.head != 0 or self.state != LIMIT):
            raise ValueError("a limit-stage snapshot has head 0 and state Limit")

    @property
    def input(self) -> EPTape:
        return self.tapes[INPUT]

    @property
    def output(self) -> EPTape:
        return self.tapes[OUTPUT]

    @property
    def scratch(self) -> EPTape:
        return self.tapes[SCRATCH]

    @property
    def halted(self) -> bool:
        return self.state == HALT

    def config(self) -> tuple:
        """Everything but the stage; equal configs evolve identically."""
        return (self.tapes, self.head, self.state)

    def read(self) -> Triple:
        return tuple(t[self.head] for t in self.tapes)  # type: ignore[return-value]


def initial_snapshot(input_tape: EPTape | None = None) -> Snapshot:
    blank = EPTape.blank()
    return Snapshot((input_tape or blank, blank, blank), 0, 0, OrdinalStage())


def encode_unary(n: int) -> EPTape:
    if n < 0:
        raise ValueError("unary code of a negative number")
    return EPTape("1" * n, "0")


def decode_unary(t: EPTape) -> Optional[int]:
    """``k`` if ``t`` is ``1^k 0^omega``, otherwise None (undefined)."""
    if t.period != "0" or "0" in t.prefix:
        return None
    return len(t.prefix)


def _set(tape: EPTape, i: int, bit: int) -> EPTape:
    if tape[i] == bit:
        return tape
    n = max(i + 1, len(tape.prefix))
    cells = tape.cells(n)
    cells[i] = bit
    return EPTape.from_cells(cells, tape.suffix(n))


def successor_step(m: ITTMachine, s: Snapshot) -> Snapshot:
    """One successor step; a halting step returns a snapshot in state HALT."""
    if s.state == HALT:
        raise ValueError("cannot step a halted snapshot")
    a = m.action(s.state, s.read())
    tapes = tuple(_set(t, s.head, bit) for t, bit in zip(s.tapes, a.write))
    head = max(0, s.head + a.move)
    return Snapshot(tapes, head, a.next, s.stage.succ())  # type: ignore[arg-type]


@dataclass(frozen=True)
class CellSummary:
    """Eventual behaviour of each cell of one tape below a limit.

    Letters: ``0``/``1`` eventually constant, ``*`` alternates cofinally.
    The summary is the eventually periodic word ``prefix + period^omega``.
    """

    prefix: str = ""
    period: str = "0"

    def __post_init__(self) -> None:
        if not self.period:
            raise ValueError("cell summary is not eventually periodic (empty period)")
        if set(self.prefix + self.period) - set("01*"):
            raise ValueError("cell summary letters must be 0, 1 or *")

    def resolve(self, rule: str) -> EPTape:
        v = "1" if rule == LIMSUP else "0"
        return EPTape(self.prefix.replace("*", v), self.period.replace("*", v))


def limit_snapshot(history: Sequence[CellSummary], rule: str = LIMSUP,
                   before: OrdinalStage = OrdinalStage()) -> Snapshot:
    """Snapshot at the limit following stage ``before``."""
    if rule not in RULES:
        raise ValueError(f"rule must be one of {RULES}")
    if len(history) != 3:
        raise ValueError("need one cell summary per tape")
    tapes = tuple(h.resolve(rule) for h in history)
    return Snapshot(tapes, 0, LIMIT, before.next_limit())  # type: ignore[arg-type]
