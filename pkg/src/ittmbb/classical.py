"""Classical two-symbol Turing machines on a two-way infinite tape.

Quintuple convention: every step writes a bit and moves one cell before
switching state; the step into HALT is counted.  The halting state is not one of the
machine's ``n_states``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

L, R = -1, 1
HALT = -1


class Action(NamedTuple):
    write: int
    move: int  # L or R
    next: int  # state index or HALT


@dataclass(frozen=True)
class ClassicalMachine:
    """``table[2*q + b]`` is the action of state ``q`` reading bit ``b``."""

    n_states: int
    table: tuple[Action, ...]

    def __post_init__(self) -> None:
        if self.n_states < 1:
            raise ValueError("a machine needs at least one state")
        if len(self.table) != 2 * self.n_states:
            raise ValueError(f"table must have {2 * self.n_states} entries, got {len(self.table)}")
        table = tuple(Action(*a) for a in self.table)
        for a in table:
            if a.write not in (0, 1) or a.move not in (L, R):
                raise ValueError(f"bad action {a}")
            if a.next != HALT and not 0 <= a.next < self.n_states:
                raise ValueError(f"bad target state {a.next}")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_rows(cls, rows: dict[tuple[int, int], tuple[int, int, int]]) -> ClassicalMachine:
        n = 1 + max(q for q, _ in rows)
        return cls(n, tuple(Action(*rows[q, b]) for q in range(n) for b in (0, 1)))

    def action(self, state: int, bit: int) -> Action:
        return self.table[2 * state + bit]

    def mirror(self) -> ClassicalMachine:
        """The left/right reflection; same step counts and scores."""
        return ClassicalMachine(self.n_states, tuple(a._replace(move=-a.move) for a in self.table))

    def compact(self) -> str:
        """bbchallenge-style one-line form, e.g. ``1RB1LB_1LA1RH``."""
        parts = []
        for q in range(self.n_states):
            row = ""
            for b in (0, 1):
                a = self.action(q, b)
                target = "H" if a.next == HALT else chr(65 + a.next)
                row += f"{a.write}{'L' if a.move == L else 'R'}{target}"
            parts.append(row)
        return "_".join(parts)


@dataclass(frozen=True)
class FiniteTapeWindow:
    """Cells ``origin .. origin+len(cells)-1``; everything else is 0."""

    cells: tuple[int, ...] = (0,)
    origin: int = 0
    head: int = 0

    def __getitem__(self, i: int) -> int:
        k = i - self.origin
        return self.cells[k] if 0 <= k < len(self.cells) else 0

    def nonzero_span(self) -> str:
        return "".join(map(str, self.cells)).strip("0")


@dataclass(frozen=True)
class Config:
    tape: FiniteTapeWindow
    state: int


@dataclass(frozen=True)
class Halted:
    steps: int
    tape: FiniteTapeWindow


@dataclass(frozen=True)
class OutOfBudget:
    steps: int
    config: Config


def blank_config() -> Config:
    return Config(FiniteTapeWindow(), 0)


def step_classical(m: ClassicalMachine, cfg: Config) -> Config | Halted:
    """One quintuple step.  A halting step returns ``Halted(1, tape)``."""
    if cfg.state == HALT:
        raise ValueError("configuration is already halted")
    tape = cfg.tape
    cells = list(tape.cells)
    k = tape.head - tape.origin
    a = m.action(cfg.state, cells[k])
    cells[k] = a.write
    head = tape.head + a.move
    origin = tape.origin
    if head < origin:
        cells.insert(0, 0)
        origin = head
    elif head >= origin + len(cells):
        cells.append(0)
    window = FiniteTapeWindow(tuple(cells), origin, head)
    if a.next == HALT:
        return Halted(1, window)
    return Config(window, a.next)


def run_classical(m: ClassicalMachine, step_budget: int) -> Halted | OutOfBudget:
    """Run from the blank tape for at most ``step_budget`` steps."""
    if step_budget < 1:
        raise ValueError("step_budget must be >= 1")
    table = m.table
    tape = bytearray(64)
    off = 32  # absolute cell i lives at tape[i + off]
    lo = hi = 0  # visited window, absolute
    head, state = 0, 0
    for t in range(1, step_budget + 1):
        write, move, nxt = table[2 * state + tape[head + off]]
        tape[head + off] = write
        head += move
        if head < lo:
            lo = head
            if head + off < 0:
                grow = len(tape)
                tape[0:0] = bytes(grow)
                off += grow
        elif head > hi:
            hi = head
            if head + off >= len(tape):
                tape.extend(bytes(len(tape)))
        if nxt == HALT:
            return Halted(t, _window(tape, off, lo, hi, head))
        state = nxt
    return OutOfBudget(step_budget, Config(_window(tape, off, lo, hi, head), state))


def _window(tape: bytearray, off: int, lo: int, hi: int, head: int) -> FiniteTapeWindow:
    return FiniteTapeWindow(tuple(tape[lo + off : hi + off + 1]), lo, head)


def replay_classical(m: ClassicalMachine, max_steps: int, start: Config | None = None) -> Iterator[Config | Halted]:
    """Yield the configuration after each step, using the reference stepper."""
    cfg: Config | Halted = start or blank_config()
    for _ in range(max_steps):
        cfg = step_classical(m, cfg)  # type: ignore[arg-type]
        yield cfg
        if isinstance(cfg, Halted):
            return


def score_rado(tape: FiniteTapeWindow | Sequence[int]) -> int:
    cells = tape.cells if isinstance(tape, FiniteTapeWindow) else tape
    return sum(cells)


def is_clean_output(tape: FiniteTapeWindow | Sequence[int]) -> int | None:
    """``k`` if the window reads ``1^k 0...`` from its leftmost cell, else None.

    The window's leftmost cell is the leftmost cell the head ever visited,
    which serves as the start of the tape on a two-way tape.
    """
    cells = tape.cells if isinstance(tape, FiniteTapeWindow) else tuple(tape)
    k = 0
    while k < len(cells) and cells[k] == 1:
        k += 1
    if any(cells[k:]):
        return None
    return k
