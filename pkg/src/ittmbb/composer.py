"""Building a 3-tape ITTM that writes F(F(x)) ones from a one-tape machine.

The pipeline, as fragments spliced end to end:

    mark            put a 1 on output cell 0 (so the head can find home)
    write_ones(x)   x ones on the input tape, one state per 1
    rewind
    M on input      the one-tape machine retargeted to the input tape
    rewind
    copy input -> scratch
    rewind
    M on scratch
    rewind
    copy scratch -> output   (this also overwrites the home mark)

Every fragment except ``write_ones`` has a fixed size, so the composed
machine has ``s(x) = x + 2*C + 7`` ordinary states, C being the number of
states of M.  Only successor-stage behaviour of M is embedded: the composed
Limit row halts at once (a fail-safe; limit-using M are outside the
construction).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Callable, Optional, Sequence, Union

from .eptape import EPTape
from .ittm import (HALT, INPUT, L, LIMIT, LIMSUP, OUTPUT, R, SCRATCH, TAPE_NAMES, TRIPLES, ITTAction,
                   ITTMachine, Snapshot, decode_unary, encode_unary)
from .transfinite import ExecBudget, Halted, Undetermined, execute, run_transfinite

EXIT = -3  # splice point inside a fragment
FIXED_STATES = 7  # mark + 4 rewinds + 2 copies


def _put(t: Sequence[int], tape: int, bit: int) -> tuple[int, int, int]:
    out = list(t)
    out[tape] = bit
    return tuple(out)  # type: ignore[return-value]


@dataclass(frozen=True)
class MachineFragment:
    """States ``0..n-1`` with 8 actions each; targets are local states, EXIT or HALT."""

    name: str
    rows: tuple[tuple[ITTAction, ...], ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != 8:
                raise ValueError("each fragment state needs one action per triple")
            for a in row:
                if a.next not in (EXIT, HALT) and not 0 <= a.next < len(self.rows):
                    raise ValueError(f"fragment {self.name}: bad target {a.next}")

    @property
    def n_states(self) -> int:
        return len(self.rows)


def _fragment(name: str, n: int, rule: Callable[[int, tuple], tuple]) -> MachineFragment:
    return MachineFragment(name, tuple(tuple(ITTAction(*rule(q, t)) for t in TRIPLES) for q in range(n)))


def splice(first: MachineFragment, second: MachineFragment) -> MachineFragment:
    """``first`` then ``second``: exits of ``first`` enter ``second``'s state 0."""
    k = first.n_states
    if second.n_states == 0:
        return MachineFragment(f"{first.name};{second.name}", first.rows)

    def enter(a: ITTAction) -> ITTAction:
        return a._replace(next=k) if a.next == EXIT else a

    def offset(a: ITTAction) -> ITTAction:
        return a if a.next in (EXIT, HALT) else a._replace(next=a.next + k)

    rows = tuple(tuple(map(enter, row)) for row in first.rows)
    rows += tuple(tuple(map(offset, row)) for row in second.rows)
    return MachineFragment(f"{first.name};{second.name}", rows)


def chain(fragments: Sequence[MachineFragment]) -> MachineFragment:
    return reduce(splice, fragments)


def assemble(fragment: MachineFragment, rule: str = LIMSUP) -> ITTMachine:
    """Close a fragment into a machine: exits halt, and the Limit row halts in place."""
    table = [a._replace(next=HALT) if a.next == EXIT else a for row in fragment.rows for a in row]
    table += [ITTAction(t, R, HALT) for t in TRIPLES]
    return ITTMachine(fragment.n_states, tuple(table), rule)


# -- gadgets -----------------------------------------------------------------

def mark_gadget() -> MachineFragment:
    # moving left at cell 0 keeps the head at 0
    return _fragment("mark", 1, lambda q, t: (_put(t, OUTPUT, 1), L, EXIT))


def rewind_gadget() -> MachineFragment:
    """Move left until the cell holding the output mark (cell 0), then exit."""
    return _fragment("rewind", 1, lambda q, t: (t, L, EXIT if t[OUTPUT] else 0))


def write_ones_gadget(x: int) -> MachineFragment:
    """One state per written 1: input cells 0..x-1 become 1, head ends on cell x."""
    if x < 0:
        raise ValueError("x must be a natural number")
    return _fragment(f"write_ones({x})", x, lambda q, t: (_put(t, INPUT, 1), R, q + 1 if q + 1 < x else EXIT))


def copy_gadget(src: int, dst: int) -> MachineFragment:
    """Scan right copying src onto dst up to and including the first 0 of src.

    Terminates only if src holds a finite unary block; otherwise the scan
    never ends (the pipeline only copies unary outputs).
    """
    if src == dst:
        raise ValueError("copy needs two different tapes")
    return _fragment(f"copy({TAPE_NAMES[src]}->{TAPE_NAMES[dst]})", 1,
                     lambda q, t: (_put(t, dst, t[src]), R, 0 if t[src] else EXIT))


@dataclass(frozen=True)
class OneTapeITTM:
    """An ITTM that only reads and writes ``tape``; the other bits are written back."""

    machine: ITTMachine
    tape: int = INPUT

    def __post_init__(self) -> None:
        if not one_tape_on(self.machine, self.tape):
            raise ValueError(f"machine is not a one-tape machine on the {TAPE_NAMES[self.tape]} tape")

    @property
    def n_states(self) -> int:
        return self.machine.n_states

    @classmethod
    def from_bits(cls, n: int, rows: dict, tape: int = INPUT, limit: Optional[dict] = None,
                  rule: str = LIMSUP) -> OneTapeITTM:
        """``rows[(q, bit)] = (write_bit, move, next)``; ``limit[bit]`` likewise (default: halt)."""
        limit = limit or {0: (0, R, HALT), 1: (1, R, HALT)}
        table = []
        for q in list(range(n)) + [LIMIT]:
            for t in TRIPLES:
                w, mv, nxt = limit[t[tape]] if q == LIMIT else rows[q, t[tape]]
                table.append(ITTAction(_put(t, tape, w), mv, nxt))
        return cls(ITTMachine(n, tuple(table), rule), tape)

    def bit_action(self, state: int, bit: int) -> tuple[int, int, int]:
        a = self.machine.action(state, _put((0, 0, 0), self.tape, bit))
        return a.write[self.tape], a.move, a.next


def one_tape_on(m: ITTMachine, tape: int) -> bool:
    for q in list(range(m.n_states)) + [LIMIT]:
        for t in TRIPLES:
            a = m.action(q, t)
            ref = m.action(q, _put((0, 0, 0), tape, t[tape]))
            if any(a.write[j] != t[j] for j in range(3) if j != tape):
                return False
            if (a.write[tape], a.move, a.next) != (ref.write[tape], ref.move, ref.next):
                return False
    return True


def as_one_tape(m: Union[OneTapeITTM, ITTMachine]) -> OneTapeITTM:
    if isinstance(m, OneTapeITTM):
        return m
    for tape in (INPUT, OUTPUT, SCRATCH):
        if one_tape_on(m, tape):
            return OneTapeITTM(m, tape)
    raise ValueError("machine reads or writes more than one tape")


def embed_on_tape(m: Union[OneTapeITTM, ITTMachine], tape: int) -> MachineFragment:
    """Retarget ``m`` to ``tape``; its halting transitions become the exit."""
    m = as_one_tape(m)

    def rule(q: int, t: tuple) -> tuple:
        w, mv, nxt = m.bit_action(q, t[tape])
        return _put(t, tape, w), mv, EXIT if nxt == HALT else nxt

    return _fragment(f"embed({TAPE_NAMES[tape]})", m.n_states, rule)


def pipeline(m: Union[OneTapeITTM, ITTMachine], x: int) -> list[MachineFragment]:
    return [mark_gadget(), write_ones_gadget(x), rewind_gadget(),
            embed_on_tape(m, INPUT), rewind_gadget(), copy_gadget(INPUT, SCRATCH), rewind_gadget(),
            embed_on_tape(m, SCRATCH), rewind_gadget(), copy_gadget(SCRATCH, OUTPUT)]


def overhead(c: int) -> int:
    """h(C): states of the composed machine beyond the x written ones."""
    return 2 * c + FIXED_STATES


def compose_theorem1(m: Union[OneTapeITTM, ITTMachine], x: int) -> tuple[ITTMachine, int]:
    """Machine writing 1^(F(F(x))) on the output tape from blank, and its state count."""
    one = as_one_tape(m)
    machine = assemble(chain(pipeline(one, x)), one.machine.rule)
    s = machine.n_states
    assert s == x + overhead(one.n_states)
    return machine, s


def accounting(m: Union[OneTapeITTM, ITTMachine], x: int) -> dict:
    c = as_one_tape(m).n_states
    return {"x": x, "C": c, "h(C)": overhead(c), "s(x)": x + overhead(c)}


def one_tape_value(m: Union[OneTapeITTM, ITTMachine], y: int,
                   budget: ExecBudget = ExecBudget()) -> Union[int, None, Undetermined]:
    """Run ``m`` alone on 1^y and decode its tape (None if not clean unary or non-halting)."""
    one = as_one_tape(m)
    blank = EPTape.blank()
    tapes = [blank, blank, blank]
    tapes[one.tape] = encode_unary(y)
    out = execute(one.machine, Snapshot(tuple(tapes)), budget, one.machine.rule)  # type: ignore[arg-type]
    if isinstance(out, Undetermined):
        return out
    if not isinstance(out, Halted):
        return None
    return decode_unary(out.final.tapes[one.tape])


def reference_F(fstar: Callable[[int], int], x: int) -> int:
    """sum over i in 0..x of (f*(i) + i)^2."""
    if x < 0:
        raise ValueError("x must be a natural number")
    return sum((fstar(i) + i) ** 2 for i in range(x + 1))


@dataclass(frozen=True)
class WitnessFrom:
    n: int


@dataclass(frozen=True)
class NoneWithinHorizon:
    horizon: int


def dominance_witness(f_vals: Sequence[int], g_vals: Sequence[int],
                      horizon: int) -> Union[WitnessFrom, NoneWithinHorizon]:
    """Least N < horizon with f(n) > g(n) for every n in [N, horizon).

    A finite-horizon hint of eventual domination, not a proof of it.
    """
    if len(f_vals) < horizon or len(g_vals) < horizon:
        raise ValueError("sequences must cover the horizon")
    n = horizon
    while n > 0 and f_vals[n - 1] > g_vals[n - 1]:
        n -= 1
    return WitnessFrom(n) if n < horizon else NoneWithinHorizon(horizon)


def compose_and_run(m: Union[OneTapeITTM, ITTMachine], x: int, budget: ExecBudget = ExecBudget()):
    machine, s = compose_theorem1(m, x)
    return machine, s, run_transfinite(machine, budget=budget)
