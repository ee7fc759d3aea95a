"""Plain simulation loop for long classical runs (no deciders)."""

from __future__ import annotations

from .classical import HALT
from .deciders import PartialRun


def run_partial(table, budget: int) -> PartialRun:
    tape = bytearray(1024)
    off = 512
    head = state = 0
    lo = hi = 0
    for t in range(budget + 1):
        i = head + off
        bit = tape[i]
        a = table[2 * state + bit]
        if a is None or a.next == HALT:
            cells = {c - off: 1 for c in range(len(tape)) if tape[c]}
            return PartialRun("undefined", t, state, bit, head, cells, lo, hi)
        if t == budget:
            break
        tape[i] = a.write
        head += a.move
        state = a.next
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
    return PartialRun("budget", budget, state, 0, head, {}, lo, hi)
