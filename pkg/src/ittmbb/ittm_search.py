"""Tree-normal-form enumeration of ITTMs on the blank tape.

Works like the classical enumeration: a partial table is executed through
limit stages until it needs an undefined entry, and the search branches
there.  A branch may stop the machine; since only the output tape matters
for ``f*(0)``, a stopping entry writes back the input and scratch bits, picks
the output bit, and moves right.  Ordinary states appear in first-use order.
The tape is one-way, so there is no mirror reduction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .ittm import HALT, L, LIMIT, LIMSUP, R, TRIPLES, ITTAction, ITTMachine, decode_unary, initial_snapshot
from .transfinite import (ExecBudget, Halted, NeedsEntry, NonHaltingCertified, Undetermined, execute,
                          tapes_digest)
from .eptape import EPTape

MAX_ITTM_STATES = 2
DEFAULT_MAX_ENTRIES = 3
TRUNCATED = "EntryBudget"


class TooLarge(ValueError):
    """Refusal to enumerate beyond the configured ceiling."""


def space_estimate(n: int) -> int:
    """Raw number of complete tables with ``n`` ordinary states (before normalization)."""
    per_entry = 8 * 2 * n + 1  # write, move, ordinary target; or halt
    return per_entry ** (8 * (n + 1))


def check_ceiling(n: int, ceiling: int = MAX_ITTM_STATES) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > ceiling:
        raise TooLarge(f"refusing to enumerate ITTMs with n={n} > {ceiling}: "
                       f"raw space is about {float(space_estimate(n)):.3g} tables")


def _filler(idx: int) -> ITTAction:
    return ITTAction(TRIPLES[idx % 8], R, HALT)


def complete(table, n: int, rule: str = LIMSUP) -> ITTMachine:
    return ITTMachine(n, tuple(a if a is not None else _filler(i) for i, a in enumerate(table)), rule)


def _used_states(table) -> int:
    used = 1
    for a in table:
        if a is not None and a.next != HALT:
            used = max(used, a.next + 1)
    return used


def _choices(table, n: int) -> list[ITTAction]:
    k = min(_used_states(table) + 1, n)
    return [ITTAction(w, mv, q) for w in TRIPLES for mv in (L, R) for q in range(k)]


@dataclass
class ITTLeaf:
    machine: ITTMachine
    status: str  # "halt" | "nonhalt" | "undetermined" | "truncated"
    value: Optional[int] = None  # f*(0) when halted with clean unary output
    stage: str = ""
    digest: str = ""
    witness: tuple[str, str] = ("", "")
    reason: str = ""


def _entry_index(n: int, state: int, triple: int) -> int:
    return 8 * (n if state == LIMIT else state) + triple


def _set_output(tape: EPTape, i: int, bit: int) -> EPTape:
    if tape[i] == bit:
        return tape
    size = max(i + 1, len(tape.prefix))
    cells = tape.cells(size)
    cells[i] = bit
    return EPTape.from_cells(cells, tape.suffix(size))


def _halt_leaves(table, n: int, need: NeedsEntry, rule: str) -> Iterator[ITTLeaf]:
    snap = need.snapshot
    idx = _entry_index(n, need.state, need.triple)
    i, _, s = TRIPLES[need.triple]
    for o in (0, 1):
        t = list(table)
        t[idx] = ITTAction((i, o, s), R, HALT)
        tapes = (snap.tapes[0], _set_output(snap.tapes[1], snap.head, o), snap.tapes[2])
        stage = snap.stage.succ()
        yield ITTLeaf(complete(t, n, rule), "halt", decode_unary(tapes[1]), str(stage), tapes_digest(tapes))


def expand(table, n: int, budget: ExecBudget, rule: str = LIMSUP, max_entries: int = DEFAULT_MAX_ENTRIES,
           split_depth: Optional[int] = None, depth: int = 0) -> Iterator[ITTLeaf | list]:
    """Depth-first leaves below a partial table (or bare subtrees at ``split_depth``).

    A node that needs more than ``max_entries`` non-halting entries is not
    expanded further; it comes back as one ``truncated`` leaf standing for
    its whole subtree.
    """
    if split_depth is not None and depth >= split_depth:
        yield list(table)
        return
    out = execute(table, initial_snapshot(), budget, rule)
    if isinstance(out, NeedsEntry):
        yield from _halt_leaves(table, n, out, rule)
        if depth >= max_entries:
            yield ITTLeaf(complete(table, n, rule), "truncated", reason=TRUNCATED)
            return
        idx = _entry_index(n, out.state, out.triple)
        for a in _choices(table, n):
            child = list(table)
            child[idx] = a
            yield from expand(child, n, budget, rule, max_entries, split_depth, depth + 1)
    elif isinstance(out, Halted):  # cannot happen: every halting entry is a branch point
        raise AssertionError("partial table halted through a defined entry")
    elif isinstance(out, NonHaltingCertified):
        yield ITTLeaf(complete(table, n, rule), "nonhalt", witness=(str(out.first), str(out.second)))
    else:
        assert isinstance(out, Undetermined)
        yield ITTLeaf(complete(table, n, rule), "undetermined", stage=str(out.stage), reason=out.reason)


def root(n: int) -> list[Optional[ITTAction]]:
    return [None] * (8 * (n + 1))


def ittm_leaves(n: int, budget: ExecBudget = ExecBudget(), rule: str = LIMSUP,
                max_entries: int = DEFAULT_MAX_ENTRIES, ceiling: int = MAX_ITTM_STATES) -> Iterator[ITTLeaf]:
    check_ceiling(n, ceiling)
    yield from expand(root(n), n, budget, rule, max_entries)  # type: ignore[misc]


def enumerate_ittm(n: int, budget: ExecBudget = ExecBudget(), rule: str = LIMSUP,
                   max_entries: int = DEFAULT_MAX_ENTRIES, ceiling: int = MAX_ITTM_STATES) -> Iterator[ITTMachine]:
    """Normalized representatives in deterministic depth-first order.

    Truncated subtrees were never explored, so they contribute nothing.
    """
    for leaf in ittm_leaves(n, budget, rule, max_entries, ceiling):
        if leaf.status != "truncated":
            yield leaf.machine
