"""Tree-normal-form enumeration of classical machines and busy beaver census.

Transitions are chosen lazily: a machine is simulated from the blank tape
and, the first time it reads an entry that is still undefined, the search
branches over every way of filling that entry.  States are introduced in
first-use order and the very first move is fixed to R (the mirror image of a
machine has identical step counts and scores), so each behaviour is visited
once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .classical import HALT, L, R, Action, ClassicalMachine
from .deciders import PartialRun, simulate_partial, static_proof
from . import _kernel

FILLER = Action(1, R, HALT)
DECIDER_HORIZON = 2_000
QUICK_STEPS = 1_000


@dataclass
class Leaf:
    machine: ClassicalMachine
    status: str  # "halt" | "nonhalt" | "undetermined"
    steps: int = 0
    rado: int = 0
    clean: Optional[int] = None
    proof: str = ""


def _complete(table: list[Optional[Action]], n: int) -> ClassicalMachine:
    return ClassicalMachine(n, tuple(a if a is not None else FILLER for a in table))


def _halt_leaves(table, n, run: PartialRun) -> Iterator[Leaf]:
    idx = 2 * run.state + run.bit
    ones = sum(run.tape.values())
    for w in (0, 1):
        t = list(table)
        t[idx] = Action(w, R, HALT)
        cells = dict(run.tape)
        cells[run.head] = w
        lo, hi = min(run.lo, run.head), max(run.hi, run.head + 1)
        window = [cells.get(i, 0) for i in range(lo, hi + 1)]
        k = 0
        while k < len(window) and window[k]:
            k += 1
        clean = None if any(window[k:]) else k
        yield Leaf(_complete(t, n), "halt", run.steps + 1, ones - run.bit + w, clean)


def _used_states(table) -> int:
    used = 1
    for a in table:
        if a is not None and a.next != HALT:
            used = max(used, a.next + 1)
    return used


def _choices(table, n, first: bool) -> list[Action]:
    k = min(_used_states(table) + 1, n)
    moves = (R,) if first else (L, R)
    return [Action(w, mv, q) for w in (0, 1) for mv in moves for q in range(k)]


def _resolve(table, n: int, budget: int, horizon: int) -> PartialRun | Leaf:
    """Run a node; return the run that stopped at an undefined entry, or a leaf."""
    # most nodes reach an undefined entry quickly; skip decider bookkeeping for those
    run = _kernel.run_partial(table, min(budget, QUICK_STEPS))
    if run.kind == "undefined":
        return run
    run = simulate_partial(table, min(budget, horizon))
    if run.kind == "undefined":
        return run
    if run.kind in ("cycle", "translated"):
        return Leaf(_complete(table, n), "nonhalt", run.steps, proof=f"{run.kind}{run.witness}")
    proof = static_proof(table)
    if proof:
        return Leaf(_complete(table, n), "nonhalt", run.steps, proof=proof)
    if budget > horizon:
        run = _kernel.run_partial(table, budget)
        if run.kind == "undefined":
            return run
    return Leaf(_complete(table, n), "undetermined", budget)


def expand(table: list[Optional[Action]], n: int, budget: int, horizon: int = DECIDER_HORIZON,
           split_depth: Optional[int] = None, depth: int = 0) -> Iterator[Leaf | list]:
    """Depth-first leaves below ``table``.

    When ``split_depth`` is given, subtrees rooted at that depth are yielded
    as bare tables instead of being explored (the unit of parallel work).
    """
    if split_depth is not None and depth >= split_depth:
        yield list(table)
        return
    node = _resolve(table, n, budget, horizon)
    if isinstance(node, Leaf):
        yield node
        return
    yield from _halt_leaves(table, n, node)
    idx = 2 * node.state + node.bit
    first = all(a is None for a in table)
    for a in _choices(table, n, first):
        child = list(table)
        child[idx] = a
        yield from expand(child, n, budget, horizon, split_depth, depth + 1)


def root(n: int) -> list[Optional[Action]]:
    if n < 1:
        raise ValueError("n must be >= 1")
    return [None] * (2 * n)


def leaves(n: int, budget: int, horizon: int = DECIDER_HORIZON) -> Iterator[Leaf]:
    yield from expand(root(n), n, budget, horizon)  # type: ignore[misc]


def enumerate_classical(n: int, budget: int = 1000) -> Iterator[ClassicalMachine]:
    """One representative per normalized machine, in deterministic order."""
    for leaf in leaves(n, budget):
        yield leaf.machine
