"""Sound non-halting deciders for classical machines.

Machines here may be *partial*: an entry of ``table`` can be None, meaning
"not decided yet".  Reaching such an entry is how the tree-normal-form
enumeration learns it must branch.  A machine is proved non-halting when
none of its None/HALT entries can ever be reached from the blank tape.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .classical import HALT, Action

Table = Sequence[Optional[Action]]

# Translated-cycle checks look back over at most this many earlier records
# with the same state; completeness only, soundness does not depend on it.
TC_LOOKBACK = 48


def _zobrist(cell: int) -> int:
    # splitmix64 of the cell index; deterministic across processes
    z = (cell * 0x9E3779B97F4A7C15 + 0x632BE59BD9B4E019) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


@dataclass
class PartialRun:
    """Outcome of simulating a (possibly partial) table from the blank tape."""

    kind: str  # "undefined" | "cycle" | "translated" | "budget"
    steps: int
    state: int = 0
    bit: int = 0
    head: int = 0
    tape: dict[int, int] = field(default_factory=dict)
    lo: int = 0
    hi: int = 0
    witness: tuple[int, ...] = ()  # (t0, p) or (t0, p, d)


class _History:
    """Per-cell write history so past tape contents can be queried."""

    __slots__ = ("times", "values")

    def __init__(self) -> None:
        self.times: dict[int, list[int]] = {}
        self.values: dict[int, list[int]] = {}

    def record(self, cell: int, t: int, value: int) -> None:
        ts = self.times.get(cell)
        if ts is None:
            self.times[cell] = [t]
            self.values[cell] = [value]
        else:
            ts.append(t)
            self.values[cell].append(value)

    def at(self, cell: int, t: int) -> int:
        """Value of ``cell`` in the configuration at time ``t``."""
        ts = self.times.get(cell)
        if ts is None:
            return 0
        k = bisect_right(ts, t)
        return self.values[cell][k - 1] if k else 0


class _SuffixMin:
    """Monotonic stack answering min(heads[t0:]) for the running sequence."""

    __slots__ = ("times", "heads", "sign")

    def __init__(self, sign: int) -> None:
        self.times: list[int] = []
        self.heads: list[int] = []
        self.sign = sign  # +1 tracks minima, -1 tracks maxima

    def push(self, t: int, head: int) -> None:
        v = head * self.sign
        while self.heads and self.heads[-1] >= v:
            self.heads.pop()
            self.times.pop()
        self.times.append(t)
        self.heads.append(v)

    def since(self, t0: int) -> int:
        k = bisect_right(self.times, t0 - 1)
        return self.heads[k] * self.sign


def simulate_partial(table: Table, budget: int, decide: bool = True) -> PartialRun:
    """Run from blank until an undefined entry or a loop proof, for at most ``budget`` steps.

    With ``decide`` set, exact configuration repeats and translated cycles
    (in either direction) are detected on the fly.
    """
    tape: dict[int, int] = {}
    head = state = 0
    lo = hi = 0
    zhash = 0
    seen: dict[tuple[int, int, int], int] = {}
    hist = _History()
    mins, maxs = _SuffixMin(1), _SuffixMin(-1)
    right_recs: dict[int, list[tuple[int, int]]] = {}
    left_recs: dict[int, list[tuple[int, int]]] = {}
    get = tape.get
    for t in range(budget + 1):
        if decide:
            mins.push(t, head)
            maxs.push(t, head)
            key = (state, head, zhash)
            t0 = seen.get(key)
            if t0 is not None and _same_tape(hist, t0, tape):
                return PartialRun("cycle", t, state, get(head, 0), head, tape, lo, hi, (t0, t - t0))
            seen[key] = t
            if head > hi or t == 0:
                hit = _translated(hist, tape, right_recs, mins, t, state, head, 1)
                if hit:
                    return PartialRun("translated", t, state, get(head, 0), head, tape, lo, hi, hit)
            if head < lo or t == 0:
                hit = _translated(hist, tape, left_recs, maxs, t, state, head, -1)
                if hit:
                    return PartialRun("translated", t, state, get(head, 0), head, tape, lo, hi, hit)
        if head > hi:
            hi = head
        elif head < lo:
            lo = head
        bit = get(head, 0)
        action = table[2 * state + bit]
        if action is None or action.next == HALT:
            return PartialRun("undefined", t, state, bit, head, tape, lo, hi)
        if t == budget:
            break
        write, move, nxt = action
        if write != bit:
            tape[head] = write
            if decide:
                zhash ^= _zobrist(head)
                hist.record(head, t + 1, write)
        head += move
        state = nxt
    return PartialRun("budget", budget, state, get(head, 0), head, tape, min(lo, head), max(hi, head))


def _same_tape(hist: _History, t0: int, tape: dict[int, int]) -> bool:
    for cell in hist.times:
        if hist.at(cell, t0) != tape.get(cell, 0):
            return False
    return True


def _translated(hist, tape, recs, extreme: _SuffixMin, t1, state, h1, sign):
    """Check the new record (t1, h1) against earlier records in ``state``.

    For right records (sign=+1) with earlier record (t0, h0) and d = h1-h0,
    the condition is: cells [m, h0] at t0 equal cells [m+d, h1] now, where m
    is the leftmost head position since t0.  Cells beyond a record are blank.
    """
    earlier = recs.setdefault(state, [])
    found = None
    for t0, h0 in reversed(earlier[-TC_LOOKBACK:]):
        m = extreme.since(t0)
        d = h1 - h0
        ok = True
        i = h0
        while (i - m) * sign >= 0:
            if hist.at(i, t0) != tape.get(i + d, 0):
                ok = False
                break
            i -= sign
        if ok:
            found = (t0, t1 - t0, d)
            break
    earlier.append((t1, h1))
    return found


def backward_unreachable(table: Table, depth: int = 24, max_nodes: int = 20000) -> bool:
    """True if no None/HALT entry of ``table`` is reachable from the blank tape.

    Depth-limited backward search over partial configurations around the
    head.  A branch is refuted when no defined transition can have produced
    it; the search gives up (False) on reaching the depth or node limit or a
    configuration compatible with the start.
    """
    n = len(table) // 2
    preds: dict[int, list[tuple[int, int, Action]]] = {q: [] for q in range(n)}
    targets = []
    for idx, a in enumerate(table):
        q, r = divmod(idx, 2)
        if a is None or a.next == HALT:
            targets.append((q, r))
        else:
            preds[a.next].append((q, r, a))
    nodes = 0
    stack = [(q, {0: r}, 0) for q, r in targets]
    while stack:
        state, cons, k = stack.pop()
        nodes += 1
        if nodes > max_nodes or k >= depth:
            return False
        if state == 0 and not any(cons.values()):
            return False
        for q, r, a in preds[state]:
            p = -a.move  # where the head was before moving onto cell 0
            if cons.get(p, a.write) != a.write:
                continue
            shifted = {off - p: v for off, v in cons.items() if off != p}
            shifted[0] = r
            stack.append((q, shifted, k + 1))
    return True



def macro_stepper(table: Table, k: int):
    """Block-level transition function for ``k``-cell blocks.

    ``step(state, block, side)`` runs the machine inside one block entered
    at its left (side 0) or right (side 1) end and returns
    ``(new_block, move, state, entry_side)`` when the head leaves it,
    ``"halt"`` on a None/HALT entry, or ``"loop"`` when it never leaves.
    """
    n = len(table) // 2
    limit = n * k * (1 << k) + 1
    cache: dict = {}

    def step(state: int, block: tuple[int, ...], side: int):
        key = (state, block, side)
        hit = cache.get(key)
        if hit is not None:
            return hit
        cells = list(block)
        pos = 0 if side == 0 else k - 1
        res: object = "loop"
        for _ in range(limit):
            a = table[2 * state + cells[pos]]
            if a is None or a.next == HALT:
                res = "halt"
                break
            cells[pos] = a.write
            pos += a.move
            state = a.next
            if pos < 0:
                res = (tuple(cells), -1, state, 1)
                break
            if pos >= k:
                res = (tuple(cells), 1, state, 0)
                break
        cache[key] = res
        return res

    return step


def ngram_cps(table: Table, radius: int, block: int = 1, max_views: int = 100_000) -> bool:
    """n-gram closed position set over ``block``-cell symbols.

    True proves no None/HALT entry is reachable.  The reachable
    configurations are over-approximated by local views (left context,
    state, symbol under head, entry side, right context), contexts read
    outward from the head, together with the sets of ``radius``-windows that
    may occur on either half-tape.  Every real configuration keeps its view
    in the set and all windows of its halves in the window sets, so a closed
    set without a halting view is a proof.
    """
    step = macro_stepper(table, block)
    zb = (0,) * block
    zero = (zb,) * radius
    windows = ({zero}, {zero})  # left half, right half
    views = {(zero, 0, zb, 0, zero)}
    todo = list(views)
    while True:
        grown = False
        while todo:
            left, state, sym, side, right = todo.pop()
            res = step(state, sym, side)
            if res == "halt":
                return False
            if res == "loop":
                continue
            written, move, nxt, entry = res
            if move > 0:
                near, far, near_side, far_side = left, right, 0, 1
            else:
                near, far, near_side, far_side = right, left, 1, 0
            # the written symbol joins the half we leave behind
            new_near = (written,) + near[:-1]
            if new_near not in windows[near_side]:
                windows[near_side].add(new_near)
                grown = True
            for w in windows[far_side]:
                if w[:-1] != far[1:]:
                    continue
                if move > 0:
                    view = (new_near, nxt, far[0], entry, w)
                else:
                    view = (w, nxt, far[0], entry, new_near)
                if view not in views:
                    views.add(view)
                    todo.append(view)
                    if len(views) > max_views:
                        return False
        if not grown:
            return True
        todo = list(views)


def _rle_norm(half, cap):
    out = []
    for b, c, plus in half:
        if c == 0 and not plus:
            continue
        if out and out[-1][0] == b:
            _, c0, p0 = out[-1]
            out[-1] = (b, c0 + c, p0 or plus)
        else:
            out.append((b, c, plus))
    out = [(b, cap, True) if c > cap else (b, c, plus) for b, c, plus in out]
    while out and not any(out[-1][0]):
        out.pop()  # trailing zero blocks are the blank tail
    return tuple(out)


def _rle_pop(half, k):
    if not half:
        return [((0,) * k, ())]
    (b, c, plus), tail = half[0], half[1:]
    if c >= 1:
        rest = ((b, c - 1, plus),) + tail if (c > 1 or plus) else tail
        return [(b, rest)]
    # b^{0+}: either no copy left or at least one more
    return _rle_pop(tail, k) + [(b, ((b, 0, True),) + tail)]


def repeated_word_list(table: Table, block: int, cap: int,
                       max_configs: int = 50_000, max_len: int = 30) -> bool:
    """Run-length abstraction of both half-tapes over ``block``-cell words.

    A segment ``(w, c, plus)`` stands for exactly ``c`` copies of ``w`` or,
    with ``plus``, for ``c`` or more; counts above ``cap`` are widened to
    ``cap``-or-more.  The abstract configurations reachable from the blank
    tape are explored exhaustively; True means none of them halts.
    """
    step = macro_stepper(table, block)
    zb = (0,) * block
    start = ((), 0, zb, 0, ())
    seen = {start}
    todo = [start]
    while todo:
        left, state, sym, side, right = todo.pop()
        res = step(state, sym, side)
        if res == "halt":
            return False
        if res == "loop":
            continue
        written, move, nxt, entry = res
        if move > 0:
            new_left = _rle_norm(((written, 1, False),) + left, cap)
            succ = [(new_left, nxt, s, entry, _rle_norm(r, cap)) for s, r in _rle_pop(right, block)]
        else:
            new_right = _rle_norm(((written, 1, False),) + right, cap)
            succ = [(_rle_norm(r, cap), nxt, s, entry, new_right) for s, r in _rle_pop(left, block)]
        for cfg in succ:
            if cfg in seen:
                continue
            if len(cfg[0]) > max_len or len(cfg[4]) > max_len or len(seen) >= max_configs:
                return False
            seen.add(cfg)
            todo.append(cfg)
    return True


def static_proof(table: Table) -> str | None:
    """Name of the first static decider proving ``table`` never halts."""
    if backward_unreachable(table):
        return "backward"
    for block in (1, 2, 3):
        for radius in (1, 2, 3, 4):
            if ngram_cps(table, radius, block, max_views=20_000):
                return f"cps(block={block},radius={radius})"
    for block in (1, 2, 3, 4, 5, 6):
        for cap in (1, 2, 3):
            if repeated_word_list(table, block, cap):
                return f"rwl(block={block},cap={cap})"
    return None
