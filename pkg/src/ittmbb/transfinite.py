"""Desk-scale execution of ITTMs through limit stages.

Each omega-block (the successor steps between two limits) is simulated
until its configuration either repeats exactly (a *cycle*) or repeats up to
a rightward shift of the head and of every cell it can still reach (a
*drift*).  Either pattern determines the whole block, so the limit snapshot
can be computed exactly.  Equal limit snapshots certify non-halting when no
cell changes its limit value across the repetition.

Everything here is sound but incomplete: blocks with other behaviour come
back as ``Undetermined``.
"""

from __future__ import annotations

import hashlib
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

from .eptape import EPTape
from .ittm import (HALT, L, LIMIT, LIMINF, LIMSUP, ITTAction, ITTMachine, OrdinalStage,
                   Snapshot, decode_unary, encode_unary, initial_snapshot, row_index)

CYCLE_ONLY, CYCLE_AND_DRIFT = "cycle", "cycle+drift"
NO_PATTERN, BLOCK_BUDGET, LIMIT_BUDGET = "NoPatternFound", "BlockBudget", "LimitBudget"

Table = Sequence[Optional[ITTAction]]
EventSink = Callable[[dict], None]


@dataclass(frozen=True)
class ExecBudget:
    max_block_steps: int = 10_000
    max_limit_stages: int = 8
    detection: str = CYCLE_AND_DRIFT

    def __post_init__(self) -> None:
        if self.max_block_steps < 1 or self.max_limit_stages < 1:
            raise ValueError("budgets must be positive")
        if self.detection not in (CYCLE_ONLY, CYCLE_AND_DRIFT):
            raise ValueError(f"detection must be {CYCLE_ONLY!r} or {CYCLE_AND_DRIFT!r}")

    def as_dict(self) -> dict:
        return {"max_block_steps": self.max_block_steps, "max_limit_stages": self.max_limit_stages,
                "detection": self.detection}


@dataclass(frozen=True)
class CycleReport:
    t0: int
    p: int


@dataclass(frozen=True)
class DriftReport:
    """snapshot(t0+p) equals snapshot(t0) shifted right by ``d``.

    Precisely: same state, head moved by ``d``, no left move bounced off
    cell 0 during the period, and every cell ``i >= low`` at ``t0`` equals
    cell ``i + d`` at ``t0 + p`` (``low`` is the leftmost head position in
    the period).
    """

    t0: int
    p: int
    d: int
    low: int


Report = Union[CycleReport, DriftReport]


@dataclass(frozen=True)
class Halted:
    stage: OrdinalStage
    final: Snapshot
    digest: str


@dataclass(frozen=True)
class NonHaltingCertified:
    first: OrdinalStage
    second: OrdinalStage
    snapshot: Snapshot


@dataclass(frozen=True)
class Undetermined:
    reason: str
    stage: OrdinalStage = OrdinalStage()


@dataclass(frozen=True)
class NeedsEntry:
    """A partial table was asked for an entry it does not define."""

    state: int
    triple: int
    snapshot: Snapshot


RunOutcome = Union[Halted, NonHaltingCertified, Undetermined]


def tapes_digest(tapes: Sequence[EPTape]) -> str:
    return hashlib.sha256("|".join(map(str, tapes)).encode()).hexdigest()[:32]


def _zob(key: int) -> int:
    z = (key * 0x9E3779B97F4A7C15 + 0x2545F4914F6CDD1D) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return z ^ (z >> 31)


def _tail_shift_invariant(tape: EPTape, start: int, d: int) -> bool:
    """tape[i] == tape[i+d] for every i >= start."""
    if d % len(tape.period):
        return False
    return all(tape[i] == tape[i + d] for i in range(start, len(tape.prefix)))


class _Block:
    """Successor steps from one snapshot, cells packed as 3-bit triples."""

    def __init__(self, table: Table, n: int, start: Snapshot, cycle: bool = False, drift: bool = False,
                 emit: Optional[EventSink] = None) -> None:
        self.table, self.n, self.start = table, n, start
        self.base = start.tapes
        size = max(len(t.prefix) + len(t.period) for t in self.base) + start.head + 16
        self.cells = [self._base(i) for i in range(size)]
        self.head, self.state, self.t = start.head, start.state, 0
        self.last_bounce = -1
        self.cycle, self.drift, self.emit = cycle, drift, emit
        self.writes: list[tuple[int, int, int]] = []  # (t_after, cell, value)
        # detection bookkeeping
        self.hist_t: dict[int, list[int]] = {}
        self.hist_v: dict[int, list[int]] = {}
        self.zhash = 0
        self.seen: dict[tuple[int, int, int], int] = {}
        self.max_head = start.head - 1
        self.records: dict[int, list[tuple[int, int]]] = {}
        self.min_t: list[int] = []
        self.min_h: list[int] = []

    def _base(self, i: int) -> int:
        a, b, c = self.base
        return a[i] << 2 | b[i] << 1 | c[i]

    def value(self, i: int) -> int:
        if i >= len(self.cells):
            self._grow(i)
        return self.cells[i]

    def _grow(self, i: int) -> None:
        new = max(i + 1, 2 * len(self.cells))
        self.cells.extend(self._base(j) for j in range(len(self.cells), new))

    def value_at(self, i: int, t: int) -> int:
        ts = self.hist_t.get(i)
        if ts is not None:
            k = bisect_right(ts, t)
            if k:
                return self.hist_v[i][k - 1]
        return self._base(i)

    # -- detection ----------------------------------------------------------

    def _check_cycle(self) -> Optional[CycleReport]:
        key = (self.state, self.head, self.zhash)
        t0 = self.seen.get(key)
        if t0 is not None and all(self.value_at(i, t0) == self.cells[i] for i in self.hist_t):
            return CycleReport(t0, self.t - t0)
        self.seen[key] = self.t
        return None

    def _min_since(self, t0: int) -> int:
        return self.min_h[bisect_right(self.min_t, t0 - 1)]

    def _check_drift(self) -> Optional[DriftReport]:
        h1, t1 = self.head, self.t
        recs = self.records.setdefault(self.state, [])
        found = None
        for t0, h0 in reversed(recs):
            if self.last_bounce >= t0:
                break
            d = h1 - h0
            if not all(_tail_shift_invariant(tp, h0 + 1, d) for tp in self.base):
                continue
            low = self._min_since(t0)
            if all(self.value_at(i, t0) == self.value(i + d) for i in range(h0, low - 1, -1)):
                found = DriftReport(t0, t1 - t0, d, low)
                break
        recs.append((t1, h1))
        return found

    # -- stepping -----------------------------------------------------------

    def run(self, max_steps: int) -> Union[Report, Halted, NeedsEntry, None]:
        """Step until a pattern, a halt, an undefined entry, or ``max_steps``."""
        table, cells = self.table, self.cells
        row_limit = 8 * self.n
        while True:
            if self.cycle or self.drift:
                while self.min_h and self.min_h[-1] >= self.head:
                    self.min_h.pop()
                    self.min_t.pop()
                self.min_t.append(self.t)
                self.min_h.append(self.head)
                if self.cycle:
                    rep = self._check_cycle()
                    if rep:
                        return rep
                if self.head > self.max_head:
                    self.max_head = self.head
                    if self.drift:
                        rep = self._check_drift()
                        if rep:
                            return rep
            if self.t >= max_steps:
                return None
            head = self.head
            if head >= len(cells):
                self._grow(head)
            v = cells[head]
            row = row_limit if self.state == LIMIT else 8 * self.state
            a = table[row + v]
            if a is None:
                return NeedsEntry(self.state, v, self.snapshot())
            w = a.write[0] << 2 | a.write[1] << 1 | a.write[2]
            self.t += 1
            if w != v:
                cells[head] = w
                self.writes.append((self.t, head, w))
                if self.cycle or self.drift:
                    self.zhash ^= _zob(head * 8 + v) ^ _zob(head * 8 + w)
                    ts = self.hist_t.get(head)
                    if ts is None:
                        self.hist_t[head] = [self.t]
                        self.hist_v[head] = [w]
                    else:
                        ts.append(self.t)
                        self.hist_v[head].append(w)
            if a.move == L and head == 0:
                self.last_bounce = self.t - 1
            else:
                self.head = head + a.move
            self.state = a.next
            if self.emit is not None:
                self.emit({"event": "step", "stage": str(self.stage()), "head": self.head,
                           "state": _state_name(self.state)})
            if a.next == HALT:
                return Halted(self.stage(), self.snapshot(), "")

    def stage(self) -> OrdinalStage:
        return OrdinalStage(self.start.stage.b, self.start.stage.c + self.t)

    def tape_words(self) -> list[list[int]]:
        return [[(v >> (2 - k)) & 1 for v in self.cells] for k in range(3)]

    def snapshot(self) -> Snapshot:
        n = len(self.cells)
        tapes = tuple(EPTape.from_cells(bits, base.suffix(n)) for bits, base in zip(self.tape_words(), self.base))
        return Snapshot(tapes, self.head, self.state, self.stage())  # type: ignore[arg-type]


def _state_name(q: int) -> str:
    return {HALT: "HALT", LIMIT: "LIM"}.get(q, f"S{q}")


def _table_of(m: ITTMachine | Table) -> tuple[Table, int]:
    if isinstance(m, ITTMachine):
        return m.table, m.n_states
    return m, len(m) // 8 - 1


def detect_cycle(m: ITTMachine, start: Snapshot, max_steps: int = 10_000) -> Optional[CycleReport]:
    """Least (t0+p) exact repeat of the block configuration from ``start``."""
    res = _Block(m.table, m.n_states, start, cycle=True).run(max_steps)
    return res if isinstance(res, CycleReport) else None


def detect_drift(m: ITTMachine, start: Snapshot, max_steps: int = 10_000) -> Optional[DriftReport]:
    """Earliest verified rightward drift, checked at head-record times."""
    res = _Block(m.table, m.n_states, start, drift=True).run(max_steps)
    return res if isinstance(res, DriftReport) else None


@dataclass(frozen=True)
class BlockLimit:
    """Limit snapshot of one block plus, per tape, the cells that held 1 / 0 at some stage of it."""

    snapshot: Snapshot
    ever_one: tuple[EPTape, EPTape, EPTape]
    ever_zero: tuple[EPTape, EPTape, EPTape]


def _bits(v: int, k: int) -> int:
    return (v >> (2 - k)) & 1


def block_limit(m: ITTMachine | Table, start: Snapshot, report: Report, rule: str = LIMSUP) -> BlockLimit:
    """Re-simulate the block, verify ``report`` and compute its limit."""
    table, n = _table_of(m)
    blk = _Block(table, n, start)
    if blk.run(report.t0) is not None or blk.t != report.t0:
        raise ValueError("report does not describe this block (stopped before t0)")
    at_t0 = list(blk.cells)
    head0, state0 = blk.head, blk.state
    n_before = len(blk.writes)
    if blk.run(report.t0 + report.p) is not None or blk.t != report.t0 + report.p:
        raise ValueError("report does not describe this block (stopped inside the period)")
    def old(i: int) -> int:
        return at_t0[i] if i < len(at_t0) else blk._base(i)
    before, during = blk.writes[:n_before], blk.writes[n_before:]
    if isinstance(report, CycleReport):
        size = len(blk.cells)
        ok = blk.state == state0 and blk.head == head0 and all(old(i) == blk.value(i) for i in range(size))
        if not ok:
            raise ValueError("unverified cycle report")
        seen_one = [old(i) for i in range(size)]  # 3-bit OR over the cycle
        seen_zero = [7 - old(i) for i in range(size)]
        for _, cell, v in during:
            seen_one[cell] |= v
            seen_zero[cell] |= 7 - v
        tapes = []
        for k, base in enumerate(start.tapes):
            if rule == LIMSUP:
                bits = [_bits(seen_one[i], k) for i in range(size)]
            else:
                bits = [1 - _bits(seen_zero[i], k) for i in range(size)]
            tapes.append(EPTape.from_cells(bits, base.suffix(size)))
        ever = _ever_cycle(start, before + during, size)
    else:
        d, low = report.d, report.low
        heads_ok = blk.state == state0 and blk.head == head0 + d
        size = max(len(blk.cells), len(at_t0)) + d
        same = all(old(i) == blk.value(i + d) for i in range(low, size))
        tails = all(_tail_shift_invariant(tp, head0 + 1, d) for tp in start.tapes)
        lows = min([head0] + [c for _, c, _ in during]) >= low
        if not (heads_ok and same and tails and lows and blk.last_bounce < report.t0):
            raise ValueError("unverified drift report")
        tapes = []
        for k in range(3):
            frozen = [_bits(old(i), k) for i in range(low)]
            period = [_bits(blk.value(i), k) for i in range(low, low + d)]
            tapes.append(EPTape.from_cells(frozen, EPTape("", "".join(map(str, period)))))
        ever = _ever_drift(start, before, during, old, report, head0 + d)
    limit = Snapshot(tuple(tapes), 0, LIMIT, start.stage.next_limit())  # type: ignore[arg-type]
    return BlockLimit(limit, *ever)


def _ever_cycle(start: Snapshot, writes, size: int):
    ones, zeros = [], []
    for k, base in enumerate(start.tapes):
        one = base.cells(size)
        zero = [1 - b for b in one]
        for _, cell, v in writes:
            if _bits(v, k):
                one[cell] = 1
            else:
                zero[cell] = 1
        ones.append(EPTape.from_cells(one, base.suffix(size)))
        zeros.append(EPTape.from_cells(zero, ~base.suffix(size)))
    return tuple(ones), tuple(zeros)


def _ever_drift(start: Snapshot, before, during, old, report: DriftReport, h1: int):
    d, low = report.d, report.low
    size = h1 + 2 * d + 1
    ones, zeros = [], []
    for k, base in enumerate(start.tapes):
        masks = []
        for v in (1, 0):
            early = [base[i] == v for i in range(size + d)]
            for _, cell, val in before:
                if cell < size + d and _bits(val, k) == v:
                    early[cell] = True
            span = [_bits(old(j), k) == v for j in range(size + d)]
            for _, cell, val in during:
                if cell < size + d and _bits(val, k) == v:
                    span[cell] = True
            mask = list(early)
            carry = [False] * d  # running OR of span along each residue class
            for i in range(low, size + d):
                carry[i % d] = carry[i % d] or span[i]
                mask[i] = mask[i] or carry[i % d]
            bits = [int(x) for x in mask]
            masks.append(EPTape("".join(map(str, bits[:size])), "".join(map(str, bits[size:size + d]))))
        ones.append(masks[0])
        zeros.append(masks[1])
    return tuple(ones), tuple(zeros)


def omega_limit(m: ITTMachine, start: Snapshot, report: Report, rule: str = LIMSUP) -> Snapshot:
    """Exact limit snapshot of the block from ``start`` described by ``report``."""
    return block_limit(m, start, report, rule).snapshot


def _stable(snap: Snapshot, blocks: Sequence[BlockLimit], rule: str) -> bool:
    """No cell leaves its limit value anywhere in ``blocks`` (so later limits agree)."""
    for k in range(3):
        if rule == LIMSUP:
            seen = blocks[0].ever_one[k]
            for blk in blocks[1:]:
                seen = seen | blk.ever_one[k]
            if not seen.below(snap.tapes[k]):
                return False
        else:
            seen = blocks[0].ever_zero[k]
            for blk in blocks[1:]:
                seen = seen | blk.ever_zero[k]
            if not seen.below(~snap.tapes[k]):
                return False
    return True


def execute(m: ITTMachine | Table, start: Snapshot, budget: ExecBudget = ExecBudget(), rule: str = LIMSUP,
            on_event: Optional[EventSink] = None, trace_steps: bool = False) -> RunOutcome | NeedsEntry:
    """Run from ``start`` through successive omega-blocks."""
    table, n = _table_of(m)
    emit = on_event or (lambda e: None)
    drift = budget.detection == CYCLE_AND_DRIFT
    seen: dict[tuple, list[int]] = {}
    blocks: list[BlockLimit] = []
    snap = start
    while True:
        blk = _Block(table, n, snap, cycle=True, drift=drift, emit=on_event if trace_steps else None)
        res = blk.run(budget.max_block_steps)
        if isinstance(res, NeedsEntry):
            return res
        if isinstance(res, Halted):
            final = res.final
            emit({"event": "halt", "stage": str(final.stage), "tapes": [str(t) for t in final.tapes]})
            return Halted(final.stage, final, tapes_digest(final.tapes))
        if res is None:
            reason = NO_PATTERN if drift else BLOCK_BUDGET
            emit({"event": "undetermined", "reason": reason, "stage": str(blk.stage())})
            return Undetermined(reason, blk.stage())
        if isinstance(res, CycleReport):
            emit({"event": "detect", "kind": "cycle", "t0": res.t0, "p": res.p, "stage": str(snap.stage)})
        else:
            emit({"event": "detect", "kind": "drift", "t0": res.t0, "p": res.p, "d": res.d,
                  "stage": str(snap.stage)})
        lim = block_limit(table, snap, res, rule)
        blocks.append(lim)
        snap = lim.snapshot
        b = snap.stage.b
        emit({"event": "limit", "stage": str(snap.stage), "tapes": [str(t) for t in snap.tapes]})
        key = snap.config()
        for b1 in seen.get(key, []):
            if _stable(snap, blocks[b1 - start.stage.b:b - start.stage.b], rule):
                cert = NonHaltingCertified(OrdinalStage(b1, 0), snap.stage, snap)
                emit({"event": "certificate", "first": str(cert.first), "second": str(cert.second)})
                return cert
        seen.setdefault(key, []).append(b)
        if b >= budget.max_limit_stages:
            emit({"event": "undetermined", "reason": LIMIT_BUDGET, "stage": str(snap.stage)})
            return Undetermined(LIMIT_BUDGET, snap.stage)


def run_transfinite(m: ITTMachine, input_tape: Optional[EPTape] = None, budget: ExecBudget = ExecBudget(),
                    rule: Optional[str] = None, on_event: Optional[EventSink] = None,
                    trace_steps: bool = False) -> RunOutcome:
    """Run ``m`` from stage 0 on ``input_tape`` (blank by default)."""
    out = execute(m, initial_snapshot(input_tape), budget, rule or m.rule, on_event, trace_steps)
    assert not isinstance(out, NeedsEntry)  # total tables define every entry
    return out


def f_star(m: ITTMachine, n: int, budget: ExecBudget = ExecBudget(),
           rule: Optional[str] = None) -> Union[int, None, Undetermined]:
    """k if m halts on unary n with clean unary k on the output tape; None if undefined."""
    out = run_transfinite(m, encode_unary(n), budget, rule)
    if isinstance(out, Undetermined):
        return out
    if isinstance(out, NonHaltingCertified):
        return None
    return decode_unary(out.final.output)


def replay(m: ITTMachine, start: Snapshot, steps: int) -> list[Snapshot]:
    """Successor-step trace from ``start`` using the reference stepper."""
    from .ittm import successor_step

    out = []
    s = start
    for _ in range(steps):
        if s.halted:
            break
        s = successor_step(m, s)
        out.append(s)
    return out


def limit_snapshots(m: ITTMachine, input_tape: Optional[EPTape] = None, budget: ExecBudget = ExecBudget(),
                    rule: Optional[str] = None) -> dict[OrdinalStage, Snapshot]:
    """Every limit-stage snapshot a run passes through, keyed by stage."""
    found: dict[OrdinalStage, Snapshot] = {}

    def sink(e: dict) -> None:
        if e["event"] == "limit":
            stage = OrdinalStage.parse(e["stage"])
            found[stage] = Snapshot(tuple(EPTape.parse(t) for t in e["tapes"]), 0, LIMIT, stage)  # type: ignore[arg-type]

    run_transfinite(m, input_tape, budget, rule, sink)
    return found


def replay_disagreement(m: ITTMachine, a: Snapshot, b: Snapshot, steps: int = 10_000) -> Optional[int]:
    """First step at which runs from ``a`` and ``b`` differ, or None if they agree for ``steps`` steps.

    Stages are ignored. After every step the (head, state, scanned triple)
    tuples must match; full tapes are compared at both ends.
    """
    if a.config() != b.config():
        return 0
    table, n = _table_of(m)
    x, y = _Block(table, n, a), _Block(table, n, b)
    for t in range(1, steps + 1):
        rx, ry = x.run(t), y.run(t)
        if (x.head, x.state, x.value(x.head)) != (y.head, y.state, y.value(y.head)):
            return t
        if isinstance(rx, Halted) or isinstance(ry, Halted):
            return None if isinstance(rx, Halted) and isinstance(ry, Halted) else t
    if x.snapshot().config() != y.snapshot().config():
        return steps
    return None
