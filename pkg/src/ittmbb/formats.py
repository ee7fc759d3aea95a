"""Text formats for machines.

Classical::

    classical states=2
    S0 0 -> 1 R S1
    S0 1 -> 1 L S1
    ...

ITTM::

    ittm states=1 rule=limsup
    S0 (0,0,0) -> (0,1,0) R HALT
    ...
    LIM (1,1,1) -> (1,1,1) R HALT

Blank lines and ``#`` comments are ignored.  Every (state, read) pair must
appear exactly once.  Serialization emits the canonical form: header, then
transitions in table order, single spaces, no comments.
"""

from __future__ import annotations

import re
from typing import Union

from .classical import HALT as C_HALT, L, R, Action, ClassicalMachine
from .ittm import HALT, LIMIT, RULES, TRIPLES, ITTAction, ITTMachine

Machine = Union[ClassicalMachine, ITTMachine]


class ParseError(ValueError):
    def __init__(self, line: int, column: int, reason: str) -> None:
        super().__init__(f"line {line}, column {column}: {reason}")
        self.line, self.column, self.reason = line, column, reason


_MOVES = {"L": L, "R": R}
_TOKEN = re.compile(r"\S+")


def _state_name(q: int) -> str:
    if q == HALT:
        return "HALT"
    if q == LIMIT:
        return "LIM"
    return f"S{q}"


def _triple(t) -> str:
    return "({},{},{})".format(*t)


def serialize(m: Machine) -> str:
    if isinstance(m, ClassicalMachine):
        lines = [f"classical states={m.n_states}"]
        for q in range(m.n_states):
            for b in (0, 1):
                a = m.action(q, b)
                lines.append(f"S{q} {b} -> {a.write} {'L' if a.move == L else 'R'} {_state_name(a.next)}")
    else:
        lines = [f"ittm states={m.n_states} rule={m.rule}"]
        for q in list(range(m.n_states)) + [LIMIT]:
            for t in TRIPLES:
                a = m.action(q, t)
                lines.append(f"{_state_name(q)} {_triple(t)} -> {_triple(a.write)} "
                             f"{'L' if a.move == L else 'R'} {_state_name(a.next)}")
    return "\n".join(lines) + "\n"


def _tokens(line: str) -> list[tuple[int, str]]:
    return [(mt.start() + 1, mt.group()) for mt in _TOKEN.finditer(line)]


def _header(lineno: int, toks) -> tuple[str, int, str]:
    col, kind = toks[0]
    if kind not in ("classical", "ittm"):
        raise ParseError(lineno, col, f"expected 'classical' or 'ittm', got {kind!r}")
    fields = {}
    for col, tok in toks[1:]:
        key, eq, val = tok.partition("=")
        if not eq or key not in ("states", "rule") or key in fields:
            raise ParseError(lineno, col, f"bad header field {tok!r}")
        fields[key] = (col, val)
    if "states" not in fields:
        raise ParseError(lineno, len(" ".join(t for _, t in toks)) + 1, "header needs states=<n>")
    col, val = fields["states"]
    if not val.isdigit() or int(val) < 1:
        raise ParseError(lineno, col, f"states must be a positive integer, got {val!r}")
    rule = "limsup"
    if "rule" in fields:
        rcol, rule = fields["rule"]
        if kind == "classical":
            raise ParseError(lineno, rcol, "classical machines take no limit rule")
        if rule not in RULES:
            raise ParseError(lineno, rcol, f"rule must be one of {', '.join(RULES)}")
    return kind, int(val), rule


def _state(lineno: int, col: int, tok: str, n: int, *, source: bool, ittm: bool) -> int:
    if tok == "HALT":
        if source:
            raise ParseError(lineno, col, "HALT has no transitions")
        return HALT
    if tok == "LIM":
        if not ittm:
            raise ParseError(lineno, col, "classical machines have no limit state")
        if not source:
            raise ParseError(lineno, col, "limit state not a valid target")
        return LIMIT
    m = re.fullmatch(r"S(0|[1-9][0-9]*)", tok)
    if not m:
        raise ParseError(lineno, col, f"bad state name {tok!r}")
    q = int(m.group(1))
    if q >= n:
        raise ParseError(lineno, col, f"state {tok} out of range for states={n}")
    return q


def _bits(lineno: int, col: int, tok: str, width: int) -> tuple[int, ...]:
    if width == 1:
        if tok not in ("0", "1"):
            raise ParseError(lineno, col, f"expected a bit, got {tok!r}")
        return (int(tok),)
    m = re.fullmatch(r"\(([01]),([01]),([01])\)", tok)
    if not m:
        raise ParseError(lineno, col, f"expected a triple like (0,1,0), got {tok!r}")
    return tuple(int(g) for g in m.groups())


def parse_machine(text: str) -> Machine:
    """Parse either format; errors carry the line and column."""
    header = None
    rows: dict = {}
    last = (1, 1)
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        last = (lineno, len(raw) + 1)
        if header is None:
            header = _header(lineno, toks)
            continue
        kind, n, _ = header
        ittm = kind == "ittm"
        if len(toks) != 6 or toks[2][1] != "->":
            col = toks[min(len(toks), 6) - 1][0] if len(toks) != 6 else toks[2][0]
            raise ParseError(lineno, col, "expected '<state> <read> -> <write> <move> <state>'")
        (c0, src), (c1, read), _, (c3, write), (c4, move), (c5, dst) = toks
        q = _state(lineno, c0, src, n, source=True, ittm=ittm)
        r = _bits(lineno, c1, read, 3 if ittm else 1)
        w = _bits(lineno, c3, write, 3 if ittm else 1)
        if move not in _MOVES:
            raise ParseError(lineno, c4, f"move must be L or R, got {move!r}")
        nxt = _state(lineno, c5, dst, n, source=False, ittm=ittm)
        key = (q, r if ittm else r[0])
        if key in rows:
            raise ParseError(lineno, c0, f"duplicate transition for {src} {read}")
        rows[key] = (w if ittm else w[0], _MOVES[move], nxt)
    if header is None:
        raise ParseError(1, 1, "empty document")
    kind, n, rule = header
    if kind == "classical":
        for q in range(n):
            for b in (0, 1):
                if (q, b) not in rows:
                    raise ParseError(*last, f"missing transition for S{q} {b}")
        table = tuple(Action(*rows[q, b]) for q in range(n) for b in (0, 1))
        return ClassicalMachine(n, table)
    for q in list(range(n)) + [LIMIT]:
        for t in TRIPLES:
            if (q, t) not in rows:
                raise ParseError(*last, f"missing transition for ({_state_name(q)},{_triple(t)})")
    table = tuple(ITTAction(*rows[q, t]) for q in list(range(n)) + [LIMIT] for t in TRIPLES)
    return ITTMachine(n, table, rule)


# -- compact one-line encodings (ledger and champion keys) -------------------

_LETTERS = "ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def ittm_compact(m: ITTMachine) -> str:
    """Rows joined by ``_``; each entry is ``<write bits><L|R><target>``, target ``Z`` = halt."""
    def ent(a: ITTAction) -> str:
        return "".join(map(str, a.write)) + ("L" if a.move == L else "R") + ("Z" if a.next == HALT else _LETTERS[a.next])
    rows = ["".join(ent(a) for a in m.table[8 * r:8 * r + 8]) for r in range(m.n_states + 1)]
    return f"{m.rule}:" + "_".join(rows)


def ittm_from_compact(text: str) -> ITTMachine:
    rule, _, body = text.partition(":")
    rows = body.split("_")
    table = []
    for row in rows:
        if len(row) != 40:
            raise ValueError(f"bad compact ITTM row {row!r}")
        for k in range(0, 40, 5):
            e = row[k:k + 5]
            if e[3] not in _MOVES or set(e[:3]) - set("01"):
                raise ValueError(f"bad compact ITTM entry {e!r}")
            table.append(ITTAction(tuple(int(c) for c in e[:3]), _MOVES[e[3]],
                                   HALT if e[4] == "Z" else _LETTERS.index(e[4])))
    return ITTMachine(len(rows) - 1, tuple(table), rule)


def classical_from_compact(text: str) -> ClassicalMachine:
    rows = text.split("_")
    table = []
    for row in rows:
        if len(row) != 6:
            raise ValueError(f"bad compact classical row {row!r}")
        for k in (0, 3):
            w, mv, q = row[k:k + 3]
            if mv not in _MOVES or w not in "01":
                raise ValueError(f"bad compact classical entry {row[k:k + 3]!r}")
            table.append(Action(int(w), _MOVES[mv], C_HALT if q in "HZ" else _LETTERS.index(q)))
    return ClassicalMachine(len(rows), tuple(table))


def compact(m: Machine) -> str:
    return m.compact() if isinstance(m, ClassicalMachine) else ittm_compact(m)


def from_compact(text: str) -> Machine:
    return ittm_from_compact(text) if ":" in text else classical_from_compact(text)
