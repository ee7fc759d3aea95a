"""Slow, obviously-correct reference computations used by the tests."""

from ittmbb.ittm import LIMSUP, successor_step
from ittmbb.transfinite import CycleReport, detect_cycle, detect_drift


def first_block_report(m, start, max_steps=10_000):
    return detect_cycle(m, start, max_steps) or detect_drift(m, start, max_steps)


def brute_force_limit(m, start, report, rule, periods=100):
    """Cellwise limsup/liminf over the last period of an explicit run of ``t0 + periods*p`` steps.

    Returns ``(cells, width)``: per-tape lists of limit bits on cells that
    have provably settled (all visited cells for a cycle; cells left of
    ``low + (periods-1)*d`` for a drift).
    """
    s = start
    for _ in range(report.t0 + (periods - 1) * report.p):
        s = successor_step(m, s)
    window = []
    for _ in range(report.p):
        s = successor_step(m, s)
        window.append(s)
    if isinstance(report, CycleReport):
        width = max(max(len(t.prefix) + len(t.period) for t in w.tapes) for w in window) + 2
    else:
        width = report.low + (periods - 1) * report.d
    pick = max if rule == LIMSUP else min
    cells = [[pick(w.tapes[k][i] for w in window) for i in range(width)] for k in range(3)]
    return cells, width
