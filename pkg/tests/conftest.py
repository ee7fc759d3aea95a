import random

import pytest

from ittmbb.classical import HALT as CHALT, Action, ClassicalMachine
from ittmbb.composer import OneTapeITTM
from ittmbb.ittm import HALT, L, LIMSUP, R, TRIPLES, ITTAction, ITTMachine


def ittm(n, rows, limit, rule=LIMSUP):
    """Build a table from ``rows[q](triple) -> action`` and ``limit(triple) -> action``."""
    table = [ITTAction(*rows[q](t)) for q in range(n) for t in TRIPLES]
    table += [ITTAction(*limit(t)) for t in TRIPLES]
    return ITTMachine(n, tuple(table), rule)


def right_mover(rule=LIMSUP):
    keep = lambda t: (t, R, 0)
    return ittm(1, [keep], keep, rule)


def halts_after_omega(k):
    """Drifts right through the first block, then halts k steps into the second."""
    drift = lambda t: (t, R, 0)
    if k == 1:
        return ittm(1, [drift], lambda t: (t, R, HALT))
    # Limit -> S1 -> ... -> S(k-1) -> HALT
    rows = [drift] + [(lambda q: (lambda t: (t, R, q + 1 if q + 1 < k else HALT)))(q) for q in range(1, k)]
    return ittm(k, rows, lambda t: (t, R, 1))


def one_writer():
    return ittm(1, [lambda t: ((t[0], 1, t[2]), R, HALT)], lambda t: (t, R, HALT))


def flip_flop(rule=LIMSUP):
    """Toggles output cell 0 forever while staying there."""
    return ittm(1, [lambda t: ((t[0], 1 - t[1], t[2]), L, 0)], lambda t: ((t[0], 1 - t[1], t[2]), L, 0), rule)


def unary_successor():
    # scan right over the ones, write one more
    return OneTapeITTM.from_bits(1, {(0, 1): (1, R, 0), (0, 0): (1, R, HALT)})


def unary_doubler():
    """1^x -> 1^(2x) on one tape."""
    rows = {(0, 1): (1, R, 0), (0, 0): (0, L, 1),
            (1, 1): (0, R, 2), (1, 0): (1, R, 4),
            (2, 0): (1, R, 3), (2, 1): (1, R, 3),
            (3, 1): (1, R, 3), (3, 0): (1, L, 5),
            (5, 1): (1, L, 5), (5, 0): (0, L, 1),
            (4, 1): (1, R, 4), (4, 0): (0, L, 6),
            (6, 0): (0, R, HALT), (6, 1): (0, R, HALT)}
    return OneTapeITTM.from_bits(7, rows)


def random_classical(rng, n):
    return ClassicalMachine(n, tuple(Action(rng.randint(0, 1), rng.choice((-1, 1)),
                                            rng.choice(list(range(n)) + [CHALT])) for _ in range(2 * n)))


def random_ittm(rng, n, halting=True, rule=None):
    targets = list(range(n)) + ([HALT] if halting else [])
    table = tuple(ITTAction(rng.choice(TRIPLES), rng.choice((L, R)), rng.choice(targets))
                  for _ in range(8 * (n + 1)))
    return ITTMachine(n, table, rule or rng.choice(("limsup", "liminf")))


@pytest.fixture
def rng():
    return random.Random(20240611)


def input_copier():
    """Reads the input and writes the output in one step: not a one-tape machine."""
    return ittm(1, [lambda t: ((t[0], t[0], t[2]), R, HALT)], lambda t: (t, R, HALT))
