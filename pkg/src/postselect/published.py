"""Reference boxes transcribed in their printed layout.

Printed rows are ``(y, v)`` = (0,0), (0,1), (1,0), (1,1) and printed columns
``(x, u)`` = (0,0), (0,1), (1,0), (1,1). Blank cells are stored as 0.
:func:`from_printed` moves them into the ``[2x + y, 2u + v]`` layout used by
:class:`~postselect.behavior.Behavior`.
"""
import math

import numpy as np

from .behavior import Behavior

_P = (2 + math.sqrt(2)) / 8
_M = (2 - math.sqrt(2)) / 8
H = 0.5
Q = 0.25


def from_printed(rows):
    rows = np.asarray(rows, dtype=np.float64)
    table = np.zeros((4, 4))
    for y in (0, 1):
        for v in (0, 1):
            for x in (0, 1):
                for u in (0, 1):
                    table[2 * x + y, 2 * u + v] = rows[2 * y + v, 2 * x + u]
    return table


def to_printed(table):
    table = np.asarray(table)
    rows = np.zeros((4, 4))
    for y in (0, 1):
        for v in (0, 1):
            for x in (0, 1):
                for u in (0, 1):
                    rows[2 * y + v, 2 * x + u] = table[2 * x + y, 2 * u + v]
    return rows


PRINTED = {
    "I": [[Q, Q, Q, Q]] * 4,
    "II": [[1, 0, 1, 0], [0, 0, 0, 0], [1, 0, 1, 0], [0, 0, 0, 0]],
    "III": [[_P, _M, _P, _M], [_M, _P, _M, _P], [_P, _M, _M, _P], [_M, _P, _P, _M]],
    "IV": [[H, 0, H, 0], [0, H, 0, H], [H, 0, 0, H], [0, H, H, 0]],
    "VI": [[Q, Q, H, 0], [Q, Q, 0, H], [H, 0, 0, H], [0, H, H, 0]],
    "VIII": [[H, H, 0, 0], [0, 0, H, H], [H, H, 0, 0], [0, 0, H, H]],
    "IX": [[H, 0, H, 0], [H, 0, H, 0], [0, H, 0, H], [0, H, 0, H]],
    "X": [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
    "XIII": [[0, H, 0, H], [H, 0, H, 0], [H, 0, H, 0], [0, H, 0, H]],
    "XIV": [[H, 0, H, 0], [0, H, 0, H], [0, H, 0, H], [H, 0, H, 0]],
}


def printed_mixture(which, c):
    """The c-dependent printed tables: ``"V"`` (as printed, unnormalized), ``"XI"``, ``"XII"``."""
    p, m = (1 + c) / 2, (1 - c) / 2
    if which == "V":
        return [[p, m, p, m], [m, p, m, p], [p, m, m, p], [m, p, p, m]]
    if which == "XI":
        return [[p, m, p, m], [0, 0, 0, 0], [0, 0, 0, 0], [m, p, p, m]]
    if which == "XII":
        return [[H, H, p, m], [0, 0, 0, 0], [0, 0, 0, 0], [m, p, p, m]]
    raise KeyError(which)


def published_box(name):
    return Behavior.full(from_printed(PRINTED[name]))
