"""Boolean functions of the inputs and outputs, stored as truth tables.

Bit ``i`` of a table is ``f`` at assignment ``i = setting * 2**n + outcome``; for
two parties that is ``i = 8x + 4y + 2u + v``. The table integer doubles as the
canonical serialization (``0x``-prefixed lowercase hex) and as the position of
the function in :func:`enumerate_all`.

Expression syntax, loosest binding first::

    expr := xor ("|" xor)*
    xor  := and ("^" and)*
    and  := not (("." | "&") not)*
    not  := "!" not | atom
    atom := variable | "0" | "1" | "(" expr ")"

so ``x.y ^ u ^ v`` is the CHSH game and ``a ^ 1`` negates ``a``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .behavior import INPUT_VARS, OUTPUT_VARS, _check_parties
from .errors import ExpressionError, ShapeError


def variables(parties):
    _check_parties(parties)
    return INPUT_VARS[:parties] + OUTPUT_VARS[:parties]


@dataclass(frozen=True)
class TruthTable:
    parties: int
    bits: int

    def __post_init__(self):
        _check_parties(self.parties)
        if not 0 <= self.bits < (1 << self.width):
            raise ShapeError(f"table does not fit in {self.width} bits")

    @property
    def width(self):
        return 1 << (2 * self.parties)

    @cached_property
    def array(self):
        """Truth values as a bool array indexed by assignment."""
        idx = np.arange(self.width)
        out = ((np.uint64(self.bits) >> idx.astype(np.uint64)) & np.uint64(1)).astype(bool)
        out.setflags(write=False)
        return out

    @cached_property
    def accept(self):
        """Acceptance mask shaped like a behavior table: True where f = 0."""
        size = 1 << self.parties
        out = ~self.array.reshape(size, size)
        out.setflags(write=False)
        return out

    @property
    def zeros(self):
        return self.width - bin(self.bits).count("1")

    @property
    def hex(self):
        return f"0x{self.bits:0{self.width // 4}x}"

    def __str__(self):
        return self.hex

    def __call__(self, *assignment):
        return evaluate(self, assignment)

    def __invert__(self):
        return complement(self)

    def __and__(self, other):
        _same_arity(self, other)
        return TruthTable(self.parties, self.bits & other.bits)

    def __or__(self, other):
        _same_arity(self, other)
        return TruthTable(self.parties, self.bits | other.bits)

    @classmethod
    def from_array(cls, values, parties):
        values = np.asarray(values, dtype=bool).ravel()
        bits = 0
        for i in np.flatnonzero(values):
            bits |= 1 << int(i)
        return cls(parties, bits)

    @classmethod
    def from_hex(cls, text, parties=2):
        t = text.strip().lower()
        if not t.startswith("0x"):
            raise ExpressionError("hex tables need a 0x prefix", 0)
        try:
            return cls(parties, int(t, 16))
        except ValueError as exc:
            raise ExpressionError(f"bad hex table {text!r}", 0) from exc


def _same_arity(f, g):
    if f.parties != g.parties:
        raise ShapeError("functions have different arity")


def evaluate(f, assignment):
    """Value of ``f`` at a bit tuple ordered like :func:`variables`."""
    assignment = tuple(int(b) for b in assignment)
    if len(assignment) != 2 * f.parties:
        raise ShapeError(f"expected {2 * f.parties} bits, got {len(assignment)}")
    i = 0
    for b in assignment:
        if b not in (0, 1):
            raise ValueError("assignment entries must be bits")
        i = 2 * i + b
    return (f.bits >> i) & 1


def complement(f):
    return TruthTable(f.parties, ((1 << f.width) - 1) ^ f.bits)


def constant(value, parties=2):
    return TruthTable(parties, ((1 << (1 << 2 * parties)) - 1) if value else 0)


def enumerate_all(parties=2):
    """Every bipartite truth table, in increasing integer order."""
    if parties != 2:
        raise ShapeError("exhaustive enumeration is only offered for two parties")
    for bits in range(1 << 16):
        yield TruthTable(2, bits)


# --------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text, parties):
        self.text = text
        self.pos = 0
        names = variables(parties)
        width = 1 << (2 * parties)
        idx = np.arange(width)
        nvar = len(names)
        self.env = {name: ((idx >> (nvar - 1 - k)) & 1).astype(bool) for k, name in enumerate(names)}
        self.ones = np.ones(width, dtype=bool)

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self):
        if not self.peek():
            raise ExpressionError("empty expression", 0)
        value = self.expr()
        if self.peek():
            raise ExpressionError(f"unexpected {self.text[self.pos]!r}", self.pos)
        return value

    def expr(self):
        value = self.xor()
        while self.peek() == "|":
            self.pos += 1
            value = value | self.xor()
        return value

    def xor(self):
        value = self.conj()
        while self.peek() == "^":
            self.pos += 1
            value = value ^ self.conj()
        return value

    def conj(self):
        value = self.neg()
        while self.peek() in (".", "&"):
            self.pos += 1
            value = value & self.neg()
        return value

    def neg(self):
        if self.peek() == "!":
            self.pos += 1
            return ~self.neg()
        return self.atom()

    def atom(self):
        ch = self.peek()
        start = self.pos
        if ch == "(":
            self.pos += 1
            value = self.expr()
            if self.peek() != ")":
                raise ExpressionError("expected ')'", self.pos)
            self.pos += 1
            return value
        if ch in ("0", "1"):
            self.pos += 1
            return self.ones.copy() if ch == "1" else ~self.ones
        if ch.isalpha():
            while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
                self.pos += 1
            name = self.text[start:self.pos]
            if name not in self.env:
                raise ExpressionError(f"unknown variable {name!r}", start)
            return self.env[name].copy()
        if not ch:
            raise ExpressionError("unexpected end of expression", self.pos)
        raise ExpressionError(f"unexpected {ch!r}", self.pos)


def parse_expr(text, parties=2):
    values = _Parser(text, parties).parse()
    return TruthTable.from_array(values, parties)


# Functions that appear throughout the demonstrations.
NAMED = {
    "sig1": ("v ^ x", 2),
    "sig2": ("u ^ y", 2),
    "sig": ("(x ^ v ^ 1).(u ^ y ^ 1) ^ 1", 2),
    "chsh": ("x.y ^ u ^ v", 2),
    "ctc": ("y ^ v", 2),
    "nl": ("(x | y).(x.y ^ u ^ v)", 2),
    "f1": ("u ^ v ^ y ^ 1", 2),
    "f2": ("u ^ v ^ y", 2),
    "final2": ("(x ^ 1).(y ^ 1).(u ^ 1).(v ^ 1) ^ 1", 2),
    "final": ("(x ^ 1).(y ^ 1).(z ^ 1).(u ^ 1).(v ^ 1).(w ^ 1) ^ 1", 3),
}


def named(name):
    text, parties = NAMED[name]
    return parse_expr(text, parties)


def as_function(spec, parties=2):
    """Accept a registered name, a ``0x`` hex table or an expression."""
    if isinstance(spec, TruthTable):
        return spec
    s = spec.strip()
    if s in NAMED:
        f = named(s)
        if f.parties != parties:
            raise ShapeError(f"{s} is a {f.parties}-party function")
        return f
    if s.lower().startswith("0x"):
        return TruthTable.from_hex(s, parties)
    return parse_expr(s, parties)


def lift(f, parties=3):
    """Reinterpret a bipartite function (of x, y, u, v) as a tripartite one ignoring z, w."""
    if f.parties != 2 or parties != 3:
        raise ShapeError("only bipartite -> tripartite lifting is supported")
    idx = np.arange(64)
    x, y = (idx >> 5) & 1, (idx >> 4) & 1
    u, v = (idx >> 2) & 1, (idx >> 1) & 1
    sub = 8 * x + 4 * y + 2 * u + v
    return TruthTable.from_array(f.array[sub], 3)
