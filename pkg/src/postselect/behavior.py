"""Boxes: conditional output distributions for two or three binary parties.

A behavior with ``n`` parties is stored as a ``(2**n, 2**n)`` array whose row is
the input tuple and column the output tuple, both read as binary numbers with
party A most significant (bipartite row ``2x + y``, column ``2u + v``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ShapeError, UndefinedSettingError

TOL = 1e-9
SQRT2 = math.sqrt(2.0)
TSIRELSON = (2.0 + SQRT2) / 4.0
CLASSICAL_BOUND = 0.75

PARTY_NAMES = ("A", "B", "C")
INPUT_VARS = ("x", "y", "z")
OUTPUT_VARS = ("u", "v", "w")


def _check_parties(parties):
    if parties not in (2, 3):
        raise ShapeError(f"only 2 or 3 parties are supported, got {parties}")


def _readonly(a):
    a = np.array(a, dtype=np.float64 if a.dtype != bool else bool, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Behavior:
    parties: int
    table: np.ndarray
    defined: np.ndarray

    def __post_init__(self):
        _check_parties(self.parties)
        size = 1 << self.parties
        table = np.asarray(self.table, dtype=np.float64)
        defined = np.asarray(self.defined, dtype=bool)
        if table.shape != (size, size) or defined.shape != (size,):
            raise ShapeError(f"expected a {size}x{size} table for {self.parties} parties")
        if np.any(table < -TOL) or np.any(table > 1 + TOL):
            raise ValueError("probabilities must lie in [0, 1]")
        if np.any(table[~defined] != 0.0):
            raise ValueError("undefined settings must carry no probability mass")
        sums = table[defined].sum(axis=1)
        if np.any(np.abs(sums - 1.0) > TOL):
            raise ValueError(f"defined settings must be normalized, row sums {sums}")
        object.__setattr__(self, "table", _readonly(np.clip(table, 0.0, 1.0)))
        object.__setattr__(self, "defined", _readonly(defined))

    @classmethod
    def _trusted(cls, parties, table, defined):
        # internal results built from already validated boxes skip the checks
        obj = object.__new__(cls)
        table.setflags(write=False)
        defined.setflags(write=False)
        object.__setattr__(obj, "parties", parties)
        object.__setattr__(obj, "table", table)
        object.__setattr__(obj, "defined", defined)
        return obj

    @classmethod
    def full(cls, table):
        table = np.asarray(table, dtype=np.float64)
        parties = int(round(math.log2(table.shape[0])))
        return cls(parties, table, np.ones(table.shape[0], dtype=bool))

    @property
    def size(self):
        return 1 << self.parties

    @property
    def is_full(self):
        return bool(self.defined.all())

    def require_full(self):
        if not self.is_full:
            missing = [int(s) for s in np.flatnonzero(~self.defined)]
            raise UndefinedSettingError(f"settings {missing} are undefined")

    def __getitem__(self, key):
        """``box[inputs, outputs]`` with tuples of bits or flat indices."""
        s, o = key
        return float(self.table[_index(s), _index(o)])

    def allclose(self, other, tol=TOL):
        return (
            self.parties == other.parties
            and np.array_equal(self.defined, other.defined)
            and bool(np.all(np.abs(self.table - other.table) <= tol))
        )

    def to_dict(self):
        return {
            "parties": self.parties,
            "settings": [
                [float(p) for p in row] if ok else None for row, ok in zip(self.table, self.defined)
            ],
        }

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, data):
        parties = int(data["parties"])
        _check_parties(parties)
        size = 1 << parties
        rows = data["settings"]
        if len(rows) != size:
            raise ShapeError(f"expected {size} settings, got {len(rows)}")
        table = np.zeros((size, size))
        defined = np.zeros(size, dtype=bool)
        for s, row in enumerate(rows):
            if row is None:
                continue
            if len(row) != size:
                raise ShapeError(f"setting {s} has {len(row)} outcomes, expected {size}")
            table[s] = row
            defined[s] = True
        return cls(parties, table, defined)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _index(key):
    if isinstance(key, (tuple, list)):
        idx = 0
        for b in key:
            idx = 2 * idx + int(b)
        return idx
    return int(key)


@dataclass(frozen=True, eq=False)
class JointDist:
    """Mass over (input tuple, output tuple), same layout as :class:`Behavior`."""

    parties: int
    mass: np.ndarray
    prior: np.ndarray

    def __post_init__(self):
        _check_parties(self.parties)
        mass = np.asarray(self.mass, dtype=np.float64)
        if mass.shape != (1 << self.parties,) * 2:
            raise ShapeError("joint mass has the wrong shape")
        if np.any(mass < 0) or abs(mass.sum() - 1.0) > TOL:
            raise ValueError("joint mass must be nonnegative and sum to 1")
        object.__setattr__(self, "mass", _readonly(mass))
        object.__setattr__(self, "prior", _readonly(np.asarray(self.prior, dtype=np.float64)))

    @classmethod
    def _trusted(cls, parties, mass, prior):
        obj = object.__new__(cls)
        mass.setflags(write=False)
        object.__setattr__(obj, "parties", parties)
        object.__setattr__(obj, "mass", mass)
        object.__setattr__(obj, "prior", prior)
        return obj

    @property
    def variables(self):
        return INPUT_VARS[: self.parties] + OUTPUT_VARS[: self.parties]

    def as_tensor(self):
        """Mass as a ``(2,) * 2n`` array with axes in :attr:`variables` order."""
        return self.mass.reshape((2,) * (2 * self.parties))


# --------------------------------------------------------------------------
# priors


def uniform_prior(parties=2):
    _check_parties(parties)
    size = 1 << parties
    return np.full(size, 1.0 / size)


def check_prior(prior, parties):
    prior = np.asarray(prior, dtype=np.float64)
    if prior.shape != (1 << parties,):
        raise ShapeError(f"prior must have {1 << parties} entries")
    if np.any(prior < 0) or abs(prior.sum() - 1.0) > TOL:
        raise ValueError("prior must be nonnegative and sum to 1")
    return prior


def effective_prior(box, prior=None):
    """Restrict ``prior`` to the settings where ``box`` is defined and renormalize."""
    prior = uniform_prior(box.parties) if prior is None else check_prior(prior, box.parties)
    p = np.where(box.defined, prior, 0.0)
    total = p.sum()
    if total <= 0:
        raise UndefinedSettingError("the prior puts no weight on a defined setting")
    return p / total


# --------------------------------------------------------------------------
# canonical boxes


def _from_rule(rule):
    table = np.zeros((4, 4))
    for s in range(4):
        x, y = s >> 1, s & 1
        for o in range(4):
            u, v = o >> 1, o & 1
            table[s, o] = rule(x, y, u, v)
    return Behavior.full(table)


@lru_cache(maxsize=None)
def white_noise(parties=2):
    _check_parties(parties)
    size = 1 << parties
    return Behavior.full(np.full((size, size), 1.0 / size))


def _singlet(x, y, u, v):
    win = (u ^ v) == (x & y)
    return (2 + SQRT2) / 8 if win else (2 - SQRT2) / 8


def _pr(x, y, u, v):
    return 0.5 if (u ^ v) == (x & y) else 0.0


def _nl(x, y, u, v):
    if x == 0 and y == 0:
        return 0.25
    return _pr(x, y, u, v)


CANONICAL = {
    "WN": lambda: white_noise(2),
    "LV": lambda: _from_rule(lambda x, y, u, v: 1.0 if u == 0 and v == 0 else 0.0),
    "SINGLET": lambda: _from_rule(_singlet),
    "PR": lambda: _from_rule(_pr),
    "NL": lambda: _from_rule(_nl),
}
MIXTURES = {"BCHSH-MIX": "PR", "NLMIX": "NL"}


def canonical(name, c=None):
    """Named box: ``WN``, ``LV``, ``SINGLET``, ``PR``, ``NL`` or a mixture.

    ``BCHSH-MIX`` is ``c*PR + (1-c)*WN`` and ``NLMIX`` is ``c*NL + (1-c)*WN``.
    """
    key = name.upper().replace("_", "-")
    if key in CANONICAL:
        return CANONICAL[key]()
    if key in MIXTURES:
        if c is None:
            raise ValueError(f"{name} needs a mixing weight c")
        c = float(c)
        if not 0.0 <= c <= 1.0:
            raise ValueError(f"mixing weight must lie in [0, 1], got {c}")
        return mix(CANONICAL[MIXTURES[key]](), white_noise(2), c)
    raise ValueError(f"unknown box {name!r}")


def parse_box_name(text):
    """Resolve ``wn|lv|singlet|pr|nl|bchsh-mix:<c>|nlmix:<c>``; ``wn3`` is tripartite noise."""
    t = text.strip().lower()
    if t == "wn3":
        return white_noise(3)
    if ":" in t:
        name, _, c = t.partition(":")
        return canonical(name, float(c))
    return canonical(t)


def load_box(spec):
    """A canonical name or a path to a Behavior JSON file."""
    try:
        return parse_box_name(spec)
    except ValueError:
        pass
    with open(spec, encoding="utf-8") as fh:
        return Behavior.from_json(fh.read())


# --------------------------------------------------------------------------
# operations


def mix(a, b, w):
    """Entrywise ``w*a + (1-w)*b``; ``w`` may be a scalar or one weight per setting."""
    if a.parties != b.parties:
        raise ShapeError("cannot mix boxes with different party counts")
    a.require_full()
    b.require_full()
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0) or np.any(w > 1):
        raise ValueError("mixing weight must lie in [0, 1]")
    if w.ndim == 1:
        w = w[:, None]
    return Behavior.full(w * a.table + (1 - w) * b.table)


def marginal_pair(box, keep=(0, 1)):
    """Reduce a tripartite box to the party pair ``keep``.

    The dropped party's output is summed out and its input averaged uniformly.
    """
    if box.parties != 3:
        raise ShapeError("marginal_pair needs a tripartite box")
    box.require_full()
    keep = tuple(sorted(keep))
    if len(keep) != 2 or not set(keep) <= {0, 1, 2}:
        raise ValueError("keep must name two distinct parties out of 0, 1, 2")
    drop = ({0, 1, 2} - set(keep)).pop()
    t = box.table.reshape((2,) * 6)  # x y z u v w
    t = t.sum(axis=3 + drop).mean(axis=drop)
    return Behavior.full(t.reshape(4, 4))


def to_joint(box, prior=None):
    prior = uniform_prior(box.parties) if prior is None else check_prior(prior, box.parties)
    box.require_full()
    return JointDist(box.parties, prior[:, None] * box.table, prior)


def from_joint(joint):
    """Condition a joint back on its inputs; settings with no prior weight come back undefined."""
    weights = joint.mass.sum(axis=1)
    defined = weights > 0
    table = np.zeros_like(joint.mass)
    table[defined] = joint.mass[defined] / weights[defined, None]
    return Behavior(joint.parties, table, defined)


def output_marginal(box, party, own_input, other_inputs):
    """Distribution of one party's output at a fixed setting.

    ``other_inputs`` lists the remaining parties' inputs in party order (an int is
    accepted for the bipartite case).
    """
    n = box.parties
    if isinstance(other_inputs, (int, np.integer)):
        other_inputs = (int(other_inputs),)
    others = list(other_inputs)
    if len(others) != n - 1:
        raise ShapeError(f"need {n - 1} other inputs for {n} parties")
    inputs = others[:party] + [own_input] + others[party:]
    s = _index(inputs)
    if not box.defined[s]:
        raise UndefinedSettingError(f"setting {tuple(inputs)} is undefined")
    t = box.table[s].reshape((2,) * n)
    axes = tuple(k for k in range(n) if k != party)
    return t.sum(axis=axes)


def signaling_deviation(box):
    """Largest change of any party's output marginal under a change of another party's input.

    Only pairs of settings that are both defined are compared.
    """
    n = box.parties
    worst = 0.0
    t = box.table.reshape((2,) * (2 * n))
    for party in range(n):
        others = [k for k in range(n) if k != party]
        marg = t.sum(axis=tuple(n + k for k in others))  # inputs..., own output
        for s in range(box.size):
            for s2 in range(box.size):
                bits = [(s >> (n - 1 - k)) & 1 for k in range(n)]
                bits2 = [(s2 >> (n - 1 - k)) & 1 for k in range(n)]
                if bits[party] != bits2[party] or s == s2:
                    continue
                if not (box.defined[s] and box.defined[s2]):
                    continue
                d = np.abs(marg[tuple(bits)] - marg[tuple(bits2)]).max()
                worst = max(worst, float(d))
    return worst
