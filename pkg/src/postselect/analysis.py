"""Device-independent diagnostics: directed mutual information, signaling and
locality classes, game values and the exhaustive bipartite sweep."""
from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .behavior import (
    CLASSICAL_BOUND,
    SQRT2,
    TOL,
    TSIRELSON,
    Behavior,
    JointDist,
    canonical,
    check_prior,
    effective_prior,
    uniform_prior,
)
from .boolfn import TruthTable, named, parse_expr
from .errors import ShapeError
from .psd import condition, efficiency, f_box

CHSH = parse_expr("x.y ^ u ^ v")

NO_SIGNALING = "no-signaling"
ONE_WAY_AB = "one-way-AB"
ONE_WAY_BA = "one-way-BA"
TWO_WAY = "two-way"

LOCAL = "local"
NONLOCAL = "nonlocal"
SUPERQUANTUM = "superquantum"
PARTIAL = "partial"


def _entropy(p):
    p = np.asarray(p, dtype=np.float64).ravel()
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def _group(spec):
    if isinstance(spec, str):
        spec = spec.replace(",", " ").split() if ("," in spec or " " in spec) else list(spec)
    return tuple(spec)


def mutual_information(joint, group_a, group_b):
    """Shannon mutual information in bits between two disjoint variable groups.

    Groups are variable names, e.g. ``mutual_information(j, "x", "yv")``.
    """
    a, b = _group(group_a), _group(group_b)
    names = joint.variables
    unknown = set(a + b) - set(names)
    if unknown:
        raise ShapeError(f"unknown variables {sorted(unknown)}")
    if set(a) & set(b):
        raise ValueError("variable groups overlap")
    if not a or not b:
        raise ValueError("variable groups must be nonempty")
    t = joint.as_tensor()

    def marginal(keep):
        axes = tuple(k for k, n in enumerate(names) if n not in keep)
        return t.sum(axis=axes)

    return _entropy(marginal(a)) + _entropy(marginal(b)) - _entropy(marginal(a + b))


# entropy differences below this are floating-point residue of an exact zero
RESIDUE = 1e-12


def _snap(value):
    return 0.0 if value < RESIDUE else value


@dataclass(frozen=True)
class SignalingProfile:
    i_ab: float
    i_ba: float
    cls: str

    def to_dict(self):
        return {"i_ab": self.i_ab, "i_ba": self.i_ba, "class": self.cls}


def signaling_class(i_ab, i_ba, tol=TOL):
    ab, ba = i_ab > tol, i_ba > tol
    if ab and ba:
        return TWO_WAY
    if ab:
        return ONE_WAY_AB
    if ba:
        return ONE_WAY_BA
    return NO_SIGNALING


def signaling_profile(obj, prior=None, tol=TOL):
    """Directed signaling of a bipartite box or joint.

    ``i_ab = I(x : y, v)`` is Alice's input seen by Bob, ``i_ba = I(y : x, u)`` the
    reverse. A :class:`Behavior` is turned into a joint under ``prior`` restricted
    to its defined settings.
    """
    if isinstance(obj, Behavior):
        p = effective_prior(obj, prior)
        joint = JointDist(obj.parties, p[:, None] * obj.table, p)
    else:
        joint = obj
    if joint.parties != 2:
        raise ShapeError("signaling profiles are defined for two parties")
    i_ab = _snap(mutual_information(joint, "x", "yv"))
    i_ba = _snap(mutual_information(joint, "y", "xu"))
    return SignalingProfile(i_ab, i_ba, signaling_class(i_ab, i_ba, tol))


def game_value(box, game=CHSH, prior=None):
    """Winning probability ``P(game = 0)`` of a fully defined box."""
    box.require_full()
    if box.parties != game.parties:
        raise ShapeError("game and box have different arity")
    prior = uniform_prior(box.parties) if prior is None else check_prior(prior, box.parties)
    return float(prior @ (box.table * game.accept).sum(axis=1))


def chsh_value(box):
    return game_value(box, CHSH)


def symmetrized_chsh(box):
    """Best winning probability over the eight relabelled CHSH games."""
    box.require_full()
    if box.parties != 2:
        raise ShapeError("CHSH needs two parties")
    return float((0.25 * kernels.FACET_WINS @ box.table.ravel()).max())


def locality_class(box, tol=TOL):
    return _locality_from_value(chsh_value(box), tol)


# --------------------------------------------------------------------------
# classification of post-selection functions


@dataclass(frozen=True)
class ClassificationRecord:
    fn: TruthTable
    efficiency_on_wn: float
    signaling: SignalingProfile
    chsh_value: float | None
    locality: str
    chsh_symmetrized: float | None = None

    def to_dict(self):
        return {
            "fn_hex": self.fn.hex,
            "eta_wn": self.efficiency_on_wn,
            "i_ab": self.signaling.i_ab,
            "i_ba": self.signaling.i_ba,
            "signaling_class": self.signaling.cls,
            "chsh": self.chsh_value,
            "chsh_symmetrized": self.chsh_symmetrized,
            "locality": self.locality,
        }


def _locality_from_value(value, tol=TOL):
    if value <= CLASSICAL_BOUND + tol:
        return LOCAL
    if value > TSIRELSON + tol:
        return SUPERQUANTUM
    return NONLOCAL


def classify(f, tol=TOL):
    """Classify one bipartite function through its f-box (the direct, unvectorized path)."""
    if f.parties != 2:
        raise ShapeError("classification covers bipartite functions")
    box = f_box(f)
    prof = signaling_profile(box, tol=tol)
    eta = efficiency(canonical("WN"), f)
    if box.is_full:
        value = chsh_value(box)
        return ClassificationRecord(f, eta, prof, value, _locality_from_value(value, tol), symmetrized_chsh(box))
    return ClassificationRecord(f, eta, prof, None, PARTIAL)


def _relabel_perms():
    """Index permutations for local output relabelings u -> u^a.x^b, v -> v^g.y^d."""
    idx = np.arange(16)
    x, y, u, v = (idx >> 3) & 1, (idx >> 2) & 1, (idx >> 1) & 1, idx & 1
    perms = []
    for a in (0, 1):
        for b in (0, 1):
            for g in (0, 1):
                for d in (0, 1):
                    perms.append(8 * x + 4 * y + 2 * (u ^ (a * x) ^ b) + (v ^ (g * y) ^ d))
    return np.array(perms)


def _orbit_count(tables):
    if len(tables) == 0:
        return 0
    tables = np.asarray(tables, dtype=np.int64)
    bits = (tables[:, None] >> np.arange(16)) & 1
    reps = []
    for perm in _relabel_perms():
        image = (bits[:, perm] << np.arange(16)).sum(axis=1)
        reps.append(image)
    return int(np.unique(np.min(reps, axis=0)).size)


PUBLISHED_NONLOCAL_NS = 5


@dataclass(eq=False)
class SweepReport:
    tables: np.ndarray
    eta: np.ndarray
    i_ab: np.ndarray
    i_ba: np.ndarray
    full: np.ndarray
    chsh: np.ndarray
    chsh_sym: np.ndarray
    tol: float = TOL
    signaling: np.ndarray = field(init=False)
    locality: np.ndarray = field(init=False)

    def __post_init__(self):
        ab, ba = self.i_ab > self.tol, self.i_ba > self.tol
        sig = np.full(self.tables.size, NO_SIGNALING, dtype=object)
        sig[ab & ~ba] = ONE_WAY_AB
        sig[~ab & ba] = ONE_WAY_BA
        sig[ab & ba] = TWO_WAY
        loc = np.full(self.tables.size, PARTIAL, dtype=object)
        value = np.where(self.full, self.chsh, 0.0)
        loc[self.full & (value <= CLASSICAL_BOUND + self.tol)] = LOCAL
        loc[self.full & (value > CLASSICAL_BOUND + self.tol)] = NONLOCAL
        loc[self.full & (value > TSIRELSON + self.tol)] = SUPERQUANTUM
        self.signaling = sig
        self.locality = loc

    def __len__(self):
        return int(self.tables.size)

    def record(self, k):
        full = bool(self.full[k])
        return ClassificationRecord(
            TruthTable(2, int(self.tables[k])),
            float(self.eta[k]),
            SignalingProfile(float(self.i_ab[k]), float(self.i_ba[k]), self.signaling[k]),
            float(self.chsh[k]) if full else None,
            self.locality[k],
            float(self.chsh_sym[k]) if full else None,
        )

    @property
    def records(self):
        return [self.record(k) for k in range(len(self))]

    def nonlocal_no_signaling(self, symmetrized=False):
        value = self.chsh_sym if symmetrized else self.chsh
        mask = self.full & (self.signaling == NO_SIGNALING)
        mask &= np.where(self.full, value, 0.0) > CLASSICAL_BOUND + self.tol
        return self.tables[mask]

    def summary(self):
        counts = Counter(zip(self.signaling.tolist(), self.locality.tolist()))
        raw = self.nonlocal_no_signaling()
        sym = self.nonlocal_no_signaling(symmetrized=True)
        return {
            "functions": len(self),
            "counts": {f"{s}|{l}": counts[(s, l)] for s, l in sorted(counts)},
            "partial": int((~self.full).sum()),
            "accept_all": int((self.eta == 1.0).sum()),
            "nonlocal_no_signaling": int(raw.size),
            "nonlocal_no_signaling_functions": [f"0x{int(t):04x}" for t in raw],
            "nonlocal_no_signaling_published": PUBLISHED_NONLOCAL_NS,
            "matches_published": int(raw.size) == PUBLISHED_NONLOCAL_NS,
            "nonlocal_no_signaling_symmetrized": int(sym.size),
            "nonlocal_no_signaling_symmetrized_orbits": _orbit_count(sym),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for k in range(len(self)):
            full = self.full[k]
            w.writerow([
                f"0x{int(self.tables[k]):04x}",
                fmt(self.eta[k]),
                fmt(self.i_ab[k]),
                fmt(self.i_ba[k]),
                self.signaling[k],
                fmt(self.chsh[k]) if full else "",
                self.locality[k],
            ])
        return buf.getvalue()


SWEEP_COLUMNS = ("fn_hex", "eta_wn", "i_ab", "i_ba", "signaling_class", "chsh", "locality")


def fmt(value):
    """Report formatting: 12 significant digits, negative zero folded."""
    value = float(value)
    if value == 0.0:
        value = 0.0
    return f"{value:.12g}"


def sweep_classify(tol=TOL, use_numba=None):
    """Classify every bipartite function except the constant 1 (which rejects everything)."""
    tables = np.arange((1 << 16) - 1, dtype=np.int64)
    eta, i_ab, i_ba, full, chsh, chsh_sym = kernels.sweep_bipartite(tables, use_numba=use_numba)
    i_ab = np.where(i_ab < RESIDUE, 0.0, i_ab)
    i_ba = np.where(i_ba < RESIDUE, 0.0, i_ba)
    return SweepReport(tables, eta, i_ab, i_ba, full, chsh, chsh_sym, tol)


# --------------------------------------------------------------------------
# the two comparison tables

TABLE_FUNCTIONS = ("sig1", "sig2", "sig", "chsh", "ctc")
TABLE_BOXES = ("WN", "LV", "SINGLET", "PR", "NL")

# published decimal that no closed form reproduces; see table7 notes
_AMBIGUOUS = 0.394553

PUBLISHED_TABLE7 = {
    "sig1": [(1, 0), (1, 0), (1, _AMBIGUOUS), (1, 0.5), (1, 0.5)],
    "sig2": [(0, 1), (0, 1), (_AMBIGUOUS, 1), (0.5, 1), (0.5, 1)],
    "sig": [(1, 1)] * 5,
    "chsh": [(0, 0)] * 5,
    "ctc": [(0, 0), (0, 0), (_AMBIGUOUS, 0), (0.5, 0), (0.25, 0)],
}

# (value, tolerance, text as printed)
PUBLISHED_TABLE15 = {
    "sig1": [(0.5, 1e-9, "1/2")] * 5,
    "sig2": [(0.5, 1e-9, "1/2")] * 5,
    "sig": [(0.25, 1e-9, "1/4"), (0.25, 1e-9, "1/4"), (0.1616, 5e-4, "0.1616"),
            (0.125, 1e-9, "1/8"), (0.0625, 1e-9, "1/16")],
    "chsh": [(0.5, 1e-9, "1/2"), (0.75, 1e-9, "3/4"), (TSIRELSON, 1e-6, "(2+sqrt2)/4"),
             (1.0, 1e-9, "1"), (0.875, 1e-9, "7/8")],
    "ctc": [(0.5, 1e-9, "1/2")] * 5,
}


@dataclass
class TableReport:
    which: str
    columns: tuple
    rows: list

    @property
    def mismatches(self):
        return [r for r in self.rows if r.get("status") == "mismatch" or "mismatch" in (r.get("status_ab"), r.get("status_ba"))]

    @property
    def ok(self):
        return not self.mismatches

    def to_dict(self):
        return {"table": self.which, "columns": list(self.columns), "rows": self.rows}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(r[c]) if isinstance(r[c], float) else r[c] for c in self.columns])
        return buf.getvalue()

    def to_markdown(self):
        lines = ["| " + " | ".join(self.columns) + " |", "|" + "---|" * len(self.columns)]
        for r in self.rows:
            cells = [fmt(r[c]) if isinstance(r[c], float) else str(r[c]) for c in self.columns]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def _cell_status(value, published, tol):
    if published == _AMBIGUOUS:
        return "reported"
    return "match" if abs(value - published) <= tol else "mismatch"


TABLE7_COLUMNS = (
    "fn", "box", "i_ab", "i_ba", "published_i_ab", "published_i_ba", "dev_ab", "dev_ba",
    "status_ab", "status_ba", "orientation", "per_setting_i_ab", "per_setting_i_ba",
)
TABLE15_COLUMNS = ("fn", "box", "eta", "published", "published_text", "deviation", "tolerance", "status")


def table_report(which, tol=TOL):
    """Recompute the 5 functions x 5 boxes grid of directed MI (``"7"``) or efficiency (``"15"``)."""
    which = str(which).lower().removeprefix("table")
    rows = []
    if which == "7":
        for fn in TABLE_FUNCTIONS:
            f = named(fn)
            for (box_name, (pub_ab, pub_ba)) in zip(TABLE_BOXES, PUBLISHED_TABLE7[fn]):
                res = condition(canonical(box_name), f)
                prof = signaling_profile(res.joint, tol=tol)
                aux = signaling_profile(res.conditional, tol=tol)
                st_ab = _cell_status(prof.i_ab, pub_ab, tol)
                st_ba = _cell_status(prof.i_ba, pub_ba, tol)
                swapped = abs(prof.i_ab - pub_ba) <= tol and abs(prof.i_ba - pub_ab) <= tol
                if st_ab != "mismatch" and st_ba != "mismatch":
                    orient = "as-labelled"
                elif swapped:
                    orient = "swapped"
                else:
                    orient = "none"
                rows.append({
                    "fn": fn, "box": box_name,
                    "i_ab": prof.i_ab, "i_ba": prof.i_ba,
                    "published_i_ab": float(pub_ab), "published_i_ba": float(pub_ba),
                    "dev_ab": abs(prof.i_ab - pub_ab), "dev_ba": abs(prof.i_ba - pub_ba),
                    "status_ab": st_ab, "status_ba": st_ba, "orientation": orient,
                    "per_setting_i_ab": aux.i_ab, "per_setting_i_ba": aux.i_ba,
                })
        return TableReport("7", TABLE7_COLUMNS, rows)
    if which == "15":
        for fn in TABLE_FUNCTIONS:
            f = named(fn)
            for box_name, (pub, cell_tol, text) in zip(TABLE_BOXES, PUBLISHED_TABLE15[fn]):
                eta = efficiency(canonical(box_name), f)
                dev = abs(eta - pub)
                rows.append({
                    "fn": fn, "box": box_name, "eta": eta, "published": float(pub),
                    "published_text": text, "deviation": dev, "tolerance": cell_tol,
                    "status": "match" if dev <= cell_tol else "mismatch",
                })
        return TableReport("15", TABLE15_COLUMNS, rows)
    raise ValueError(f"unknown table {which!r}; expected 7 or 15")


def ctc_mixture_formulas(c, weight=0.5):
    """Closed forms printed for f_CTC on PR/NL mixtures, read two ways.

    ``literal`` evaluates the printed sign pattern as written; ``entropy`` reads
    it as ``weight * (1 - h((1 + c) / 2))`` with ``h`` the binary entropy.
    """
    p, q = (1 + c) / 2, (1 - c) / 2

    def xlog(t):
        return t * math.log2(t) if t > 0 else 0.0

    literal = weight * (1 - xlog(p) + xlog(q))
    entropy = weight * (1 + xlog(p) + xlog(q))
    return {"literal": literal, "entropy": entropy}


__all__ = [
    "CHSH", "SQRT2", "mutual_information", "signaling_profile", "game_value", "chsh_value",
    "symmetrized_chsh", "locality_class", "classify", "sweep_classify", "table_report",
    "ctc_mixture_formulas",
]
