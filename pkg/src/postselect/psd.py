"""The post-selection device: keep a trial only when ``f(inputs, outputs) == 0``.

Conditioning is reported two ways at once. The *conditional* renormalizes each
input setting on its own, which is how the output tables are laid out; the
*joint* conditions ``prior * box`` on ``f = 0`` as a single event, which is
what efficiencies and mutual information are computed from.

Behaviors with undefined settings are queried only where they are defined:
the input prior is restricted to those settings and renormalized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .behavior import TOL, Behavior, JointDist, effective_prior, white_noise
from .boolfn import TruthTable, complement
from .errors import ShapeError, TotalRejection


@dataclass(frozen=True, eq=False)
class PsdResult:
    conditional: Behavior
    joint: JointDist
    efficiency: float
    per_setting_accept: np.ndarray
    prior: np.ndarray

    def to_dict(self):
        return {
            "efficiency": self.efficiency,
            "per_setting_accept": [float(a) for a in self.per_setting_accept],
            "conditional": self.conditional.to_dict(),
            "joint": [[float(m) for m in row] for row in self.joint.mass],
        }


def _check_arity(box, f):
    if box.parties != f.parties:
        raise ShapeError(f"{f.parties}-party function applied to a {box.parties}-party box")


def _kept(box, f, prior):
    _check_arity(box, f)
    p = effective_prior(box, prior)
    kept = box.table * f.accept
    return p, kept, kept.sum(axis=1)


def condition(box, f, prior=None):
    """Post-select ``box`` on ``f = 0`` under an input prior (uniform by default).

    Raises :class:`TotalRejection` when no trial survives.
    """
    p, kept, accept = _kept(box, f, prior)
    eta = float(p @ accept)
    if eta <= 0.0:
        raise TotalRejection(f"{f.hex} rejects every trial of this box")
    ok = accept > 0
    table = np.zeros_like(kept)
    table[ok] = kept[ok] / accept[ok, None]
    conditional = Behavior._trusted(box.parties, table, ok)
    joint = JointDist._trusted(box.parties, p[:, None] * kept / eta, p)
    return PsdResult(conditional, joint, eta, accept, p)


def efficiency(box, f, prior=None):
    """Probability that a trial passes, ``P(f = 0)``; zero is a legal answer."""
    p, _, accept = _kept(box, f, prior)
    return float(p @ accept)


def f_box(f):
    """White noise post-selected on ``f = 0``."""
    return condition(white_noise(f.parties), f).conditional


def sequential_efficiency(f, f1):
    """White-noise acceptance of applying ``f`` and then ``f1``: ``P(f = 0 and f1 = 0)``."""
    if f.parties != f1.parties:
        raise ShapeError("functions have different arity")
    return (f | f1).zeros / f.width


ORTHOGONAL = "orthogonal"
SEMI_ORTHOGONAL = "semi-orthogonal"
NON_ORTHOGONAL = "non-orthogonal"


@dataclass(frozen=True)
class Orthogonality:
    kind: str
    sequential: float
    product: float
    # set when the sequential efficiency exceeds the product, a case with no name of its own
    positively_correlated: bool = False


def orthogonality_class(f, f1, tol=TOL):
    """Compare sequential acceptance with ``eta_f * eta_f1`` measured on the f-box."""
    seq = sequential_efficiency(f, f1)
    if seq <= 0.0:
        return Orthogonality(ORTHOGONAL, seq, 0.0)
    wn = white_noise(f.parties)
    eta_f = efficiency(wn, f)
    if eta_f <= 0.0 or efficiency(wn, f1) <= 0.0:
        raise TotalRejection("orthogonality is undefined for a function that rejects everything")
    product = eta_f * efficiency(f_box(f), f1)
    if seq < product - tol:
        return Orthogonality(SEMI_ORTHOGONAL, seq, product)
    return Orthogonality(NON_ORTHOGONAL, seq, product, positively_correlated=seq > product + tol)


@dataclass(frozen=True, eq=False)
class ComplementReport:
    fn: TruthTable
    eta: float
    eta_complement: float
    sequential: float
    reconstruction_error: float
    equal_weight: bool
    accept: np.ndarray
    accept_complement: np.ndarray

    @property
    def total(self):
        return self.eta + self.eta_complement


def complement_report(f, box=None):
    """Check that ``f`` and its complement split a box into two complementary parts.

    The per-setting recombination ``accept_f * cond_f + accept_g * cond_g`` must
    give back ``box`` (white noise by default).
    """
    g = complement(f)
    if f.bits == 0 or g.bits == 0:
        raise ValueError("constant functions have no complementary pair")
    box = white_noise(f.parties) if box is None else box
    rf, rg = condition(box, f), condition(box, g)
    rebuilt = (
        rf.per_setting_accept[:, None] * rf.conditional.table
        + rg.per_setting_accept[:, None] * rg.conditional.table
    )
    err = float(np.abs(rebuilt - box.table).max())
    equal = bool(np.all(np.abs(rf.per_setting_accept - 0.5) <= TOL))
    return ComplementReport(
        f, rf.efficiency, rg.efficiency, sequential_efficiency(f, g), err, equal,
        rf.per_setting_accept, rg.per_setting_accept,
    )
