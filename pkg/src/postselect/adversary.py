"""Faking a Bell violation by dropping trials.

Eve keeps every trial the game counts as won and keeps a lost trial with
probability ``p``. Analytic bounds follow from that rule directly; the trial
simulator plays it out sample by sample.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .behavior import CLASSICAL_BOUND, TOL, Behavior
from .boolfn import TruthTable
from .errors import NoPostSelectionNeeded

RNG_ALGORITHM = "numpy.random.PCG64"


def faked_value(in_value, p):
    """Efficiency and apparent game value when lost trials are kept with probability ``p``."""
    if not 0.0 < in_value <= 1.0:
        raise ValueError("resource game value must lie in (0, 1]")
    if not 0.0 <= p <= 1.0:
        raise ValueError("acceptance probability must lie in [0, 1]")
    eta = in_value + p * (1.0 - in_value)
    return eta, in_value / eta


def max_faking_efficiency(in_value, target_value):
    """Highest trial efficiency at which ``in_value`` can pass for ``target_value``."""
    if not 0.0 < in_value <= 1.0 or not 0.0 < target_value <= 1.0:
        raise ValueError("game values must lie in (0, 1]")
    if target_value < in_value:
        raise NoPostSelectionNeeded(
            f"target {target_value} is below the resource value {in_value}; no trials need dropping"
        )
    return in_value / target_value


def required_acceptance(in_value, target_value):
    """The ``p`` for which :func:`faked_value` reaches ``target_value``."""
    max_faking_efficiency(in_value, target_value)
    if in_value == 1.0 or target_value == in_value:
        return 1.0
    return in_value * (1.0 - target_value) / (target_value * (1.0 - in_value))


CONSISTENT_WITH_FAKING = "consistent-with-faking"
DI_SECURE = "DI-secure"


def security_margin(observed_value, observed_eta, resource_value=CLASSICAL_BOUND, tol=TOL):
    """Whether observed statistics could come from a classical box plus trial dropping."""
    if not 0.0 < observed_value <= 1.0 or not 0.0 < observed_eta <= 1.0:
        raise ValueError("observed value and efficiency must lie in (0, 1]")
    if observed_value <= resource_value:
        return CONSISTENT_WITH_FAKING
    bound = max_faking_efficiency(resource_value, observed_value)
    return DI_SECURE if observed_eta > bound + tol else CONSISTENT_WITH_FAKING


@dataclass(frozen=True)
class EveProtocol:
    game: TruthTable
    p: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("acceptance probability must lie in [0, 1]")


@dataclass(frozen=True, eq=False)
class TrialLog:
    trials: int
    accepted: int
    counts: np.ndarray
    empirical_box: Behavior
    empirical_eta: float
    empirical_game_value: float
    seed: int
    algorithm: str = RNG_ALGORITHM

    def to_dict(self):
        return {
            "trials": self.trials,
            "accepted": self.accepted,
            "empirical_eta": self.empirical_eta,
            "empirical_game_value": self.empirical_game_value,
            "seed": self.seed,
            "rng": self.algorithm,
            "counts": self.counts.astype(int).tolist(),
            "empirical_box": self.empirical_box.to_dict(),
        }


_CHUNK = 1 << 20


def _sample(box, proto, n, rng, counts):
    size = box.size
    cum = np.cumsum(box.table, axis=1)
    cum[:, -1] = 1.0
    accept = proto.game.accept
    done = 0
    won = kept = 0
    while done < n:
        m = min(_CHUNK, n - done)
        settings = rng.integers(0, size, m)
        r = rng.random(m)
        outcomes = (r[:, None] >= cum[settings]).sum(axis=1)
        outcomes = np.minimum(outcomes, size - 1)
        win = accept[settings, outcomes]
        keep = win | (rng.random(m) < proto.p)
        cell = settings[keep] * size + outcomes[keep]
        counts += np.bincount(cell, minlength=size * size).reshape(size, size)
        won += int(win[keep].sum())
        kept += int(keep.sum())
        done += m
    return won, kept


def simulate_trials(box, proto, n, seed=0, shards=1):
    """Run ``n`` i.i.d. trials under uniform inputs and Eve's acceptance rule.

    The generator is numpy's PCG64 seeded with ``seed``, so a log can be replayed
    exactly. With ``shards > 1`` the trials are split over independent streams
    spawned from ``seed``; the result is then equal in distribution, not bit for
    bit, to the single-stream run.
    """
    box.require_full()
    if n < 1:
        raise ValueError("need at least one trial")
    if box.parties != proto.game.parties:
        raise ValueError("game and box have different arity")
    size = box.size
    counts = np.zeros((size, size), dtype=np.int64)
    if shards <= 1:
        streams = [(np.random.Generator(np.random.PCG64(seed)), n)]
    else:
        children = np.random.SeedSequence(seed).spawn(shards)
        sizes = [n // shards + (k < n % shards) for k in range(shards)]
        streams = [(np.random.Generator(np.random.PCG64(c)), m) for c, m in zip(children, sizes)]
    won = kept = 0
    for rng, m in streams:
        w, k = _sample(box, proto, m, rng, counts)
        won += w
        kept += k
    per_setting = counts.sum(axis=1)
    ok = per_setting > 0
    table = np.zeros((size, size))
    table[ok] = counts[ok] / per_setting[ok, None]
    empirical = Behavior(box.parties, table, ok)
    value = won / kept if kept else float("nan")
    return TrialLog(n, kept, counts, empirical, kept / n, value, seed)
