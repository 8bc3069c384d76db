"""3SAT with a post-selected randomized machine.

The machine guesses an assignment uniformly, sets ``Q = 1`` when it satisfies the
formula, and raises the flag ``P`` with probability ``alpha`` (``Q = 0``) or
``2**n * alpha`` (``Q = 1``). Conditioned on the flag, ``Q = 1`` has probability
``2**n s / (2**n + (2**n - 1) s)`` for ``s`` satisfying assignments: zero for
unsatisfiable formulas and above one half otherwise.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DimacsError

MAX_EXACT_VARS = 24

STRICT = "strict"
LENIENT = "lenient"
ANY_WIDTH = "any"

SAT = "SAT"
UNSAT = "UNSAT"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple

    def __post_init__(self):
        clauses = tuple(tuple(int(l) for l in c) for c in self.clauses)
        if self.num_vars < 0:
            raise DimacsError("variable count must be nonnegative")
        for k, clause in enumerate(clauses):
            if not clause:
                raise DimacsError(f"clause {k + 1} is empty")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise DimacsError(f"literal {lit} in clause {k + 1} is out of range 1..{self.num_vars}")
        object.__setattr__(self, "clauses", clauses)

    @property
    def num_clauses(self):
        return len(self.clauses)

    @property
    def literal_matrix(self):
        """Clauses as a zero-padded ``(m, width)`` int array of signed literals."""
        width = max((len(c) for c in self.clauses), default=1)
        out = np.zeros((len(self.clauses), width), dtype=np.int64)
        for k, c in enumerate(self.clauses):
            out[k, : len(c)] = c
        return out

    def satisfied_by(self, assignment):
        """``assignment`` is an int whose bit ``k`` is the value of variable ``k + 1``."""
        return bool(kernels.satisfies_batch(self.literal_matrix, np.array([assignment]), use_numba=False)[0])

    def to_dimacs(self):
        lines = [f"p cnf {self.num_vars} {self.num_clauses}"]
        lines += [" ".join(str(l) for l in c) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text, mode=STRICT):
    """Read DIMACS CNF. ``mode`` bounds clause width: exactly 3, at most 3, or unbounded."""
    if mode not in (STRICT, LENIENT, ANY_WIDTH):
        raise ValueError(f"unknown mode {mode!r}")
    header = None
    clauses = []
    current = []
    for lineno, raw in enumerate(text.replace("\r\n", "\n").split("\n"), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise DimacsError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: expected 'p cnf <vars> <clauses>'")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: non-integer header") from exc
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from exc
            if lit == 0:
                if not current:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(tuple(current))
                current = []
            else:
                if abs(lit) > header[0]:
                    raise DimacsError(f"line {lineno}: variable {abs(lit)} out of range 1..{header[0]}")
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        clauses.append(tuple(current))
    n, m = header
    if len(clauses) != m:
        raise DimacsError(f"header declares {m} clauses, found {len(clauses)}")
    for k, c in enumerate(clauses):
        if mode == STRICT and len(c) != 3:
            raise DimacsError(f"clause {k + 1} has {len(c)} literals; strict mode needs 3")
        if mode == LENIENT and len(c) > 3:
            raise DimacsError(f"clause {k + 1} has {len(c)} literals; at most 3 allowed")
    return CnfFormula(n, tuple(clauses))


def count_models(phi, use_numba=None):
    """Exact number of satisfying assignments, by enumeration."""
    if phi.num_vars > MAX_EXACT_VARS:
        raise ValueError(f"exact counting is capped at {MAX_EXACT_VARS} variables, got {phi.num_vars}")
    if not phi.clauses:
        return 1 << phi.num_vars
    return kernels.count_assignments(phi.literal_matrix, phi.num_vars, use_numba=use_numba)


def default_alpha(n):
    return 2.0 ** -n


def _check_alpha(n, alpha):
    if alpha is None:
        return default_alpha(n)
    if not 0.0 < alpha <= 2.0 ** -n:
        raise ValueError(f"alpha must lie in (0, 2**-{n}]")
    return float(alpha)


@dataclass(frozen=True)
class MachineOutcome:
    n: int
    s: int
    alpha: float
    pr_p1: float
    pr_q1_given_p1: float
    expected_runs: float

    def to_dict(self):
        return {
            "n": self.n, "s": self.s, "alpha": self.alpha, "pr_p1": self.pr_p1,
            "pr_q1_given_p1": self.pr_q1_given_p1, "expected_runs": self.expected_runs,
        }


def machine_outcome(n, s, alpha=None):
    """Flag and conditional probabilities for ``s`` models out of ``2**n``."""
    alpha = _check_alpha(n, alpha)
    space = 2.0 ** n
    pr_p1 = ((space - s) * alpha + s * space * alpha) / space
    # P(Q=1, P=1) = (s / 2**n) * 2**n * alpha
    joint = s * alpha
    return MachineOutcome(n, s, alpha, pr_p1, joint / pr_p1, 1.0 / pr_p1)


def exact_conditional(phi, alpha=None, use_numba=None):
    return machine_outcome(phi.num_vars, count_models(phi, use_numba=use_numba), alpha)


def expected_runs(phi, alpha=None):
    return exact_conditional(phi, alpha).expected_runs


@dataclass(frozen=True)
class MachineSample:
    runs: int
    accepted: int
    accepted_q1: int
    seed: int

    @property
    def pr_p1(self):
        return self.accepted / self.runs

    @property
    def estimate(self):
        return self.accepted_q1 / self.accepted if self.accepted else float("nan")

    def sigma(self, p=None):
        """Binomial standard error of the conditional estimate (at ``p`` if given)."""
        if not self.accepted:
            return float("inf")
        p = self.estimate if p is None else p
        return math.sqrt(p * (1 - p) / self.accepted)

    def to_dict(self):
        return {
            "runs": self.runs, "accepted": self.accepted, "accepted_q1": self.accepted_q1,
            "pr_p1": self.pr_p1, "pr_q1_given_p1": self.estimate, "seed": self.seed,
        }


_CHUNK = 1 << 18


def run_machine(phi, alpha=None, seed=0, runs=100_000, use_numba=None):
    """Sample ``runs`` executions of the machine and count flagged runs."""
    alpha = _check_alpha(phi.num_vars, alpha)
    if runs < 1:
        raise ValueError("need at least one run")
    if phi.num_vars > 62:
        raise ValueError("sampling supports at most 62 variables")
    rng = np.random.Generator(np.random.PCG64(seed))
    lits = phi.literal_matrix
    boost = min(alpha * 2.0 ** phi.num_vars, 1.0)
    accepted = accepted_q1 = 0
    done = 0
    while done < runs:
        m = min(_CHUNK, runs - done)
        sigma = rng.integers(0, 1 << phi.num_vars, m, dtype=np.int64)
        q = kernels.satisfies_batch(lits, sigma, use_numba=use_numba) if phi.clauses else np.ones(m, bool)
        flag = rng.random(m) < np.where(q, boost, alpha)
        accepted += int(flag.sum())
        accepted_q1 += int((flag & q).sum())
        done += m
    return MachineSample(runs, accepted, accepted_q1, seed)


def decide(phi, mode="exact", alpha=None, seed=0, runs=100_000, z=4.0):
    """SAT/UNSAT through the post-selected conditional.

    In sample mode a flagged run with ``Q = 1`` is itself a satisfying assignment,
    and the estimate must stay within ``z`` standard errors of the ``>= 1/2``
    guarantee; an all-zero estimate counts as UNSAT only once enough flagged runs
    make a true conditional of 1/2 implausible. Anything else is INCONCLUSIVE.
    """
    if mode == "exact":
        out = exact_conditional(phi, alpha)
        return SAT if out.pr_q1_given_p1 > 0.5 else UNSAT
    if mode != "sample":
        raise ValueError(f"unknown mode {mode!r}")
    sample = run_machine(phi, alpha, seed, runs)
    if not sample.accepted:
        return INCONCLUSIVE
    margin = z * sample.sigma(0.5)
    if sample.accepted_q1 == 0:
        return UNSAT if margin < 0.5 else INCONCLUSIVE
    return SAT if sample.estimate + margin >= 0.5 else INCONCLUSIVE


def counting_formula(n, s):
    """A CNF over ``n`` variables with exactly ``s`` models: the assignments below ``s``.

    Assignments are read as ``n``-bit numbers with variable ``n`` most significant.
    Clause width grows with ``n``, so parse/serialize these in ``any`` mode.
    """
    if not 0 <= s <= 1 << n:
        raise ValueError("s out of range")
    if s == 1 << n:
        return CnfFormula(n, ())
    if s == 0:
        if n == 0:
            raise ValueError("no variables to build a contradiction from")
        return CnfFormula(n, ((1,), (-1,)))
    t = s - 1  # models are exactly a <= t
    clauses = []
    for i in range(n):
        if (t >> i) & 1:
            continue
        clause = [-(i + 1)] + [-(j + 1) for j in range(i + 1, n) if (t >> j) & 1]
        clauses.append(tuple(clause))
    return CnfFormula(n, tuple(clauses))
