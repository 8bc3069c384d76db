"""Scripted demonstrations: signaling created from white noise, and the
post-selected path on which no two pigeons share a hole."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .analysis import (
    NO_SIGNALING,
    ONE_WAY_AB,
    ONE_WAY_BA,
    TWO_WAY,
    chsh_value,
    ctc_mixture_formulas,
    fmt,
    signaling_profile,
)
from .behavior import TOL, canonical, marginal_pair, white_noise
from .boolfn import complement, lift, named
from .psd import ORTHOGONAL, condition, efficiency, f_box, orthogonality_class
from .published import from_printed, printed_mixture, published_box, to_printed


@dataclass
class Check:
    assertion: str
    passed: bool
    computed: object
    published: object
    anchor: str
    note: str = ""

    def to_dict(self):
        return {
            "assertion": self.assertion,
            "passed": bool(self.passed),
            "computed": _jsonable(self.computed),
            "published": _jsonable(self.published),
            "anchor": self.anchor,
            "note": self.note,
        }


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, tuple):
        return [_jsonable(v) for v in value]
    return value


@dataclass
class ScenarioReport:
    name: str
    steps: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def step(self, operation, inputs, outputs):
        self.steps.append({"operation": operation, "inputs": inputs, "outputs": outputs})

    def check(self, assertion, passed, computed, published, anchor, note=""):
        self.checks.append(Check(assertion, bool(passed), computed, published, anchor, note))

    def to_dict(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "steps": [{k: _jsonable(v) if k != "outputs" else _outputs(v) for k, v in s.items()} for s in self.steps],
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_markdown(self):
        lines = [f"# {self.name}", ""]
        for k, s in enumerate(self.steps, 1):
            lines.append(f"## {k}. {s['operation']}")
            lines.append("")
            lines.append("inputs: " + ", ".join(f"{a}={b}" for a, b in s["inputs"].items()))
            lines.append("")
            for key, value in s["outputs"].items():
                if key == "box":
                    lines += markdown_box(value)
                else:
                    lines.append(f"- {key}: {_md_value(value)}")
            lines.append("")
        lines += ["## checks", "", "| result | assertion | computed | published | anchor |", "|---|---|---|---|---|"]
        for c in self.checks:
            mark = "PASS" if c.passed else "FAIL"
            lines.append(
                f"| {mark} | {c.assertion} | {_md_value(c.computed)} | {_md_value(c.published)} | {c.anchor} |"
            )
        return "\n".join(lines) + "\n"


def _outputs(outputs):
    out = {}
    for k, v in outputs.items():
        if k == "box":
            out[k] = v.to_dict()
        else:
            out[k] = _jsonable(v)
    return out


def _md_value(value):
    if isinstance(value, float):
        return fmt(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_md_value(v) for v in value) + ")"
    return str(value)


def markdown_box(box):
    """Render a bipartite box in the printed layout: rows (y, v), columns (x, u)."""
    if box.parties != 2:
        return [f"box: {box.to_json()}", ""]
    rows = to_printed(box.table)
    lines = ["| y,v \\ x,u | 0,0 | 0,1 | 1,0 | 1,1 |", "|---|---|---|---|---|"]
    for r in range(4):
        y, v = r >> 1, r & 1
        cells = []
        for col in range(4):
            x = col >> 1
            cells.append("-" if not box.defined[2 * x + y] else fmt(rows[r, col]))
        lines.append(f"| {y},{v} | " + " | ".join(cells) + " |")
    return lines + [""]


def _max_dev(a, b):
    return float(np.abs(np.asarray(a) - np.asarray(b)).max())


# --------------------------------------------------------------------------


SIGNALING_FUNCTIONS = (
    ("sig1", "VIII", ONE_WAY_AB, (1.0, 0.0)),
    ("sig2", "IX", ONE_WAY_BA, (0.0, 1.0)),
    ("sig", "X", TWO_WAY, (1.0, 1.0)),
    ("chsh", "IV", NO_SIGNALING, (0.0, 0.0)),
    ("ctc", None, NO_SIGNALING, (0.0, 0.0)),
)


def run_signaling_demo(tol=TOL):
    report = ScenarioReport("signaling")
    wn = canonical("WN")
    for fn, table, expected_cls, expected_mi in SIGNALING_FUNCTIONS:
        f = named(fn)
        res = condition(wn, f)
        prof = signaling_profile(res.joint, tol=tol)
        report.step(
            f"post-select white noise on {fn}",
            {"box": "WN", "fn": f.hex},
            {"box": res.conditional, "efficiency": res.efficiency, "i_ab": prof.i_ab, "i_ba": prof.i_ba,
             "class": prof.cls},
        )
        if table is not None:
            dev = _max_dev(res.conditional.table, published_box(table).table)
            report.check(f"{fn} f-box equals the printed box", dev <= tol, dev, 0.0, f"Table {table}")
        mi_dev = max(abs(prof.i_ab - expected_mi[0]), abs(prof.i_ba - expected_mi[1]))
        report.check(
            f"{fn} on WN gives (I(A:B), I(B:A)) = {expected_mi}",
            mi_dev <= tol and prof.cls == expected_cls,
            (prof.i_ab, prof.i_ba),
            expected_mi,
            "Table VII",
        )
    sig = f_box(named("sig")).table
    deterministic = all(sig[2 * x + y, 2 * y + x] == 1.0 for x in (0, 1) for y in (0, 1))
    report.check("sig f-box answers u = y, v = x deterministically", deterministic, deterministic, True, "Table X")

    ctc = named("ctc")
    for label, base, table in (("BCHSH-MIX", "PR", "XI"), ("NLMIX", "NL", "XII")):
        for c in (0.0, 0.25, 0.5, 0.75, 1.0):
            box = canonical(label, c)
            res = condition(box, ctc)
            prof = signaling_profile(res.joint, tol=tol)
            forms = ctc_mixture_formulas(c, 0.5 if base == "PR" else 0.25)
            report.step(
                f"post-select {label}({c}) on ctc",
                {"box": f"{label.lower()}:{c}", "fn": ctc.hex},
                {"box": res.conditional, "efficiency": res.efficiency, "i_ab": prof.i_ab, "i_ba": prof.i_ba,
                 "class": prof.cls, "formula_literal": forms["literal"], "formula_entropy": forms["entropy"]},
            )
            if c in (0.25, 0.5, 0.75):
                want = from_printed(printed_mixture(table, c))
                dev = _max_dev(res.conditional.table, want)
                report.check(f"ctc on {label}({c}) matches the printed structure", dev <= tol, dev, 0.0, f"Table {table}")
            if base == "PR":
                expected = NO_SIGNALING if c == 0.0 else ONE_WAY_BA
                report.check(
                    f"ctc on {label}({c}) is {'no-signaling' if c == 0 else 'one-way'}",
                    prof.cls == expected,
                    prof.cls,
                    expected,
                    f"Table {table}",
                    note="" if c == 0 else "the captions call this direction Alice to Bob; the input that leaks is y",
                )
                if c in (0.0, 0.5, 1.0):
                    dev = abs(prof.i_ba - forms["entropy"])
                    report.check(
                        f"I(B:A) of ctc on {label}({c}) equals 1/2 (1 - h((1+c)/2))",
                        dev <= tol, prof.i_ba, forms["entropy"], "f_CTC mixture formula",
                        note=f"literal sign reading gives {fmt(forms['literal'])}",
                    )
    return report


def _cells(box, predicate):
    """Probability mass of cells satisfying ``predicate(x, y, u, v)`` per defined setting."""
    return {
        (s >> 1, s & 1): float(sum(box.table[s, o] for o in range(4) if predicate(s >> 1, s & 1, o >> 1, o & 1)))
        for s in range(4)
        if box.defined[s]
    }


def run_pigeonhole_demo(tol=TOL):
    report = ScenarioReport("pigeonhole")
    wn3 = white_noise(3)
    report.step("pre-select three uniform pigeons", {"box": "wn3"}, {"entry": float(wn3.table[0, 0])})

    wn = canonical("WN")
    for keep in ((0, 1), (0, 2), (1, 2)):
        pair = marginal_pair(wn3, keep)
        dev = _max_dev(pair.table, wn.table)
        report.check(f"pair {keep} of the uniform pigeons is white noise", dev <= tol, dev, 0.0, "pigeons equal up to renaming")
    report.step("reduce to a pair", {"keep": "A,B"}, {"box": marginal_pair(wn3, (0, 1))})

    final = named("final")
    out = condition(wn3, final)
    only = bool(out.conditional.defined[0]) and out.conditional.table[0, 0] == 1.0 and out.conditional.defined.sum() == 1
    report.step("post-select on f_final (three parties)", {"fn": "final"},
                {"efficiency": out.efficiency, "defined_settings": int(out.conditional.defined.sum())})
    report.check("f_final keeps only u=v=w=0 at x=y=z=0", only, float(out.conditional.table[0, 0]), 1.0, "f_final output")
    accepted = np.flatnonzero(final.accept.ravel())
    color_only = all((i >> 3) == 0 for i in accepted)
    report.check("f_final only accepts colour questions", color_only, [int(i) for i in accepted], [0],
                 "f_final selects pigeons by colour")

    f1, f2 = named("f1"), named("f2")
    final2 = named("final2")
    report.check("f2 is the complement of f1", complement(f1) == f2, f2.hex, complement(f1).hex, "f_2 = f_1 + 1")
    box1, box2 = f_box(f1), f_box(f2)
    report.step("f_1-box", {"fn": "u ^ v ^ y ^ 1"}, {"box": box1, "chsh": chsh_value(box1)})
    report.step("f_2-box", {"fn": "u ^ v ^ y"}, {"box": box2, "chsh": chsh_value(box2)})
    for box, table in ((box1, "XIII"), (box2, "XIV")):
        dev = _max_dev(box.table, published_box(table).table)
        report.check(f"f-box matches Table {table}", dev <= tol, dev, 0.0, f"Table {table}")

    p1 = efficiency(box1, final2)
    p2 = efficiency(box2, final2)
    report.check("(a) P_f1-box(f_final = 0) = 0", p1 == 0.0, p1, 0.0, "f_1, f_final orthogonal")
    orth1 = orthogonality_class(f1, final2)
    report.check("f1 and f_final are orthogonal", orth1.kind == ORTHOGONAL, orth1.kind, ORTHOGONAL, "f_1, f_final orthogonal")
    report.check("(b) P_f2-box(f_final = 0) > 0", p2 > 0.0, p2, "> 0", "f_2, f_final a valid path")
    orth2 = orthogonality_class(f2, final2)
    report.check("f2 and f_final are non-orthogonal", orth2.kind == "non-orthogonal", orth2.kind, "non-orthogonal",
                 "non-orthogonal equality case")
    same_hole = _cells(box2, lambda x, y, u, v: u == v)[(1, 1)]
    report.check("(c) in the f_2-box P(u = v | x = 1, y = 1) = 0", same_hole == 0.0, same_hole, 0.0,
                 "Table XIV")

    for box, table in ((box1, "XIII"), (box2, "XIV")):
        value = chsh_value(box)
        report.check(
            f"CHSH value of the Table {table} box is 3/4",
            abs(value - 0.75) <= tol,
            value,
            0.75,
            f"Table {table} caption",
            note="" if abs(value - 0.75) <= tol else f"P(f_B-CHSH = 1) = {fmt(1 - value)}",
        )

    # the same verdicts through the three-party box
    t1, t2 = condition(wn3, lift(f1)), condition(wn3, lift(f2))
    q1, q2 = efficiency(t1.conditional, final), efficiency(t2.conditional, final)
    report.step("three-party path", {"fn": "lifted f1, f2"}, {"p_final_after_f1": q1, "p_final_after_f2": q2})
    report.check("three-party f1 path annihilates f_final", q1 == 0.0, q1, 0.0, "f_1, f_final orthogonal")
    report.check("three-party f2 path keeps f_final possible", q2 > 0.0, q2, "> 0", "f_2, f_final a valid path")
    return report


DEMOS = {"signaling": run_signaling_demo, "pigeonhole": run_pigeonhole_demo}
