"""Command-line entry point: ``postselect <command> [options]``.

Exit status is 0 on success, 1 when a table or demo disagrees with the
published values beyond tolerance, and 2 on usage errors (bad flags, unreadable
files, malformed boxes, functions or formulas).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import adversary, analysis, postrp, scenarios
from .behavior import TOL, load_box, to_joint
from .boolfn import as_function
from .errors import NoPostSelectionNeeded, PostSelectError
from .psd import condition

DEFAULT_SEED = 0

FORMATS = ("json", "csv", "md")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", type=Path, default=None, help="write here instead of stdout")
    p.add_argument("--format", choices=FORMATS, default=None, help="defaults from --out suffix, else per command")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"RNG seed (default {DEFAULT_SEED})")
    p.add_argument("--tol", type=float, default=TOL, help=f"absolute comparison tolerance (default {TOL:g})")
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="postselect", description="Post-selection on two- and three-party boxes.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    box = sub.add_parser("box", help="canonical boxes").add_subparsers(dest="action", required=True, parser_class=_Parser)
    show = box.add_parser("show", parents=[common], help="print a box")
    show.add_argument("--name", required=True, help="wn, lv, singlet, pr, nl, bchsh-mix:<c>, nlmix:<c>, wn3 or a JSON file")

    psd = sub.add_parser("psd", help="post-selection devices").add_subparsers(dest="action", required=True, parser_class=_Parser)
    apply_ = psd.add_parser("apply", parents=[common], help="condition a box on f = 0")
    apply_.add_argument("--box", required=True)
    apply_.add_argument("--fn", required=True, help="registered name, 0x hex table or expression")
    mode = apply_.add_mutually_exclusive_group()
    mode.add_argument("--per-setting", dest="semantics", action="store_const", const="per-setting")
    mode.add_argument("--joint", dest="semantics", action="store_const", const="joint")

    mi = sub.add_parser("mi", parents=[common], help="directed mutual information of a (post-selected) box")
    mi.add_argument("--box", required=True)
    mi.add_argument("--fn", default=None, help="post-select first on this function")
    mi.add_argument("--a", default=None, help="variable group, e.g. x")
    mi.add_argument("--b", default=None, help="variable group, e.g. yv")

    game = sub.add_parser("game", parents=[common], help="game value of a box")
    game.add_argument("--box", required=True)
    game.add_argument("--game", default="chsh", help="winning iff this function is 0 (default chsh)")

    classify = sub.add_parser("classify", parents=[common], help="classify one function's f-box")
    classify.add_argument("--fn", required=True)

    sub.add_parser("sweep", parents=[common], help="classify all nondegenerate bipartite functions")

    table = sub.add_parser("table", parents=[common], help="recompute a published comparison table")
    table.add_argument("--which", required=True, choices=("7", "15", "table7", "table15"))

    eve = sub.add_parser("eve", help="trial-dropping adversary").add_subparsers(dest="action", required=True, parser_class=_Parser)
    analyze = eve.add_parser("analyze", parents=[common], help="faking bound between two game values")
    analyze.add_argument("--in", dest="in_value", required=True, help="resource game value or box")
    analyze.add_argument("--target", required=True, help="target game value or box")
    analyze.add_argument("--game", default="chsh")
    simulate = eve.add_parser("simulate", parents=[common], help="simulate Eve's trials")
    simulate.add_argument("--box", required=True)
    simulate.add_argument("--fn", default="chsh", help="game function; trials with f = 0 are wins")
    simulate.add_argument("--p", type=float, default=0.0, help="acceptance probability of lost trials")
    simulate.add_argument("--trials", type=int, default=1_000_000)
    simulate.add_argument("--shards", type=int, default=1)

    rp = sub.add_parser("postrp", help="post-selected 3SAT machine").add_subparsers(dest="action", required=True, parser_class=_Parser)
    solve = rp.add_parser("solve", parents=[common], help="decide a DIMACS CNF formula")
    solve.add_argument("cnf", type=Path)
    solve.add_argument("--mode", choices=("exact", "sample"), default="exact")
    solve.add_argument("--alpha", default="auto", help="auto (2**-n) or a float in (0, 2**-n]")
    solve.add_argument("--runs", type=int, default=100_000)
    solve.add_argument("--width", choices=(postrp.STRICT, postrp.LENIENT, postrp.ANY_WIDTH), default=postrp.STRICT,
                       help="clause width check: exactly 3, at most 3, or any")

    demo = sub.add_parser("demo", parents=[common], help="scripted demonstrations")
    demo.add_argument("name", choices=tuple(scenarios.DEMOS))
    return parser


# --------------------------------------------------------------------------


def _fmt_for(args, default, allowed):
    fmt = args.format
    if fmt is None and args.out is not None:
        suffix = args.out.suffix.lower().lstrip(".")
        fmt = {"json": "json", "csv": "csv", "md": "md", "markdown": "md"}.get(suffix)
    fmt = fmt or default
    if fmt not in allowed:
        raise UsageError(f"{args.command} does not support --format {fmt}; choose from {', '.join(allowed)}")
    return fmt


def _dump(payload):
    return json.dumps(payload, indent=2) + "\n"


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([analysis.fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _kv_csv(payload):
    return _csv(("key", "value"), [(k, v) for k, v in payload.items() if not isinstance(v, (dict, list))])


def _kv_md(payload):
    lines = ["| key | value |", "|---|---|"]
    for k, v in payload.items():
        if isinstance(v, (dict, list)):
            continue
        lines.append(f"| {k} | {analysis.fmt(v) if isinstance(v, float) else v} |")
    return "\n".join(lines) + "\n"


def _box_csv(box):
    rows = []
    for s in range(box.size):
        for o in range(box.size):
            value = float(box.table[s, o]) if box.defined[s] else ""
            rows.append((s, o, value))
    return _csv(("setting", "outcome", "p"), rows)


def _box_md(box):
    return "\n".join(scenarios.markdown_box(box))


def _box(spec):
    try:
        return load_box(spec)
    except OSError as exc:
        raise UsageError(f"cannot read box {spec!r}: {exc.strerror or exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"bad box {spec!r}: {exc}") from exc


def _value_or_box(text, game):
    try:
        return float(text)
    except ValueError:
        pass
    box = _box(text)
    return analysis.game_value(box, as_function(game, box.parties))


# each handler returns (text, status)


def cmd_box_show(args):
    box = _box(args.name)
    fmt = _fmt_for(args, "json", FORMATS)
    text = {"json": lambda: _dump(box.to_dict()), "csv": lambda: _box_csv(box), "md": lambda: _box_md(box)}[fmt]()
    return text, 0


def cmd_psd_apply(args):
    box = _box(args.box)
    f = as_function(args.fn, box.parties)
    res = condition(box, f)
    fmt = _fmt_for(args, "json", FORMATS)
    if fmt == "json":
        return _dump(res.to_dict()), 0
    if args.semantics == "joint":
        rows = [(s, o, float(res.joint.mass[s, o])) for s in range(box.size) for o in range(box.size)]
        return (_csv(("setting", "outcome", "mass"), rows) if fmt == "csv" else _joint_md(res)), 0
    body = _box_csv(res.conditional) if fmt == "csv" else _box_md(res.conditional)
    return body, 0


def _joint_md(res):
    size = res.joint.mass.shape[0]
    lines = ["| setting | " + " | ".join(f"o={o}" for o in range(size)) + " |", "|---|" + "---|" * size]
    for s in range(size):
        lines.append(f"| {s} | " + " | ".join(analysis.fmt(float(m)) for m in res.joint.mass[s]) + " |")
    return "\n".join(lines) + "\n"


def cmd_mi(args):
    box = _box(args.box)
    payload = {"box": args.box}
    if args.fn is not None:
        f = as_function(args.fn, box.parties)
        res = condition(box, f)
        obj, payload["fn"], payload["efficiency"] = res.joint, f.hex, res.efficiency
    else:
        obj = box
    if (args.a is None) != (args.b is None):
        raise UsageError("--a and --b go together")
    if args.a is not None:
        joint = obj if args.fn is not None else to_joint(box)
        payload.update({"a": args.a, "b": args.b, "mi": analysis.mutual_information(joint, args.a, args.b)})
    else:
        if box.parties != 2:
            raise UsageError("directed signaling needs a bipartite box; pass --a/--b for other groups")
        prof = analysis.signaling_profile(obj, tol=args.tol)
        payload.update(prof.to_dict())
    return _render_kv(args, payload), 0


def _render_kv(args, payload):
    fmt = _fmt_for(args, "json", FORMATS)
    return {"json": _dump, "csv": _kv_csv, "md": _kv_md}[fmt](payload)


def cmd_game(args):
    box = _box(args.box)
    g = as_function(args.game, box.parties)
    payload = {"box": args.box, "game": g.hex, "value": analysis.game_value(box, g)}
    if box.parties == 2 and box.is_full:
        payload["locality"] = analysis.locality_class(box, args.tol)
    return _render_kv(args, payload), 0


def cmd_classify(args):
    f = as_function(args.fn, 2)
    return _render_kv(args, analysis.classify(f, args.tol).to_dict()), 0


def cmd_sweep(args):
    report = analysis.sweep_classify(tol=args.tol)
    fmt = _fmt_for(args, "csv", ("csv", "json"))
    if fmt == "csv":
        return report.to_csv(), 0
    return _dump(report.summary()), 0


def cmd_table(args):
    report = analysis.table_report(args.which, tol=args.tol)
    fmt = _fmt_for(args, "json", FORMATS)
    text = {"json": lambda: _dump(report.to_dict()), "csv": report.to_csv, "md": report.to_markdown}[fmt]()
    for r in report.mismatches:
        print(f"mismatch: {r['fn']} on {r['box']}", file=sys.stderr)
    return text, 0 if report.ok else 1


def cmd_eve_analyze(args):
    in_value = _value_or_box(args.in_value, args.game)
    target = _value_or_box(args.target, args.game)
    payload = {"in_value": in_value, "target_value": target}
    try:
        payload["eta_max"] = adversary.max_faking_efficiency(in_value, target)
        payload["p_required"] = adversary.required_acceptance(in_value, target)
    except NoPostSelectionNeeded as exc:
        payload.update({"eta_max": None, "p_required": None, "note": str(exc)})
    return _render_kv(args, payload), 0


def cmd_eve_simulate(args):
    box = _box(args.box)
    proto = adversary.EveProtocol(as_function(args.fn, box.parties), args.p)
    log = adversary.simulate_trials(box, proto, args.trials, seed=args.seed, shards=args.shards)
    payload = log.to_dict()
    payload["fn"] = proto.game.hex
    payload["p"] = proto.p
    fmt = _fmt_for(args, "json", FORMATS)
    if fmt == "json":
        return _dump(payload), 0
    return (_kv_csv if fmt == "csv" else _kv_md)(payload), 0


def cmd_postrp_solve(args):
    try:
        text = args.cnf.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.cnf}: {exc.strerror or exc}") from exc
    phi = postrp.parse_dimacs(text, args.width)
    alpha = None if args.alpha == "auto" else float(args.alpha)
    payload = {"n": phi.num_vars, "m": phi.num_clauses}
    if args.mode == "exact":
        out = postrp.exact_conditional(phi, alpha)
        payload.update({
            "s": out.s, "alpha": out.alpha, "pr_q1_given_p1": out.pr_q1_given_p1,
            "decision": postrp.decide(phi, "exact", alpha), "expected_runs": out.expected_runs,
        })
    else:
        sample = postrp.run_machine(phi, alpha, args.seed, args.runs)
        decision = postrp.decide(phi, "sample", alpha, args.seed, args.runs)
        payload.update({
            "alpha": postrp.default_alpha(phi.num_vars) if alpha is None else alpha,
            "pr_q1_given_p1": sample.estimate if sample.accepted else None,
            "decision": decision,
            "expected_runs": 1.0 / sample.pr_p1 if sample.accepted else None,
            "runs": sample.runs, "accepted": sample.accepted, "seed": sample.seed,
        })
    return _render_kv(args, payload), 0


def cmd_demo(args):
    report = scenarios.DEMOS[args.name](tol=args.tol)
    fmt = _fmt_for(args, "json", ("json", "md"))
    text = report.to_json() + "\n" if fmt == "json" else report.to_markdown()
    for c in report.checks:
        if not c.passed:
            print(f"check failed: {c.assertion} (computed {c.computed}, published {c.published})", file=sys.stderr)
    return text, 0 if report.passed else 1


HANDLERS = {
    ("box", "show"): cmd_box_show,
    ("psd", "apply"): cmd_psd_apply,
    ("mi", None): cmd_mi,
    ("game", None): cmd_game,
    ("classify", None): cmd_classify,
    ("sweep", None): cmd_sweep,
    ("table", None): cmd_table,
    ("eve", "analyze"): cmd_eve_analyze,
    ("eve", "simulate"): cmd_eve_simulate,
    ("postrp", "solve"): cmd_postrp_solve,
    ("demo", None): cmd_demo,
}


def dispatch(args):
    """Run a parsed command; returns (text, exit status)."""
    handler = HANDLERS[(args.command, getattr(args, "action", None))]
    try:
        return handler(args)
    except UsageError:
        raise
    except (PostSelectError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text, status = dispatch(args)
    except UsageError as exc:
        print(f"postselect: error: {exc}", file=sys.stderr)
        return 2
    if args.out is not None:
        try:
            args.out.write_text(text, encoding="utf-8")
        except OSError as exc:
            print(f"postselect: error: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
