"""Command-line front end.

Exit status: 0 on success (valid, accepted), 1 when a countermodel is found
or a proof is rejected, 2 on bad input.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import syntax as S
from .errors import FormulaSyntaxError, GradedPrefError
from .lattice import make_godel, make_lukasiewicz
from .model import GeneralModel, PreferenceModel, _transitivity_witness
from .modelio import dumps, model_from_document
from .relation import FuzzyRelation, meet_transitive_closure
from .search import SearchBounds, check_many

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _out(text=""):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def parse_chain(text: str):
    """``luk:N`` / ``lukasiewicz:N`` or ``godel:N``."""
    name, _, n = text.partition(":")
    try:
        size = int(n)
    except ValueError:
        raise InputError(f"bad chain {text!r}: expected e.g. luk:3 or godel:4") from None
    name = name.lower()
    if name in ("luk", "lukasiewicz", "l"):
        return make_lukasiewicz(size)
    if name in ("godel", "g", "goedel"):
        return make_godel(size)
    raise InputError(f"unknown chain family {name!r}")


def _parse(text, chain):
    try:
        return S.parse(text, chain)
    except FormulaSyntaxError as e:
        if e.position is not None:
            raise InputError(f"{e}\n  {text}\n  {' ' * e.position}^") from None
        raise


def _bounds(args) -> SearchBounds:
    chain = parse_chain(args.chain)
    vars_ = tuple(v for v in args.vars.split(",") if v) if args.vars else None
    return SearchBounds(chain=chain, max_worlds=args.max_worlds, variables=vars_,
                        random_samples=args.samples, seed=args.seed, budget=args.budget,
                        enumerate_exhaustively=not args.no_exhaustive)


def _add_bounds(p):
    p.add_argument("--chain", default="luk:3", help="truth-value chain, e.g. luk:3 or godel:4")
    p.add_argument("--max-worlds", type=int, default=3)
    p.add_argument("--vars", default=None, help="comma-separated variables (default: those in the formulas)")
    p.add_argument("--samples", type=int, default=0, help="extra random models")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, default=10**9)
    p.add_argument("--no-exhaustive", action="store_true", help="only use random samples")


def _load_model(path, check=True):
    return model_from_document(Path(path), check=check)


# -- commands --------------------------------------------------------------

def cmd_eval(args):
    m = _load_model(args.model)
    f = _parse(args.formula, m.chain)
    vals = m.eval_labels(f)
    if args.world is not None:
        if args.world not in m.worlds:
            raise InputError(f"unknown world {args.world!r}")
        _out(vals[m.worlds.index(args.world)])
        return EXIT_OK
    width = max([len("world")] + [len(w) for w in m.worlds])
    _out(f"{'world':<{width}}  {S.to_text(f)}")
    for w, v in zip(m.worlds, vals):
        _out(f"{w:<{width}}  {v}")
    return EXIT_OK


def cmd_validate(args):
    m = _load_model(args.model, check=False)
    if not hasattr(m, "relation"):
        problems = m.violations()
        for p in problems:
            _out(f"invalid: {p}")
        _out("layered model is valid" if not problems else f"{len(problems)} problem(s)")
        return EXIT_OK if not problems else EXIT_FAIL
    c, W = m.chain, m.worlds
    P = np.array(m.P)
    repaired = []
    if args.repair_reflexive and not np.all(np.diag(P) == c.top):
        np.fill_diagonal(P, c.top)
        repaired.append("diagonal set to 1")
    if args.repair_closure:
        Q = meet_transitive_closure(FuzzyRelation(W, P, c.top)).matrix
        if not np.array_equal(Q, P):
            repaired.append(f"meet-transitive closure raised {int((Q != P).sum())} entries")
        P = np.array(Q)
    problems = []
    if isinstance(m, GeneralModel):
        _out("general model: no preorder conditions to check")
    else:
        bad = np.flatnonzero(np.diag(P) != c.top)
        if len(bad):
            problems.append(f"not reflexive at {W[bad[0]]}: P({W[bad[0]]},{W[bad[0]]}) = {c.labels[P[bad[0], bad[0]]]}")
        wit = _transitivity_witness(P)
        if wit:
            u, v, w = wit
            lab = c.labels
            problems.append(
                f"not meet-transitive: P({W[u]},{W[v]}) = {lab[P[u, v]]}, P({W[v]},{W[w]}) = {lab[P[v, w]]}"
                f" but P({W[u]},{W[w]}) = {lab[P[u, w]]}")
    for r in repaired:
        _out(f"repaired: {r}")
    for p in problems:
        _out(f"invalid: {p}")
    if problems:
        return EXIT_FAIL
    _out("model is valid")
    if repaired:
        fixed = type(m)(c, W, P, m.valuation_labels()) if isinstance(m, PreferenceModel) else m
        text = dumps(fixed)
        if args.output:
            Path(args.output).write_text(text)
            _out(f"repaired model written to {args.output}")
        else:
            _out(text)
    return EXIT_OK


def _matrix_lines(bits, worlds, title):
    width = max(len(w) for w in worlds)
    lines = [title, " " * width + " " + " ".join(f"{w:>{width}}" for w in worlds)]
    for w, row in zip(worlds, bits):
        lines.append(f"{w:<{width}} " + " ".join(f"{int(x):>{width}}" for x in row))
    return lines


def cmd_cuts(args):
    m = _load_model(args.model)
    c = m.chain
    b = c.index(args.level)
    P = m.P
    weak = P >= b
    strict_cut = weak & (P.T < b)
    Ps = np.where(P > P.T, P, 0)
    cut_strict = Ps >= b if b > 0 else np.ones_like(weak)
    blocks = [
        _matrix_lines(weak, m.worlds, f"Q_{args.level}"),
        _matrix_lines(strict_cut, m.worlds, f"(P_{args.level})^<"),
        _matrix_lines(cut_strict, m.worlds, f"(P^<)_{args.level}"),
    ]
    widths = [max(len(s) for s in blk) for blk in blocks]
    for row in zip(*blocks):
        _out("    ".join(s.ljust(wd) for s, wd in zip(row, widths)).rstrip())
    if b == 0:
        _out("note: the strict cuts at level 0 are degenerate (every pair qualifies for (P^<)_0)")
    return EXIT_OK


def _report_verdict(v, args, chain):
    if v.valid:
        _out(f"{v.status}: {S.to_text(v.formula)}")
        return EXIT_OK
    _out(f"{v.status}: {S.to_text(v.formula)} fails at world {v.world}")
    text = dumps(v.countermodel, v.world)
    if args.countermodel:
        Path(args.countermodel).write_text(text)
        _out(f"countermodel written to {args.countermodel}")
    else:
        _out(text)
    return EXIT_FAIL


def _class_bounds(args):
    bounds = _bounds(args)
    if args.model_class:
        bounds = bounds.with_(model_class=args.model_class)
    return bounds


def cmd_validity(args):
    bounds = _class_bounds(args)
    f = _parse(args.formula, bounds.chain)
    return _report_verdict(check_many([f], bounds)[0], args, bounds.chain)


def cmd_consequence(args):
    bounds = _class_bounds(args)
    prem = [_parse(p, bounds.chain) for p in args.premise]
    f = _parse(args.formula, bounds.chain)
    return _report_verdict(check_many([f], bounds, premises=prem)[0], args, bounds.chain)


def cmd_bulldoze(args):
    from .transform import LayeredModel, bulldoze, check_strict_part_condition, derive_layered

    m = _load_model(args.model)
    lm = m if isinstance(m, LayeredModel) else derive_layered(m)
    out, report = bulldoze(lm, args.K)
    text = dumps(out)
    _out(report.to_text().rstrip())
    problems = out.violations()
    sp = check_strict_part_condition(out)
    _out(f"output: {len(out.worlds)} worlds, {len(problems)} layer violations, "
         f"strict-part condition {'holds' if sp.holds else 'fails'}")
    for v in problems:
        _out(f"  {v}")
    if args.output:
        Path(args.output).write_text(text)
        _out(f"bulldozed model written to {args.output}")
    else:
        _out(text)
    return EXIT_OK


def cmd_proof(args):
    from .proofs import check_proof, parse_proof

    chain = parse_chain(args.chain)
    try:
        text = Path(args.file).read_text()
    except OSError as e:
        raise InputError(f"cannot read {args.file}: {e.strerror}") from None
    proof = parse_proof(text, chain)
    res = check_proof(proof, args.system, chain)
    if res.accepted:
        _out(f"accepted: {len(proof.lines)} lines in system {args.system}")
        if proof.lines:
            _out(f"theorem: {S.to_text(proof.lines[-1].formula)}")
        return EXIT_OK
    _out(f"rejected at line {res.line}: {res.reason}")
    return EXIT_FAIL


def cmd_axioms(args):
    from .search import axiom_soundness_suite

    rep = axiom_soundness_suite(args.system, _bounds(args))
    _out(rep.summary())
    return EXIT_OK if rep.all_valid else EXIT_FAIL


def cmd_pref(args):
    from .prefs import PrefKind, build_pref

    m = _load_model(args.model)
    ctx = _parse(args.context, m.chain) if args.context else None
    kind = PrefKind(args.kind.upper(), args.strict, ctx)
    f = build_pref(kind, _parse(args.phi, m.chain), _parse(args.psi, m.chain))
    vals = m.eval_labels(f)
    _out(f"{S.to_text(f)} = {vals[0]}")
    return EXIT_OK


def cmd_examples(args):
    from .reproduce import run_examples

    rows = run_examples()
    bad = 0
    for r in rows:
        if r.ok:
            _out(f"ok    {r.key} = {r.actual}")
        else:
            bad += 1
            _out(f"DIFF  {r.key}\n  - expected {r.expected}\n  + computed {r.actual}")
    _out(f"{len(rows) - bad}/{len(rows)} golden values reproduced")
    return EXIT_OK if not bad else EXIT_FAIL


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gradedpref", description="Graded modal preference logic toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a formula on a model")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--world")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("validate", help="check (and optionally repair) a model")
    p.add_argument("model")
    p.add_argument("--repair-closure", action="store_true", help="replace P by its meet-transitive closure")
    p.add_argument("--repair-reflexive", action="store_true", help="force the diagonal to 1")
    p.add_argument("--output", "-o")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("cuts", help="print the crisp cuts of a model at one level")
    p.add_argument("model")
    p.add_argument("level")
    p.set_defaults(fn=cmd_cuts)

    for name, fn in (("validity", cmd_validity), ("consequence", cmd_consequence)):
        p = sub.add_parser(name, help=f"bounded {name} check")
        if name == "consequence":
            p.add_argument("--premise", "-p", action="append", default=[], help="premise formula (repeatable)")
        p.add_argument("formula")
        _add_bounds(p)
        p.add_argument("--class", dest="model_class", choices=("preference", "general", "crisp"))
        p.add_argument("--countermodel", "-o", help="write the countermodel here")
        p.set_defaults(fn=fn)

    p = sub.add_parser("bulldoze", help="unravel strict clusters of a layered model")
    p.add_argument("model")
    p.add_argument("K", type=int)
    p.add_argument("--output", "-o")
    p.set_defaults(fn=cmd_bulldoze)

    p = sub.add_parser("proof", help="check a Hilbert-style proof")
    p.add_argument("file")
    p.add_argument("--system", default="P")
    p.add_argument("--chain", default="luk:3")
    p.set_defaults(fn=cmd_proof)

    p = sub.add_parser("axioms", help="soundness suite for every axiom schema of a system")
    p.add_argument("--system", default="P")
    _add_bounds(p)
    p.set_defaults(fn=cmd_axioms)

    p = sub.add_parser("pref", help="evaluate a preference between two formulas")
    p.add_argument("model")
    p.add_argument("kind", help="ee or ae")
    p.add_argument("phi")
    p.add_argument("psi")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--context")
    p.set_defaults(fn=cmd_pref)

    p = sub.add_parser("examples", help="recompute the worked examples and diff against the golden table")
    p.set_defaults(fn=cmd_examples)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (InputError, GradedPrefError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT
    except ValueError as e:
        # e.g. an unknown system name
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
