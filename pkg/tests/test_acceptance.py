"""Acceptance suite: one test per criterion, each printing a single pass/fail line.

Run on its own with ``pytest tests/test_acceptance.py -v`` or
``python3 tests/test_acceptance.py``.
"""
import itertools
import time
from pathlib import Path

import numpy as np
import pytest

from gradedpref import make_godel, make_lukasiewicz
from gradedpref import syntax as S
from gradedpref.lattice import double_residual
from gradedpref.prefs import lemma71_suite
from gradedpref.proofs import check_proof, instantiate, parse_proof, schema_catalog
from gradedpref.relation import (
    FuzzyRelation, cut, cut_of_strict, is_meet_transitive, reconstruct_from_cuts,
    strict_of_cut, strict_part,
)
from gradedpref.reproduce import run_examples
from gradedpref.search import (
    SearchBounds, axiom_soundness_suite, check_many, default_pool, formula_pool,
    is_valid_bounded, relation_matrices,
)
from gradedpref.transform import bulldoze, check_strict_part_condition

import conftest
from batch import count_mismatches, exhaustive_family, random_families
from models import clustered_model

DATA = Path(__file__).resolve().parent.parent / "src" / "gradedpref" / "data"


def record(n, title, ok, detail, seconds):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {title}: {detail}"
    conftest.ACCEPTANCE_LINES[n] = line
    print(line)


# -- 1 ---------------------------------------------------------------------

def test_criterion_1_golden_tables():
    t = time.perf_counter()
    rows = run_examples()
    secs = time.perf_counter() - t
    bad = [r for r in rows if not r.ok]
    detail = f"{len(rows) - len(bad)}/{len(rows)} values exact"
    if bad:
        detail += "; differs: " + "; ".join(f"{r.key} printed {r.expected} computed {r.actual}" for r in bad)
    ok = not bad and secs < 1.0
    record(1, "golden tables", ok, detail, secs)
    assert secs < 1.0
    assert not bad, detail


# -- 2 ---------------------------------------------------------------------

def _algebra_failures(c):
    n = len(c)
    x, y, z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    mono, res = c.mono_table, c.res_table
    residuation = np.count_nonzero((mono[x, z] <= y) != (z <= res[x, y]))
    a, b = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    prelinear = np.count_nonzero(np.maximum(res[a, b], res[b, a]) != c.top)
    lemma = sum(double_residual(c, c.labels[v]) != v for v in c.elements)
    return int(residuation), int(prelinear), int(lemma)


def test_criterion_2_algebra():
    t = time.perf_counter()
    totals = np.zeros(3, dtype=int)
    chains = 0
    for n in range(2, 13):
        for c in (make_lukasiewicz(n), make_godel(n)):
            totals += _algebra_failures(c)
            chains += 1
    secs = time.perf_counter() - t
    ok = not totals.any() and secs < 5
    record(2, "algebra laws", ok,
           f"{chains} chains; residuation {totals[0]}, prelinearity {totals[1]}, double residual {totals[2]} failures",
           secs)
    assert not totals.any()
    assert secs < 5


# -- 3 ---------------------------------------------------------------------

def _identity_pairs(pool, chain, preference):
    """(name, [(f, g), ...]) for each definability identity."""
    out = [
        ("dia via box", [(f, S.desugar_dia_from_box(f, chain)) for f in pool]),
        ("box via dia", [(f, S.desugar_box_from_dia(f, chain)) for f in pool]),
    ]
    if preference:
        bottom = chain.labels[0]
        out += [
            ("graded via cuts", [(f, S.desugar_graded_from_cuts(f, chain)) for f in pool]),
            ("A as box(0)", [(S.Univ(f), S.BoxCut(bottom, f)) for f in pool]),
            ("E as dia(0)", [(S.Exist(f), S.DiaCut(bottom, f)) for f in pool]),
        ]
        strict = [f for f in pool if any(isinstance(g, (S.SBoxCut, S.SDiaCut)) for g in S.subformulas(f))]
        weak = [f for f in pool if f not in strict]
        out += [
            ("weak cuts via delta", [(f, S.desugar_cuts_via_delta(f, chain)) for f in weak]),
            ("strict cuts via delta", [(f, S.desugar_cuts_via_delta(f, chain)) for f in strict]),
        ]
    return out


def _pool(chain, preference):
    mods = ("box", "dia", "A", "E")
    if preference:
        mods += ("sbox", "sdia")
    pool = formula_pool(["p"], chain, 2, modalities=mods)
    # cut modalities at every level, one layer deep over the atoms and one nested
    atoms = [S.Var("p"), S.Implies(S.Var("p"), S.Const(chain.labels[len(chain) // 2]))]
    kinds = [S.BoxCut, S.DiaCut] + ([S.SBoxCut, S.SDiaCut] if preference else [])
    for kind in kinds:
        for lab in chain.labels:
            if kind in (S.SBoxCut, S.SDiaCut) and lab == chain.labels[0]:
                continue
            for a in atoms:
                pool.append(kind(lab, a))
                pool.append(kind(lab, S.Dia(a)))
    return pool


def test_criterion_3_definability():
    t = time.perf_counter()
    fails: dict[str, int] = {}
    checked = 0

    def run(family, preference):
        nonlocal checked
        pool = _pool(family.chain, preference)
        ev = family.evaluator()
        for name, pairs in _identity_pairs(pool, family.chain, preference):
            bad = sum(count_mismatches(family, pairs, ev))
            fails[name] = fails.get(name, 0) + bad
        checked += family.size

    chain = make_lukasiewicz(3)
    # exhaustive: 2 worlds, |B| = 3, one variable; general models for the duality, preference models for the rest
    for k in (1, 2):
        run(exhaustive_family(chain, k, ["p"], "general"), False)
        run(exhaustive_family(chain, k, ["p"], "preference"), True)
    for fam in random_families(seed=2024, count=200, variables=["p"], max_worlds=5, max_elems=5):
        run(fam, True)
    for fam in random_families(seed=2025, count=200, variables=["p"], max_worlds=5, max_elems=5, preference=False):
        run(fam, False)
    secs = time.perf_counter() - t
    total = sum(fails.values())
    detail = f"{checked} models; " + ", ".join(f"{k}: {v}" for k, v in fails.items())
    record(3, "interdefinability and abbreviations", total == 0 and secs < 120, detail, secs)
    assert secs < 120
    assert total == 0, detail


# -- 4 ---------------------------------------------------------------------

def _violating_instances(system, schema_id, chain, pool):
    """Instances of a schema whose ``x <= y`` side conditions are all reversed."""
    schema = next(s for s in schema_catalog(system, chain) if s.id == schema_id)
    metas = sorted({g.name for g in S.subformulas(schema.template) if isinstance(g, S.Meta)})
    names = [n for n, _ in schema.params]
    doms = [range(1 if d == "B+" else 0, len(chain)) for _, d in schema.params]
    out = []
    for values in itertools.product(*doms):
        binding = dict(zip(names, values))
        if all(binding[x] > binding[y] for x, y in schema.le):
            for fs in itertools.product(pool, repeat=len(metas)):
                out.append(instantiate(schema, dict(zip(metas, fs)), binding, chain))
    return out


def test_criterion_4_axiom_soundness():
    t = time.perf_counter()
    bounds = SearchBounds(chain=make_lukasiewicz(3), max_worlds=3)
    reports = {s: axiom_soundness_suite(s, bounds) for s in ("mM", "P")}
    pool = default_pool(bounds.chain)[:4]
    corrupt = {}
    for sid in ("nest", "I1"):
        fs = _violating_instances("P", sid, bounds.chain, pool)
        corrupt[sid] = sum(not v.valid for v in check_many(fs, bounds))
    secs = time.perf_counter() - t
    refuted = {s: len(r.failures) for s, r in reports.items()}
    which = sorted({e.schema for r in reports.values() for e in r.failures})
    detail = (", ".join(f"{s}: {len(r.entries)} instances, {refuted[s]} refuted" for s, r in reports.items())
              + (f" (refuted schemas: {', '.join(which)})" if which else "")
              + f"; corrupted nest {corrupt['nest']} and I1 {corrupt['I1']} countermodels")
    ok = not any(refuted.values()) and all(corrupt.values()) and secs < 300
    record(4, "axiom soundness", ok, detail, secs)
    assert secs < 300
    assert all(corrupt.values())
    assert not any(refuted.values()), detail


# -- 5 ---------------------------------------------------------------------

def _max_over_levels(cuts, k):
    """``max{b & R_b(u, v)}`` over the given crisp relations."""
    out = np.zeros((k, k), dtype=int)
    for b, rel in cuts.items():
        out = np.maximum(out, np.where(rel.bits, b, 0))
    return out


def test_criterion_5_relations():
    t = time.perf_counter()
    c = make_lukasiewicz(3)
    counts = dict(transitive=0, antisymmetric=0, from_strict_cuts=0, from_cuts_of_strict=0,
                  from_cuts=0, inclusion=0)
    total = 0
    for k in (2, 3):
        worlds = [f"w{i}" for i in range(k)]
        for m in relation_matrices(c, k, "preference"):
            total += 1
            r = FuzzyRelation(worlds, m, c.top)
            sp = strict_part(r)
            s = sp.matrix
            counts["transitive"] += not is_meet_transitive(sp)
            counts["antisymmetric"] += bool(np.any((s > 0) & (s.T > 0)))
            counts["from_cuts"] += reconstruct_from_cuts({b: cut(r, b) for b in c.elements}, c.top) != r
            # the (P_b)^< family need not be nested, so the max is taken directly
            counts["from_strict_cuts"] += not np.array_equal(
                _max_over_levels({b: strict_of_cut(r, b) for b in c.positive}, k), s)
            counts["from_cuts_of_strict"] += not np.array_equal(
                _max_over_levels({b: cut_of_strict(r, b) for b in c.positive}, k), s)
            counts["inclusion"] += sum(not (strict_of_cut(r, b) <= cut_of_strict(r, b)) for b in c.positive)
    secs = time.perf_counter() - t
    bad = sum(counts.values())
    record(5, "relation properties", bad == 0,
           f"{total} preorders; " + ", ".join(f"{k} {v}" for k, v in counts.items()), secs)
    assert bad == 0, counts


# -- 6 ---------------------------------------------------------------------

def test_criterion_6_bulldozing():
    t = time.perf_counter()
    lm = clustered_model()
    mods = ("box", "dia", "sbox", "sdia", "A", "E")
    c = lm.chain
    notes = []
    failures = 0
    for d in (1, 2):
        K = d + 1
        out, report = bulldoze(lm, K)
        sp = check_strict_part_condition(out)
        layer_problems = out.violations()
        irreflexive = all(not np.any(np.diag(out.strict[b])) for b in c.positive)
        pool = formula_pool(["p"], c, d, modalities=mods)
        extra = [S.parse(x, c) for x in ("box(0.5) p", "dia(1) p", "sbox(0.5) p", "sdia(1) p")]
        if d == 2:
            extra += [S.parse(x, c) for x in ("box(1) dia(0.5) p", "sdia(0.5) sbox(1) p", "dia(1) sdia(0.5) p")]
        mism = 0
        for f in pool + extra:
            src, dst = lm.eval_all(f), out.eval_all(f)
            for i, w in enumerate(lm.worlds):
                name = f"{w}@0" if f"{w}@0" in out.worlds else w
                mism += src[i] != dst[out.worlds.index(name)]
        failures += mism + (not sp.holds) + len(layer_problems) + (not irreflexive)
        notes.append(f"d={d} K={K}: {len(out.worlds)} worlds, {len(pool) + len(extra)} formulas, "
                     f"{mism} mismatches, strict-part {'ok' if sp.holds else 'FAILS'}, "
                     f"{len(layer_problems)} layer violations")
    secs = time.perf_counter() - t
    record(6, "bulldozing", failures == 0 and secs < 10, "; ".join(notes), secs)
    assert secs < 10
    assert failures == 0, notes


# -- 7 ---------------------------------------------------------------------

# (file, system, 1-based line to change, replacement line, expected failing line)
CORRUPTIONS = [
    ("strict_persistence_P.txt", "P", 1, "1. sbox(1) p -> sbox(1) box(0.5) p ; ax I2 a=0.5 b=1", 1),
    ("strict_persistence_P.txt", "P", 2, "2. box(0.5) (sbox(0.5) p -> sbox(0.5) box(0.5) p) ; nec 0.5 3", 2),
    ("strict_persistence_P.txt", "P", 3,
     "3. box(0.5) (sbox(0.5) p -> sbox(0.5) box(0.5) p) -> (box(0.5) sbox(0.5) p -> box(0.5) sbox(0.5) box(0.5) p) ; ax T a=0.5", 3),
    ("strict_persistence_P.txt", "P", 4, "4. box(0.5) sbox(0.5) p -> box(0.5) sbox(0.5) box(0.5) p ; mp 2 2", 4),
    ("strict_persistence_P.txt", "P", 5, "5. sbox(0.5) p -> box(0.5) sbox(1) p ; ax I1 a=0.5 b=0.5", 5),
    ("strict_persistence_P.txt", "P", 6,
     "6. (sbox(0.5) p -> box(0.5) sbox(0.5) p) -> ((box(0.5) sbox(0.5) p -> box(0.5) sbox(0.5) box(0.5) p) -> (box(0.5) sbox(0.5) box(0.5) p -> sbox(0.5) p)) ; taut", 6),
    ("strict_persistence_P.txt", "P", 7,
     "7. (box(0.5) sbox(0.5) p -> box(0.5) sbox(0.5) box(0.5) p) -> (sbox(0.5) p -> box(0.5) sbox(0.5) box(0.5) p) ; mp 5 7", 7),
    ("nec_k_CM.txt", "CM", 1, "1. p & q -> p ; premise 1", 2),
    ("nec_k_CM.txt", "CM", 2, "2. box (p & q -> q) ; nec 1", 2),
    ("nec_k_CM.txt", "CM", 4, "4. box (p & q) -> box p ; mp 2 5", 4),
]


def _replace_step(text, step, new_line):
    out = []
    for line in text.splitlines():
        if line.strip().startswith(f"{step}."):
            line = new_line
        out.append(line)
    return "\n".join(out) + "\n"


def test_criterion_7_proof_checker():
    t = time.perf_counter()
    c = make_lukasiewicz(3)
    accepted = {}
    for name, system in (("strict_persistence_P.txt", "P"), ("nec_k_CM.txt", "CM"), ("mon_k_CM.txt", "CM"),
                         ("nec_from_level0_mM.txt", "mM")):
        proof = parse_proof((DATA / "proofs" / name).read_text(), c)
        accepted[name] = (check_proof(proof, system, c), proof, system)
    originals_ok = all(r.accepted for r, _, _ in accepted.values())

    caught = 0
    wrong = []
    for name, system, step, new, expect in CORRUPTIONS:
        text = _replace_step((DATA / "proofs" / name).read_text(), step, new)
        res = check_proof(parse_proof(text, c), system, c)
        if not res.accepted and res.line == expect:
            caught += 1
        else:
            wrong.append(f"{name} step {step}: {res}")

    bridge_bad = 0
    bridge_total = 0
    for res, proof, system in accepted.values():
        if not res.accepted or proof.premises:
            continue
        model_class = {"CM": "crisp", "M": "general"}.get(system, "preference")
        bounds = SearchBounds(chain=c, max_worlds=3 if model_class != "general" else 2, model_class=model_class)
        for line in proof.lines:
            bridge_total += 1
            bridge_bad += not is_valid_bounded(line.formula, bounds).valid
    secs = time.perf_counter() - t
    ok = originals_ok and caught == len(CORRUPTIONS) and bridge_bad == 0 and secs < 30
    detail = (f"{sum(r.accepted for r, _, _ in accepted.values())}/{len(accepted)} sample proofs accepted; "
              f"{caught}/{len(CORRUPTIONS)} corruptions rejected at the right line; "
              f"{bridge_total - bridge_bad}/{bridge_total} theorem lines valid within bounds")
    record(7, "proof checker", ok, detail, secs)
    assert originals_ok, {k: str(v[0]) for k, v in accepted.items()}
    assert not wrong, wrong
    assert bridge_bad == 0
    assert secs < 30


# -- 8 ---------------------------------------------------------------------

def test_criterion_8_preference_properties():
    t = time.perf_counter()
    rep = lemma71_suite(SearchBounds(chain=make_lukasiewicz(3), max_worlds=3))
    secs = time.perf_counter() - t
    wanted = ("reflexivity", "transitivity", "strict transitivity", "graded modus ponens")
    parts = []
    ok = secs < 120
    for name in wanted:
        es = rep.group(name)
        good = sum(e.verdict.valid for e in es)
        ok &= good == len(es) and len(es) > 0
        parts.append(f"{name} {good}/{len(es)}")
    record(8, "preference ordering lemma", ok, ", ".join(parts), secs)
    assert ok, rep.summary()


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
