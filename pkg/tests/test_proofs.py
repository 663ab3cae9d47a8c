from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from gradedpref import make_lukasiewicz
from gradedpref import syntax as S
from gradedpref.errors import ProofFormatError
from gradedpref.proofs import (
    SystemId, check_proof, instantiate, match_schema, parse_proof, prop_taut, schema_catalog,
)
from gradedpref.search import SearchBounds, default_pool, is_valid_bounded

DATA = Path(__file__).resolve().parent.parent / "src" / "gradedpref" / "data" / "proofs"
L3 = make_lukasiewicz(3)
L11 = make_lukasiewicz(11)


def ids(system, chain=L3):
    return {s.id for s in schema_catalog(system, chain)}


def schema(system, sid, chain=L3):
    return next(s for s in schema_catalog(system, chain) if s.id == sid)


def test_catalog_shapes():
    assert "T" in ids("mM") and "T" not in ids("mM_minus_plus")
    assert "B0" in ids("mM") and "B0" not in ids("mM_minus_plus")
    p = ids("P")
    assert {"incl", "I1", "I2", "I3", "s.nest", "s.K", "nest", "T"} <= p
    assert "s.T" not in p
    assert "C" in ids("CM") and "C" not in ids("M")
    assert {"delta", "s.delta"} <= ids("P_delta")


def test_axiom_C_uses_coatom():
    c = schema("CM", "C", L11)
    assert "#0.9" in c.text


def test_match_examples():
    f = S.parse("box(0.5) p -> p", L11)
    m = match_schema(f, schema("mM", "T", L11), L11)
    assert m.params == {"a": L11.index("0.5")} and m.subst == {"phi": S.Var("p")}
    ok = match_schema(S.parse("box(0.5) p -> box(0.8) p", L11), schema("mM", "nest", L11), L11)
    assert not isinstance(ok, str)
    bad = match_schema(S.parse("box(0.8) p -> box(0.5) p", L11), schema("mM", "nest", L11), L11)
    assert isinstance(bad, str) and "a <= b" in bad


def test_match_four_needs_meet():
    s4 = schema("mM", "4", L11)
    assert not isinstance(match_schema(S.parse("box(0.3) p -> box(0.3) box(0.7) p", L11), s4, L11), str)
    assert isinstance(match_schema(S.parse("box(0.5) p -> box(0.3) box(0.7) p", L11), s4, L11), str)


@given(st.data())
def test_match_inverts_instantiate(data):
    sch = data.draw(st.sampled_from(schema_catalog("P", L3)))
    metas = sorted({g.name for g in S.subformulas(sch.template) if isinstance(g, S.Meta)})
    pool = default_pool(L3)
    subst = {m: data.draw(st.sampled_from(pool)) for m in metas}
    params = {}
    for name, dom in sch.params:
        params[name] = data.draw(st.integers(1 if dom == "B+" else 0, L3.top))
    f = instantiate(sch, subst, params, L3)
    m = match_schema(f, sch, L3, params)
    if sch.admissible(params) is None:
        assert not isinstance(m, str)
        assert instantiate(sch, m.subst, m.params, L3) == f
    else:
        assert isinstance(m, str)


def test_two_line_proof():
    pr = parse_proof("1. p -> p ; taut\n2. box(0.5) (p -> p) ; nec 0.5 1\n", L3)
    assert check_proof(pr, "mM", L3).accepted


@pytest.mark.parametrize("name, system", [
    ("strict_persistence_P.txt", "P"), ("nec_k_CM.txt", "CM"), ("mon_k_CM.txt", "CM"), ("nec_from_level0_mM.txt", "mM"),
])
def test_sample_proofs_accepted_and_sound(name, system):
    pr = parse_proof((DATA / name).read_text(), L3)
    res = check_proof(pr, system, L3)
    assert res.accepted, str(res)
    cls = {"CM": "crisp"}.get(system, "preference")
    bounds = SearchBounds(chain=L3, max_worlds=2 if cls == "crisp" else 3, model_class=cls)
    for f in res.theorems:
        assert is_valid_bounded(f, bounds).valid


def test_mon_derivation_needs_no_K():
    pr = parse_proof((DATA / "mon_k_CM.txt").read_text(), L3)
    assert all(ln.rule != "ax" for ln in pr.lines)
    assert check_proof(pr, "M", L3).accepted


def test_side_condition_violation_rejected():
    text = (DATA / "strict_persistence_P.txt").read_text().replace(
        "1. sbox(0.5) p -> sbox(0.5) box(0.5) p ; ax I2 a=0.5 b=0.5",
        "1. sbox(1) p -> sbox(1) box(0.5) p ; ax I2 a=0.5 b=1")
    res = check_proof(parse_proof(text, L3), "P", L3)
    assert not res.accepted and res.line == 1 and "b <= a" in res.reason


def test_nec_on_premise_rejected():
    pr = parse_proof("1. p ; premise 1\n2. box(1) p ; nec 1\n", L3)
    res = check_proof(pr, "mM", L3)
    assert not res.accepted and res.line == 2 and "premise" in res.reason


def test_premise_lines_and_mp():
    pr = parse_proof("1. p ; premise 1\n2. p -> q ; premise 2\n3. q ; mp 1 2\n", L3)
    res = check_proof(pr, "mM", L3)
    assert res.accepted and res.theorems == []


def test_taut_refuted_with_assignment():
    pr = parse_proof("1. box p | ~box p ; taut\n", L3)
    res = check_proof(pr, "mM", L3)
    assert not res.accepted and "box p" in res.reason


def test_rule_availability():
    pr = parse_proof("1. p -> p ; taut\n2. box (p -> p) ; nec 1\n", L3)
    assert not check_proof(pr, "M", L3).accepted
    assert check_proof(pr, "CM", L3).accepted
    # nec at level 0 is not part of the positive-level system
    pr0 = parse_proof("1. p -> p ; taut\n2. box(0) (p -> p) ; nec 0 1\n", L3)
    assert not check_proof(pr0, "mM_minus_plus", L3).accepted


def test_bad_references():
    res = check_proof(parse_proof("1. p -> p ; taut\n2. p ; mp 1 3\n", L3), "mM", L3)
    assert not res.accepted and res.line == 2
    res = check_proof(parse_proof("1. q ; ax T a=0.5\n", L3), "mM", L3)
    assert not res.accepted and res.line == 1
    res = check_proof(parse_proof("1. box(0.5) p -> p ; ax Q\n", L3), "mM", L3)
    assert not res.accepted and "no schema" in res.reason


@pytest.mark.parametrize("text", [
    "1. p -> p\n", "2. p -> p ; taut\n", "1. p ; frobnicate\n", "1. p ; mp x y\n",
    "1. p ; ax T a\n", "1. p ; premise 2\n",
])
def test_format_errors(text):
    with pytest.raises(ProofFormatError):
        parse_proof(text, L3)


def test_prop_taut():
    assert prop_taut(S.parse("p -> p"), L3)
    assert prop_taut(S.parse("(p -> q) | (q -> p)"), L3)
    assert not prop_taut(S.parse("p | ~p"), L3)
    assert prop_taut(S.parse("p | ~p"), make_lukasiewicz(2))
    # modal subformulas act as atoms
    assert prop_taut(S.parse("box p -> box p"), L3)
    assert not prop_taut(S.parse("box p -> box q"), L3)
    assert prop_taut(S.parse("dia (p & q) & q -> dia (p & q)"), L3)


def test_system_ids():
    assert SystemId("P") is SystemId.P
    with pytest.raises(ValueError):
        SystemId("Q")
