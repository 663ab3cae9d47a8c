"""Preference orderings between formulas, defined inside the modal language.

Two quantifier patterns are expressible with one relation:

* ``EE``: some phi-world sees a psi-world, ``E(phi & dia psi)``;
* ``AE``: every phi-world sees a psi-world, ``A(phi -> dia psi)``.

The strict versions use ``sdia``. A context formula is conjoined to both
sides before the ordering is built.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import syntax as S
from .errors import NotExpressible
from .search import COUNTERMODEL, VALID, SearchBounds, Verdict, check_many, consequence_bounded

__all__ = ["PrefKind", "build_pref", "eval_pref", "pref_values", "lemma71_suite", "Lemma71Report"]

_EXPRESSIBLE = ("EE", "AE")
# orderings one relation cannot express; they would need the inverse relation
# or a total preorder
_NOT_EXPRESSIBLE = ("EA", "AA", "EA2", "AE2")


@dataclass(frozen=True)
class PrefKind:
    quantifier: str = "AE"
    strict: bool = False
    context: S.Formula | None = None

    def __post_init__(self):
        q = str(self.quantifier).upper()
        if q not in _EXPRESSIBLE:
            if q in _NOT_EXPRESSIBLE:
                raise NotExpressible(
                    f"ordering {self.quantifier!r} is not expressible with a single preference relation; "
                    "only 'EE' and 'AE' are available"
                )
            raise NotExpressible(f"unknown ordering {self.quantifier!r}; use 'EE' or 'AE'")
        object.__setattr__(self, "quantifier", q)

    def describe(self) -> str:
        rel = "<" if self.strict else "<="
        tag = f"{rel}_{self.quantifier}"
        if self.context is not None:
            tag = f"{S.to_text(self.context)}: {tag}"
        return tag


def build_pref(k: PrefKind, phi: S.Formula, psi: S.Formula) -> S.Formula:
    if k.context is not None:
        phi = S.And(k.context, phi)
        psi = S.And(k.context, psi)
    seen = S.SDia(psi) if k.strict else S.Dia(psi)
    if k.quantifier == "EE":
        return S.Exist(S.And(phi, seen))
    return S.Univ(S.Implies(phi, seen))


def pref_values(m, k: PrefKind, phi, psi) -> list[int]:
    """Value of the ordering at every world of ``m``."""
    return m.eval_all(build_pref(k, phi, psi))


def eval_pref(m, k: PrefKind, phi, psi) -> int:
    vals = pref_values(m, k, phi, psi)
    # the outer A/E makes the value world-independent
    assert len(set(vals)) <= 1, vals
    return vals[0]


# -- Lemma-style property suite --------------------------------------------

@dataclass
class Lemma71Entry:
    name: str
    formula: S.Formula
    verdict: Verdict
    expect: str = VALID
    premises: tuple = ()

    @property
    def as_expected(self) -> bool:
        return self.verdict.status == self.expect


@dataclass
class Lemma71Report:
    entries: list[Lemma71Entry]

    def group(self, name) -> list[Lemma71Entry]:
        return [e for e in self.entries if e.name == name]

    @property
    def unexpected(self) -> list[Lemma71Entry]:
        return [e for e in self.entries if not e.as_expected]

    @property
    def ok(self) -> bool:
        return not self.unexpected

    def summary(self) -> str:
        names = []
        for e in self.entries:
            if e.name not in names:
                names.append(e.name)
        lines = []
        for name in names:
            es = self.group(name)
            hits = sum(e.verdict.status == e.expect for e in es)
            lines.append(f"{name:<22} {len(es):>4} instances  expected {es[0].expect:<20} matched {hits}")
        for e in self.unexpected[:10]:
            lines.append(f"  unexpected {e.name}: {S.to_text(e.formula)} -> {e.verdict.status}")
        return "\n".join(lines)


def _ae(strict=False):
    return PrefKind("AE", strict)


def lemma71_suite(bounds: SearchBounds | None = None, pool: Sequence[S.Formula] | None = None,
                  levels: Sequence[str] | None = None) -> Lemma71Report:
    """Reflexivity and product-transitivity of the AE ordering, plus related checks.

    ``pool`` fills the metavariables (default ``p, q, r``). ``levels`` are the
    constants used for graded modus ponens (default: the whole chain).
    """
    bounds = bounds or SearchBounds()
    chain = bounds.chain
    pool = list(pool) if pool is not None else [S.Var(v) for v in "pqr"]
    le, lt = _ae(), _ae(True)
    entries: list[Lemma71Entry] = []

    def tr(kind, a, b, c):
        return S.Implies(build_pref(kind, a, b), S.Implies(build_pref(kind, b, c), build_pref(kind, a, c)))

    groups = [
        ("reflexivity", VALID, [build_pref(le, a, a) for a in pool]),
        ("transitivity", VALID, [tr(le, a, b, c) for a in pool for b in pool for c in pool]),
        ("strict transitivity", VALID, [tr(lt, a, b, c) for a in pool for b in pool for c in pool]),
        ("dia monotonicity", VALID,
         [S.Implies(S.Univ(S.Implies(a, b)), S.Univ(S.Implies(S.Dia(a), S.Dia(b)))) for a in pool for b in pool]),
        ("strict reflexivity", COUNTERMODEL, [build_pref(lt, pool[0], pool[0])]),
    ]
    for name, expect, fs in groups:
        for f, v in zip(fs, check_many(fs, bounds)):
            entries.append(Lemma71Entry(name, f, v, expect))

    # graded modus ponens: #r -> F1 and #s -> (F1 -> F2) give #(r*s) -> F2
    f1 = build_pref(le, S.Var("m"), S.Var("f"))
    f2 = build_pref(le, S.Var("f"), S.Var("m"))
    labels = list(levels) if levels is not None else list(chain.labels)
    for r in labels:
        for s in labels:
            rs = chain.labels[chain.mono(chain.index(r), chain.index(s))]
            prem = (S.Implies(S.Const(r), f1), S.Implies(S.Const(s), S.Implies(f1, f2)))
            goal = S.Implies(S.Const(rs), f2)
            entries.append(Lemma71Entry("graded modus ponens", goal,
                                        consequence_bounded(prem, goal, bounds), VALID, prem))
    return Lemma71Report(entries)


def world_independent(m, f: S.Formula) -> bool:
    return len(set(np.asarray(m.eval_all(f)).tolist())) <= 1
