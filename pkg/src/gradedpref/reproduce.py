"""Recompute the worked example values and diff them against the golden table."""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from . import syntax as S
from .bundled import HEAVY, LIGHT, meal_model, two_point_model
from .prefs import PrefKind, build_pref
from .relation import cut_of_strict, indifference, strict_of_cut, strict_part

__all__ = ["load_golden", "compute", "Row", "run_examples"]


def load_golden(text: str | None = None) -> dict[str, str]:
    if text is None:
        text = resources.files("gradedpref").joinpath("data/golden.txt").read_text()
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, val = line.partition("=")
        out[key.strip()] = " ".join(val.split())
    return out


def _formula(name: str, chain) -> S.Formula:
    text = name.replace("light", f"({LIGHT})").replace("heavy", f"({HEAVY})")
    return S.parse(text, chain)


def _pairs(rel) -> str:
    items = sorted(rel.pairs())
    return "{" + ", ".join(f"({u},{v})" for u, v in items) + "}"


def compute(key: str) -> str:
    """Value of one golden quantity as a space-separated label string."""
    head, _, rest = key.partition(".")
    if head == "twopoint":
        m = two_point_model()
        what, level = rest.split(".")
        b = m.chain.index(level)
        fn = {"strict_of_cut": strict_of_cut, "cut_of_strict": cut_of_strict}[what]
        return _pairs(fn(m.relation, b))
    if head != "meal":
        raise KeyError(key)
    m = meal_model()
    c = m.chain
    parts = rest.split(".")
    if parts[0] == "relation":
        fn = {"indifference": indifference, "strict": strict_part}[parts[1]]
        return " ".join(x for row in fn(m.relation).to_labels(c) for x in row)
    if parts[0] == "dia":
        f = S.Dia(_formula(parts[1], c))
    elif parts[0] == "pref":
        f = build_pref(PrefKind(parts[1].upper()), _formula(parts[2], c), _formula(parts[3], c))
    elif parts[0] == "context":
        kind = PrefKind("AE", context=_formula(parts[1], c))
        f = build_pref(kind, _formula(parts[2], c), _formula(parts[3], c))
    else:
        raise KeyError(key)
    vals = m.eval_labels(f)
    if parts[0] != "dia":
        vals = vals[:1]
    return " ".join(vals)


@dataclass
class Row:
    key: str
    expected: str
    actual: str

    @property
    def ok(self) -> bool:
        return self.expected.split() == self.actual.split()


def run_examples(golden: dict[str, str] | None = None) -> list[Row]:
    golden = load_golden() if golden is None else golden
    return [Row(k, v, compute(k)) for k, v in golden.items()]
