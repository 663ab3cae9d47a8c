"""Ready-made models used by the examples, the golden tables and the tests."""
from __future__ import annotations

from .lattice import make_custom, make_lukasiewicz
from .model import PreferenceModel
from .syntax import parse

MEAL_WORLDS = ("bf", "bm", "cf", "cm")

# rows are the source world, columns the target, in MEAL_WORLDS order
MEAL_RELATION = [
    ["1", "0.5", "0.5", "0.5"],
    ["0.8", "1", "0.6", "0.8"],
    ["0.8", "0.5", "1", "0.7"],
    ["0.6", "0.5", "0.5", "1"],
]

LIGHT = "(#0.8 & f) | (#0.2 & m)"
HEAVY = "(#0.7 & m) | (#0.3 & f)"


def meal_chain():
    return make_lukasiewicz(11)


def meal_model() -> PreferenceModel:
    """Restaurant choice: beach or countryside, fish or meat, each crisp."""
    chain = meal_chain()
    val = {}
    for var in "cbfm":
        pos = 0 if var in "cb" else 1
        val[var] = {w: "1" if w[pos] == var else "0" for w in MEAL_WORLDS}
    rel = [[chain.index(x) for x in row] for row in MEAL_RELATION]
    return PreferenceModel(chain, MEAL_WORLDS, rel, val)


def light(chain=None):
    return parse(LIGHT, chain)


def heavy(chain=None):
    return parse(HEAVY, chain)


def three_point_chain():
    """``{0, b, 1}`` with the minimum as monoid."""
    return make_custom(["0", "b", "1"], [[0, 0, 0], [0, 1, 1], [0, 1, 2]])


def two_point_model() -> PreferenceModel:
    """``x`` prefers ``y`` only to degree ``b``; ``y`` prefers ``x`` fully."""
    chain = three_point_chain()
    rel = [[2, 1], [2, 2]]
    return PreferenceModel(chain, ("x", "y"), rel, {"p": {"x": "1", "y": "0"}})
