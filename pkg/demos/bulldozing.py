"""Unravel the strict clusters of a small layered model and compare values.

The last copy of a cluster has no strictly better copy left inside it, so
with finitely many copies the strict diamonds there can drop. Lower copies
keep the source values.
"""
import numpy as np

from gradedpref import LayeredModel, bulldoze, make_godel, parse

c = make_godel(3)
worlds = ("a", "b", "c")
# {a, b} is a strict cluster at both positive levels; c is strictly below it
s = np.array([[1, 1, 1], [1, 1, 1], [0, 0, 0]], dtype=bool)
eye = np.eye(3, dtype=bool)
lm = LayeredModel(c, worlds, {0: np.ones((3, 3), bool), 1: s | eye, 2: s | eye},
                  {1: s, 2: s}, {"p": [2, 1, 0]})

new, report = bulldoze(lm, 2)
print(report.to_text())
for text in ("sdia p", "sbox p", "sdia(1) p", "box(0.5) p"):
    f = parse(text, c)
    before = lm.eval_all(f)
    after = new.eval_all(f)
    print(f"{text:<12} source {[c.labels[v] for v in before]}")
    for w, v in zip(new.worlds, after):
        src = report.origin[w][0]
        mark = "" if v == before[worlds.index(src)] else "  (changed)"
        print(f"    {w:<5} {c.labels[v]}{mark}")
