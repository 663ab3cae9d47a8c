"""Graded preferences over four meals.

Worlds pair a main course with a side: bf, bm, cf, cm. The variables f and m
say how fishy and how meaty a meal is, and ``light`` is a graded blend of both.
"""
from gradedpref import PrefKind, eval_pref, parse, to_text
from gradedpref.bundled import meal_model

m = meal_model()
c = m.chain
light = parse("(#0.8 & f) | (#0.2 & m)", c)
heavy = parse("(#0.2 & f) | (#0.8 & m)", c)

print("worlds:", ", ".join(m.worlds))
for text in ("f", "m", "dia f", "box f", "dia(0.8) f", "A (f -> dia m)"):
    f = parse(text, c)
    vals = [c.labels[v] for v in m.eval_all(f)]
    print(f"  {text:<16} {vals}")

print("light:", to_text(light))
print("  dia light   ", [c.labels[v] for v in m.eval_all(parse(f"dia ({to_text(light)})", c))])

for q in ("EE", "AE"):
    for strict in (False, True):
        k = PrefKind(q, strict)
        v = eval_pref(m, k, heavy, light)
        print(f"heavy {k.describe()} light = {c.labels[v]}")
