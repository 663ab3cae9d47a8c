"""Bounded validity checks with countermodels for the formulas that fail."""
from gradedpref import SearchBounds, is_valid_bounded, make_lukasiewicz, parse
from gradedpref.modelio import dumps

c = make_lukasiewicz(3)
bounds = SearchBounds(chain=c, max_worlds=2)

candidates = [
    "box(1) p -> p",
    "box p -> box box p",
    "p -> box p",
    "box(0.5) p -> box(1) p",
    "sbox(0.5) p -> sbox(1) p",
]
for text in candidates:
    v = is_valid_bounded(parse(text, c), bounds)
    print(f"{text:<28} {v.status}")
    if v.countermodel is not None:
        print(f"  fails at {v.world} in")
        print("  " + dumps(v.countermodel).replace("\n", "\n  "))
