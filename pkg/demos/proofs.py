"""Check the bundled Hilbert-style derivations and one broken variant."""
from importlib.resources import files

from gradedpref import check_proof, make_lukasiewicz, parse_proof, to_text

c = make_lukasiewicz(3)
root = files("gradedpref") / "data" / "proofs"
for name in sorted(p.name for p in root.iterdir()):
    system = name.rsplit("_", 1)[1].removesuffix(".txt")
    text = (root / name).read_text()
    res = check_proof(parse_proof(text, c), system, c)
    print(f"{name:<28} {system:<3} {res}")
    if res:
        print("   proves", to_text(res.theorems[-1]))

text = (root / "strict_persistence_P.txt").read_text()
broken = text.replace("1. sbox(0.5) p", "1. sbox(1) p", 1)
print("tampered:", check_proof(parse_proof(broken, c), "P", c))
