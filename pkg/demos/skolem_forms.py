"""Skolemize the three quantifier shifts and a formula with a negated
universal block, under each variant."""

from qshift import parse_formula, render, skolemize, skolemize_structural

SHIFTS = {
    "CD": "forall x. (A(x) | B) -> forall x. A(x) | B",
    "ED": "(B -> exists x. A(x)) -> exists x. (B -> A(x))",
    "SW": "(forall x. A(x) -> B) -> exists x. (A(x) -> B)",
}

for name, text in SHIFTS.items():
    f = parse_formula(text)
    g, sig = skolemize_structural(f)
    print(f"{name:3} {render(f)}")
    print(f"    {render(g)}   fresh: {', '.join(sig)}")

print()
f = parse_formula("~(forall x. forall y. (exists z. P(x,z) | Q(y,x)))")
print("formula   ", render(f))
for variant in ("structural", "andrews", "parallel"):
    g, sig = skolemize(f, variant, 2)
    deps = {s: e.deps for s, e in sig.items()}
    print(f"{variant:10}", render(g), deps)
