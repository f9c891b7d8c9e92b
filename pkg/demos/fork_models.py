"""The three-world fork, seen twice.

As a Kripke frame with two elements it refutes the quantifier switch.  Its
up-sets, read as bit triples, form the five-valued lattice, where the switch
fails again and the two-witness join shows up.
"""

from pathlib import Path

from qshift import load, forces, frame_properties, axiom_valid_on_frame, parse_formula, evaluate, valid_bounded
from qshift.kripke import schema_instance
from qshift.cd5 import VALUES, sup, value_from_bits

CORPUS = Path(__file__).resolve().parents[1] / "src" / "qshift" / "corpus"


def kripke_side():
    m, _ = load(CORPUS / "sle.krp")
    sw = schema_instance("SW")
    print("antecedent forced at w:", forces(m, "w", sw.left))
    print("consequent forced at w:", forces(m, "w", sw.right))
    rep = frame_properties(m.frame)
    print("frame:", rep.to_dict())
    for kind in ("CD", "ED", "SW"):
        print(f"  {kind} valid on frame: {axiom_valid_on_frame(m.frame, kind)[0]}")


def lattice_side():
    print("points:", " ".join(v.bits for v in VALUES))
    a, b = value_from_bits("100"), value_from_bits("010")
    print(f"{a} v {b} = {sup(a, b)}")
    i, _ = load(CORPUS / "sl_countermodel.cd5")
    print(i.describe(), end="")
    f = parse_formula("exists x. A(c,x)", constants=["c"])
    print("exists x. A(c,x) =", evaluate(i, f))
    ok, cm = valid_bounded(parse_formula("exists x. (P(x) -> forall y. P(y))"), 2)
    print("drinker valid up to 2 elements:", ok)
    print(cm.describe(), end="")


if __name__ == "__main__":
    kripke_side()
    print()
    lattice_side()
