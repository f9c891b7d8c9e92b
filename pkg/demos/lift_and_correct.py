# From a proof of a Skolemized sequent to an LJ proof with shift hypotheses.
#
# 1. load an LJ proof of  forall x. (A(x) | B) => A(c) | B
# 2. lift it to a proof of the constant-domain sequent (accepted in LJ++ only)
# 3. correct it: the unsound Rforall becomes an implication hypothesis

from pathlib import Path

from qshift import load, check, deskolemize_trace, correct_ljpp
from qshift.parser import dump_proof, render

CORPUS = Path(__file__).resolve().parents[1] / "src" / "qshift" / "corpus"

skolem_proof, _ = load(CORPUS / "cd_skolem.prf")
(target,), _ = load(CORPUS / "cd.seq")

print("target:", render(target))
print(dump_proof(skolem_proof))

trace = deskolemize_trace(skolem_proof, target)
lifted = trace.proof
print("Skolem terms ->", {render(t): v for t, v in trace.variables.items()})
print(dump_proof(lifted))
for system in ("LJ", "LJpp"):
    print(f"{system:5}", check(lifted, system).verdict)

res = correct_ljpp(lifted)
print()
print(dump_proof(res.proof))
print("LJ   ", check(res.proof, "LJ").verdict)
print("hypotheses:", [render(h) for h in res.closed_hypotheses])
