"""Check the three-world model whose logic contains every atomic shift
instance but not the linearity/existence disjunction."""

import sys
import time
from pathlib import Path

from qshift import load, check_incompleteness_witness, forces
from qshift.kripke import lin_oep_instance
from qshift.parser import render

depth = int(sys.argv[1]) if len(sys.argv) > 1 else 3
m, _ = load(Path(__file__).resolve().parents[1] / "src" / "qshift" / "corpus" / "incompleteness.krp")

f = lin_oep_instance()
print(render(f))
print("  forced at w1:", forces(m, "w1", f))

t = time.perf_counter()
rep = check_incompleteness_witness(m, depth)
print(f"depth {depth}: {rep.classes} semantic classes, claim holds: {rep.claim_holds} "
      f"({time.perf_counter() - t:.2f}s)")
print("all atomic shift instances valid:", rep.instances_hold)
print("witness ok:", rep.ok)
