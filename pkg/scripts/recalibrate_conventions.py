"""Re-measure the frozen block signs of the bulk odd pairing.

Sweeps all sixteen assignments of the four omega block constants and prints
the ones under which the contraction identity Omega(Q, Y) = D_Y S closes on
every slot class at once.  The shipped values in bvadm/conventions.py were
frozen from this sweep; rerun after touching bv.apply_Q_bulk, bv.bv_action
or the pairing blocks.

Usage: python scripts/recalibrate_conventions.py
"""
import itertools

import numpy as np

import bvadm.bv as bvmod
from bvadm.bv import apply_Q_bulk, bv_action, omega_bv
from bvadm.fields import BulkPatchGrid, GArr, PeriodicGrid, Sym2
from bvadm.presets import default_config, random_bulk_bv, trig_profile
from bvadm.varcalc import Direction, directional_derivative

CFG = default_config()
AUX0 = CFG.num_generators
AUX1 = CFG.num_generators + 1

grid = BulkPatchGrid(PeriodicGrid((16, 16)), n_layers=17)
state = random_bulk_bv(CFG, grid, seed=5, amp=0.02)
rng = np.random.default_rng(99)
xn = grid.normal_coord()
window = (xn * (1 - xn)) ** 2


def mono(gens, ghost):
    return GArr.monomial_field(CFG, grid, gens, ghost,
                               window * (1.0 + trig_profile(grid, rng, 0.5)))


def sym_mono(gens, ghost):
    out = Sym2(2)
    for a in range(2):
        for b in range(a, 2):
            out.comp[(a, b)] = mono(gens, ghost)
    return out


CLASSES = {
    "antifield": Direction({"gdag_nn": mono((AUX0,), -1),
                            "gdag_n": [mono((AUX0,), -1) for _ in range(2)],
                            "gdag": sym_mono((AUX0,), -1)}, shift=-1),
    "metric": Direction({"eta": mono((AUX0, AUX1), 0),
                         "beta": [mono((AUX0, AUX1), 0) for _ in range(2)],
                         "gamma": sym_mono((AUX0, AUX1), 0)}, shift=0),
    "ghost": Direction({"xi_n": mono((AUX0,), 1),
                        "xi": [mono((AUX0,), 1) for _ in range(2)]}, shift=1),
    "antighost": Direction({"chi_n": mono((3, AUX0), -2),
                            "chi": [mono((5, AUX0), -2) for _ in range(2)]},
                           shift=-2),
}

Q = apply_Q_bulk(state)
DS = {name: directional_derivative(bv_action, state, Y, check_grade=False)
      for name, Y in CLASSES.items()}

NAMES = ("OMEGA_METRIC_COEFF", "OMEGA_METRIC_SWAP",
         "OMEGA_GHOST_COEFF", "OMEGA_GHOST_SWAP")
TOL = 1e-2   # relative; discrete-IBP error sits around 3e-4 at 17 layers

coherent = []
for signs in itertools.product((1.0, -1.0), repeat=4):
    for n, v in zip(NAMES, signs):
        setattr(bvmod, n, v)
    worst = 0.0
    for name, Y in CLASSES.items():
        dS = DS[name]
        r = (omega_bv(state, Q, Y) - dS).sup_norm() / max(dS.sup_norm(), 1e-30)
        worst = max(worst, r)
    marker = "  <-- coherent" if worst < TOL else ""
    print(" ".join(f"{n.split('_', 1)[1]}={v:+.0f}" for n, v in zip(NAMES, signs)),
          f" worst={worst:.3e}{marker}")
    if worst < TOL:
        coherent.append(signs)

print()
if len(coherent) == 1:
    print("unique coherent assignment:",
          dict(zip(NAMES, (int(v) for v in coherent[0]))))
else:
    print(f"{len(coherent)} coherent assignments found -- investigate")
