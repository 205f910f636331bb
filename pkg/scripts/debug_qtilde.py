"""Validate the restricted differential against the bulk one.

The boundary restriction of apply_Q_bulk (slice every output at the face,
plus face values of its normal jets where stored) must equal qtilde on
restrict_to_boundary(state), since both read the same stencils.  Any
discrepancy localizes a transcription bug in the jet calculus.

Also re-runs the Darboux-pairing identity with the contraction in the
second slot of the two-form (the orientation the displayed wedge fixes),
and the nilpotency residual, with both slot signs positive.
"""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.bv import apply_Q_bulk
from bvadm.fields import BulkPatchGrid, GArr, PeriodicGrid, Sym2
from bvadm.presets import default_config, random_bulk_bv, random_darboux
from bvadm.varcalc import Direction, directional_derivative

B.ALPHA_XI_GDAG = 1.0
B.ALPHA_METRIC_GDAG = -1.0
B.ALPHA_XI_CHI = -1.0
B.CHI_REDUCTION_SIGN = -1.0
B.BOUNDARY_GHOST_PAIR = 1.0
B.PI_SLOT_SIGN = 1.0
B.PHI_SLOT_SIGN = 1.0
B.EULER_CONTRACTION_SIGN = 1.0

CFG = default_config(8)
bgrid = PeriodicGrid((8, 8))
grid = BulkPatchGrid(bgrid, n_layers=9)

state = random_bulk_bv(CFG, grid, seed=5, amp=0.02)
Qb = apply_Q_bulk(state)
pre = B.restrict_to_boundary(state)
Qt = B.qtilde(pre)


def r(f):
    return f.restrict_boundary(bgrid)


def comp_diff(name, mine, bulk):
    if isinstance(mine, Sym2):
        m = max((mine.g(a, b) - r(bulk.g(a, b))).sup_norm()
                for a in range(2) for b in range(2))
    elif isinstance(mine, list):
        m = max((x - r(y)).sup_norm() for x, y in zip(mine, bulk))
    else:
        m = (mine - r(bulk)).sup_norm()
    print(f"  {name}: {m:.3e}")


print("== qtilde vs restricted bulk Q ==")
for name in ("eta", "beta", "gamma", "xi_n", "xi", "gdag_nn", "gdag_n",
             "chi_n", "chi"):
    comp_diff(name, Qt.comps[name], Qb.comps[name])

print("== second-slot pairing identity on Darboux space ==")
GRID = PeriodicGrid((16, 16))
CFG12 = default_config(12)
PLUS = [i for i in range(12) if CFG12.tag(i) == 1]
MINUS = [i for i in range(12) if CFG12.tag(i) == -1]
from bvadm.presets import trig_profile
RNG = np.random.default_rng(3)


def mono(gens, tag, amp=0.05):
    return GArr.monomial_field(CFG12, GRID, gens, tag,
                               trig_profile(GRID, RNG, amp))


def sym_mono(gens, tag, amp=0.05):
    out = Sym2.zeros(CFG12, GRID, 2)
    for key in list(out.comp):
        out.comp[key] = mono(gens, tag, amp)
    return out


ds = random_darboux(CFG12, GRID, seed=17, amp=0.04)
dirs = {
    "d_Pi": Direction({"Pi": sym_mono((PLUS[4], MINUS[3]), 0)}, 0),
    "d_ginv": Direction({"gamma_inv": sym_mono((PLUS[4], MINUS[3]), 0)}, 0),
    "d_bxi_n": Direction({"bxi_n": mono((PLUS[4],), 1)}, 0),
    "d_bxi": Direction({"bxi": [mono((PLUS[4],), 1), mono((PLUS[5],), 1)]}, 0),
    "d_phi_n": Direction({"phi_n": mono((MINUS[3],), -1)}, 0),
    "d_phi": Direction({"phi": [mono((MINUS[3],), -1),
                                mono((MINUS[4],), -1)]}, 0),
}
Q = B.boundary_Q(ds)
for name, Y in dirs.items():
    lhs = B.omega_boundary(ds, Y, Q)
    rhs = directional_derivative(B.boundary_action, ds, Y, check_grade=False)
    print(f"  {name}: lhs {lhs.sup_norm():.3e}  rhs {rhs.sup_norm():.3e}  "
          f"diff {(lhs - rhs).sup_norm():.3e}")

print("== nilpotency with both slot signs positive ==")
for k, v in B.boundary_q_square(ds).items():
    print(f"  {k}: {v:.3e}")
