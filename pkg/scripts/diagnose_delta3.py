"""Seed sweep of the xi-only sector identity, with state forensics."""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.fields import GArr, PeriodicGrid, Sym2
from bvadm.presets import default_config, random_preboundary

B.ALPHA_XI_GDAG = 1.0
B.ALPHA_METRIC_GDAG = -1.0
B.ALPHA_XI_CHI = -1.0
B.CHI_REDUCTION_SIGN = -1.0
B.BOUNDARY_GHOST_PAIR = 1.0
B.EULER_CONTRACTION_SIGN = 1.0

CFG = default_config(12)
GRID = PeriodicGrid((16, 16))
zero = GArr.zero(CFG, GRID)


def xi_only(base):
    upd = dict(
        gdag_nn=zero, jn_gdag_nn=zero,
        gdag_n=[zero] * 2, jn_gdag_n=[zero] * 2,
        gdag=Sym2.zeros(CFG, GRID, 2),
        chi_n=zero, chi=[zero] * 2, jn_chi_n=zero, jn_chi=[zero] * 2,
    )
    return base.with_slots(upd)


for seed in (31, 17, 3, 42, 8):
    for amp in (0.05, 0.04):
        base = random_preboundary(CFG, GRID, seed=seed, amp=amp)
        st = xi_only(base)
        lhs = B.euler_contraction_action(st, check_grade=False)
        rhs = B.boundary_action(B.reduce_bv(st), check_grade=False)
        dnum = (lhs - rhs).sup_norm()
        den = max(rhs.sup_norm(), 1e-300)
        print(f"seed {seed:3d} amp {amp:.2f}: |S~-pi*S| {dnum:.3e}  "
              f"rel {dnum / den:.3e}  scale {den:.3e}")
