"""Multi-generator normal-ghost probes.

Single-generator xi^n makes xi^n xi^n vanish pointwise, hiding the
normal-normal jet channels of the scaling identity.  Populate xi^n on two
generators and re-run the residual, with and without the antifield jets.
"""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.fields import GArr, PeriodicGrid, Sym2
from bvadm.geometry import sym_from
from bvadm.presets import default_config, trig_profile

CFG = default_config(12)
GRID = PeriodicGrid((16, 16))
zero = GArr.zero(CFG, GRID)
PLUS = [i for i in range(12) if CFG.tag(i) == 1]
MINUS = [i for i in range(12) if CFG.tag(i) == -1]
rng = np.random.default_rng(11)
one = GArr.body_field(CFG, GRID, np.ones(GRID.shape))


def body(amp=0.05):
    return GArr.body_field(CFG, GRID, trig_profile(GRID, rng, amp))


def mono(gens, tag, amp=0.05):
    return GArr.monomial_field(CFG, GRID, gens, tag,
                               trig_profile(GRID, rng, amp))


def mk(beta_on, **over):
    xin = mono((PLUS[0],), 1) + mono((PLUS[3],), 1)
    fields = dict(
        eta=one,
        beta=[body(), body()] if beta_on else [zero, zero],
        gamma=sym_from(2, lambda a, b: one if a == b else zero),
        J=Sym2.zeros(CFG, GRID, 2),
        xi_n=xin,
        xi=[mono((PLUS[1],), 1), mono((PLUS[2],), 1)],
        gdag_nn=zero, gdag_n=[zero, zero],
        gdag=Sym2.zeros(CFG, GRID, 2),
        chi_n=zero, chi=[zero, zero],
        jn_eta=zero, jn_beta=[zero, zero],
        jn_xin=mono((PLUS[0],), 1) + mono((PLUS[3],), 1),
        jn_xi=[mono((PLUS[1],), 1), mono((PLUS[2],), 1)],
        jn_gdag_nn=zero, jn_gdag_n=[zero, zero],
        jn_chi_n=zero, jn_chi=[zero, zero],
    )
    fields.update(over)
    return B.PreBoundaryState(CFG, GRID, eps=1, lam=0.3, **fields)


def probe(name, s):
    lhs = B.euler_contraction_action(s, check_grade=False)
    rhs = B.boundary_action(B.reduce_bv(s), check_grade=False)
    dnum = (lhs - rhs).sup_norm()
    print(f"  {name:34s}: diff {dnum:.3e}")


An = {"gdag_nn": mono((MINUS[0],), -1), "jn_gdag_nn": mono((MINUS[0],), -1)}
Gn = {"gdag_n": [mono((MINUS[1],), -1), mono((MINUS[2],), -1)],
      "jn_gdag_n": [mono((MINUS[1],), -1), mono((MINUS[2],), -1)]}

print("== flat, multi-generator xi^n ==")
probe("gdag_nn family, jets on", mk(False, **An))
probe("gdag_nn family, jn_gdag_nn=0", mk(False, **dict(An, jn_gdag_nn=zero)))
probe("gdag_n family, jets on", mk(False, **Gn))
print("== shift on, multi-generator xi^n ==")
probe("gdag_nn family, jets on", mk(True, **An))
probe("gdag_n family, jets on", mk(True, **Gn))
probe("gdag_n family, jn_gdag_n=0",
      mk(True, **dict(Gn, jn_gdag_n=[zero, zero])))
