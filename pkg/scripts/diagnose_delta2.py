"""Slot-by-slot isolation of the S_tilde identity leak."""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.fields import GArr, PeriodicGrid
from bvadm.geometry import SpatialGeometry
from bvadm.presets import default_config, random_preboundary, trig_profile

B.ALPHA_XI_GDAG = 1.0
B.ALPHA_METRIC_GDAG = -1.0
B.ALPHA_XI_CHI = -1.0
B.CHI_REDUCTION_SIGN = -1.0
B.BOUNDARY_GHOST_PAIR = 1.0
B.PI_SLOT_SIGN = 1.0
B.PHI_SLOT_SIGN = 1.0
B.EULER_CONTRACTION_SIGN = -1.0

CFG = default_config(12)
GRID = PeriodicGrid((16, 16))
PLUS = [i for i in range(12) if CFG.tag(i) == 1]
MINUS = [i for i in range(12) if CFG.tag(i) == -1]


def rebuild(s, **over):
    kw = dict(
        eta=s.eta, beta=s.beta, gamma=s.gamma, J=s.J,
        xi_n=s.xi_n, xi=s.xi, gdag_nn=s.gdag_nn, gdag_n=s.gdag_n,
        gdag=s.gdag, chi_n=s.chi_n, chi=s.chi,
        jn_eta=s.jn_eta, jn_beta=s.jn_beta, jn_xin=s.jn_xin, jn_xi=s.jn_xi,
        jn_gdag_nn=s.jn_gdag_nn, jn_gdag_n=s.jn_gdag_n,
        jn_chi_n=s.jn_chi_n, jn_chi=s.jn_chi, eps=s.eps, lam=s.lam,
    )
    kw.update(over)
    return type(s)(s.config, s.grid, **kw)


def delta_of(s):
    st = B.euler_contraction_action(s)
    full = B.boundary_action(B.reduce_bv(s), check_grade=False)
    return st, st - full


def top(d, k=6):
    items = sorted(d.terms.items(), key=lambda kv: -abs(kv[1]))
    return "  ".join(f"{gens}:{c:+.2e}" for (gens, _), c in items[:k]) \
        or "(empty)"


s0 = random_preboundary(CFG, GRID, seed=3, amp=0.04, with_jets=True)
rng = np.random.default_rng(77)


def mono(gens, tag, amp=0.03):
    return GArr.monomial_field(CFG, GRID, gens, tag,
                               trig_profile(GRID, rng, amp))


zero_ghosts = dict(
    gdag_nn=s0.gdag_nn * 0.0, gdag_n=[g * 0.0 for g in s0.gdag_n],
    gdag=s0.gdag.scaled(0.0), chi_n=s0.chi_n * 0.0,
    chi=[c * 0.0 for c in s0.chi],
    jn_gdag_nn=s0.jn_gdag_nn * 0.0,
    jn_gdag_n=[g * 0.0 for g in s0.jn_gdag_n],
    jn_chi_n=s0.jn_chi_n * 0.0, jn_chi=[c * 0.0 for c in s0.jn_chi],
)

cases = {
    "base (seed 3)": {},
    "xi sector only": zero_ghosts,
    "base + jn_xin bump": dict(jn_xin=s0.jn_xin + mono((PLUS[3],), 1)),
    "base + xi_n bump": dict(xi_n=s0.xi_n + mono((PLUS[3],), 1)),
    "base + both bumps": dict(xi_n=s0.xi_n + mono((PLUS[3],), 1),
                              jn_xin=s0.jn_xin + mono((PLUS[3],), 1)),
    "xi sector only + jn_xin bump": dict(
        zero_ghosts, jn_xin=s0.jn_xin + mono((PLUS[3],), 1)),
}
for name, over in cases.items():
    s = rebuild(s0, **over)
    st, d = delta_of(s)
    print(f"{name}:")
    print(f"  S~ sup {st.sup_norm():.3e}  delta sup {d.sup_norm():.3e}")
    print(f"  top: {top(d)}")
