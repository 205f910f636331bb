"""Pointwise-vs-field evaluation of the pre-boundary two-form, and the
reduced pairing, on the momentum-quadratic background."""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.fields import GArr, PeriodicGrid, Sym2
from bvadm.geometry import sym_from
from bvadm.presets import default_config, trig_profile
from bvadm.varcalc import Direction, directional_derivative, fieldspace_bracket

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
zero = GArr.zero(CFG, GRID)
one = GArr.body_field(CFG, GRID, np.ones(GRID.shape))
PLUS = [i for i in range(12) if CFG.tag(i) == 1]
rng = np.random.default_rng(10)


def body(amp=0.05):
    return GArr.body_field(CFG, GRID, trig_profile(GRID, rng, amp))


def make(curved, withJ):
    gamma = sym_from(2, lambda a, b: (body(0.05) if curved else zero)
                     + (one if a == b else zero))
    J = sym_from(2, lambda a, b: body(0.05)) if withJ \
        else Sym2.zeros(CFG, GRID, 2)
    return B.PreBoundaryState(
        CFG, GRID, eta=one, beta=[zero, zero], gamma=gamma, J=J,
        xi_n=GArr.monomial_field(CFG, GRID, (PLUS[0],), 1,
                                 trig_profile(GRID, rng, 0.05)),
        xi=[GArr.monomial_field(CFG, GRID, (PLUS[1 + a],), 1,
            trig_profile(GRID, rng, 0.05)) for a in range(2)],
        gdag_nn=zero, gdag_n=[zero, zero], gdag=Sym2.zeros(CFG, GRID, 2),
        chi_n=zero, chi=[zero, zero], jn_eta=zero, jn_beta=[zero, zero],
        jn_xin=GArr.monomial_field(CFG, GRID, (PLUS[0],), 1,
                                   trig_profile(GRID, rng, 0.05)),
        jn_xi=[GArr.monomial_field(CFG, GRID, (PLUS[1 + a],), 1,
               trig_profile(GRID, rng, 0.05)) for a in range(2)],
        jn_gdag_nn=zero, jn_gdag_n=[zero, zero],
        jn_chi_n=zero, jn_chi=[zero, zero], eps=1, lam=0.3)


def report(name, s):
    E_s, Q_s = B.euler_vector(s), B.qtilde(s)
    t1 = directional_derivative(
        lambda st: B.alpha_tilde_bv(st, B.qtilde(st), check_grade=False),
        s, E_s, check_grade=False)
    t2 = directional_derivative(
        lambda st: B.alpha_tilde_bv(st, B.euler_vector(st),
                                    check_grade=False),
        s, Q_s, check_grade=False)
    br = fieldspace_bracket(B.euler_vector, B.qtilde, s, 0, 1)
    t3 = B.alpha_tilde_bv(s, br, check_grade=False)
    wfield = t1 - t2 - t3

    # frozen-argument evaluation of the same two-form
    t1c = directional_derivative(
        lambda st: B.alpha_tilde_bv(st, Q_s, check_grade=False),
        s, E_s, check_grade=False)
    t2c = directional_derivative(
        lambda st: B.alpha_tilde_bv(st, E_s, check_grade=False),
        s, Q_s, check_grade=False)
    wconst = t1c - t2c

    ds = B.reduce_bv(s)
    rhs = B.boundary_action(ds, check_grade=False)
    dpiQ = B.reduction_tangent(s, Q_s)
    dpiE = B.reduction_tangent(s, E_s)
    wred = B.omega_boundary(ds, dpiE, dpiQ)

    print(f"{name}:")
    print(f"  pi*S sup {rhs.sup_norm():.4e}")
    for lab, v in (("w_field", wfield), ("w_const", wconst), ("w_red", wred)):
        print(f"  {lab}: -pi*S {(v - rhs).sup_norm():.3e}   "
              f"+pi*S {(v + rhs).sup_norm():.3e}")
    print(f"  t1 {t1.sup_norm():.3e}  t2 {t2.sup_norm():.3e}  "
          f"t3 {t3.sup_norm():.3e}  t1c {t1c.sup_norm():.3e}  "
          f"t2c {t2c.sup_norm():.3e}")
    print(f"  t1-t3 {(t1 - t3).sup_norm():.3e}   t2-t2c "
          f"{(t2 - t2c).sup_norm():.3e}   t1c-t1 {(t1c - t1).sup_norm():.3e}")


report("A curvature sector", make(True, False))
report("B momentum sector", make(False, True))
