"""Check the hand-reduced beta-sector defect formula.

On eta=1, gamma=delta, J=0, jets-off states the scaling-identity residual
should (by hand expansion) equal

  int  -2e (b.b dxi) zeta A  - e (d b^2 . xi) zeta A
       -2e (dbeta_a xi) zeta G^a  + 2e (beta . d xi^a) zeta G^a
       -4e (beta.xi)(d zeta . G) - 2e (xi . d zeta)(beta . G)

with zeta = xi^n, A = gdag_nn, G = gdag_n.  Evaluate both and compare.
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
rng = np.random.default_rng(7)
one = GArr.body_field(CFG, GRID, np.ones(GRID.shape))


def body(amp=0.05):
    return GArr.body_field(CFG, GRID, trig_profile(GRID, rng, amp))


def mono(gens, tag, amp=0.05):
    return GArr.monomial_field(CFG, GRID, gens, tag,
                               trig_profile(GRID, rng, amp))


def mk():
    return B.PreBoundaryState(
        CFG, GRID, eps=1, lam=0.3,
        eta=one,
        beta=[body(), body()],
        gamma=sym_from(2, lambda a, b: one if a == b else zero),
        J=Sym2.zeros(CFG, GRID, 2),
        xi_n=mono((PLUS[0],), 1),
        xi=[mono((PLUS[1],), 1), mono((PLUS[2],), 1)],
        gdag_nn=mono((MINUS[0],), -1),
        gdag_n=[mono((MINUS[1],), -1), mono((MINUS[2],), -1)],
        gdag=Sym2.zeros(CFG, GRID, 2),
        chi_n=zero, chi=[zero, zero],
        jn_eta=zero, jn_beta=[zero, zero],
        jn_xin=zero, jn_xi=[zero, zero],
        jn_gdag_nn=zero, jn_gdag_n=[zero, zero],
        jn_chi_n=zero, jn_chi=[zero, zero],
    )


s = mk()
lhs = B.euler_contraction_action(s, check_grade=False)
rhs = B.boundary_action(B.reduce_bv(s), check_grade=False)
measured = lhs - rhs

d = 2
eps = 1.0
zeta = s.xi_n
xi = s.xi
A = s.gdag_nn
G = s.gdag_n
beta = s.beta

def dt(f, a):
    return f.deriv(a)

bsq = sum(beta[c] * beta[c] for c in [0, 1])
pred = GArr.zero(CFG, GRID)
# -2e (b.b dxi) zeta A
for c in range(d):
    for b in range(d):
        pred = pred + beta[c] * beta[b] * dt(xi[b], c) * zeta * A * (-2.0 * eps)
# -e (d b^2 . xi) zeta A
for c in range(d):
    pred = pred + dt(bsq, c) * xi[c] * zeta * A * (-1.0 * eps)
# -2e (dbeta_a xi^c) zeta G^a
for c in range(d):
    for a in range(d):
        pred = pred + dt(beta[a], c) * xi[c] * zeta * G[a] * (-2.0 * eps)
# +2e (beta_c dxi^a_c) zeta G^a
for c in range(d):
    for a in range(d):
        pred = pred + beta[c] * dt(xi[a], c) * zeta * G[a] * (2.0 * eps)
# -4e (beta.xi)(dzeta.G)
for c in range(d):
    for e in range(d):
        pred = pred + beta[c] * xi[c] * dt(zeta, e) * G[e] * (-4.0 * eps)
# -2e (xi.dzeta)(beta.G)
for c in range(d):
    for a in range(d):
        pred = pred + xi[c] * dt(zeta, c) * beta[a] * G[a] * (-2.0 * eps)
predicted = pred.integrate()

dm = (measured - predicted).sup_norm()
print(f"measured  sup  {measured.sup_norm():.6e}")
print(f"predicted sup  {predicted.sup_norm():.6e}")
print(f"difference     {dm:.6e}")
