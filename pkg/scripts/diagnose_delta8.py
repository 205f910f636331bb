"""Least-squares decomposition of the ghost-transport defect.

On a flat background with only gdag_n populated, the reduced action's
phi-terms nearly vanish while the scaling contraction produces real
content.  Fit the difference against the small basis of one-derivative
ghost-pair densities that can appear in the xi^a sector.
"""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.fields import GArr, PeriodicGrid, Sym2
from bvadm.geometry import sum_garr, sym_from
from bvadm.presets import default_config, trig_profile

CFG = default_config(12)
GRID = PeriodicGrid((16, 16))
zero = GArr.zero(CFG, GRID)
PLUS = [i for i in range(12) if CFG.tag(i) == 1]
MINUS = [i for i in range(12) if CFG.tag(i) == -1]
rng = np.random.default_rng(7)
one = GArr.body_field(CFG, GRID, np.ones(GRID.shape))


def mono(gens, tag, amp=0.05):
    return GArr.monomial_field(CFG, GRID, gens, tag,
                               trig_profile(GRID, rng, amp))


def mk():
    return B.PreBoundaryState(
        CFG, GRID,
        eta=one, beta=[zero, zero],
        gamma=sym_from(2, lambda a, b: one if a == b else zero),
        J=Sym2.zeros(CFG, GRID, 2),
        xi_n=mono((PLUS[0],), 1),
        xi=[mono((PLUS[1],), 1), mono((PLUS[2],), 1)],
        gdag_nn=zero,
        gdag_n=[mono((MINUS[1],), -1), mono((MINUS[2],), -1)],
        gdag=Sym2.zeros(CFG, GRID, 2),
        chi_n=zero, chi=[zero, zero],
        jn_eta=zero, jn_beta=[zero, zero],
        jn_xin=mono((PLUS[0],), 1),
        jn_xi=[mono((PLUS[1],), 1), mono((PLUS[2],), 1)],
        jn_gdag_nn=zero,
        jn_gdag_n=[mono((MINUS[1],), -1), mono((MINUS[2],), -1)],
        jn_chi_n=zero, jn_chi=[zero, zero],
        eps=1, lam=0.3)


s = mk()
ds = B.reduce_bv(s)
lhs = B.euler_contraction_action(s, check_grade=False)
rhs = B.boundary_action(ds, check_grade=False)
delta = lhs - rhs
print(f"|delta| {delta.sup_norm():.6e}")

d = 2
geo = B.SpatialGeometry(ds.gamma)


def dt(f, a):
    return geo.dt(f, a)


# candidate densities (integrated): xi^a-sector ghost transport shapes
cands = {
    "A4  phi_a d_c xi^c xi^a":
        sum_garr(ds.phi[a] * dt(ds.bxi[c], c) * ds.bxi[a]
                 for a in range(d) for c in range(d)),
    "A5  d_c phi_a xi^c xi^a":
        sum_garr(dt(ds.phi[a], c) * ds.bxi[c] * ds.bxi[a]
                 for a in range(d) for c in range(d)),
    "A7  phi_c d_a xi^c xi^a":
        sum_garr(ds.phi[c] * dt(ds.bxi[c], a) * ds.bxi[a]
                 for a in range(d) for c in range(d)),
    "A8  phi_a d_a xi^n xi^n (up)":
        sum_garr(geo.inv.g(a, b) * ds.phi[b] * dt(ds.bxi_n, a) * ds.bxi_n
                 for a in range(d) for b in range(d)),
    "A9  jn cross d_c jn_xi":
        zero,
}
del cands["A9  jn cross d_c jn_xi"]

ints = {k: v.integrate() for k, v in cands.items()}

# collect all keys
keys = set(delta.terms.keys())
for v in ints.values():
    keys.update(v.terms.keys())
keys = sorted(keys)
A = np.zeros((len(keys), len(ints)))
b = np.zeros(len(keys))
for i, key in enumerate(keys):
    b[i] = delta.terms.get(key, 0.0)
    for j, v in enumerate(ints.values()):
        A[i, j] = v.terms.get(key, 0.0)
coef, res, rank, sv = np.linalg.lstsq(A, b, rcond=None)
fit = A @ coef
print("rank", rank)
for name, c in zip(ints, coef):
    print(f"  {name}: {c:+.6f}")
print(f"residual sup {np.abs(b - fit).max():.3e}  (rhs sup {np.abs(b).max():.3e})")
print("top delta keys:")
order = np.argsort(-np.abs(b))
for i in order[:8]:
    print(f"  {keys[i]}: {b[i]:+.6e}")
