"""Locate the Grassmann monomials carrying the S_tilde mismatch.

Enriches every odd slot with a second generator so that no structure
density degenerates, subtracts the full current boundary action pullback,
and prints the largest terms with their generator content, classified by
which slot families the generators came from.
"""

import sys

import numpy as np

sys.path.insert(0, "src")

from bvadm import boundary as B
from bvadm.fields import GArr, PeriodicGrid, Sym2
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


def enrich(s, seed):
    """Second generator on each odd slot, with jets kept consistent:
    jn_* slots for the added pieces use fresh profiles too (the state is
    synthetic, jets need not match any bulk extension)."""
    rng = np.random.default_rng(seed + 900)

    def mono(gens, tag, amp=0.03):
        return GArr.monomial_field(CFG, GRID, gens, tag,
                                   trig_profile(GRID, rng, amp))

    over = {
        "xi_n": s.xi_n + mono((PLUS[3],), 1),
        "xi": [s.xi[0] + mono((PLUS[4],), 1),
               s.xi[1] + mono((PLUS[5],), 1)],
        "gdag_nn": s.gdag_nn + mono((MINUS[4],), -1),
        "gdag_n": [s.gdag_n[0] + mono((MINUS[5],), -1), s.gdag_n[1]],
        "jn_xin": s.jn_xin + mono((PLUS[3],), 1),
        "jn_xi": [s.jn_xi[0] + mono((PLUS[4],), 1),
                  s.jn_xi[1] + mono((PLUS[5],), 1)],
        "jn_gdag_nn": s.jn_gdag_nn + mono((MINUS[4],), -1),
        "jn_gdag_n": [s.jn_gdag_n[0] + mono((MINUS[5],), -1),
                      s.jn_gdag_n[1]],
    }
    return s.replaced(**over) if hasattr(s, "replaced") else _rebuild(s, over)


def _rebuild(s, over):
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


def gen_family(i):
    if i in PLUS:
        j = PLUS.index(i)
        return ["xi_n", "xi0", "xi1", "xi_n+", "xi0+", "xi1+"][j]
    j = MINUS.index(i)
    return ["chiA", "chiB", "chiC", "chiD", "gdag*", "gdag*+"][j] \
        if j < 6 else f"m{j}"


s0 = random_preboundary(CFG, GRID, seed=3, amp=0.04, with_jets=True)
s = _rebuild(s0, {})
s = enrich(s, 3)

st = B.euler_contraction_action(s)
ds = B.reduce_bv(s)
full = B.boundary_action(ds, check_grade=False)
delta = st - full
print("S~ sup:", st.sup_norm(), " delta sup:", delta.sup_norm())
items = sorted(delta.terms.items(), key=lambda kv: -abs(kv[1]))
print("top monomials of delta:")
for (gens, gh), c in items[:14]:
    fam = ",".join(gen_family(g) for g in gens)
    print(f"  gens {gens} [{fam}] ghost {gh}: {c:+.6e}")

# also: which random_preboundary slots map to which generators
print("\nslot generator content:")
for name in ("xi_n", "gdag_nn", "chi_n"):
    v = getattr(s0, name)
    print(f"  {name}: {sorted(set(g for (gens, _) in v.terms for g in gens)) if hasattr(v, 'terms') else [sorted(set(g for (gens, _) in c.terms for g in gens)) for c in v]}")
for name in ("xi", "gdag_n", "chi"):
    v = getattr(s0, name)
    print(f"  {name}: {[sorted(set(g for (gens, _) in c.terms for g in gens)) for c in v]}")
