"""Least-squares fit of the shift-sector scaling defect.

On eta=1, gamma=delta, J=0, chi=0, jets-off states, expand the residual
  euler_contraction_action - boundary_action(reduce_bv(.))
in a complete basis of single-derivative trilinear integrals.  The
A-sector (gdag_nn) must be quadratic in beta, the G-sector (gdag_n)
linear (index parity), so fit the two sectors separately per generator
key.
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
one = GArr.body_field(CFG, GRID, np.ones(GRID.shape))
d = 2


def build(rng):
    def body(amp):
        return GArr.body_field(CFG, GRID, trig_profile(GRID, rng, amp))

    def mono(gen, tag, amp):
        return GArr.monomial_field(CFG, GRID, (gen,), tag,
                                   trig_profile(GRID, rng, amp))

    return B.PreBoundaryState(
        CFG, GRID, eps=1, lam=0.3,
        eta=one,
        beta=[body(0.3), body(0.3)],
        gamma=sym_from(2, lambda a, b: one if a == b else zero),
        J=Sym2.zeros(CFG, GRID, 2),
        xi_n=mono(PLUS[0], 1, 0.1),
        xi=[mono(PLUS[1], 1, 0.1), mono(PLUS[2], 1, 0.1)],
        gdag_nn=mono(MINUS[0], -1, 0.1),
        gdag_n=[mono(MINUS[1], -1, 0.1), mono(MINUS[2], -1, 0.1)],
        gdag=Sym2.zeros(CFG, GRID, 2),
        chi_n=zero, chi=[zero, zero],
        jn_eta=zero, jn_beta=[zero, zero],
        jn_xin=zero, jn_xi=[zero, zero],
        jn_gdag_nn=zero, jn_gdag_n=[zero, zero],
        jn_chi_n=zero, jn_chi=[zero, zero],
    )


def coeffs(g):
    return {k: float(arr) for k, arr in g.terms.items()}


def d_(f, a):
    return f.deriv(a)


def basis_G(s):
    """One-beta trilinears with gdag_n (IBP-normalized: no derivative on G)."""
    z, xi, G, beta = s.xi_n, s.xi, s.gdag_n, s.beta
    out = []
    # b1: (d_c beta_a) xi^c z G^a
    out.append(sum((d_(beta[a], c) * xi[c] * z * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b2: beta_c (d_c xi^a) z G^a
    out.append(sum((beta[c] * d_(xi[a], c) * z * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b3: beta_a xi^c (d_c z) G^a
    out.append(sum((beta[a] * xi[c] * d_(z, c) * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b4: beta_c xi^c (d_a z) G^a
    out.append(sum((beta[c] * xi[c] * d_(z, a) * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b5: (div beta) xi^a z G^a
    out.append(sum((d_(beta[c], c) * xi[a] * z * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b6: (d_a beta_c) xi^c z G^a
    out.append(sum((d_(beta[c], a) * xi[c] * z * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b7: beta_c (d_a xi^c) z G^a
    out.append(sum((beta[c] * d_(xi[c], a) * z * G[a]
                    for a in range(d) for c in range(d)), zero))
    # b8: beta_a (div xi) z G^a
    out.append(sum((beta[a] * d_(xi[c], c) * z * G[a]
                    for a in range(d) for c in range(d)), zero))
    return [g.integrate() for g in out]


def basis_A(s):
    """Two-beta trilinears with gdag_nn (no derivative on A or z-only IBP reps)."""
    z, xi, A, beta = s.xi_n, s.xi, s.gdag_nn, s.beta
    bsq = sum((beta[c] * beta[c] for c in range(d)), zero)
    bxi = sum((beta[c] * xi[c] for c in range(d)), zero)
    out = []
    # A1: b^2 (div xi) z A
    out.append(sum((bsq * d_(xi[e], e) * z * A for e in range(d)), zero))
    # A2: b^2 xi^e (d_e z) A
    out.append(sum((bsq * xi[e] * d_(z, e) * A for e in range(d)), zero))
    # A4: (d_e b^2) xi^e z A
    out.append(sum((d_(bsq, e) * xi[e] * z * A for e in range(d)), zero))
    # A5: (b.xi)(div beta) z A
    out.append(sum((bxi * d_(beta[c], c) * z * A for c in range(d)), zero))
    # A6: (b.xi) beta_c (d_c z) A
    out.append(sum((bxi * beta[c] * d_(z, c) * A for c in range(d)), zero))
    # A8: beta_c (d_e xi^c) beta_e z A
    out.append(sum((beta[c] * d_(xi[c], e) * beta[e] * z * A
                    for c in range(d) for e in range(d)), zero))
    # A9: (d_e beta_c) xi^c beta_e z A
    out.append(sum((d_(beta[c], e) * xi[c] * beta[e] * z * A
                    for c in range(d) for e in range(d)), zero))
    return [g.integrate() for g in out]


GK, AK = [], []   # rows (per key per probe)
Gm, Am = [], []
for seed in range(12):
    rng = np.random.default_rng(100 + seed)
    s = build(rng)
    lhs = B.euler_contraction_action(s, check_grade=False)
    rhs = B.boundary_action(B.reduce_bv(s), check_grade=False)
    meas = coeffs(lhs - rhs)
    bg = [coeffs(g) for g in basis_G(s)]
    ba = [coeffs(g) for g in basis_A(s)]
    keys = set(meas)
    for cset in bg:
        keys |= set(cset)
    for cset in ba:
        keys |= set(cset)
    for k in sorted(keys):
        gens = k[0]
        mg = [g for g in gens if CFG.tag(g) == -1]
        row_g = [cset.get(k, 0.0) for cset in bg]
        row_a = [cset.get(k, 0.0) for cset in ba]
        m = meas.get(k, 0.0)
        if mg == [MINUS[0]]:
            AK.append(row_a)
            Am.append(m)
        else:
            GK.append(row_g)
            Gm.append(m)

for name, M, y, labels in [
        ("G-sector", GK, Gm, ["b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8"]),
        ("A-sector", AK, Am, ["A1", "A2", "A4", "A5", "A6", "A8", "A9"])]:
    M = np.array(M)
    y = np.array(y)
    sol, res, rank, sv = np.linalg.lstsq(M, y, rcond=None)
    fitres = np.linalg.norm(M @ sol - y)
    print(f"{name}: rows {M.shape[0]}  rank {rank}  |y| {np.linalg.norm(y):.3e}"
          f"  fit residual {fitres:.3e}")
    for lab, c in zip(labels, sol):
        print(f"   {lab}: {c:+.6f}")
