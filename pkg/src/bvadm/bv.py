"""Bulk graded structure: master action, differential, odd pairing.

The metric sector of the differential is the Lie derivative of the
assembled patch metric along the evolution ghost, written out per slice
block; the antifield sector carries the Euler-Lagrange densities plus a
ghost transport; the antighost equation is the full variational derivative
of the master action with respect to the ghost.  Component formulas are
literal, with the block signs of the odd pairing kept in conventions.py
(regression-pinned by the windowed contraction tests).
"""

from __future__ import annotations

from .conventions import (OMEGA_GHOST_COEFF, OMEGA_GHOST_SWAP,
                          OMEGA_METRIC_COEFF, OMEGA_METRIC_SWAP)
from .fields import GArr, Sym2, reciprocal
from .geometry import (SpatialGeometry, adm_lagrangian_density,
                       classical_constraints, spacetime_blocks)
from .varcalc import Direction, map_directional_derivative


def _xi_full(state):
    """Evolution ghost with the normal component in slot 0."""
    return [state.xi_n] + list(state.xi)


def _chi_full(state):
    return [state.chi_n] + list(state.chi)


def _gdag_block(state):
    """Upper-index antifield accessor over spacetime indices."""
    def up(mu, nu):
        if mu > nu:
            mu, nu = nu, mu
        if mu == 0 and nu == 0:
            return state.gdag_nn
        if mu == 0:
            return state.gdag_n[nu - 1]
        return state.gdag.g(mu - 1, nu - 1)
    return up


def lie_derivative_metric(state, geo=None):
    """(L_xi g)_{mu nu} = xi^s d_s g_{mu nu} + d_mu xi^s g_{s nu}
                          + d_nu xi^s g_{mu s},  blocks keyed (mu <= nu)."""
    geo = geo or SpatialGeometry(state.gamma)
    m, _, _ = spacetime_blocks(state.eta, state.beta, state.gamma,
                               state.eps, geo)
    N = state.d + 1
    xi = _xi_full(state)
    dxi = [[xi[s].deriv(mu) for s in range(N)] for mu in range(N)]
    out = {}
    for mu in range(N):
        for nu in range(mu, N):
            acc = None
            for s in range(N):
                t = xi[s] * m(mu, nu).deriv(s) \
                    + dxi[mu][s] * m(s, nu) + dxi[nu][s] * m(mu, s)
                acc = t if acc is None else acc + t
            out[(mu, nu)] = acc
    return out


def bv_action_density(state, geo=None) -> GArr:
    """L_slice - (L_xi g)_{mu nu} g-dag^{mu nu} + xi^s d_s xi^r chi_r."""
    geo = geo or SpatialGeometry(state.gamma)
    dens = adm_lagrangian_density(state, geo)
    lie = lie_derivative_metric(state, geo)
    up = _gdag_block(state)
    N = state.d + 1
    for mu in range(N):
        for nu in range(N):
            key = (min(mu, nu), max(mu, nu))
            dens = dens - lie[key] * up(mu, nu)
    xi = _xi_full(state)
    chi = _chi_full(state)
    for rho in range(N):
        adv = None
        for s in range(N):
            t = xi[s] * xi[rho].deriv(s)
            adv = t if adv is None else adv + t
        dens = dens + adv * chi[rho]
    return dens


def bv_action(state):
    return bv_action_density(state).integrate()


def _transport(state):
    """Antifield transport  T^{mu nu} = d_r xi^r g-dag^{mu nu}
       + xi^r d_r g-dag^{mu nu} - d_r xi^mu g-dag^{nu r}
       - d_r xi^nu g-dag^{mu r},  blocks keyed (mu <= nu)."""
    N = state.d + 1
    xi = _xi_full(state)
    up = _gdag_block(state)
    div = None
    for r in range(N):
        t = xi[r].deriv(r)
        div = t if div is None else div + t
    out = {}
    for mu in range(N):
        for nu in range(mu, N):
            acc = div * up(mu, nu)
            for r in range(N):
                acc = acc + xi[r] * up(mu, nu).deriv(r)
                acc = acc - xi[mu].deriv(r) * up(nu, r)
                acc = acc - xi[nu].deriv(r) * up(mu, r)
            out[(mu, nu)] = acc
    return out


def chi_equation(state, geo=None):
    """Variational derivative of the master action with respect to the
    ghost, one component per spacetime index:

      dS/dxi^r = -d_r g_{mu nu} g-dag^{mu nu} + 2 d_mu (g_{r nu} g-dag^{mu nu})
                 + d_r xi^s chi_s + d_s xi^s chi_r + xi^s d_s chi_r
    """
    geo = geo or SpatialGeometry(state.gamma)
    m, _, _ = spacetime_blocks(state.eta, state.beta, state.gamma,
                               state.eps, geo)
    N = state.d + 1
    up = _gdag_block(state)
    xi = _xi_full(state)
    chi = _chi_full(state)
    out = []
    for rho in range(N):
        acc = None
        for mu in range(N):
            for nu in range(N):
                t = m(mu, nu).deriv(rho) * up(mu, nu) * (-1.0) \
                    + (m(rho, nu) * up(mu, nu)).deriv(mu) * 2.0
                acc = t if acc is None else acc + t
        for s in range(N):
            acc = acc + xi[s].deriv(rho) * chi[s] \
                + xi[s].deriv(s) * chi[rho] + xi[s] * chi[rho].deriv(s)
        out.append(acc)
    return out


def apply_Q_bulk(state) -> Direction:
    """The bulk differential, all ten slots, ghost shift +1."""
    geo = SpatialGeometry(state.gamma)
    d = state.d
    eps = float(state.eps)
    xi = _xi_full(state)

    def adv(f):
        acc = None
        for s in range(d + 1):
            t = xi[s] * f.deriv(s)
            acc = t if acc is None else acc + t
        return acc

    beta_up = geo.raise1(state.beta)
    beta_sq = None
    for a in range(d):
        t = state.beta[a] * beta_up[a]
        beta_sq = t if beta_sq is None else beta_sq + t

    dn_xin = state.xi_n.deriv(0)
    q_eta = adv(state.eta) + dn_xin * state.eta
    for a in range(d):
        q_eta = q_eta - state.eta * beta_up[a] * state.xi_n.deriv(a + 1)

    q_beta = []
    for a in range(d):
        t = adv(state.beta[a]) + dn_xin * state.beta[a] \
            + state.xi_n.deriv(a + 1) * (beta_sq - state.eta * state.eta)
        for b in range(d):
            t = t + state.xi[b].deriv(0) * state.gamma.g(a, b) \
                + state.xi[b].deriv(a + 1) * state.beta[b]
        q_beta.append(t)

    q_gamma = Sym2(d)
    for a in range(d):
        for b in range(a, d):
            t = adv(state.gamma.g(a, b)) \
                + state.xi_n.deriv(a + 1) * state.beta[b] \
                + state.xi_n.deriv(b + 1) * state.beta[a]
            for c in range(d):
                t = t + state.xi[c].deriv(a + 1) * state.gamma.g(c, b) \
                    + state.xi[c].deriv(b + 1) * state.gamma.g(c, a)
            q_gamma.comp[(a, b)] = t

    q_xi_n = adv(state.xi_n)
    q_xi = [adv(state.xi[a]) for a in range(d)]

    g_eta, g_beta, g_gamma = classical_constraints(state, geo)
    T = _transport(state)
    eta_inv = reciprocal(state.eta)
    q_gdag_nn = g_eta * eta_inv * (-0.5 * eps) + T[(0, 0)]
    q_gdag_n = []
    for a in range(d):
        t = g_beta[a] * (0.5 * eps) \
            + beta_up[a] * eta_inv * g_eta * (0.5 * eps) + T[(0, a + 1)]
        q_gdag_n.append(t)
    q_gdag = Sym2(d)
    for a in range(d):
        for b in range(a, d):
            q_gdag.comp[(a, b)] = g_gamma.g(a, b) * eps \
                - beta_up[a] * beta_up[b] * eta_inv * g_eta * (0.5 * eps) \
                + T[(a + 1, b + 1)]

    chi_eq = chi_equation(state, geo)
    return Direction({"eta": q_eta, "beta": q_beta, "gamma": q_gamma,
                      "xi_n": q_xi_n, "xi": q_xi,
                      "gdag_nn": q_gdag_nn, "gdag_n": q_gdag_n,
                      "gdag": q_gdag,
                      "chi_n": chi_eq[0], "chi": chi_eq[1:]},
                     shift=1)


def q_square_residual(state, slots=None) -> dict:
    """Per-slot sup norm of Q applied twice (the graded self-bracket)."""
    X = apply_Q_bulk(state)
    QQ = map_directional_derivative(apply_Q_bulk, state, X, out_shift=2)
    out = {}
    for name, val in QQ.comps.items():
        if slots is not None and name not in slots:
            continue
        if isinstance(val, Sym2):
            out[name] = val.sup_norm()
        elif isinstance(val, list):
            out[name] = max(v.sup_norm() for v in val)
        else:
            out[name] = val.sup_norm()
    return out


# ----------------------------------------------------------------------
# odd pairing
# ----------------------------------------------------------------------

def _zero(state):
    return GArr.zero(state.config, state.grid)


def _dir_metric_lower(state, X, geo):
    """Lower-index metric variation induced by an ADM-slot direction:
       dg_nn = eps(-2 eta X_eta + 2 beta^a X_beta_a - beta^a beta^b X_g_ab),
       dg_na = eps X_beta_a,  dg_ab = eps X_gamma_ab."""
    d = state.d
    eps = float(state.eps)
    x_eta = X.comps.get("eta")
    x_beta = X.comps.get("beta")
    x_gamma = X.comps.get("gamma")
    if x_eta is None and x_beta is None and x_gamma is None:
        return None
    beta_up = geo.raise1(state.beta)
    nn = _zero(state)
    if x_eta is not None:
        nn = nn - state.eta * x_eta * 2.0
    if x_beta is not None:
        for a in range(d):
            nn = nn + beta_up[a] * x_beta[a] * 2.0
    if x_gamma is not None:
        for a in range(d):
            for b in range(d):
                nn = nn - beta_up[a] * beta_up[b] * x_gamma.g(a, b)
    blocks = {(0, 0): nn * eps}
    for a in range(d):
        blocks[(0, a + 1)] = (x_beta[a] * eps) if x_beta is not None \
            else _zero(state)
        for b in range(a, d):
            blocks[(a + 1, b + 1)] = (x_gamma.g(a, b) * eps) \
                if x_gamma is not None else _zero(state)
    return blocks


def _dir_gdag(state, X):
    nn = X.comps.get("gdag_nn")
    na = X.comps.get("gdag_n")
    ab = X.comps.get("gdag")
    if nn is None and na is None and ab is None:
        return None

    def up(mu, nu):
        if mu > nu:
            mu, nu = nu, mu
        if mu == 0 and nu == 0:
            return nn if nn is not None else _zero(state)
        if mu == 0:
            return na[nu - 1] if na is not None else _zero(state)
        return ab.g(mu - 1, nu - 1) if ab is not None else _zero(state)
    return up


def _metric_pair(state, X, Y, geo):
    dg = _dir_metric_lower(state, X, geo)
    up = _dir_gdag(state, Y)
    if dg is None or up is None:
        return None
    N = state.d + 1
    acc = None
    for mu in range(N):
        for nu in range(N):
            t = dg[(min(mu, nu), max(mu, nu))] * up(mu, nu)
            acc = t if acc is None else acc + t
    return acc


def _ghost_pair(state, X, Y):
    xs = [X.comps.get("xi_n")] + list(X.comps.get("xi") or [None] * state.d)
    ys = [Y.comps.get("chi_n")] + list(Y.comps.get("chi") or [None] * state.d)
    acc = None
    for rho in range(state.d + 1):
        if xs[rho] is None or ys[rho] is None:
            continue
        t = xs[rho] * ys[rho]
        acc = t if acc is None else acc + t
    return acc


def omega_bv(state, X, Y, geo=None):
    """The odd pairing evaluated on two tangent directions:

      Omega(X, Y) = C_M int [ dg(X).g-dag(Y) + S_M (-1)^{|X||Y|} dg(Y).g-dag(X) ]
                  + C_G int [ xi(X).chi(Y)   + S_G (-1)^{|X||Y|} xi(Y).chi(X) ]

    with the four block constants frozen in conventions.py.
    """
    geo = geo or SpatialGeometry(state.gamma)
    sign = -1.0 if (X.shift % 2) and (Y.shift % 2) else 1.0
    total = None

    t = _metric_pair(state, X, Y, geo)
    if t is not None:
        t = t * OMEGA_METRIC_COEFF
        total = t if total is None else total + t
    t = _metric_pair(state, Y, X, geo)
    if t is not None:
        t = t * (OMEGA_METRIC_COEFF * OMEGA_METRIC_SWAP * sign)
        total = t if total is None else total + t

    t = _ghost_pair(state, X, Y)
    if t is not None:
        t = t * OMEGA_GHOST_COEFF
        total = t if total is None else total + t
    t = _ghost_pair(state, Y, X)
    if t is not None:
        t = t * (OMEGA_GHOST_COEFF * OMEGA_GHOST_SWAP * sign)
        total = t if total is None else total + t

    if total is None:
        total = _zero(state)
    return total.integrate()
