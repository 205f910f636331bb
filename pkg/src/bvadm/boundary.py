"""Boundary-face structures: pre-boundary forms, their kernel, reduction.

The bulk data restricted to the x^n = 0 face carries the first normal jets
of the fields the boundary forms read.  The one-form is the boundary flux
of the action variation; the two-form is its functional exterior
derivative, evaluated with the three-term formula (bracket-corrected when
the arguments are state-dependent vector fields).  The kernel of the
two-form is spanned by closed-form generator families; quotienting by
their flows lands on Darboux data (gamma, Pi, xi, phi) on which the
boundary action, constraints and residual differential are written.  All
block and slot signs live in conventions.py and are regression-pinned by
the horizontality / pullback / pairing batteries, not transcribed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conventions import (ALPHA_METRIC_GDAG, ALPHA_XI_CHI, ALPHA_XI_GDAG,
                          BOUNDARY_GHOST_PAIR, CHI_REDUCTION_SIGN,
                          EULER_CONTRACTION_SIGN, MOMENTUM_DIV_COEFF,
                          OMEGA_TILDE_DISPLAY_SIGN, PHI_SLOT_SIGN,
                          PI_SLOT_SIGN)
from .errors import DimensionUnsupported, GradeMismatch, MissingJets
from .fields import GArr, Sym2, reciprocal, sym_inverse
from .geometry import (SpatialGeometry, chris_get, classical_constraints,
                       extrinsic_data, sum_garr, sym_from)
from .grassmann import Mixed, PureZero
from .states import DarbouxState, PreBoundaryState
from .varcalc import (Direction, directional_derivative, fieldspace_bracket,
                      map_directional_derivative)


def _check_dim(d):
    if d < 2:
        raise DimensionUnsupported(
            "boundary reduction needs at least two tangential directions")


def _zero_scalar(state):
    return GArr.zero(state.config, state.grid).integrate()


def _grade_guard(val, expected, what):
    g = val.ghost_grade()
    if g is Mixed:
        raise GradeMismatch(f"{what}: value is grade-mixed")
    if isinstance(g, int) and g != expected:
        raise GradeMismatch(f"{what}: grade {g}, expected {expected}")
    return val


class StateVectorField:
    """State-dependent tangent field: callable state -> Direction.

    The shift is the field's own ghost grade; it routes the graded
    derivative machinery exactly like Direction.shift does.
    """

    __slots__ = ("fn", "shift")

    def __init__(self, fn, shift):
        self.fn = fn
        self.shift = int(shift)

    def __call__(self, state) -> Direction:
        return self.fn(state)


# ----------------------------------------------------------------------
# restriction
# ----------------------------------------------------------------------

def restrict_to_boundary(state) -> PreBoundaryState:
    """Slice a bulk state onto the x^n = 0 face, keeping first normal jets.

    The induced slot J is the normal jet of gamma; the other jets kept are
    exactly the ones the boundary one-form and the restricted differential
    read (lapse, shift, ghosts, normal-leg antifields, antighosts).
    """
    bgrid = state.grid.boundary

    def r(f):
        return f.restrict_boundary(bgrid)

    def rj(f):
        return f.deriv(0).restrict_boundary(bgrid)

    return PreBoundaryState(
        state.config, bgrid,
        eta=r(state.eta), beta=[r(v) for v in state.beta],
        gamma=state.gamma.map(r), J=state.gamma.map(rj),
        xi_n=r(state.xi_n), xi=[r(v) for v in state.xi],
        gdag_nn=r(state.gdag_nn), gdag_n=[r(v) for v in state.gdag_n],
        gdag=state.gdag.map(r),
        chi_n=r(state.chi_n), chi=[r(v) for v in state.chi],
        jn_eta=rj(state.eta), jn_beta=[rj(v) for v in state.beta],
        jn_xin=rj(state.xi_n), jn_xi=[rj(v) for v in state.xi],
        jn_gdag_nn=rj(state.gdag_nn), jn_gdag_n=[rj(v) for v in state.gdag_n],
        jn_chi_n=rj(state.chi_n), jn_chi=[rj(v) for v in state.chi],
        eps=state.eps, lam=state.lam)


# ----------------------------------------------------------------------
# shared variational pieces
# ----------------------------------------------------------------------

def _beta_up(state, geo):
    return geo.raise1(state.beta)


def _beta_sq(state, geo):
    bu = geo.raise1(state.beta)
    return sum_garr(state.beta[a] * bu[a] for a in range(state.d))


def _metric_pair_variation(state, X, geo):
    """delta(sqrt(gamma) gamma^{ab})(X) as a Sym2, upper indices."""
    Xg = X.comps.get("gamma")
    if Xg is None:
        return None
    d = state.d
    ginv = geo.inv
    trX = geo.trace(Xg)
    dsqrt = geo.sqrtg * trX * 0.5

    def comp(a, b):
        up = None
        for c in range(d):
            for e in range(d):
                t = ginv.g(a, c) * ginv.g(b, e) * Xg.g(c, e)
                up = t if up is None else up + t
        return dsqrt * ginv.g(a, b) - geo.sqrtg * up
    return sym_from(d, comp)


def _inverse_metric_variation(state, X, geo):
    """delta gamma^{ab}(X) = -gamma^{ac} gamma^{bd} X_cd."""
    Xg = X.comps.get("gamma")
    if Xg is None:
        return None
    ginv = geo.inv

    def comp(a, b):
        acc = None
        for c in range(state.d):
            for e in range(state.d):
                t = ginv.g(a, c) * ginv.g(b, e) * Xg.g(c, e)
                acc = t if acc is None else acc + t
        return acc * (-1.0)
    return sym_from(state.d, comp)


def _normal_block_variation(state, X, geo):
    """delta(-eta^2 + beta_a beta^a)(X).

    The shift square is beta_a beta_b gamma^{ab}, so metric variations
    contribute -beta^a beta^b X_gamma_ab alongside the explicit eta and
    beta legs.
    """
    d = state.d
    bu = geo.raise1(state.beta)
    acc = GArr.zero(state.config, state.grid)
    Xe = X.comps.get("eta")
    if Xe is not None:
        acc = acc - state.eta * Xe * 2.0
    Xb = X.comps.get("beta")
    if Xb is not None:
        for a in range(d):
            acc = acc + bu[a] * Xb[a] * 2.0
    Xg = X.comps.get("gamma")
    if Xg is not None:
        for a in range(d):
            for b in range(d):
                acc = acc - bu[a] * bu[b] * Xg.g(a, b)
    return acc


# ----------------------------------------------------------------------
# pre-boundary one-forms
# ----------------------------------------------------------------------

def _metric_flux_density(state, X, geo, ex):
    """2 eps { delta(sqrt(g) g^{ab})(X) K_ab - (sqrt(g)/2) delta g^{ab}(X) K_ab }.

    The variation stays on the metric pair; the extrinsic factor rides
    along as a coefficient (it is invariant along the kernel, which is what
    makes the one-form horizontal).
    """
    dgg = _metric_pair_variation(state, X, geo)
    if dgg is None:
        return None
    dginv = _inverse_metric_variation(state, X, geo)
    eps = float(state.eps)
    acc = None
    for a in range(state.d):
        for b in range(state.d):
            t = (dgg.g(a, b) - geo.sqrtg * dginv.g(a, b) * 0.5) * ex.K.g(a, b)
            acc = t if acc is None else acc + t
    return acc * (2.0 * eps)


def alpha_tilde_classical(state, X, geo=None, ex=None, check_grade=True):
    """Boundary flux one-form of the slice action on (eta, beta, gamma, J).

    Only the metric variation enters: X components on the lapse, shift and
    jet slots are annihilated (that is the horizontality that makes the
    classical reduction work, and it matches the bulk/boundary split of the
    action variation, which has no normal-jet leg either).
    """
    geo = geo or SpatialGeometry(state.gamma)
    ex = ex or extrinsic_data(state.eta, state.beta, state.J, geo)
    dens = _metric_flux_density(state, X, geo, ex)
    if dens is None:
        return _zero_scalar(state)
    val = dens.integrate()
    if check_grade:
        _grade_guard(val, X.shift, "alpha_tilde_classical")
    return val


def alpha_tilde_bv(state, X, geo=None, check_grade=True):
    """Graded pre-boundary one-form: metric flux plus three ghost blocks.

    Block structure (signs from conventions.py):
      metric flux               as in alpha_tilde_classical;
      ghost/antifield           2 eps int (-eta^2+beta^2) dxi^n gdag^nn + ...;
      metric-variation/ghost    -eps int xi^n delta(-eta^2+beta^2) gdag^nn + ...;
      ghost/antighost           -int xi^n dxi^rho chi_rho.
    """
    geo = geo or SpatialGeometry(state.gamma)
    ex = extrinsic_data(state.eta, state.beta, state.J, geo)
    d = state.d
    eps = float(state.eps)
    zero = GArr.zero(state.config, state.grid)
    dens = _metric_flux_density(state, X, geo, ex)
    dens = zero if dens is None else dens

    bu = geo.raise1(state.beta)
    bsq = _beta_sq(state, geo)
    nblock = bsq - state.eta * state.eta   # (-eta^2 + beta_a beta^a)

    Xxin = X.comps.get("xi_n")
    Xxi = X.comps.get("xi")
    if Xxin is not None or Xxi is not None:
        blk = zero
        if Xxin is not None:
            blk = blk + nblock * (Xxin * state.gdag_nn)
            for a in range(d):
                blk = blk + state.beta[a] * (Xxin * state.gdag_n[a])
        if Xxi is not None:
            for a in range(d):
                blk = blk + state.beta[a] * (Xxi[a] * state.gdag_nn)
                for b in range(d):
                    blk = blk + state.gamma.g(a, b) * (Xxi[a] * state.gdag_n[b])
        dens = dens + blk * (2.0 * eps * ALPHA_XI_GDAG)

    dm = _normal_block_variation(state, X, geo)
    if not dm.is_zero() or X.comps.get("beta") is not None \
            or X.comps.get("gamma") is not None:
        blk = state.xi_n * dm * state.gdag_nn
        Xb = X.comps.get("beta")
        if Xb is not None:
            for a in range(d):
                blk = blk + state.xi_n * Xb[a] * state.gdag_n[a] * 2.0
        Xg = X.comps.get("gamma")
        if Xg is not None:
            for a in range(d):
                for b in range(d):
                    blk = blk + state.xi_n * Xg.g(a, b) * state.gdag.g(a, b)
        dens = dens + blk * (-eps * ALPHA_METRIC_GDAG)

    if Xxin is not None or Xxi is not None:
        blk = zero
        if Xxin is not None:
            # normal-normal leg: opposite sign to the tangential legs (the
            # m_00 dressing of the antighost equation flips there)
            blk = blk + state.xi_n * Xxin * state.chi_n * (-1.0)
        if Xxi is not None:
            for a in range(d):
                blk = blk + state.xi_n * Xxi[a] * state.chi[a]
        dens = dens + blk * (-1.0 * ALPHA_XI_CHI)

    val = dens.integrate()
    if check_grade:
        _grade_guard(val, X.shift, "alpha_tilde_bv")
    return val


# ----------------------------------------------------------------------
# two-forms
# ----------------------------------------------------------------------

def two_form_from_one_form(alpha, state, X, Y):
    """(delta alpha)(X, Y) by the three-term formula.

    X and Y are constant Directions or state-dependent fields (callables
    with a shift).  For field arguments the field-space bracket term is
    included; for constants it drops.  alpha is any (state, direction) ->
    GradedScalar map that is linear in the direction.
    """
    xf = None if isinstance(X, Direction) else X
    yf = None if isinstance(Y, Direction) else Y
    Xd = X if xf is None else xf(state)
    Yd = Y if yf is None else yf(state)
    sgn = -1.0 if (Xd.shift % 2) and (Yd.shift % 2) else 1.0

    fy = (lambda s: alpha(s, Yd)) if yf is None else (lambda s: alpha(s, yf(s)))
    fx = (lambda s: alpha(s, Xd)) if xf is None else (lambda s: alpha(s, xf(s)))
    out = directional_derivative(fy, state, Xd, check_grade=False) \
        - directional_derivative(fx, state, Yd, check_grade=False) * sgn
    if xf is not None or yf is not None:
        xmap = xf if xf is not None else (lambda s: Xd)
        ymap = yf if yf is not None else (lambda s: Yd)
        br = fieldspace_bracket(xmap, ymap, state, Xd.shift, Yd.shift)
        out = out - alpha(state, br)
    return out


def omega_tilde(state, X, Y):
    """Pre-boundary two-form (functional exterior derivative of the
    boundary one-form); dispatches on the state flavour."""
    if isinstance(state, PreBoundaryState):
        def alpha(s, D):
            return alpha_tilde_bv(s, D, check_grade=False)
    else:
        def alpha(s, D):
            return alpha_tilde_classical(s, D, check_grade=False)
    return two_form_from_one_form(alpha, state, X, Y)


def _cov_deriv_sym(geo, S):
    """nabla_a S_bc for a symmetric lower tensor; accessor (a, b, c)."""
    G = chris_get(geo.chris)
    d = geo.d
    cache = {}
    for a in range(d):
        for b in range(d):
            for c in range(b, d):
                t = geo.dt(S.g(b, c), a)
                for e in range(d):
                    t = t - G(e, a, b) * S.g(e, c) - G(e, a, c) * S.g(b, e)
                cache[(a, b, c)] = t

    def get(a, b, c):
        return cache[(a, b, c) if b <= c else (a, c, b)]
    return get


def _christoffel_variation(geo, Xg):
    """delta Gamma^c_ab for a metric variation X_gamma (lower indices)."""
    d = geo.d
    covX = _cov_deriv_sym(geo, Xg)
    ginv = geo.inv
    out = {}
    for c in range(d):
        for a in range(d):
            for b in range(a, d):
                acc = None
                for e in range(d):
                    t = ginv.g(c, e) * (covX(a, e, b) + covX(b, e, a)
                                        - covX(e, a, b)) * 0.5
                    acc = t if acc is None else acc + t
                out[(c, a, b)] = acc

    def get(c, a, b):
        return out[(c, a, b) if a <= b else (c, b, a)]
    return get


def _t_variation(state, X, geo):
    """delta T_ab(X) = 2 nabla_(a (X_beta)_b) - 2 dGamma^c_(ab) beta_c - X_J."""
    d = state.d
    zero = GArr.zero(state.config, state.grid)
    parts = sym_from(d, lambda a, b: zero)
    Xb = X.comps.get("beta")
    if Xb is not None:
        covb = geo.sym_cov_grad(Xb)
        parts = parts + covb.scaled(2.0)
    Xg = X.comps.get("gamma")
    if Xg is not None:
        dG = _christoffel_variation(geo, Xg)

        def comp(a, b):
            acc = None
            for c in range(d):
                t = dG(c, a, b) * state.beta[c]
                acc = t if acc is None else acc + t
            return acc * (-2.0)
        parts = parts + sym_from(d, comp)
    XJ = X.comps.get("J")
    if XJ is not None:
        parts = parts - XJ
    return parts


def omega_tilde_classical_closed_form(state, X, Y, geo=None):
    """Term-by-term closed form of the classical boundary two-form.

    Five wedge blocks in (d(eta^-1), d(sqrt(g) g^{ab}), d g^{ab}, d T_ab);
    each wedge A ^ B evaluated as A(X)B(Y) - (-1)^{|X||Y|} A(Y)B(X).  Used
    as the independent oracle for the derived two-form.
    """
    geo = geo or SpatialGeometry(state.gamma)
    ex = extrinsic_data(state.eta, state.beta, state.J, geo)
    d = state.d
    eps = float(state.eps)
    zero = GArr.zero(state.config, state.grid)
    zsym = sym_from(d, lambda a, b: zero)
    eta_inv2 = ex.eta_inv * ex.eta_inv

    def legs(Z):
        Xe = Z.comps.get("eta")
        dinv = zero if Xe is None else eta_inv2 * Xe * (-1.0)
        dgg = _metric_pair_variation(state, Z, geo)
        dup = _inverse_metric_variation(state, Z, geo)
        Xg = Z.comps.get("gamma")
        dsq = zero if Xg is None else geo.sqrtg * geo.trace(Xg) * 0.5
        return {
            "dinv": dinv,
            "dgg": zsym if dgg is None else dgg,
            "dup": zsym if dup is None else dup,
            "dsq": dsq,
            "dT": _t_variation(state, Z, geo),
        }

    lx, ly = legs(X), legs(Y)
    wsign = -1.0 if (X.shift % 2) and (Y.shift % 2) else 1.0

    def wedge(ax, bx, ay, by):
        return ax * by - ay * bx * wsign

    T = ex.T
    acc = None
    for a in range(d):
        for b in range(d):
            t = wedge(lx["dinv"], ly["dgg"].g(a, b),
                      ly["dinv"], lx["dgg"].g(a, b)) * T.g(a, b)
            t = t - ex.eta_inv * wedge(lx["dgg"].g(a, b), ly["dT"].g(a, b),
                                       ly["dgg"].g(a, b), lx["dT"].g(a, b))
            t = t - ex.eta_inv * wedge(lx["dsq"], ly["dup"].g(a, b),
                                       ly["dsq"], lx["dup"].g(a, b)) \
                * T.g(a, b) * 0.5
            t = t - wedge(lx["dinv"], ly["dup"].g(a, b),
                          ly["dinv"], lx["dup"].g(a, b)) \
                * (geo.sqrtg * T.g(a, b) * 0.5)
            t = t + ex.eta_inv * geo.sqrtg * 0.5 \
                * wedge(lx["dup"].g(a, b), ly["dT"].g(a, b),
                        ly["dup"].g(a, b), lx["dT"].g(a, b))
            acc = t if acc is None else acc + t
    return (acc * (eps * OMEGA_TILDE_DISPLAY_SIGN)).integrate()


# ----------------------------------------------------------------------
# kernel generators
# ----------------------------------------------------------------------

@dataclass
class KernelParams:
    """Free parameter fields of the kernel generator families.

    eta carries the lapse family (set inv_lapse=True if the parameter is a
    variation of the inverse lapse instead); beta the shift family; chi_n,
    chi and gdag the three graded families of the full kernel.  Grades must
    match the defining slot: 0 for eta/beta, -2 for chi, -1 for gdag.
    """
    eta: GArr | None = None
    inv_lapse: bool = False
    beta: list | None = None
    chi_n: GArr | None = None
    chi: list | None = None
    gdag: Sym2 | None = None


_PARAM_GRADES = {"eta": 0, "beta": 0, "chi_n": -2, "chi": -2, "gdag": -1}


def _check_params(p: KernelParams, allowed):
    for name in ("eta", "beta", "chi_n", "chi", "gdag"):
        v = getattr(p, name)
        if v is None:
            continue
        if name not in allowed:
            raise ValueError(f"parameter {name!r} has no kernel family here")
        fields = [v] if isinstance(v, GArr) else \
            list(v.comp.values()) if isinstance(v, Sym2) else list(v)
        want = _PARAM_GRADES[name]
        for f in fields:
            g = f.ghost_grade()
            if g is Mixed or (isinstance(g, int) and g != want):
                raise GradeMismatch(
                    f"kernel parameter {name!r}: grade {g}, expected {want}")


def _lapse_param(state, p: KernelParams):
    """The eta-slot increment; accepts either parameterization."""
    if p.inv_lapse:
        return state.eta * state.eta * p.eta * (-1.0)
    return p.eta


def _classical_kernel_dir(state, p: KernelParams, geo=None) -> Direction:
    geo = geo or SpatialGeometry(state.gamma)
    d = state.d
    comps = {}
    zero = GArr.zero(state.config, state.grid)
    J_move = sym_from(d, lambda a, b: zero)
    if p.eta is not None:
        Xe = _lapse_param(state, p)
        eta_inv = reciprocal(state.eta)
        covb = geo.sym_cov_grad(state.beta)
        comps["eta"] = Xe
        J_move = J_move + sym_from(
            d, lambda a, b: eta_inv * Xe * (state.J.g(a, b)
                                            - covb.g(a, b) * 2.0))
    if p.beta is not None:
        comps["beta"] = list(p.beta)
        J_move = J_move + geo.sym_cov_grad(p.beta).scaled(2.0)
    if comps:
        comps["J"] = J_move
    return Direction(comps, 0)


def kernel_generator_classical(state, p: KernelParams) -> StateVectorField:
    """Degenerate directions of the classical boundary two-form.

    Lapse family: moves (eta, J) with (X_J) = eta^-1 X_eta (J - 2 nabla
    beta); shift family: moves (beta, J) with (X_J) = 2 nabla_(a X_b).
    Returns the state-dependent field (grade 0)."""
    _check_dim(state.d)
    _check_params(p, ("eta", "beta"))
    return StateVectorField(lambda s: _classical_kernel_dir(s, p), 0)


def _bv_kernel_dir(state, p: KernelParams, geo=None) -> Direction:
    geo = geo or SpatialGeometry(state.gamma)
    d = state.d
    eps = float(state.eps)
    zero = GArr.zero(state.config, state.grid)
    ginv = geo.inv
    bu = geo.raise1(state.beta)
    eta_inv = reciprocal(state.eta)
    eta_inv2 = eta_inv * eta_inv
    sg_inv = reciprocal(geo.sqrtg)
    dm1 = 1.0 / (d - 1)

    comps = {}
    J_move = sym_from(d, lambda a, b: zero)
    touched_J = False

    def add(slot, val):
        comps[slot] = comps[slot] + val if slot in comps else val

    if p.chi_n is not None:
        X = p.chi_n
        add("chi_n", X)
        add("gdag_nn", eta_inv2 * (X * state.xi_n) * (-0.5 * eps))
        add("gdag_n", [bu[b] * eta_inv2 * (X * state.xi_n) * (0.5 * eps)
                       for b in range(d)])

    if p.chi is not None:
        X = p.chi
        Xup = [sum_garr(ginv.g(a, b) * X[b] for b in range(d))
               for a in range(d)]
        add("chi", list(X))
        pulled = sum_garr(bu[a] * X[a] for a in range(d))
        add("gdag_nn", eta_inv2 * (pulled * state.xi_n) * (0.5 * eps))
        add("gdag_n", [
            eta_inv2 * bu[b] * (pulled * state.xi_n) * (-0.5 * eps)
            + (Xup[b] * state.xi_n) * (0.5 * eps)
            for b in range(d)])

    if p.beta is not None:
        Xb = p.beta
        Xb_up = [sum_garr(ginv.g(a, b) * Xb[b] for b in range(d))
                 for a in range(d)]
        add("beta", list(Xb))
        add("xi", [Xb_up[b] * state.xi_n * (-1.0) for b in range(d)])
        pulled = sum_garr(Xb_up[b] * state.chi[b] for b in range(d))
        add("gdag_nn", eta_inv2 * (pulled * state.xi_n) * (0.5 * eps))
        add("gdag_n", [
            eta_inv2 * bu[b] * (pulled * state.xi_n) * (-0.5 * eps)
            - Xb_up[b] * state.gdag_nn
            for b in range(d)])
        covX = geo.sym_cov_grad(Xb)

        def jcomp(l, m):
            acc = covX.g(l, m) * 2.0
            for a in range(d):
                trfree = (Xb[l] * state.gamma.g(m, a)
                          + Xb[m] * state.gamma.g(l, a)) * 0.5 \
                    - state.gamma.g(l, m) * Xb[a] * dm1
                acc = acc + state.eta * sg_inv * trfree \
                    * (state.gdag_n[a] * state.xi_n) * (4.0 * eps)
            return acc
        J_move = J_move + sym_from(d, jcomp)
        touched_J = True

    if p.gdag is not None:
        XS = p.gdag
        add("gdag", XS)
        low = geo.lower2(XS)
        trlow = sum_garr(state.gamma.g(a, b) * XS.g(a, b)
                         for a in range(d) for b in range(d))

        def jcomp(l, m):
            trfree = low.g(l, m) - state.gamma.g(l, m) * trlow * dm1
            return state.eta * sg_inv * (trfree * state.xi_n) * (2.0 * eps)
        J_move = J_move + sym_from(d, jcomp)
        touched_J = True

    if p.eta is not None:
        Xe = _lapse_param(state, p)
        add("eta", Xe)
        add("xi_n", eta_inv * Xe * state.xi_n * (-1.0))
        add("xi", [bu[a] * eta_inv * Xe * state.xi_n for a in range(d)])
        chi_pull = sum_garr(bu[a] * state.chi[a] for a in range(d))
        eta_inv3 = eta_inv2 * eta_inv
        add("gdag_nn",
            eta_inv * Xe * state.gdag_nn * (-1.0)
            + eta_inv3 * ((chi_pull - state.chi_n) * Xe * state.xi_n)
            * (-eps))
        add("gdag_n", [
            (eta_inv3 * bu[b] * ((state.chi_n - chi_pull) * Xe * state.xi_n)
             + eta_inv * sum_garr(ginv.g(b, a) * (state.chi[a] * Xe
                                                  * state.xi_n)
                                  for a in range(d)) * 0.5) * (-eps)
            + eta_inv * bu[b] * Xe * state.gdag_nn
            for b in range(d)])
        covb = geo.sym_cov_grad(state.beta)

        def jcomp(l, m):
            acc = eta_inv * Xe * (state.J.g(l, m) - covb.g(l, m) * 2.0)
            for a in range(d):
                btf = (state.beta[l] * state.gamma.g(m, a)
                       + state.beta[m] * state.gamma.g(l, a)) * 0.5 \
                    - state.gamma.g(l, m) * state.beta[a] * dm1
                acc = acc - sg_inv * Xe * btf \
                    * (state.gdag_n[a] * state.xi_n) * (4.0 * eps)
                for b in range(d):
                    gtf = state.gamma.g(l, a) * state.gamma.g(b, m) \
                        - state.gamma.g(l, m) * state.gamma.g(a, b) * dm1
                    acc = acc - sg_inv * Xe * gtf \
                        * (state.gdag.g(a, b) * state.xi_n) * (2.0 * eps)
            return acc
        J_move = J_move + sym_from(d, jcomp)
        touched_J = True

    if touched_J:
        comps["J"] = J_move
    return Direction(comps, 0)


def kernel_generator_bv(state, p: KernelParams) -> StateVectorField:
    """The five degenerate families of the graded boundary two-form.

    chi_n / chi parameters give the antighost families (which leak into the
    normal antifield slots proportionally to xi^n); beta the shift family
    (with ghost and antifield transport); gdag the antifield family (pure
    trace-free J transport); eta the lapse family (the largest one).  All
    1/(d-1) trace splittings as displayed; grade of the field is 0."""
    _check_dim(state.d)
    _check_params(p, ("eta", "beta", "chi_n", "chi", "gdag"))
    return StateVectorField(lambda s: _bv_kernel_dir(s, p), 0)


def integrate_kernel_flow(state, fld, steps=64, t_final=1.0):
    """Classical RK4 on d(state)/dt = fld(state), t in [0, t_final].

    The kernel flows are polynomial of low degree in t, so 64 steps put the
    integration error at round-off; the step count is part of the frozen
    test recipe, not a tunable."""
    h = t_final / steps
    s = state
    for _ in range(steps):
        k1 = fld(s)
        k2 = fld(s.perturbed(k1, 0.5 * h))
        k3 = fld(s.perturbed(k2, 0.5 * h))
        k4 = fld(s.perturbed(k3, h))
        s = s.perturbed(k1, h / 6.0).perturbed(k2, h / 3.0) \
             .perturbed(k3, h / 3.0).perturbed(k4, h / 6.0)
    return s


# ----------------------------------------------------------------------
# reductions
# ----------------------------------------------------------------------

def reduce_classical(state, geo=None):
    """Residual data of the classical kernel: (gamma, eta^-1 (J - 2 nabla beta))."""
    _check_dim(state.d)
    geo = geo or SpatialGeometry(state.gamma)
    eta_inv = reciprocal(state.eta)
    covb = geo.sym_cov_grad(state.beta)
    Jt = sym_from(state.d,
                  lambda a, b: eta_inv * (state.J.g(a, b) - covb.g(a, b) * 2.0))
    return state.gamma, Jt


def _jtilde_bv(state, geo):
    """Kernel-invariant completion of the reduced jet in the graded case."""
    d = state.d
    eps = float(state.eps)
    dm1 = 1.0 / (d - 1)
    sg_inv = reciprocal(geo.sqrtg)
    _, base = reduce_classical(state, geo)
    bu = geo.raise1(state.beta)
    bsq = _beta_sq(state, geo)

    def corr(l, m):
        acc = None
        for a in range(d):
            for b in range(d):
                gtf = state.gamma.g(a, l) * state.gamma.g(b, m) \
                    - state.gamma.g(l, m) * state.gamma.g(a, b) * dm1
                t = sg_inv * gtf * (state.gdag.g(a, b) * state.xi_n) \
                    * (-2.0 * eps)
                acc = t if acc is None else acc + t
        for b in range(d):
            btf = (state.beta[l] * state.gamma.g(m, b)
                   + state.beta[m] * state.gamma.g(l, b)) * 0.5 \
                - state.gamma.g(l, m) * state.beta[b] * dm1
            acc = acc + sg_inv * btf * (state.gdag_n[b] * state.xi_n) \
                * (-4.0 * eps)
        bbtf = state.beta[l] * state.beta[m] \
            - state.gamma.g(l, m) * bsq * dm1
        acc = acc + sg_inv * bbtf * (state.gdag_nn * state.xi_n) \
            * (-2.0 * eps)
        return acc
    return base + sym_from(d, corr)


def reduce_bv(state, geo=None) -> DarbouxState:
    """Projection onto the residual Darboux coordinates (gamma, Pi, xi, phi)."""
    _check_dim(state.d)
    geo = geo or SpatialGeometry(state.gamma)
    d = state.d
    eps = float(state.eps)
    Jt = _jtilde_bv(state, geo)
    trJt = geo.trace(Jt)
    Pi = sym_from(d, lambda a, b: geo.sqrtg
                  * (Jt.g(a, b) - state.gamma.g(a, b) * trJt) * (-0.5))
    bu = geo.raise1(state.beta)
    eta_inv = reciprocal(state.eta)
    bxi_n = state.eta * state.xi_n
    bxi = [state.xi[b] + bu[b] * state.xi_n for b in range(d)]
    chi_pull = sum_garr(bu[a] * state.chi[a] for a in range(d))
    phi_n = state.eta * state.gdag_nn * (-2.0) \
        + eta_inv * ((chi_pull + state.chi_n) * state.xi_n) * (-eps)
    phi = [
        sum_garr(state.gamma.g(a, b) * state.gdag_n[b]
                 for b in range(d)) * 2.0
        + state.beta[a] * state.gdag_nn * 2.0
        + (state.chi[a] * state.xi_n) * (eps * CHI_REDUCTION_SIGN)
        for a in range(d)]
    return DarbouxState(state.config, state.grid, gamma=state.gamma, Pi=Pi,
                        bxi_n=bxi_n, bxi=bxi, phi_n=phi_n, phi=phi,
                        eps=state.eps, lam=state.lam)


def reduction_tangent(state, X, base=None) -> Direction:
    """Pushforward of a pre-boundary direction through reduce_bv.

    The metric leg is re-expressed on the inverse-metric slot (the Darboux
    direction convention), all other legs are the map derivatives."""
    base = base or reduce_bv(state)

    def proj_dir(s):
        ds = reduce_bv(s)
        return Direction({"gamma": ds.gamma, "Pi": ds.Pi,
                          "bxi_n": ds.bxi_n, "bxi": ds.bxi,
                          "phi_n": ds.phi_n, "phi": ds.phi}, 0)

    D = map_directional_derivative(proj_dir, state, X, out_shift=X.shift)
    comps = dict(D.comps)
    dg = comps.pop("gamma", None)
    if dg is not None:
        ginv = sym_inverse(base.gamma)

        def comp(a, b):
            acc = None
            for c in range(state.d):
                for e in range(state.d):
                    t = ginv.g(a, c) * dg.g(c, e) * ginv.g(e, b)
                    acc = t if acc is None else acc + t
            return acc * (-1.0)
        comps["gamma_inv"] = sym_from(state.d, comp)
    return Direction(comps, X.shift)


# ----------------------------------------------------------------------
# boundary (Darboux) forms
# ----------------------------------------------------------------------

def alpha_boundary_classical(gamma: Sym2, Jt: Sym2, X, config, grid, eps=1):
    """Reduced classical one-form in (gamma, J-tilde) variables:

        eps int (sqrt(g)/2) ( dg^{ij} g_ij g^{lm} Jt_lm - dg^{lm} Jt_lm ).

    X carries a lower-index metric variation on slot 'gamma'."""
    geo = SpatialGeometry(gamma)
    d = gamma.d
    fake = _DirHolder(config, grid, d, gamma)
    dup = _inverse_metric_variation(fake, X, geo)
    if dup is None:
        return GArr.zero(config, grid).integrate()
    trJt = geo.trace(Jt)
    tr_dup = sum_garr(gamma.g(a, b) * dup.g(a, b)
                      for a in range(d) for b in range(d))
    contr = sum_garr(dup.g(a, b) * Jt.g(a, b)
                     for a in range(d) for b in range(d))
    dens = geo.sqrtg * (tr_dup * trJt - contr) * (0.5 * float(eps))
    return dens.integrate()


class _DirHolder:
    """Minimal duck-state for the shared variation helpers."""

    def __init__(self, config, grid, d, gamma):
        self.config = config
        self.grid = grid
        self.d = d
        self.gamma = gamma


def alpha_boundary(ds: DarbouxState, X, check_grade=True):
    """Darboux one-form: eps int ( dgamma^{ab} Pi_ab + B dxi^rho phi_rho ).

    The metric block is the bulk boundary flux re-expressed through the
    momentum map; the ghost block constant B = BOUNDARY_GHOST_PAIR is
    pinned by the projection pullback."""
    d = ds.d
    eps = float(ds.eps)
    dens = GArr.zero(ds.config, ds.grid)
    Xg = X.comps.get("gamma_inv")
    if Xg is not None:
        for a in range(d):
            for b in range(d):
                dens = dens + Xg.g(a, b) * ds.Pi.g(a, b)
    Xxin = X.comps.get("bxi_n")
    if Xxin is not None:
        dens = dens + (Xxin * ds.phi_n) * BOUNDARY_GHOST_PAIR
    Xxi = X.comps.get("bxi")
    if Xxi is not None:
        for a in range(d):
            dens = dens + (Xxi[a] * ds.phi[a]) * BOUNDARY_GHOST_PAIR
    val = (dens * eps).integrate()
    if check_grade:
        _grade_guard(val, X.shift, "alpha_boundary")
    return val


def omega_boundary(ds: DarbouxState, X, Y):
    """Boundary two-form: exterior derivative of alpha_boundary.

    On Darboux slots the pairing has constant coefficients, so constant
    variations evaluate it exactly."""
    def alpha(s, D):
        return alpha_boundary(s, D, check_grade=False)
    return two_form_from_one_form(alpha, ds, X, Y)


def omega_boundary_display(ds: DarbouxState, X, Y):
    """Literal Darboux pairing eps int ( dgamma^{ab} dPi_ab + dxi^rho dphi_rho )
    with each wedge graded-antisymmetrized; constant-variation oracle."""
    d = ds.d
    zero = GArr.zero(ds.config, ds.grid)
    wsign = -1.0 if (X.shift % 2) and (Y.shift % 2) else 1.0

    def get(Z, slot, a=None, idx=None):
        v = Z.comps.get(slot)
        if v is None:
            return zero
        if a is not None:
            return v.g(*a)
        if idx is not None:
            return v[idx]
        return v

    acc = zero
    for a in range(d):
        for b in range(d):
            acc = acc + get(X, "gamma_inv", a=(a, b)) * get(Y, "Pi", a=(a, b)) \
                - get(Y, "gamma_inv", a=(a, b)) * get(X, "Pi", a=(a, b)) * wsign
    acc = acc + get(X, "bxi_n") * get(Y, "phi_n") \
        - get(Y, "bxi_n") * get(X, "phi_n") * wsign
    for a in range(d):
        acc = acc + get(X, "bxi", idx=a) * get(Y, "phi", idx=a) \
            - get(Y, "bxi", idx=a) * get(X, "phi", idx=a) * wsign
    return (acc * float(ds.eps)).integrate()


# ----------------------------------------------------------------------
# boundary action, constraints, differential
# ----------------------------------------------------------------------

def _constraint_densities(ds: DarbouxState, geo):
    """The two densities shared by the action, the constraints and the
    derived components of the differential."""
    d = ds.d
    eps = float(ds.eps)
    dm1 = 1.0 / (d - 1)
    Pi_up = geo.raise2(ds.Pi)
    trPi = geo.trace(ds.Pi)
    quad = sum_garr(Pi_up.g(a, b) * ds.Pi.g(a, b)
                    for a in range(d) for b in range(d)) \
        - trPi * trPi * dm1
    sg_inv = reciprocal(geo.sqrtg)
    # The momentum quadratic carries -eps: the density is the lapse
    # multiplier of the slice action expressed through the reduced momenta,
    # and the kinetic block of that multiplier flips relative to the
    # curvature block (same flip certifies nilpotency downstream).
    H = sg_inv * quad * (-eps) + geo.sqrtg * (geo.ricci_scalar - 2.0 * ds.lam)
    Ha = []
    for a in range(d):
        div = None
        for c in range(d):
            inner = sum_garr(geo.inv.g(c, e) * ds.Pi.g(e, a)
                             for e in range(d))
            t = geo.dt(inner, c)
            div = t if div is None else div + t
        grad = sum_garr(geo.dt(geo.inv.g(c, e), a) * ds.Pi.g(c, e)
                        for c in range(d) for e in range(d))
        Ha.append(div * MOMENTUM_DIV_COEFF - grad)
    return H, Ha


def boundary_constraints(ds: DarbouxState, geo=None):
    """Energy and momentum densities of the reduced data, pointwise."""
    _check_dim(ds.d)
    geo = geo or SpatialGeometry(ds.gamma)
    return _constraint_densities(ds, geo)


def boundary_action(ds: DarbouxState, geo=None, check_grade=True):
    """Degree +1 boundary action: constraint densities against the ghosts
    plus the antighost transport blocks."""
    _check_dim(ds.d)
    geo = geo or SpatialGeometry(ds.gamma)
    d = ds.d
    eps = float(ds.eps)
    H, Ha = _constraint_densities(ds, geo)

    blockn = H
    for a in range(d):
        blockn = blockn + geo.dt(ds.bxi[a] * ds.phi_n, a) * eps
        for b in range(d):
            blockn = blockn - geo.inv.g(a, b) * ds.phi[b] \
                * geo.dt(ds.bxi_n, a) * eps
    dens = blockn * ds.bxi_n
    for a in range(d):
        blocka = Ha[a]
        for c in range(d):
            blocka = blocka + geo.dt(ds.bxi[c] * ds.phi[a], c) * eps
        dens = dens + blocka * ds.bxi[a]
    val = dens.integrate()
    if check_grade:
        g = val.ghost_grade()
        if g is not PureZero and g != 1:
            raise GradeMismatch(f"boundary_action: grade {g}, expected +1")
    return val


def _gamma_euler_density(ds: DarbouxState, geo):
    """Coefficient of an upper-metric variation in the derivative of the
    boundary action (all blocks, integration by parts done exactly)."""
    d = ds.d
    eps = float(ds.eps)
    dm1 = 1.0 / (d - 1)
    Pi_up = geo.raise2(ds.Pi)
    trPi = geo.trace(ds.Pi)
    quad = sum_garr(Pi_up.g(a, b) * ds.Pi.g(a, b)
                    for a in range(d) for b in range(d)) \
        - trPi * trPi * dm1
    sg_inv = reciprocal(geo.sqrtg)
    ric = geo.ricci
    rsc = geo.ricci_scalar
    hess = geo.hessian(ds.bxi_n)
    lap = geo.trace(hess)
    dxin = [geo.dt(ds.bxi_n, a) for a in range(d)]

    def comp(a, b):
        mixed = sum_garr(ds.Pi.g(a, c) * Pi_up.g(c, e) * ds.gamma.g(e, b)
                         for c in range(d) for e in range(d))
        t = (sg_inv * ds.gamma.g(a, b) * quad * 0.5
             + sg_inv * (mixed - trPi * ds.Pi.g(a, b) * dm1) * 2.0) \
            * ds.bxi_n * (-eps)
        t = t + geo.sqrtg * (ric.g(a, b) - ds.gamma.g(a, b)
                             * (rsc - 2.0 * ds.lam) * 0.5) * ds.bxi_n
        t = t + geo.sqrtg * (ds.gamma.g(a, b) * lap - hess.g(a, b))
        t = t - (ds.phi[b] * dxin[a] + ds.phi[a] * dxin[b]) \
            * ds.bxi_n * (0.5 * eps)
        for e in range(d):
            t = t + ds.Pi.g(b, e) * geo.dt(ds.bxi[e], a) \
                + ds.Pi.g(a, e) * geo.dt(ds.bxi[e], b)
        t = t + sum_garr(geo.dt(ds.Pi.g(a, b) * ds.bxi[e], e)
                         for e in range(d))
        return t
    return sym_from(d, comp)


def _xi_euler_densities(ds: DarbouxState, geo):
    """Coefficients of the ghost variations (variation on the right) in the
    derivative of the boundary action."""
    d = ds.d
    eps = float(ds.eps)
    H, Ha = _constraint_densities(ds, geo)
    dxin = [geo.dt(ds.bxi_n, a) for a in range(d)]
    En = H
    for a in range(d):
        En = En + geo.dt(ds.bxi[a] * ds.phi_n, a) * eps
        phi_up = sum_garr(geo.inv.g(a, b) * ds.phi[b] for b in range(d))
        En = En - phi_up * dxin[a] * eps
        En = En - geo.dt(phi_up * ds.bxi_n, a) * eps
    Ea = []
    for a in range(d):
        t = Ha[a]
        for c in range(d):
            t = t + geo.dt(ds.bxi[c] * ds.phi[a], c) * eps
            t = t - ds.phi[c] * geo.dt(ds.bxi[c], a) * eps
        t = t - ds.phi_n * dxin[a] * eps
        Ea.append(t)
    return En, Ea


def boundary_Q(ds: DarbouxState, geo=None) -> Direction:
    """Residual boundary differential.

    The metric and ghost components are the displayed residual gauge
    transformations; the momentum and antighost components are solved out
    of the constant-coefficient pairing against the action variation
    (slot signs in conventions.py)."""
    _check_dim(ds.d)
    geo = geo or SpatialGeometry(ds.gamma)
    d = ds.d
    eps = float(ds.eps)
    dm1 = 1.0 / (d - 1)
    ginv = geo.inv
    sg_inv = reciprocal(geo.sqrtg)
    trPi = geo.trace(ds.Pi)
    dxin = [geo.dt(ds.bxi_n, a) for a in range(d)]

    q_xin = sum_garr(ds.bxi[c] * dxin[c] for c in range(d))
    q_xi = []
    for a in range(d):
        t = sum_garr(ds.bxi_n * ginv.g(a, b) * dxin[b] for b in range(d))
        t = t + sum_garr(ds.bxi[c] * geo.dt(ds.bxi[a], c) for c in range(d))
        q_xi.append(t)

    def qg(a, b):
        t = ds.bxi_n * sg_inv \
            * (ds.Pi.g(a, b) - ds.gamma.g(a, b) * trPi * dm1) * (-2.0)
        t = t + sum_garr(ds.bxi[c] * geo.dt(ds.gamma.g(a, b), c)
                         for c in range(d))
        for c in range(d):
            t = t + geo.dt(ds.bxi[c], a) * ds.gamma.g(c, b) \
                + geo.dt(ds.bxi[c], b) * ds.gamma.g(c, a)
        return t
    q_gamma = sym_from(d, qg)

    def qginv(a, b):
        acc = None
        for c in range(d):
            for e in range(d):
                t = ginv.g(a, c) * q_gamma.g(c, e) * ginv.g(e, b)
                acc = t if acc is None else acc + t
        return acc * (-1.0)

    E_gamma = _gamma_euler_density(ds, geo)
    En, Ea = _xi_euler_densities(ds, geo)
    q_Pi = E_gamma.scaled(PI_SLOT_SIGN * eps)
    q_phin = En * (PHI_SLOT_SIGN * eps)
    q_phi = [Ea[a] * (PHI_SLOT_SIGN * eps) for a in range(d)]
    return Direction({"gamma_inv": sym_from(d, qginv), "Pi": q_Pi,
                      "bxi_n": q_xin, "bxi": q_xi,
                      "phi_n": q_phin, "phi": q_phi}, 1)


def boundary_q_square(ds: DarbouxState) -> dict:
    """Per-slot sup norm of the residual differential applied twice."""
    X = boundary_Q(ds)
    QQ = map_directional_derivative(boundary_Q, ds, X, out_shift=2)
    out = {}
    for name, val in QQ.comps.items():
        if isinstance(val, Sym2):
            out[name] = val.sup_norm()
        elif isinstance(val, list):
            out[name] = max(v.sup_norm() for v in val)
        else:
            out[name] = val.sup_norm()
    return out


# ----------------------------------------------------------------------
# scaling contraction
# ----------------------------------------------------------------------

def euler_vector(state: PreBoundaryState) -> Direction:
    """Grading field: +1 on ghosts, -1 on antifields, -2 on antighosts,
    including the stored normal jets of those slots."""
    def neg(v):
        return v * (-1.0)

    comps = {
        "xi_n": state.xi_n, "xi": list(state.xi),
        "gdag_nn": neg(state.gdag_nn),
        "gdag_n": [neg(v) for v in state.gdag_n],
        "gdag": state.gdag.scaled(-1.0),
        "chi_n": state.chi_n * (-2.0),
        "chi": [v * (-2.0) for v in state.chi],
    }
    if state.jn_xin is not None:
        comps["jn_xin"] = state.jn_xin
    if state.jn_xi is not None:
        comps["jn_xi"] = list(state.jn_xi)
    if state.jn_gdag_nn is not None:
        comps["jn_gdag_nn"] = neg(state.jn_gdag_nn)
    if state.jn_gdag_n is not None:
        comps["jn_gdag_n"] = [neg(v) for v in state.jn_gdag_n]
    if state.jn_chi_n is not None:
        comps["jn_chi_n"] = state.jn_chi_n * (-2.0)
    if state.jn_chi is not None:
        comps["jn_chi"] = [v * (-2.0) for v in state.jn_chi]
    return Direction(comps, 0)


class _JetField:
    """Scalar field with an optional first normal jet; derivative index 0
    reads the jet, tangential indices shift down onto the boundary axes.
    Products propagate jets by the Leibniz rule (None poisons)."""

    __slots__ = ("val", "jn")

    def __init__(self, val, jn=None):
        self.val = val
        self.jn = jn

    def deriv(self, mu):
        if mu == 0:
            if self.jn is None:
                raise MissingJets("normal derivative without a stored jet")
            return _JetField(self.jn)
        return _JetField(self.val.deriv(mu - 1),
                         None if self.jn is None else self.jn.deriv(mu - 1))

    def __add__(self, other):
        o = _as_jet(other)
        jn = self.jn + o.jn if (self.jn is not None and o.jn is not None) \
            else None
        return _JetField(self.val + o.val, jn)

    def __sub__(self, other):
        return self + (other * (-1.0))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return _JetField(self.val * other,
                             None if self.jn is None else self.jn * other)
        o = _as_jet(other)
        jn = None
        if self.jn is not None and o.jn is not None:
            jn = self.jn * o.val + self.val * o.jn
        return _JetField(self.val * o.val, jn)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return _as_jet(other) * self


def _as_jet(v):
    return v if isinstance(v, _JetField) else _JetField(v)


def _jet_metric_blocks(state: PreBoundaryState, geo):
    """Spacetime metric blocks as jet fields on the boundary grid."""
    d = state.d
    eps = float(state.eps)
    ginv = geo.inv
    bu = geo.raise1(state.beta)
    bsq = _beta_sq(state, geo)
    # d_n gamma^{ab} = -gamma^{ac} J_cd gamma^{db}
    jn_ginv = sym_from(d, lambda a, b: sum_garr(
        ginv.g(a, c) * state.J.g(c, e) * ginv.g(e, b)
        for c in range(d) for e in range(d)) * (-1.0))
    jn_bsq = sum_garr(jn_ginv.g(a, b) * state.beta[a] * state.beta[b]
                      for a in range(d) for b in range(d)) \
        + sum_garr(bu[a] * state.jn_beta[a] for a in range(d)) * 2.0
    m00 = _JetField((bsq - state.eta * state.eta) * eps,
                    (jn_bsq - state.eta * state.jn_eta * 2.0) * eps)
    m0 = [_JetField(state.beta[a] * eps, state.jn_beta[a] * eps)
          for a in range(d)]
    mt = {(a, b): _JetField(state.gamma.g(a, b) * eps,
                            state.J.g(a, b) * eps)
          for a in range(d) for b in range(a, d)}

    def m(mu, nu):
        if mu > nu:
            mu, nu = nu, mu
        if mu == 0 and nu == 0:
            return m00
        if mu == 0:
            return m0[nu - 1]
        return mt[(mu - 1, nu - 1)]
    return m


def _jet_gdag_blocks(state: PreBoundaryState):
    d = state.d
    nn = _JetField(state.gdag_nn, state.jn_gdag_nn)
    na = [_JetField(state.gdag_n[a], state.jn_gdag_n[a]) for a in range(d)]

    def up(mu, nu):
        if mu > nu:
            mu, nu = nu, mu
        if mu == 0 and nu == 0:
            return nn
        if mu == 0:
            return na[nu - 1]
        return _JetField(state.gdag.g(mu - 1, nu - 1))
    return up


def qtilde(state: PreBoundaryState, geo=None) -> Direction:
    """The bulk differential restricted to the boundary face.

    Normal derivatives read the stored jets; the output has no J or
    tangential-antifield component (their transport needs second jets the
    restriction does not carry, and nothing downstream reads them)."""
    _check_dim(state.d)
    state.require_jets(*PreBoundaryState.JET_SLOTS)
    geo = geo or SpatialGeometry(state.gamma)
    d = state.d
    eps = float(state.eps)
    N = d + 1
    bu = geo.raise1(state.beta)
    bsq = _beta_sq(state, geo)

    xif = [_JetField(state.xi_n, state.jn_xin)] \
        + [_JetField(state.xi[a], state.jn_xi[a]) for a in range(d)]
    chif = [_JetField(state.chi_n, state.jn_chi_n)] \
        + [_JetField(state.chi[a], state.jn_chi[a]) for a in range(d)]
    etaf = _JetField(state.eta, state.jn_eta)
    betaf = [_JetField(state.beta[a], state.jn_beta[a]) for a in range(d)]
    gammaf = {(a, b): _JetField(state.gamma.g(a, b), state.J.g(a, b))
              for a in range(d) for b in range(a, d)}

    def gf(a, b):
        return gammaf[(a, b) if a <= b else (b, a)]

    def adv(f):
        acc = None
        for s in range(N):
            t = xif[s] * f.deriv(s)
            acc = t if acc is None else acc + t
        return acc

    dn_xin = xif[0].deriv(0)
    q_eta = adv(etaf) + dn_xin * etaf
    for a in range(d):
        q_eta = q_eta - _as_jet(state.eta * bu[a]) * xif[0].deriv(a + 1)

    q_beta = []
    for a in range(d):
        t = adv(betaf[a]) + dn_xin * betaf[a] \
            + xif[0].deriv(a + 1) * _as_jet(bsq - state.eta * state.eta)
        for b in range(d):
            t = t + xif[b + 1].deriv(0) * gf(a, b) \
                + xif[b + 1].deriv(a + 1) * betaf[b]
        q_beta.append(t.val)

    def qgam(a, b):
        t = adv(gf(a, b)) \
            + xif[0].deriv(a + 1) * betaf[b] + xif[0].deriv(b + 1) * betaf[a]
        for c in range(d):
            t = t + xif[c + 1].deriv(a + 1) * gf(c, b) \
                + xif[c + 1].deriv(b + 1) * gf(c, a)
        return t.val
    q_gamma = sym_from(d, qgam)

    q_xi_n = adv(xif[0]).val
    q_xi = [adv(xif[a + 1]).val for a in range(d)]

    g_eta, g_beta, _ = classical_constraints(state, geo)
    up = _jet_gdag_blocks(state)
    div = None
    for r in range(N):
        t = xif[r].deriv(r)
        div = t if div is None else div + t

    def transport(mu, nu):
        acc = div * up(mu, nu)
        for r in range(N):
            acc = acc + xif[r] * up(mu, nu).deriv(r)
            acc = acc - xif[mu].deriv(r) * up(nu, r)
            acc = acc - xif[nu].deriv(r) * up(mu, r)
        return acc.val

    eta_inv = reciprocal(state.eta)
    q_gdag_nn = g_eta * eta_inv * (-0.5 * eps) + transport(0, 0)
    q_gdag_n = [g_beta[a] * (0.5 * eps)
                + bu[a] * eta_inv * g_eta * (0.5 * eps)
                + transport(0, a + 1)
                for a in range(d)]

    m = _jet_metric_blocks(state, geo)
    chi_out = []
    for rho in range(N):
        acc = None
        for mu in range(N):
            for nu in range(N):
                t = m(mu, nu).deriv(rho) * up(mu, nu) * (-1.0) \
                    + (m(rho, nu) * up(mu, nu)).deriv(mu) * 2.0
                acc = t if acc is None else acc + t
        for s in range(N):
            acc = acc + xif[s].deriv(rho) * chif[s] \
                + xif[s].deriv(s) * chif[rho] + xif[s] * chif[rho].deriv(s)
        chi_out.append(acc.val)

    return Direction({"eta": q_eta.val, "beta": q_beta, "gamma": q_gamma,
                      "xi_n": q_xi_n, "xi": q_xi,
                      "gdag_nn": q_gdag_nn, "gdag_n": q_gdag_n,
                      "chi_n": chi_out[0], "chi": chi_out[1:]},
                     shift=1)


def euler_contraction_action(state: PreBoundaryState, check_grade=True):
    """Degree +1 function from contracting the pre-boundary two-form with
    the grading field and the restricted differential (both
    state-dependent, so the bracket-corrected two-form is used)."""
    _check_dim(state.d)
    state.require_jets(*PreBoundaryState.JET_SLOTS)
    emap = StateVectorField(euler_vector, 0)
    qmap = StateVectorField(qtilde, 1)

    def alpha(s, D):
        return alpha_tilde_bv(s, D, check_grade=False)

    val = two_form_from_one_form(alpha, state, emap, qmap) \
        * EULER_CONTRACTION_SIGN
    if check_grade:
        g = val.ghost_grade()
        if g is not PureZero and g != 1:
            raise GradeMismatch(
                f"euler_contraction_action: grade {g}, expected +1")
    return val
