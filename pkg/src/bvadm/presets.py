"""Scenario families: reproducible field configurations for every layer.

Each factory is deterministic given its seed.  Ghost-sector components are
allocated from the generator pool so that the products appearing in the
identities are generically nonzero: evolution ghosts take the +1 tags,
antifields the -1 tags, and the degree -2 fields take distinct pairs.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionUnsupported
from .fields import BoxGrid, BulkPatchGrid, GArr, PeriodicGrid, Sym2
from .grassmann import GrassmannConfig
from .states import ADMBlock, BVBulkState, DarbouxState, PreBoundaryState


def default_config(num_generators: int = 8) -> GrassmannConfig:
    return GrassmannConfig(num_generators=num_generators)


def _tag_pools(config):
    plus = [i for i in range(config.num_generators) if config.tag(i) == 1]
    minus = [i for i in range(config.num_generators) if config.tag(i) == -1]
    return plus, minus


def _check_dim(d):
    if d < 2:
        raise DimensionUnsupported(
            "slice dimension must be >= 2 (the reduced structures divide "
            "by d - 1)")
    if d > 3:
        raise DimensionUnsupported("preset families cover d = 2 and d = 3")


def trig_profile(grid, rng, amp, modes=2, kmax=2):
    """Random low-mode periodic profile with sup-norm about `amp`."""
    axes = grid.d
    out = np.zeros(grid.shape)
    for _ in range(modes):
        k = rng.integers(-kmax, kmax + 1, size=axes)
        if not np.any(k):
            k[rng.integers(axes)] = 1
        phase = rng.uniform(0, 2 * np.pi)
        arg = np.full(grid.shape, phase)
        for a in range(axes):
            arg = arg + 2 * np.pi * k[a] * grid.coords(a)
        out = out + rng.normal() * np.cos(arg)
    m = np.max(np.abs(out))
    if m > 0:
        out *= amp / m
    return out


def _normal_profile(grid: BulkPatchGrid, rng, kind):
    """Profile in the normal coordinate: polynomial (exactly representable
    by the difference stencils) or a sine for convergence studies."""
    xn = grid.normal_coord()
    if kind == "quadratic":
        b = rng.normal(size=3)
        return b[0] + b[1] * xn + b[2] * xn * xn
    if kind == "sine":
        return np.sin(np.pi * xn + rng.uniform(0, 2 * np.pi))
    raise ValueError(f"unknown normal profile kind {kind!r}")


def _bulk_field(grid, rng, amp, kind):
    return _normal_profile(grid, rng, kind) * (1.0 + trig_profile(grid, rng, 0.5)) * amp


# ----------------------------------------------------------------------
# classical slice data
# ----------------------------------------------------------------------

def flat_adm(config, grid, *, j_const=0.0, eps=1, lam=0.0) -> ADMBlock:
    d = grid.d
    _check_dim(d)
    one = np.ones(grid.shape)
    eta = GArr.body_field(config, grid, one)
    beta = [GArr.zero(config, grid) for _ in range(d)]
    gamma = Sym2.identity(config, grid, d)
    J = Sym2.zeros(config, grid, d)
    for a in range(d):
        J.comp[(a, a)] = GArr.body_field(config, grid, j_const * one)
    return ADMBlock(config, grid, eta, beta, gamma, J, eps=eps, lam=lam)


def random_adm(config, grid, *, seed, amp=0.05, eps=1, lam=0.3,
               with_shift=True) -> ADMBlock:
    d = grid.d
    _check_dim(d)
    rng = np.random.default_rng(seed)
    eta = GArr.body_field(config, grid,
                          1.0 + trig_profile(grid, rng, amp))
    beta = [GArr.body_field(config, grid,
                            trig_profile(grid, rng, amp) if with_shift
                            else np.zeros(grid.shape))
            for _ in range(d)]
    gamma = Sym2.identity(config, grid, d)
    J = Sym2.zeros(config, grid, d)
    for a in range(d):
        for b in range(a, d):
            gamma.comp[(a, b)] = gamma.comp[(a, b)] + GArr.body_field(
                config, grid, trig_profile(grid, rng, amp))
            J.comp[(a, b)] = GArr.body_field(
                config, grid, trig_profile(grid, rng, amp))
    return ADMBlock(config, grid, eta, beta, gamma, J, eps=eps, lam=lam)


def conformal_adm_2d(config, grid, *, seed, amp=0.2, eps=1,
                     lam=0.0) -> ADMBlock:
    """gamma = exp(2 phi) delta on a 2-torus; the curvature scalar has the
    closed form R = -2 exp(-2 phi) Laplace(phi)."""
    if grid.d != 2:
        raise DimensionUnsupported("conformal family is two-dimensional")
    rng = np.random.default_rng(seed)
    phi = trig_profile(grid, rng, amp)
    state = flat_adm(config, grid, eps=eps, lam=lam)
    conf = np.exp(2.0 * phi)
    gamma = Sym2.zeros(config, grid, 2)
    for a in range(2):
        gamma.comp[(a, a)] = GArr.body_field(config, grid, conf)
    return ADMBlock(config, grid, state.eta, state.beta, gamma,
                    Sym2.zeros(config, grid, 2), eps=eps, lam=lam), phi


def schwarzschild_adm(config, n, *, mass=0.6, eps=1) -> ADMBlock:
    """Time-symmetric slice gamma = psi^4 delta, psi = 1 + M/(2r), on a box
    offset from the origin.  Solves the vacuum scalar constraint exactly."""
    grid = BoxGrid((n, n, n), origin=(1.2, 1.1, 1.3), lengths=(0.8, 0.8, 0.8))
    r = np.sqrt(sum(grid.coords(a) ** 2 for a in range(3)))
    psi = 1.0 + mass / (2.0 * r)
    conf = psi ** 4
    eta = GArr.body_field(config, grid, np.ones(grid.shape))
    beta = [GArr.zero(config, grid) for _ in range(3)]
    gamma = Sym2.zeros(config, grid, 3)
    for a in range(3):
        gamma.comp[(a, a)] = GArr.body_field(config, grid, conf)
    J = Sym2.zeros(config, grid, 3)
    return ADMBlock(config, grid, eta, beta, gamma, J, eps=eps, lam=0.0)


# ----------------------------------------------------------------------
# patch data (metric sector only)
# ----------------------------------------------------------------------

def bulk_classical(config, grid: BulkPatchGrid, *, seed, amp=0.02, eps=1,
                   lam=0.3, kind="quadratic") -> ADMBlock:
    d = grid.d
    _check_dim(d)
    rng = np.random.default_rng(seed)
    eta = GArr.body_field(config, grid, 1.0 + _bulk_field(grid, rng, amp, kind))
    beta = [GArr.body_field(config, grid, _bulk_field(grid, rng, amp, kind))
            for _ in range(d)]
    gamma = Sym2.identity(config, grid, d)
    for a in range(d):
        for b in range(a, d):
            gamma.comp[(a, b)] = gamma.comp[(a, b)] + GArr.body_field(
                config, grid, _bulk_field(grid, rng, amp, kind))
    return ADMBlock(config, grid, eta, beta, gamma, None, eps=eps, lam=lam)


def flrw_bulk(config, grid: BulkPatchGrid, *, eps=1, a0=1.0, rate=0.35,
              accel=0.2) -> ADMBlock:
    """Homogeneous scale-factor patch a(x^n) = a0 (1 + rate x + accel x^2)."""
    d = grid.d
    _check_dim(d)
    xn = grid.normal_coord()
    scale = a0 * (1.0 + rate * xn + accel * xn * xn)
    eta = GArr.body_field(config, grid, np.ones(grid.shape))
    beta = [GArr.zero(config, grid) for _ in range(d)]
    gamma = Sym2.zeros(config, grid, d)
    for a in range(d):
        gamma.comp[(a, a)] = GArr.body_field(config, grid, scale * scale)
    return ADMBlock(config, grid, eta, beta, gamma, None, eps=eps, lam=0.0)


def flrw_scale_factor(grid: BulkPatchGrid, *, a0=1.0, rate=0.35, accel=0.2):
    xn = grid.normal_coord()
    a = a0 * (1.0 + rate * xn + accel * xn * xn)
    da = a0 * (rate + 2.0 * accel * xn)
    dda = a0 * 2.0 * accel * np.ones_like(xn)
    return a, da, dda


# ----------------------------------------------------------------------
# ghost-sector allocation
# ----------------------------------------------------------------------

def _ghost_monomial(config, grid, gens, tag_sum, profile):
    return GArr.monomial_field(config, grid, gens, tag_sum, profile)


def _field(config, grid, rng, amp, bulk_kind=None):
    if bulk_kind is not None and isinstance(grid, BulkPatchGrid):
        return _bulk_field(grid, rng, amp, bulk_kind)
    return trig_profile(grid, rng, amp)


def _ghost_sector(config, grid, rng, amp, d, kind):
    """xi, antifields and degree -2 fields with pool allocation.

    xi^n, xi^a take single +1 generators; g-dagger components single -1
    generators (the ab block reuses them); chi components take distinct
    pairs of -1 generators.
    """
    plus, minus = _tag_pools(config)
    if len(plus) < d + 1 or len(minus) < d + 1:
        raise ValueError("generator pool too small for this dimension")

    def prof():
        return _field(config, grid, rng, amp, kind)

    xi_n = _ghost_monomial(config, grid, (plus[0],), 1, prof())
    xi = [_ghost_monomial(config, grid, (plus[1 + a],), 1, prof())
          for a in range(d)]
    gdag_nn = _ghost_monomial(config, grid, (minus[0],), -1, prof())
    gdag_n = [_ghost_monomial(config, grid, (minus[1 + a],), -1, prof())
              for a in range(d)]
    gdag = Sym2.zeros(config, grid, d)
    for a in range(d):
        for b in range(a, d):
            g = minus[(a + b) % len(minus)]
            gdag.comp[(a, b)] = _ghost_monomial(config, grid, (g,), -1, prof())
    pair_list = [(minus[0], minus[1]), (minus[0], minus[2]),
                 (minus[1], minus[2]), (minus[1], minus[3])]
    chi_n = _ghost_monomial(config, grid, pair_list[0], -2, prof())
    chi = [_ghost_monomial(config, grid, pair_list[1 + a], -2, prof())
           for a in range(d)]
    return xi_n, xi, gdag_nn, gdag_n, gdag, chi_n, chi


def random_bulk_bv(config, grid: BulkPatchGrid, *, seed, amp=0.02, eps=1,
                   lam=0.3, kind="quadratic") -> BVBulkState:
    d = grid.d
    _check_dim(d)
    base = bulk_classical(config, grid, seed=seed, amp=amp, eps=eps, lam=lam,
                          kind=kind)
    rng = np.random.default_rng(seed + 1000)
    xi_n, xi, gdag_nn, gdag_n, gdag, chi_n, chi = _ghost_sector(
        config, grid, rng, amp, d, kind)
    return BVBulkState(config, grid, base.eta, base.beta, base.gamma,
                       xi_n, xi, gdag_nn, gdag_n, gdag, chi_n, chi,
                       eps=eps, lam=lam)


def random_preboundary(config, grid: PeriodicGrid, *, seed, amp=0.05, eps=1,
                       lam=0.3, with_jets=True) -> PreBoundaryState:
    d = grid.d
    _check_dim(d)
    base = random_adm(config, grid, seed=seed, amp=amp, eps=eps, lam=lam)
    rng = np.random.default_rng(seed + 2000)
    xi_n, xi, gdag_nn, gdag_n, gdag, chi_n, chi = _ghost_sector(
        config, grid, rng, amp, d, None)
    jets = {}
    if with_jets:
        plus, minus = _tag_pools(config)

        def mono(gens, tag):
            return _ghost_monomial(config, grid, gens, tag,
                                   trig_profile(grid, rng, amp))

        jets = dict(
            jn_eta=GArr.body_field(config, grid, trig_profile(grid, rng, amp)),
            jn_beta=[GArr.body_field(config, grid,
                                     trig_profile(grid, rng, amp))
                     for _ in range(d)],
            jn_xin=mono((plus[0],), 1),
            jn_xi=[mono((plus[1 + a],), 1) for a in range(d)],
            jn_gdag_nn=mono((minus[0],), -1),
            jn_gdag_n=[mono((minus[1 + a],), -1) for a in range(d)],
            jn_chi_n=mono((minus[0], minus[1]), -2),
            jn_chi=[mono(((minus[0], minus[2]), (minus[1], minus[2]),
                          (minus[1], minus[3]))[a], -2) for a in range(d)],
        )
    return PreBoundaryState(config, grid, base.eta, base.beta, base.gamma,
                            base.J, xi_n, xi, gdag_nn, gdag_n, gdag,
                            chi_n, chi, eps=eps, lam=lam, **jets)


def random_darboux(config, grid: PeriodicGrid, *, seed, amp=0.05, eps=1,
                   lam=0.3, rich_ghosts=True) -> DarbouxState:
    """Reduced-phase-space sample.  With rich_ghosts each odd component is a
    two-generator combination so that expressions cubic in the ghosts stay
    generically nonzero."""
    d = grid.d
    _check_dim(d)
    rng = np.random.default_rng(seed)
    plus, minus = _tag_pools(config)

    gamma = Sym2.identity(config, grid, d)
    Pi = Sym2.zeros(config, grid, d)
    for a in range(d):
        for b in range(a, d):
            gamma.comp[(a, b)] = gamma.comp[(a, b)] + GArr.body_field(
                config, grid, trig_profile(grid, rng, amp))
            pi_c = GArr.body_field(config, grid, trig_profile(grid, rng, 4 * amp))
            pi_c = pi_c + GArr.monomial_field(
                config, grid, (plus[(a + b) % len(plus)], minus[(a - b) % len(minus)]),
                0, trig_profile(grid, rng, amp))
            Pi.comp[(a, b)] = pi_c

    def odd_plus(i, j):
        return (GArr.monomial_field(config, grid, (plus[i],), 1,
                                    trig_profile(grid, rng, amp))
                + (GArr.monomial_field(config, grid, (plus[j],), 1,
                                       trig_profile(grid, rng, amp))
                   if rich_ghosts else GArr.zero(config, grid)))

    bxi_n = odd_plus(0, 1)
    bxi = [odd_plus(1 + a, (2 + a) % len(plus)) for a in range(d)]
    phi_n = GArr.monomial_field(config, grid, (minus[0],), -1,
                                trig_profile(grid, rng, amp))
    phi = [GArr.monomial_field(config, grid, (minus[1 + a],), -1,
                               trig_profile(grid, rng, amp))
           for a in range(d)]
    if rich_ghosts:
        phi_n = phi_n + GArr.monomial_field(
            config, grid, (minus[0], minus[1], plus[0]), -1,
            trig_profile(grid, rng, amp))
    return DarbouxState(config, grid, gamma, Pi, bxi_n, bxi, phi_n, phi,
                        eps=eps, lam=lam)


#: registry consumed by the command-line layer
PRESETS = {
    "flat": lambda config, grid, seed=0, **kw: flat_adm(config, grid, **kw),
    "random-classical": random_adm,
    "conformal-2d": lambda config, grid, **kw: conformal_adm_2d(
        config, grid, **kw)[0],
    "schwarzschild-isotropic": None,  # box-based; built via schwarzschild_adm
    "random-bv-bulk": random_bulk_bv,
    "random-preboundary": random_preboundary,
    "random-darboux": random_darboux,
}
