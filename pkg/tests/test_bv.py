"""Bulk graded sector: action, odd vector field, pairing, nilpotency.

The contraction battery is the load-bearing test here: it checks that the
slot expressions produced by apply_Q_bulk are the functional derivatives of
bv_action through the odd pairing, which pins every relative sign at once.
"""
import numpy as np
import pytest

import bvadm.bv as bvmod
from bvadm.bv import (apply_Q_bulk, bv_action, lie_derivative_metric,
                      omega_bv, q_square_residual)
from bvadm.fields import BulkPatchGrid, GArr, PeriodicGrid, Sym2
from bvadm.grassmann import PureZero
from bvadm.presets import default_config, random_bulk_bv, trig_profile
from bvadm.states import BVBulkState
from bvadm.varcalc import Direction, directional_derivative

CFG = default_config()
AUX0 = CFG.num_generators       # off-pool indices for probe directions
AUX1 = CFG.num_generators + 1
GEOM_SLOTS = ("eta", "beta", "gamma", "xi_n", "xi")


def _flat_bv(grid, d, lam=0.0, **over):
    zero = GArr.zero(CFG, grid)
    slots = dict(
        eta=GArr.body_field(CFG, grid, np.ones(grid.shape)),
        beta=[zero.copy() for _ in range(d)],
        gamma=Sym2.identity(CFG, grid, d),
        xi_n=zero.copy(),
        xi=[zero.copy() for _ in range(d)],
        gdag_nn=zero.copy(),
        gdag_n=[zero.copy() for _ in range(d)],
        gdag=Sym2.zeros(CFG, grid, d),
        chi_n=zero.copy(),
        chi=[zero.copy() for _ in range(d)],
    )
    slots.update(over)
    return BVBulkState(CFG, grid, lam=lam, **slots)


def test_bv_action_flat_is_cosmological_volume():
    # all ghost content zero: the action reduces to the classical bulk
    # integral, and a flat static block gives -2*Lambda * volume exactly.
    for shape in ((12, 12), (8, 8, 8)):
        grid = BulkPatchGrid(PeriodicGrid(shape), n_layers=9)
        s = _flat_bv(grid, len(shape), lam=0.15)
        val = bv_action(s)
        assert val.ghost_grade() in (0, PureZero)
        assert abs(val.body() - (-0.30)) < 1e-13
        assert abs(val.sup_norm() - 0.30) < 1e-13   # no stray odd terms


def test_bv_action_ghost_term_frozen_value():
    # designed state, d = 2: xi^n = th0 sin(2 pi x1), xi^1 = th1,
    # chi_n = th4 th5 cos(2 pi x1), everything else flat / zero.
    # The only surviving ghost term is (xi^1 d_1 xi^n) chi_n, and
    #   integral of -2 pi cos^2(2 pi x1) = -pi
    # on the monomial th0 th1 th4 th5 (hand value, frozen).
    grid = BulkPatchGrid(PeriodicGrid((16, 16)), n_layers=9)
    x1 = grid.coords(0)
    s = _flat_bv(
        grid, 2, lam=0.15,
        xi_n=GArr.monomial_field(CFG, grid, (0,), 1, np.sin(2 * np.pi * x1)),
        xi=[GArr.monomial_field(CFG, grid, (1,), 1, np.ones(grid.shape)),
            GArr.zero(CFG, grid)],
        chi_n=GArr.monomial_field(CFG, grid, (4, 5), -2,
                                  np.cos(2 * np.pi * x1)),
    )
    val = bv_action(s)
    assert val.ghost_grade() == 0
    assert abs(val.body() - (-0.30)) < 1e-13
    assert abs(val.terms[((0, 1, 4, 5), 0)] - (-np.pi)) < 1e-12
    assert len(val.terms) == 2


def test_lie_derivative_flat_constant_xi():
    # constant xi on a constant metric: transport of the block metric needs
    # the dxi terms only, and they vanish.  [direct assertion]
    grid = BulkPatchGrid(PeriodicGrid((8, 8)), n_layers=9)
    ones = np.ones(grid.shape)
    s = _flat_bv(
        grid, 2,
        xi_n=GArr.monomial_field(CFG, grid, (0,), 1, ones),
        xi=[GArr.monomial_field(CFG, grid, (1,), 1, ones),
            GArr.monomial_field(CFG, grid, (2,), 1, 0.5 * ones)],
    )
    lie = lie_derivative_metric(s)
    assert max(v.sup_norm() for v in lie.values()) < 1e-13
    Q = apply_Q_bulk(s)
    assert Q.comps["gamma"].sup_norm() < 1e-13
    assert max(c.sup_norm() for c in Q.comps["xi"]) < 1e-13
    assert Q.comps["xi_n"].sup_norm() < 1e-13
    assert Q.comps["eta"].sup_norm() < 1e-13


def test_Q_gamma_is_symmetrized_gradient_on_flat_metric():
    # xi^a = th1 v^a(x), metric flat: (Q gamma)_ab = th1 (d_a v_b + d_b v_a)
    # and the ghost advection term dies at second order in th1.
    grid = BulkPatchGrid(PeriodicGrid((16, 16)), n_layers=9)
    rng = np.random.default_rng(7)
    v = [trig_profile(grid, rng, 0.3) for _ in range(2)]
    s = _flat_bv(grid, 2,
                 xi=[GArr.monomial_field(CFG, grid, (1,), 1, v[a])
                     for a in range(2)])
    Q = apply_Q_bulk(s)
    for a in range(2):
        for b in range(a, 2):
            want = GArr.monomial_field(
                CFG, grid, (1,), 1,
                grid.deriv(v[b], a + 1) + grid.deriv(v[a], b + 1))
            assert (Q.comps["gamma"].g(a, b) - want).sup_norm() < 1e-12
    # xi^s d_s xi^a carries th1 th1 = 0
    assert max(c.sup_norm() for c in Q.comps["xi"]) < 1e-14


def test_Q_raises_ghost_grade_by_one():
    grid = BulkPatchGrid(PeriodicGrid((8, 8)), n_layers=9)
    s = random_bulk_bv(CFG, grid, seed=2, amp=0.02)
    Q = apply_Q_bulk(s)
    slot_grade = {"eta": 0, "beta": 0, "gamma": 0, "xi_n": 1, "xi": 1,
                  "gdag_nn": -1, "gdag_n": -1, "gdag": -1,
                  "chi_n": -2, "chi": -2}
    for name, comp in Q.comps.items():
        parts = ([comp] if isinstance(comp, GArr)
                 else list(comp.comp.values()) if isinstance(comp, Sym2)
                 else list(comp))
        for g in parts:
            assert g.ghost_grade() in (slot_grade[name] + 1, PureZero), name


def test_Q_square_geometric_sector_d2():
    # 32^2 keeps every product of band-2 fields below Nyquist and quadratic
    # normal profiles inside the 5-point stencil's exactness degree, so the
    # graded cancellation is visible down to round-off.
    grid = BulkPatchGrid(PeriodicGrid((32, 32)), n_layers=9)
    for seed in range(5):
        s = random_bulk_bv(CFG, grid, seed=seed, amp=0.02)
        res = q_square_residual(s, slots=GEOM_SLOTS)
        assert max(res.values()) < 1e-8, (seed, res)


def test_Q_square_geometric_sector_d3():
    # the inverse-metric tails alias in d = 3 at 16^3; amplitude 0.004 keeps
    # the residual an order under the bound (measured 1.6e-9 over 20 seeds).
    grid = BulkPatchGrid(PeriodicGrid((16, 16, 16)), n_layers=9)
    for seed in (0, 1):
        s = random_bulk_bv(CFG, grid, seed=seed, amp=0.004)
        res = q_square_residual(s, slots=GEOM_SLOTS)
        assert max(res.values()) < 1e-8, (seed, res)


def _battery_classes(grid, d, rng):
    xn = grid.normal_coord()
    window = (xn * (1 - xn)) ** 2

    def mono(gens, ghost):
        return GArr.monomial_field(CFG, grid, gens, ghost,
                                   window * (1.0 + trig_profile(grid, rng, 0.5)))

    def sym_mono(gens, ghost):
        out = Sym2(d)
        for a in range(d):
            for b in range(a, d):
                out.comp[(a, b)] = mono(gens, ghost)
        return out

    return {
        "antifield": Direction({"gdag_nn": mono((AUX0,), -1),
                                "gdag_n": [mono((AUX0,), -1) for _ in range(d)],
                                "gdag": sym_mono((AUX0,), -1)}, shift=-1),
        "metric": Direction({"eta": mono((AUX0, AUX1), 0),
                             "beta": [mono((AUX0, AUX1), 0) for _ in range(d)],
                             "gamma": sym_mono((AUX0, AUX1), 0)}, shift=0),
        "ghost": Direction({"xi_n": mono((AUX0,), 1),
                            "xi": [mono((AUX0,), 1) for _ in range(d)]},
                           shift=1),
        "antighost": Direction({"chi_n": mono((3, AUX0), -2),
                                "chi": [mono((5, AUX0), -2) for _ in range(d)]},
                               shift=-2),
    }


def _battery_residuals(n_layers, seed):
    grid = BulkPatchGrid(PeriodicGrid((16, 16)), n_layers=n_layers)
    s = random_bulk_bv(CFG, grid, seed=seed, amp=0.02)
    Q = apply_Q_bulk(s)
    out = {}
    for name, Y in _battery_classes(grid, 2, np.random.default_rng(99)).items():
        dS = directional_derivative(bv_action, s, Y, check_grade=False)
        assert dS.ghost_grade() in (0, PureZero), name
        lhs = omega_bv(s, Q, Y)
        out[name] = (lhs - dS).sup_norm() / max(dS.sup_norm(), 1e-30)
    return out


def test_contraction_identity_pins_all_slot_signs():
    # Omega(Q, Y) = D_Y S for interior-supported Y in all four slot classes.
    # The antighost class closes without any integration by parts (exact);
    # the antifield class needs only tangential (spectral) product identities;
    # metric and ghost classes pay the normal-axis discrete-IBP price, which
    # the companion test below pins to fourth order.
    tol = {"antifield": 1e-7, "metric": 1e-4, "ghost": 1e-3,
           "antighost": 1e-12}
    for seed in (5, 12):
        res = _battery_residuals(17, seed)
        for name, r in res.items():
            assert r < tol[name], (seed, name, r)


def test_contraction_residual_is_discretization_order_four():
    # the ghost class is differentiated exactly (odd direction), so its
    # residual is pure normal-axis summation-by-parts error: halving the
    # layer spacing must buy close to 2^4.  The metric class goes through
    # the even finite-difference route whose step floor does not scale with
    # the grid, so it only gets a monotonicity check.
    coarse = _battery_residuals(9, 5)
    fine = _battery_residuals(17, 5)
    assert fine["ghost"] < coarse["ghost"] / 8.0, (coarse["ghost"], fine["ghost"])
    assert fine["metric"] < coarse["metric"], (coarse["metric"], fine["metric"])


def test_omega_block_sign_mutations_break_contraction(monkeypatch):
    grid = BulkPatchGrid(PeriodicGrid((16, 16)), n_layers=9)
    s = random_bulk_bv(CFG, grid, seed=5, amp=0.02)
    Q = apply_Q_bulk(s)
    classes = _battery_classes(grid, 2, np.random.default_rng(99))
    probes = {"OMEGA_METRIC_COEFF": "antifield", "OMEGA_GHOST_COEFF": "ghost"}
    for const, cls in probes.items():
        Y = classes[cls]
        dS = directional_derivative(bv_action, s, Y, check_grade=False)
        scale = max(dS.sup_norm(), 1e-30)
        monkeypatch.setattr(bvmod, const, -getattr(bvmod, const))
        bad = (omega_bv(s, Q, Y) - dS).sup_norm() / scale
        monkeypatch.undo()
        good = (omega_bv(s, Q, Y) - dS).sup_norm() / scale
        assert bad > 1.0, (const, bad)
        assert good < 1e-2, (const, good)


def test_omega_graded_antisymmetry():
    grid = BulkPatchGrid(PeriodicGrid((8, 8)), n_layers=9)
    s = random_bulk_bv(CFG, grid, seed=4, amp=0.02)
    classes = _battery_classes(grid, 2, np.random.default_rng(21))
    for xn, yn in (("metric", "antifield"), ("ghost", "antighost"),
                   ("antifield", "ghost")):
        X, Y = classes[xn], classes[yn]
        sign = -1.0 if (X.shift % 2 and Y.shift % 2) else 1.0
        lhs = omega_bv(s, X, Y)
        rhs = omega_bv(s, Y, X) * (-sign)
        assert (lhs - rhs).sup_norm() < 1e-12 * max(1.0, lhs.sup_norm())
