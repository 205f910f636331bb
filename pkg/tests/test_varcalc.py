"""Directional-derivative machinery: exact odd route, FD route, brackets."""

import numpy as np
import pytest

from bvadm.errors import GradeMismatch
from bvadm.fields import GArr, PeriodicGrid
from bvadm.grassmann import GrassmannConfig
from bvadm.states import StateBase
from bvadm.varcalc import (Direction, dir_axpy, directional_derivative,
                           fieldspace_bracket, map_directional_derivative)


class Toy(StateBase):
    SLOT_KINDS = {"u": "scalar", "w": "scalar", "v": "scalar"}

    def __init__(self, config, grid, u, w=None, v=None):
        self.config = config
        self.grid = grid
        self.u = u
        self.w = w
        self.v = v


def _setup(n=16):
    config = GrassmannConfig(num_generators=8)
    grid = PeriodicGrid((n,))
    x = grid.coords(0)
    return config, grid, x


def test_fd_route_matches_analytic_even_derivative():
    config, grid, x = _setup()
    u = GArr.body_field(config, grid, 1.0 + 0.3 * np.sin(2 * np.pi * x))
    s = Toy(config, grid, u)

    def F(st):
        return (st.u * st.u * st.u).integrate()

    prof = np.cos(2 * np.pi * x) + 0.5
    X = Direction({"u": GArr.body_field(config, grid, prof)}, shift=0)
    got = directional_derivative(F, s, X)
    # d/dt at t=0 of \int (u + t prof)^3 = 3 \int u^2 prof
    want = (u * u * GArr.body_field(config, grid, 3.0 * prof)).integrate()
    assert abs(got.body() - want.body()) <= 1e-8 * (1 + abs(want.body()))


def test_exact_route_single_fresh_generator():
    config, grid, x = _setup()
    u = GArr.body_field(config, grid, 1.5 + 0.2 * np.cos(2 * np.pi * x))
    w = GArr.monomial_field(config, grid, (5,), -1, np.sin(2 * np.pi * x))
    s = Toy(config, grid, u, w=w)

    def F(st):
        return (st.u * st.w).integrate()

    prof = 0.7 + 0.1 * np.cos(4 * np.pi * x)
    X = Direction({"w": GArr.monomial_field(config, grid, (0,), 1, prof)},
                  shift=2)  # slot grade -1, inserted value grade +1
    got = directional_derivative(F, s, X)
    want = (u * GArr.monomial_field(config, grid, (0,), 1, prof)).integrate()
    assert (got - want).sup_norm() <= 1e-14


def test_exact_route_kills_cross_terms_in_quadratic_functional():
    config, grid, x = _setup()
    u = GArr.body_field(config, grid, np.full_like(x, 2.0))
    w = GArr.monomial_field(config, grid, (5,), -1, 1.0 + 0.3 * np.sin(2 * np.pi * x))
    v = GArr.monomial_field(config, grid, (6,), -1, np.cos(2 * np.pi * x) + 2.0)
    s = Toy(config, grid, u, w=w, v=v)

    def F(st):
        return (st.u * st.w * st.v).integrate()

    a = 0.4 + 0.1 * np.sin(4 * np.pi * x)
    b = 1.1 * np.cos(2 * np.pi * x)
    X = Direction({
        "w": GArr.monomial_field(config, grid, (0,), 1, a),
        "v": GArr.monomial_field(config, grid, (0,), 1, b),
    }, shift=2)
    got = directional_derivative(F, s, X)
    xa = GArr.monomial_field(config, grid, (0,), 1, a)
    xb = GArr.monomial_field(config, grid, (0,), 1, b)
    want = (u * xa * v).integrate() + (u * w * xb).integrate()
    assert (got - want).sup_norm() <= 1e-14


def test_aux_generator_beyond_pool_is_usable_in_directions():
    config, grid, x = _setup()
    u = GArr.body_field(config, grid, 1.0 + 0.1 * np.sin(2 * np.pi * x))
    w = GArr.monomial_field(config, grid, (4,), -1, np.cos(2 * np.pi * x))
    s = Toy(config, grid, u, w=w)
    tau = config.num_generators  # first index outside the sampling pool

    def F(st):
        return (st.w * st.u).integrate()

    X = Direction({"w": GArr.monomial_field(config, grid, (tau,), 1,
                                            np.ones_like(x))}, shift=2)
    got = directional_derivative(F, s, X)
    want = (GArr.monomial_field(config, grid, (tau,), 1, np.ones_like(x))
            * u).integrate()
    assert (got - want).sup_norm() <= 1e-14


def test_mixed_generator_direction_falls_back_to_fd():
    config, grid, x = _setup()
    u = GArr.body_field(config, grid, 1.0 + 0.2 * np.sin(2 * np.pi * x))
    w = GArr.monomial_field(config, grid, (5,), -1, np.cos(2 * np.pi * x))
    s = Toy(config, grid, u, w=w)

    def F(st):
        return (st.u * st.u * st.w).integrate()

    # two distinct fresh generators -> no single common one -> FD route;
    # the functional is linear in w so FD is exact up to rounding
    X = Direction({"w": GArr.monomial_field(config, grid, (1,), 1, x * 0 + 1.0)
                   + GArr.monomial_field(config, grid, (2,), 1, np.sin(2 * np.pi * x))},
                  shift=2)
    got = directional_derivative(F, s, X)
    want = (u * u * (GArr.monomial_field(config, grid, (1,), 1, x * 0 + 1.0)
                     + GArr.monomial_field(config, grid, (2,), 1,
                                           np.sin(2 * np.pi * x)))).integrate()
    assert (got - want).sup_norm() <= 1e-7


def test_grade_bookkeeping_violation_raises():
    config, grid, x = _setup()
    u = GArr.body_field(config, grid, 1.0 + 0.3 * np.sin(2 * np.pi * x))
    s = Toy(config, grid, u)

    def F(st):
        return (st.u * st.u).integrate()

    X = Direction({"u": GArr.body_field(config, grid, np.ones_like(x))},
                  shift=1)  # lies about its grade
    with pytest.raises(GradeMismatch):
        directional_derivative(F, s, X)


def test_linearity_in_the_direction():
    config, grid, x = _setup()
    rng = np.random.default_rng(7)
    u = GArr.body_field(config, grid, 1.0 + 0.2 * np.sin(2 * np.pi * x))
    s = Toy(config, grid, u)

    def F(st):
        return (st.u * st.u * st.u).integrate()

    for _ in range(4):
        pa = rng.normal(size=x.shape)
        pb = rng.normal(size=x.shape)
        a, b = rng.normal(), rng.normal()
        X = Direction({"u": GArr.body_field(config, grid, pa)})
        Y = Direction({"u": GArr.body_field(config, grid, pb)})
        Z = dir_axpy(X.scaled(a), Y, b)
        dz = directional_derivative(F, s, Z)
        dx = directional_derivative(F, s, X)
        dy = directional_derivative(F, s, Y)
        lin = dx * a + dy * b
        assert (dz - lin).sup_norm() <= 1e-8 * (1 + lin.sup_norm())


def test_map_derivative_and_bracket_hand_case():
    config, grid, x = _setup()
    q = GArr.body_field(config, grid, 1.0 + 0.25 * np.cos(2 * np.pi * x))
    p = GArr.body_field(config, grid, 0.5 * np.sin(2 * np.pi * x))
    s = Toy(config, grid, q, w=p)
    c = 0.8

    def Xmap(st):  # X = q d/dp
        return Direction({"w": st.u}, shift=0)

    def Ymap(st):  # Y = c d/dq
        return Direction({"u": GArr.body_field(st.config, st.grid,
                                               np.full(st.grid.shape, c))},
                         shift=0)

    dY_X = map_directional_derivative(Ymap, s, Xmap(s))
    assert all(v.sup_norm() <= 1e-9 for v in dY_X.comps.values())

    br = fieldspace_bracket(Xmap, Ymap, s, 0, 0)
    assert br.shift == 0
    assert "u" not in br.comps or br.comps["u"].sup_norm() <= 1e-8
    # [q d/dp, c d/dq] = -c d/dp
    got = br.comps["w"].body()
    assert np.max(np.abs(got + c)) <= 1e-7


def test_direction_utilities():
    config, grid, x = _setup()
    g1 = GArr.monomial_field(config, grid, (0,), 1, np.ones_like(x))
    X = Direction({"u": g1, "w": None})
    assert "w" not in X.comps
    assert X.generators() == {0}
    assert X.sup_norm() == 1.0
    Y = X.scaled(-2.0)
    assert Y.sup_norm() == 2.0
