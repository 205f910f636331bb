import numpy as np
import pytest

from bvadm.errors import GradeMismatch, SchemeUnsupported, SingularMetric
from bvadm.fields import (
    FD4,
    SPECTRAL,
    BulkPatchGrid,
    BoxGrid,
    GArr,
    PeriodicGrid,
    Sym2,
    fd_matrix,
    fd_weights,
    matmul,
    mat_from_sym,
    reciprocal,
    simpson_weights,
    spatial_derivative,
    sqrt,
    sqrt_det,
    sym_det,
    sym_inverse,
)
from bvadm.grassmann import GradedScalar, GrassmannConfig

CFG = GrassmannConfig(8)


# ---------------------------------------------------------------- stencils

def test_fd_weights_reproduce_polynomial_derivatives():
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0, 1.25])
    z = 0.5
    w = fd_weights(z, x, 2)
    for p in range(6):  # exact through degree 5 on 6 nodes
        f = x ** p
        d1 = p * z ** (p - 1) if p >= 1 else 0.0
        d2 = p * (p - 1) * z ** (p - 2) if p >= 2 else 0.0
        assert np.dot(w[1], f) == pytest.approx(d1, abs=1e-10)
        assert np.dot(w[2], f) == pytest.approx(d2, abs=1e-9)


def test_fd_matrix_exact_on_quartics_including_edges():
    n, h = 9, 1.0 / 8.0
    D1 = fd_matrix(n, h, 1)
    D2 = fd_matrix(n, h, 2)
    x = np.arange(n) * h
    f = 1.0 - 2.0 * x + 3.0 * x ** 2 - x ** 3 + 0.5 * x ** 4
    df = -2.0 + 6.0 * x - 3.0 * x ** 2 + 2.0 * x ** 3
    d2f = 6.0 - 6.0 * x + 6.0 * x ** 2
    assert np.max(np.abs(D1 @ f - df)) < 1e-11
    assert np.max(np.abs(D2 @ f - d2f)) < 1e-9


def test_fd_matrix_convergence_order_for_smooth_profiles():
    errs = []
    for n in (9, 17):
        h = 1.0 / (n - 1)
        D1 = fd_matrix(n, h, 1)
        x = np.arange(n) * h
        f = np.sin(np.pi * x + 0.3)
        errs.append(np.max(np.abs(D1 @ f - np.pi * np.cos(np.pi * x + 0.3))))
    order = np.log2(errs[0] / errs[1])
    assert order > 3.7


def test_simpson_weights_exact_on_cubics():
    for n in (9, 17, 8, 12):
        h = 1.0 / (n - 1)
        w = simpson_weights(n, h)
        x = np.arange(n) * h
        for p, exact in [(0, 1.0), (1, 0.5), (2, 1.0 / 3.0), (3, 0.25)]:
            assert np.dot(w, x ** p) == pytest.approx(exact, abs=1e-13)


# ---------------------------------------------------------------- grids

def test_spectral_derivative_matches_analytic():
    g = PeriodicGrid((32, 16))
    x = g.coords(0)
    y = g.coords(1)
    f = np.sin(2 * np.pi * x) * np.cos(4 * np.pi * y)
    dfx = 2 * np.pi * np.cos(2 * np.pi * x) * np.cos(4 * np.pi * y)
    dfy = -4 * np.pi * np.sin(2 * np.pi * x) * np.sin(4 * np.pi * y)
    assert np.max(np.abs(g.deriv(f, 0) - dfx)) < 1e-10
    assert np.max(np.abs(g.deriv(f, 1) - dfy)) < 1e-10
    # fd4 option agrees to its truncation order
    assert np.max(np.abs(g.deriv(f, 0, FD4) - dfx)) < 2e-2


def test_periodic_rejects_one_sided():
    g = PeriodicGrid((16,))
    with pytest.raises(SchemeUnsupported):
        g.deriv(np.zeros(16), 0, "one-sided")


def test_bulk_grid_normal_derivative_and_quadrature():
    b = PeriodicGrid((8,))
    bulk = BulkPatchGrid(b, 9)
    xn = bulk.normal_coord()
    f = 1.0 + xn ** 2 - 0.5 * xn ** 3
    df = 2.0 * xn - 1.5 * xn ** 2
    assert np.max(np.abs(bulk.deriv(f, 0) - df)) < 1e-11
    # integral of x^2 - grid is [0,1] x T^1
    assert bulk.integrate(xn ** 2) == pytest.approx(1.0 / 3.0, abs=1e-13)
    with pytest.raises(SchemeUnsupported):
        bulk.deriv(f, 0, SPECTRAL)


def test_bulk_discrete_ibp_exact_for_cubic_products():
    b = PeriodicGrid((8,))
    bulk = BulkPatchGrid(b, 9)
    xn = bulk.normal_coord()
    f = 0.3 + xn - 0.25 * xn ** 2
    g = 1.0 - 0.5 * xn + 0.1 * xn ** 2
    lhs = bulk.integrate(bulk.deriv_n(f) * g + f * bulk.deriv_n(g))
    fg = f * g
    boundary = (fg[-1].mean() - fg[0].mean())  # area element of T^1 is 1
    assert lhs == pytest.approx(boundary, abs=1e-12)


def test_box_grid_derivative():
    box = BoxGrid((9, 9), origin=(1.0, 2.0), lengths=(0.5, 0.5))
    x = box.coords(0)
    f = x ** 3
    assert np.max(np.abs(box.deriv(f, 0) - 3 * x ** 2)) < 1e-9
    with pytest.raises(SchemeUnsupported):
        box.deriv(f, 0, SPECTRAL)


# ---------------------------------------------------------------- GArr

def test_garr_product_tracks_scalar_engine():
    g = PeriodicGrid((8,))
    rng = np.random.default_rng(3)
    a = GArr.monomial_field(CFG, g, (0,), 1, rng.normal(size=8))
    b = GArr.monomial_field(CFG, g, (1,), 1, rng.normal(size=8))
    c = GArr.body_field(CFG, g, rng.normal(size=8))
    prod = (a + c) * b
    # anticommutation at the field level
    anti = b * (a + c) * -1.0
    # even block should differ: c*b is even*odd = commuting
    assert not prod.allclose(anti)
    assert (a * b + b * a).sup_norm() < 1e-14
    assert (a * a).is_zero()


def test_garr_leibniz_spectral():
    g = PeriodicGrid((32,))
    x = g.coords(0)
    f = GArr.body_field(CFG, g, 1.0 + 0.3 * np.sin(2 * np.pi * x))
    h = GArr.monomial_field(CFG, g, (2,), 1, np.cos(2 * np.pi * x))
    lhs = (f * h).deriv(0)
    rhs = f.deriv(0) * h + f * h.deriv(0)
    assert (lhs - rhs).sup_norm() < 1e-9


def test_garr_integrate_returns_graded_scalar():
    g = PeriodicGrid((16,))
    f = GArr.monomial_field(CFG, g, (0, 1), 2, np.full(16, 2.0))
    val = f.integrate()
    assert isinstance(val, GradedScalar)
    assert val.terms == {((0, 1), 2): pytest.approx(2.0)}


def test_garr_parity_enforced():
    g = PeriodicGrid((8,))
    with pytest.raises(GradeMismatch):
        GArr(CFG, g, {((0,), 0): np.ones(8)})


def test_reciprocal_and_sqrt_with_nilpotent_parts():
    g = PeriodicGrid((8,))
    x = g.coords(0)
    v = 0.5 + 0.25 * np.cos(2 * np.pi * x)
    f = GArr.body_field(CFG, g, 2.0 + x * 0) + GArr.monomial_field(CFG, g, (0,), 1, v) * \
        GArr.monomial_field(CFG, g, (1,), 1, np.ones(8))
    finv = reciprocal(f)
    assert (f * finv - 1.0).sup_norm() < 1e-13
    s = sqrt(f)
    assert (s * s - f).sup_norm() < 1e-13
    with pytest.raises(SingularMetric):
        sqrt(GArr.body_field(CFG, g, -np.ones(8)))
    with pytest.raises(SingularMetric):
        reciprocal(GArr.zero(CFG, g))


def test_sym_inverse_and_det():
    g = PeriodicGrid((8, 8))
    rng = np.random.default_rng(5)
    d = 2
    S = Sym2.identity(CFG, g, d)
    for a in range(d):
        for b in range(a, d):
            bump = 0.2 * rng.normal() * np.cos(2 * np.pi * g.coords(0) + rng.normal())
            S.set(a, b, S.g(a, b) + bump)
    # add an odd-odd nilpotent piece
    theta_pair = GArr.monomial_field(CFG, g, (4, 5), -2, 0.1 * np.ones(g.shape))
    S.set(0, 1, S.g(0, 1) + theta_pair)
    Sinv = sym_inverse(S)
    prod = matmul(mat_from_sym(S), mat_from_sym(Sinv))
    for i in range(d):
        for j in range(d):
            target = 1.0 if i == j else 0.0
            assert (prod[i][j] - target).sup_norm() < 1e-12
    det = sym_det(S)
    body = det.body()
    expect = (
        S.g(0, 0).body() * S.g(1, 1).body() - S.g(0, 1).body() ** 2
    )
    assert np.max(np.abs(body - expect)) < 1e-13
    root = sqrt_det(S)
    assert ((root * root) - det).sup_norm() < 1e-12


def test_sym_inverse_rejects_indefinite_body():
    g = PeriodicGrid((8,))
    S = Sym2.identity(CFG, g, 2)
    S.set(1, 1, GArr.body_field(CFG, g, -np.ones(8)))
    with pytest.raises(SingularMetric):
        sym_inverse(S)


def test_spatial_derivative_dispatch():
    b = PeriodicGrid((8, 8))
    bulk = BulkPatchGrid(b, 9)
    f = GArr.body_field(CFG, bulk, bulk.normal_coord() ** 2)
    d = spatial_derivative(f, 0)
    assert np.max(np.abs(d.body() - 2 * bulk.normal_coord())) < 1e-11
    with pytest.raises(SchemeUnsupported):
        spatial_derivative(f, 0, SPECTRAL)


def test_restrict_boundary():
    b = PeriodicGrid((8,))
    bulk = BulkPatchGrid(b, 9)
    xn = bulk.normal_coord()
    x = bulk.coords(0)
    f = GArr.body_field(CFG, bulk, np.sin(2 * np.pi * x) * (1 + xn))
    r = f.restrict_boundary(b)
    assert r.grid == b
    assert np.max(np.abs(r.body() - np.sin(2 * np.pi * np.arange(8) / 8))) < 1e-12
