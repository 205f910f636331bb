"""Grids, graded array-valued fields, and discrete calculus.

Three grid kinds:

* PeriodicGrid  -- unit torus T^d, spectral differentiation (default).
* BulkPatchGrid -- [0,1] x T^d; axis 0 is the normal direction, discretized
  with 4th-order finite differences (6-point one-sided closures so the
  convergence order does not drop at the boundary face x^n = 0) and composite
  Simpson quadrature; tangential axes are spectral.
* BoxGrid       -- non-periodic uniform box, FD4 on every axis.  Used for
  isolated-patch presets where periodic wrapping would be wrong.

A GArr is a Grassmann-algebra-valued field: a sparse dict mapping
(generator tuple, ghost tag) -> float64 coefficient array over the grid.
Linear grid operators act term by term; products merge monomials with the
Koszul sign.  Pointwise inverse/sqrt split off the body and run the
terminating nilpotent Taylor series.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigMismatch, GradeMismatch, SchemeUnsupported, SingularMetric
from .grassmann import GradedScalar, GrassmannConfig, _merge_sign

SPECTRAL = "spectral"
FD4 = "fd4"
ONE_SIDED = "one-sided"


# ----------------------------------------------------------------------
# finite-difference machinery
# ----------------------------------------------------------------------

def fd_weights(z, x, m):
    """Fornberg weights for derivatives 0..m at z from nodes x."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 = c2 * c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def fd_matrix(n, h, order):
    """Dense FD4 differentiation matrix on n uniform nodes with spacing h.

    Interior rows: 5-point central.  First/last two rows: 6-point one-sided
    (degree-5 exact), keeping 4th-order accuracy up to the edges.
    """
    if n < 7:
        raise ValueError("FD4 matrix needs at least 7 nodes")
    xs = np.arange(n) * h
    D = np.zeros((n, n))
    for i in range(n):
        if i < 2:
            nodes = range(0, 6)
        elif i > n - 3:
            nodes = range(n - 6, n)
        else:
            nodes = range(i - 2, i + 3)
        nodes = list(nodes)
        w = fd_weights(xs[i], xs[nodes], order)[order]
        D[i, nodes] = w
    return D


def simpson_weights(n, h):
    """Composite Simpson quadrature weights (degree-3 exact) on n nodes."""
    if n < 5:
        raise ValueError("need at least 5 nodes for composite Simpson")
    w = np.zeros(n)
    if n % 2 == 1:
        w[0::2] = 2.0
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0
    else:
        # even node count: Simpson on the first n-3 nodes, 3/8 rule on the
        # trailing three intervals
        w[: n - 3] += simpson_weights(n - 3, h)
        w[n - 4:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


def _spectral_deriv(arr, axis, length=1.0):
    """Spectral first derivative along a periodic axis of the array."""
    n = arr.shape[axis]
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k = k.copy()
        k[n // 2] = 0.0  # kill the Nyquist mode for odd derivatives
    shape = [1] * arr.ndim
    shape[axis] = n
    ik = (2j * np.pi / length) * k.reshape(shape)
    return np.real(np.fft.ifft(np.fft.fft(arr, axis=axis) * ik, axis=axis))


def _fd4_periodic_deriv(arr, axis, h):
    """5-point central FD4 first derivative with periodic wrapping."""
    def roll(s):
        return np.roll(arr, -s, axis=axis)

    return (roll(-2) - 8.0 * roll(-1) + 8.0 * roll(1) - roll(2)) / (12.0 * h)


def _apply_matrix(D, arr, axis):
    out = np.tensordot(D, arr, axes=([1], [axis]))
    return np.moveaxis(out, 0, axis)


# ----------------------------------------------------------------------
# grids
# ----------------------------------------------------------------------

class PeriodicGrid:
    """Unit torus T^d sampled on a uniform grid (>= 8 points per axis)."""

    def __init__(self, shape):
        shape = tuple(int(n) for n in (shape if np.iterable(shape) else (shape,)))
        if any(n < 8 for n in shape):
            raise ValueError("PeriodicGrid needs >= 8 points per axis")
        self.shape = shape
        self.d = len(shape)
        self.h = tuple(1.0 / n for n in shape)
        self.weight = float(np.prod(self.h))

    def coords(self, axis):
        n = self.shape[axis]
        x = np.arange(n) / n
        shape = [1] * self.d
        shape[axis] = n
        return np.broadcast_to(x.reshape(shape), self.shape)

    def integrate(self, arr):
        return float(np.sum(arr) * self.weight)

    def deriv(self, arr, axis, scheme=None):
        if scheme in (None, SPECTRAL):
            return _spectral_deriv(arr, axis)
        if scheme == FD4:
            return _fd4_periodic_deriv(arr, axis, self.h[axis])
        raise SchemeUnsupported(f"scheme {scheme!r} not available on a periodic axis")

    def __eq__(self, other):
        return isinstance(other, PeriodicGrid) and self.shape == other.shape

    def __repr__(self):
        return f"PeriodicGrid{self.shape}"


class BulkPatchGrid:
    """[0,1] x T^d with the boundary face at x^n = 0 (array axis 0)."""

    def __init__(self, boundary: PeriodicGrid, n_layers: int = 9):
        if n_layers < 7:
            raise ValueError("BulkPatchGrid needs >= 7 normal layers")
        self.boundary = boundary
        self.n_layers = int(n_layers)
        self.hn = 1.0 / (self.n_layers - 1)
        self.shape = (self.n_layers,) + boundary.shape
        self.d = boundary.d
        self.D1 = fd_matrix(self.n_layers, self.hn, 1)
        self.D2 = fd_matrix(self.n_layers, self.hn, 2)
        self.wn = simpson_weights(self.n_layers, self.hn)

    def normal_coord(self):
        x = np.arange(self.n_layers) * self.hn
        return np.broadcast_to(x.reshape((-1,) + (1,) * self.d), self.shape)

    def coords(self, axis):
        """Tangential coordinate (axis indexes the boundary directions)."""
        c = self.boundary.coords(axis)
        return np.broadcast_to(c[None, ...], self.shape)

    def integrate(self, arr):
        per_layer = arr.reshape(self.n_layers, -1).sum(axis=1) * self.boundary.weight
        return float(np.dot(self.wn, per_layer))

    def deriv_n(self, arr, order=1):
        D = self.D1 if order == 1 else self.D2
        return _apply_matrix(D, arr, 0)

    def deriv(self, arr, axis, scheme=None):
        """axis 0 = normal (FD4 matrix); axes 1..d = tangential (spectral)."""
        if axis == 0:
            if scheme in (None, FD4, ONE_SIDED):
                return self.deriv_n(arr)
            raise SchemeUnsupported("spectral differencing is invalid on the normal axis")
        if scheme in (None, SPECTRAL):
            return _spectral_deriv(arr, axis)
        if scheme == FD4:
            return _fd4_periodic_deriv(arr, axis, self.boundary.h[axis - 1])
        raise SchemeUnsupported(f"scheme {scheme!r} not available on a tangential axis")

    def __eq__(self, other):
        return (
            isinstance(other, BulkPatchGrid)
            and self.boundary == other.boundary
            and self.n_layers == other.n_layers
        )

    def __repr__(self):
        return f"BulkPatchGrid(n={self.n_layers}, boundary={self.boundary})"


class BoxGrid:
    """Non-periodic uniform box; FD4 on every axis.  No wrap-around."""

    def __init__(self, shape, origin, lengths):
        shape = tuple(int(n) for n in shape)
        if any(n < 7 for n in shape):
            raise ValueError("BoxGrid needs >= 7 points per axis")
        self.shape = shape
        self.d = len(shape)
        self.origin = tuple(float(o) for o in origin)
        self.lengths = tuple(float(L) for L in lengths)
        self.h = tuple(L / (n - 1) for L, n in zip(self.lengths, shape))
        self._D1 = [fd_matrix(n, h, 1) for n, h in zip(shape, self.h)]
        self._D2 = [fd_matrix(n, h, 2) for n, h in zip(shape, self.h)]

    def coords(self, axis):
        n = self.shape[axis]
        x = self.origin[axis] + np.arange(n) * self.h[axis]
        shape = [1] * self.d
        shape[axis] = n
        return np.broadcast_to(x.reshape(shape), self.shape)

    def deriv(self, arr, axis, scheme=None, order=1):
        if scheme in (None, FD4, ONE_SIDED):
            D = (self._D1 if order == 1 else self._D2)[axis]
            return _apply_matrix(D, arr, axis)
        raise SchemeUnsupported("only FD4 differencing is available on a BoxGrid")

    def __eq__(self, other):
        return (
            isinstance(other, BoxGrid)
            and self.shape == other.shape
            and self.origin == other.origin
            and self.lengths == other.lengths
        )


# ----------------------------------------------------------------------
# graded array fields
# ----------------------------------------------------------------------

class GArr:
    """Grassmann-valued field over a grid (sparse in monomials)."""

    __slots__ = ("config", "grid", "terms")

    def __init__(self, config: GrassmannConfig, grid, terms=None):
        self.config = config
        self.grid = grid
        self.terms = {}
        if terms:
            for (gens, ghost), arr in terms.items():
                self._accumulate(tuple(gens), int(ghost), arr)

    def _coerce(self, arr):
        a = np.asarray(arr, dtype=float)
        if a.shape != self.grid.shape:
            a = np.broadcast_to(a, self.grid.shape)
        return a

    def _accumulate(self, gens, ghost, arr):
        if len(gens) % 2 != ghost % 2:
            raise GradeMismatch(f"term {gens!r} ghost {ghost} violates parity")
        arr = self._coerce(arr)
        if not np.any(arr):
            return
        key = (gens, ghost)
        if key in self.terms:
            s = self.terms[key] + arr
            if np.any(s):
                self.terms[key] = s
            else:
                del self.terms[key]
        else:
            self.terms[key] = np.array(arr, dtype=float)

    # ---- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, config, grid):
        return cls(config, grid)

    @classmethod
    def body_field(cls, config, grid, arr):
        out = cls(config, grid)
        out._accumulate((), 0, arr)
        return out

    @classmethod
    def monomial_field(cls, config, grid, gens, ghost, arr):
        gens = tuple(sorted(int(g) for g in gens))
        if len(set(gens)) != len(gens):
            return cls(config, grid)
        out = cls(config, grid)
        out._accumulate(gens, int(ghost), arr)
        return out

    def copy(self):
        out = GArr(self.config, self.grid)
        out.terms = {k: v.copy() for k, v in self.terms.items()}
        return out

    # ---- algebra ----------------------------------------------------------

    def _check(self, other):
        if self.config != other.config:
            raise ConfigMismatch("GArr operands use different Grassmann configs")
        if self.grid != other.grid:
            raise ConfigMismatch("GArr operands live on different grids")

    def __add__(self, other):
        if isinstance(other, (int, float, np.ndarray)):
            other = GArr.body_field(self.config, self.grid, other)
        self._check(other)
        out = self.copy()
        for (gens, ghost), arr in other.terms.items():
            out._accumulate(gens, ghost, arr)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = GArr(self.config, self.grid)
        out.terms = {k: -v for k, v in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, float, np.ndarray)):
            other = GArr.body_field(self.config, self.grid, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float, np.ndarray)):
            out = GArr(self.config, self.grid)
            for (gens, ghost), arr in self.terms.items():
                out._accumulate(gens, ghost, arr * other)
            return out
        if isinstance(other, GradedScalar):
            other = GArr(
                self.config, self.grid,
                {k: np.full(self.grid.shape, c) for k, c in other.terms.items()},
            )
        self._check(other)
        out = GArr(self.config, self.grid)
        for (I, p), a in self.terms.items():
            for (J, q), b in other.terms.items():
                merged, sign = _merge_sign(I, J)
                if sign:
                    out._accumulate(merged, p + q, (a * b) if sign > 0 else -(a * b))
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.ndarray, GradedScalar)):
            # even coefficients commute with everything
            if isinstance(other, GradedScalar):
                g = other.ghost_grade()
                if isinstance(g, int) and g % 2:
                    raise GradeMismatch("odd scalar coefficients must use gr-mul order")
            return self * other
        return NotImplemented  # pragma: no cover

    # ---- calculus ---------------------------------------------------------

    def apply_linear(self, fn):
        out = GArr(self.config, self.grid)
        for key, arr in self.terms.items():
            out._accumulate(key[0], key[1], fn(arr))
        return out

    def deriv(self, axis, scheme=None):
        return self.apply_linear(lambda a: self.grid.deriv(a, axis, scheme))

    def left_derive(self, k, tag=None):
        if tag is None:
            tag = self.config.tag(k)
        if tag % 2 == 0:
            raise GradeMismatch("derivative tag must be odd")
        out = GArr(self.config, self.grid)
        for (I, p), arr in self.terms.items():
            try:
                pos = I.index(k)
            except ValueError:
                continue
            rest = I[:pos] + I[pos + 1:]
            out._accumulate(rest, p - tag, arr if pos % 2 == 0 else -arr)
        return out

    def integrate(self) -> GradedScalar:
        terms = {k: self.grid.integrate(arr) for k, arr in self.terms.items()}
        return GradedScalar(self.config, terms)

    def restrict_boundary(self, boundary_grid):
        """Slice the x^n = 0 layer of a bulk field onto the boundary grid."""
        out = GArr(self.config, boundary_grid)
        for key, arr in self.terms.items():
            out._accumulate(key[0], key[1], arr[0])
        return out

    # ---- inspection ---------------------------------------------------------

    def body(self):
        key = ((), 0)
        if key in self.terms:
            return self.terms[key].copy()
        return np.zeros(self.grid.shape)

    def ghost_grade(self):
        from .grassmann import Mixed, PureZero

        if not self.terms:
            return PureZero
        ghosts = {g for (_, g) in self.terms}
        return ghosts.pop() if len(ghosts) == 1 else Mixed

    def sup_norm(self):
        return max((float(np.max(np.abs(a))) for a in self.terms.values()), default=0.0)

    def is_zero(self):
        return not self.terms

    def allclose(self, other, tol=1e-12):
        return (self - other).sup_norm() <= tol

    def __repr__(self):
        return f"GArr<{len(self.terms)} terms on {self.grid!r}>"


# ----------------------------------------------------------------------
# pointwise nilpotent-safe functions
# ----------------------------------------------------------------------

_SERIES_CAP = 24


def reciprocal(f: GArr) -> GArr:
    """Pointwise 1/f; the body must be bounded away from zero."""
    b = f.body()
    if not np.all(np.abs(b) > 0.0):
        raise SingularMetric("reciprocal of a field with vanishing body")
    binv = 1.0 / b
    nil = f - b
    out = GArr.body_field(f.config, f.grid, binv)
    term = GArr.body_field(f.config, f.grid, binv)
    for _ in range(_SERIES_CAP):
        if nil.is_zero():
            break
        term = (term * nil) * (-1.0) * binv
        if term.is_zero():
            break
        out = out + term
    else:  # pragma: no cover
        raise RuntimeError("nilpotent series did not terminate")
    return out


def sqrt(f: GArr) -> GArr:
    """Pointwise sqrt(f); the body must be strictly positive."""
    b = f.body()
    if not np.all(b > 0.0):
        raise SingularMetric("sqrt of a field with non-positive body")
    rb = np.sqrt(b)
    nil = f - b
    out = GArr.body_field(f.config, f.grid, rb)
    # sqrt(b + N) = sqrt(b) * sum_k binom(1/2, k) (N/b)^k
    coeff = 1.0
    power = GArr.body_field(f.config, f.grid, np.ones_like(b))
    for k in range(1, _SERIES_CAP):
        if nil.is_zero():
            break
        coeff *= (0.5 - (k - 1)) / k
        power = power * nil
        if power.is_zero():
            break
        out = out + power * (coeff / b ** k * rb)
    else:  # pragma: no cover
        raise RuntimeError("nilpotent series did not terminate")
    return out


# ----------------------------------------------------------------------
# symmetric rank-2 containers (upper triangle stored once)
# ----------------------------------------------------------------------

class Sym2:
    """Symmetric rank-2 field: components stored for a <= b only."""

    __slots__ = ("d", "comp")

    def __init__(self, d, comp=None):
        self.d = int(d)
        self.comp = dict(comp) if comp else {}

    @classmethod
    def zeros(cls, config, grid, d):
        return cls(d, {(a, b): GArr.zero(config, grid) for a in range(d) for b in range(a, d)})

    @classmethod
    def identity(cls, config, grid, d):
        out = cls.zeros(config, grid, d)
        for a in range(d):
            out.comp[(a, a)] = GArr.body_field(config, grid, np.ones(grid.shape))
        return out

    def g(self, a, b) -> GArr:
        return self.comp[(a, b) if a <= b else (b, a)]

    def set(self, a, b, value: GArr):
        self.comp[(a, b) if a <= b else (b, a)] = value

    def map(self, fn):
        return Sym2(self.d, {k: fn(v) for k, v in self.comp.items()})

    def __add__(self, other):
        return Sym2(self.d, {k: self.comp[k] + other.comp[k] for k in self.comp})

    def __sub__(self, other):
        return Sym2(self.d, {k: self.comp[k] - other.comp[k] for k in self.comp})

    def scaled(self, c):
        return self.map(lambda v: v * c)

    def sup_norm(self):
        return max((v.sup_norm() for v in self.comp.values()), default=0.0)


def sym_pairs(d):
    return [(a, b) for a in range(d) for b in range(a, d)]


def mat_from_sym(S: Sym2):
    return [[S.g(a, b) for b in range(S.d)] for a in range(S.d)]


def matmul(A, B):
    n = len(A)
    m = len(B[0])
    inner = len(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for k in range(inner):
                t = A[i][k] * B[k][j]
                acc = t if acc is None else acc + t
            row.append(acc)
        out.append(row)
    return out


def mat_is_zero(A):
    return all(v.is_zero() for row in A for v in row)


def sym_det(S: Sym2) -> GArr:
    d = S.d
    if d == 1:
        return S.g(0, 0)
    if d == 2:
        return S.g(0, 0) * S.g(1, 1) - S.g(0, 1) * S.g(0, 1)
    if d == 3:
        a, b, c = S.g(0, 0), S.g(0, 1), S.g(0, 2)
        e, f, i = S.g(1, 1), S.g(1, 2), S.g(2, 2)
        return a * (e * i - f * f) - b * (b * i - f * c) + c * (b * f - e * c)
    raise NotImplementedError("sym_det supports d <= 3")


def sym_inverse(S: Sym2) -> Sym2:
    """Inverse of a symmetric matrix field with positive-definite body."""
    d = S.d
    some = next(iter(S.comp.values()))
    config, grid = some.config, some.grid
    body = np.zeros((d, d) + grid.shape)
    for a in range(d):
        for b in range(d):
            body[a, b] = S.g(a, b).body()
    moved = np.moveaxis(body, (0, 1), (-2, -1))
    dets = np.linalg.det(moved)
    if not np.all(dets > 0):
        raise SingularMetric("metric body is not positive definite")
    binv = np.moveaxis(np.linalg.inv(moved), (-2, -1), (0, 1))

    Binv = [[GArr.body_field(config, grid, binv[a, b]) for b in range(d)] for a in range(d)]
    N = [[S.g(a, b) - body[a, b] for b in range(d)] for a in range(d)]
    if mat_is_zero(N):
        acc = Binv
    else:
        # (B + N)^-1 = sum_k (-Binv N)^k Binv, terminating by nilpotency
        R = matmul(Binv, N)
        R = [[-v for v in row] for row in R]
        acc = [row[:] for row in Binv]
        term = [row[:] for row in Binv]
        for _ in range(_SERIES_CAP):
            term = matmul(R, term)
            if mat_is_zero(term):
                break
            acc = [[acc[a][b] + term[a][b] for b in range(d)] for a in range(d)]
        else:  # pragma: no cover
            raise RuntimeError("matrix nilpotent series did not terminate")
    out = Sym2(d)
    for a in range(d):
        for b in range(a, d):
            # symmetrize to wash out roundoff asymmetry in the body inverse
            out.set(a, b, (acc[a][b] + acc[b][a]) * 0.5)
    return out


def sqrt_det(S: Sym2) -> GArr:
    return sqrt(sym_det(S))


# ----------------------------------------------------------------------
# public derivative entry point (spec-facing)
# ----------------------------------------------------------------------

def spatial_derivative(f: GArr, axis: int, scheme: str | None = None) -> GArr:
    """Differentiate a graded field along a grid axis.

    On a periodic grid the default is spectral; FD4 is available; one-sided
    schemes are rejected.  On a bulk patch axis 0 is the FD4 normal
    derivative (one-sided rows near the faces) and spectral is rejected there.
    """
    return f.deriv(axis, scheme)
