"""State containers for the bulk, pre-boundary and reduced phase spaces.

A state is a bag of named slots (graded fields, vectors of fields, symmetric
rank-2 fields) plus the discrete signature epsilon and the cosmological
constant.  Perturbation along a Direction (see varcalc) is generic: slot by
slot, matching kinds.
"""

from __future__ import annotations

import copy

import numpy as np

from .errors import MissingJets, SingularMetric
from .fields import GArr, Sym2, sym_inverse


def comp_axpy(cur, delta, t):
    """cur + t * delta for a slot value (GArr / list of GArr / Sym2)."""
    if isinstance(cur, GArr):
        return cur + delta * t
    if isinstance(cur, Sym2):
        out = Sym2(cur.d)
        for (a, b), v in cur.comp.items():
            out.comp[(a, b)] = v + delta.g(a, b) * t
        return out
    if isinstance(cur, list):
        return [c + dl * t for c, dl in zip(cur, delta)]
    raise TypeError(f"unsupported slot value {type(cur)!r}")


class StateBase:
    SLOT_KINDS: dict = {}
    JET_SLOTS: tuple = ()
    DIRECTION_ONLY: frozenset = frozenset()

    def slots(self):
        out = {}
        for name in self.SLOT_KINDS:
            if name in self.DIRECTION_ONLY:
                continue
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out

    def with_slots(self, updates):
        new = copy.copy(self)
        for name, v in updates.items():
            setattr(new, name, v)
        return new

    def perturbed(self, X, t=1.0):
        updates = {}
        for name, delta in X.comps.items():
            if delta is None:
                continue
            cur = getattr(self, name, None)
            if cur is None:
                if name in self.JET_SLOTS:
                    raise MissingJets(f"state has no jets for slot {name!r}")
                raise KeyError(f"state has no slot {name!r}")
            updates[name] = comp_axpy(cur, delta, t)
        return self.with_slots(updates)

    def sup_norm(self):
        m = 0.0
        for v in self.slots().values():
            if isinstance(v, GArr):
                m = max(m, v.sup_norm())
            elif isinstance(v, Sym2):
                m = max(m, v.sup_norm())
            elif isinstance(v, list):
                m = max([m] + [c.sup_norm() for c in v])
        return m

    def used_generators(self):
        used = set()
        for v in self.slots().values():
            garrs = (
                [v] if isinstance(v, GArr)
                else list(v.comp.values()) if isinstance(v, Sym2)
                else v
            )
            for g in garrs:
                for (gens, _) in g.terms:
                    used.update(gens)
        return used


class ADMBlock(StateBase):
    """Boundary-type metric data: lapse, shift, spatial metric, optional
    normal jet J = (normal derivative of gamma)."""

    SLOT_KINDS = {"eta": "scalar", "beta": "vec", "gamma": "sym", "J": "sym"}

    def __init__(self, config, grid, eta, beta, gamma, J=None, eps=1, lam=0.0):
        if eps not in (-1, 1):
            raise ValueError("eps must be +1 or -1")
        self.config = config
        self.grid = grid
        self.d = grid.d
        self.eta = eta
        self.beta = beta
        self.gamma = gamma
        self.J = J
        self.eps = int(eps)
        self.lam = float(lam)
        if not np.all(eta.body() > 0):
            raise SingularMetric("lapse body must be positive")


class BVBulkState(StateBase):
    """Full graded field content on the bulk patch [0,1] x T^d."""

    SLOT_KINDS = {
        "eta": "scalar", "beta": "vec", "gamma": "sym",
        "xi_n": "scalar", "xi": "vec",
        "gdag_nn": "scalar", "gdag_n": "vec", "gdag": "sym",
        "chi_n": "scalar", "chi": "vec",
    }

    def __init__(self, config, grid, eta, beta, gamma, xi_n, xi,
                 gdag_nn, gdag_n, gdag, chi_n, chi, eps=1, lam=0.0):
        if eps not in (-1, 1):
            raise ValueError("eps must be +1 or -1")
        self.config = config
        self.grid = grid            # BulkPatchGrid
        self.d = grid.d
        self.eta = eta
        self.beta = beta
        self.gamma = gamma
        self.xi_n = xi_n
        self.xi = xi
        self.gdag_nn = gdag_nn
        self.gdag_n = gdag_n
        self.gdag = gdag
        self.chi_n = chi_n
        self.chi = chi
        self.eps = int(eps)
        self.lam = float(lam)
        if not np.all(eta.body() > 0):
            raise SingularMetric("lapse body must be positive")


class PreBoundaryState(StateBase):
    """Boundary restrictions plus the normal jets the boundary structure reads.

    J is the normal jet of gamma (a state field in its own right); the other
    jets (jn_*) are optional and only consulted by jet-reading operations.
    """

    SLOT_KINDS = {
        "eta": "scalar", "beta": "vec", "gamma": "sym", "J": "sym",
        "xi_n": "scalar", "xi": "vec",
        "gdag_nn": "scalar", "gdag_n": "vec", "gdag": "sym",
        "chi_n": "scalar", "chi": "vec",
        "jn_eta": "scalar", "jn_beta": "vec",
        "jn_xin": "scalar", "jn_xi": "vec",
        "jn_gdag_nn": "scalar", "jn_gdag_n": "vec",
        "jn_chi_n": "scalar", "jn_chi": "vec",
    }
    JET_SLOTS = ("jn_eta", "jn_beta", "jn_xin", "jn_xi",
                 "jn_gdag_nn", "jn_gdag_n", "jn_chi_n", "jn_chi")

    def __init__(self, config, grid, eta, beta, gamma, J, xi_n, xi,
                 gdag_nn, gdag_n, gdag, chi_n, chi,
                 jn_eta=None, jn_beta=None, jn_xin=None, jn_xi=None,
                 jn_gdag_nn=None, jn_gdag_n=None, jn_chi_n=None, jn_chi=None,
                 eps=1, lam=0.0):
        if eps not in (-1, 1):
            raise ValueError("eps must be +1 or -1")
        self.config = config
        self.grid = grid            # PeriodicGrid
        self.d = grid.d
        self.eta = eta
        self.beta = beta
        self.gamma = gamma
        self.J = J
        self.xi_n = xi_n
        self.xi = xi
        self.gdag_nn = gdag_nn
        self.gdag_n = gdag_n
        self.gdag = gdag
        self.chi_n = chi_n
        self.chi = chi
        self.jn_eta = jn_eta
        self.jn_beta = jn_beta
        self.jn_xin = jn_xin
        self.jn_xi = jn_xi
        self.jn_gdag_nn = jn_gdag_nn
        self.jn_gdag_n = jn_gdag_n
        self.jn_chi_n = jn_chi_n
        self.jn_chi = jn_chi
        self.eps = int(eps)
        self.lam = float(lam)

    def require_jets(self, *names):
        for n in names:
            if getattr(self, n) is None:
                raise MissingJets(f"operation needs jet slot {n!r}")


class DarbouxState(StateBase):
    """Reduced boundary data: (gamma, Pi) and the ghost pair (xi, phi).

    The metric slot is stored with lower indices, but Direction objects use
    the slot name 'gamma_inv': variations are taken in the inverse metric so
    the boundary pairing has constant coefficients.  Perturbation therefore
    moves the inverse metric exactly and re-inverts.
    """

    SLOT_KINDS = {
        "gamma": "sym", "Pi": "sym",
        "bxi_n": "scalar", "bxi": "vec",
        "phi_n": "scalar", "phi": "vec",
        "gamma_inv": "sym",  # direction-only pseudo-slot
    }
    DIRECTION_ONLY = frozenset({"gamma_inv"})

    def __init__(self, config, grid, gamma, Pi, bxi_n, bxi, phi_n, phi,
                 eps=1, lam=0.0):
        if eps not in (-1, 1):
            raise ValueError("eps must be +1 or -1")
        self.config = config
        self.grid = grid
        self.d = grid.d
        self.gamma = gamma
        self.Pi = Pi
        self.bxi_n = bxi_n
        self.bxi = bxi
        self.phi_n = phi_n
        self.phi = phi
        self.eps = int(eps)
        self.lam = float(lam)

    @property
    def gamma_inv(self):
        return sym_inverse(self.gamma)

    def perturbed(self, X, t=1.0):
        comps = dict(X.comps)
        ginv_delta = comps.pop("gamma_inv", None)
        from .varcalc import Direction  # local import to avoid a cycle

        new = StateBase.perturbed(self, Direction(comps, X.shift), t) if comps \
            else self.with_slots({})
        if ginv_delta is not None:
            upper = sym_inverse(self.gamma)
            moved = Sym2(self.d)
            for (a, b), v in upper.comp.items():
                moved.comp[(a, b)] = v + ginv_delta.g(a, b) * t
            new = new.with_slots({"gamma": sym_inverse(moved)})
        return new
