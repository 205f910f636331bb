"""Finite Grassmann algebra with per-term ghost-number tags.

A graded scalar is a finite sum  sum_I c_I * theta_{i1}...theta_{ik}  where the
theta_i anticommute and each term additionally carries an integer ghost number.
Ghost number is bookkeeping that decouples from parity except for the invariant

    len(monomial) == ghost (mod 2)

per term, which every constructor and operation preserves.  Generators carry a
per-index ghost tag (+1 for ghost-sector generators, -1 for antifield-sector
generators by default); indices at or beyond ``num_generators`` are reserved
for auxiliary derivative generators and must supply an explicit tag when
differentiated.
"""

from __future__ import annotations

from .errors import ConfigMismatch, GradeMismatch


class _Sentinel:
    __slots__ = ("_name",)

    def __init__(self, name: str):
        self._name = name

    def __repr__(self):
        return self._name


#: ghost_grade() result for the zero element (member of every grade)
PureZero = _Sentinel("PureZero")
#: ghost_grade() result for an inhomogeneous element
Mixed = _Sentinel("Mixed")


class GrassmannConfig:
    """Immutable description of the generator pool.

    ghost_tags[i] is the ghost number carried by generator i.  The default
    splits the pool half/half: the first ceil(n/2) generators are ghost-like
    (+1), the rest antifield-like (-1).
    """

    __slots__ = ("num_generators", "ghost_tags")

    def __init__(self, num_generators: int = 8, ghost_tags=None):
        if num_generators < 1:
            raise ValueError("num_generators must be >= 1")
        if ghost_tags is None:
            half = (num_generators + 1) // 2
            ghost_tags = tuple(+1 if i < half else -1 for i in range(num_generators))
        ghost_tags = tuple(int(t) for t in ghost_tags)
        if len(ghost_tags) != num_generators:
            raise ValueError("ghost_tags length must match num_generators")
        for t in ghost_tags:
            if t % 2 == 0:
                raise ValueError("generator ghost tags must be odd integers")
        object.__setattr__(self, "num_generators", num_generators)
        object.__setattr__(self, "ghost_tags", ghost_tags)

    def __setattr__(self, *a):  # pragma: no cover - defensive
        raise AttributeError("GrassmannConfig is immutable")

    def tag(self, i: int) -> int:
        if 0 <= i < self.num_generators:
            return self.ghost_tags[i]
        raise ConfigMismatch(
            f"generator index {i} is outside the configured pool; "
            "auxiliary generators need an explicit tag"
        )

    def __eq__(self, other):
        return (
            isinstance(other, GrassmannConfig)
            and self.num_generators == other.num_generators
            and self.ghost_tags == other.ghost_tags
        )

    def __repr__(self):
        return f"GrassmannConfig(n={self.num_generators}, tags={self.ghost_tags})"


def _merge_sign(I, J):
    """Merge two sorted generator tuples; return (merged, sign) or (None, 0)."""
    # Koszul sign = (-1)^(number of transpositions to interleave J into I)
    merged = []
    sign = 1
    i = j = 0
    li, lj = len(I), len(J)
    while i < li and j < lj:
        a, b = I[i], J[j]
        if a == b:
            return None, 0
        if a < b:
            merged.append(a)
            i += 1
        else:
            # J[j] hops over the remaining li - i elements of I
            if (li - i) % 2:
                sign = -sign
            merged.append(b)
            j += 1
    merged.extend(I[i:])
    merged.extend(J[j:])
    return tuple(merged), sign


class GradedScalar:
    """Sparse element of the Grassmann algebra with ghost tags.

    terms maps (generators, ghost) -> float coefficient.  The representation
    is canonical: zero coefficients are pruned, keys are unique, generator
    tuples are strictly increasing.
    """

    __slots__ = ("config", "terms")

    def __init__(self, config: GrassmannConfig, terms=None):
        self.config = config
        self.terms = {}
        if terms:
            for (gens, ghost), c in terms.items():
                self._accumulate(tuple(gens), int(ghost), float(c))

    def _accumulate(self, gens, ghost, coeff):
        if coeff == 0.0:
            return
        if len(gens) % 2 != ghost % 2:
            raise GradeMismatch(
                f"term {gens!r} with ghost {ghost} violates parity invariant"
            )
        key = (gens, ghost)
        new = self.terms.get(key, 0.0) + coeff
        if new == 0.0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    # ---- constructors -------------------------------------------------

    @classmethod
    def number(cls, config, value, ghost: int = 0):
        """A pure number, optionally tagged with an even ghost number."""
        out = cls(config)
        out._accumulate((), ghost, float(value))
        return out

    @classmethod
    def generator(cls, config, i: int, tag: int | None = None, coeff=1.0):
        if tag is None:
            tag = config.tag(i)
        out = cls(config)
        out._accumulate((int(i),), int(tag), float(coeff))
        return out

    @classmethod
    def monomial(cls, config, gens, ghost, coeff=1.0):
        gens = tuple(sorted(int(g) for g in gens))
        if len(set(gens)) != len(gens):
            return cls(config)  # repeated generator: identically zero
        out = cls(config)
        out._accumulate(gens, int(ghost), float(coeff))
        return out

    def copy(self):
        out = GradedScalar(self.config)
        out.terms = dict(self.terms)
        return out

    # ---- ring operations ----------------------------------------------

    def _check(self, other):
        if self.config != other.config:
            raise ConfigMismatch("GradedScalar operands use different configs")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = GradedScalar.number(self.config, other)
        self._check(other)
        out = self.copy()
        for key, c in other.terms.items():
            out._accumulate(key[0], key[1], c)
        return out

    __radd__ = __add__

    def __neg__(self):
        out = GradedScalar(self.config)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = GradedScalar.number(self.config, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            out = GradedScalar(self.config)
            if other != 0.0:
                out.terms = {k: c * other for k, c in self.terms.items()}
            return out
        self._check(other)
        out = GradedScalar(self.config)
        for (I, p), a in self.terms.items():
            for (J, q), b in other.terms.items():
                merged, sign = _merge_sign(I, J)
                if sign:
                    out._accumulate(merged, p + q, sign * a * b)
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented  # pragma: no cover

    # ---- graded calculus ------------------------------------------------

    def left_derive(self, k: int, tag: int | None = None):
        """Left derivative d/d(theta_k): remove theta_k after commuting it
        to the front; ghost number drops by theta_k's tag."""
        if tag is None:
            tag = self.config.tag(k)
        if tag % 2 == 0:
            raise GradeMismatch("derivative tag must be odd")
        out = GradedScalar(self.config)
        for (I, p), c in self.terms.items():
            try:
                pos = I.index(k)
            except ValueError:
                continue
            sign = -1.0 if pos % 2 else 1.0
            rest = I[:pos] + I[pos + 1:]
            out._accumulate(rest, p - tag, sign * c)
        return out

    def ghost_grade(self):
        """Common ghost number, PureZero for 0, Mixed if inhomogeneous."""
        if not self.terms:
            return PureZero
        ghosts = {g for (_, g) in self.terms}
        if len(ghosts) == 1:
            return ghosts.pop()
        return Mixed

    def body(self) -> float:
        """Coefficient of the empty monomial at ghost 0."""
        return self.terms.get(((), 0), 0.0)

    def sup_norm(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = GradedScalar.number(self.config, other)
        return isinstance(other, GradedScalar) and self.terms == other.terms

    def __repr__(self):
        if not self.terms:
            return "GradedScalar<0>"
        bits = []
        for (gens, ghost), c in sorted(self.terms.items()):
            mono = "".join(f"th{g}" for g in gens) or "1"
            bits.append(f"{c:+g}*{mono}[gh{ghost:+d}]")
        return "GradedScalar<" + " ".join(bits) + ">"
