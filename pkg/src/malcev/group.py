"""The simply connected nilpotent Lie group of a :class:`LieAlgebra`, in
Mal'cev coordinates of the second kind.

An element with coordinates ``t`` is the ordered product
``exp(t_1 X_1) exp(t_2 X_2) ... exp(t_n X_n)`` over the basis in label order.
Multiplication is computed once, symbolically, as a vector of polynomials
in the coordinates of both factors; every numeric product and every
difference operator is a substitution into it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .exact import Poly, format_rational, to_rational
from .lie import LieAlgebra, LieElement, bch_vec, validate


class GroupMismatchError(ValueError):
    pass


def coordinate_names(alg: LieAlgebra, prefix: str = "z") -> Tuple[str, ...]:
    return tuple(f"{prefix}{i}_{j}" for i, j in alg.labels)


def second_to_first(alg: LieAlgebra, coords: Sequence) -> list:
    """log of the ordered product of exp(coords[k] X_k), by iterated BCH."""
    z = [0] * alg.dim
    for k, t in enumerate(coords):
        if not t:
            continue
        step = [0] * alg.dim
        step[k] = t
        z = bch_vec(alg, z, step) if any(bool(v) for v in z) else step
    return z


def first_to_second(alg: LieAlgebra, vec: Sequence) -> list:
    """Inverse of :func:`second_to_first`.

    Peeling off exp(t_k X_k) from the left in basis order: the X_k-coordinate
    of the remaining logarithm is exactly t_k because every bracket of the
    remaining factors lands strictly above level(X_k) or on later vectors.
    """
    z = list(vec)
    out = [0] * alg.dim
    for k in range(alg.dim):
        t = z[k]
        out[k] = t
        if not t:
            continue
        step = [0] * alg.dim
        step[k] = -t
        z = bch_vec(alg, step, z)
    return out


@dataclass(frozen=True)
class SymbolicMul:
    """Coordinates of (s)·(t) as polynomials in the 2n variables s_k, t_k."""

    polys: Tuple[Poly, ...]

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.polys[0].variables if self.polys else ()


class MalcevGroup:
    """Group law on second-kind Mal'cev coordinates. Immutable after
    construction; the symbolic multiplication is built eagerly."""

    def __init__(self, algebra: LieAlgebra):
        self.algebra = algebra
        self.dim = algebra.dim
        self.weights = algebra.weights
        self.coord_names = coordinate_names(algebra)
        n = self.dim
        names = self.coord_names
        vars1 = [Poly.var(names, k) for k in range(n)]
        # first-kind coordinates of a symbolic element
        self.log_polys: Tuple[Poly, ...] = tuple(_as_poly(names, v) for v in second_to_first(algebra, vars1))
        # inverse: exp(-log g)
        self.inv_polys: Tuple[Poly, ...] = tuple(
            _as_poly(names, v) for v in first_to_second(algebra, [-p for p in self.log_polys])
        )
        pair_names = tuple(f"s{k}" for k in range(n)) + tuple(f"t{k}" for k in range(n))
        zs = [p.embed(pair_names, 0) for p in self.log_polys]
        zt = [p.embed(pair_names, n) for p in self.log_polys]
        prod = first_to_second(algebra, bch_vec(algebra, zs, zt))
        self._mul = SymbolicMul(tuple(_as_poly(pair_names, v) for v in prod))
        # translation substitutions, filled on demand by the difference operators
        self._translations = {}

    # -- construction -----------------------------------------------------

    def element(self, coords: Sequence) -> "GroupElement":
        return GroupElement(self, coords)

    def identity(self) -> "GroupElement":
        return GroupElement(self, [0] * self.dim)

    def generator(self, a) -> "GroupElement":
        """exp(X_a) for a basis label or position."""
        k = self.algebra._pos(a)
        c = [0] * self.dim
        c[k] = 1
        return GroupElement(self, c)

    def generators(self) -> List["GroupElement"]:
        return [self.generator(k) for k in self.algebra.generators()]

    def basis_elements(self) -> List["GroupElement"]:
        return [self.generator(k) for k in range(self.dim)]

    def symbolic_mul(self) -> SymbolicMul:
        return self._mul

    # -- operations ---------------------------------------------------------

    def _check(self, *elems: "GroupElement"):
        for e in elems:
            if e.group is not self and e.group.algebra != self.algebra:
                raise GroupMismatchError("element belongs to a different group")

    def mul(self, a: "GroupElement", b: "GroupElement") -> "GroupElement":
        self._check(a, b)
        values = list(a.coords) + list(b.coords)
        return GroupElement(self, [p.evaluate(values) for p in self._mul.polys])

    def inv(self, a: "GroupElement") -> "GroupElement":
        self._check(a)
        return GroupElement(self, [p.evaluate(a.coords) for p in self.inv_polys])

    def commutator(self, a: "GroupElement", b: "GroupElement") -> "GroupElement":
        """a^-1 b^-1 a b."""
        self._check(a, b)
        return self.mul(self.mul(self.inv(a), self.inv(b)), self.mul(a, b))

    def pow(self, a: "GroupElement", t) -> "GroupElement":
        """exp(t log a) for rational t."""
        self._check(a)
        t = to_rational(t)
        x = self.first_kind(a)
        return self.second_kind(x * t)

    def first_kind(self, a: "GroupElement") -> LieElement:
        self._check(a)
        return LieElement(self.algebra, _fractions(second_to_first(self.algebra, a.coords)))

    def second_kind(self, x: LieElement) -> "GroupElement":
        if x.algebra != self.algebra:
            raise GroupMismatchError("Lie element belongs to a different algebra")
        return GroupElement(self, _fractions(first_to_second(self.algebra, x.coeffs)))

    def elem_degree(self, a: "GroupElement"):
        """Largest i with a in G_[i]; ``math.inf`` for the identity."""
        self._check(a)
        levels = [w for w, c in zip(self.weights, a.coords) if c]
        return min(levels) if levels else math.inf

    def __eq__(self, other):
        return isinstance(other, MalcevGroup) and other.algebra == self.algebra

    def __hash__(self):
        return hash(self.algebra)

    def __repr__(self):
        return f"MalcevGroup({self.algebra!r})"


def _as_poly(names, v) -> Poly:
    return v if isinstance(v, Poly) else Poly.const(names, v)


def _fractions(vec) -> List[Fraction]:
    return [Fraction(v) if not isinstance(v, Fraction) else v for v in vec]


class GroupElement:
    __slots__ = ("group", "coords")

    def __init__(self, group: MalcevGroup, coords: Sequence):
        if len(coords) != group.dim:
            raise ValueError(f"expected {group.dim} coordinates, got {len(coords)}")
        self.group = group
        self.coords: Tuple[Fraction, ...] = tuple(to_rational(c) for c in coords)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return self.group.mul(self, other)

    def inverse(self) -> "GroupElement":
        return self.group.inv(self)

    def __pow__(self, t) -> "GroupElement":
        return self.group.pow(self, t)

    def is_identity(self) -> bool:
        return not any(self.coords)

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self.coords == other.coords and (self.group is other.group or self.group == other.group)

    def __hash__(self):
        return hash(self.coords)

    def to_json(self) -> dict:
        return {"coords": [format_rational(c) for c in self.coords]}

    @classmethod
    def from_json(cls, group: MalcevGroup, data) -> "GroupElement":
        return cls(group, [to_rational(c) for c in data["coords"]])

    def __repr__(self):
        return "GroupElement(" + ", ".join(format_rational(c) for c in self.coords) + ")"


def symbolic_mul(alg_or_group) -> SymbolicMul:
    group = alg_or_group if isinstance(alg_or_group, MalcevGroup) else MalcevGroup(alg_or_group)
    return group.symbolic_mul()


def check_group(alg: LieAlgebra) -> MalcevGroup:
    rep = validate(alg)
    if not rep.ok:
        raise ValueError(f"invalid Lie algebra: {rep.failures}")
    return MalcevGroup(alg)
