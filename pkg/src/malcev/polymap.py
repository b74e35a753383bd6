"""Real-valued polynomial maps on a nilpotent group, in exact form.

A :class:`PolyMap` is a polynomial in the coordinate functions ζ_{i,j}
(which read off the second-kind Mal'cev coordinates); ζ_{i,j} has weight i
and the polynomial degree of the map is the weighted degree of its body.
All difference operators are substitutions into the group's symbolic
multiplication.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exact import (
    NEG_INF,
    Echelon,
    Exps,
    InconsistentSystemError,
    Poly,
    Substitution,
    dot_add,
    graded_lex_key,
    linear_solve,
    to_rational,
)
from .group import GroupElement, GroupMismatchError, MalcevGroup

DEFAULT_MAX_DEGREE = 12


class IntegrationError(ValueError):
    def __init__(self, generator: int, message: str):
        super().__init__(message)
        self.generator = generator


def max_degree() -> int:
    """Basis enumeration cap, from ``MALCEV_MAX_DEGREE``."""
    raw = os.environ.get("MALCEV_MAX_DEGREE")
    return int(raw) if raw else DEFAULT_MAX_DEGREE


class PolyMap:
    __slots__ = ("group", "body")

    def __init__(self, group: MalcevGroup, body: Poly):
        if body.variables != group.coord_names:
            body = body.rename(group.coord_names)
        self.group = group
        self.body = body

    @classmethod
    def constant(cls, group: MalcevGroup, c) -> "PolyMap":
        return cls(group, Poly.const(group.coord_names, c))

    @classmethod
    def from_terms(cls, group: MalcevGroup, terms) -> "PolyMap":
        return cls(group, Poly(group.coord_names, terms))

    def _check(self, other: "PolyMap"):
        if other.group is not self.group and other.group != self.group:
            raise GroupMismatchError("polynomial maps live on different groups")

    def __add__(self, other):
        if isinstance(other, PolyMap):
            self._check(other)
            return PolyMap(self.group, self.body + other.body)
        return PolyMap(self.group, self.body + other)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, PolyMap):
            self._check(other)
            return PolyMap(self.group, self.body - other.body)
        return PolyMap(self.group, self.body - other)

    def __neg__(self):
        return PolyMap(self.group, -self.body)

    def __mul__(self, other):
        if isinstance(other, PolyMap):
            return product(self, other)
        return PolyMap(self.group, self.body * other)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return PolyMap(self.group, self.body ** k)

    def __eq__(self, other):
        if not isinstance(other, PolyMap):
            return NotImplemented
        return self.group == other.group and self.body == other.body

    def __hash__(self):
        return hash(self.body)

    def __bool__(self):
        return bool(self.body)

    def __call__(self, g: GroupElement) -> Fraction:
        return evaluate(self, g)

    def degree(self):
        return degree(self)

    def coefficients(self) -> Dict[Exps, Fraction]:
        """Expansion in the ζ-monomial basis (exact and unique)."""
        return dict(self.body.terms)

    def to_json(self) -> dict:
        return {
            "group": self.group.algebra.content_hash(),
            "terms": self.body.to_json(self.group.weights),
        }

    @classmethod
    def from_json(cls, group: MalcevGroup, data) -> "PolyMap":
        return cls(group, Poly.from_json(group.coord_names, data["terms"]))

    def __str__(self):
        return str(self.body)

    def __repr__(self):
        return f"PolyMap({self.body})"


def zeta(group: MalcevGroup, i: int, j: int) -> PolyMap:
    """The coordinate function reading off t_{i,j}."""
    if (i, j) not in group.algebra.index:
        raise ValueError(f"no basis label ({i}, {j})")
    return PolyMap(group, Poly.var(group.coord_names, group.algebra.index[(i, j)]))


def zeta_monomial(group: MalcevGroup, exps: Sequence[int]) -> PolyMap:
    if len(exps) != group.dim or any(e < 0 for e in exps):
        raise ValueError("multi-index must have one nonnegative entry per basis label")
    return PolyMap(group, Poly.monomial(group.coord_names, tuple(exps)))


def multi_indices(weights: Sequence[int], d: int) -> List[Exps]:
    """All exponent vectors e with sum(w_k e_k) <= d, graded-lex ordered."""
    out: List[Exps] = []

    def rec(k, left, prefix):
        if k == len(weights):
            out.append(tuple(prefix))
            return
        for e in range(left // weights[k] + 1):
            prefix.append(e)
            rec(k + 1, left - e * weights[k], prefix)
            prefix.pop()

    if d >= 0:
        rec(0, d, [])
    out.sort(key=lambda e: graded_lex_key(e, weights))
    return out


def basis_indices(group: MalcevGroup, d: int) -> List[Exps]:
    cap = max_degree()
    if d > cap:
        raise ValueError(f"degree {d} exceeds the enumeration cap {cap} (MALCEV_MAX_DEGREE)")
    return multi_indices(group.weights, d)


def basis(group: MalcevGroup, d: int) -> List[PolyMap]:
    return [zeta_monomial(group, e) for e in basis_indices(group, d)]


def dim_pol(group: MalcevGroup, d: int) -> int:
    if d < 0:
        return 0
    return len(basis_indices(group, d))


def evaluate(xi: PolyMap, g: GroupElement) -> Fraction:
    if g.group is not xi.group and g.group != xi.group:
        raise GroupMismatchError("element and polynomial map live on different groups")
    return xi.body.evaluate(g.coords)


def degree(xi: PolyMap):
    return xi.body.weighted_degree(xi.group.weights)


def product(xi: PolyMap, eta: PolyMap) -> PolyMap:
    xi._check(eta)
    return PolyMap(xi.group, xi.body * eta.body)


# ---------------------------------------------------------------------------
# difference operators


def _translation(group: MalcevGroup, side: str, g: GroupElement) -> Substitution:
    """Substitution h -> h·g (side 'right') or h -> g^-1·h (side 'left')."""
    cache = group._translations
    key = (side, g.coords)
    sub = cache.get(key)
    if sub is not None:
        return sub
    n = group.dim
    names = group.coord_names
    mul = group.symbolic_mul().polys
    h = [Poly.var(names, k) for k in range(n)]
    if side == "right":
        images = [p.substitute(h + list(g.coords)) for p in mul]
    else:
        ginv = group.inv(g).coords
        images = [p.substitute(list(ginv) + h) for p in mul]
    sub = Substitution(images)
    if len(cache) > 4096:
        cache.clear()
    cache[key] = sub
    return sub


def _check_elem(xi: PolyMap, g: GroupElement):
    if g.group is not xi.group and g.group != xi.group:
        raise GroupMismatchError("element and polynomial map live on different groups")


def right_diff(xi: PolyMap, g: GroupElement) -> PolyMap:
    """h -> ξ(hg) - ξ(h)."""
    _check_elem(xi, g)
    return PolyMap(xi.group, _translation(xi.group, "right", g).apply(xi.body) - xi.body)


def left_diff(xi: PolyMap, g: GroupElement) -> PolyMap:
    """h -> ξ(g^-1 h) - ξ(h) (trivial coefficients)."""
    _check_elem(xi, g)
    return PolyMap(xi.group, _translation(xi.group, "left", g).apply(xi.body) - xi.body)


def unitized_diff(xi: PolyMap, g: GroupElement) -> PolyMap:
    """Left difference minus its value at the identity."""
    d = left_diff(xi, g)
    return d - d.body.constant_term()


_DIFFS = {"right": right_diff, "left": left_diff, "unitized": unitized_diff}


def iterated_difference_spans(xi: PolyMap, steps: int, side: str = "right",
                              elements: Optional[Sequence[GroupElement]] = None) -> List[int]:
    """Dimensions of V_0, ..., V_steps where V_0 = span{ξ} and V_{k+1} is the
    span of all differences of V_k along ``elements`` (default: the level-1
    generators). Stops early once a span is zero."""
    diff = _DIFFS[side]
    elements = list(elements) if elements is not None else xi.group.generators()
    current = [xi.body] if xi.body else []
    dims = [len(current)]
    for _ in range(steps):
        if not current:
            break
        ech = Echelon()
        nxt = []
        for v in current:
            pv = PolyMap(xi.group, v)
            for g in elements:
                w = diff(pv, g).body
                if w and ech.add(w.terms) is not None:
                    nxt.append(w)
        current = nxt
        dims.append(len(current))
    return dims


def verify_degree(xi: PolyMap, d, side: str = "right") -> bool:
    """True iff every (d+1)-fold difference along the level-1 generators
    vanishes, checked symbolically. ``d = -inf`` tests for ξ = 0."""
    if d == NEG_INF:
        return not xi.body
    if d < 0:
        return not xi.body
    dims = iterated_difference_spans(xi, d + 1, side)
    return len(dims) <= d + 1 or dims[d + 1] == 0


def difference_degree(xi: PolyMap, side: str = "right", limit: Optional[int] = None):
    """Degree measured by iterated differences alone: the least d such that
    all (d+1)-fold generator differences vanish."""
    if not xi.body:
        return NEG_INF
    limit = limit if limit is not None else max_degree() * max(xi.group.weights)
    dims = iterated_difference_spans(xi, limit + 1, side)
    if dims[-1]:
        raise ValueError("difference degree exceeds the limit")
    return len(dims) - 2


# ---------------------------------------------------------------------------
# tensor products and pullbacks


@dataclass(frozen=True)
class TensorPolyMap:
    """Element of Pol(G1 x G2) as a polynomial in both coordinate sets;
    left variables carry the prefix ``l_``, right ones the suffix ``_r``."""

    left: MalcevGroup
    right: MalcevGroup
    body: Poly

    @staticmethod
    def variable_names(left: MalcevGroup, right: MalcevGroup) -> Tuple[str, ...]:
        return tuple("l_" + v for v in left.coord_names) + tuple(v + "_r" for v in right.coord_names)

    @classmethod
    def simple(cls, a: PolyMap, b: PolyMap) -> "TensorPolyMap":
        names = cls.variable_names(a.group, b.group)
        n = a.group.dim
        return cls(a.group, b.group, a.body.embed(names, 0) * b.body.embed(names, n))

    def decompose(self) -> List[Tuple[Exps, Exps, Fraction]]:
        """Unique expansion into c · ζ_a ⊗ ζ_b, graded-lex ordered."""
        n = self.left.dim
        w = self.left.weights + self.right.weights
        return [(e[:n], e[n:], c) for e, c in self.body.sorted_terms(w)]

    def degree(self):
        return self.body.weighted_degree(self.left.weights + self.right.weights)

    def __add__(self, other: "TensorPolyMap") -> "TensorPolyMap":
        return TensorPolyMap(self.left, self.right, self.body + other.body)

    def __sub__(self, other: "TensorPolyMap") -> "TensorPolyMap":
        return TensorPolyMap(self.left, self.right, self.body - other.body)

    def __bool__(self):
        return bool(self.body)

    def evaluate(self, g: GroupElement, h: GroupElement) -> Fraction:
        return self.body.evaluate(list(g.coords) + list(h.coords))

    def to_json(self) -> dict:
        return {
            "left": self.left.algebra.content_hash(),
            "right": self.right.algebra.content_hash(),
            "terms": self.body.to_json(self.left.weights + self.right.weights),
        }

    def __str__(self):
        return str(self.body)


def _pair_substitution(group: MalcevGroup, polys: Sequence[Poly]) -> List[Poly]:
    names = TensorPolyMap.variable_names(group, group)
    return [p.rename(names) for p in polys]


def _mtilde_polys(group: MalcevGroup) -> List[Poly]:
    """Coordinates of g·h^-1 as polynomials in (g, h)."""
    n = group.dim
    names = TensorPolyMap.variable_names(group, group)
    g = [Poly.var(names, k) for k in range(n)]
    hinv = [p.embed(names, n) for p in group.inv_polys]
    return [p.substitute(g + hinv) for p in group.symbolic_mul().polys]


def pull_m(xi: PolyMap) -> TensorPolyMap:
    """m*ξ: (g, h) -> ξ(gh)."""
    images = _pair_substitution(xi.group, xi.group.symbolic_mul().polys)
    return TensorPolyMap(xi.group, xi.group, xi.body.substitute(images))


def pull_mtilde(xi: PolyMap) -> TensorPolyMap:
    """(g, h) -> ξ(g h^-1)."""
    return TensorPolyMap(xi.group, xi.group, xi.body.substitute(_mtilde_polys(xi.group)))


def pull_inv(xi: PolyMap) -> PolyMap:
    """g -> ξ(g^-1)."""
    return PolyMap(xi.group, xi.body.substitute(list(xi.group.inv_polys)))


def coassociativity_sides(xi: PolyMap) -> Tuple[Poly, Poly]:
    """(m*⊗id)(m*ξ) and (id⊗m*)(m*ξ) as polynomials on G x G x G."""
    group = xi.group
    n = group.dim
    names = tuple(f"a{k}" for k in range(n)) + tuple(f"b{k}" for k in range(n)) + tuple(f"c{k}" for k in range(n))
    mul = group.symbolic_mul().polys
    a = [Poly.var(names, k) for k in range(n)]
    b = [Poly.var(names, n + k) for k in range(n)]
    c = [Poly.var(names, 2 * n + k) for k in range(n)]
    ab = [p.substitute(a + b) for p in mul]
    bc = [p.substitute(b + c) for p in mul]
    mxi = pull_m(xi).body
    return mxi.substitute(ab + c), mxi.substitute(a + bc)


# ---------------------------------------------------------------------------
# integration on free nilpotent groups


@dataclass(frozen=True)
class IntegrationResult:
    polymap: PolyMap
    achieved_degree: object
    bound: int

    @property
    def within_stated_bound(self) -> bool:
        return self.achieved_degree <= self.bound

    @property
    def within_corrected_bound(self) -> bool:
        return self.achieved_degree <= self.bound + 1


def integrate_free(group: MalcevGroup, targets: Sequence[PolyMap], bound: int) -> IntegrationResult:
    """Find ξ of degree <= bound + 1 with left_diff(ξ, g_i) = targets[i] for the
    level-1 generators g_i, by an exact linear solve over ζ-monomial
    coefficients. Returns the reduced-echelon particular solution."""
    gens = group.generators()
    if len(targets) != len(gens):
        raise ValueError(f"need one target per generator ({len(gens)})")
    if bound >= group.algebra.nilpotency_class:
        raise ValueError("the bound must be smaller than the class")
    for t in targets:
        if degree(t) > bound:
            raise ValueError("a target exceeds the degree bound")
    unknowns = multi_indices(group.weights, bound + 1)
    # rows: (generator, monomial of the difference)
    columns = []
    row_keys: Dict[Tuple[int, Exps], int] = {}
    for e in unknowns:
        col = {}
        mono = zeta_monomial(group, e)
        for i, g in enumerate(gens):
            for m, c in left_diff(mono, g).body.terms.items():
                col[(i, m)] = c
                row_keys.setdefault((i, m), len(row_keys))
        columns.append(col)
    for i, t in enumerate(targets):
        for m in t.body.terms:
            row_keys.setdefault((i, m), len(row_keys))
    ordered = sorted(row_keys, key=lambda k: (k[0], graded_lex_key(k[1], group.weights)))
    A = [[col.get(k, Fraction(0)) for col in columns] for k in ordered]
    b = [targets[k[0]].body.terms.get(k[1], Fraction(0)) for k in ordered]
    try:
        x = linear_solve(A, b) if A else []
    except InconsistentSystemError as exc:
        gen = ordered[exc.row][0]
        raise IntegrationError(gen, f"no polynomial integrates the targets (generator {gen})") from exc
    xi = PolyMap(group, Poly(group.coord_names, {e: c for e, c in zip(unknowns, x) if c}))
    return IntegrationResult(xi, degree(xi), bound)


# ---------------------------------------------------------------------------
# determination by values on a ball or by differences


def word_ball(group: MalcevGroup, d: int, inverses: bool = True) -> List[GroupElement]:
    """All products of at most d level-1 generators (and their inverses)."""
    letters = group.generators()
    if inverses:
        letters = letters + [group.inv(g) for g in letters]
    seen = {group.identity().coords: group.identity()}
    frontier = [group.identity()]
    for _ in range(d):
        nxt = []
        for h in frontier:
            for s in letters:
                w = group.mul(h, s)
                if w.coords not in seen:
                    seen[w.coords] = w
                    nxt.append(w)
        frontier = nxt
    return list(seen.values())


def determined_on_ball(xi: PolyMap, eta: PolyMap, d: int) -> bool:
    """ξ = η, cross-checked against agreement on the word ball of radius d.
    Raises AssertionError if the two verdicts disagree."""
    xi._check(eta)
    if degree(xi) > d or degree(eta) > d:
        raise ValueError("both maps must have degree <= d")
    symbolic = xi.body == eta.body
    on_ball = all(evaluate(xi, g) == evaluate(eta, g) for g in word_ball(xi.group, d))
    if symbolic != on_ball:
        raise AssertionError("ball agreement and symbolic equality disagree")
    return symbolic


def determined_by_diffs(xi: PolyMap, eta: PolyMap) -> bool:
    """ξ(1) = η(1) and equal right differences along every level-1 generator."""
    xi._check(eta)
    e = xi.group.identity()
    if evaluate(xi, e) != evaluate(eta, e):
        return False
    return all(right_diff(xi, g) == right_diff(eta, g) for g in xi.group.generators())


# ---------------------------------------------------------------------------
# cocycle identities


def quadratic_cocycle_defect(xi: PolyMap, g: GroupElement, h: GroupElement, k: GroupElement) -> Fraction:
    """ξ(ghk) - ξ(gh) - ξ(hk) - ξ(gk) + ξ(g) + ξ(h) + ξ(k); zero for every
    triple iff ξ is a unital map of degree <= 2 (trivial coefficients)."""
    G = xi.group
    m = G.mul
    return (
        evaluate(xi, m(m(g, h), k))
        - evaluate(xi, m(g, h))
        - evaluate(xi, m(h, k))
        - evaluate(xi, m(g, k))
        + evaluate(xi, g)
        + evaluate(xi, h)
        + evaluate(xi, k)
    )


def difference_cocycle_defect(xi: PolyMap, g: GroupElement, h: GroupElement) -> PolyMap:
    """∂̸_{gh}ξ - (∂̸_g(∂̸_h ξ) + ∂̸_g ξ + ∂̸_h ξ); identically zero."""
    rg = right_diff(xi, g)
    rh = right_diff(xi, h)
    return right_diff(xi, xi.group.mul(g, h)) - (right_diff(rh, g) + rg + rh)


def random_polymap(group: MalcevGroup, d: int, rng, density: float = 0.5,
                   coeff_range: int = 5, unital: bool = False) -> PolyMap:
    terms = {}
    for e in multi_indices(group.weights, d):
        if unital and not any(e):
            continue
        if rng.random() < density:
            c = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 3))
            if c:
                terms[e] = c
    return PolyMap.from_terms(group, terms)


def random_element(group: MalcevGroup, rng, num: int = 4, den: int = 3) -> GroupElement:
    return group.element([Fraction(rng.randint(-num, num), rng.randint(1, den)) for _ in range(group.dim)])
