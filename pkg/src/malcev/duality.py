"""Group homomorphisms versus morphisms of polynomial algebras.

A homomorphism φ: H -> G of simply connected nilpotent groups pulls back
polynomial maps, ζ ↦ ζ∘φ. Conversely a strongly unital, co-multiplicative,
degree-preserving algebra morphism Pol(G) -> Pol(H) is such a pullback, and
the homomorphism is read off from the images of the ζ coordinate functions
evaluated on the generators of H. This module computes both directions
exactly, plus invariants that separate non-isomorphic groups.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .cohomology import betti_numbers
from .exact import Exps, InconsistentSystemError, Poly, linear_solve, rank, to_rational
from .group import GroupElement, GroupMismatchError, MalcevGroup, first_to_second
from .lie import (
    LieAlgebra,
    LieElement,
    center_dimension,
    derived_series_dimensions,
    evaluate_tree,
    graded,
    hall_trees,
    lcs_quotient_dimensions,
    upper_central_series_dimensions,
    validate,
)
from .polymap import PolyMap, TensorPolyMap, basis_indices, degree, multi_indices, pull_m, zeta_monomial


class LieMorphismError(ValueError):
    """Generator images that do not extend to a Lie algebra homomorphism."""


class ReconstructionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# homomorphisms


def induced_lie_map(source: LieAlgebra, target: LieAlgebra, gen_images: Sequence[Sequence]) -> List[List[Fraction]]:
    """Matrix (target.dim x source.dim) of the Lie algebra homomorphism
    sending the i-th level-1 basis vector of ``source`` to ``gen_images[i]``.

    The map is built on the free nilpotent algebra on as many letters, whose
    Hall basis spans ``source`` once evaluated there; it factors through
    ``source`` exactly when every relation among the evaluated Hall trees
    also holds among their images.
    """
    gens = source.generators()
    if len(gen_images) != len(gens):
        raise LieMorphismError(f"expected {len(gens)} generator images, got {len(gen_images)}")
    images = [[to_rational(c) for c in v] for v in gen_images]
    if any(len(v) != target.dim for v in images):
        raise LieMorphismError("generator image has the wrong length")
    c = max(source.nilpotency_class, target.nilpotency_class)
    trees = hall_trees(len(gens), c) if gens else []
    units = [[Fraction(int(i == k)) for i in range(source.dim)] for k in gens]
    pis = [evaluate_tree(t, units, source.bracket_vec) for t in trees]
    outs = [evaluate_tree(t, images, target.bracket_vec) for t in trees]

    A = [[pis[t][row] for t in range(len(trees))] for row in range(source.dim)]
    matrix = [[Fraction(0)] * source.dim for _ in range(target.dim)]
    for b in range(source.dim):
        e = [Fraction(int(i == b)) for i in range(source.dim)]
        try:
            x = linear_solve(A, e)
        except InconsistentSystemError as exc:
            raise LieMorphismError("the level-1 basis vectors do not generate the source algebra") from exc
        for t, coef in enumerate(x):
            if coef:
                for k in range(target.dim):
                    matrix[k][b] += coef * outs[t][k]

    for t, tree in enumerate(trees):
        if _apply(matrix, pis[t]) != outs[t]:
            raise LieMorphismError(f"images violate a relation of the source (Hall tree {tree})")
    # independent check on the basis
    for a in range(source.dim):
        for b in range(a + 1, source.dim):
            ea = [Fraction(int(i == a)) for i in range(source.dim)]
            eb = [Fraction(int(i == b)) for i in range(source.dim)]
            lhs = _apply(matrix, source.bracket_vec(ea, eb))
            rhs = target.bracket_vec(_column(matrix, a), _column(matrix, b))
            if [Fraction(v) for v in lhs] != [Fraction(v) for v in rhs]:
                raise LieMorphismError(f"brackets not preserved on basis pair {source.labels[a]}, {source.labels[b]}")
    return matrix


def _apply(matrix, vec) -> List[Fraction]:
    return [sum((row[l] * vec[l] for l in range(len(vec)) if vec[l]), Fraction(0)) for row in matrix]


def _column(matrix, b) -> List[Fraction]:
    return [row[b] for row in matrix]


class GroupHom:
    """Continuous homomorphism φ: source -> target of Mal'cev completions,
    fixed by the images of the level-1 basis elements of ``source``.

    Construction fails with :class:`LieMorphismError` unless the images
    extend to a homomorphism; the induced Lie algebra map is stored in
    ``lie_matrix``.
    """

    def __init__(self, source: MalcevGroup, target: MalcevGroup, generator_images: Sequence):
        self.source = source
        self.target = target
        imgs = []
        for g in generator_images:
            if isinstance(g, GroupElement):
                target._check(g)
                imgs.append(GroupElement(target, g.coords))
            else:
                imgs.append(target.element(g))
        self.generator_images: Tuple[GroupElement, ...] = tuple(imgs)
        logs = [target.first_kind(g).coeffs for g in imgs]
        self.lie_matrix = induced_lie_map(source.algebra, target.algebra, logs)

    def lie_map(self, x: LieElement) -> LieElement:
        if x.algebra != self.source.algebra:
            raise GroupMismatchError("Lie element is not in the source algebra")
        return LieElement(self.target.algebra, _apply(self.lie_matrix, x.coeffs))

    def __call__(self, h: GroupElement) -> GroupElement:
        return self.target.second_kind(self.lie_map(self.source.first_kind(h)))

    @cached_property
    def coordinate_polys(self) -> Tuple[Poly, ...]:
        """Second-kind coordinates of φ(h) as polynomials in h's coordinates."""
        names = self.source.coord_names
        logs = self.source.log_polys
        vec = []
        for row in self.lie_matrix:
            acc = Poly.const(names, 0)
            for l, c in enumerate(row):
                if c:
                    acc = acc + logs[l].scale(c)
            vec.append(acc)
        out = first_to_second(self.target.algebra, vec)
        return tuple(p if isinstance(p, Poly) else Poly.const(names, p) for p in out)

    def compose(self, inner: "GroupHom") -> "GroupHom":
        """self ∘ inner."""
        if inner.target != self.source:
            raise GroupMismatchError("homomorphisms are not composable")
        return GroupHom(inner.source, self.target, [self(g) for g in inner.generator_images])

    def is_isomorphism(self) -> bool:
        return self.source.dim == self.target.dim and rank(self.lie_matrix) == self.source.dim

    def __eq__(self, other):
        if not isinstance(other, GroupHom):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and [g.coords for g in self.generator_images] == [g.coords for g in other.generator_images]
        )

    def __hash__(self):
        return hash(tuple(g.coords for g in self.generator_images))

    def to_json(self) -> dict:
        return {
            "source": self.source.algebra.to_json(),
            "target": self.target.algebra.to_json(),
            "generator_images": [g.to_json() for g in self.generator_images],
        }

    @classmethod
    def from_json(cls, data) -> "GroupHom":
        source = MalcevGroup(LieAlgebra.from_json(data["source"]))
        target = MalcevGroup(LieAlgebra.from_json(data["target"]))
        return cls(source, target, [GroupElement.from_json(target, g) for g in data["generator_images"]])

    def __repr__(self):
        return f"GroupHom({[g.coords for g in self.generator_images]})"


def identity_hom(group: MalcevGroup) -> GroupHom:
    return GroupHom(group, group, group.generators())


def trivial_hom(source: MalcevGroup, target: MalcevGroup) -> GroupHom:
    return GroupHom(source, target, [target.identity() for _ in source.algebra.generators()])


# ---------------------------------------------------------------------------
# algebra morphisms


@dataclass(frozen=True)
class MorphismFlags:
    strongly_unital: bool
    degree_preserving: bool
    properly_degree_preserving: bool
    multiplicative_up_to_D: bool
    comultiplicative_up_to_D: bool

    def all(self) -> bool:
        return all(vars(self).values())

    def to_json(self) -> dict:
        return dict(vars(self))


@dataclass(frozen=True)
class ComultiplicativityReport:
    ok: bool
    witness: Optional[Exps] = None
    difference: Optional[TensorPolyMap] = None

    def to_json(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out["witness"] = list(self.witness)
            out["difference"] = self.difference.to_json()
        return out


class AlgebraMorphism:
    """Linear map Pol_D(source) -> Pol(target), given on the ζ-monomial basis.

    Note the direction: a homomorphism target -> source pulls back to a
    morphism source -> target of polynomial algebras.
    """

    def __init__(self, source: MalcevGroup, target: MalcevGroup, D: int, images: Mapping[Exps, PolyMap]):
        self.source = source
        self.target = target
        self.D = D
        self.basis = basis_indices(source, D)
        missing = [e for e in self.basis if e not in images]
        extra = [e for e in images if e not in set(self.basis)]
        if missing or extra:
            raise ValueError(f"images must be given exactly on the degree-{D} basis")
        self.images: Dict[Exps, PolyMap] = {}
        for e in self.basis:
            img = images[e]
            if img.group != target:
                raise GroupMismatchError("image lives on the wrong group")
            self.images[e] = img

    def __call__(self, xi: PolyMap) -> PolyMap:
        return self.apply(xi)

    def apply(self, xi: PolyMap) -> PolyMap:
        if xi.group != self.source:
            raise GroupMismatchError("polynomial map lives on the wrong group")
        out = PolyMap.constant(self.target, 0)
        for e, c in xi.body.terms.items():
            if e not in self.images:
                raise ValueError(f"degree of {xi} exceeds the truncation {self.D}")
            out = out + self.images[e] * c
        return out

    def image(self, exps: Sequence[int]) -> PolyMap:
        return self.images[tuple(exps)]

    def with_image(self, exps: Sequence[int], polymap: PolyMap) -> "AlgebraMorphism":
        images = dict(self.images)
        images[tuple(exps)] = polymap
        return AlgebraMorphism(self.source, self.target, self.D, images)

    def compose(self, inner: "AlgebraMorphism") -> "AlgebraMorphism":
        """self ∘ inner."""
        if inner.target != self.source:
            raise GroupMismatchError("morphisms are not composable")
        return AlgebraMorphism(inner.source, self.target, inner.D, {e: self.apply(p) for e, p in inner.images.items()})

    # -- flags ------------------------------------------------------------

    @cached_property
    def flags(self) -> MorphismFlags:
        dp = self._degree_preserving()
        return MorphismFlags(
            strongly_unital=self._strongly_unital(),
            degree_preserving=dp,
            properly_degree_preserving=dp and self._proper(),
            multiplicative_up_to_D=self._multiplicative(),
            comultiplicative_up_to_D=check_comultiplicative(self).ok,
        )

    def _strongly_unital(self) -> bool:
        one = tuple([0] * self.source.dim)
        if self.images[one] != PolyMap.constant(self.target, 1):
            return False
        # every other basis monomial vanishes at the identity
        return all(not p.body.constant_term() for e, p in self.images.items() if e != one)

    def _degree_preserving(self) -> bool:
        w = self.source.weights
        return all(degree(p) <= _wdeg(e, w) for e, p in self.images.items())

    def _proper(self) -> bool:
        """No ξ of exact degree d is sent to lower degree: the top homogeneous
        parts of the images of the degree-d monomials are independent."""
        w = self.source.weights
        tw = self.target.weights
        by_degree: Dict[int, List[Exps]] = {}
        for e in self.basis:
            by_degree.setdefault(_wdeg(e, w), []).append(e)
        for d, es in by_degree.items():
            tops = [self.images[e].body.homogeneous_part(tw, d) for e in es]
            keys = sorted({m for p in tops for m in p.terms})
            rows = [[p.terms.get(m, Fraction(0)) for p in tops] for m in keys]
            if (rank(rows) if rows else 0) != len(es):
                return False
        return True

    def _multiplicative(self) -> bool:
        w = self.source.weights
        for i, a in enumerate(self.basis):
            for b in self.basis[i:]:
                if _wdeg(a, w) + _wdeg(b, w) > self.D:
                    continue
                prod = tuple(x + y for x, y in zip(a, b))
                if self.images[prod] != self.images[a] * self.images[b]:
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, AlgebraMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self.D == other.D
            and self.images == other.images
        )

    def __hash__(self):
        return hash((self.D, tuple(self.images)))

    def to_json(self) -> dict:
        return {
            "source": self.source.algebra.to_json(),
            "target": self.target.algebra.to_json(),
            "degree": self.D,
            "images": [{"exps": list(e), "image": self.images[e].to_json()} for e in self.basis],
        }

    @classmethod
    def from_json(cls, data) -> "AlgebraMorphism":
        source = MalcevGroup(LieAlgebra.from_json(data["source"]))
        target = MalcevGroup(LieAlgebra.from_json(data["target"]))
        images = {tuple(int(x) for x in entry["exps"]): PolyMap.from_json(target, entry["image"]) for entry in data["images"]}
        return cls(source, target, int(data["degree"]), images)


def _wdeg(e: Exps, weights) -> int:
    return sum(a * b for a, b in zip(e, weights))


def identity_morphism(group: MalcevGroup, D: Optional[int] = None) -> AlgebraMorphism:
    D = group.algebra.nilpotency_class if D is None else D
    return AlgebraMorphism(group, group, D, {e: zeta_monomial(group, e) for e in basis_indices(group, D)})


def pullback_hom(phi: GroupHom, D: Optional[int] = None) -> AlgebraMorphism:
    """φ*: Pol_D(target of φ) -> Pol(source of φ), ζ_e ↦ ζ_e ∘ φ."""
    G, H = phi.target, phi.source
    D = G.algebra.nilpotency_class if D is None else D
    coords = phi.coordinate_polys
    names = H.coord_names
    images = {}
    for e in basis_indices(G, D):
        acc = Poly.const(names, 1)
        for k, a in enumerate(e):
            if a:
                acc = acc * coords[k] ** a
        images[e] = PolyMap(H, acc)
    return AlgebraMorphism(G, H, D, images)


def _pull_m_basis(group: MalcevGroup, e: Exps) -> TensorPolyMap:
    cache = group._translations
    key = ("pull_m", e)
    if key not in cache:
        cache[key] = pull_m(zeta_monomial(group, e))
    return cache[key]


def check_comultiplicative(psi: AlgebraMorphism) -> ComultiplicativityReport:
    """(Ψ⊗Ψ)∘m*_G = m*_H∘Ψ on every basis monomial, in graded-lex order;
    the first failure is returned with the difference tensor."""
    G, H = psi.source, psi.target
    for e in psi.basis:
        lhs = TensorPolyMap(H, H, Poly.const(TensorPolyMap.variable_names(H, H), 0))
        for a, b, c in _pull_m_basis(G, e).decompose():
            if a not in psi.images or b not in psi.images:
                raise ValueError("comultiplication leaves the truncated basis")
            term = TensorPolyMap.simple(psi.images[a], psi.images[b])
            lhs = lhs + TensorPolyMap(H, H, term.body.scale(c))
        rhs = pull_m(psi.images[e])
        diff = lhs - rhs
        if diff:
            return ComultiplicativityReport(False, e, diff)
    return ComultiplicativityReport(True)


def check_morphism_flags(psi: AlgebraMorphism) -> MorphismFlags:
    return psi.flags


def reconstruct_hom(psi: AlgebraMorphism) -> GroupHom:
    """The homomorphism target(Ψ) -> source(Ψ) inducing Ψ.

    The image of the ℓ-th generator h of the target group has second-kind
    coordinates (Ψζ_k)(h). The result is validated by bracket preservation
    and by pulling it back again.
    """
    G, H = psi.source, psi.target
    if psi.D < G.algebra.nilpotency_class:
        raise ReconstructionError(f"truncation {psi.D} is below the class {G.algebra.nilpotency_class}")
    flags = psi.flags
    failing = [k for k, v in flags.to_json().items() if not v and k != "properly_degree_preserving"]
    if failing:
        raise ReconstructionError("morphism lacks the required properties: " + ", ".join(failing))
    units = []
    for k in range(G.dim):
        e = [0] * G.dim
        e[k] = 1
        units.append(psi.images[tuple(e)])
    images = [[p(h) for p in units] for h in H.generators()]
    try:
        phi = GroupHom(H, G, images)
    except LieMorphismError as exc:
        raise ReconstructionError(f"flags passed but the recovered map is not a homomorphism: {exc}") from exc
    if pullback_hom(phi, psi.D) != psi:
        raise ReconstructionError("the recovered homomorphism does not induce the morphism")
    return phi


def verify_iso(spec1: LieAlgebra, spec2: LieAlgebra, candidate) -> bool:
    """True iff ``candidate`` (a GroupHom, or generator images in the group
    of ``spec1``) defines a bracket-preserving linear isomorphism from the
    algebra of ``spec2`` onto that of ``spec1``."""
    if spec1.dim != spec2.dim:
        return False
    if isinstance(candidate, GroupHom):
        if candidate.source.algebra != spec2 or candidate.target.algebra != spec1:
            return False
        return candidate.is_isomorphism()
    try:
        phi = GroupHom(MalcevGroup(spec2), MalcevGroup(spec1), candidate)
    except (LieMorphismError, ValueError):
        return False
    return phi.is_isomorphism()


# ---------------------------------------------------------------------------
# fingerprints


@dataclass(frozen=True)
class Fingerprint:
    """Quasi-isometry invariants. The graded algebra enters through
    basis-independent invariants rather than a canonical form."""

    nilpotency_class: int
    lcs_quotient_dims: Tuple[int, ...]
    betti: Tuple[int, ...]
    graded_betti: Tuple[int, ...]
    graded_center_dim: int
    graded_derived_series: Tuple[int, ...]
    graded_upper_central_series: Tuple[int, ...]
    pol_dims: Tuple[int, ...]

    def to_json(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in vars(self).items()}


def fingerprint(alg: LieAlgebra) -> Fingerprint:
    rep = validate(alg)
    if not rep.ok:
        raise ValueError(f"invalid Lie algebra: {rep.failures}")
    quot = lcs_quotient_dimensions(alg)
    gr = graded(alg)
    weights = [i + 1 for i, m in enumerate(quot) for _ in range(m)]
    c = len(quot)
    return Fingerprint(
        nilpotency_class=c,
        lcs_quotient_dims=tuple(quot),
        betti=tuple(betti_numbers(alg)),
        graded_betti=tuple(betti_numbers(gr)),
        graded_center_dim=center_dimension(gr),
        graded_derived_series=tuple(derived_series_dimensions(gr)),
        graded_upper_central_series=tuple(upper_central_series_dimensions(gr)),
        pol_dims=tuple(len(multi_indices(weights, d)) for d in range(c + 1)),
    )


@dataclass(frozen=True)
class Comparison:
    matches: Dict[str, bool]
    left: Fingerprint
    right: Fingerprint

    @property
    def certified_non_isomorphic(self) -> bool:
        return not all(self.matches.values())

    @property
    def verdict(self) -> str:
        if self.certified_non_isomorphic:
            return "certified non-isomorphic"
        return "indistinguishable by implemented invariants"

    def to_json(self) -> dict:
        return {
            "certified_non_isomorphic": self.certified_non_isomorphic,
            "verdict": self.verdict,
            "matches": dict(self.matches),
            "mismatched": sorted(k for k, v in self.matches.items() if not v),
            "left": self.left.to_json(),
            "right": self.right.to_json(),
        }


def compare(spec1: LieAlgebra, spec2: LieAlgebra) -> Comparison:
    a, b = fingerprint(spec1), fingerprint(spec2)
    matches = {k: getattr(a, k) == getattr(b, k) for k in vars(a)}
    return Comparison(matches, a, b)
