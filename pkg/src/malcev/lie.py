"""Nilpotent Lie algebras over Q given by structure constants.

Basis vectors carry labels ``(level, j)`` (1-based, as in a Mal'cev basis)
and are stored in lexicographic label order; internally they are addressed
by their position in that order.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .exact import Echelon, Poly, format_rational, rank, to_rational

Label = Tuple[int, int]


class NilpotencyError(ValueError):
    pass


class AlgebraMismatchError(ValueError):
    pass


class LieAlgebra:
    """A Lie algebra over Q with a graded Mal'cev basis.

    ``brackets`` maps pairs of labels (or of basis positions) to the bracket,
    itself a mapping label -> coefficient. Pairs that are missing get the
    antisymmetric completion of the stored partner, or zero; the table is
    otherwise kept verbatim so that :func:`validate` can report defects.
    """

    def __init__(self, nilpotency_class: int, ranks: Sequence[int], brackets: Mapping = ()):
        ranks = [int(m) for m in ranks]
        if nilpotency_class < 1 or len(ranks) != nilpotency_class:
            raise ValueError("ranks must list one dimension per level 1..class")
        if any(m < 0 for m in ranks):
            raise ValueError("ranks must be nonnegative")
        self.nilpotency_class = int(nilpotency_class)
        self.ranks = tuple(ranks)
        self.labels: Tuple[Label, ...] = tuple(
            (i + 1, j + 1) for i, m in enumerate(ranks) for j in range(m)
        )
        self.index = {lab: k for k, lab in enumerate(self.labels)}
        self.dim = len(self.labels)
        self.weights = tuple(lab[0] for lab in self.labels)

        raw: Dict[Tuple[int, int], Dict[int, Fraction]] = {}
        items = brackets.items() if isinstance(brackets, Mapping) else brackets
        for (a, b), result in items:
            a, b = self._pos(a), self._pos(b)
            vec = {}
            res_items = result.items() if isinstance(result, Mapping) else enumerate(result)
            for lab, c in res_items:
                c = to_rational(c)
                if c:
                    k = self._pos(lab)
                    vec[k] = vec.get(k, 0) + c
            raw[(a, b)] = {k: c for k, c in vec.items() if c}
        for (a, b), vec in list(raw.items()):
            if (b, a) not in raw:
                raw[(b, a)] = {k: -c for k, c in vec.items()}
        self._table = {k: v for k, v in raw.items() if v}
        # sparse structure constants as (a, b, k, c) for fast bracketing
        self._consts = tuple(
            (a, b, k, c) for (a, b), vec in sorted(self._table.items()) for k, c in sorted(vec.items())
        )

    def _pos(self, x) -> int:
        if isinstance(x, int):
            if not 0 <= x < self.dim:
                raise ValueError(f"basis position {x} out of range")
            return x
        lab = tuple(int(v) for v in x)
        if lab not in self.index:
            raise ValueError(f"unknown basis label {lab}")
        return self.index[lab]

    # -- basic access ----------------------------------------------------

    def structure_constant(self, a, b, k) -> Fraction:
        return self._table.get((self._pos(a), self._pos(b)), {}).get(self._pos(k), Fraction(0))

    def bracket_of_basis(self, a, b) -> Dict[int, Fraction]:
        return dict(self._table.get((self._pos(a), self._pos(b)), {}))

    def level_positions(self, level: int) -> List[int]:
        return [k for k, lab in enumerate(self.labels) if lab[0] == level]

    def generators(self) -> List[int]:
        return self.level_positions(1)

    def zero(self) -> "LieElement":
        return LieElement(self, [Fraction(0)] * self.dim)

    def basis_element(self, a, coeff=1) -> "LieElement":
        v = [Fraction(0)] * self.dim
        v[self._pos(a)] = to_rational(coeff)
        return LieElement(self, v)

    def element(self, coeffs: Sequence) -> "LieElement":
        return LieElement(self, [to_rational(c) for c in coeffs])

    # -- generic vector bracket (Fraction or Poly coefficients) ---------------

    def bracket_vec(self, x: Sequence, y: Sequence) -> list:
        out = [0] * self.dim
        for a, b, k, c in self._consts:
            xa = x[a]
            if not xa:
                continue
            yb = y[b]
            if not yb:
                continue
            out[k] = out[k] + xa * yb * c
        return out

    # -- identity -------------------------------------------------------------

    def table_items(self):
        """Stored brackets with left < right, sorted; for serialization."""
        return [
            (self.labels[a], self.labels[b], {self.labels[k]: c for k, c in sorted(vec.items())})
            for (a, b), vec in sorted(self._table.items())
            if a < b
        ]

    def to_json(self) -> dict:
        return {
            "class": self.nilpotency_class,
            "ranks": list(self.ranks),
            "brackets": [
                {
                    "left": list(l),
                    "right": list(r),
                    "result": [{"basis": list(k), "coeff": format_rational(c)} for k, c in res.items()],
                }
                for l, r, res in self.table_items()
            ],
        }

    def full_table_json(self) -> list:
        """Every stored pair, both orders; lossless even for invalid tables."""
        return [
            {
                "left": list(self.labels[a]),
                "right": list(self.labels[b]),
                "result": [
                    {"basis": list(self.labels[k]), "coeff": format_rational(c)} for k, c in sorted(vec.items())
                ],
            }
            for (a, b), vec in sorted(self._table.items())
        ]

    @classmethod
    def from_json(cls, data: Mapping) -> "LieAlgebra":
        brackets = []
        for entry in data.get("brackets", []):
            res = {}
            for t in entry.get("result", []):
                lab = tuple(int(v) for v in t["basis"])
                res[lab] = res.get(lab, Fraction(0)) + to_rational(t["coeff"])
            brackets.append(((tuple(entry["left"]), tuple(entry["right"])), res))
        return cls(int(data["class"]), data["ranks"], brackets)

    def content_hash(self) -> str:
        payload = {"class": self.nilpotency_class, "ranks": list(self.ranks), "table": self.full_table_json()}
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, LieAlgebra):
            return NotImplemented
        return (
            self.nilpotency_class == other.nilpotency_class
            and self.ranks == other.ranks
            and self._table == other._table
        )

    def __hash__(self):
        return hash((self.nilpotency_class, self.ranks, frozenset((k, frozenset(v.items())) for k, v in self._table.items())))

    def __repr__(self):
        return f"LieAlgebra(class={self.nilpotency_class}, ranks={list(self.ranks)})"


@dataclass(frozen=True)
class LieElement:
    algebra: LieAlgebra
    coeffs: Tuple[Fraction, ...]

    def __init__(self, algebra: LieAlgebra, coeffs: Sequence):
        if len(coeffs) != algebra.dim:
            raise ValueError("coefficient vector does not match the algebra dimension")
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in coeffs))

    def _check(self, other: "LieElement"):
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise AlgebraMismatchError("elements belong to different algebras")

    def __add__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        return LieElement(self.algebra, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "LieElement") -> "LieElement":
        self._check(other)
        return LieElement(self.algebra, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "LieElement":
        return LieElement(self.algebra, [-a for a in self.coeffs])

    def __mul__(self, c) -> "LieElement":
        c = to_rational(c)
        return LieElement(self.algebra, [c * a for a in self.coeffs])

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __str__(self):
        parts = [
            f"{format_rational(c)}*X{lab[0]}{lab[1]}"
            for c, lab in zip(self.coeffs, self.algebra.labels)
            if c
        ]
        return " + ".join(parts) or "0"


def bracket(a: LieElement, b: LieElement) -> LieElement:
    a._check(b)
    return LieElement(a.algebra, a.algebra.bracket_vec(a.coeffs, b.coeffs))


# ---------------------------------------------------------------------------
# lower central series, validation, grading


def _span_basis(vectors, dim) -> List[Tuple[Fraction, ...]]:
    ech = Echelon()
    for v in vectors:
        ech.add({k: c for k, c in enumerate(v) if c})
    out = []
    for row in ech.basis():
        vec = [Fraction(0)] * dim
        for k, c in row.items():
            vec[k] = c
        out.append(tuple(vec))
    return out


def lower_central_series(alg: LieAlgebra, check: bool = True) -> List[List[Tuple[Fraction, ...]]]:
    """Echelonized bases of g_[1] ⊇ g_[2] ⊇ ... ending with the zero space.

    Raises :class:`NilpotencyError` if the series has not reached zero after
    class + 1 steps (only when ``check``)."""
    n = alg.dim
    current = _span_basis([alg.basis_element(k).coeffs for k in range(n)], n)
    series = [current]
    limit = alg.nilpotency_class + 1
    while current:
        if len(series) >= limit and check:
            raise NilpotencyError(
                f"lower central series does not vanish at step {limit}"
            )
        if len(series) > n + 1:
            break
        products = []
        for a in range(n):
            ea = alg.basis_element(a).coeffs
            for v in current:
                w = alg.bracket_vec(ea, v)
                if any(w):
                    products.append(w)
        nxt = _span_basis(products, n)
        if len(nxt) == len(current):
            # stationary nonzero series: not nilpotent at all
            if check:
                raise NilpotencyError("lower central series stabilizes at a nonzero subspace")
            series.append(nxt)
            break
        current = nxt
        series.append(current)
    return series


def lcs_dimensions(alg: LieAlgebra) -> List[int]:
    return [len(s) for s in lower_central_series(alg)]


def lcs_quotient_dimensions(alg: LieAlgebra) -> List[int]:
    dims = lcs_dimensions(alg)
    return [dims[i] - dims[i + 1] for i in range(len(dims) - 1)]


@dataclass
class ValidationReport:
    checks: Dict[str, bool] = field(default_factory=dict)
    failures: Dict[str, List[str]] = field(default_factory=dict)
    computed_class: Optional[int] = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checks": dict(self.checks),
            "failures": {k: v for k, v in self.failures.items() if v},
            "computed_class": self.computed_class,
        }


def validate(alg: LieAlgebra) -> ValidationReport:
    """Check antisymmetry, Jacobi, grading, nilpotency of the stated class and
    that the basis is adapted to the lower central series."""
    rep = ValidationReport()
    n = alg.dim
    labels = alg.labels

    bad = []
    for a in range(n):
        if alg._table.get((a, a)):
            bad.append(f"[{labels[a]},{labels[a]}] != 0")
        for b in range(a + 1, n):
            ab = alg._table.get((a, b), {})
            ba = alg._table.get((b, a), {})
            if any(ab.get(k, 0) + ba.get(k, 0) for k in set(ab) | set(ba)):
                bad.append(f"[{labels[a]},{labels[b]}] != -[{labels[b]},{labels[a]}]")
    rep.checks["antisymmetry"] = not bad
    rep.failures["antisymmetry"] = bad

    bad = []
    basis = [alg.basis_element(k).coeffs for k in range(n)]
    for a, b, c in itertools.combinations(range(n), 3):
        x, y, z = basis[a], basis[b], basis[c]
        s1 = alg.bracket_vec(x, alg.bracket_vec(y, z))
        s2 = alg.bracket_vec(y, alg.bracket_vec(z, x))
        s3 = alg.bracket_vec(z, alg.bracket_vec(x, y))
        if any(p + q + r for p, q, r in zip(s1, s2, s3)):
            bad.append(f"Jacobi fails on {labels[a]},{labels[b]},{labels[c]}")
    rep.checks["jacobi"] = not bad
    rep.failures["jacobi"] = bad

    bad = []
    for (a, b), vec in alg._table.items():
        need = alg.weights[a] + alg.weights[b]
        for k in vec:
            if alg.weights[k] < need:
                bad.append(f"[{labels[a]},{labels[b]}] has a component on {labels[k]}")
    rep.checks["grading"] = not bad
    rep.failures["grading"] = bad

    series = lower_central_series(alg, check=False)
    terminated = not series[-1]
    computed = len(series) - 1 if terminated else None
    rep.computed_class = computed
    nil_ok = terminated and computed == alg.nilpotency_class
    rep.checks["nilpotency"] = nil_ok
    rep.failures["nilpotency"] = (
        [] if nil_ok else [f"stated class {alg.nilpotency_class}, computed {computed}"]
    )

    bad = []
    for lvl in range(1, alg.nilpotency_class + 1):
        tail = sum(alg.ranks[lvl - 1:])
        have = len(series[lvl - 1]) if lvl - 1 < len(series) else 0
        if have != tail:
            bad.append(f"level {lvl}: span of basis levels >= {lvl} has dim {tail}, g_[{lvl}] has dim {have}")
    rep.checks["lcs_adapted"] = not bad
    rep.failures["lcs_adapted"] = bad
    return rep


def graded(alg: LieAlgebra) -> LieAlgebra:
    """The associated graded algebra: keep only the level-(i+s) component of
    each bracket of a level-i and a level-s basis vector."""
    table = []
    for (a, b), vec in alg._table.items():
        need = alg.weights[a] + alg.weights[b]
        res = {k: c for k, c in vec.items() if alg.weights[k] == need}
        if res:
            table.append(((a, b), res))
    return LieAlgebra(alg.nilpotency_class, alg.ranks, table)


def is_strictly_graded(alg: LieAlgebra) -> bool:
    return all(
        alg.weights[k] == alg.weights[a] + alg.weights[b]
        for (a, b), vec in alg._table.items()
        for k in vec
    )


def abelian(k: int) -> LieAlgebra:
    return LieAlgebra(1, [k], {})


def direct_sum(g: LieAlgebra, h: LieAlgebra) -> LieAlgebra:
    """g ⊕ h with the levels of both factors interleaved level by level."""
    c = max(g.nilpotency_class, h.nilpotency_class)
    granks = list(g.ranks) + [0] * (c - g.nilpotency_class)
    hranks = list(h.ranks) + [0] * (c - h.nilpotency_class)
    ranks = [a + b for a, b in zip(granks, hranks)]

    def relabel(alg, lab, first):
        lvl, j = lab
        return (lvl, j if first else granks[lvl - 1] + j)

    table = []
    for alg, first in ((g, True), (h, False)):
        for l, r, res in alg.table_items():
            table.append(
                ((relabel(alg, l, first), relabel(alg, r, first)),
                 {relabel(alg, k, first): v for k, v in res.items()})
            )
    return LieAlgebra(c, ranks, table)


def change_basis(alg: LieAlgebra, matrix: Sequence[Sequence]) -> LieAlgebra:
    """Structure constants in the basis Y_k = sum_l matrix[l][k] X_l.

    ``matrix`` must be block upper triangular by level with invertible
    diagonal blocks, so that the new basis is again adapted."""
    n = alg.dim
    A = [[to_rational(x) for x in row] for row in matrix]
    for l in range(n):
        for k in range(n):
            if A[l][k] and alg.weights[l] < alg.weights[k]:
                raise ValueError("basis change would lower a basis vector's level")
    if rank(A) != n:
        raise ValueError("basis change is singular")
    Ainv = _inverse(A)
    cols = [[A[l][k] for l in range(n)] for k in range(n)]
    table = []
    for a in range(n):
        for b in range(a + 1, n):
            w = alg.bracket_vec(cols[a], cols[b])
            res = {}
            for k in range(n):
                c = sum((Ainv[k][l] * w[l] for l in range(n) if w[l]), Fraction(0))
                if c:
                    res[k] = c
            if res:
                table.append(((a, b), res))
    return LieAlgebra(alg.nilpotency_class, alg.ranks, table)


def random_adapted_matrix(alg: LieAlgebra, rng, coeff_range: int = 3) -> List[List[Fraction]]:
    """A random basis change accepted by :func:`change_basis`: entry (l, k)
    may be nonzero only when level(l) >= level(k), with invertible diagonal
    blocks."""
    n = alg.dim
    while True:
        A = [[Fraction(0)] * n for _ in range(n)]
        for l in range(n):
            for k in range(n):
                if alg.weights[l] >= alg.weights[k]:
                    A[l][k] = Fraction(rng.randint(-coeff_range, coeff_range), rng.randint(1, 2))
        if rank(A) == n:
            return A


def _inverse(A):
    n = len(A)
    rows = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(A)]
    from .exact import _rref

    _rref(rows, n)
    return [row[n:] for row in rows]


# ---------------------------------------------------------------------------
# structural invariants used by fingerprints


def center_dimension(alg: LieAlgebra) -> int:
    # x central iff sum_a x_a [e_a, e_b] = 0 for every b
    n = alg.dim
    rows = []
    for b in range(n):
        for k in range(n):
            rows.append([alg.structure_constant(a, b, k) for a in range(n)])
    return n - rank(rows)


def derived_series_dimensions(alg: LieAlgebra) -> List[int]:
    n = alg.dim
    current = _span_basis([alg.basis_element(k).coeffs for k in range(n)], n)
    dims = [len(current)]
    while current:
        nxt = _span_basis(
            [alg.bracket_vec(u, v) for u, v in itertools.combinations(current, 2)], n
        )
        if len(nxt) == len(current):
            break
        current = nxt
        dims.append(len(current))
    return dims


def upper_central_series_dimensions(alg: LieAlgebra) -> List[int]:
    """dim z_1 ⊆ z_2 ⊆ ... with z_{i+1}/z_i the center of g/z_i."""
    n = alg.dim
    dims = [0]
    z: List[Tuple[Fraction, ...]] = []
    while len(z) < n:
        # x in z_{i+1} iff [x, e_b] in z_i for all b; solve as a kernel
        zech = Echelon()
        for v in z:
            zech.add({k: c for k, c in enumerate(v) if c})
        # complement coordinates: reduce images modulo z_i via the echelon form
        rows = []
        for b in range(n):
            images = []
            for a in range(n):
                w = alg.bracket_vec(alg.basis_element(a).coeffs, alg.basis_element(b).coeffs)
                images.append(zech.reduce({k: c for k, c in enumerate(w) if c}))
            keys = sorted({k for im in images for k in im})
            for key in keys:
                rows.append([im.get(key, Fraction(0)) for im in images])
        kernel_dim = n - rank(rows) if rows else n
        if kernel_dim == len(z):
            break
        z = _kernel_basis(rows, n)
        dims.append(len(z))
    return dims


def _kernel_basis(rows, n) -> List[Tuple[Fraction, ...]]:
    from .exact import _rref

    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    work = [[to_rational(x) for x in row] for row in rows]
    pivots = _rref(work, n)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -work[r][f]
        basis.append(tuple(v))
    return basis


# ---------------------------------------------------------------------------
# free nilpotent Lie algebras via Hall bases


class HallBasis:
    """Hall basis of the free Lie algebra on ``n`` letters, truncated at
    degree ``c``.

    Trees are letters (ints) or pairs ``(u, v)``. Order: by degree, then by
    the positions of the two factors. ``[u, v]`` is a Hall element iff
    ``u < v`` and ``v`` is a letter or its left factor is ``<= u``.
    """

    def __init__(self, n: int, c: int):
        if n < 1 or c < 1:
            raise ValueError("need n >= 1 generators and class c >= 1")
        self.n, self.c = n, c
        self.elements: List = list(range(n))
        self.degree: Dict = {k: 1 for k in range(n)}
        self._reindex()
        for d in range(2, c + 1):
            pos = self.position
            new = []
            for u in self.elements:
                for v in self.elements:
                    if self.degree[u] + self.degree[v] != d or pos[u] >= pos[v]:
                        continue
                    if isinstance(v, tuple) and pos[v[0]] > pos[u]:
                        continue
                    new.append((u, v))
            new.sort(key=lambda t: (pos[t[0]], pos[t[1]]))
            for t in new:
                self.degree[t] = d
            self.elements.extend(new)
            self._reindex()
        self._memo: Dict = {}

    def _reindex(self):
        self.position = {t: k for k, t in enumerate(self.elements)}

    def word(self, t) -> str:
        if isinstance(t, int):
            return "xyzuvw"[t] if self.n <= 6 else f"x{t + 1}"
        return f"[{self.word(t[0])},{self.word(t[1])}]"

    def bracket(self, u, v) -> Dict:
        """[u, v] for Hall elements, rewritten in the Hall basis."""
        key = (u, v)
        got = self._memo.get(key)
        if got is not None:
            return got
        pos = self.position
        if u == v or self.degree[u] + self.degree[v] > self.c:
            res = {}
        elif pos[u] > pos[v]:
            res = {t: -x for t, x in self.bracket(v, u).items()}
        elif not isinstance(v, tuple) or pos[v[0]] <= pos[u]:
            res = {(u, v): Fraction(1)}
        else:
            v1, v2 = v
            # [u,[v1,v2]] = [[u,v1],v2] + [v1,[u,v2]]
            res = {}
            for t, x in self.bracket(u, v1).items():
                for s, y in self.bracket(t, v2).items():
                    res[s] = res.get(s, 0) + x * y
            for t, x in self.bracket(u, v2).items():
                for s, y in self.bracket(v1, t).items():
                    res[s] = res.get(s, 0) + x * y
            res = {t: x for t, x in res.items() if x}
        self._memo[key] = res
        return res

    def bracket_combo(self, x: Mapping, y: Mapping) -> Dict:
        out: Dict = {}
        for u, a in x.items():
            for v, b in y.items():
                for t, c in self.bracket(u, v).items():
                    out[t] = out.get(t, 0) + a * b * c
        return {t: c for t, c in out.items() if c}


@lru_cache(maxsize=None)
def _hall(n: int, c: int) -> HallBasis:
    return HallBasis(n, c)


def witt_dimension(n: int, k: int) -> int:
    """Dimension of the degree-k part of the free Lie algebra on n letters."""
    total = 0
    for d in range(1, k + 1):
        if k % d == 0:
            total += _mobius(d) * n ** (k // d)
    return total // k


def _mobius(d: int) -> int:
    result, p, m = 1, 2, d
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


def free_nilpotent(n: int, c: int) -> LieAlgebra:
    """f_n(c) presented on its Hall basis; level = Hall word degree."""
    hb = _hall(n, c)
    by_degree: Dict[int, List] = {}
    for t in hb.elements:
        by_degree.setdefault(hb.degree[t], []).append(t)
    ranks = [len(by_degree.get(d, [])) for d in range(1, c + 1)]
    # one generator: abelian, so the class collapses to 1
    while len(ranks) > 1 and ranks[-1] == 0:
        ranks.pop()
    c = len(ranks)
    label = {}
    for d, ts in by_degree.items():
        for j, t in enumerate(ts):
            label[t] = (d, j + 1)
    table = []
    for u, v in itertools.combinations(hb.elements, 2):
        res = hb.bracket(u, v)
        if res:
            table.append(((label[u], label[v]), {label[t]: x for t, x in res.items()}))
    alg = LieAlgebra(c, ranks, table)
    alg.hall_words = tuple(hb.word(t) for t in sorted(hb.elements, key=lambda t: label[t]))
    return alg


def hall_trees(n: int, c: int) -> List:
    """Hall trees of f_n(c) in basis (label) order."""
    hb = _hall(n, c)
    return sorted(hb.elements, key=lambda t: (hb.degree[t], hb.position[t]))


def evaluate_tree(tree, gens: Sequence[Sequence], bracket_vec) -> list:
    if isinstance(tree, int):
        return list(gens[tree])
    return bracket_vec(evaluate_tree(tree[0], gens, bracket_vec), evaluate_tree(tree[1], gens, bracket_vec))


# ---------------------------------------------------------------------------
# Baker-Campbell-Hausdorff via Dynkin's formula


@lru_cache(maxsize=None)
def dynkin_coefficients(order: int) -> Tuple[Tuple[Tuple[int, ...], Fraction], ...]:
    """Coefficients of right-nested words in X (0) and Y (1), up to length
    ``order``, whose sum is log(exp X exp Y) modulo brackets of length > order.

    The word (w1, ..., wm) stands for [w1, [w2, [..., wm]]].
    """
    acc: Dict[Tuple[int, ...], Fraction] = {}

    def pairs(remaining):
        for r in range(remaining + 1):
            for s in range(remaining + 1 - r):
                if r + s:
                    yield r, s

    def rec(seq, used, n_pairs):
        if seq:
            m = used
            coef = Fraction((-1) ** (n_pairs - 1), n_pairs) / m
            for r, s in seq:
                coef /= factorial(r) * factorial(s)
            word = tuple(itertools.chain.from_iterable([0] * r + [1] * s for r, s in seq))
            acc[word] = acc.get(word, Fraction(0)) + coef
        for r, s in pairs(order - used):
            rec(seq + [(r, s)], used + r + s, n_pairs + 1)

    rec([], 0, 0)
    # [.., [a, a]] vanishes identically
    return tuple(
        (w, c)
        for w, c in sorted(acc.items(), key=lambda t: (len(t[0]), t[0]))
        if c and (len(w) == 1 or w[-1] != w[-2])
    )


def bch_vec(alg: LieAlgebra, x: Sequence, y: Sequence) -> list:
    """log(exp x exp y) for coefficient vectors (Fraction or Poly entries)."""
    letters = (list(x), list(y))
    memo: Dict[Tuple[int, ...], list] = {}

    def nested(word):
        got = memo.get(word)
        if got is not None:
            return got
        if len(word) == 1:
            got = letters[word[0]]
        else:
            rest = nested(word[1:])
            got = alg.bracket_vec(letters[word[0]], rest) if any(bool(r) for r in rest) else [0] * alg.dim
        memo[word] = got
        return got

    out = [0] * alg.dim
    for word, coef in dynkin_coefficients(alg.nilpotency_class):
        vec = nested(word)
        for k, v in enumerate(vec):
            if v:
                out[k] = out[k] + v * coef
    return out


def bch(a: LieElement, b: LieElement) -> LieElement:
    """Baker-Campbell-Hausdorff product, exact for nilpotent algebras."""
    a._check(b)
    return LieElement(a.algebra, bch_vec(a.algebra, a.coeffs, b.coeffs))


# ---------------------------------------------------------------------------
# standard algebras


def heisenberg() -> LieAlgebra:
    """[X, Y] = Z with basis order X, Y, Z."""
    return LieAlgebra(2, [2, 1], {((1, 1), (1, 2)): {(2, 1): 1}})


def unitriangular(n: int) -> LieAlgebra:
    """Strictly upper triangular n x n matrices (the Lie algebra of U_n).

    Basis E_{p,q} (p < q) has level q - p; within a level, ordered by p.
    ``[E_pq, E_qr] = E_pr``.
    """
    if n < 2:
        raise ValueError("U_n needs n >= 2")
    entries = unitriangular_entries(n)
    pos = {pq: lab for lab, pq in entries.items()}
    table = []
    for (p, q), a in pos.items():
        for (r, s), b in pos.items():
            if a >= b:
                continue
            res = {}
            if q == r:
                res[pos[(p, s)]] = 1
            if s == p:
                res[pos[(r, q)]] = res.get(pos[(r, q)], 0) - 1
            if res:
                table.append(((a, b), res))
    return LieAlgebra(n - 1, [n - k for k in range(1, n)], table)


def unitriangular_entries(n: int) -> Dict[Label, Tuple[int, int]]:
    """Basis label -> matrix position (row, col), 0-based."""
    out = {}
    for lvl in range(1, n):
        for j, p in enumerate(range(n - lvl)):
            out[(lvl, j + 1)] = (p, p + lvl)
    return out
