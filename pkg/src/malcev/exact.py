"""Exact rational arithmetic: sparse multivariate polynomials over Q and
fraction-based linear algebra.

Rationals are :class:`fractions.Fraction` throughout; nothing in the package
ever touches a float.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

Exps = Tuple[int, ...]
Scalar = Union[int, Fraction]

NEG_INF = -math.inf
POS_INF = math.inf


class VariableMismatchError(ValueError):
    pass


class InconsistentSystemError(ValueError):
    """Raised by :func:`linear_solve`; ``row`` is the index of an equation
    that reduces to ``0 = nonzero``."""

    def __init__(self, row: int, residual: Fraction):
        super().__init__(f"inconsistent linear system at equation {row} (0 = {residual})")
        self.row = row
        self.residual = residual


def to_rational(x) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, ints and Fractions. Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def dot_add(x, y):
    """Addition on Z_* = {-inf} u N_0; -inf absorbs."""
    if x == NEG_INF or y == NEG_INF:
        return NEG_INF
    return x + y


def dot_sub(x, y):
    """Truncated subtraction on Z_*: ``x - y`` if ``x >= y``, else -inf."""
    if x == NEG_INF and y == NEG_INF:
        raise ValueError("-inf minus -inf is undefined")
    if x == NEG_INF or x < y:
        return NEG_INF
    return x - y


def graded_lex_key(exps: Exps, weights: Optional[Sequence[int]] = None):
    """Sort key: (weighted) total degree ascending, then lexicographically
    descending exponents, so x^2 < xy < y^2 < z among equal degrees."""
    if weights is None:
        deg = sum(exps)
    else:
        deg = sum(w * e for w, e in zip(weights, exps))
    return (deg, tuple(-e for e in exps))


class Poly:
    """Immutable sparse polynomial over Q.

    ``terms`` maps exponent tuples to nonzero Fractions. Arithmetic with int
    and Fraction scalars is supported on either side.
    """

    __slots__ = ("variables", "terms")

    def __init__(self, variables: Sequence[str], terms: Optional[Mapping[Exps, Scalar]] = None):
        self.variables = tuple(variables)
        n = len(self.variables)
        clean: Dict[Exps, Fraction] = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != n:
                    raise ValueError(f"exponent {e} does not match {n} variables")
                c = to_rational(c)
                if c:
                    clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, variables: Tuple[str, ...], terms: Dict[Exps, Fraction]) -> "Poly":
        # trusted constructor: terms already pruned and exact
        p = object.__new__(cls)
        p.variables = variables
        p.terms = terms
        return p

    @classmethod
    def const(cls, variables: Sequence[str], c: Scalar) -> "Poly":
        variables = tuple(variables)
        c = to_rational(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, variables: Sequence[str], index: int) -> "Poly":
        variables = tuple(variables)
        e = [0] * len(variables)
        e[index] = 1
        return cls._raw(variables, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, variables: Sequence[str], exps: Exps, c: Scalar = 1) -> "Poly":
        return cls(variables, {tuple(exps): c})

    @property
    def nvars(self) -> int:
        return len(self.variables)

    # -- helpers -----------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise VariableMismatchError(f"{self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.const(self.variables, other)
        return NotImplemented

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    # -- ring operations -----------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c: Scalar) -> "Poly":
        c = to_rational(c)
        if not c:
            return Poly._raw(self.variables, {})
        return Poly._raw(self.variables, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.const(self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.variables == other.variables and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == Poly.const(self.variables, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # -- degree / evaluation ------------------------------------------------

    def weighted_degree(self, weights: Sequence[int]):
        """Max of sum(w_i e_i) over the terms; -inf for the zero polynomial."""
        if len(weights) != self.nvars:
            raise ValueError("weights length must equal the number of variables")
        if not self.terms:
            return NEG_INF
        return max(sum(w * e for w, e in zip(weights, exps)) for exps in self.terms)

    def total_degree(self):
        return self.weighted_degree([1] * self.nvars)

    def homogeneous_part(self, weights: Sequence[int], degree: int) -> "Poly":
        return Poly._raw(
            self.variables,
            {e: c for e, c in self.terms.items() if sum(w * x for w, x in zip(weights, e)) == degree},
        )

    def evaluate(self, values: Sequence[Scalar]) -> Fraction:
        if len(values) != self.nvars:
            raise ValueError("wrong number of values")
        vals = [to_rational(v) for v in values]
        powers: Dict[Tuple[int, int], Fraction] = {}
        total = Fraction(0)
        for exps, c in self.terms.items():
            term = c
            for i, k in enumerate(exps):
                if k:
                    key = (i, k)
                    pw = powers.get(key)
                    if pw is None:
                        pw = powers[key] = vals[i] ** k
                    term *= pw
            total += term
        return total

    def substitute(self, assignment) -> "Poly":
        """Compose with ``assignment``: either a sequence of images (one per
        variable) or a mapping from variable name to image. Images are Polys
        over a common variable list, or scalars."""
        images = _images_from_assignment(self.variables, assignment)
        return Substitution(images).apply(self)

    def rename(self, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        if len(variables) != self.nvars:
            raise ValueError("rename must keep the number of variables")
        return Poly._raw(variables, dict(self.terms))

    def embed(self, variables: Sequence[str], offset: int) -> "Poly":
        """Place this polynomial's variables at positions offset.. of a larger
        variable list."""
        variables = tuple(variables)
        n = len(variables)
        out = {}
        for e, c in self.terms.items():
            full = [0] * n
            full[offset:offset + len(e)] = e
            out[tuple(full)] = c
        return Poly._raw(variables, out)

    # -- presentation -------------------------------------------------------

    def sorted_terms(self, weights: Optional[Sequence[int]] = None) -> List[Tuple[Exps, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: graded_lex_key(t[0], weights))

    def to_json(self, weights: Optional[Sequence[int]] = None) -> list:
        return [{"exps": list(e), "coeff": format_rational(c)} for e, c in self.sorted_terms(weights)]

    @classmethod
    def from_json(cls, variables: Sequence[str], data: Iterable[Mapping]) -> "Poly":
        out: Dict[Exps, Fraction] = {}
        for t in data:
            e = tuple(int(x) for x in t["exps"])
            out[e] = out.get(e, Fraction(0)) + to_rational(t["coeff"])
        return cls(variables, out)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.sorted_terms()):
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            if not mono:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{format_rational(c)}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"Poly({str(self)!r})"


def _images_from_assignment(variables, assignment) -> list:
    if isinstance(assignment, Mapping):
        missing = [v for v in variables if v not in assignment]
        if missing:
            raise KeyError(f"assignment misses variables {missing}")
        return [assignment[v] for v in variables]
    images = list(assignment)
    if len(images) != len(variables):
        raise KeyError("assignment length does not match the variables")
    return images


class Substitution:
    """A fixed substitution x_i -> images[i], with memoized monomial images.

    Reusing one instance for many polynomials (difference operators along a
    fixed group element) avoids recomputing shared monomial images.
    """

    def __init__(self, images: Sequence):
        polys = [im for im in images if isinstance(im, Poly)]
        if polys:
            target = polys[0].variables
            for p in polys:
                if p.variables != target:
                    raise VariableMismatchError("substitution images use different variables")
        else:
            target = ()
        self.target = target
        self.images = [im if isinstance(im, Poly) else Poly.const(target, im) for im in images]
        self._cache: Dict[Exps, Poly] = {(0,) * len(self.images): Poly.const(target, 1)}

    def monomial(self, exps: Exps) -> Poly:
        got = self._cache.get(exps)
        if got is not None:
            return got
        # peel one factor off the last nonzero exponent
        i = max(k for k, e in enumerate(exps) if e)
        lower = list(exps)
        lower[i] -= 1
        got = self.monomial(tuple(lower)) * self.images[i]
        self._cache[exps] = got
        return got

    def apply(self, p: Poly) -> Poly:
        if p.nvars != len(self.images):
            raise ValueError("polynomial and substitution disagree on the number of variables")
        out: Dict[Exps, Fraction] = {}
        for exps, c in p.terms.items():
            for e, v in self.monomial(exps).terms.items():
                w = out.get(e, 0) + c * v
                if w:
                    out[e] = w
                else:
                    out.pop(e, None)
        return Poly._raw(self.target, out)


def poly_add(p: Poly, q: Poly) -> Poly:
    if p.variables != q.variables:
        raise VariableMismatchError(f"{p.variables} vs {q.variables}")
    return p + q


def poly_mul(p: Poly, q: Poly) -> Poly:
    if p.variables != q.variables:
        raise VariableMismatchError(f"{p.variables} vs {q.variables}")
    return p * q


def poly_substitute(p: Poly, assignment) -> Poly:
    return p.substitute(assignment)


def poly_weighted_degree(p: Poly, weights: Sequence[int]):
    return p.weighted_degree(weights)


# --------------------------------------------------------------------------
# linear algebra over Q


def _rref(rows: List[List[Fraction]], ncols: int):
    """In-place reduced row echelon form. Returns the pivot columns."""
    pivots = []
    r = 0
    nrows = len(rows)
    for col in range(ncols):
        piv = next((i for i in range(r, nrows) if rows[i][col]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pr = rows[r]
        inv = 1 / pr[col]
        if inv != 1:
            for k in range(col, len(pr)):
                if pr[k]:
                    pr[k] *= inv
        for i in range(nrows):
            if i != r:
                f = rows[i][col]
                if f:
                    ri = rows[i]
                    for k in range(col, len(pr)):
                        if pr[k]:
                            ri[k] -= f * pr[k]
        pivots.append(col)
        r += 1
        if r == nrows:
            break
    return pivots


def linear_solve(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar]) -> List[Fraction]:
    """Solve ``A x = b`` exactly.

    Returns the reduced-echelon particular solution (free variables = 0).
    Raises :class:`InconsistentSystemError` naming an original equation that
    cannot be satisfied.
    """
    m = len(A)
    if len(b) != m:
        raise ValueError("A and b disagree on the number of equations")
    n = len(A[0]) if m else 0
    # trailing columns: rhs, then an identity tag to recover the source row
    rows = []
    for i, (row, bi) in enumerate(zip(A, b)):
        if len(row) != n:
            raise ValueError("A is not rectangular")
        tag = [Fraction(0)] * m
        tag[i] = Fraction(1)
        rows.append([to_rational(x) for x in row] + [to_rational(bi)] + tag)
    pivots = _rref(rows, n)
    for i in range(len(pivots), m):
        if rows[i][n]:
            # the tag records which original equations combine into 0 = c
            src = max(k for k in range(m) if rows[i][n + 1 + k])
            raise InconsistentSystemError(src, rows[i][n])
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = rows[r][n]
    return x


def rank(A: Sequence[Sequence[Scalar]]) -> int:
    rows = [[to_rational(x) for x in row] for row in A if any(row)]
    if not rows:
        return 0
    return len(_rref(rows, len(rows[0])))


def sparse_rank(rows: Iterable[Mapping]) -> int:
    """Rank of a matrix given as sparse rows (dicts column -> value)."""
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return len(ech)


class Echelon:
    """Incrementally maintained echelon basis of sparse vectors.

    Vectors are dicts key -> Fraction; keys must be orderable. ``add``
    returns the reduced vector when it is new, ``None`` when it is already in
    the span.
    """

    def __init__(self):
        self.pivots: Dict[object, Dict] = {}

    def __len__(self):
        return len(self.pivots)

    def reduce(self, vec: Mapping) -> Dict:
        v = {k: Fraction(x) for k, x in vec.items() if x}
        # pivot rows are normalized and pivot-free in other rows' pivots,
        # so one pass in any order suffices
        for key in [k for k in v if k in self.pivots]:
            c = v.get(key)
            if not c:
                continue
            for k, x in self.pivots[key].items():
                w = v.get(k, 0) - c * x
                if w:
                    v[k] = w
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: Mapping) -> Optional[Dict]:
        v = self.reduce(vec)
        if not v:
            return None
        key = min(v)
        c = v[key]
        v = {k: x / c for k, x in v.items()}
        # keep existing rows free of the new pivot
        for row in self.pivots.values():
            f = row.get(key)
            if f:
                for k, x in v.items():
                    w = row.get(k, 0) - f * x
                    if w:
                        row[k] = w
                    else:
                        row.pop(k, None)
        self.pivots[key] = v
        return v

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def basis(self) -> List[Dict]:
        return [self.pivots[k] for k in sorted(self.pivots)]
