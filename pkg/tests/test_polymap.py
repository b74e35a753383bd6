import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import group_of
from oracles import weighted_count, words
from malcev.exact import dot_sub, rank
from malcev.group import MalcevGroup
from malcev.lie import abelian, free_nilpotent
from malcev.polymap import (
    PolyMap,
    TensorPolyMap,
    basis,
    basis_indices,
    coassociativity_sides,
    degree,
    determined_by_diffs,
    determined_on_ball,
    difference_cocycle_defect,
    dim_pol,
    evaluate,
    integrate_free,
    iterated_difference_spans,
    left_diff,
    product,
    pull_inv,
    pull_m,
    pull_mtilde,
    quadratic_cocycle_defect,
    random_element,
    random_polymap,
    right_diff,
    unitized_diff,
    verify_degree,
    zeta,
    zeta_monomial,
)


def zx(H):
    return zeta(H, 1, 1)


def zy(H):
    return zeta(H, 1, 2)


def zz(H):
    return zeta(H, 2, 1)


# -- examples ------------------------------------------------------------


def test_zeta_degrees(H):
    assert degree(zz(H)) == 2
    assert degree(zx(H)) == 1
    one = zeta_monomial(H, (0, 0, 0))
    assert one == PolyMap.constant(H, 1) and degree(one) == 0
    with pytest.raises(ValueError):
        zeta(H, 3, 1)


def test_heisenberg_bases(H):
    assert basis(H, 1) == [PolyMap.constant(H, 1), zx(H), zy(H)]
    assert basis_indices(H, 2) == [(0, 0, 0), (1, 0, 0), (0, 1, 0), (2, 0, 0), (1, 1, 0), (0, 2, 0), (0, 0, 1)]
    assert dim_pol(H, 2) == 7
    for name in ("heisenberg", "f2_3", "u4"):
        assert basis(group_of(name), 0) == [PolyMap.constant(group_of(name), 1)]


def test_evaluate_examples(H):
    z = H.generator((2, 1))
    assert evaluate(zz(H), z) == 1
    x, y = H.generators()
    for n, m in [(2, 3), (-1, 4), (5, 0)]:
        g = H.pow(x, n) * H.pow(y, m)
        assert evaluate(zz(H), g) == 0
    assert evaluate(PolyMap.constant(H, 1), random_element(H, random.Random(0))) == 1


def test_right_diff_examples(H):
    x = H.generator((1, 1))
    z = H.generator((2, 1))
    assert right_diff(zz(H), z) == PolyMap.constant(H, 1)
    assert right_diff(zz(H), x) == -zy(H)
    assert not right_diff(PolyMap.constant(H, 5), x)


def test_left_diff_of_coordinate(H):
    x = H.generator((1, 1))
    assert left_diff(zx(H), x) == PolyMap.constant(H, -1)


def test_unitized_diff_examples(H):
    rng = random.Random(1)
    for _ in range(10):
        xi = random_polymap(H, 3, rng)
        g = random_element(H, rng)
        assert evaluate(unitized_diff(xi, g), H.identity()) == 0
    A = MalcevGroup(abelian(3))
    for j in (1, 2, 3):
        assert not unitized_diff(zeta(A, 1, j), random_element(A, rng))
    assert not unitized_diff(PolyMap.constant(H, 2), H.generator(0))


def test_degree_examples(H):
    assert degree(zx(H) * zz(H)) == 3
    assert verify_degree(zz(H), 2) and not verify_degree(zz(H), 1)
    zero = PolyMap.constant(H, 0)
    assert degree(zero) == -math.inf and verify_degree(zero, -math.inf)


def test_product_examples(H):
    assert degree(product(zx(H), zy(H))) == 2
    xi = zx(H) * zz(H) + 3
    assert product(xi, PolyMap.constant(H, 1)) == xi
    zero = product(xi, PolyMap.constant(H, 0))
    assert not zero and degree(zero) == -math.inf


def test_pull_m_examples(H):
    t = pull_m(zz(H))
    expected = (
        TensorPolyMap.simple(zz(H), PolyMap.constant(H, 1))
        + TensorPolyMap.simple(PolyMap.constant(H, 1), zz(H))
        - TensorPolyMap.simple(zy(H), zx(H))
    )
    assert t == expected
    k = PolyMap.constant(H, Fraction(7, 2))
    assert pull_m(k) == TensorPolyMap.simple(k, PolyMap.constant(H, 1))
    A = MalcevGroup(abelian(2))
    one = PolyMap.constant(A, 1)
    for j in (1, 2):
        z = zeta(A, 1, j)
        assert pull_m(z) == TensorPolyMap.simple(z, one) + TensorPolyMap.simple(one, z)


def test_pull_inv_and_mtilde(H):
    rng = random.Random(2)
    xi = random_polymap(H, 3, rng)
    inv = pull_inv(xi)
    mt = pull_mtilde(xi)
    for _ in range(5):
        g, h = random_element(H, rng), random_element(H, rng)
        assert evaluate(inv, g) == evaluate(xi, g.inverse())
        assert mt.evaluate(g, h) == evaluate(xi, g * h.inverse())


def test_integrate_examples():
    F22 = MalcevGroup(free_nilpotent(2, 2))
    zero = PolyMap.constant(F22, 0)
    assert not integrate_free(F22, [zero, zero], 0).polymap

    z = zeta(F22, 2, 1)
    gens = F22.generators()
    targets = [left_diff(z, g) for g in gens]
    res = integrate_free(F22, targets, 1)
    assert [left_diff(res.polymap, g) for g in gens] == targets
    # solutions differ by something killed by every generator difference: a constant
    assert degree(res.polymap - z) <= 0

    F23 = group_of("f2_3")
    res = integrate_free(F23, [PolyMap.constant(F23, 1), PolyMap.constant(F23, 0)], 0)
    assert res.polymap == -zeta(F23, 1, 1)
    assert res.achieved_degree == 1 and not res.within_stated_bound and res.within_corrected_bound


def test_integrate_rejects_bound_at_class():
    F22 = MalcevGroup(free_nilpotent(2, 2))
    with pytest.raises(ValueError):
        integrate_free(F22, [PolyMap.constant(F22, 0)] * 2, 2)


def test_determined_on_ball_examples(H):
    assert determined_on_ball(zz(H), zz(H), 2)
    assert not determined_on_ball(zz(H), zz(H) + zx(H) ** 2, 2)
    assert evaluate(zz(H), H.generator(0)) != evaluate(zz(H) + zx(H) ** 2, H.generator(0))
    xi = random_polymap(H, 3, random.Random(4))
    assert determined_on_ball(xi, xi, 3)


def test_determined_by_diffs_examples(H, F23):
    assert not determined_by_diffs(zz(H) + 1, zz(H))
    assert determined_by_diffs(zz(H), zz(H))
    rng = random.Random(7)
    for _ in range(10):
        xi, eta = random_polymap(F23, 3, rng), random_polymap(F23, 3, rng)
        if xi == eta:
            continue
        assert not determined_by_diffs(xi, eta)


def test_polymap_json_roundtrip(H):
    xi = zx(H) * zz(H) * Fraction(-2, 3) + 1
    data = xi.to_json()
    assert data["group"] == H.algebra.content_hash()
    assert PolyMap.from_json(H, data) == xi


def test_enumeration_cap(H, monkeypatch):
    monkeypatch.setenv("MALCEV_MAX_DEGREE", "3")
    assert dim_pol(H, 3) == weighted_count(H.weights, 3)
    with pytest.raises(ValueError):
        basis(H, 4)


# -- properties -------------------------------------------------------------

CORE = ["heisenberg", "f2_3", "u4"]


@pytest.mark.parametrize("name", CORE)
def test_basis_monomials_independent_as_functions(name):
    # independent of the representation: evaluate on random points
    G = group_of(name)
    rng = random.Random(11)
    monos = basis(G, 3)
    pts = [random_element(G, rng, num=6, den=5) for _ in range(3 * len(monos))]
    rows = [[evaluate(m, g) for m in monos] for g in pts]
    assert rank(rows) == len(monos)


@pytest.mark.parametrize("name,d", [("heisenberg", 3), ("f2_3", 3), ("u4", 2)])
def test_polynomial_space_by_difference_kernel(name, d):
    """Pol_d as the kernel of all (d+1)-fold differences inside every
    polynomial of ordinary degree <= d; its dimension must be the number of
    weighted monomials."""
    G = group_of(name)
    rng = random.Random(d)
    letters = G.generators() + [random_element(G, rng) for _ in range(2)]
    n = G.dim
    cands = [e for e in _all_exps(n, d)]
    cols = []
    for e in cands:
        col = {}
        for w in words(range(len(letters)), d + 1):
            xi = zeta_monomial(G, e)
            for k in w:
                xi = right_diff(xi, letters[k])
                if not xi:
                    break
            for m, c in xi.body.terms.items():
                col[(w, m)] = c
        cols.append(col)
    keys = sorted({k for c in cols for k in c})
    rows = [[c.get(k, Fraction(0)) for c in cols] for k in keys]
    kernel = len(cands) - (rank(rows) if rows else 0)
    assert kernel == weighted_count(G.weights, d) == dim_pol(G, d)


def _all_exps(n, d):
    if n == 0:
        return [()]
    return [(a,) + rest for a in range(d + 1) for rest in _all_exps(n - 1, d - a)]


@pytest.mark.parametrize("name", CORE)
def test_degree_drop_exhaustive(name):
    G = group_of(name)
    for xi in basis(G, 4):
        for g in G.basis_elements():
            for diff in (left_diff, right_diff):
                assert degree(diff(xi, g)) <= dot_sub(degree(xi), G.elem_degree(g))


@pytest.mark.parametrize("name", CORE)
def test_left_and_right_degrees_agree(name):
    G = group_of(name)
    rng = random.Random(5)
    for _ in range(6):
        xi = random_polymap(G, 3, rng, density=0.3)
        d = degree(xi)
        if d < 1:
            continue
        for side in ("left", "right"):
            assert verify_degree(xi, d, side) and not verify_degree(xi, d - 1, side)


@pytest.mark.parametrize("name", CORE)
def test_difference_cocycle_identity(name):
    G = group_of(name)
    rng = random.Random(8)
    for _ in range(5):
        xi = random_polymap(G, 3, rng)
        g, h = random_element(G, rng), random_element(G, rng)
        assert not difference_cocycle_defect(xi, g, h)


@pytest.mark.parametrize("name", CORE)
def test_quadratic_cocycle_identity(name):
    G = group_of(name)
    rng = random.Random(9)
    for _ in range(5):
        xi = random_polymap(G, 2, rng, unital=True)
        for _ in range(10):
            trip = [random_element(G, rng) for _ in range(3)]
            assert quadratic_cocycle_defect(xi, *trip) == 0
    cubic = zeta(G, 1, 1) ** 3
    assert any(
        quadratic_cocycle_defect(cubic, *[random_element(G, rng) for _ in range(3)]) != 0 for _ in range(10)
    )


@pytest.mark.parametrize("name", CORE)
def test_pull_m_shape(name):
    G = group_of(name)
    w = G.weights
    for e in basis_indices(G, 4):
        if not any(e):
            continue
        xi = zeta_monomial(G, e)
        d = degree(xi)
        one = PolyMap.constant(G, 1)
        rest = pull_m(xi) - TensorPolyMap.simple(xi, one) - TensorPolyMap.simple(one, xi)
        for a, b, _ in rest.decompose():
            da = sum(x * y for x, y in zip(a, w))
            db = sum(x * y for x, y in zip(b, w))
            assert da < d and db < d and da + db <= d


@pytest.mark.parametrize("name", CORE)
def test_coassociativity(name):
    G = group_of(name)
    for e in basis_indices(G, 3):
        lhs, rhs = coassociativity_sides(zeta_monomial(G, e))
        assert lhs == rhs


@given(st.integers(0, 10_000))
def test_random_map_differences_reduce_span(seed):
    H = group_of("heisenberg")
    rng = random.Random(seed)
    xi = random_polymap(H, 4, rng)
    dims = iterated_difference_spans(xi, 6)
    d = degree(xi)
    if d == -math.inf:
        assert dims == [0]
    else:
        assert len(dims) == d + 2 and dims[-1] == 0
