"""Extension field arithmetic against hand-checked values and field axioms."""

import random

import pytest

from normsum import field_core as fc


def F9():
    return fc.ext_field_ctx(3, 2)


def test_find_irreducible_canonical_choices():
    assert fc.find_irreducible(3, 1) == (0, 1)
    assert fc.find_irreducible(3, 2) == (1, 0, 1)
    assert fc.find_irreducible(5, 2) == (2, 0, 1)


def test_find_irreducible_rejects_bad_inputs():
    with pytest.raises(ValueError):
        fc.find_irreducible(4, 2)
    with pytest.raises(ValueError):
        fc.find_irreducible(3, 0)


def test_ctx_rejects_reducible_poly():
    with pytest.raises(ValueError):
        fc.ext_field_ctx(5, 2, (1, 0, 1))  # X^2+1 = (X+2)(X+3) mod 5


def test_ext_mul_F9():
    ctx = F9()
    w = ctx.gen()
    assert fc.ext_mul(w, w).coeffs == (2, 0)
    one_plus = ctx.element((1, 1))
    one_minus = ctx.element((1, 2))
    assert fc.ext_mul(one_plus, one_minus).coeffs == (2, 0)


def test_ext_inv_F9():
    ctx = F9()
    w = ctx.gen()
    assert fc.ext_inv(w).coeffs == (0, 2)
    with pytest.raises(ZeroDivisionError):
        fc.ext_inv(ctx.zero())


def test_frobenius_F9():
    ctx = F9()
    w = ctx.gen()
    assert fc.frobenius(w, 1).coeffs == (0, 2)
    assert fc.frobenius(w, 0) == w
    with pytest.raises(ValueError):
        fc.frobenius(w, 2)


def test_norm_F9_values():
    ctx = F9()
    w = ctx.gen()
    assert fc.norm(w) == 1
    assert fc.norm(ctx.element((1, 1))) == 2
    assert fc.norm(ctx.zero()) == 0


def test_normal_elements_F9():
    ctx = F9()
    assert not fc.is_normal_element(ctx.zero())
    assert not fc.is_normal_element(ctx.one())
    assert fc.is_normal_element(ctx.element((1, 1)))


def test_prime_subfield_behavior_m1():
    ctx = fc.ext_field_ctx(7, 1)
    a = ctx.from_int(3)
    assert fc.norm(a) == 3
    assert fc.is_normal_element(a)
    assert not fc.is_normal_element(ctx.zero())


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (3, 4), (5, 2), (7, 2)])
def test_field_axioms_sampled(p, m):
    """Associativity, distributivity, commutativity, inverses on sampled triples."""
    ctx = fc.ext_field_ctx(p, m)
    rng = random.Random(20260822)
    elems = list(ctx.iter_elements())
    for _ in range(80):
        a, b, c = (rng.choice(elems) for _ in range(3))
        assert fc.ext_add(a, b) == fc.ext_add(b, a)
        assert fc.ext_mul(a, b) == fc.ext_mul(b, a)
        assert fc.ext_mul(a, fc.ext_mul(b, c)) == fc.ext_mul(fc.ext_mul(a, b), c)
        assert fc.ext_mul(a, fc.ext_add(b, c)) == fc.ext_add(
            fc.ext_mul(a, b), fc.ext_mul(a, c)
        )
        if not a.is_zero():
            assert fc.ext_mul(a, fc.ext_inv(a)) == ctx.one()


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (5, 2), (3, 4), (5, 4)])
def test_norm_multiplicative_exhaustive(p, m):
    ctx = fc.ext_field_ctx(p, m)
    elems = list(ctx.iter_elements())
    norms = {a.coeffs: fc.norm(a) for a in elems}
    for a in elems:
        for b in elems:
            ab = fc.ext_mul(a, b)
            assert norms[ab.coeffs] == (norms[a.coeffs] * norms[b.coeffs]) % p


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (5, 2), (3, 4), (5, 4)])
def test_norm_routes_agree_exhaustive(p, m):
    ctx = fc.ext_field_ctx(p, m)
    for a in ctx.iter_elements():
        assert fc.norm(a) == fc.norm_via_conjugates(a)


@pytest.mark.parametrize("p,m", [(3, 2), (3, 4), (2, 4)])
def test_frobenius_is_field_automorphism_exhaustive(p, m):
    """x -> x^p respects + and * and fixes exactly the prime subfield."""
    ctx = fc.ext_field_ctx(p, m)
    elems = list(ctx.iter_elements())
    frob = {a.coeffs: fc.frobenius(a, 1) for a in elems}
    for a in elems:
        for b in elems:
            assert frob[fc.ext_add(a, b).coeffs] == fc.ext_add(frob[a.coeffs], frob[b.coeffs])
            assert frob[fc.ext_mul(a, b).coeffs] == fc.ext_mul(frob[a.coeffs], frob[b.coeffs])
    fixed = [a for a in elems if frob[a.coeffs] == a]
    assert sorted(a.coeffs for a in fixed) == sorted(
        ctx.from_int(c).coeffs for c in range(p)
    )


@pytest.mark.parametrize("p,m", [(2, 2), (3, 2), (3, 3), (5, 2), (7, 2)])
def test_normal_element_exists(p, m):
    ctx = fc.ext_field_ctx(p, m)
    assert any(fc.is_normal_element(a) for a in ctx.iter_elements())


def test_frobenius_composes_to_identity():
    ctx = fc.ext_field_ctx(3, 4)
    rng = random.Random(7)
    elems = list(ctx.iter_elements())
    for _ in range(30):
        a = rng.choice(elems)
        b = a
        for _ in range(ctx.m):
            b = fc.frobenius(b, 1)
        assert b == a


def test_ext_pow_matches_repeated_mul():
    ctx = fc.ext_field_ctx(5, 2)
    a = ctx.element((2, 3))
    acc = ctx.one()
    for e in range(12):
        assert fc.ext_pow(a, e) == acc
        acc = fc.ext_mul(acc, a)
