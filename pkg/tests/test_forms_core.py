"""Invariants, covariants and the group action on pairs of binary cubics."""
import random
from fractions import Fraction

import pytest
import sympy

from cubictwists.forms_core import (
    GENERATORS, KAPPA_F, KAPPA_G, BinaryQuartic, CubicPair, a1_invariant,
    a3_invariant, act, classical_invariants, is_reducible, jacobian_covariant,
    quartic_has_rational_root, random_word, read_pairs, reduced_covariant, resultant_quartic,
)


def v_n(n):
    return CubicPair(0, 0, 1, 0, 1, 0, 0, n)


@pytest.mark.parametrize("n", [1, -1, 2, 6, -13, 10 ** 6 + 3])
def test_reducible_representative(n):
    assert a1_invariant(v_n(n)) == 0
    assert a3_invariant(v_n(n)) == n


def test_kappa_calibration():
    v1 = v_n(1)
    assert jacobian_covariant(v1).J == 54 * KAPPA_G
    f = resultant_quartic(v1)
    assert f.I == 0 and f.J == KAPPA_F


def test_v6_quartic():
    f = resultant_quartic(v_n(6))
    assert tuple(f) == (0, -4, 0, 0, 36)
    assert classical_invariants(v_n(6)) == (1296, -559872)


def test_reduced_covariant_is_ninth():
    rng = random.Random(0)
    for _ in range(50):
        v = CubicPair(*(rng.randint(-20, 20) for _ in range(8)))
        assert tuple(jacobian_covariant(v)) == tuple(9 * c for c in reduced_covariant(v))


def test_invariance_under_words():
    rng = random.Random(1)
    for _ in range(200):
        v = CubicPair(*(rng.randint(-9, 9) for _ in range(8)))
        g = random_word(rng.randint(1, 10), rng)
        w = act(g, v)
        assert a1_invariant(w) == a1_invariant(v)
        assert a3_invariant(w) == a3_invariant(v)


def test_action_is_a_left_action():
    rng = random.Random(2)
    v = CubicPair(1, -2, 3, 0, 2, 1, -1, 4)
    for _ in range(20):
        g, h = random_word(4, rng), random_word(4, rng)
        assert act(g * h, v) == act(g, act(h, v))


def test_generators_closed_under_inverse():
    assert all(g.inverse() in GENERATORS for g in GENERATORS)


def test_quartic_relations_on_quadric():
    # points with A1 = 0 built from v_n under random words
    rng = random.Random(3)
    for n in (1, 5, -7, 30):
        for _ in range(10):
            v = act(random_word(6, rng), v_n(n))
            f = resultant_quartic(v)
            assert f.I == 0
            assert f.J == KAPPA_F * n * n
            assert f.disc == Fraction(-KAPPA_F ** 2 * n ** 4, 27) == -6912 * n ** 4


def test_quartic_compose_matches_substitution():
    x, y = sympy.symbols("x y")
    f = BinaryQuartic(3, -1, 4, 1, -5)
    m = (2, 1, 1, 1)
    X, Y = m[0] * x + m[2] * y, m[1] * x + m[3] * y
    expr = sympy.expand(sum(c * X ** (4 - j) * Y ** j for j, c in enumerate(f)))
    poly = sympy.Poly(expr, x, y)
    expect = [poly.coeff_monomial(x ** (4 - j) * y ** j) for j in range(5)]
    assert list(f.compose(m)) == expect


def _rational_root_oracle(f):
    if f[0] == 0:
        return True
    x = sympy.Symbol("x")
    p = sympy.Poly(list(f), x)
    return any(g.degree() == 1 for g, _ in p.factor_list()[1])


def test_rational_root_against_factorization():
    rng = random.Random(4)
    for _ in range(400):
        f = BinaryQuartic(*(rng.randint(-50, 50) for _ in range(5)))
        if rng.random() < 0.3:
            # force a rational root p/q
            p, q = rng.randint(-6, 6), rng.randint(1, 6)
            cub = [rng.randint(-9, 9) for _ in range(4)]
            f = BinaryQuartic(*[a - b for a, b in zip([q * c for c in cub] + [0], [0] + [p * c for c in cub])])
        if not any(f):
            continue
        assert quartic_has_rational_root(f) == _rational_root_oracle(f), f


def test_is_reducible_on_v_n():
    assert is_reducible(v_n(7))


def test_parse_and_read_pairs():
    v = CubicPair.parse("0 0 1 0 1 0 0 6")
    assert str(v) == "0 0 1 0 1 0 0 6"
    assert list(read_pairs(["# header", "", "1 2 3 4 5 6 7 8"])) == [CubicPair(1, 2, 3, 4, 5, 6, 7, 8)]
    with pytest.raises(ValueError):
        CubicPair.parse("1 2 3")
