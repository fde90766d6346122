"""Mordell curves y^2 = x^3 + D: Tate's algorithm, traces, point search."""
import random
from fractions import Fraction

import pytest
import sympy

from cubictwists.curves import (
    BadReduction, MordellCurve, _is_torsion, ap_trace, conductor, curve_report,
    dumps_curve_report, good_reduction_at_2, local_data, rational_point_search, sixth_power_free,
    tate, two_descent_local_size, torsion_two,
)


@pytest.mark.parametrize("D,N", [(1, 36), (-1, 144), (2, 1728), (-2, 1728), (3, 3888), (-3, 972),
                                 (4, 108), (16, 27), (-432, 27), (-27, 36), (80, 225)])
def test_conductors(D, N):
    assert conductor(D) == N


def test_conductor_invariant_under_sixth_powers():
    for D in (5, -7, 12):
        assert conductor(D * 64) == conductor(D) == conductor(D * 729)


def test_sixth_power_free():
    assert sixth_power_free(64 * 5) == (5, 2)
    assert sixth_power_free(-432 * 36) == (-243, 2)          # -2^6 3^5


def test_good_reduction_at_2_matches_tate():
    rng = random.Random(0)
    for _ in range(300):
        d = rng.choice([16, -432, 1, 2, 5])
        n = rng.randint(1, 500)
        D = sixth_power_free(d * n * n)[0]
        assert good_reduction_at_2(d, n) == (local_data(D, 2).fp == 0)


def test_tate_agrees_with_table_for_large_p():
    rng = random.Random(1)
    for _ in range(200):
        D = rng.randint(-10 ** 6, 10 ** 6) or 1
        for p in sympy.primefactors(abs(D)):
            if p >= 5:
                local_data(D, p)   # raises InternalDisagreement on mismatch


def test_kodaira_examples():
    assert local_data(5 * 7 ** 2, 7).kodaira == "IV"
    assert local_data(5 * 7 ** 4, 7).kodaira == "IV*"
    assert local_data(5 * 7 ** 3, 7).kodaira == "I0*"
    assert local_data(3 * 7 ** 2, 7).cp == 1 and local_data(2 * 7 ** 2, 7).cp == 3


def _count_points(D, p):
    sq = {}
    for y in range(p):
        sq[y * y % p] = sq.get(y * y % p, 0) + 1
    return 1 + sum(sq.get((x ** 3 + D) % p, 0) for x in range(p))


def test_ap_trace():
    assert [ap_trace(1, p) for p in (7, 13, 19)] == [-4, 2, 8]
    rng = random.Random(2)
    for _ in range(60):
        D = rng.randint(-1000, 1000) or 5
        p = int(sympy.prime(rng.randint(3, 150)))
        if D % p == 0:
            continue
        a = ap_trace(D, p)
        assert a == p + 1 - _count_points(D, p)
        assert a * a <= 4 * p
        if p % 3 == 2:
            assert a == 0
    with pytest.raises(BadReduction):
        ap_trace(7, 7)
    with pytest.raises(BadReduction):
        ap_trace(5, 3)


def _e_mod_2e(D, p):
    # E(F_p) / 2 E(F_p) has size #E(F_p)[2] for odd p of good reduction
    return 1 + sum(1 for x in range(p) if (x ** 3 + D) % p == 0)


def test_two_descent_local_size():
    for p in sympy.primerange(5, 50):
        for D in (1, 2, 3, -5, 11, 17):
            if D % p:
                assert two_descent_local_size(D, p) == _e_mod_2e(D, p)


def test_torsion_two():
    assert torsion_two(1) == 2 and torsion_two(2) == 1 and torsion_two(-8) == 2
    assert _is_torsion((Fraction(8), Fraction(24)), 64)
    assert _is_torsion((Fraction(12), Fraction(-36)), -432)
    assert not _is_torsion((Fraction(28), Fraction(-80)), -432 * 36)


def test_point_search_witnesses():
    p6 = rational_point_search(-432, 6, 50)
    assert p6.model == "cubic" and p6.coords == (Fraction(17, 21), Fraction(37, 21))
    assert p6.weierstrass == (28, -80)
    p13 = rational_point_search(-432, 13, 50)
    assert set(p13.coords) == {Fraction(2, 3), Fraction(7, 3)}
    u, v = p13.coords
    assert u ** 3 + v ** 3 == 13
    x, y = p13.weierstrass
    assert y * y == x ** 3 - 432 * 13 ** 2


def test_point_search_none_for_rank_zero():
    assert rational_point_search(-432, 1, 50) is None
    assert rational_point_search(-432, 3, 50) is None
    assert rational_point_search(16, 1, 50) is None


def test_curve_report():
    E = MordellCurve(16, 5)
    assert E.D == 400 and E.conductor() == conductor(400)
    rep = curve_report(-432, 6)
    assert rep["conductor"] == conductor(-432 * 36)
    assert all(b["fp"] > 0 for b in rep["bad_primes"])
    assert '"Dmin"' in dumps_curve_report(-432, 6)


def test_tate_minimal_model_scaling():
    # y^2 = x^3 + 2^6 * 5 is not minimal at 2
    kod, fp, cp, model = tate((0, 0, 0, 0, 64 * 5), 2)
    assert (kod, fp, cp) == (local_data(5, 2).kodaira, local_data(5, 2).fp, local_data(5, 2).cp)
