"""Local densities of the quadric, local solubility, the archimedean volume."""
import math
import random
from fractions import Fraction

import pytest

from cubictwists.forms_core import BinaryQuartic
from cubictwists.localdata import (
    AcceptableSet, DegeneratePencil, LevelTooLarge, SampledDensity, _vp, archimedean_volume,
    density_product, density_report, dumps_reports, fundamental_domain_integral, has_root_Qp,
    irreducible_density_modp, is_locally_soluble_Qp, is_locally_soluble_R, is_square_Qp,
    jacobian_constant, jacobian_samples, main_term_constant, padic_quadric_density,
    quadric_count, quadric_count_bruteforce, quadric_count_histogram, selmer_local_mass,
    sl2_volume, uniformity_filter,
)


@pytest.mark.parametrize("p,expect", [(2, Fraction(17, 16)), (5, Fraction(629, 625)),
                                      (7, Fraction(2407, 2401)), (11, Fraction(14651, 14641)),
                                      (13, Fraction(28573, 28561))])
def test_density_level_one(p, expect):
    assert padic_quadric_density(p, 1) == expect
    assert quadric_count(p, 1) == p ** 7 + p ** 4 - p ** 3


def test_bruteforce_small():
    assert quadric_count_bruteforce(2) == quadric_count(2, 1)
    assert quadric_count_bruteforce(5) == quadric_count(5, 1)
    with pytest.raises(LevelTooLarge):
        quadric_count_bruteforce(17)


def test_three_adic_levels():
    assert padic_quadric_density(3, 1) == Fraction(11, 9)
    assert float(padic_quadric_density(3, 2)) == pytest.approx(1.230453, abs=1e-6)
    assert float(padic_quadric_density(3, 3)) == pytest.approx(1.2307575, abs=1e-7)


@pytest.mark.parametrize("q", [4, 8, 9])
def test_gauss_formula_against_histogram(q):
    p = 2 if q % 2 == 0 else 3
    k = round(math.log(q, p))
    assert quadric_count_histogram(q) == quadric_count(p, k)


def test_density_product_and_main_term():
    assert density_product(100, 2) == pytest.approx(1.33101, rel=1e-5)
    assert main_term_constant(100, 2) == pytest.approx(28.8116, rel=1e-5)


def test_conditional_density_exhaustive_and_sampled():
    # the condition r1 = 0, exhaustively and by sampling
    cond = lambda rows: rows[:, 0] == 0
    exact = padic_quadric_density(5, 1, cond)
    assert isinstance(exact, Fraction)
    est = padic_quadric_density(5, 1, cond, exhaustive=False, samples=100000, seed=3)
    assert isinstance(est, SampledDensity)
    assert abs(est.value - float(exact)) < 5 * est.stderr
    with pytest.raises(LevelTooLarge):
        padic_quadric_density(17, 1, cond, exhaustive=True)


def test_irreducible_density_exact():
    assert irreducible_density_modp(5) == Fraction(1, 2)
    assert irreducible_density_modp(7) == Fraction(1, 4)
    assert irreducible_density_modp(17, samples=200000) == pytest.approx(0.5, abs=0.005)


def test_real_solubility():
    assert is_locally_soluble_R(BinaryQuartic(1, 0, 0, 0, 1), 1)
    assert not is_locally_soluble_R(BinaryQuartic(1, 0, 0, 0, 1), -1)
    assert is_locally_soluble_R(BinaryQuartic(1, 0, -1, 0, 0), -1)


def test_square_Qp():
    assert is_square_Qp(17, 2) and not is_square_Qp(5, 2) and is_square_Qp(Fraction(1, 4), 2)
    assert is_square_Qp(4, 3) and not is_square_Qp(2, 3) and not is_square_Qp(3, 3)
    assert is_square_Qp(-1, 5) and not is_square_Qp(-1, 7)


def _brute_soluble(F, p, K):
    # a point (x : 1) or (1 : y) where F is a square up to O(p^K)
    need = 3 if p == 2 else 1
    for chart in (list(F), list(reversed(F))):
        for x in range(p ** K):
            gg = (((chart[0] * x + chart[1]) * x + chart[2]) * x + chart[3]) * x + chart[4]
            gd = ((4 * chart[0] * x + 3 * chart[1]) * x + 2 * chart[2]) * x + chart[3]
            if gg == 0 or (gd and _vp(gg, p) > 2 * _vp(gd, p)):
                return True
            g = gg % p ** K
            if g == 0:
                continue
            v = _vp(g, p)
            if v + need <= K - 1 and v % 2 == 0:
                u = g // p ** v
                if (p == 2 and u % 8 == 1) or (p > 2 and pow(u % p, (p - 1) // 2, p) == 1):
                    return True
    return False


@pytest.mark.parametrize("p,K", [(2, 11), (3, 7), (5, 5), (7, 5)])
def test_padic_solubility_oracle(p, K):
    rng = random.Random(5 + p)
    for _ in range(60):
        f = BinaryQuartic(*(rng.randint(-30, 30) for _ in range(5)))
        if f.disc == 0:
            continue
        tw = rng.choice([1, -1, 2, 3, -6])
        F = BinaryQuartic(*(tw * c for c in f))
        got = is_locally_soluble_Qp(f, tw, p)
        assert got == _brute_soluble(F, p, K), (f, tw)


def test_padic_solubility_errors():
    with pytest.raises(DegeneratePencil):
        is_locally_soluble_Qp((0, 0, 0, 0, 0), 1, 3)
    with pytest.raises(ValueError):
        is_locally_soluble_Qp((1, 2, 1, 0, 0), 1, 3)


def test_has_root_Qp():
    assert has_root_Qp((1, 0, 0, 0, -16), 2)            # x = 2
    assert not has_root_Qp((1, 0, 0, 0, -2), 2)
    assert has_root_Qp((1, 0, 0, 0, -17), 2)            # 17 = 1 mod 16 is a 4th power
    assert not has_root_Qp((1, 0, 0, 0, -9), 2)         # would need x^2 = 3 or -3
    assert has_root_Qp((0, 1, 0, 0, 3), 5)              # root at infinity
    # x^2 + 7 has a root in Q_2 (-7 = 1 mod 8), so (x^2 + 7)(x^2 + 1) does
    assert has_root_Qp((1, 0, 8, 0, 7), 2)
    assert not has_root_Qp((1, 0, 2, 0, 5), 3)          # x^2 + 1 +- 2i: no roots mod 3


def test_archimedean_volume():
    assert fundamental_domain_integral() == pytest.approx(math.pi / 6, abs=1e-14)
    assert fundamental_domain_integral(12) == pytest.approx(math.pi / 6, abs=1e-14)
    assert sl2_volume() == pytest.approx(math.pi ** 2 / 6, abs=1e-13)
    assert archimedean_volume() == pytest.approx(2 * math.pi ** 4 / 9, abs=1e-12)


def test_jacobian_constant():
    assert jacobian_constant("shift") == 4
    assert jacobian_constant("scaled") == 4
    assert all(abs(v - 4) < 1e-8 for v in jacobian_samples())


def test_small_local_factors():
    assert selmer_local_mass(2) == 2 and selmer_local_mass(5) == 1
    assert selmer_local_mass("inf") == Fraction(1, 2) == selmer_local_mass(math.inf)
    w3 = uniformity_filter(3)
    assert w3(18) and not w3(6)


def test_acceptable_set():
    s = AcceptableSet.parse("2^2:1|3,3:1|2,default:v<=1")
    assert str(s) == "2^2:1|3,3:1|2,default:v<=1"
    assert AcceptableSet.parse(str(s)) == s
    assert 7 in s and 35 in s
    assert 2 not in s and 3 not in s and 49 not in s and 0 not in s
    assert s.local_density(2) == Fraction(1, 2)
    assert s.local_density(5) == Fraction(24, 25)
    everything = AcceptableSet.parse("default:all")
    assert 8 in everything and everything.local_density(7) == 1
    with pytest.raises(ValueError):
        AcceptableSet.parse("4:1")


def test_density_report_json():
    reps = density_report([2, 5, "inf"], level=1)
    text = dumps_reports(reps)
    assert '"density_num": 17' in text and '"density_den": 16' in text
    assert reps[-1].place == "inf" and not reps[-1].exact
