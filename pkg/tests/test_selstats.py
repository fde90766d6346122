"""2-Selmer counts from orbits, parity, and the 3-Selmer lower bound."""
import random
from fractions import Fraction

import pytest
import sympy

from cubictwists.forms_core import act, random_word, resultant_quartic
from cubictwists.localdata import AcceptableSet
from cubictwists.orbits import reducible_orbit_rep
from cubictwists.rootnum import calibrate_g_d, register_table
from cubictwists.selstats import (
    BudgetExceeded, GuardViolated, _charpoly, _kmul, a3_for_curve, average_sel2, curve_reports,
    descent_element, in_guard, is_square_K, parity_check, rank_proportion_report, read_csv,
    sel2_count, sel3_growth_sum, sel3_lower_bound, sel3_local_factors,
    selmer_local_triviality_average, tamagawa_ratio, write_csv,
)

# #Sel_2(E_{16,n}) for guard-set n < 70
SEL2_16 = {1: 1, 5: 1, 7: 2, 11: 1, 13: 2, 17: 2, 19: 4, 23: 1, 25: 1, 29: 1, 31: 2, 35: 2,
           37: 4, 41: 4, 43: 2, 47: 1, 49: 2, 53: 2, 55: 1, 59: 4, 61: 2, 65: 4, 67: 2}


@pytest.fixture(scope="module")
def reports70():
    register_table(calibrate_g_d(16))
    register_table(calibrate_g_d(-432))
    reps, skipped = curve_reports(16, 70)
    return reps, skipped


def test_frozen_sizes(reports70):
    reps, skipped = reports70
    got = {r.n: r.sel2_size for r in reps}
    assert {n: got[n] for n in SEL2_16} == SEL2_16
    assert all(got[n] == got[-n] for n in SEL2_16)
    assert skipped == sum(1 for n in range(-70, 71) if n and not in_guard(16, n))


def test_report_invariants(reports70):
    for r in reports70[0]:
        assert r.undecided == 0 and r.flags["stabilizer_trivial"] and r.flags["cubefree_ok"]
        assert r.sel2_size >= 1 and r.sel2_size & (r.sel2_size - 1) == 0
        assert r.weighted_count == r.sel2_size
        assert r.raw_orbit_count >= r.sel2_size


def test_parity(reports70):
    par = parity_check(16, reports70[0])
    assert par["checked"] == len(reports70[0]) and par["mismatches"] == []
    flipped = parity_check(16, reports70[0], flip=7)
    assert [m[0] for m in flipped["mismatches"]] == [7]


def test_sel2_count_single():
    r = sel2_count(16, 19)
    assert r.sel2_size == 4
    assert sel2_count(-432, 19).sel2_size == 4          # 3-isogenous curve
    with pytest.raises(GuardViolated):
        sel2_count(16, 6)
    with pytest.raises(BudgetExceeded):
        sel2_count(16, 10 ** 6 + 1, budget=10 ** 6)


def test_rank_one_witness_outside_guard():
    # (17/21, 37/21) on u^3 + v^3 = 6 forces a nontrivial class
    assert sel2_count(-432, 6, guard=False).sel2_size >= 2


def test_a3_for_curve():
    assert a3_for_curve(16, 5) == 5 and a3_for_curve(64, 5) == 10
    assert a3_for_curve(-432, -7) == -7 and a3_for_curve(-432 * 4, 3) == 6
    with pytest.raises(ValueError):
        a3_for_curve(2, 5)


def test_charpoly_matches_matrix():
    N = 432 * 25
    M = lambda x: sympy.Matrix([[x[0], N * x[2], N * x[1]], [x[1], x[0], N * x[2]],
                                [x[2], x[1], x[0]]])
    t = sympy.Symbol("t")
    for x in ((3, 1, 0), (1, -2, 5), (0, 0, 1)):
        assert sympy.Poly(M(x).charpoly(t).as_expr(), t).all_coeffs() == _charpoly(x, N)


def test_square_test():
    N = 432 * 49
    x = (2, -1, 3)
    assert is_square_K(_kmul(x, x, N), N)
    assert not is_square_K(x, N)
    assert is_square_K((Fraction(9, 4), 0, 0), N) and not is_square_K((3, 0, 0), N)


def test_descent_element_constant_on_orbits():
    rng = random.Random(0)
    n = 19
    N = 432 * n * n
    z0 = descent_element(resultant_quartic(reducible_orbit_rep(n)))
    assert is_square_K(z0, N)
    for _ in range(10):
        v = act(random_word(6, rng), reducible_orbit_rep(n))
        assert is_square_K(_kmul(z0, descent_element(resultant_quartic(v)), N), N)


def test_average_and_rank_report(reports70):
    reps = reports70[0]
    avg = average_sel2(16, reports=reps, X=70)
    assert sum(r.sel2_size for r in reps) / len(reps) == avg["final_average"]
    assert avg["checkpoints"][-1]["curves"] == len(reps)
    counts = [row["curves"] for row in avg["checkpoints"]]
    assert counts == sorted(counts)
    rk = rank_proportion_report(16, reps)
    row = rk["checkpoints"][-1]
    assert row["markov_ok"]
    assert row["global_rank0_floor_obs"] == pytest.approx(
        row["frac_trivial_given_plus"] * row["plus"] / (row["plus"] + row["minus"]))


def test_sigma_restriction():
    sigma = AcceptableSet.parse("2^2:1,default:all")
    reps, _ = curve_reports(16, 70, sigma)
    assert all(r.n % 4 == 1 for r in reps) and reps


def test_csv_round_trip(tmp_path, reports70):
    path = tmp_path / "sel2.csv"
    write_csv(path, 16, reports70[0], {r.n: 1 for r in reports70[0]})
    back = read_csv(path)
    assert {n: r.sel2_size for n, r in back.items()} == {r.n: r.sel2_size for r in reports70[0]}
    assert path.read_text().splitlines()[0].startswith("d,n,sel2,w,undecided,flags")


def test_local_triviality_small():
    res = selmer_local_triviality_average(-432, X=70)
    assert res["final_average"] >= 1
    reps, _ = curve_reports(-432, 70, with_local2=True, extra=lambda n: n % 2)
    assert all(1 <= r.local_trivial_2 <= r.sel2_size for r in reps)


def test_sel3_lower_bound():
    assert sel3_lower_bound(2, 1) == 1
    # 11 = 2 mod 3, 11 > 6 and (2/11) = -1
    assert sel3_lower_bound(2, 11) == 3
    # (2/17) = +1
    assert sel3_lower_bound(2, 17) == Fraction(1, 3)
    assert sel3_lower_bound(2, 11 * 17) == sel3_lower_bound(2, 11) * sel3_lower_bound(2, 17)
    assert sel3_lower_bound(2, 5) == 1                        # below the cutoff 3|d|
    assert sel3_lower_bound(2, 5, cutoff=3) == 3


def test_tamagawa_oracle():
    for d, n, p in ((2, 11, 11), (2, 17 * 7, 17), (5, 23 ** 2, 23), (-1, 29, 29)):
        assert sel3_local_factors(d, n)[p] == tamagawa_ratio(d, n, p)


def test_growth_series():
    g = sel3_growth_sum(2, 10 ** 5)
    assert g.xi == pytest.approx(4 / 3)
    assert g.sums == sorted(g.sums)
    assert abs(g.stabilization - 1) < 0.05
    assert sel3_growth_sum(-3, 10 ** 4).xi == 2          # -3d = 9
    assert sel3_growth_sum(4, 10 ** 4).xi == pytest.approx(2 / 3)
