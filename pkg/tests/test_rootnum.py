"""Root numbers of y^2 = x^3 + d n^2: analytic oracle, calibrated formula, sums."""
import random

import pytest

from cubictwists.rootnum import (
    NotCalibrated, RootNumberTable, analytic_root_number, calibrate_g_d,
    chi_m3, equidist_sum, f_d, get_table, level_set_decomposition, register_table, root_class,
    root_number, root_numbers_upto, squarefree_ap_count,
)


@pytest.fixture(scope="module")
def tables():
    out = {d: calibrate_g_d(d) for d in (16, -432)}
    for t in out.values():
        register_table(t)
    return out


@pytest.mark.parametrize("D,w", [(-432, 1), (1, 1), (-2, -1), (17, 1), (-432 * 36, -1),
                                 (-432 * 169, -1), (-432 * 9, 1), (16, 1), (-432 * 49, -1)])
def test_analytic_oracle(D, w):
    res = analytic_root_number(D, detail=True)
    assert res.w == w
    assert min(res.residual_plus, res.residual_minus) < 1e-8
    assert max(res.residual_plus, res.residual_minus) > 0.1


def test_f_d_and_classes():
    assert chi_m3(7) == 1 and chi_m3(5) == -1 and chi_m3(3) == 0
    # one factor chi(p) per prime with v_p(n) not divisible by 3
    assert f_d(16, 5) == -1 and f_d(16, 25) == -1 and f_d(16, 125) == 1 and f_d(16, 35) == -1
    assert f_d(16, 6) == 1
    assert root_class(16, 18) == (4, (1, 2))
    assert root_class(-432, 7) == (4, (0, 0))


def test_calibration(tables):
    for d, t in tables.items():
        assert len(t) == 27
        assert all(len(w) >= 4 for w in t.witnesses.values())
        assert max(n for ws in t.witnesses.values() for n, _ in ws) <= 1116
        assert set(t.entries.values()) <= {1, -1}


def test_table_json_round_trip(tables):
    t = tables[16]
    t2 = RootNumberTable.from_json(t.to_json())
    assert t2.entries == t.entries and t2.d == 16
    with pytest.raises(NotCalibrated):
        RootNumberTable(16).lookup(5)


def test_holdout_small(tables):
    rng = random.Random(0)
    for d in (16, -432):
        used = {n for ws in tables[d].witnesses.values() for n, _ in ws}
        for n in rng.sample([n for n in range(1, 1500) if n not in used], 25):
            assert root_number(d, n) == analytic_root_number(d * n * n)


def test_sign_symmetry(tables):
    assert all(root_number(16, n) == root_number(16, -n) for n in range(1, 50))


def test_sieve_matches_pointwise(tables):
    w = root_numbers_upto(-432, 5000)
    rng = random.Random(1)
    for n in rng.sample(range(1, 5001), 300):
        assert w[n] == root_number(-432, n)


def test_equidistribution_small(tables):
    s = equidist_sum(-432, 1, 0, 10 ** 4)
    assert abs(s) <= 3 * (10 ** 4) ** 0.75
    parts = [equidist_sum(-432, 4, r, 10 ** 4) for r in range(4)]
    assert sum(parts) == s
    # residues divisible by 3 carry essentially no bias
    assert abs(equidist_sum(-432, 9, 0, 10 ** 5)) / 10 ** 5 < 0.001


def test_squarefree_ap():
    c, m = squarefree_ap_count(0, 1, 10 ** 4)
    assert c == 6083 and m == pytest.approx(6079.27, abs=0.01)
    assert squarefree_ap_count(0, 4, 1000) == (0, 0.0)
    for x, y in ((1, 3), (2, 4), (3, 9)):
        c, m = squarefree_ap_count(x, y, 10 ** 5)
        if m:
            assert abs(c / m - 1) < 0.02
    with pytest.raises(ValueError):
        squarefree_ap_count(5, 3, 10)


def test_level_sets(tables):
    plus = level_set_decomposition(16, 2000, 1)
    minus = level_set_decomposition(16, 2000, -1)
    assert sum(c["count"] for c in plus.values()) + sum(c["count"] for c in minus.values()) == 2000


def test_not_calibrated():
    with pytest.raises(NotCalibrated):
        get_table(7)
