"""Reduced quartics, canonical keys and orbit counts on the quadric A1 = 0."""
import itertools
import random

import pytest

from cubictwists.forms_core import (
    BinaryQuartic, CubicPair, a1_invariant, a3_invariant, act, random_word, reduced_covariant,
)
from cubictwists.orbits import (
    Equivalence, NotOnQuadric, OrbitInventory, ZeroInvariant, canonical_key, canonical_quartic,
    count_orbits, enumerate_quadric_points, equivalent, label_of, lattice_basis, pair_from_label,
    quartic_automorphisms, reduce_to_canonical, reduced_quartics, reducible_orbit_rep,
    sublattice_labels,
)


@pytest.fixture(scope="module")
def inv300():
    return count_orbits(300)


def test_counts_frozen(inv300):
    n_irr, n_red, inv = inv300
    assert (n_irr, n_red) == (2368, 3252)
    assert len(inv) == n_irr + n_red == 5620


def test_fast_path_matches_inventory(inv300):
    n_irr, n_red, _ = count_orbits(300, build_inventory=False)
    assert (n_irr, n_red) == inv300[:2]


def test_inventory_invariants(inv300):
    by = inv300[2].by_invariant()
    assert set(by) == {a for a in range(-300, 301) if a}
    for a3, rows in by.items():
        for key, rep, flags in rows:
            assert a1_invariant(rep) == 0 and a3_invariant(rep) == a3
            assert ("red" in flags) != ("irr" in flags)
    # n and -n have the same number of orbits (det -1 symmetry)
    assert all(len(by[a]) == len(by[-a]) for a in range(1, 301))


def test_small_box_points_are_covered():
    _, _, inv = count_orbits(30)
    keys = set(inv.entries)
    rng = random.Random(1)
    pts = []
    for v in itertools.product(range(-2, 3), repeat=8):
        if a1_invariant(v) == 0:
            a3 = a3_invariant(v)
            if a3 and abs(a3) <= 30:
                pts.append(CubicPair(*v))
    for v in rng.sample(pts, 600):
        k = canonical_key(v)
        assert k in keys
        assert canonical_key(act(random_word(12, rng), v)) == k
        r = reduce_to_canonical(v)
        assert reduce_to_canonical(r) == r


def test_reducible_rep_is_reducible(inv300):
    inv = inv300[2]
    for n in (1, -7, 120):
        key = canonical_key(reducible_orbit_rep(n))
        assert "red" in inv.entries[key][2]


def test_reduced_quartics_have_I_zero():
    rows = reduced_quartics(200)
    for row in rows[:2000]:
        g = BinaryQuartic(*map(int, row))
        assert g.I == 0 and g.J % 108 == 0 and 0 < abs(g.J // 108) <= 200


def test_canonical_quartic_is_class_invariant():
    rng = random.Random(5)
    g = reduced_covariant(reducible_orbit_rep(5))
    gc, _ = canonical_quartic(g)
    for _ in range(30):
        m = random_word(5, rng)[1]
        assert canonical_quartic(g.compose(m))[0] == gc


def test_sublattice_labels_sigma():
    assert len(sublattice_labels(1)) == 1
    assert len(sublattice_labels(6)) == 1 + 2 + 3 + 6
    assert len(sublattice_labels(4)) == 7


def test_label_round_trip():
    g = reduced_covariant(CubicPair(0, 0, 2, 0, 2, 0, 0, 8))
    gc, _ = canonical_quartic(g)
    _, _, m = lattice_basis(BinaryQuartic(*gc))
    for lab in sublattice_labels(m):
        assert label_of(pair_from_label(gc, lab), gc) == lab


def test_no_automorphisms_at_small_height(inv300):
    gs = {key[0] for key in inv300[2].entries}
    assert not any(quartic_automorphisms(BinaryQuartic(*g)) for g in gs)


def test_equivalent():
    v = reducible_orbit_rep(7)
    w = act(random_word(8, random.Random(0)), v)
    assert equivalent(v, w) == Equivalence.YES
    assert equivalent(v, w, depth=8) == Equivalence.YES
    assert equivalent(v, reducible_orbit_rep(-7)) == Equivalence.NO


def test_errors():
    with pytest.raises(NotOnQuadric):
        canonical_key(CubicPair(1, 0, 0, 0, 0, 0, 0, 1))
    with pytest.raises(ZeroInvariant):
        reducible_orbit_rep(0)


def test_enumerate_matches_count():
    pts = list(enumerate_quadric_points(60))
    n_irr, n_red, _ = count_orbits(60)
    assert len(pts) == n_irr + n_red


def test_dump_load_deterministic(tmp_path):
    _, _, inv = count_orbits(50)
    a, b = tmp_path / "a.txt", tmp_path / "b.txt"
    inv.dump(a)
    OrbitInventory.load(a).dump(b)
    assert a.read_text() == b.read_text()
