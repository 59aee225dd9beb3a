from fractions import Fraction
from math import comb, factorial

import pytest

from mmwb.mapcount import (CensusCapExceeded, GenusCensus, PairedDiagram,
                           Star, census, census_series, genus, is_connected,
                           labeled_count, one_star_genus1, star_from_monomial,
                           two_star_planar)
from mmwb.ncpoly import Monomial, Potential


def mono(*letters):
    return Monomial(letters)


def brute_connected_matchings(stars):
    """Independent oracle: enumerate matchings with itertools, count the
    connected ones without any face bookkeeping."""
    slots = []
    for si, s in enumerate(stars):
        slots.extend((si, c) for c in s)
    n = len(slots)

    def matchings(free):
        if not free:
            yield []
            return
        a = free[0]
        for idx in range(1, len(free)):
            b = free[idx]
            if slots[a][1] == slots[b][1]:
                rest = [x for x in free[1:] if x != b]
                for tail in matchings(rest):
                    yield [(a, b)] + tail

    count = 0
    for match in matchings(list(range(n))):
        parent = list(range(len(stars)))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for a, b in match:
            ra, rb = find(slots[a][0]), find(slots[b][0])
            if ra != rb:
                parent[ra] = rb
        if len({find(i) for i in range(len(stars))}) == 1:
            count += 1
    return count


def test_star_from_monomial():
    s = star_from_monomial(mono(1, 2))
    assert s.half_edges == ((0, 1), (1, 2))
    assert star_from_monomial(mono(1, 1, 1, 1)).size == 4
    assert star_from_monomial(mono(2, 1, 2)).half_edges == ((0, 2), (1, 1), (2, 2))
    with pytest.raises(ValueError):
        star_from_monomial(mono())


def test_genus_examples():
    one = PairedDiagram([Star(mono(1, 1))], [(0, 1)])
    assert genus(one) == 0
    crossing = PairedDiagram([Star(mono(1, 1, 1, 1))], [(0, 2), (1, 3)])
    assert genus(crossing) == 1
    parallel = PairedDiagram([Star(mono(1, 1)), Star(mono(1, 1))],
                             [(0, 2), (1, 3)])
    assert genus(parallel) == 0
    disconnected = PairedDiagram([Star(mono(1, 1)), Star(mono(1, 1))],
                                 [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        genus(disconnected)


def test_is_connected():
    single = PairedDiagram([Star(mono(1, 1, 1, 1))], [(0, 1), (2, 3)])
    assert is_connected(single)
    two_self = PairedDiagram([Star(mono(1, 1)), Star(mono(1, 1))],
                             [(0, 1), (2, 3)])
    assert not is_connected(two_self)
    crossed = PairedDiagram([Star(mono(1, 1)), Star(mono(1, 1))],
                            [(0, 2), (1, 3)])
    assert is_connected(crossed)


def test_diagram_validation():
    with pytest.raises(ValueError):
        PairedDiagram([Star(mono(1, 2))], [(0, 1)])  # colors differ
    with pytest.raises(ValueError):
        PairedDiagram([Star(mono(1, 1))], [(0, 0)])


def test_census_one_quartic_star():
    c = census([mono(1, 1, 1, 1)])
    assert c.counts == {0: 2, 1: 1}
    assert census([mono(1, 2)]).counts == {}


def test_census_catalan_and_totals():
    for k in range(1, 7):
        c = census([mono(*([1] * (2 * k)))])
        assert c.genus_count(0) == comb(2 * k, k) // (k + 1)
        assert c.total_matchings == factorial(2 * k) // (2 ** k * factorial(k))


def test_census_total_matches_independent_connected_count():
    cases = [
        [mono(1, 1, 1, 1), mono(1, 1)],
        [mono(1, 2), mono(2, 1)],
        [mono(1, 1, 2, 2), mono(1, 2)],
        [mono(1, 1), mono(1, 1), mono(1, 1)],
    ]
    for stars in cases:
        c = census(stars)
        assert c.total == brute_connected_matchings(stars)


def test_census_kernel_agrees_with_diagram_oracle():
    """Every matching of two small star lists, genus checked per diagram."""
    for stars in ([mono(1, 1, 1, 1), mono(1, 1)], [mono(1, 2), mono(1, 2)]):
        slots = []
        for si, s in enumerate(stars):
            slots.extend((si, c) for c in s)
        n = len(slots)
        star_objs = [Star(s) for s in stars]
        counts = {}

        def rec(free, acc):
            if not free:
                d = PairedDiagram(star_objs, acc)
                if is_connected(d):
                    g = genus(d)
                    counts[g] = counts.get(g, 0) + 1
                return
            a = free[0]
            for b in free[1:]:
                if slots[a][1] == slots[b][1]:
                    rec([x for x in free[1:] if x != b], acc + [(a, b)])

        rec(list(range(n)), [])
        assert GenusCensus(counts) == census(stars)


def test_census_color_symmetry():
    base = [mono(1, 1, 2, 2), mono(2, 1)]
    swapped = [mono(2, 2, 1, 1), mono(1, 2)]
    assert census(base).counts == census(swapped).counts


def test_census_cap():
    with pytest.raises(CensusCapExceeded):
        census([mono(*([1] * 22))])
    with pytest.raises(CensusCapExceeded):
        census([mono(*([1] * 12))], cap=10)


def quartic(value=None):
    return Potential([("t", value, mono(1, 1, 1, 1))], m=1)


def two_color():
    return Potential([("t", None, mono(1, 1, 1, 1)), ("t", None, mono(2, 2, 2, 2)),
                      ("b", None, mono(1, 2))], m=2)


def test_two_star_planar_anchors():
    V0 = Potential.zero(m=1)
    assert two_star_planar(mono(1, 1), mono(1, 1), V0, 0).constant_coefficient == 2
    assert two_star_planar(mono(1, 1, 1, 1), mono(1, 1, 1, 1), V0, 0).constant_coefficient == 36
    V0m2 = Potential.zero(m=2)
    assert two_star_planar(mono(1), mono(2), V0m2, 0) == 0
    with pytest.raises(ValueError):
        two_star_planar(mono(), mono(1), V0, 0)


def test_two_star_recursion_equals_census():
    pot = quartic()
    for pair, kmax in (((1, 1), 3), ((1, 1, 1), 2), ((1, 1, 1, 1), 2)):
        a = mono(*pair)
        series = two_star_planar(a, a, pot, kmax)
        for k in range(kmax + 1):
            stars = [a, a] + [mono(1, 1, 1, 1)] * k
            if sum(s.degree for s in stars) > 16:
                continue
            expected = Fraction((-1) ** k * census(stars).genus_count(0),
                                factorial(k))
            assert series.coefficient((k,)) == expected, (pair, k)


def test_two_star_recursion_equals_census_two_colors():
    pot = two_color()
    a = mono(1, 2)
    series = two_star_planar(a, a, pot, 2)
    # label indices fold (k_t, k_b); spot-check against explicit censuses
    assert series.coefficient((0, 0)) == census([a, a]).genus_count(0)
    assert series.coefficient((0, 1)) == -census([a, a, mono(1, 2)]).genus_count(0)
    mixed = (Fraction(census([a, a, mono(1, 1, 1, 1)]).genus_count(0))
             + Fraction(census([a, a, mono(2, 2, 2, 2)]).genus_count(0)))
    assert series.coefficient((1, 0)) == -mixed


def test_genus1_recursion_equals_census():
    pot = quartic()
    for word, kmax in (((1, 1), 2), ((1, 1, 1, 1), 2), ((1, 1, 1, 1, 1, 1), 1)):
        q = mono(*word)
        series = one_star_genus1(q, pot, kmax)
        for k in range(kmax + 1):
            stars = [q] + [mono(1, 1, 1, 1)] * k
            expected = Fraction((-1) ** k * census(stars).genus_count(1),
                                factorial(k))
            assert series.coefficient((k,)) == expected, (word, k)
    assert one_star_genus1(mono(1, 1), pot, 0) == 0


def test_genus1_anchor_against_spec_example():
    pot = quartic()
    series = one_star_genus1(mono(1, 1), pot, 1)
    assert series.coefficient((1,)) == -census([mono(1, 1), mono(1, 1, 1, 1)]).genus_count(1)


def test_census_series_and_labeled_count():
    pot = quartic()
    s = census_series(pot, 2, 0)
    assert s.coefficient((1,)) == -2
    assert s.coefficient((2,)) == 18
    assert labeled_count(s, pot, (2,)) == 36
    extra = census_series(pot, 1, 0, extra_stars=[mono(1, 1)])
    assert extra.coefficient((0,)) == 1
    assert extra.coefficient((1,)) == -8
