from fractions import Fraction

import pytest

from mmwb.mapcount import census
from mmwb.ncpoly import Monomial, Polynomial, Potential
from mmwb.sdsolve import (DegreeCapExceeded, LaurentN, MomentBoundViolation,
                          NoConvergence, SolverConfig, canonical_monomials,
                          moments_vs_maps, solve, wick_finite_N)


def mono(*letters):
    return Monomial(letters)


def catalan(k):
    from math import comb

    return comb(2 * k, k) // (k + 1)


def quartic(value=None):
    return Potential([("t", value, mono(1, 1, 1, 1))], m=1)


def two_color(t=None, b=None):
    return Potential([("t", t, mono(1, 1, 1, 1)), ("t", t, mono(2, 2, 2, 2)),
                      ("b", b, mono(1, 2))], m=2)


def test_free_moments_are_catalan():
    st = solve(Potential.zero(m=1), SolverConfig(order=0, max_degree=12))
    for k in range(1, 7):
        assert st.moment_series(mono(*([1] * (2 * k)))).constant_coefficient == catalan(k)
    assert st.moment_series(mono(1, 1, 1)).constant_coefficient == 0


def test_free_moments_two_colors():
    st = solve(Potential.zero(m=2), SolverConfig(order=0, max_degree=4))
    assert st.moment_series(mono(1, 2, 1, 2)).constant_coefficient == 0
    assert st.moment_series(mono(1, 2, 2, 1)).constant_coefficient == 1


def test_quartic_series_first_orders():
    st = solve(quartic(), SolverConfig(order=3, max_degree=4))
    s = st.moment_series(mono(1, 1))
    assert s.coefficient((0,)) == 1
    assert s.coefficient((1,)) == -8
    # the order-one coefficient equals the census of a 4-star plus a 2-star
    assert s.coefficient((1,)) == -census([mono(1, 1, 1, 1), mono(1, 1)]).genus_count(0)


def test_series_populates_and_checks_invariants():
    st = solve(two_color(), SolverConfig(order=2, max_degree=4))
    assert st.values[mono()] .constant_coefficient == 1
    assert set(st.values) == set(canonical_monomials(2, 4))
    report = st.check_invariants()
    assert all(report.values()), report


def test_sd_residual_is_zero_in_series_mode():
    st = solve(two_color(), SolverConfig(order=2, max_degree=3))
    for w in canonical_monomials(2, 3):
        for i in (1, 2):
            assert not st.sd_residual(w, i), (w, i)


def test_numeric_solver_matches_free_moments():
    st = solve(Potential.zero(m=1),
               SolverConfig(mode="numeric", max_degree=12, tol=1e-13))
    for k in range(1, 7):
        assert abs(st.moment(mono(*([1] * (2 * k)))) - catalan(k)) < 1e-9


def test_numeric_vs_series_agreement():
    # The order-4 truncation constants c5 reach 1.6e8 for x1^6, so the 1e-6
    # comparison needs c5 t^5 small enough: t = 0.001.
    t = 0.001
    pot = quartic(t)
    series_state = solve(pot, SolverConfig(order=4, max_degree=6))
    numeric_state = solve(pot, SolverConfig(mode="numeric", max_degree=6,
                                            tol=1e-14, buffer_orders=5))
    for w in (mono(1, 1), mono(1, 1, 1, 1), mono(*([1] * 6))):
        series_val = series_state.moment_series(w).evaluate({"t": t})
        assert abs(series_val - numeric_state.moment(w)) < 1e-6, w


def test_numeric_residual_below_tolerance():
    pot = quartic(0.01)
    st = solve(pot, SolverConfig(mode="numeric", max_degree=6, tol=1e-13))
    for w in canonical_monomials(1, 5):
        assert abs(st.sd_residual(w, 1)) < 1e-10


def test_numeric_no_convergence_outside_regime():
    with pytest.raises((NoConvergence, MomentBoundViolation)):
        solve(quartic(-0.4),
              SolverConfig(mode="numeric", max_degree=8, max_iter=400))


def test_numeric_degree_cap():
    st = solve(quartic(0.01), SolverConfig(mode="numeric", max_degree=4))
    with pytest.raises(DegreeCapExceeded):
        st.moment(mono(*([1] * 40)))


def test_moment_of_polynomial_is_linear():
    st = solve(Potential.zero(m=1), SolverConfig(order=0, max_degree=6))
    p = Polynomial({mono(1, 1): Fraction(3), mono(1, 1, 1, 1): Fraction(-1)})
    assert st.moment(p).constant_coefficient == 3 * 1 - 2


def test_wick_examples():
    assert wick_finite_N(mono(1, 1)) == 1
    assert wick_finite_N(mono(1, 1, 1, 1)) == LaurentN({0: 2, -2: 1})
    assert wick_finite_N(mono(1, 2)) == 0
    assert wick_finite_N(mono(1, 1, 1)) == 0
    # two colors: free cumulants see only the color pattern
    assert wick_finite_N(mono(1, 2, 2, 1)) == LaurentN({0: 1})
    assert wick_finite_N(mono(1, 2, 1, 2)) == LaurentN({-2: 1})


def test_wick_matches_census_stratification():
    for k in range(1, 6):
        w = mono(*([1] * (2 * k)))
        rhs = LaurentN({-2 * g: c for g, c in census([w]).counts.items()})
        assert wick_finite_N(w) == rhs


def test_wick_limit_is_free_moment():
    st = solve(Potential.zero(m=2), SolverConfig(order=0, max_degree=6))
    for w in (mono(1, 1, 2, 2), mono(1, 2, 1, 2), mono(*([1] * 6))):
        lim = wick_finite_N(w).coeffs.get(0, 0)
        assert lim == st.moment_series(w).constant_coefficient


def test_moments_vs_maps_quartic():
    rep = moments_vs_maps(quartic(), mono(1, 1), 2)
    assert rep.passed and rep.first_mismatch is None
    rep = moments_vs_maps(Potential.zero(m=1), mono(*([1] * 6)), 0)
    assert rep.passed
    assert rep.lhs.constant_coefficient == 5


def test_moments_vs_maps_two_colors():
    rep = moments_vs_maps(two_color(), mono(1, 2), 2)
    assert rep.passed, rep.first_mismatch
