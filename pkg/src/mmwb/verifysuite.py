"""Cross-validation battery behind the ``verify`` command.

Quick level runs the exact, symbolic checks (map counts against moments,
variance against two-star counts, operator identities, free-energy against
censuses, the finite-N Wick identity).  Full level adds Monte Carlo sanity
runs at desk scale.  Every check returns a dict with a name, a pass flag
and a human-readable detail string; randomness flows from one seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .fluctuation import OperatorContext, VectorPolynomial
from .freeenergy import thermo_reference
from .mapcount import census, two_star_planar
from .ncpoly import (Monomial, Polynomial, Potential, cyclic_derivative,
                     partial, pi, sigma)
from .sdsolve import (LaurentN, SolverConfig, moments_vs_maps, solve,
                      wick_finite_N)

X = lambda i: Monomial((i,))  # noqa: E731


def _poly(mono, c=1):
    return Polynomial.from_monomial(Monomial(mono), c)


def _rand_poly(rng, m, max_deg, n_terms=4):
    terms = {}
    for _ in range(n_terms):
        d = rng.randint(1, max_deg)
        mono = Monomial(tuple(rng.randint(1, m) for _ in range(d)))
        terms[mono] = terms.get(mono, 0) + Fraction(rng.randint(-3, 3))
    return Polynomial(terms)


def quartic_potential(value=None):
    return Potential([("t", value, Monomial((1, 1, 1, 1)))], m=1)


def two_color_potential(t=None, b=None):
    return Potential([("t", t, Monomial((1, 1, 1, 1))),
                      ("t", t, Monomial((2, 2, 2, 2))),
                      ("b", b, Monomial((1, 2)))], m=2)


def check_catalan(kmax=5):
    from math import comb, factorial

    details = []
    ok = True
    for k in range(1, kmax + 1):
        c = census([Monomial((1,) * (2 * k))])
        catalan = comb(2 * k, k) // (k + 1)
        dfact = factorial(2 * k) // (2 ** k * factorial(k))
        good = c.genus_count(0) == catalan and c.total_matchings == dfact
        ok = ok and good
        details.append(f"2k={2 * k}: g0={c.genus_count(0)} (catalan {catalan})")
    return {"name": "one-star planar counts", "passed": ok,
            "detail": "; ".join(details)}


def check_harer_zagier(kmax=4):
    ok = True
    details = []
    for k in range(1, kmax + 1):
        mono = Monomial((1,) * (2 * k))
        lhs = wick_finite_N(mono)
        rhs = LaurentN({-2 * g: c for g, c in census([mono]).counts.items()})
        good = lhs == rhs
        ok = ok and good
        details.append(f"k={k}: {lhs}")
    return {"name": "finite-N Wick vs genus census", "passed": ok,
            "detail": "; ".join(details)}


def check_moments_vs_maps(order=2):
    ok = True
    details = []
    for pot, queries in ((quartic_potential(), [X(1) ** 2, X(1) ** 4]),
                         (two_color_potential(),
                          [X(1) ** 2, Monomial((1, 2)), Monomial((1, 1, 2, 2))])):
        mu = solve(pot, SolverConfig(mode="series", order=order, max_degree=4))
        for q in queries:
            rep = moments_vs_maps(pot, q, order, mu=mu)
            ok = ok and rep.passed
            details.append(f"{pot!r} {q}: {'ok' if rep.passed else rep.first_mismatch}")
    return {"name": "moments vs planar censuses", "passed": ok,
            "detail": "; ".join(details)}


def check_variance_identity(seed=0, trials=6, order=2):
    rng = random.Random(seed)
    ok = True
    for pot in (quartic_potential(), two_color_potential()):
        ctx = OperatorContext.for_potential(pot, order=order)
        for _ in range(trials):
            P = pi(_rand_poly(rng, pot.m, 4))
            Q = pi(_rand_poly(rng, pot.m, 4))
            lhs = ctx.sigma2(ctx.xi(P), Q)
            rhs = ctx._const(0)
            for i in range(1, pot.m + 1):
                rhs = rhs + ctx.mu_of(ctx.promote(cyclic_derivative(i, sigma(P)))
                                      * ctx.promote(cyclic_derivative(i, Q)))
            if lhs != rhs:
                ok = False
    return {"name": "variance identity sigma2(Xi P, Q)", "passed": ok,
            "detail": f"{2 * trials} random pairs, order {order}"}


def check_sigma2_vs_two_star(order=1):
    ok = True
    details = []
    for pot, pairs in ((quartic_potential(), [(X(1) ** 2, X(1) ** 2),
                                              (X(1) ** 3, X(1) ** 3),
                                              (X(1) ** 4, X(1) ** 4)]),
                       (two_color_potential(), [(Monomial((1, 2)), Monomial((1, 2)))])):
        ctx = OperatorContext.for_potential(pot, order=order)
        for a, b in pairs:
            lhs = ctx.sigma2(_poly(a), _poly(b))
            rhs = two_star_planar(a, b, pot, order, mu=ctx.mu)
            good = lhs == rhs
            ok = ok and good
            details.append(f"({a},{b}): {'ok' if good else (lhs, rhs)}")
    return {"name": "variance vs two-star counts", "passed": ok,
            "detail": "; ".join(details)}


def check_commutation_symmetry(seed=1, trials=6, order=1):
    rng = random.Random(seed)
    ok = True
    for pot in (quartic_potential(), two_color_potential()):
        ctx = OperatorContext.for_potential(pot, order=order)
        m = pot.m
        for _ in range(trials):
            P = pi(_rand_poly(rng, m, 5))
            Q = pi(_rand_poly(rng, m, 4))
            xiP = ctx.xi(P)
            v = VectorPolynomial([cyclic_derivative(l, sigma(ctx.promote(P)))
                                  for l in range(1, m + 1)])
            hv = ctx.hess_apply(v)
            for l in range(m):
                lhs = cyclic_derivative(l + 1, xiP)
                rhs = v[l] + hv[l] + ctx.xibar(v[l])
                if lhs != rhs:
                    ok = False
            lhs = ctx.mu_of(ctx.promote(P) * ctx.xibar(Q))
            rhs = ctx._const(0)
            for k in range(1, m + 1):
                rhs = rhs + ctx.mu_tensor_pair(partial(k, ctx.promote(P)),
                                               partial(k, ctx.promote(Q)).transpose())
            if lhs != rhs:
                ok = False
    return {"name": "commutation and symmetry identities", "passed": ok,
            "detail": f"{2 * trials} random inputs, order {order}"}


def check_genus1_chain(order=1):
    ok = True
    details = []
    for pot, queries in ((quartic_potential(), [X(1) ** 2, X(1) ** 4]),
                         (two_color_potential(), [Monomial((1, 2, 1, 2))])):
        ctx = OperatorContext.for_potential(pot, order=order)
        for q in queries:
            rep = ctx.genus1_cross_check(q)
            ok = ok and rep.passed
            details.append(f"{q}: {'ok' if rep.passed else rep}")
    return {"name": "genus-one chain phi(xi^-1) vs one-star counts",
            "passed": ok, "detail": "; ".join(details)}


def check_free_energy(order=2):
    ok = True
    details = []
    for pot in (quartic_potential(), two_color_potential()):
        rep = thermo_reference(pot, order)
        ok = ok and rep.passed
        details.append(f"{pot!r}: {'ok' if rep.passed else 'mismatch'}")
    return {"name": "free energy vs genus censuses", "passed": ok,
            "detail": "; ".join(details)}


def check_mc_gue(seed=0):
    from .mcsim import gue_trace_run

    run = gue_trace_run(60, 1500, seed=seed)
    s2 = run.stats("tr2")
    s4 = run.stats("tr4")
    w4 = wick_finite_N(Monomial((1, 1, 1, 1))).evaluate(60)
    ok2 = abs(s2.mean / 60 - 1.0) < 4 * s2.stderr / 60 + 1e-6
    ok4 = abs(s4.mean / 60 - w4) < 4 * s4.stderr / 60 + 1e-6
    return {"name": "Monte Carlo free moments", "passed": ok2 and ok4,
            "detail": (f"(1/N)TrA^2 = {s2.mean / 60:.4f} (1 expected), "
                       f"(1/N)TrA^4 = {s4.mean / 60:.4f} ({w4:.4f} expected)")}


def check_mc_fluctuation(seed=0):
    from .mcsim import fluctuation_series_report, gue_trace_run

    run = gue_trace_run(80, 4000, seed=seed + 1)
    centered = run.pooled("tr2") - 80.0
    rep = fluctuation_series_report("TrA^2 - N", centered, 2.0)
    return {"name": "Monte Carlo CLT variance at V=0",
            "passed": rep.passed and abs(rep.z_skew) < 5 and abs(rep.z_kurt) < 5,
            "detail": (f"var {rep.sample_variance:.3f} (2 expected), "
                       f"z_skew {rep.z_skew:.2f}, z_kurt {rep.z_kurt:.2f}")}


def run_checks(level="quick", seed=0):
    checks = [
        check_catalan(),
        check_harer_zagier(),
        check_moments_vs_maps(),
        check_variance_identity(seed=seed),
        check_sigma2_vs_two_star(),
        check_commutation_symmetry(seed=seed + 1),
        check_genus1_chain(),
        check_free_energy(),
    ]
    if level == "full":
        checks.append(check_mc_gue(seed=seed))
        checks.append(check_mc_fluctuation(seed=seed))
    return checks
