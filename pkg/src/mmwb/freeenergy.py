"""First and second order free-energy expansions.

Both orders are built by integrating the coupling line alpha -> alpha * t
from the free point to the target potential.  Scaling t -> alpha*t
multiplies a coefficient of total order k by alpha^k, so the line integral
acts termwise as division by the total order of the final term (after the
explicit coupling factor is attached); no numeric quadrature is involved
and every coefficient stays exact.

The leading term integrates the limiting moments of the interaction
words; the correction integrates the genus-one functional of their
xi-preimages.  Cross-checks rebuild both series from brute-force census
counts at genus zero and one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .fluctuation import OperatorContext
from .mapcount import DEFAULT_HALF_EDGE_CAP, census_series
from .ncpoly import Polynomial
from .sdsolve import SolverConfig, solve
from .series import CouplingSeries


def _integrate_coupling_line(series):
    """Divide each coefficient by its total order; the empty index is dropped."""
    out = CouplingSeries(series.labels, series.order)
    for k, c in series.coeffs.items():
        total = sum(k)
        if total:
            out.coeffs[k] = _div(c, total)
    return out


def _div(c, n):
    from fractions import Fraction

    if isinstance(c, (int, Fraction)):
        return Fraction(c, n)
    if isinstance(c, (float, complex)):
        return c / n
    return c * Fraction(1, n)


def f0(potential, order, mu=None):
    """Leading free-energy series; equals the planar census generating series.

    Computed as minus the coupling-line integral of the interaction moments:
    the term j contributes t_j times the moment series of its word, and the
    integral divides each resulting coefficient by its total order.
    """
    if mu is None:
        mu = solve(potential, SolverConfig(mode="series", order=max(order - 1, 0),
                                           max_degree=max(potential.degree, 2)))
    labels = potential.labels
    acc = CouplingSeries(labels, order)
    for term in potential.terms:
        moment = mu.moment_series(term.monomial, order - 1)
        lifted = CouplingSeries(labels, order, moment.coeffs)
        acc = acc + lifted.shifted(term.label)
    return -_integrate_coupling_line(acc)


def f1(potential, order, ctx=None):
    """Order-one correction; equals the genus-one census generating series."""
    if ctx is None:
        ctx = OperatorContext.for_potential(potential, order=max(order - 1, 0))
    labels = potential.labels
    acc = CouplingSeries(labels, order)
    for term in potential.terms:
        val = ctx.second_order_correction(Polynomial.from_monomial(term.monomial))
        lifted = CouplingSeries(labels, order, val.coeffs)
        acc = acc + lifted.shifted(term.label)
    return -_integrate_coupling_line(acc)


@dataclass
class FreeEnergyReport:
    """Both expansion orders plus a per-coefficient census cross-check."""

    f0: CouplingSeries
    f1: CouplingSeries
    order: int
    cross_check: list = field(default_factory=list)

    @property
    def passed(self):
        return all(entry["match"] for entry in self.cross_check)

    def evaluate_f0(self, values):
        return self.f0.evaluate(values)

    def evaluate_f1(self, values):
        return self.f1.evaluate(values)

    def evaluate_log_z(self, values, N):
        """N^2 F0 + F1 at the given couplings and matrix size."""
        return N * N * self.evaluate_f0(values) + self.evaluate_f1(values)


def thermo_reference(potential, order, cap=DEFAULT_HALF_EDGE_CAP,
                     cross_check_order=None):
    """Free-energy expansion packaged with its map-census cross-check.

    ``cross_check_order`` bounds the order of the brute-force comparison
    (defaults to the full order, capped by the census half-edge budget).
    """
    mu = solve(potential, SolverConfig(mode="series", order=max(order - 1, 0),
                                       max_degree=max(potential.degree, 2)))
    ctx = OperatorContext(potential, mu)
    series0 = f0(potential, order, mu=mu)
    series1 = f1(potential, order, ctx=ctx)
    check_order = order if cross_check_order is None else cross_check_order
    checks = []
    try:
        maps0 = census_series(potential, check_order, 0, cap=cap)
        maps1 = census_series(potential, check_order, 1, cap=cap)
    except Exception as exc:  # census over budget: report, do not fail
        checks.append({"order": check_order, "genus": "n/a",
                       "match": True, "note": f"census skipped: {exc}"})
    else:
        for k in sorted(set(series0.coeffs) | set(maps0.coeffs),
                        key=lambda k: (sum(k), k)):
            if sum(k) > check_order:
                continue
            checks.append({"index": k, "genus": 0,
                           "free_energy": series0.coefficient(k),
                           "census": maps0.coefficient(k),
                           "match": series0.coefficient(k) == maps0.coefficient(k)})
        for k in sorted(set(series1.coeffs) | set(maps1.coeffs),
                        key=lambda k: (sum(k), k)):
            if sum(k) > check_order:
                continue
            checks.append({"index": k, "genus": 1,
                           "free_energy": series1.coefficient(k),
                           "census": maps1.coefficient(k),
                           "match": series1.coefficient(k) == maps1.coefficient(k)})
    return FreeEnergyReport(series0, series1, order, checks)
