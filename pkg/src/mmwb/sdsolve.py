"""Limiting tracial state of the matrix model: the master fixed point.

The state mu is characterized by mu((X_i + D_i V) P) = mu (x) mu(del_i P)
for every color i and polynomial P.  Rearranged as

    mu(X_i P) = mu (x) mu(del_i P) - mu(D_i V * P)

it determines mu by a double induction: the interaction term carries at
least one extra power of the couplings, so in series mode the recursion is
well founded on (total coupling order, word degree) and the formal series
solution is exact.  Numeric mode runs a damped sweep of the same
rearrangement over a finite monomial table instead.

``wick_finite_N`` is an independent oracle: the exact finite-N Gaussian
expectation of a normalized trace word, computed by the pairwise Wick
calculus on multi-trace states with the matrix size N kept formal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .mapcount import DEFAULT_HALF_EDGE_CAP, CensusCapExceeded, census_series
from .ncpoly import Monomial, Polynomial, conj_coeff, cyclic_canonical
from .series import CouplingSeries


class NoConvergence(RuntimeError):
    """Damped iteration failed; the couplings are outside the small-|t| regime."""


class MomentBoundViolation(RuntimeError):
    """A computed moment escaped the configured geometric bound."""


class DegreeCapExceeded(RuntimeError):
    """A moment beyond the numeric table degree was requested."""


@dataclass
class SolverConfig:
    mode: str = "series"
    order: int = 4                 # series truncation order K
    max_degree: int = 8            # populated moment degree cap
    tol: float = 1e-12
    max_iter: int = 2000
    damping: float = 0.5
    moment_bound: float = 8.0      # geometric moment-bound check constant
    buffer_orders: int = 4         # numeric-mode closure buffer, in t-orders

    def __post_init__(self):
        if self.mode not in ("series", "numeric"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not (0 < self.damping <= 1):
            raise ValueError("damping must lie in (0, 1]")


class TracialState:
    """Moment table of the limiting state, keyed by cyclic-canonical words.

    In series mode values are coupling series and arbitrary further moments
    are computed lazily on demand; in numeric mode values are floats over a
    finite table.
    """

    def __init__(self, potential, config):
        self.potential = potential
        self.config = config
        self.mode = config.mode
        self.m = potential.m
        self.labels = potential.labels
        self.order = config.order
        self.max_degree = config.max_degree
        self.values = {}
        self._memo = {}
        self._table = None  # numeric mode: full working table

    # -- series engine

    def moment_series(self, mono, order=None):
        """Series of mu(word), exact through the requested total order."""
        if self.mode != "series":
            raise ValueError("moment_series is only available in series mode")
        if order is None:
            order = self.order
        mono = cyclic_canonical(Monomial(mono))
        if mono.degree == 0:
            return CouplingSeries.one(self.labels, order)
        key = (mono, order)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        i = mono[0]
        rest = mono[1:]
        acc = CouplingSeries(self.labels, order)
        for p in range(len(rest)):
            if rest[p] == i:
                left = self.moment_series(Monomial(rest[:p]), order)
                right = self.moment_series(Monomial(rest[p + 1:]), order)
                acc = acc + left * right
        if order >= 1:
            for j, pieces in self._grad_pieces(i):
                term = self.potential.terms[j]
                for piece in pieces:
                    sub = self.moment_series(piece * Monomial(rest), order - 1)
                    acc = acc - _lift(sub, self.labels, order).shifted(term.label)
        self._memo[key] = acc
        return acc

    def _grad_pieces(self, i):
        cache = self.__dict__.setdefault("_grad_cache", {})
        hit = cache.get(i)
        if hit is None:
            hit = self.potential.cyclic_grad_pieces(i)
            cache[i] = hit
        return hit

    # -- lookup

    def moment(self, x, order=None):
        """mu applied to a monomial or polynomial (coefficients may be series)."""
        if isinstance(x, Polynomial):
            if self.mode == "series":
                acc = CouplingSeries(self.labels, self.order if order is None else order)
            else:
                acc = 0.0
            for mono, c in x.terms.items():
                acc = acc + c * self.moment(mono, order=order)
            return acc
        mono = cyclic_canonical(Monomial(x))
        if self.mode == "series":
            return self.moment_series(mono, order)
        if mono.degree == 0:
            return 1.0
        table = self._table if self._table is not None else self.values
        try:
            return table[mono]
        except KeyError:
            raise DegreeCapExceeded(
                f"moment of degree {mono.degree} exceeds the numeric table") from None

    def moment_at(self, x, values=None):
        """Numeric moment: series evaluated at couplings, or the table value."""
        v = self.moment(x)
        if isinstance(v, CouplingSeries):
            if values is None:
                values = self.potential.values_by_label()
            return v.evaluate(values)
        return v

    # -- diagnostics

    def sd_residual(self, mono, i):
        """mu (x) mu(del_i P) - mu((X_i + D_i V) P) for P the given word."""
        from .ncpoly import cyclic_derivative, partial

        P = Polynomial.from_monomial(mono)
        lhs = 0
        for (a, b), c in partial(i, P).terms.items():
            lhs = lhs + c * (self.moment(a) * self.moment(b))
        xi_p = Polynomial.variable(i) * P
        rhs = self.moment(xi_p)
        for term in self.potential.terms:
            dq = cyclic_derivative(i, Polynomial.from_monomial(term.monomial))
            prod = dq * P
            if self.mode == "series":
                sub = self.moment(prod, order=self.order - 1)
                rhs = rhs + _lift(sub, self.labels, self.order).shifted(term.label)
            else:
                rhs = rhs + term.value * self.moment(prod)
        return lhs - rhs

    def check_invariants(self, involution_tol=0.0):
        """Unit normalization, involution symmetry and the moment bound."""
        report = {"unit": self.moment(Monomial()) == (
            CouplingSeries.one(self.labels, self.order) if self.mode == "series" else 1.0)}
        ok = True
        for mono in list(self.values):
            v = self.values[mono]
            w = self.moment(mono.reversed())
            if self.mode == "series":
                if w != v.conjugate_coeffs():
                    ok = False
            else:
                if abs(w - conj_coeff(v)) > max(involution_tol, 1e-9):
                    ok = False
        report["involution"] = ok
        report["moment_bound"] = self._moment_bound_ok()
        return report

    def _moment_bound_ok(self):
        C = self.config.moment_bound
        values = self.potential.values_by_label() if self.mode == "series" else None
        for i in range(1, self.m + 1):
            for d in range(1, self.max_degree + 1):
                mono = Monomial((i,) * d)
                try:
                    v = self.moment_at(mono, values) if self.mode == "series" \
                        else self.moment(mono)
                except (KeyError, ValueError):
                    continue
                if abs(v) > C ** d:
                    return False
        return True


def _lift(series, labels, order):
    out = CouplingSeries(labels, order)
    out.coeffs = {k: c for k, c in series.coeffs.items() if sum(k) <= order}
    return out


def canonical_monomials(m, max_degree):
    """All cyclic-canonical words over m colors up to the given degree."""
    out = [Monomial()]
    for d in range(1, max_degree + 1):
        seen = set()
        for letters in itertools.product(range(1, m + 1), repeat=d):
            mono = cyclic_canonical(Monomial(letters))
            if mono not in seen:
                seen.add(mono)
                out.append(mono)
    return out


def solve(potential, config=None):
    """Solve the fixed-point equation for the potential's limiting state.

    Series mode returns the unique formal-series solution; numeric mode a
    damped Gauss-Seidel sweep over words of degree up to the configured cap
    plus a closure buffer.  Both populate ``state.values`` for every
    canonical word of degree <= max_degree.
    """
    config = config or SolverConfig()
    state = TracialState(potential, config)
    if config.mode == "series":
        for mono in canonical_monomials(potential.m, config.max_degree):
            state.values[mono] = state.moment_series(mono)
        return state
    return _solve_numeric(state)


def _solve_numeric(state):
    potential = state.potential
    config = state.config
    values = potential.values_by_label()
    couplings = [(complex(t.value).real if complex(t.value).imag == 0 else complex(t.value))
                 for t in potential.terms]
    if any(t.value is None for t in potential.terms):
        raise ValueError("numeric mode needs numeric coupling values")
    buffer_deg = max(potential.degree - 2, 0) * config.buffer_orders
    work_degree = config.max_degree + buffer_deg
    if potential.m ** max(work_degree, 1) > 4_000_000:
        raise ValueError("numeric table too large; lower max_degree or buffer_orders")
    monos = canonical_monomials(potential.m, work_degree)
    table = {mono: 0.0 for mono in monos}
    table[Monomial()] = 1.0
    # precompute the recursion stencil per word
    stencil = {}
    for mono in monos:
        if mono.degree == 0:
            continue
        i = mono[0]
        rest = mono[1:]
        splits = []
        for p in range(len(rest)):
            if rest[p] == i:
                splits.append((cyclic_canonical(Monomial(rest[:p])),
                               cyclic_canonical(Monomial(rest[p + 1:]))))
        inter = []
        for j, pieces in potential.cyclic_grad_pieces(i):
            for piece in pieces:
                prod = cyclic_canonical(piece * Monomial(rest))
                inter.append((j, prod if prod in table else None))
        stencil[mono] = (splits, inter)
    gamma = config.damping
    for sweep in range(config.max_iter):
        delta = 0.0
        for mono in monos:
            if mono.degree == 0:
                continue
            splits, inter = stencil[mono]
            rhs = 0.0
            for a, b in splits:
                rhs += table[a] * table[b]
            for j, prod in inter:
                if prod is not None:
                    rhs -= couplings[j] * table[prod]
            new = (1.0 - gamma) * table[mono] + gamma * rhs
            d = abs(new - table[mono])
            if d > delta:
                delta = d
            table[mono] = new
        if delta < config.tol:
            break
    else:
        raise NoConvergence(
            f"no fixed point after {config.max_iter} sweeps (last delta {delta:.3g}); "
            "the couplings look outside the perturbative regime")
    state._table = table
    state.values = {mono: table[mono] for mono in monos
                    if mono.degree <= config.max_degree}
    if not state._moment_bound_ok():
        raise MomentBoundViolation(
            f"a moment exceeded C**degree with C={config.moment_bound}")
    return state


# ---------------------------------------------------------------------------
# finite-N Wick oracle


class LaurentN:
    """Laurent polynomial in the formal matrix size N, exact coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        d = {}
        if coeffs:
            for e, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                c = Fraction(c)
                if c:
                    d[int(e)] = d.get(int(e), Fraction(0)) + c
        self.coeffs = {e: c for e, c in d.items() if c}

    def __add__(self, other):
        d = dict(self.coeffs)
        for e, c in other.coeffs.items():
            d[e] = d.get(e, Fraction(0)) + c
        return LaurentN(d)

    def shifted(self, k):
        """Multiply by N**k."""
        return LaurentN({e + k: c for e, c in self.coeffs.items()})

    def scaled(self, c):
        return LaurentN({e: v * c for e, v in self.coeffs.items()})

    def evaluate(self, N):
        return sum(float(c) * float(N) ** e for e, c in self.coeffs.items())

    def genus_counts(self):
        """Counts per genus when the polynomial has the form sum c_g N^(-2g)."""
        out = {}
        for e, c in self.coeffs.items():
            if e > 0 or e % 2:
                raise ValueError(f"exponent {e} does not fit the genus form")
            out[-e // 2] = c
        return out

    def __eq__(self, other):
        if isinstance(other, LaurentN):
            return self.coeffs == other.coeffs
        if not other:
            return not self.coeffs
        return self.coeffs == {0: Fraction(other)}

    def __bool__(self):
        return bool(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        bits = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            if e == 0:
                bits.append(f"{c}")
            elif e == 1:
                bits.append(f"{c}*N" if c != 1 else "N")
            else:
                bits.append(f"{c}*N^{e}" if c != 1 else f"N^{e}")
        return " + ".join(bits)

    __repr__ = __str__


def wick_finite_N(mono, cap=DEFAULT_HALF_EDGE_CAP, _memo=None):
    """Exact GUE expectation of (1/N) Tr q(A) as a Laurent polynomial in N.

    Evaluated by the pairwise Wick rule on multi-trace states: the leading
    letter pairs either inside its own word (splitting the trace, factor
    1/N) or into another word (merging the traces, factor 1/N); empty
    traces contribute a factor N each.
    """
    mono = Monomial(mono)
    if mono.degree > cap:
        raise CensusCapExceeded(
            f"{mono.degree} letters exceed the cap of {cap}")
    if mono.degree % 2:
        return LaurentN()
    memo = {} if _memo is None else _memo
    raw = _wick_multi((tuple(cyclic_canonical(mono)),), memo)
    return raw.shifted(-1)


def _wick_multi(words, memo):
    """E[prod_a Tr(w_a)] over independent GUE matrices, N formal."""
    nonempty = tuple(sorted(w for w in words if w))
    empties = len(words) - len(nonempty)
    if not nonempty:
        return LaurentN({empties: 1})
    hit = memo.get(nonempty)
    if hit is None:
        w0 = nonempty[0]
        rest = nonempty[1:]
        c = w0[0]
        u = w0[1:]
        acc = LaurentN()
        for p in range(len(u)):
            if u[p] == c:
                r, s = u[:p], u[p + 1:]
                acc = acc + _wick_multi(_canon_words(rest + (r, s)), memo)
        for b in range(len(rest)):
            wb = rest[b]
            others = rest[:b] + rest[b + 1:]
            for p in range(len(wb)):
                if wb[p] == c:
                    merged = wb[:p] + u + wb[p + 1:]
                    acc = acc + _wick_multi(_canon_words(others + (merged,)), memo)
        hit = acc.shifted(-1)
        memo[nonempty] = hit
    return hit.shifted(empties)


def _canon_words(words):
    return tuple(tuple(cyclic_canonical(Monomial(w))) for w in words)


# ---------------------------------------------------------------------------
# moments versus maps


@dataclass
class MomentsVsMapsReport:
    passed: bool
    query: Monomial
    order: int
    lhs: CouplingSeries
    rhs: CouplingSeries
    first_mismatch: tuple | None = None

    def __bool__(self):
        return self.passed


def moments_vs_maps(potential, query, order, mu=None,
                    cap=DEFAULT_HALF_EDGE_CAP):
    """Check mu_t(P) against the planar census generating series, term by term.

    The left side is the formal-series moment; the right side rebuilds each
    coefficient from brute-force counts of planar gluings of the potential's
    stars with one extra star of type P.
    """
    query = Monomial(query)
    if query.degree == 0:
        raise ValueError("query must be nonconstant")
    if mu is None:
        mu = solve(potential, SolverConfig(mode="series", order=order,
                                           max_degree=min(query.degree, 8)))
    lhs = mu.moment_series(query, order)
    rhs = census_series(potential, order, 0, extra_stars=[query], cap=cap)
    mismatch = None
    keys = set(lhs.coeffs) | set(rhs.coeffs)
    for k in sorted(keys, key=lambda k: (sum(k), k)):
        if lhs.coefficient(k) != rhs.coefficient(k):
            mismatch = (k, lhs.coefficient(k), rhs.coefficient(k))
            break
    return MomentsVsMapsReport(mismatch is None, query, order, lhs, rhs, mismatch)
