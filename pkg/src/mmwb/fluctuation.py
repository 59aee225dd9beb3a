"""Master operators, CLT covariance and the second-order functional.

Everything here is driven by an :class:`OperatorContext` holding a
potential and its solved limiting state.  The context provides the
degree-normalized operators (xi family), their unnormalized counterparts
(xibar family), the Hessian insertion operator, the covariance bilinear
form, the fluctuation variance ``sigma2`` and the genus-one functional
``phi``.

In series mode every coefficient is a truncated coupling series and all
identities hold exactly per coefficient: the geometric inverse of xi0
terminates because the middle contraction drops the degree by two, and
the Neumann series for the full inverse truncates exactly because each
application of the interaction part raises the coupling order by one.
"""

from __future__ import annotations

from .ncpoly import (Monomial, Polynomial, as_polynomial, cyclic_derivative,
                     partial, partial2, pi, sharp, sigma, sigma_inverse)
from .sdsolve import SolverConfig, solve
from .series import CouplingSeries


class VectorPolynomial:
    """A tuple of m polynomials, one per color."""

    __slots__ = ("components",)

    def __init__(self, components):
        self.components = tuple(as_polynomial(c) for c in components)

    def __getitem__(self, i):
        return self.components[i]

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other):
        return VectorPolynomial([a + b for a, b in zip(self.components,
                                                       other.components)])

    def __eq__(self, other):
        return (isinstance(other, VectorPolynomial)
                and self.components == other.components)

    def __repr__(self):
        return "VectorPolynomial" + repr([str(c) for c in self.components])


class OperatorContext:
    """Operator calculus attached to a potential and its limiting state."""

    def __init__(self, potential, mu=None, order=None):
        self.potential = potential
        if mu is None:
            mu = solve(potential, SolverConfig(
                mode="series", order=order if order is not None else 4,
                max_degree=max(potential.degree, 2)))
        self.mu = mu
        self.mode = mu.mode
        self.m = potential.m
        self.labels = potential.labels
        self.order = mu.order if self.mode == "series" else None
        self._dv = {}
        self._xi_inv_memo = {}
        self._gradinv_memo = {}
        self._sigma2_memo = {}
        self._phi0_memo = {}
        self._mu_word_cache = {}

    @classmethod
    def for_potential(cls, potential, order=4, mode="series", max_degree=None,
                      **solver_kwargs):
        cfg = SolverConfig(mode=mode, order=order,
                           max_degree=max_degree if max_degree is not None
                           else max(potential.degree, 2), **solver_kwargs)
        return cls(potential, solve(potential, cfg))

    # -- coefficient plumbing

    def _const(self, c):
        if self.mode == "series":
            return CouplingSeries.constant(c, self.labels, self.order)
        return complex(c).real if complex(c).imag == 0 else complex(c)

    def promote(self, P):
        """Coerce a polynomial's coefficients into the context's ring."""
        P = as_polynomial(P)
        if self.mode == "series":
            return P.map_coefficients(
                lambda c: c if isinstance(c, CouplingSeries) else self._const(c))
        return P.map_coefficients(
            lambda c: c if isinstance(c, (float, complex)) else self._const(c))

    def d_potential(self, k):
        """D_k V as a polynomial whose coefficients live in the context ring."""
        hit = self._dv.get(k)
        if hit is None:
            acc = Polynomial.zero()
            for j, pieces in self.potential.cyclic_grad_pieces(k):
                term = self.potential.terms[j]
                if self.mode == "series":
                    coeff = CouplingSeries.variable(term.label, self.labels, self.order)
                else:
                    coeff = term.value
                for piece in pieces:
                    acc = acc + Polynomial.from_monomial(piece, coeff)
            hit = acc
            self._dv[k] = hit
        return hit

    def mu_word(self, mono):
        """mu of a single word, cached on the raw letters."""
        key = tuple(mono)
        hit = self._mu_word_cache.get(key)
        if hit is None:
            if self.mode == "series":
                hit = self.mu.moment_series(mono, self.order)
            else:
                hit = self.mu.moment(mono)
            self._mu_word_cache[key] = hit
        return hit

    def mu_of(self, P):
        """mu applied to a polynomial with coefficients in the context ring."""
        acc = self._const(0)
        for mono, c in as_polynomial(P).terms.items():
            acc = acc + c * self.mu_word(mono)
        return acc

    def _contract_both(self, T):
        """(mu (x) I + I (x) mu) applied to a two-leg tensor."""
        acc = Polynomial.zero()
        for (a, b), c in T.terms.items():
            acc = acc + Polynomial.from_monomial(b, c * self.mu_word(a))
            acc = acc + Polynomial.from_monomial(a, c * self.mu_word(b))
        return acc

    def mu_tensor_pair(self, T1, T2):
        """mu (x) mu of the leg-wise product T1 x T2.

        Contracted as a small tensor network: the second-leg pairing
        Y[b, u] = sum_v T2[u, v] mu(b v) is tabulated first, then folded
        against the first legs, which avoids the quadratic sweep over all
        term pairs of both tensors.
        """
        if not T1.terms or not T2.terms:
            return self._const(0)
        if self.mode != "series":
            acc = 0.0
            for (a, b), c1 in T1.terms.items():
                for (u, v), c2 in T2.terms.items():
                    acc += (c1 * c2) * self.mu_word(a * u) * self.mu_word(b * v)
            return acc
        by_u = {}
        for (u, v), c2 in T2.terms.items():
            by_u.setdefault(u, []).append((v, c2))
        b_set = {b for (_, b) in T1.terms}
        y = {}
        for b in b_set:
            for u, pairs in by_u.items():
                acc = None
                for v, c2 in pairs:
                    term = c2 * self.mu_word(b * v)
                    acc = term if acc is None else acc + term
                if acc:
                    y[(b, u)] = acc
        out = {}
        order = self.order
        for (a, b), c1 in T1.terms.items():
            for u in by_u:
                yv = y.get((b, u))
                if yv is None:
                    continue
                prod = c1 * self.mu_word(a * u) * yv
                for k, c in prod.coeffs.items():
                    acc = out.get(k)
                    s = c if acc is None else acc + c
                    if s:
                        out[k] = s
                    elif k in out:
                        del out[k]
        return CouplingSeries(self.labels, order, out)

    # -- the degree-normalized operators

    def xi1(self, P):
        """Interaction part: project(sum_k del_k Sigma P # D_k V)."""
        P = pi(self.promote(P))
        acc = Polynomial.zero()
        sP = sigma(P)
        for k in range(1, self.m + 1):
            dv = self.d_potential(k)
            if dv:
                acc = acc + sharp(partial(k, sP), dv)
        return pi(acc)

    def xi2(self, P):
        """Contraction part: project(sum_k (mu(x)I + I(x)mu) del_k D_k Sigma P)."""
        P = pi(self.promote(P))
        acc = Polynomial.zero()
        sP = sigma(P)
        for k in range(1, self.m + 1):
            acc = acc + self._contract_both(partial(k, cyclic_derivative(k, sP)))
        return pi(acc)

    def xi0(self, P):
        P = pi(self.promote(P))
        return P - self.xi2(P)

    def xi(self, P):
        P = pi(self.promote(P))
        return P - self.xi2(P) + self.xi1(P)

    def xi0_inverse(self, P):
        """Exact geometric inverse: the contraction drops degree by two."""
        cur = pi(self.promote(P))
        acc = cur
        while cur:
            cur = self.xi2(cur)
            acc = acc + cur
        return acc

    def xi_inverse(self, P):
        """Neumann inverse, exact per coupling order in series mode."""
        if self.mode != "series" and any(self.d_potential(k)
                                         for k in range(1, self.m + 1)):
            raise ValueError("xi_inverse needs series mode for a nonzero potential")
        P = pi(self.promote(P))
        acc = Polynomial.zero()
        for mono, c in P.terms.items():
            acc = acc + c * self._xi_inverse_mono(mono)
        return acc

    def _xi_inverse_mono(self, mono):
        hit = self._xi_inv_memo.get(mono)
        if hit is None:
            cur = self.xi0_inverse(Polynomial.from_monomial(mono, self._const(1)))
            acc = cur
            guard = (self.order if self.order is not None else 0) + 2
            for _ in range(guard):
                cur = -self.xi0_inverse(self.xi1(cur))
                if not cur:
                    break
                acc = acc + cur
            else:
                raise AssertionError("Neumann series failed to truncate")
            hit = acc
            self._xi_inv_memo[mono] = hit
        return hit

    # -- the unnormalized operators

    def xibar1(self, P):
        """sum_k del_k P # D_k V, no normalization, no projection."""
        P = pi(self.promote(P))
        acc = Polynomial.zero()
        for k in range(1, self.m + 1):
            dv = self.d_potential(k)
            if dv:
                acc = acc + sharp(partial(k, P), dv)
        return acc

    def xibar2(self, P):
        """sum_i (I (x) mu) M del_i^2 P with M(A (x) B (x) C) = AC (x) B."""
        P = pi(self.promote(P))
        acc = Polynomial.zero()
        for i in range(1, self.m + 1):
            for (a, b, c), coeff in partial2(i, P).terms.items():
                acc = acc + Polynomial.from_monomial(
                    a * c, coeff * self.mu_of(Polynomial.from_monomial(b)))
        return acc

    def xibar0(self, P):
        P = pi(self.promote(P))
        return sigma_inverse(P) - self.xibar2(P)

    def xibar(self, P):
        """Degree-weighted operator; constants are sent to zero."""
        P = pi(self.promote(P))
        return sigma_inverse(P) - self.xibar2(P) + self.xibar1(P)

    def hess_apply(self, v):
        """(Hess V)(v)_l = sum_i del_i D_l V # v_i."""
        comps = []
        for l in range(1, self.m + 1):
            dv = self.d_potential(l)
            acc = Polynomial.zero()
            for i in range(1, self.m + 1):
                vi = self.promote(v[i - 1])
                if vi and dv:
                    acc = acc + sharp(partial(i, dv), vi)
            comps.append(acc)
        return VectorPolynomial(comps)

    # -- covariance and variance

    def covariance(self, p, q):
        """The CLT covariance bilinear form on m-vectors of polynomials.

        Three pieces: the leg-wise pairing of cross derivatives, the
        second-derivative pairing through the potential, and the plain
        product term.  The potential piece is evaluated in the rotated form
        sum_{k,l} mu(p_k * (del_l D_k V # q_l)), which agrees with the
        tensor form by the trace property for arbitrary arguments.
        """
        p = VectorPolynomial([self.promote(c) for c in p])
        q = VectorPolynomial([self.promote(c) for c in q])
        acc = self._const(0)
        parts_p = [[partial(l, comp) for l in range(1, self.m + 1)] for comp in p]
        parts_q = [[partial(l, comp) for l in range(1, self.m + 1)] for comp in q]
        for k in range(1, self.m + 1):
            for l in range(1, self.m + 1):
                acc = acc + self.mu_tensor_pair(parts_p[l - 1][k - 1],
                                                parts_q[k - 1][l - 1])
        for k in range(1, self.m + 1):
            dv = self.d_potential(k)
            if not dv:
                continue
            for l in range(1, self.m + 1):
                ql = q[l - 1]
                if ql:
                    acc = acc + self.mu_of(p[k - 1] * sharp(partial(l, dv), ql))
        for k in range(1, self.m + 1):
            acc = acc + self.mu_of(p[k - 1] * q[k - 1])
        return acc

    def grad_sigma_inverse(self, P):
        """The vector D Sigma xi^{-1} project(P)."""
        inv = self.xi_inverse(P)
        s = sigma(inv)
        return VectorPolynomial([cyclic_derivative(k, s)
                                 for k in range(1, self.m + 1)])

    def _grad_sigma_inverse_mono(self, mono):
        hit = self._gradinv_memo.get(mono)
        if hit is None:
            hit = self.grad_sigma_inverse(Polynomial.from_monomial(mono))
            self._gradinv_memo[mono] = hit
        return hit

    def sigma2(self, P, Q=None):
        """Fluctuation covariance sigma^2(P, Q); symmetric and bilinear.

        Computed on the whole polynomials so that cancellations inside
        the inverse (for instance sigma2(xi(P), .)) collapse before the
        covariance pairing.
        """
        if Q is None:
            Q = P
        P = pi(as_polynomial(P))
        Q = pi(as_polynomial(Q))
        if not P or not Q:
            return self._const(0)
        pa = self.grad_sigma_inverse(P)
        pb = pa if Q == P else self.grad_sigma_inverse(Q)
        return self.covariance(pa, pb)

    def _sigma2_mono(self, a, b):
        key = (a, b) if a <= b else (b, a)
        hit = self._sigma2_memo.get(key)
        if hit is None:
            pa = self._grad_sigma_inverse_mono(key[0])
            pb = self._grad_sigma_inverse_mono(key[1])
            hit = self.covariance(pa, pb)
            self._sigma2_memo[key] = hit
        return hit

    # -- second order functional

    def phi0(self, P):
        """sum_i sigma^2 paired over the legs of del_i^2 P.

        On a word this is 2 sum over decompositions P1 x_i P2 x_i P3 of
        sigma^2(P3 P1, P2); the factor two is the one built into del^2.
        """
        P = pi(self.promote(P))
        acc = self._const(0)
        for mono, c in P.terms.items():
            acc = acc + c * self._phi0_mono(mono)
        return acc

    def _phi0_mono(self, mono):
        hit = self._phi0_memo.get(mono)
        if hit is None:
            acc = self._const(0)
            for i in range(1, self.m + 1):
                for (p1, p2, p3), coeff in partial2(
                        i, Polynomial.from_monomial(mono)).terms.items():
                    acc = acc + coeff * self._sigma2_mono(p3 * p1, p2)
            hit = acc
            self._phi0_memo[mono] = hit
        return hit

    def phi(self, P):
        return self.phi0(sigma(as_polynomial(P)))

    def second_order_correction(self, P):
        """The genus-one moment functional phi(xi^{-1} project(P))."""
        return self.phi(self.xi_inverse(pi(as_polynomial(P))))

    def genus1_cross_check(self, P, cap=None):
        """Compare the operator route with the one-star genus-one recursion."""
        from .mapcount import one_star_genus1

        P = Monomial(P)
        lhs = self.second_order_correction(Polynomial.from_monomial(P))
        kwargs = {}
        rhs = one_star_genus1(P, self.potential, self.order, mu=self.mu, **kwargs)
        return Genus1CheckReport(lhs == rhs, P, lhs, rhs)


class Genus1CheckReport:
    __slots__ = ("passed", "query", "operator_series", "map_series")

    def __init__(self, passed, query, operator_series, map_series):
        self.passed = passed
        self.query = query
        self.operator_series = operator_series
        self.map_series = map_series

    def __bool__(self):
        return self.passed

    def __repr__(self):
        return (f"Genus1CheckReport(passed={self.passed}, query={self.query}, "
                f"operator={self.operator_series}, maps={self.map_series})")


def grad_sigma(P, m):
    """The vector (D_1 Sigma P, ..., D_m Sigma P)."""
    s = sigma(as_polynomial(P))
    return VectorPolynomial([cyclic_derivative(k, s) for k in range(1, m + 1)])
