"""Noncommutative polynomial algebra in m colored indeterminates.

Monomials are words over the alphabet {1..m} (color indices); polynomials
are finite linear combinations with exact rational, Gaussian-rational,
float or complex coefficients.  The module provides the differential
calculus used throughout the workbench: the free difference quotient
``partial``, the cyclic derivative ``cyclic_derivative``, the iterated
derivative ``partial2``, the insertion maps ``sharp``/``sharp2``, the
degree normalizer ``sigma`` and the constant-killing projection ``pi``.

Coefficients only need ring arithmetic (+, -, *), a truthiness test for
zero and, where involutions are taken, a ``conj_coeff``-supported type.
``fractions.Fraction`` and :class:`QQi` form the exact backend, ``float``
and ``complex`` the floating one, and truncated coupling series from
:mod:`mmwb.series` slot in transparently as coefficient values.
"""

from __future__ import annotations

from fractions import Fraction


# ---------------------------------------------------------------------------
# coefficients


class QQi:
    """Gaussian rational a + b*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __add__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re * other.re - self.im * other.im,
                   self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __abs__(self):
        return (float(self.re) ** 2 + float(self.im) ** 2) ** 0.5

    def __complex__(self):
        return complex(self.re) + 1j * complex(self.im)

    def __repr__(self):
        if not self.im:
            return f"QQi({self.re})"
        return f"QQi({self.re}, {self.im})"


def _as_qqi(x):
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(x)
    return NotImplemented


def conj_coeff(c):
    """Complex conjugate of a coefficient; real types pass through."""
    if isinstance(c, (QQi, complex)):
        return c.conjugate()
    if hasattr(c, "conjugate_coeffs"):  # coupling series
        return c.conjugate_coeffs()
    return c


def coeff_is_real(c, tol=0.0):
    if isinstance(c, QQi):
        return not c.im
    if isinstance(c, complex):
        return abs(c.imag) <= tol
    return True


# ---------------------------------------------------------------------------
# monomials


class Monomial(tuple):
    """A word over the colors {1..m}; the empty word is the unit."""

    __slots__ = ()

    def __new__(cls, letters=()):
        letters = tuple(letters)
        for a in letters:
            if not isinstance(a, int) or a < 1:
                raise ValueError(f"color index must be a positive integer, got {a!r}")
        return tuple.__new__(cls, letters)

    @property
    def degree(self):
        return len(self)

    def __mul__(self, other):
        """Concatenation (noncommutative product of words)."""
        return tuple.__new__(Monomial, tuple.__add__(self, other))

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power of a monomial")
        return tuple.__new__(Monomial, tuple(self) * k)

    def reversed(self):
        return tuple.__new__(Monomial, self[::-1])

    def __repr__(self):
        return f"Monomial({tuple(self)})"

    def __str__(self):
        if not self:
            return "1"
        parts = []
        i = 0
        while i < len(self):
            j = i
            while j < len(self) and self[j] == self[i]:
                j += 1
            parts.append(f"x{self[i]}" + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "*".join(parts)


ONE_MONOMIAL = Monomial()


def _word(letters):
    # trusted fast constructor for internal hot paths
    return tuple.__new__(Monomial, letters)


def X(i):
    """The degree-one monomial in color ``i``."""
    return Monomial((i,))


def word(*letters):
    return Monomial(letters)


def cyclic_canonical(q):
    """Lexicographically least cyclic rotation of the word ``q``.

    All rotations of a word map to the same canonical representative, which
    makes it a valid key for any trace-invariant table.
    """
    n = len(q)
    if n <= 1:
        return q if isinstance(q, Monomial) else Monomial(q)
    doubled = tuple(q) + tuple(q)
    best = tuple(q)
    for s in range(1, n):
        cand = doubled[s:s + n]
        if cand < best:
            best = cand
    return _word(best)


# ---------------------------------------------------------------------------
# polynomials


def _iter_sorted(terms):
    return sorted(terms, key=lambda m: (len(m), m))


class Polynomial:
    """Finite map monomial -> coefficient with zero coefficients pruned."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for mono, c in (terms.items() if isinstance(terms, dict) else terms):
                if not isinstance(mono, Monomial):
                    mono = Monomial(mono)
                if c:
                    acc = d.get(mono)
                    c = c if acc is None else acc + c
                    if c:
                        d[mono] = c
                    elif mono in d:
                        del d[mono]
        self.terms = d

    # -- constructors

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def one(cls):
        return cls({ONE_MONOMIAL: 1})

    @classmethod
    def constant(cls, c):
        return cls({ONE_MONOMIAL: c} if c else {})

    @classmethod
    def from_monomial(cls, mono, c=1):
        return cls({Monomial(mono): c})

    @classmethod
    def variable(cls, i):
        return cls({X(i): 1})

    # -- ring structure

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(other)
        d = dict(self.terms)
        for mono, c in other.terms.items():
            acc = d.get(mono)
            s = c if acc is None else acc + c
            if s:
                d[mono] = s
            elif mono in d:
                del d[mono]
        out = Polynomial.__new__(Polynomial)
        out.terms = d
        return out

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if isinstance(other, Polynomial) else Polynomial.constant(-other))

    def __rsub__(self, other):
        return Polynomial.constant(other) + (-self)

    def __neg__(self):
        out = Polynomial.__new__(Polynomial)
        out.terms = {m: -c for m, c in self.terms.items()}
        return out

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            d = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    c = c1 * c2
                    if not c:
                        continue
                    m = m1 * m2
                    acc = d.get(m)
                    s = c if acc is None else acc + c
                    if s:
                        d[m] = s
                    elif m in d:
                        del d[m]
            out = Polynomial.__new__(Polynomial)
            out.terms = d
            return out
        return self.scaled(other)

    def __rmul__(self, other):
        # scalars commute with everything we store
        return self.scaled(other)

    def scaled(self, c):
        if not c:
            return Polynomial.zero()
        out = Polynomial.__new__(Polynomial)
        out.terms = {m: v for m, v in ((m, x * c) for m, x in self.terms.items()) if v}
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if not other:
            return not self.terms
        return self.terms == {ONE_MONOMIAL: other}

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- structure queries

    def coefficient(self, mono):
        return self.terms.get(Monomial(mono), 0)

    @property
    def constant_term(self):
        return self.terms.get(ONE_MONOMIAL, 0)

    @property
    def degree(self):
        return max((len(m) for m in self.terms), default=0)

    def max_color(self):
        return max((max(m) for m in self.terms if m), default=0)

    def monomials(self):
        return _iter_sorted(self.terms)

    def items_sorted(self):
        return [(m, self.terms[m]) for m in _iter_sorted(self.terms)]

    def map_coefficients(self, f):
        return Polynomial({m: f(c) for m, c in self.terms.items()})

    def star(self):
        """The involution: reverse each word, conjugate each coefficient."""
        return Polynomial({m.reversed(): conj_coeff(c) for m, c in self.terms.items()})

    def is_self_adjoint(self):
        return self == self.star()

    def without_constant(self):
        if ONE_MONOMIAL not in self.terms:
            return self
        d = dict(self.terms)
        del d[ONE_MONOMIAL]
        out = Polynomial.__new__(Polynomial)
        out.terms = d
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in _iter_sorted(self.terms):
            c = self.terms[m]
            cs = str(c)
            if m:
                parts.append(f"{cs}*{m}" if cs != "1" else str(m))
            else:
                parts.append(cs)
        return " + ".join(parts)

    def __repr__(self):
        return f"Polynomial<{self}>"


def as_polynomial(x):
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, Monomial):
        return Polynomial.from_monomial(x)
    return Polynomial.constant(x)


# ---------------------------------------------------------------------------
# tensors


class TensorPolynomial:
    """Finite map (monomial, monomial) -> coefficient; models A (x) B sums."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for key, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    acc = d.get(key)
                    s = c if acc is None else acc + c
                    if s:
                        d[key] = s
                    elif key in d:
                        del d[key]
        self.terms = d

    def __add__(self, other):
        d = dict(self.terms)
        for key, c in other.terms.items():
            acc = d.get(key)
            s = c if acc is None else acc + c
            if s:
                d[key] = s
            elif key in d:
                del d[key]
        out = TensorPolynomial.__new__(TensorPolynomial)
        out.terms = d
        return out

    def __neg__(self):
        out = TensorPolynomial.__new__(TensorPolynomial)
        out.terms = {k: -c for k, c in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c):
        if not c:
            return TensorPolynomial()
        return TensorPolynomial({k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        """Componentwise product (A (x) B)(C (x) D) = AC (x) BD."""
        d = {}
        for (a, b), c1 in self.terms.items():
            for (u, v), c2 in other.terms.items():
                c = c1 * c2
                if not c:
                    continue
                key = (a * u, b * v)
                acc = d.get(key)
                s = c if acc is None else acc + c
                if s:
                    d[key] = s
                elif key in d:
                    del d[key]
        out = TensorPolynomial.__new__(TensorPolynomial)
        out.terms = d
        return out

    def transpose(self):
        """Leg swap (A (x) B)^t = B (x) A."""
        return TensorPolynomial({(b, a): c for (a, b), c in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, TensorPolynomial) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "TensorPolynomial<0>"
        bits = [f"{c}*({a})(x)({b})" for (a, b), c in self.terms.items()]
        return "TensorPolynomial<" + " + ".join(bits) + ">"


class TripleTensorPolynomial:
    """Finite map (monomial, monomial, monomial) -> coefficient."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        d = {}
        if terms:
            for key, c in (terms.items() if isinstance(terms, dict) else terms):
                if c:
                    acc = d.get(key)
                    s = c if acc is None else acc + c
                    if s:
                        d[key] = s
                    elif key in d:
                        del d[key]
        self.terms = d

    def __add__(self, other):
        d = dict(self.terms)
        for key, c in other.terms.items():
            acc = d.get(key)
            s = c if acc is None else acc + c
            if s:
                d[key] = s
            elif key in d:
                del d[key]
        out = TripleTensorPolynomial.__new__(TripleTensorPolynomial)
        out.terms = d
        return out

    def scaled(self, c):
        if not c:
            return TripleTensorPolynomial()
        return TripleTensorPolynomial({k: v * c for k, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, TripleTensorPolynomial) and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)


# ---------------------------------------------------------------------------
# the differential calculus


def involution(P):
    """P |-> P*: words reversed, coefficients conjugated."""
    return as_polynomial(P).star()


def partial(i, P):
    """Free difference quotient in color ``i``.

    On a word the result is the sum of R (x) S over all splittings
    ``word = R x_i S``; on products it obeys the Leibniz rule.
    """
    _check_color(i)
    out = {}
    for mono, c in as_polynomial(P).terms.items():
        for p in range(len(mono)):
            if mono[p] == i:
                key = (_word(mono[:p]), _word(mono[p + 1:]))
                acc = out.get(key)
                s = c if acc is None else acc + c
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
    return TensorPolynomial(out)


def cyclic_derivative(i, P):
    """Cyclic derivative D_i: the sum of S R over splittings word = R x_i S."""
    _check_color(i)
    out = {}
    for mono, c in as_polynomial(P).terms.items():
        for p in range(len(mono)):
            if mono[p] == i:
                m = _word(mono[p + 1:] + mono[:p])
                acc = out.get(m)
                s = c if acc is None else acc + c
                if s:
                    out[m] = s
                elif m in out:
                    del out[m]
    return Polynomial(out)


def cyclic_gradient(P, m):
    """Tuple (D_1 P, ..., D_m P)."""
    return tuple(cyclic_derivative(i, P) for i in range(1, m + 1))


def partial2(i, P):
    """Iterated derivative: 2 * sum of R (x) S (x) Q over word = R x_i S x_i Q."""
    _check_color(i)
    out = {}
    for mono, c in as_polynomial(P).terms.items():
        pos = [p for p in range(len(mono)) if mono[p] == i]
        for a in range(len(pos)):
            for b in range(a + 1, len(pos)):
                p, q = pos[a], pos[b]
                key = (_word(mono[:p]), _word(mono[p + 1:q]), _word(mono[q + 1:]))
                c2 = 2 * c
                acc = out.get(key)
                s = c2 if acc is None else acc + c2
                if s:
                    out[key] = s
                elif key in out:
                    del out[key]
    return TripleTensorPolynomial(out)


def sharp(T, R):
    """Insertion (A (x) B) # R = A R B, extended bilinearly."""
    R = as_polynomial(R)
    acc = Polynomial.zero()
    for (a, b), c in T.terms.items():
        left = Polynomial.from_monomial(a, c)
        acc = acc + left * R * Polynomial.from_monomial(b)
    return acc


def sharp2(T, S, R):
    """Insertion (A (x) B (x) C) # (S, R) = A S B R C, extended multilinearly."""
    S = as_polynomial(S)
    R = as_polynomial(R)
    acc = Polynomial.zero()
    for (a, b, c), coeff in T.terms.items():
        acc = acc + (Polynomial.from_monomial(a, coeff) * S
                     * Polynomial.from_monomial(b) * R * Polynomial.from_monomial(c))
    return acc


def sigma(P):
    """Degree normalizer: each word of degree d >= 1 maps to word/d, constants to 0."""
    out = {}
    for mono, c in as_polynomial(P).terms.items():
        d = len(mono)
        if d:
            out[mono] = _divide(c, d)
    return Polynomial(out)


def sigma_inverse(P):
    """Multiply each word by its degree.  Constants are annihilated."""
    out = {}
    for mono, c in as_polynomial(P).terms.items():
        if mono:
            out[mono] = c * len(mono)
    return Polynomial(out)


def pi(P):
    """Constant-killing projection: P - P(0, ..., 0)."""
    return as_polynomial(P).without_constant()


def norm_A(P, A):
    """Weighted coefficient norm: sum of |coeff| * A**degree over nonconstant words.

    Only defined for A > 1.
    """
    A = float(A)
    if A <= 1.0:
        raise ValueError("norm_A requires A > 1")
    total = 0.0
    for mono, c in as_polynomial(P).terms.items():
        if mono:
            total += abs(c) * A ** len(mono)
    return total


def _divide(c, d):
    if isinstance(c, float) or isinstance(c, complex):
        return c / d
    if isinstance(c, QQi):
        return QQi(c.re / d, c.im / d)
    if isinstance(c, (int, Fraction)):
        return Fraction(c, d)
    return c * Fraction(1, d)  # series and other ring elements


def _check_color(i):
    if not isinstance(i, int) or i < 1:
        raise ValueError(f"color index out of range: {i!r}")


# ---------------------------------------------------------------------------
# potentials


class SelfAdjointnessError(ValueError):
    """Raised when a potential fails the trace-reality check."""


class PotentialTerm:
    __slots__ = ("label", "value", "monomial")

    def __init__(self, label, value, monomial):
        self.label = label
        self.value = value
        self.monomial = Monomial(monomial)

    def __repr__(self):
        return f"PotentialTerm({self.label!r}, {self.value!r}, {self.monomial})"

    def __eq__(self, other):
        return (isinstance(other, PotentialTerm)
                and (self.label, self.value, self.monomial)
                == (other.label, other.value, other.monomial))


class Potential:
    """A weighted list of interaction words t_j * q_j over m colors.

    Each term carries a coupling label (the formal series variable it
    contributes to; terms may share a label) and a numeric value used when
    the series is evaluated or when sampling.  ``validate=True`` enforces
    the trace-reality requirement: grouped by cyclic class, the total
    coefficient of the reversed class must be the conjugate of the class's
    own total.
    """

    def __init__(self, terms, m=None, validate=True):
        norm = []
        for j, t in enumerate(terms):
            if isinstance(t, PotentialTerm):
                norm.append(t)
            else:
                label, value, mono = t
                norm.append(PotentialTerm(label if label is not None else f"t{j + 1}",
                                          value, mono))
        self.terms = tuple(norm)
        if any(t.monomial.degree == 0 for t in self.terms):
            raise ValueError("constant terms are not allowed in a potential")
        inferred = max((max(t.monomial) for t in self.terms if t.monomial), default=1)
        self.m = int(m) if m is not None else inferred
        if inferred > self.m:
            raise ValueError(f"potential uses color {inferred} but m={self.m}")
        if validate:
            self.check_self_adjoint()

    @classmethod
    def zero(cls, m=1):
        return cls((), m=m)

    @property
    def n(self):
        return len(self.terms)

    @property
    def labels(self):
        seen = []
        for t in self.terms:
            if t.label not in seen:
                seen.append(t.label)
        return tuple(seen)

    @property
    def degree(self):
        return max((t.monomial.degree for t in self.terms), default=0)

    @property
    def coupling_bound(self):
        """max |t_j| over the numeric coupling values."""
        vals = [abs(t.value) for t in self.terms if t.value is not None]
        return max(vals, default=0.0)

    def values_by_label(self):
        out = {}
        for t in self.terms:
            if t.value is None:
                continue
            if t.label in out and out[t.label] != t.value:
                raise ValueError(f"label {t.label!r} carries two values")
            out[t.label] = t.value
        return out

    def as_polynomial(self):
        acc = Polynomial.zero()
        for t in self.terms:
            if t.value is None:
                raise ValueError("potential has symbolic couplings only")
            acc = acc + Polynomial.from_monomial(t.monomial, t.value)
        return acc

    def check_self_adjoint(self):
        """Trace-reality: conj(total coeff of class [q]) == total coeff of [q*]."""
        have_values = all(t.value is not None for t in self.terms)
        if have_values:
            totals = {}
            for t in self.terms:
                key = cyclic_canonical(t.monomial)
                totals[key] = totals.get(key, 0) + t.value
            for key, tot in totals.items():
                adj = cyclic_canonical(key.reversed())
                if totals.get(adj, 0) != conj_coeff(tot):
                    raise SelfAdjointnessError(
                        f"potential is not self-adjoint: class {key} has total "
                        f"coefficient {tot}, but class {adj} carries "
                        f"{totals.get(adj, 0)} instead of the conjugate")
        else:
            # symbolic couplings: each term's reversed word must appear
            # within the same label so that a real coupling value works
            by_label = {}
            for t in self.terms:
                by_label.setdefault(t.label, []).append(cyclic_canonical(t.monomial))
            for label, classes in by_label.items():
                for cls_ in classes:
                    if cyclic_canonical(cls_.reversed()) not in classes:
                        raise SelfAdjointnessError(
                            f"label {label!r}: class {cls_} lacks its adjoint partner")

    def cyclic_grad_pieces(self, i):
        """For each term, the word splittings entering D_i q_j.

        Returns a list of (term_index, [rotated words S R]) pairs.
        """
        out = []
        for j, t in enumerate(self.terms):
            mono = t.monomial
            pieces = [Monomial(mono[p + 1:] + mono[:p])
                      for p in range(len(mono)) if mono[p] == i]
            if pieces:
                out.append((j, pieces))
        return out

    def __repr__(self):
        bits = [f"{t.label}*{t.monomial}" for t in self.terms]
        return "Potential<" + (" + ".join(bits) if bits else "0") + f"; m={self.m}>"
