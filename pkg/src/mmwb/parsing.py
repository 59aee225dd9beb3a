"""Text grammar for polynomials and potentials.

Terms are joined by ``+`` / ``-``.  A term is ``coeff*x<i>^<p>*x<j>^<p>...``
with the juxtaposed factors kept in written order (the product does not
commute).  The coefficient is optional (default 1) and may be a decimal,
a rational ``a/b``, or a parenthesized complex value such as ``(1+i)`` or
``(2-3i)``.  Whitespace is ignored everywhere.
"""

from __future__ import annotations

from fractions import Fraction

from .ncpoly import Monomial, Polynomial, Potential, QQi


class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


_NUM_CHARS = set("0123456789./")


class _Scanner:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self):
        ch = self.peek()
        self.pos += 1
        return ch

    def number(self):
        """A nonnegative decimal or rational a/b as an exact Fraction."""
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in _NUM_CHARS:
            self.pos += 1
        token = self.text[start:self.pos]
        if not token:
            raise ParseError("expected a number", start)
        try:
            if "/" in token:
                num, den = token.split("/")
                return Fraction(Fraction(num), Fraction(den))
            return Fraction(token)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad number {token!r}: {exc}", start) from None

    def integer(self):
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        token = self.text[start:self.pos]
        if not token:
            raise ParseError("expected an integer", start)
        return int(token)


def _complex_coeff(sc):
    """Parse '(a+bi)' style coefficients; returns QQi."""
    open_pos = sc.pos
    sc.take()  # '('
    sign1 = 1
    if sc.peek() in "+-":
        sign1 = -1 if sc.take() == "-" else 1
    if sc.peek() in "ij":
        sc.take()
        re1, im1, done = Fraction(0), sign1 * Fraction(1), False
    else:
        first = sign1 * sc.number()
        if sc.peek() in "ij":
            sc.take()
            re1, im1, done = Fraction(0), first, False
        else:
            re1, im1, done = first, Fraction(0), False
    re, im = re1, im1
    if not done and sc.peek() in "+-":
        sign2 = -1 if sc.take() == "-" else 1
        if sc.peek() in "ij":
            sc.take()
            part = Fraction(1)
        else:
            part = sc.number()
            if sc.peek() in "ij":
                sc.take()
            else:
                raise ParseError("second component of a complex coefficient "
                                 "must be imaginary", sc.pos)
        im = im + sign2 * part
    if sc.peek() != ")":
        raise ParseError("unterminated complex coefficient", open_pos)
    sc.take()
    return QQi(re, im)


def _term(sc, backend):
    """One product term: optional coefficient then x<i>[^p] factors."""
    coeff = None
    letters = []
    expect_factor = True
    while True:
        ch = sc.peek()
        if expect_factor and ch == "(":
            if coeff is not None or letters:
                raise ParseError("misplaced complex coefficient", sc.pos)
            coeff = _complex_coeff(sc)
        elif expect_factor and ch in _NUM_CHARS and ch != "":
            if coeff is not None or letters:
                raise ParseError("misplaced coefficient", sc.pos)
            coeff = sc.number()
        elif expect_factor and ch in "ij" and coeff is None and not letters:
            sc.take()
            coeff = QQi(0, 1)
        elif expect_factor and ch in "xX":
            sc.take()
            idx = sc.integer()
            if idx < 1:
                raise ParseError(f"color index must be >= 1, got {idx}", sc.pos)
            power = 1
            if sc.peek() == "^":
                sc.take()
                power = sc.integer()
            letters.extend([idx] * power)
        elif expect_factor:
            raise ParseError(f"expected a factor, found {ch!r}" if ch
                             else "expected a factor, found end of input", sc.pos)
        expect_factor = False
        if sc.peek() == "*":
            sc.take()
            expect_factor = True
            continue
        break
    if coeff is None:
        coeff = Fraction(1)
    if backend == "float":
        coeff = complex(coeff) if isinstance(coeff, QQi) else float(coeff)
    return Monomial(letters), coeff


def parse_polynomial(text, backend="exact"):
    """Parse the term grammar into a :class:`Polynomial`.

    ``backend`` selects exact (``Fraction`` / Gaussian rational) or floating
    coefficients.
    """
    if backend not in ("exact", "float"):
        raise ValueError(f"unknown backend {backend!r}")
    if not text or not text.strip():
        raise ParseError("empty input", 0)
    sc = _Scanner(text)
    terms = []
    sign = 1
    if sc.peek() in "+-":
        sign = -1 if sc.take() == "-" else 1
    while True:
        mono, coeff = _term(sc, backend)
        terms.append((mono, sign * coeff))
        ch = sc.peek()
        if ch == "":
            break
        if ch not in "+-":
            raise ParseError(f"expected '+' or '-', found {ch!r}", sc.pos)
        sign = -1 if sc.take() == "-" else 1
    return Polynomial(terms)


def parse_potential(text, m=None, backend="exact"):
    """Parse and validate a potential.

    Every monomial term becomes a coupling with an auto-assigned label
    ``t1..tn`` (equal monomials merge first).  Raises
    :class:`~mmwb.ncpoly.SelfAdjointnessError` when the trace-reality
    condition fails, naming the class that lacks its conjugate partner.
    """
    poly = parse_polynomial(text, backend=backend)
    if not poly:
        raise ParseError("potential is identically zero", 0)
    if poly.constant_term:
        raise ParseError("potential must not contain a constant term", 0)
    items = poly.items_sorted()
    terms = [(f"t{j + 1}", value, mono) for j, (mono, value) in enumerate(items)]
    return Potential(terms, m=m, validate=True)


def parse_monomial(text):
    """A single monomial like ``x1^2*x2``; coefficient must be 1."""
    poly = parse_polynomial(text, backend="exact")
    items = poly.items_sorted()
    if len(items) != 1 or items[0][1] != 1:
        raise ParseError(f"expected a plain monomial, got {text!r}", 0)
    return items[0][0]
