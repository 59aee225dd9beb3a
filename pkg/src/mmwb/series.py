"""Truncated multivariate formal power series in the coupling constants.

A :class:`CouplingSeries` is a finite map from multi-indices (one slot per
coupling label) to coefficients, truncated at a fixed total order.  All
arithmetic silently drops terms beyond the truncation order, which makes
products of order-K series exact through total order K.  Coefficients are
whatever ring the caller uses, exact ``Fraction`` by default.
"""

from __future__ import annotations

from fractions import Fraction

from .ncpoly import QQi, conj_coeff

_SCALARS = (int, float, complex, Fraction, QQi)


class CouplingSeries:
    __slots__ = ("labels", "order", "coeffs")

    def __init__(self, labels, order, coeffs=None):
        self.labels = tuple(labels)
        self.order = int(order)
        d = {}
        if coeffs:
            for k, c in (coeffs.items() if isinstance(coeffs, dict) else coeffs):
                k = tuple(k)
                if len(k) != len(self.labels):
                    raise ValueError(f"multi-index {k} does not match labels {self.labels}")
                if sum(k) > self.order or not c:
                    continue
                acc = d.get(k)
                s = c if acc is None else acc + c
                if s:
                    d[k] = s
                elif k in d:
                    del d[k]
        self.coeffs = d

    # -- constructors

    @classmethod
    def zero(cls, labels, order):
        return cls(labels, order)

    @classmethod
    def constant(cls, c, labels, order):
        s = cls(labels, order)
        if c:
            s.coeffs[(0,) * len(s.labels)] = c
        return s

    @classmethod
    def one(cls, labels, order):
        return cls.constant(Fraction(1), labels, order)

    @classmethod
    def variable(cls, label, labels, order):
        s = cls(labels, order)
        k = [0] * len(s.labels)
        k[s.labels.index(label)] = 1
        if order >= 1:
            s.coeffs[tuple(k)] = Fraction(1)
        return s

    # -- ring structure

    def _like(self, other):
        if isinstance(other, CouplingSeries):
            if other.labels != self.labels:
                raise ValueError(f"label mismatch: {self.labels} vs {other.labels}")
            return other
        if not isinstance(other, _SCALARS):
            return NotImplemented
        return CouplingSeries.constant(other, self.labels, self.order)

    def __add__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return NotImplemented
        order = min(self.order, other.order)
        out = CouplingSeries(self.labels, order)
        d = out.coeffs
        for src in (self.coeffs, other.coeffs):
            for k, c in src.items():
                if sum(k) > order:
                    continue
                acc = d.get(k)
                s = c if acc is None else acc + c
                if s:
                    d[k] = s
                elif k in d:
                    del d[k]
        return out

    __radd__ = __add__

    def __neg__(self):
        out = CouplingSeries(self.labels, self.order)
        out.coeffs = {k: -c for k, c in self.coeffs.items()}
        return out

    def __sub__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._like(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, CouplingSeries):
            if other.labels != self.labels:
                raise ValueError(f"label mismatch: {self.labels} vs {other.labels}")
            order = min(self.order, other.order)
            out = CouplingSeries(self.labels, order)
            d = out.coeffs
            for k1, c1 in self.coeffs.items():
                s1 = sum(k1)
                if s1 > order:
                    continue
                for k2, c2 in other.coeffs.items():
                    if s1 + sum(k2) > order:
                        continue
                    c = c1 * c2
                    if not c:
                        continue
                    k = tuple(a + b for a, b in zip(k1, k2))
                    acc = d.get(k)
                    s = c if acc is None else acc + c
                    if s:
                        d[k] = s
                    elif k in d:
                        del d[k]
            return out
        # scalar
        if not isinstance(other, _SCALARS):
            return NotImplemented
        if not other:
            return CouplingSeries(self.labels, self.order)
        out = CouplingSeries(self.labels, self.order)
        out.coeffs = {k: v for k, v in ((k, c * other) for k, c in self.coeffs.items()) if v}
        return out

    __rmul__ = __mul__

    # -- structure

    def shifted(self, label, scalar=1):
        """Multiply by scalar * t_label; terms pushed past the order vanish."""
        j = self.labels.index(label)
        out = CouplingSeries(self.labels, self.order)
        d = out.coeffs
        for k, c in self.coeffs.items():
            if sum(k) + 1 > self.order:
                continue
            c = c * scalar
            if not c:
                continue
            k2 = k[:j] + (k[j] + 1,) + k[j + 1:]
            d[k2] = c
        return out

    def truncated(self, order):
        return CouplingSeries(self.labels, min(order, self.order), self.coeffs)

    def coefficient(self, k):
        return self.coeffs.get(tuple(k), 0)

    @property
    def constant_coefficient(self):
        return self.coeffs.get((0,) * len(self.labels), 0)

    def min_order(self):
        return min((sum(k) for k in self.coeffs), default=None)

    def conjugate_coeffs(self):
        out = CouplingSeries(self.labels, self.order)
        out.coeffs = {k: conj_coeff(c) for k, c in self.coeffs.items()}
        return out

    def map_coefficients(self, f):
        return CouplingSeries(self.labels, self.order,
                              {k: f(c) for k, c in self.coeffs.items()})

    def evaluate(self, values):
        """Numeric value at couplings given as {label: value}."""
        vals = [values[lbl] for lbl in self.labels]
        total = 0
        for k, c in self.coeffs.items():
            x = c
            for v, e in zip(vals, k):
                for _ in range(e):
                    x = x * v
            total = total + x
        return _to_number(total)

    def items_sorted(self):
        return sorted(self.coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def __eq__(self, other):
        if isinstance(other, CouplingSeries):
            return (self.labels == other.labels and self.coeffs == other.coeffs)
        if not other:
            return not self.coeffs
        return self.coeffs == {(0,) * len(self.labels): other}

    def __bool__(self):
        return bool(self.coeffs)

    def __hash__(self):
        return hash((self.labels, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "Series<0>"
        bits = []
        for k, c in self.items_sorted():
            mono = "*".join(f"{lbl}^{e}" if e > 1 else lbl
                            for lbl, e in zip(self.labels, k) if e)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "Series<" + " + ".join(bits) + f"; O({self.order + 1})>"


def _to_number(x):
    if isinstance(x, Fraction):
        return float(x)
    if hasattr(x, "__complex__") and not isinstance(x, (int, float, complex)):
        z = complex(x)
        return z.real if z.imag == 0 else z
    return x


def multi_indices(nvars, max_total):
    """All multi-indices of the given width with total degree <= max_total."""
    if nvars == 0:
        yield ()
        return
    for head in range(max_total + 1):
        for rest in multi_indices(nvars - 1, max_total - head):
            yield (head,) + rest
