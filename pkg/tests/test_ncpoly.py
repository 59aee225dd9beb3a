import random
from fractions import Fraction

import pytest

from mmwb.ncpoly import (Monomial, Polynomial, Potential, QQi,
                         SelfAdjointnessError, cyclic_canonical,
                         cyclic_derivative, involution, norm_A, partial,
                         partial2, pi, sharp, sharp2, sigma, sigma_inverse)


def mono(*letters):
    return Monomial(letters)


def P(*pairs):
    return Polynomial({Monomial(m): c for m, c in pairs})


def rand_poly(rng, m, max_deg, n_terms=5, constant_free=False):
    terms = {}
    for _ in range(n_terms):
        d = rng.randint(1 if constant_free else 0, max_deg)
        w = Monomial(tuple(rng.randint(1, m) for _ in range(d)))
        terms[w] = terms.get(w, 0) + Fraction(rng.randint(-4, 4))
    return Polynomial(terms)


def test_involution_examples():
    p = P(((1, 2), QQi(2, 1)))
    assert involution(p) == P(((2, 1), QQi(2, -1)))
    assert involution(Polynomial.one()) == Polynomial.one()
    sym = P(((1, 2), 1), ((2, 1), 1))
    assert involution(sym) == sym


def test_involution_is_an_involution_and_antimultiplicative():
    rng = random.Random(0)
    for _ in range(20):
        p = rand_poly(rng, 3, 5)
        q = rand_poly(rng, 3, 4)
        assert involution(involution(p)) == p
        assert involution(p * q) == involution(q) * involution(p)


def test_partial_examples():
    d = partial(1, P(((1, 2, 1), 1)))
    assert d.terms == {(mono(), mono(2, 1)): 1, (mono(1, 2), mono()): 1}
    assert not partial(1, P(((2,), 1)))
    d2 = partial(1, P(((1, 1), 1)))
    assert d2.terms == {(mono(), mono(1)): 1, (mono(1), mono()): 1}
    with pytest.raises(ValueError):
        partial(0, Polynomial.one())


def test_partial_leibniz_rule():
    rng = random.Random(1)
    for _ in range(15):
        p = rand_poly(rng, 2, 6, 3)
        q = rand_poly(rng, 2, 6, 3)
        for i in (1, 2):
            lhs = partial(i, p * q)
            one = Polynomial.one()
            rhs = (partial(i, p) * _tensor(p_one := one, q)
                   + _tensor(p, one) * partial(i, q))
            assert lhs == rhs


def _tensor(a, b):
    from mmwb.ncpoly import TensorPolynomial

    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            out[(m1, m2)] = c1 * c2
    return TensorPolynomial(out)


def test_cyclic_derivative_examples():
    assert cyclic_derivative(1, P(((1, 2, 3), 1))) == P(((2, 3), 1))
    assert cyclic_derivative(1, P(((1, 1, 1, 1), 1))) == P(((1, 1, 1), 4))
    assert not cyclic_derivative(1, P(((2, 3), 1)))


def test_partial2_examples():
    d = partial2(1, P(((1, 1), 1)))
    assert d.terms == {(mono(), mono(), mono()): 2}
    d = partial2(1, P(((1, 2, 1), 1)))
    assert d.terms == {(mono(), mono(2), mono()): 2}
    assert not partial2(1, P(((1,), 1)))


def test_sharp_examples():
    t = partial(1, P(((1,), 1)))  # 1 (x) 1
    assert sharp(t, P(((1, 2), 3))) == P(((1, 2), 3))
    from mmwb.ncpoly import TensorPolynomial, TripleTensorPolynomial

    t = TensorPolynomial({(mono(1), mono(2)): 1})
    assert sharp(t, P(((3,), 1))) == P(((1, 3, 2), 1))
    t3 = TripleTensorPolynomial({(mono(), mono(2), mono()): 1})
    assert sharp2(t3, P(((1,), 1)), P(((1,), 1))) == P(((1, 2, 1), 1))


def test_sigma_pi_and_euler_identity():
    assert sigma(P(((1, 2), 1))) == P(((1, 2), Fraction(1, 2)))
    assert sigma(Polynomial.one()) == Polynomial.zero()
    assert sigma(P(((1,), 1), ((1, 1), 1))) == P(((1,), 1), ((1, 1), Fraction(1, 2)))
    assert pi(P(((), 3), ((1,), 1))) == P(((1,), 1))
    assert pi(pi(P(((), 5)))) == Polynomial.zero()
    rng = random.Random(2)
    for _ in range(10):
        p = rand_poly(rng, 2, 6, constant_free=True)
        rebuilt = Polynomial.zero()
        for k in (1, 2):
            rebuilt = rebuilt + sharp(partial(k, sigma(p)), Polynomial.variable(k))
        assert rebuilt == p
        assert sigma_inverse(sigma(p)) == p


def test_mixed_partial_transpose_symmetry():
    rng = random.Random(3)
    for _ in range(10):
        p = rand_poly(rng, 2, 6)
        for k in (1, 2):
            for l in (1, 2):
                lhs = partial(k, cyclic_derivative(l, p))
                rhs = partial(l, cyclic_derivative(k, p)).transpose()
                assert lhs == rhs


def test_norm_examples():
    assert norm_A(P(((1,), 1)), 2) == 2
    assert norm_A(Polynomial.one(), 2) == 0
    assert norm_A(P(((1, 1), 2), ((2,), -1)), 2) == 10
    with pytest.raises(ValueError):
        norm_A(Polynomial.one(), 1)


def test_cyclic_canonical():
    assert cyclic_canonical(mono(2, 1)) == mono(1, 2)
    assert cyclic_canonical(mono(1, 2, 1, 2)) == mono(1, 2, 1, 2)
    assert cyclic_canonical(mono()) == mono()
    rng = random.Random(4)
    for _ in range(30):
        w = tuple(rng.randint(1, 3) for _ in range(rng.randint(1, 8)))
        canon = cyclic_canonical(Monomial(w))
        for s in range(len(w)):
            assert cyclic_canonical(Monomial(w[s:] + w[:s])) == canon


def test_exact_vs_float_backend_agreement():
    rng = random.Random(5)
    for _ in range(10):
        p = rand_poly(rng, 2, 6)
        q = rand_poly(rng, 2, 6)
        exact = (p * q) + involution(p)
        pf = p.map_coefficients(float)
        qf = q.map_coefficients(float)
        floaty = (pf * qf) + involution(pf)
        for w in set(exact.terms) | set(floaty.terms):
            assert abs(float(exact.coefficient(w)) - floaty.coefficient(w)) < 1e-12


def test_qqi_arithmetic():
    z = QQi(2, 1) * QQi(2, -1)
    assert z == QQi(5)
    assert QQi(1, 1) + 1 == QQi(2, 1)
    assert (QQi(0, 1) * QQi(0, 1)) == QQi(-1)
    assert bool(QQi(0, 0)) is False


def test_potential_validation():
    Potential([("t", Fraction(1, 2), mono(1, 1, 1, 1))], m=1)
    # x1*x2 is allowed: its reverse is cyclically the same word
    Potential([("b", 1, mono(1, 2))], m=2)
    with pytest.raises(SelfAdjointnessError):
        Potential([("c", QQi(1, 1), mono(1, 2))], m=2)
    # adding the conjugate partner fixes it
    Potential([("c", QQi(1, 1), mono(1, 1, 2)), ("c2", QQi(1, -1), mono(2, 1, 1))],
              m=2)
    with pytest.raises(ValueError):
        Potential([("t", 1, mono())], m=1)
    pot = Potential([("t", 0.3, mono(1, 1, 1, 1)), ("b", -0.5, mono(1, 2))], m=2)
    assert pot.coupling_bound == 0.5
    assert pot.degree == 4
    assert pot.labels == ("t", "b")
