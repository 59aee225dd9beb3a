"""Colored-star map enumeration and the two generating-function recursions.

Stars encode monomials (one colored half-edge per letter, clockwise, with
the first slot distinguished); gluing same-colored half-edges pairwise
yields ribbon graphs whose genus comes from the Euler characteristic with
faces traced through the rotation system.  ``census`` enumerates all
matchings by brute force and stratifies connected ones by genus.

On top of the brute force sit the planar two-star generating function
``two_star_planar`` and the genus-one one-star generating function
``one_star_genus1``, both computed by peeling the first half-edge of the
leading star and both memoized on cyclic-canonical keys.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from ._census_core import census_counts
from .ncpoly import Monomial, cyclic_canonical
from .series import CouplingSeries, multi_indices

DEFAULT_HALF_EDGE_CAP = 20


class CensusCapExceeded(RuntimeError):
    """Raised when a brute-force request exceeds the half-edge cap."""


# ---------------------------------------------------------------------------
# explicit diagrams (the per-diagram oracle used to validate the fast kernel)


class Star:
    """A vertex with colored, cyclically ordered half-edge slots."""

    __slots__ = ("type_monomial",)

    def __init__(self, type_monomial):
        self.type_monomial = Monomial(type_monomial)

    @property
    def half_edges(self):
        return tuple(enumerate(self.type_monomial))

    @property
    def size(self):
        return self.type_monomial.degree

    def __eq__(self, other):
        return isinstance(other, Star) and self.type_monomial == other.type_monomial

    def __repr__(self):
        return f"Star({self.type_monomial})"


def star_from_monomial(q):
    """The star of type ``q``; rejected for the constant word."""
    q = Monomial(q)
    if q.degree == 0:
        raise ValueError("the unit monomial has no star")
    return Star(q)


class PairedDiagram:
    """Stars plus a perfect matching on their global slot indices.

    Slots are numbered star by star in order; ``matching`` is a collection
    of disjoint pairs covering every slot, allowed only between slots of
    equal color.
    """

    def __init__(self, stars, matching):
        self.stars = tuple(stars)
        pairs = tuple(tuple(sorted(p)) for p in matching)
        self.matching = tuple(sorted(pairs))
        n = sum(s.size for s in self.stars)
        seen = set()
        for a, b in self.matching:
            seen.update((a, b))
        if len(seen) != n or seen != set(range(n)) or 2 * len(self.matching) != n:
            raise ValueError("matching is not a perfect matching on the slots")
        colors = self._slot_colors()
        for a, b in self.matching:
            if colors[a] != colors[b]:
                raise ValueError(f"slots {a} and {b} have different colors")

    def _slot_colors(self):
        out = []
        for s in self.stars:
            out.extend(s.type_monomial)
        return out

    def _star_of_slot(self):
        out = []
        for i, s in enumerate(self.stars):
            out.extend([i] * s.size)
        return out


def is_connected(d):
    """True when the matching links all stars into one component."""
    if not d.stars:
        return True
    star_of = d._star_of_slot()
    parent = list(range(len(d.stars)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in d.matching:
        ra, rb = find(star_of[a]), find(star_of[b])
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in range(len(d.stars))}) == 1


def genus(d):
    """Genus of a connected gluing via 2 - 2g = V - E + F.

    Faces are the orbits of "cross the edge, then step to the next slot
    clockwise around the new star".
    """
    if not is_connected(d):
        raise ValueError("genus is only defined for connected diagrams")
    n = sum(s.size for s in d.stars)
    match = [0] * n
    for a, b in d.matching:
        match[a] = b
        match[b] = a
    succ = [0] * n
    pos = 0
    for s in d.stars:
        k = s.size
        for j in range(k):
            succ[pos + j] = pos + (j + 1) % k
        pos += k
    visited = [False] * n
    faces = 0
    for d0 in range(n):
        if not visited[d0]:
            faces += 1
            cur = d0
            while not visited[cur]:
                visited[cur] = True
                cur = succ[match[cur]]
    V = len(d.stars)
    E = n // 2
    g2 = 2 - V + E - faces
    if g2 % 2 or g2 < 0:
        raise AssertionError(f"Euler count gave 2g = {g2}")
    return g2 // 2


# ---------------------------------------------------------------------------
# brute-force census


class GenusCensus:
    """Connected gluings of a fixed star list, bucketed by genus."""

    __slots__ = ("counts", "disconnected")

    def __init__(self, counts, disconnected=0):
        self.counts = {int(g): int(c) for g, c in counts.items() if c}
        self.disconnected = int(disconnected)

    def genus_count(self, g):
        return self.counts.get(g, 0)

    @property
    def total(self):
        return sum(self.counts.values())

    @property
    def total_matchings(self):
        return self.total + self.disconnected

    def __getitem__(self, g):
        return self.counts.get(g, 0)

    def __eq__(self, other):
        return isinstance(other, GenusCensus) and self.counts == other.counts

    def __repr__(self):
        inner = ", ".join(f"g{g}: {c}" for g, c in sorted(self.counts.items()))
        return "GenusCensus{" + inner + "}"


_census_cache = {}


def census(stars, cap=DEFAULT_HALF_EDGE_CAP):
    """Brute-force genus census of all connected color-respecting gluings.

    ``stars`` may hold :class:`Star` objects or monomials.  Counts follow
    the labeled convention: stars and slots are distinguishable, so the
    census counts matchings.  Results are cached per star multiset up to
    rotation of each star, which leaves every count unchanged.
    """
    monos = [s.type_monomial if isinstance(s, Star) else Monomial(s) for s in stars]
    total = sum(m.degree for m in monos)
    if total > cap:
        raise CensusCapExceeded(
            f"{total} half-edges exceed the brute-force cap of {cap}")
    key = tuple(sorted(cyclic_canonical(m) for m in monos))
    hit = _census_cache.get(key)
    if hit is not None:
        return hit
    colors = [c for m in monos for c in m]
    sizes = [m.degree for m in monos]
    by_color = {}
    for c in colors:
        by_color[c] = by_color.get(c, 0) + 1
    if any(v % 2 for v in by_color.values()):
        result = GenusCensus({}, 0)
    else:
        counts, disconnected = census_counts(colors, sizes)
        result = GenusCensus(counts, disconnected)
    _census_cache[key] = result
    return result


def census_series(potential, order, genus_level, extra_stars=(),
                  cap=DEFAULT_HALF_EDGE_CAP):
    """Generating series of genus-``genus_level`` counts over the potential.

    The coefficient of the label multi-index kappa collects
    (-1)^|k| / prod k_j! times the census count of {k_j stars of type q_j}
    plus the fixed ``extra_stars``, folded from term multi-indices k to
    label multi-indices.  The empty index is included only when extra stars
    are present.
    """
    labels = potential.labels
    label_pos = {lbl: i for i, lbl in enumerate(labels)}
    out = CouplingSeries(labels, order)
    extra = [s.type_monomial if isinstance(s, Star) else Monomial(s)
             for s in extra_stars]
    base = sum(m.degree for m in extra)
    for k in multi_indices(potential.n, order):
        if sum(k) == 0 and not extra:
            continue
        stars = list(extra)
        for j, kj in enumerate(k):
            stars.extend([potential.terms[j].monomial] * kj)
        if base + sum(m.degree for m in stars[len(extra):]) > cap:
            raise CensusCapExceeded(
                f"multi-index {k} needs more than {cap} half-edges")
        count = census(stars, cap=cap).genus_count(genus_level)
        if not count:
            continue
        weight = Fraction((-1) ** sum(k) * count)
        for kj in k:
            weight /= factorial(kj)
        kappa = [0] * len(labels)
        for j, kj in enumerate(k):
            kappa[label_pos[potential.terms[j].label]] += kj
        kappa = tuple(kappa)
        out.coeffs[kappa] = out.coeffs.get(kappa, Fraction(0)) + weight
    out.coeffs = {k: c for k, c in out.coeffs.items() if c}
    return out


# ---------------------------------------------------------------------------
# generating-function recursions


def _mu_for(potential, order, mu=None):
    if mu is not None:
        return mu
    from .sdsolve import SolverConfig, solve

    return solve(potential, SolverConfig(mode="series", order=order,
                                         max_degree=max(potential.degree, 2)))


def two_star_planar(P, Q, potential, order, mu=None, _memo=None):
    """Generating function of planar maps with two fixed stars P and Q.

    Computed by the peeling recursion on the first half-edge of P: it glues
    either inside P (splitting it, with the limiting state tracing out one
    side), to a potential star (contracting it into P, one order higher in
    the couplings), or to Q (merging the two fixed stars into a one-star
    moment).  ``mu`` may supply a precomputed limiting state.
    """
    P = Monomial(P)
    Q = Monomial(Q)
    if P.degree == 0 or Q.degree == 0:
        raise ValueError("both fixed stars must be nonconstant")
    mu = _mu_for(potential, order, mu)
    memo = {} if _memo is None else _memo
    return _two_star(P, Q, potential, order, mu, memo)


def _two_star(P, Q, potential, order, mu, memo):
    labels = potential.labels
    if order < 0:
        return CouplingSeries(labels, 0)
    if P.degree == 0 or Q.degree == 0:
        return CouplingSeries(labels, order)
    cP, cQ = cyclic_canonical(P), cyclic_canonical(Q)
    key = (order,) + tuple(sorted((cP, cQ)))
    hit = memo.get(key)
    if hit is not None:
        return hit
    i = cP[0]
    rest = Monomial(cP[1:])
    acc = CouplingSeries(labels, order)
    # gluing inside P
    for p in range(rest.degree):
        if rest[p] == i:
            R = Monomial(rest[:p])
            S = Monomial(rest[p + 1:])
            if R.degree:
                acc = acc + mu.moment_series(S, order) * _two_star(R, Q, potential, order, mu, memo)
            if S.degree:
                acc = acc + mu.moment_series(R, order) * _two_star(S, Q, potential, order, mu, memo)
    # gluing to a potential star
    if order >= 1:
        for j, pieces in _grad_pieces(potential, i):
            t = potential.terms[j]
            for piece in pieces:
                sub = _two_star(piece * rest, Q, potential, order - 1, mu, memo)
                acc = acc - _embed(sub, labels, order).shifted(t.label)
    # gluing to Q
    for p in range(cQ.degree):
        if cQ[p] == i:
            piece = Monomial(cQ[p + 1:] + cQ[:p])
            acc = acc + mu.moment_series(piece * rest, order)
    memo[key] = acc
    return acc


def one_star_genus1(P, potential, order, mu=None, _memo=None):
    """Generating function of genus-one maps with one fixed star P.

    Same peeling as the planar case; a loop inside P either stays trivial
    (one side keeps the handle) or wraps the handle, which cuts the torus
    open and leaves a planar two-star count.
    """
    P = Monomial(P)
    if P.degree == 0:
        raise ValueError("the fixed star must be nonconstant")
    mu = _mu_for(potential, order, mu)
    memo = {} if _memo is None else _memo
    two_memo = {}
    return _genus1(P, potential, order, mu, memo, two_memo)


def _genus1(P, potential, order, mu, memo, two_memo):
    labels = potential.labels
    if order < 0:
        return CouplingSeries(labels, 0)
    if P.degree == 0:
        return CouplingSeries(labels, order)
    cP = cyclic_canonical(P)
    key = (order, cP)
    hit = memo.get(key)
    if hit is not None:
        return hit
    i = cP[0]
    rest = Monomial(cP[1:])
    acc = CouplingSeries(labels, order)
    for p in range(rest.degree):
        if rest[p] == i:
            R = Monomial(rest[:p])
            S = Monomial(rest[p + 1:])
            # trivial loop: the handle sits on one side
            acc = acc + mu.moment_series(S, order) * _genus1(R, potential, order, mu, memo, two_memo)
            acc = acc + mu.moment_series(R, order) * _genus1(S, potential, order, mu, memo, two_memo)
            # handle-wrapping loop: cutting it leaves a planar two-star map
            if R.degree and S.degree:
                acc = acc + _two_star(R, S, potential, order, mu, two_memo)
    if order >= 1:
        for j, pieces in _grad_pieces(potential, i):
            t = potential.terms[j]
            for piece in pieces:
                sub = _genus1(piece * rest, potential, order - 1, mu, memo, two_memo)
                acc = acc - _embed(sub, labels, order).shifted(t.label)
    memo[key] = acc
    return acc


def _grad_pieces(potential, i):
    cache = potential.__dict__.setdefault("_grad_cache", {})
    hit = cache.get(i)
    if hit is None:
        hit = potential.cyclic_grad_pieces(i)
        cache[i] = hit
    return hit


def _embed(series, labels, order):
    out = CouplingSeries(labels, order)
    out.coeffs = {k: c for k, c in series.coeffs.items() if sum(k) <= order}
    return out


def labeled_count(series, potential, term_multi_index):
    """Recover the labeled map count at a term multi-index from a series.

    Only meaningful when no two terms share a coupling label; with shared
    labels the series coefficient mixes several term multi-indices.
    """
    k = tuple(term_multi_index)
    labels = potential.labels
    if len(set(t.label for t in potential.terms)) != potential.n:
        raise ValueError("labels are shared; per-term counts are not separable")
    kappa = [0] * len(labels)
    for j, kj in enumerate(k):
        kappa[labels.index(potential.terms[j].label)] += kj
    coeff = series.coefficient(tuple(kappa))
    scale = Fraction((-1) ** sum(k))
    for kj in k:
        scale /= factorial(kj)
    return coeff / scale if scale else coeff
