"""Ideals of A = k[x]/J with cached reduced Groebner bases.

Every ideal of A is handled through its preimage in k[x]: the relation ideal J
is pushed into each basis computation, so membership, colength, intersection
and colon in A reduce to the corresponding operations on ideals containing J.
"""

import hashlib
import threading
from functools import lru_cache

from ..errors import PreconditionError, StructuralError
from . import monomial
from .groebner import buchberger, degrevlex, elimination, interreduce, make_reducer
from .ring import Polynomial, PolyRing

INFINITE = monomial.INFINITE


@lru_cache(maxsize=None)
def drl_order(n):
    return degrevlex(n)


@lru_cache(maxsize=None)
def elim_order(n, elim):
    return elimination(n, elim)


def _dicts(polys):
    return [dict(f.terms) for f in polys if f.terms]


class QuotientRing:
    """A = k[x]/J for a free ring k[x] and a list of relations J."""

    def __init__(self, poly_ring, relations=()):
        self.poly_ring = poly_ring
        rels = []
        for f in relations:
            if not isinstance(f, Polynomial) or f.ring != poly_ring:
                raise StructuralError("relation is not a polynomial in the ambient ring")
            if f:
                rels.append(f)
        self.relations = tuple(rels)
        self._lock = threading.Lock()
        self._gb = None
        self._reducer = None

    @property
    def p(self):
        return self.poly_ring.p

    @property
    def nvars(self):
        return self.poly_ring.nvars

    @property
    def names(self):
        return self.poly_ring.names

    def __repr__(self):
        rel = ", ".join(str(f) for f in self.relations)
        return f"QuotientRing({list(self.names)} / ({rel}))"

    def relation_gb(self):
        with self._lock:
            if self._gb is None:
                self._gb = buchberger(_dicts(self.relations), self.p, drl_order(self.nvars))
                self._reducer = make_reducer(self._gb, self.p, drl_order(self.nvars))
            return self._gb

    def reduce(self, f):
        self.relation_gb()
        return Polynomial(self.poly_ring, self._reducer.reduce(f.terms))

    def is_zero(self, f):
        return not self.reduce(f)

    def quotient(self, extra):
        return QuotientRing(self.poly_ring, list(self.relations) + list(extra))

    def ideal(self, gens):
        return IdealHandle(self, gens)

    def unit_ideal(self):
        return IdealHandle(self, [self.poly_ring.one()])

    def maximal_ideal(self):
        return IdealHandle(self, self.poly_ring.gens())

    def check(self, f):
        if isinstance(f, str):
            return self.poly_ring(f)
        if not isinstance(f, Polynomial) or f.ring != self.poly_ring:
            raise StructuralError("element does not belong to the ambient ring")
        return f


class IdealHandle:
    """Generators of an ideal of A together with lazily cached derived data."""

    def __init__(self, ring, gens, _gb=None):
        if isinstance(ring, PolyRing):
            ring = QuotientRing(ring)
        self.ring = ring
        self.gens = tuple(g for g in (ring.check(f) for f in gens) if g)
        self._lock = threading.RLock()
        self._gb = _gb
        self._reducer = None
        self._colength = None
        self._powers = {}

    # -- Groebner data ----------------------------------------------------
    def gb_dicts(self):
        with self._lock:
            if self._gb is None:
                polys = _dicts(self.gens) + [dict(f) for f in self.ring.relation_gb()]
                self._gb = buchberger(polys, self.ring.p, drl_order(self.ring.nvars))
            return self._gb

    def groebner(self):
        return [Polynomial(self.ring.poly_ring, f) for f in self.gb_dicts()]

    def reducer(self):
        with self._lock:
            if self._reducer is None:
                self._reducer = make_reducer(self.gb_dicts(), self.ring.p, drl_order(self.ring.nvars))
            return self._reducer

    def reduce(self, f):
        f = self.ring.check(f)
        return Polynomial(self.ring.poly_ring, self.reducer().reduce(f.terms))

    def contains(self, f):
        return not self.reducer().reduce(self.ring.check(f).terms)

    def __contains__(self, f):
        return self.contains(f)

    def contains_ideal(self, other):
        self._compatible(other)
        return all(self.contains(g) for g in other.gens)

    def __le__(self, other):
        return other.contains_ideal(self)

    def __eq__(self, other):
        if not isinstance(other, IdealHandle):
            return NotImplemented
        self._compatible(other)
        return self.gb_dicts() == other.gb_dicts()

    def __hash__(self):
        return hash(self.fingerprint())

    def is_unit(self):
        gb = self.gb_dicts()
        return len(gb) == 1 and not any(next(iter(gb[0])))

    def is_zero(self):
        return all(self.ring.is_zero(g) for g in self.gens)

    def lead_monomials(self):
        order = drl_order(self.ring.nvars)
        return [order.lead(f) for f in self.gb_dicts()]

    def colength(self):
        with self._lock:
            if self._colength is None:
                self._colength = monomial.count_standard(self.lead_monomials(), self.ring.nvars)
            return self._colength

    def standard_monomials(self):
        return monomial.standard_monomials(self.lead_monomials(), self.ring.nvars)

    def is_homogeneous(self, weights=None):
        w = weights or self.ring.poly_ring.weights
        return all(g.is_homogeneous(w) for g in self.gens) and all(
            r.is_homogeneous(w) for r in self.ring.relations
        )

    def minimal_generators(self):
        """Generators of the reduced basis that are nonzero in A."""
        return [g for g in self.groebner() if not self.ring.is_zero(g)]

    # -- arithmetic -------------------------------------------------------
    def _compatible(self, other):
        if self.ring.poly_ring != other.ring.poly_ring or self.ring.relations != other.ring.relations:
            raise StructuralError("ideals live in different rings")

    def __add__(self, other):
        return ideal_sum(self, other)

    def __mul__(self, other):
        return ideal_product(self, other)

    def __pow__(self, n):
        return self.power(n)

    def power(self, n, cache=True):
        if n < 0:
            raise PreconditionError("power exponent must be >= 0")
        if n == 0:
            return self.ring.unit_ideal()
        if n == 1:
            return self
        with self._lock:
            if n in self._powers:
                return self._powers[n]
            known = [k for k in self._powers if k < n]
            k = max(known, default=1)
            cur = self._powers.get(k, self)
        while k < n:
            cur = ideal_product(cur, self, gens_from_gb=True)
            k += 1
            if cache:
                with self._lock:
                    self._powers[k] = cur
        return cur

    def fingerprint(self):
        text = "; ".join(str(g) for g in self.groebner())
        return hashlib.sha256(text.encode()).hexdigest()[:16]

    def render(self):
        return "(" + ", ".join(str(g) for g in self.minimal_generators()) + ")"

    def __repr__(self):
        return f"IdealHandle{self.render()}"


# -- operations ---------------------------------------------------------------

def groebner_basis(gens):
    """Reduced degrevlex Groebner basis of polynomials in one free ring."""
    gens = list(gens)
    if not gens:
        return []
    ring = gens[0].ring
    for g in gens:
        if not isinstance(g, Polynomial) or g.ring != ring:
            raise StructuralError("generators from mixed ambient rings")
    gb = buchberger(_dicts(gens), ring.p, drl_order(ring.nvars))
    return [Polynomial(ring, f) for f in gb]


def ideal_sum(a, b):
    a._compatible(b)
    return IdealHandle(a.ring, a.gens + b.gens)


def ideal_product(a, b, gens_from_gb=False):
    a._compatible(b)
    left = a.minimal_generators() if gens_from_gb else a.gens
    right = b.gens
    prods = {}
    for f in left:
        for g in right:
            h = a.ring.reduce(f * g)
            if h:
                prods[h.monic()] = None
    return IdealHandle(a.ring, list(prods))


def _intersect_dicts(ring, A, B):
    """Intersection of two ideals of k[x] (given by dict generators) by a tag variable."""
    n = ring.nvars
    p = ring.p
    polys = []
    for f in A:
        polys.append({e + (1,): c for e, c in f.items()})
    for g in B:
        d = {}
        for e, c in g.items():
            d[e + (0,)] = c
            d[e + (1,)] = (-c) % p
        polys.append(d)
    G = buchberger(polys, p, elim_order(n + 1, (n,)))
    res = [{e[:n]: c for e, c in g.items()} for g in G if all(e[n] == 0 for e in g)]
    return interreduce(res, p, drl_order(n))


def ideal_intersect(a, b):
    a._compatible(b)
    if a.is_unit():
        return b
    if b.is_unit():
        return a
    gb = _intersect_dicts(a.ring.poly_ring, a.gb_dicts(), b.gb_dicts())
    return IdealHandle(a.ring, [Polynomial(a.ring.poly_ring, f) for f in gb], _gb=gb)


def divide_exact(h, g, p, order):
    """Quotient h / g in k[x] when g divides h exactly (dict polynomials)."""
    h = dict(h)
    lg = order.lead(g)
    inv = pow(g[lg], -1, p)
    q = {}
    while h:
        lh = order.lead(h)
        mono = tuple(a - b for a, b in zip(lh, lg))
        if any(v < 0 for v in mono):
            raise ArithmeticError("divisor does not divide exactly")
        c = h[lh] * inv % p
        q[mono] = c
        for e, v in g.items():
            ne = tuple(a + b for a, b in zip(e, mono))
            nv = (h.get(ne, 0) - c * v) % p
            if nv:
                h[ne] = nv
            else:
                h.pop(ne, None)
    return q


def ideal_colon_element(a, g):
    """(a : g) for a single element g of the ambient ring."""
    ring = a.ring
    g = ring.check(g)
    if ring.is_zero(g):
        return ring.unit_ideal()
    gd = dict(g.terms)
    inter = _intersect_dicts(ring.poly_ring, a.gb_dicts(), [gd])
    order = drl_order(ring.nvars)
    quots = [divide_exact(f, gd, ring.p, order) for f in inter]
    return IdealHandle(ring, [Polynomial(ring.poly_ring, q) for q in quots])


def ideal_colon(a, b):
    a._compatible(b)
    result = None
    for g in b.gens:
        c = ideal_colon_element(a, g)
        result = c if result is None else ideal_intersect(result, c)
        if result.contains_ideal(a) and result == a:
            break
    return result if result is not None else a.ring.unit_ideal()


def ideal_saturate(a, b, max_steps=64):
    cur = a
    for _ in range(max_steps):
        nxt = ideal_colon(cur, b)
        if nxt == cur:
            return cur
        cur = nxt
    raise PreconditionError("saturation did not stabilize")


def ideal_eliminate(a, names):
    """Elimination ideal (I + J) cap k[remaining variables], in a new free ring."""
    ring = a.ring.poly_ring
    idx = tuple(ring.names.index(nm) for nm in names)
    keep = [i for i in range(ring.nvars) if i not in idx]
    G = buchberger(a.gb_dicts(), ring.p, elim_order(ring.nvars, idx))
    sub = PolyRing([ring.names[i] for i in keep], ring.p, [ring.weights[i] for i in keep])
    res = []
    for g in G:
        if all(all(e[i] == 0 for i in idx) for e in g):
            res.append(Polynomial(sub, {tuple(e[i] for i in keep): c for e, c in g.items()}))
    return IdealHandle(QuotientRing(sub), res)


def ideal_op(kind, *args):
    """Dispatch for the ideal operations sum, product, power, intersect, colon, eliminate, saturate."""
    ops = {
        "sum": ideal_sum,
        "product": ideal_product,
        "power": lambda i, n: i.power(n),
        "intersect": ideal_intersect,
        "colon": ideal_colon,
        "eliminate": ideal_eliminate,
        "saturate": ideal_saturate,
    }
    if kind not in ops:
        raise PreconditionError(f"unknown ideal operation {kind!r}")
    return ops[kind](*args)


def colength(ideal):
    return ideal.colength()
