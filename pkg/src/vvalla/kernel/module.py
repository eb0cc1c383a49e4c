"""Submodules of free modules A^r, syzygies and lengths of subquotients.

A module element is a tuple of Polynomials. Internally it is encoded as one
dict over exponent tuples of length nvars + rank (see groebner.py).
"""

import threading
from functools import lru_cache

from ..errors import PreconditionError, StructuralError
from . import monomial
from .groebner import buchberger, make_reducer, position_over_term
from .ideal import IdealHandle, QuotientRing, drl_order
from .ring import Polynomial

INFINITE = monomial.INFINITE


@lru_cache(maxsize=None)
def pot_order(nx, rank):
    return position_over_term(nx, rank)


def _unit(i, rank):
    return tuple(int(j == i) for j in range(rank))


def encode(coords, rank):
    out = {}
    for i, f in enumerate(coords):
        u = _unit(i, rank)
        for e, c in f.terms.items():
            out[e + u] = c
    return out


def decode(d, poly_ring, rank):
    nx = poly_ring.nvars
    comps = [dict() for _ in range(rank)]
    for e, c in d.items():
        comps[e.index(1, nx) - nx][e[:nx]] = c
    return tuple(Polynomial(poly_ring, t) for t in comps)


class FreeModuleElement(tuple):
    """An element of A^r as a tuple of coordinates."""

    def __new__(cls, coords):
        coords = tuple(coords)
        if coords:
            ring = coords[0].ring
            if any(c.ring != ring for c in coords):
                raise StructuralError("coordinates from different rings")
        return super().__new__(cls, coords)

    @property
    def rank(self):
        return len(self)

    def is_zero(self):
        return not any(self)

    def degree(self, shifts=None, weights=None):
        """Weighted degree of a homogeneous element (basis degrees given by ``shifts``)."""
        shifts = shifts or [0] * len(self)
        for f, s in zip(self, shifts):
            if f:
                return f.wdegree(weights) + s
        return None

    def __str__(self):
        return "[" + ", ".join(str(f) for f in self) + "]"


class Submodule:
    """Submodule of A^rank generated by ``elements``, with a POT Groebner basis."""

    def __init__(self, ring, rank, elements):
        if not isinstance(ring, QuotientRing):
            ring = QuotientRing(ring)
        self.ring = ring
        self.rank = rank
        elems = []
        for v in elements:
            v = FreeModuleElement(v)
            if v.rank != rank:
                raise StructuralError("element rank does not match the free module")
            if not v.is_zero():
                elems.append(v)
        self.elements = elems
        self._lock = threading.Lock()
        self._gb = None
        self._reducer = None

    def _relation_elements(self):
        out = []
        for g in self.ring.relation_gb():
            for i in range(self.rank):
                u = _unit(i, self.rank)
                out.append({e + u: c for e, c in g.items()})
        return out

    def gb_dicts(self):
        with self._lock:
            if self._gb is None:
                polys = [encode(v, self.rank) for v in self.elements] + self._relation_elements()
                order = pot_order(self.ring.nvars, self.rank)
                self._gb = buchberger(polys, self.ring.p, order)
                self._reducer = make_reducer(self._gb, self.ring.p, order)
            return self._gb

    def groebner(self):
        return [FreeModuleElement(decode(d, self.ring.poly_ring, self.rank)) for d in self.gb_dicts()]

    def reduce(self, v):
        self.gb_dicts()
        d = self._reducer.reduce(encode(v, self.rank))
        return FreeModuleElement(decode(d, self.ring.poly_ring, self.rank))

    def contains(self, v):
        self.gb_dicts()
        return not self._reducer.reduce(encode(v, self.rank))

    def lead_monomials_by_position(self):
        nx = self.ring.nvars
        order = pot_order(nx, self.rank)
        out = [[] for _ in range(self.rank)]
        for d in self.gb_dicts():
            lead = order.lead(d)
            out[lead.index(1, nx) - nx].append(lead[:nx])
        return out

    def colength(self):
        """Length of A^rank / self, or INFINITE."""
        total = 0
        for leads in self.lead_monomials_by_position():
            c = monomial.count_standard(leads, self.ring.nvars)
            if c == INFINITE:
                return INFINITE
            total += c
        return total


def syzygies(ring, elements, rank=None):
    """Generators of {a in A^k : sum a_i v_i = 0} for module elements v_1..v_k of A^rank.

    Plain polynomials are accepted as elements of A^1.
    """
    if not isinstance(ring, QuotientRing):
        ring = QuotientRing(ring)
    elems = [FreeModuleElement((v,)) if isinstance(v, Polynomial) else FreeModuleElement(v) for v in elements]
    if rank is None:
        rank = elems[0].rank if elems else 1
    k = len(elems)
    if k == 0:
        return []
    nx = ring.nvars
    total = rank + k
    polys = []
    for i, v in enumerate(elems):
        d = encode(v, total)
        tag = _unit(rank + i, total)
        d[(0,) * nx + tag] = 1
        polys.append(d)
    for g in ring.relation_gb():
        for i in range(rank):
            u = _unit(i, total)
            polys.append({e + u: c for e, c in g.items()})
    order = pot_order(nx, total)
    gb = buchberger(polys, ring.p, order)
    out = []
    for d in gb:
        if all(e.index(1, nx) - nx >= rank for e in d):
            proj = {}
            for e, c in d.items():
                pos = e.index(1, nx) - nx - rank
                proj[e[:nx] + _unit(pos, k)] = c
            out.append(FreeModuleElement(decode(proj, ring.poly_ring, k)))
    return out


def hilbert_difference_length(U, W):
    """ell(U/W) from Hilbert series of A/W and A/U (homogeneous inputs)."""
    w = U.ring.poly_ring.weights
    nu = monomial.hilbert_numerator(U.lead_monomials(), w)
    nw = monomial.hilbert_numerator(W.lead_monomials(), w)
    diff = monomial.zpoly_add(nw, nu, sign=-1)
    try:
        q = monomial.divide_by_denominator(diff, w)
    except ValueError:
        return INFINITE
    return sum(q.values())


def cokernel_length(U, W):
    """ell(U/W) by presenting U/W = A^k / {a : sum a_i u_i in W}."""
    ring = U.ring
    gens = [g for g in U.minimal_generators()]
    k = len(gens)
    if k == 0:
        return 0
    total = 1 + k
    nx = ring.nvars
    polys = []
    for i, g in enumerate(gens):
        d = encode((g,), total)
        d[(0,) * nx + _unit(1 + i, total)] = 1
        polys.append(d)
    for w in list(W.gb_dicts()):
        polys.append({e + _unit(0, total): c for e, c in w.items()})
    for g in ring.relation_gb():
        for i in range(total):
            polys.append({e + _unit(i, total): c for e, c in g.items()})
    order = pot_order(nx, total)
    gb = buchberger(polys, ring.p, order)
    leads = [[] for _ in range(k)]
    for d in gb:
        lead = order.lead(d)
        pos = lead.index(1, nx) - nx
        if pos >= 1:
            leads[pos - 1].append(lead[:nx])
    out = 0
    for ls in leads:
        c = monomial.count_standard(ls, nx)
        if c == INFINITE:
            return INFINITE
        out += c
    return out


ROUTES = ("colength", "hilbert", "module")


def subquotient_length(U, W, route=None):
    """ell(U/W) for ideals W inside U of the same ring.

    Without ``route`` the cheapest applicable method is used: colength
    difference when both are finite, Hilbert series difference for
    homogeneous input, and the syzygy cokernel otherwise.
    """
    if not isinstance(U, IdealHandle) or not isinstance(W, IdealHandle):
        raise StructuralError("subquotient_length expects ideals")
    U._compatible(W)
    if not U.contains_ideal(W):
        raise PreconditionError("W is not contained in U")
    if route is None:
        cu, cw = U.colength(), W.colength()
        if cu != INFINITE and cw != INFINITE:
            return cw - cu
        if U.is_homogeneous() and W.is_homogeneous():
            return hilbert_difference_length(U, W)
        return cokernel_length(U, W)
    if route == "colength":
        cu, cw = U.colength(), W.colength()
        if cu == INFINITE or cw == INFINITE:
            raise PreconditionError("colength route needs finite colengths")
        return cw - cu
    if route == "hilbert":
        if not (U.is_homogeneous() and W.is_homogeneous()):
            raise PreconditionError("Hilbert route needs homogeneous ideals")
        return hilbert_difference_length(U, W)
    if route == "module":
        return cokernel_length(U, W)
    raise PreconditionError(f"unknown route {route!r}")
