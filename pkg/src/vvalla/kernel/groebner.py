"""Buchberger's algorithm over F_p on raw exponent-tuple dictionaries.

The engine is shared by ideals and submodules of free modules. A module term
``x^a e_i`` is encoded as an exponent tuple ``a + (0,..,1,..,0)`` whose last
``rank`` slots mark the position; S-pairs are only formed between elements
with the same position and the product criterion is disabled in that mode.

Pair handling follows the Gebauer-Moeller update; pairs are selected by sugar
degree, ties broken by the order on the lcm.
"""

from heapq import heapify, heappop, heappush
from itertools import count
from operator import le

from .ring import _drl
from .monomial import minimalize


class MonomialOrder:
    """A monomial order given by an integer-tuple key (larger key = larger monomial)."""

    def __init__(self, name, keyfn, nx, rank=0):
        self.name = name
        self._keyfn = keyfn
        self.nx = nx
        self.rank = rank
        self._key = {}
        self._nkey = {}

    def key(self, e):
        k = self._key.get(e)
        if k is None:
            k = self._key[e] = self._keyfn(e)
        return k

    def nkey(self, e):
        k = self._nkey.get(e)
        if k is None:
            k = self._nkey[e] = tuple(-v for v in self.key(e))
        return k

    def lead(self, poly):
        return max(poly, key=self.key)


def degrevlex(n):
    return MonomialOrder("degrevlex", _drl, n)


def elimination(n, elim):
    """Order eliminating the variables with indices in ``elim`` (weight then degrevlex)."""
    elim = tuple(elim)

    def key(e):
        return (sum(e[i] for i in elim),) + _drl(e)

    return MonomialOrder(f"elim{elim}", key, n)


def position_over_term(nx, rank):
    """POT module order: position 0 is the largest, degrevlex within a position."""

    def key(e):
        pos = e.index(1, nx) - nx
        return (-pos,) + _drl(e[:nx])

    return MonomialOrder("pot", key, nx, rank)


class Reducer:
    """Monic polynomials indexed by leading monomial for normal-form computation."""

    def __init__(self, p, order):
        self.p = p
        self.order = order
        self.clear()

    def clear(self):
        self.leads = []
        self.tails = []
        self._memo = {}  # monomial -> index of a dividing lead, or None

    def add(self, lead, poly):
        self.leads.append(lead)
        self.tails.append([(e, c) for e, c in poly.items() if e != lead])
        self._memo = {}

    def find(self, m):
        memo = self._memo
        if m in memo:
            return memo[m]
        j = None
        for i, lead in enumerate(self.leads):
            if all(map(le, lead, m)):
                j = i
                break
        memo[m] = j
        return j

    def reduce(self, f):
        """Full normal form of ``f`` (a dict); returns a new dict."""
        if not f or not self.leads:
            return dict(f)
        p = self.p
        nkey = self.order.nkey
        acc = dict(f)
        heap = [(nkey(e), e) for e in acc]
        heapify(heap)
        out = {}
        leads = self.leads
        tails = self.tails
        find = self.find
        while heap:
            m = heappop(heap)[1]
            c = acc.pop(m)
            if not c:
                continue
            j = find(m)
            if j is None:
                out[m] = c
                continue
            lead = leads[j]
            q = tuple(a - b for a, b in zip(m, lead))
            for e, cc in tails[j]:
                ne = tuple(a + b for a, b in zip(e, q))
                v = acc.get(ne)
                if v is None:
                    acc[ne] = (-c * cc) % p
                    heappush(heap, (nkey(ne), ne))
                else:
                    acc[ne] = (v - c * cc) % p
        return out


def _monic(f, lead, p):
    c = f[lead]
    if c == 1:
        return f
    inv = pow(c, -1, p)
    return {e: v * inv % p for e, v in f.items()}


def buchberger(polys, p, order):
    """Reduced Groebner basis (list of monic dicts, descending by lead) of ``polys``."""
    nx, rank = order.nx, order.rank
    live = [f for f in polys if any(c % p for c in f.values())]
    if rank == 0 and all(len(f) == 1 for f in live):
        # monomial ideals: the minimal generators are the reduced basis
        gens = minimalize(e for f in live for e in f)
        return [{e: 1} for e in sorted(gens, key=order.key, reverse=True)]
    module = rank > 0
    key = order.key

    def pos(e):
        return e.index(1, nx) if module else 0

    basis = []
    leads = []
    sugars = []
    active = []
    pairs = {}
    heap = []
    tick = count()
    reducer = Reducer(p, order)

    def rebuild():
        reducer.clear()
        for i in active:
            reducer.add(leads[i], basis[i])

    def coprime(a, b):
        return not module and not any(x and y for x, y in zip(a, b))

    def update(f, lead, sugar):
        k = len(basis)
        basis.append(f)
        leads.append(lead)
        sugars.append(sugar)
        lh = lead
        ph = pos(lh)
        cands = []
        for i in active:
            li = leads[i]
            if pos(li) != ph:
                continue
            cands.append((i, tuple(map(max, li, lh))))
        kept = []
        for idx, (i, lcm) in enumerate(cands):
            if coprime(leads[i], lh):
                kept.append((i, lcm))
                continue
            dominated = False
            for _, l2 in cands[idx + 1:]:
                if all(map(le, l2, lcm)):
                    dominated = True
                    break
            if not dominated:
                for _, l2 in kept:
                    if all(map(le, l2, lcm)):
                        dominated = True
                        break
            if not dominated:
                kept.append((i, lcm))
        for (i, j), (s, lcm) in list(pairs.items()):
            if all(map(le, lh, lcm)):
                lih = tuple(map(max, leads[i], lh))
                ljh = tuple(map(max, leads[j], lh))
                if lih != lcm and ljh != lcm:
                    del pairs[(i, j)]
        for i, lcm in kept:
            if coprime(leads[i], lh):
                continue
            si = sugars[i] + sum(lcm[:nx]) - sum(leads[i][:nx])
            sk = sugar + sum(lcm[:nx]) - sum(lh[:nx])
            s = max(si, sk)
            pairs[(i, k)] = (s, lcm)
            heappush(heap, (s, key(lcm), next(tick), i, k))
        active[:] = [i for i in active if not all(map(le, lh, leads[i]))]
        active.append(k)
        rebuild()

    def is_unit(lead):
        return not any(lead[:nx])

    inputs = [dict(f) for f in polys if f]
    inputs.sort(key=lambda f: key(order.lead(f)))
    for f in inputs:
        f = reducer.reduce(f)
        if not f:
            continue
        lead = order.lead(f)
        f = _monic(f, lead, p)
        if not module and is_unit(lead):
            return [{lead: 1}]
        update(f, lead, max(sum(e[:nx]) for e in f))

    while heap:
        s, _, _, i, j = heappop(heap)
        data = pairs.pop((i, j), None)
        if data is None:
            continue
        lcm = data[1]
        fi, fj = basis[i], basis[j]
        qi = tuple(a - b for a, b in zip(lcm, leads[i]))
        qj = tuple(a - b for a, b in zip(lcm, leads[j]))
        spoly = {}
        for e, c in fi.items():
            ne = tuple(a + b for a, b in zip(e, qi))
            spoly[ne] = c
        for e, c in fj.items():
            ne = tuple(a + b for a, b in zip(e, qj))
            v = (spoly.get(ne, 0) - c) % p
            if v:
                spoly[ne] = v
            else:
                spoly.pop(ne, None)
        h = reducer.reduce(spoly)
        if not h:
            continue
        lead = order.lead(h)
        h = _monic(h, lead, p)
        if not module and is_unit(lead):
            return [{lead: 1}]
        update(h, lead, s)

    return interreduce([basis[i] for i in active], p, order)


def interreduce(polys, p, order):
    """Turn a minimal Groebner basis into the reduced one, sorted descending by lead."""
    polys = [dict(f) for f in polys if f]
    leads = [order.lead(f) for f in polys]
    keep = []
    for i, li in enumerate(leads):
        dominated = False
        for j, lj in enumerate(leads):
            if j != i and all(map(le, lj, li)) and (lj != li or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    polys = [_monic(polys[i], leads[i], p) for i in keep]
    leads = [leads[i] for i in keep]
    out = []
    for i, f in enumerate(polys):
        red = Reducer(p, order)
        for j, g in enumerate(polys):
            if j != i:
                red.add(leads[j], g)
        tail = {e: c for e, c in f.items() if e != leads[i]}
        tail = red.reduce(tail)
        tail[leads[i]] = 1
        out.append((leads[i], tail))
    out.sort(key=lambda lf: order.key(lf[0]), reverse=True)
    return [f for _, f in out]


def make_reducer(gb, p, order):
    red = Reducer(p, order)
    for f in gb:
        red.add(order.lead(f), f)
    return red
