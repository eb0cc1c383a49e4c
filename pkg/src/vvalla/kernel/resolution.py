"""Minimal graded free resolutions of S/I over a (weighted) polynomial ring S."""

from collections import defaultdict

from ..errors import StructuralError, UnsupportedError
from .ideal import IdealHandle, QuotientRing
from .module import FreeModuleElement, Submodule, syzygies
from .ring import Polynomial, PolyRing


class BettiTable:
    """Graded Betti numbers beta_{i,j}: homological degree i, internal degree j."""

    def __init__(self, entries=None):
        self.entries = {k: v for k, v in (entries or {}).items() if v}

    def __getitem__(self, key):
        return self.entries.get(key, 0)

    def totals(self):
        if not self.entries:
            return []
        top = max(i for i, _ in self.entries)
        out = [0] * (top + 1)
        for (i, _), v in self.entries.items():
            out[i] += v
        return out

    @property
    def projective_dimension(self):
        return len(self.totals()) - 1

    def degrees(self, i):
        return sorted(j for (h, j), v in self.entries.items() if h == i for _ in range(v))

    def to_dict(self):
        return {f"{i},{j}": v for (i, j), v in sorted(self.entries.items())}

    def __eq__(self, other):
        return isinstance(other, BettiTable) and self.entries == other.entries

    def __repr__(self):
        return f"BettiTable(totals={self.totals()})"


def _as_ideal(presentation):
    if isinstance(presentation, QuotientRing):
        return IdealHandle(QuotientRing(presentation.poly_ring), presentation.relations)
    if isinstance(presentation, IdealHandle):
        if presentation.ring.relations:
            rels = list(presentation.ring.relations) + list(presentation.gens)
            return IdealHandle(QuotientRing(presentation.ring.poly_ring), rels)
        return presentation
    raise StructuralError("expected a quotient ring or an ideal")


def _minimalize(ring, rank, elems, degs):
    """Drop elements lying in the span of earlier ones, processing by degree."""
    order = sorted(range(len(elems)), key=lambda i: degs[i])
    kept, kdeg = [], []
    for i in order:
        if kept and Submodule(ring, rank, kept).contains(elems[i]):
            continue
        kept.append(elems[i])
        kdeg.append(degs[i])
    return kept, kdeg


def min_free_resolution(presentation, max_length=None):
    """Minimal graded free resolution of S/I; returns (BettiTable, projective dimension).

    ``presentation`` is an IdealHandle (resolving S/(I + J)) or a QuotientRing.
    Degrees use the weights of the ambient ring.
    """
    ideal = _as_ideal(presentation)
    ring = ideal.ring
    S = ring.poly_ring
    w = S.weights
    gens = [g for g in ideal.groebner()]
    if not all(g.is_homogeneous(w) for g in ideal.gens):
        raise UnsupportedError("free resolutions are only computed for homogeneous input")
    betti = defaultdict(int)
    betti[(0, 0)] = 1
    if not gens:
        return BettiTable(betti), 0
    if any(g.is_constant() for g in gens):
        return BettiTable({}), -1
    elems = [FreeModuleElement((g,)) for g in gens]
    degs = [g.wdegree(w) for g in gens]
    elems, degs = _minimalize(ring, 1, elems, degs)
    level = 1
    rank = 1
    shifts = [0]
    while elems:
        for d in degs:
            betti[(level, d)] += 1
        if max_length is not None and level >= max_length:
            break
        syz = syzygies(ring, elems, rank)
        shifts = degs
        rank = len(elems)
        nd = [v.degree(shifts, w) for v in syz]
        elems, degs = _minimalize(ring, rank, syz, nd)
        level += 1
    table = BettiTable(betti)
    return table, table.projective_dimension


def prune_linear(ideal):
    """Eliminate variables v with a basis element v - h (h free of v).

    Returns (ideal in the smaller ring, number of variables removed); the
    quotient rings are isomorphic.
    """
    ideal = _as_ideal(ideal)
    removed = 0
    while True:
        S = ideal.ring.poly_ring
        target = None
        for g in ideal.groebner():
            lm = g.lead_monomial()
            if sum(lm) == 1:
                v = lm.index(1)
                if all(e[v] == 0 for e in g.terms if e != lm):
                    target = (v, g)
                    break
        if target is None or S.nvars == 0:
            return ideal, removed
        v, g = target
        keep = [i for i in range(S.nvars) if i != v]
        sub = PolyRing([S.names[i] for i in keep], S.p, [S.weights[i] for i in keep])
        # v = -(g - v) since g is monic in v
        h = S.var(S.names[v]) - g
        images = []
        for i in range(S.nvars):
            if i == v:
                images.append(h.substitute([sub.var(S.names[j]) if j != v else sub.zero() for j in range(S.nvars)], sub))
            else:
                images.append(sub.var(S.names[i]))
        new = [f.substitute(images, sub) for f in ideal.gens]
        ideal = IdealHandle(QuotientRing(sub), [f for f in new if f])
        removed += 1


def depth_by_resolution(presentation):
    """depth of S/I via Auslander-Buchsbaum after pruning linear variables."""
    pruned, _ = prune_linear(presentation)
    _, pd = min_free_resolution(pruned)
    return pruned.ring.nvars - pd, pd
