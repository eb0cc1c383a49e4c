"""Graded-local model A = k[x_1..x_n]/J of a Cohen-Macaulay local ring at m = (x).

The relations must be homogeneous for some positive weight vector; the
weights are detected automatically when not given (the cusp y^3 - x^4 needs
weights (3, 4)). All objects handled downstream are supported at m only, so
exact computations in the polynomial model agree with the local ring.
"""

import itertools
import logging
import math
import threading
from dataclasses import dataclass, field

from .errors import NotMPrimaryError, PreconditionError
from .kernel import monomial
from .kernel.ideal import INFINITE, IdealHandle, QuotientRing
from .kernel.resolution import depth_by_resolution
from .kernel.ring import DEFAULT_CHARACTERISTIC, Polynomial, PolyRing

log = logging.getLogger(__name__)

POWER_CACHE_BOUND = 12
MAX_WEIGHT = 12


def detect_weights(names, p, relations):
    """Smallest positive weight vector making every relation homogeneous, or None."""
    n = len(names)
    plain = PolyRing(names, p)
    polys = [plain(r) if isinstance(r, str) else Polynomial(plain, dict(r.terms)) for r in relations]
    if all(f.is_homogeneous((1,) * n) for f in polys):
        return (1,) * n
    for total in range(n + 1, n * MAX_WEIGHT + 1):
        for w in _compositions(total, n, MAX_WEIGHT):
            if math.gcd(*w) != 1:
                continue
            if all(f.is_homogeneous(w) for f in polys):
                return w
    return None


def _compositions(total, parts, cap):
    if parts == 1:
        if 1 <= total <= cap:
            yield (total,)
        return
    for first in range(1, min(cap, total - parts + 1) + 1):
        for rest in _compositions(total - first, parts - 1, cap):
            yield (first,) + rest


@dataclass
class LocalRingModel:
    """A = k[names]/J with the cached invariants dim, depth and the CM flag."""

    p: int
    names: tuple
    relations: tuple
    weights: tuple
    ring: QuotientRing
    dim: int = 0
    depth: int = 0
    cohen_macaulay: bool = True
    warnings: list = field(default_factory=list)

    @property
    def poly_ring(self):
        return self.ring.poly_ring

    @property
    def nvars(self):
        return len(self.names)

    def poly(self, text):
        return self.poly_ring(text)

    def ideal(self, gens):
        return IdealHandle(self.ring, [self.poly_ring(g) for g in gens])

    def maximal_ideal(self):
        return self.ring.maximal_ideal()

    def unit_ideal(self):
        return self.ring.unit_ideal()

    def describe(self):
        rel = ", ".join(str(r) for r in self.relations)
        return f"k[{', '.join(self.names)}]/({rel})" if rel else f"k[{', '.join(self.names)}]"


def build_ring(p=DEFAULT_CHARACTERISTIC, vars=("x", "y"), relations=(), weights=None):
    """Validate and build the model; non-CM rings are admitted with a warning."""
    names = tuple(vars)
    if weights is None:
        weights = detect_weights(names, p, relations)
        if weights is None:
            raise PreconditionError("relations are not homogeneous for any positive weights")
    S = PolyRing(names, p, weights)
    rels = [S(r) if isinstance(r, str) else S(Polynomial(S, dict(r.terms))) for r in relations]
    for r in rels:
        if not r.is_homogeneous(weights):
            raise PreconditionError(f"relation {r} is not homogeneous")
        if r and r.min_degree() == 0:
            raise PreconditionError(f"relation {r} is not in the maximal ideal")
    ring = QuotientRing(S, rels)
    J = IdealHandle(QuotientRing(S), ring.relations)
    dim = monomial.krull_dimension(J.lead_monomials(), S.nvars)
    depth, _ = depth_by_resolution(J)
    model = LocalRingModel(p, names, ring.relations, tuple(weights), ring, dim, depth, dim == depth)
    if not model.cohen_macaulay:
        msg = f"ring {model.describe()} is not Cohen-Macaulay (dim {dim}, depth {depth})"
        model.warnings.append(msg)
        log.warning(msg)
    return model


@dataclass
class MPrimaryVerdict:
    kind: str  # "unit", "m-primary" or "not m-primary"
    N: int = None

    @property
    def is_m_primary(self):
        return self.kind == "m-primary"

    def to_dict(self):
        return {"kind": self.kind, "N": self.N}


def _degree_monomials(n, d):
    for c in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in c:
            e[i] += 1
        yield tuple(e)


def contains_m_power(ideal, N):
    S = ideal.ring.poly_ring
    return all(ideal.contains(S.monomial(e)) for e in _degree_monomials(S.nvars, N))


def is_m_primary(ideal):
    """Three-way verdict; N is the least exponent with m^N inside the ideal."""
    if ideal.is_unit():
        return MPrimaryVerdict("unit", 0)
    c = ideal.colength()
    if c == INFINITE:
        return MPrimaryVerdict("not m-primary")
    # standard monomials give a lower bound; m^(c) is always inside when finite
    std = ideal.standard_monomials()
    lo = max((sum(e) for e in std), default=0) + 1
    lo = min(lo, c + 1)
    for N in range(max(lo, 1), c + 2):
        if contains_m_power(ideal, N):
            return MPrimaryVerdict("m-primary", N)
    return MPrimaryVerdict("not m-primary")


class MPrimaryIdeal:
    """A validated m-primary ideal with colength, N and a bounded power cache."""

    def __init__(self, model, handle, cache_bound=POWER_CACHE_BOUND):
        self.model = model
        self.handle = handle
        self.cache_bound = cache_bound
        verdict = is_m_primary(handle)
        if verdict.kind != "m-primary":
            raise NotMPrimaryError(f"ideal {handle.render()} is {verdict.kind}")
        self.N = verdict.N
        self.colength = handle.colength()
        self._lock = threading.Lock()

    @property
    def ring(self):
        return self.handle.ring

    @property
    def gens(self):
        return self.handle.gens

    def power(self, n):
        if n < 0:
            raise PreconditionError("power exponent must be >= 0")
        return self.handle.power(n, cache=n <= self.cache_bound)

    def is_homogeneous(self):
        return self.handle.is_homogeneous(self.model.weights)

    def render(self):
        return self.handle.render()

    def __repr__(self):
        return f"MPrimaryIdeal{self.render()}"


def declare_ideal(model, gens, cache_bound=POWER_CACHE_BOUND):
    if isinstance(gens, IdealHandle):
        handle = gens
    else:
        handle = model.ideal(gens)
    return MPrimaryIdeal(model, handle, cache_bound)


def ideal_power(ideal, n):
    if isinstance(ideal, MPrimaryIdeal):
        return ideal.power(n)
    return ideal.power(n)
