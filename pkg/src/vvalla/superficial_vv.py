"""Superficial elements, the Valabrega-Valla module V_I(x) and its annihilator.

Lengths of the pieces V_n = (I^{n+1} cap (x)) / (x) I^n are obtained from
colengths of m-primary ideals:

    ell(V_n) = ell((x) / (x) I^n) - ell((x) / (I^{n+1} cap (x)))

where the second term is c(I^{n+1}) - c(I^{n+1} + (x)) and the first is the
length of A^r / (Syz(x) + I^n A^r), which for r = 1 is c(I^n + (0 : x)).
The pieces U_n and W_n themselves are only built for nonzero V_n, where the
annihilator (W_n : U_n) is needed.
"""

import random
from dataclasses import dataclass, field

from .errors import PreconditionError, SamplingError, UnstabilizedError
from .kernel.ideal import (
    IdealHandle,
    QuotientRing,
    ideal_colon,
    ideal_colon_element,
    ideal_intersect,
    ideal_product,
)
from .kernel.module import Submodule, syzygies
from .local_model import MPrimaryIdeal, is_m_primary

RESAMPLE_CAP = 16
VV_WINDOW = 3


def _handle(I):
    return I.handle if isinstance(I, MPrimaryIdeal) else I


def _N(I):
    if isinstance(I, MPrimaryIdeal):
        return I.N
    v = is_m_primary(I)
    if not v.is_m_primary:
        raise PreconditionError("ideal is not m-primary")
    return v.N


class PowerPlus:
    """J_n = I^n + (x), built as J_{n+1} = I J_n + (x) so generator counts stay small."""

    def __init__(self, I, xs):
        self.h = _handle(I)
        self.x = self.h.ring.ideal(list(xs))
        self._J = {1: self.h + self.x}

    def get(self, n):
        if n < 1:
            return self.h.ring.unit_ideal()
        k = max(k for k in self._J if k <= n)
        while k < n:
            self._J[k + 1] = ideal_product(self._J[k], self.h, gens_from_gb=True) + self.x
            k += 1
        return self._J[n]


def superficial_defect(I, x, n, plus=None):
    """c(I^{n+1} : x) - c(I^n); zero iff (I^{n+1} : x) = I^n (the inclusion is automatic)."""
    big = I.power(n + 1)
    plus = plus or PowerPlus(I, [x])
    colon_len = big.colength() - plus.get(n + 1).colength()
    return I.power(n).colength() - colon_len


@dataclass
class SuperficialCertificate:
    passed: bool
    c: int  # 0 means the plain form (I^{n+1} : x) = I^n
    onset: int
    n_max: int
    degrees: list = field(default_factory=list)
    failures: list = field(default_factory=list)  # (n, rendered colon, rendered I^n)

    def to_dict(self):
        return {
            "passed": self.passed,
            "c": self.c,
            "onset": self.onset,
            "n_max": self.n_max,
            "failures": [list(f) for f in self.failures],
        }


def verify_superficial(x, I, n_max=None, N=None):
    """Check (I^{n+1} : x) = I^n, falling back to (I^{n+1} : x) cap I^c = I^n.

    The equality must hold from an onset degree through n_max, on at least
    three degrees. Returns a certificate; ``passed`` is False on failure.
    """
    h = _handle(I)
    x = h.ring.check(x)
    if not h.contains(x) or h.power(2).contains(x):
        raise PreconditionError("candidate must lie in I but not in I^2")
    N = N if N is not None else _N(h)
    n_max = n_max if n_max is not None else 2 * N + 6
    plus = PowerPlus(h, [x])
    ok = [superficial_defect(h, x, n, plus) == 0 for n in range(1, n_max + 1)]
    onset = _onset(ok, 1)
    if onset is not None and n_max - onset + 1 >= 3:
        return SuperficialCertificate(True, 0, onset, n_max, list(range(onset, n_max + 1)))
    failures = []
    bad = [n for n, good in zip(range(1, n_max + 1), ok) if not good]
    for c in range(1, N + 1):
        Ic = h.power(c)
        okc = []
        for n in range(c, n_max + 1):
            if ok[n - 1]:
                okc.append(True)
                continue
            colon = ideal_colon_element(h.power(n + 1), x)
            okc.append(ideal_intersect(colon, Ic) == h.power(n))
        onset = _onset(okc, c)
        if onset is not None and n_max - onset + 1 >= 3:
            return SuperficialCertificate(True, c, onset, n_max, list(range(onset, n_max + 1)))
    for n in bad[-2:]:
        colon = ideal_colon_element(h.power(n + 1), x)
        failures.append((n, colon.render(), h.power(n).render()))
    return SuperficialCertificate(False, N, n_max + 1, n_max, [], failures)


def _onset(flags, first):
    """First degree from which all flags hold (degrees start at ``first``)."""
    if not flags or not flags[-1]:
        return None
    k = len(flags)
    while k > 0 and flags[k - 1]:
        k -= 1
    return first + k


@dataclass
class SuperficialSequence:
    elements: list
    certificates: list
    seed: int
    attempts: int = 0

    @property
    def r(self):
        return len(self.elements)

    def render(self):
        return [str(x) for x in self.elements]


def _quotient_by(ring, elems):
    if not elems:
        return ring
    return QuotientRing(ring.poly_ring, list(ring.relations) + list(elems))


def random_combination(gens, rng, p):
    coeffs = [rng.randrange(p) for _ in gens]
    x = gens[0].ring.zero()
    for c, g in zip(coeffs, gens):
        if c:
            x = x + g.scale(c)
    return x


def sample_superficial_sequence(I, r, seed, n_max=None, cap=RESAMPLE_CAP):
    """r random combinations of the generators of I, each verified in A/(previous)."""
    h = _handle(I)
    N = _N(I)
    model = getattr(I, "model", None)
    if model is not None and r > model.dim:
        raise PreconditionError(f"r = {r} exceeds dim A = {model.dim}")
    rng = random.Random(seed)
    p = h.ring.p
    gens = list(h.gens)
    chosen, certs, failures = [], [], []
    attempts = 0
    for _ in range(r):
        ring_i = _quotient_by(h.ring, chosen)
        Ii = IdealHandle(ring_i, gens)
        I2 = Ii.power(2, cache=False)
        for _try in range(cap):
            attempts += 1
            x = random_combination(gens, rng, p)
            if not x or I2.contains(x):
                failures.append({"step": len(chosen) + 1, "element": str(x), "reason": "in I^2"})
                continue
            cert = verify_superficial(x, Ii, n_max=n_max, N=N)
            if cert.passed:
                chosen.append(x)
                certs.append(cert)
                break
            failures.append({"step": len(chosen) + 1, "element": str(x), "reason": "not superficial",
                             "certificate": cert.to_dict()})
        else:
            raise SamplingError(f"no superficial element found after {cap} draws", failures)
    return SuperficialSequence(chosen, certs, seed, attempts)


# -- the Valabrega-Valla module -------------------------------------------

@dataclass
class VVPiece:
    n: int
    length: int
    U: object = None  # I^{n+1} cap (x), only for nonzero pieces
    W: object = None  # (x) I^n
    ann: object = None

    def to_dict(self):
        d = {"n": self.n, "length": self.length}
        if self.length:
            d["U"] = self.U.render()
            d["W"] = self.W.render()
            d["ann"] = self.ann.render()
        return d


@dataclass
class VVModuleReport:
    elements: list
    pieces: list
    stabilized: bool
    n0: int
    annihilator: object = None
    verdict: object = None
    seed: int = None

    @property
    def status(self):
        return "stable" if self.stabilized else "unstabilized"

    @property
    def total_length(self):
        return sum(pc.length for pc in self.pieces)

    @property
    def is_zero(self):
        return self.stabilized and self.total_length == 0

    def lengths(self):
        return {pc.n: pc.length for pc in self.pieces}

    def to_dict(self):
        d = {
            "elements": [str(x) for x in self.elements],
            "status": self.status,
            "seed": self.seed,
            "pieces": [pc.to_dict() for pc in self.pieces],
        }
        if self.stabilized:
            d["total_length"] = self.total_length
            d["stabilization_degree"] = self.n0
            d["annihilator"] = self.annihilator.render()
            d["annihilator_verdict"] = self.verdict.to_dict()
        return d


class VVLengths:
    """Piece lengths ell(V_n) for a fixed sequence x in A."""

    def __init__(self, I, xs):
        self.h = _handle(I)
        self.xs = [self.h.ring.check(x) for x in xs]
        self.r = len(self.xs)
        ring = self.h.ring
        self.xideal = ring.ideal(self.xs)
        self.plus = PowerPlus(self.h, self.xs)
        if self.r == 1:
            zero = IdealHandle(ring, [])
            self.zero_colon = ideal_colon_element(zero, self.xs[0])
            self.syz = None
        else:
            self.zero_colon = None
            self.syz = syzygies(ring, self.xs, 1)

    def x_over_xIn(self, n):
        In = self.h.power(n)
        if self.r == 1:
            return (In + self.zero_colon).colength()
        ring = self.h.ring
        S = ring.poly_ring
        elems = list(self.syz)
        for f in In.minimal_generators():
            for i in range(self.r):
                elems.append(tuple(f if j == i else S.zero() for j in range(self.r)))
        return Submodule(ring, self.r, elems).colength()

    def length(self, n):
        x_over_U = self.h.power(n + 1).colength() - self.plus.get(n + 1).colength()
        return self.x_over_xIn(n) - x_over_U


def vv_pieces_explicit(I, xs, n):
    """U_n = I^{n+1} cap (x) and W_n = (x) I^n as ideals."""
    h = _handle(I)
    xideal = h.ring.ideal(xs)
    U = ideal_intersect(h.power(n + 1), xideal)
    W = ideal_product(xideal, h.power(n)) if n > 0 else xideal
    return U, W


def vv_module(xs, I, window=VV_WINDOW, cap=None, floor=None, seed=None, with_annihilator=True):
    """Pieces of V_I(x) for n = 1.. until ``window`` consecutive zero pieces past the floor."""
    h = _handle(I)
    N = _N(I)
    r = len(xs)
    floor = floor if floor is not None else N + r
    cap = cap if cap is not None else 3 * N + 10
    vl = VVLengths(I, xs)
    pieces = []
    zeros = 0
    stabilized = False
    n = 0
    while n < cap:
        n += 1
        ln = vl.length(n)
        if ln < 0:
            raise AssertionError(f"negative piece length at n = {n}")
        piece = VVPiece(n, ln)
        if ln:
            piece.U, piece.W = vv_pieces_explicit(h, xs, n)
            piece.ann = ideal_colon(piece.W, piece.U) if with_annihilator else None
            zeros = 0
        else:
            zeros += 1
        pieces.append(piece)
        if zeros >= window and n >= floor:
            stabilized = True
            break
    n0 = n - zeros + 1
    report = VVModuleReport(list(xs), pieces, stabilized, n0, seed=seed)
    if stabilized and with_annihilator:
        ann = h.ring.unit_ideal()
        for pc in pieces:
            if pc.length:
                ann = ideal_intersect(ann, pc.ann)
        report.annihilator = ann
        report.verdict = is_m_primary(ann)
    return report


def vv_annihilator(xs, I, report=None, **kw):
    """ann_A V_I(x) with its m-primary verdict."""
    report = report if report is not None else vv_module(xs, I, **kw)
    if not report.stabilized:
        raise UnstabilizedError("VV module did not stabilize within the hard cap", report.seed)
    return report.annihilator, report.verdict
