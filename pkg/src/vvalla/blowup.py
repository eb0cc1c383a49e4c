"""Rees algebra and associated graded ring presentations, initial forms, and
the depth of G_I(A) by two independent routes.

With I = (f_1..f_s) the Rees algebra is k[x, T]/Q where Q is the kernel of
T_j -> f_j t, obtained by eliminating t from (T_j - f_j t) + J. The
associated graded ring is presented as k[x, T]/Q_G with Q_G = Q + (f_j) + J,
graded by T-degree. x-variables stay in the presentation (they are nilpotent
modulo Q_G since I is m-primary).
"""

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

from .errors import OracleDisagreement, PreconditionError, UnsupportedError
from .kernel import linalg, monomial
from .kernel.groebner import buchberger, make_reducer
from .kernel.ideal import IdealHandle, QuotientRing, drl_order, elim_order
from .kernel.resolution import depth_by_resolution
from .kernel.ring import Polynomial, PolyRing
from .local_model import MPrimaryIdeal


def _handle(I):
    return I.handle if isinstance(I, MPrimaryIdeal) else I


def _fresh_names(existing, stem, count):
    names, k = [], 1
    while len(names) < count:
        nm = f"{stem}{k}" if count > 1 or stem != "t" else stem
        if nm in existing or nm in names:
            stem = stem + "_"
            names, k = [], 1
            continue
        names.append(nm)
        k += 1
    return names


@dataclass
class ReesPresentation:
    base: QuotientRing
    gens: list  # f_1..f_s
    ring: PolyRing  # k[x, T]
    ext_ring: PolyRing  # k[x, T, t]
    Q: IdealHandle  # includes J
    elim_gb: list  # reduced GB of (T_j - f_j t) + J for the t-eliminating order

    @property
    def nx(self):
        return self.base.nvars

    @property
    def s(self):
        return len(self.gens)

    def T(self, j):
        return self.ring.gens()[self.nx + j]

    def lift(self, f):
        """Image of f in k[x] inside k[x, T]."""
        pad = (0,) * self.s
        return Polynomial(self.ring, {e + pad: c for e, c in f.terms.items()})

    def relations(self):
        """Generators of Q that are not relations of A."""
        J = IdealHandle(QuotientRing(self.ring), [self.lift(r) for r in self.base.relations])
        return [g for g in self.Q.groebner() if not J.contains(g)]

    def verify_substitution(self):
        """Every generator of Q maps to zero under T_j -> f_j t, modulo J."""
        names = self.base.names + ("t_",)
        R = PolyRing(names, self.base.p)
        t = R.gens()[-1]
        images = [R.gens()[i] for i in range(self.nx)]
        for f in self.gens:
            images.append(Polynomial(R, {e + (0,): c for e, c in f.terms.items()}) * t)
        J = IdealHandle(QuotientRing(R), [Polynomial(R, {e + (0,): c for e, c in r.terms.items()})
                                          for r in self.base.relations])
        return all(J.contains(g.substitute(images, R)) for g in self.Q.groebner())

    def render(self):
        return "(" + ", ".join(str(g) for g in self.relations()) + ")"


def rees_presentation(I):
    h = _handle(I)
    base = h.ring
    S = base.poly_ring
    gens = list(h.gens)
    s = len(gens)
    Tn = _fresh_names(S.names, "T", s)
    tn = _fresh_names(S.names + tuple(Tn), "t", 1)
    wT = []
    for f in gens:
        wT.append(f.wdegree(S.weights) if f.is_homogeneous(S.weights) else 1)
    ring = PolyRing(S.names + tuple(Tn), S.p, S.weights + tuple(wT))
    ext = PolyRing(S.names + tuple(Tn) + tuple(tn), S.p)
    n = S.nvars
    N = n + s + 1
    polys = []
    for j, f in enumerate(gens):
        d = {}
        Te = tuple(int(k == n + j) for k in range(N))
        d[Te] = 1
        for e, c in f.terms.items():
            ne = e + (0,) * s + (1,)
            d[ne] = (d.get(ne, 0) - c) % S.p
        polys.append(d)
    for r in base.relations:
        polys.append({e + (0,) * (s + 1): c for e, c in r.terms.items()})
    gb = buchberger(polys, S.p, elim_order(N, (N - 1,)))
    qgens = [Polynomial(ring, {e[:-1]: c for e, c in g.items()}) for g in gb if all(e[-1] == 0 for e in g)]
    Q = IdealHandle(QuotientRing(ring), qgens, _gb=[dict(g.terms) for g in qgens] if qgens else [])
    return ReesPresentation(base, gens, ring, ext, Q, gb)


@dataclass
class GradedPresentation:
    rees: ReesPresentation
    QG: IdealHandle  # Q + (f_j) + J in k[x, T]

    @property
    def ring(self):
        return self.rees.ring

    @property
    def t_weights(self):
        return (0,) * self.rees.nx + (1,) * self.rees.s

    def numerator(self, ideal=None):
        ideal = ideal or self.QG
        num, _ = monomial.mixed_hilbert_numerator(ideal.lead_monomials(), self.t_weights)
        return num

    def hilbert_function(self, upto, ideal=None):
        return monomial.hilbert_function_from_numerator(self.numerator(ideal), (1,) * self.rees.s, upto)

    def check_hilbert(self, I, upto):
        """dim G_n = c(I^{n+1}) - c(I^n) for n <= upto."""
        h = _handle(I)
        hf = self.hilbert_function(upto)
        expect = [h.power(n + 1).colength() - h.power(n).colength() for n in range(upto + 1)]
        return hf == expect, hf, expect

    def is_homogeneous(self):
        return self.QG.is_homogeneous(self.ring.weights)

    def render(self):
        return "(" + ", ".join(str(g) for g in self.QG.minimal_generators()) + ")"


def assoc_graded_presentation(I, rees=None):
    rees = rees or rees_presentation(I)
    extra = [rees.lift(f) for f in rees.gens]
    QG = IdealHandle(rees.Q.ring, list(rees.Q.gens) + extra)
    return GradedPresentation(rees, QG)


# -- initial forms ---------------------------------------------------------

@dataclass
class InitialForm:
    source: Polynomial
    order: int
    preimage: Polynomial  # T-homogeneous of degree order, maps to a t^order
    representative: Polynomial  # normal form modulo Q_G

    def to_dict(self):
        return {"source": str(self.source), "order": self.order, "representative": str(self.representative)}


def adic_order(a, I, limit=None):
    """Largest v with a in I^v (ascending search; a must be nonzero in A)."""
    h = _handle(I)
    if h.ring.is_zero(a):
        raise PreconditionError("the zero element has no initial form")
    v = 0
    while h.power(v + 1).contains(a):
        v += 1
        if limit is not None and v >= limit:
            break
    return v


def t_degree(e, nx):
    return sum(e[nx:])


def initial_form(a, I, graded=None):
    h = _handle(I)
    a = h.ring.check(a)
    graded = graded or assoc_graded_presentation(I)
    rees = graded.rees
    v = adic_order(a, h)
    n, s = rees.nx, rees.s
    N = n + s + 1
    red = make_reducer(rees.elim_gb, rees.base.p, elim_order(N, (N - 1,)))
    lifted = {e + (0,) * s + (v,): c for e, c in a.terms.items()}
    nf = red.reduce(lifted)
    if any(e[-1] for e in nf):
        raise AssertionError("a t^v is not in the Rees algebra")
    pre = Polynomial(rees.ring, {e[:-1]: c for e, c in nf.items() if t_degree(e[:-1], n) == v})
    rep = graded.QG.reduce(pre)
    return InitialForm(a, v, pre, rep)


# -- G-regularity ---------------------------------------------------------

def _series_kernel(num_quot, num_prev, s, upto):
    """dim (0 :_{G'} l)_k for k = 0..upto from N_{G'/l} - (1 - z) N_{G'} = z N_ker."""
    shifted = monomial.zpoly_add(num_prev, {k + 1: -v for k, v in num_prev.items()})
    diff = monomial.zpoly_add(num_quot, shifted, sign=-1)
    series = monomial.hilbert_function_from_numerator(diff, (1,) * s, upto + 1)
    return series[1:]


def _t_standard(graded, ideal, deg):
    """Standard monomials of ``ideal`` of T-degree ``deg``."""
    rees = graded.rees
    n, s = rees.nx, rees.s
    leads = monomial.minimalize(ideal.lead_monomials())
    xleads = [g[:n] for g in leads if not any(g[n:])]
    xstd = monomial.standard_monomials(xleads, n)
    out = []
    for comb in combinations_with_replacement(range(s), deg):
        te = [0] * s
        for j in comb:
            te[j] += 1
        for xm in xstd:
            e = tuple(xm) + tuple(te)
            if not monomial.in_ideal(e, leads):
                out.append(e)
    return out


def kernel_witness(graded, ideal, form, deg):
    """A class w in G'_deg with form * w = 0 and w != 0, by linear algebra."""
    src = _t_standard(graded, ideal, deg)
    dst = _t_standard(graded, ideal, deg + 1)
    index = {e: i for i, e in enumerate(dst)}
    p = graded.ring.p
    cols = []
    for e in src:
        prod = ideal.reduce(form.mul_monomial(e))
        col = [0] * len(dst)
        for m, c in prod.terms.items():
            col[index[m]] = c
        cols.append(col)
    M = linalg.from_columns(cols, len(dst), p)
    ker = linalg.kernel(M)
    if not ker:
        return None
    vec = ker[0]
    return Polynomial(graded.ring, {e: c % p for e, c in zip(src, vec) if c % p})


@dataclass
class RegularityStep:
    form: Polynomial
    regular: bool
    kernel_dims: list
    bound: int
    witness: Polynomial = None

    def to_dict(self):
        d = {"form": str(self.form), "regular": self.regular, "bound": self.bound,
             "kernel_dims": list(self.kernel_dims)}
        if self.witness is not None:
            d["witness"] = str(self.witness)
        return d


@dataclass
class RegularityCertificate:
    regular: bool
    steps: list = field(default_factory=list)

    def to_dict(self):
        return {"regular": self.regular, "steps": [s.to_dict() for s in self.steps]}


def is_G_regular_sequence(elements, I, graded=None):
    """Decide whether the initial forms of a_1..a_r form a G_I(A)-regular sequence.

    Each step compares Hilbert series: l is regular on G' iff
    HS(G'/lG') = (1 - z) HS(G'). The kernel dimensions of l on G' are listed
    up to the stabilization degree of the Hilbert function plus 2, and a
    nonzero kernel element is exhibited when l is not regular.
    """
    h = _handle(I)
    graded = graded or assoc_graded_presentation(I)
    s = graded.rees.s
    current = graded.QG
    cert = RegularityCertificate(True)
    for a in elements:
        form = initial_form(a, h, graded)
        if form.order != 1:
            raise UnsupportedError(f"initial form of {a} has order {form.order}, expected 1")
        num_prev = graded.numerator(current)
        nxt = IdealHandle(current.ring, list(current.gens) + [form.representative])
        num_quot = graded.numerator(nxt)
        top = max(num_prev, default=0)
        bound = max(top - s, 0) + 2
        diff_zero = num_quot == monomial.zpoly_add(num_prev, {k + 1: -v for k, v in num_prev.items()})
        dims = _series_kernel(num_quot, num_prev, s, bound)
        step = RegularityStep(form.representative, diff_zero, dims, bound)
        if not diff_zero:
            extra = bound
            while not any(step.kernel_dims):
                extra += 1
                step.kernel_dims = _series_kernel(num_quot, num_prev, s, extra)
            deg = next(k for k, v in enumerate(step.kernel_dims) if v)
            step.witness = kernel_witness(graded, current, form.representative, deg)
        cert.steps.append(step)
        if not diff_zero:
            cert.regular = False
            break
        current = nxt
    return cert.regular, cert


# -- depth of G ------------------------------------------------------------

@dataclass
class DepthReport:
    depth: int
    strategy: str
    certificate: dict

    def to_dict(self):
        return {"depth": self.depth, "strategy": self.strategy, "certificate": self.certificate}


def depth_by_resolution_route(I, graded=None):
    graded = graded or assoc_graded_presentation(I)
    if not graded.is_homogeneous():
        raise UnsupportedError("the resolution route needs a homogeneous ideal")
    depth, pd = depth_by_resolution(graded.QG)
    return depth, {"projective_dimension": pd, "ambient_variables": graded.ring.nvars}


def depth_by_vv_route(I, seed=0, samples=5):
    """Largest r with V_I(x_1..x_r) = 0 for a sampled maximal superficial sequence."""
    from .superficial_vv import sample_superficial_sequence, vv_module

    model = I.model
    d = model.dim
    best, trail = -1, []
    for k in range(samples):
        sd = seed + k
        seq = sample_superficial_sequence(I, d, sd)
        r = 0
        lengths = {}
        while r < d:
            rep = vv_module(seq.elements[: r + 1], I, with_annihilator=False)
            lengths[r + 1] = rep.total_length
            if not rep.stabilized or rep.total_length:
                break
            r += 1
        trail.append({"seed": sd, "elements": seq.render(), "depth": r, "vv_total_lengths": lengths})
        best = max(best, r)
        if best == d:
            break
    return best, {"samples": trail}


def depth_assoc_graded(I, strategy="both", seed=0):
    if not isinstance(I, MPrimaryIdeal):
        raise PreconditionError("depth_assoc_graded expects a declared m-primary ideal")
    if not I.model.cohen_macaulay:
        raise PreconditionError("the ring is not Cohen-Macaulay")
    if strategy == "resolution":
        d, cert = depth_by_resolution_route(I)
        return DepthReport(d, strategy, {"resolution": cert})
    if strategy == "vv":
        d, cert = depth_by_vv_route(I, seed)
        return DepthReport(d, strategy, {"vv": cert})
    if strategy == "both":
        d1, c1 = depth_by_resolution_route(I)
        d2, c2 = depth_by_vv_route(I, seed)
        if d1 != d2:
            raise OracleDisagreement(
                f"depth G: resolution gives {d1}, VV sampling gives {d2}; "
                "rerun with other seeds to rule out a non-generic sample"
            )
        return DepthReport(d1, strategy, {"resolution": c1, "vv": c2})
    raise PreconditionError(f"unknown strategy {strategy!r}")
