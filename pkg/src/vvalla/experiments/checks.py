"""Property checks over corpus entries, grouped the way the acceptance suite runs them.

Each check returns a list of verdict records {check, status, detail} with
status pass, fail, unstable or skipped. A Session caches the expensive
pipelines (depth, a_r estimates, q estimates, powers scans) so that checks
sharing them do not recompute.
"""

from dataclasses import asdict, dataclass

from ..blowup import assoc_graded_presentation, depth_assoc_graded, is_G_regular_sequence
from ..errors import OracleDisagreement, SamplingError, UnstabilizedError, VVError
from ..kernel.ideal import IdealHandle
from ..kernel.monomial import count_standard
from ..lc_estimator import build_l_window, q_estimate, q_product, q_product_check
from ..lseries import koszul_h1_check
from .estimates import AR_SAMPLES, AR_WINDOW, ar_estimate, powers_scan

PASS, FAIL, UNSTABLE, SKIPPED = "pass", "fail", "unstable", "skipped"


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    samples: int = AR_SAMPLES
    nmax: int = None  # q window top; default N + dim + 3
    window: int = AR_WINDOW
    strategy: str = "both"
    lmax: int = 3
    r: int = None  # restrict to one sequence length
    koszul_samples: int = None  # None checks every sample
    only: tuple = ()

    def to_dict(self):
        d = asdict(self)
        d["only"] = list(self.only)
        return d


def verdict(check, status, **detail):
    return {"check": check, "status": status, "detail": detail}


class Session:
    def __init__(self, config=None):
        self.config = config or RunConfig()
        self._cache = {}

    def _memo(self, key, fn):
        if key not in self._cache:
            try:
                self._cache[key] = (True, fn())
            except VVError as exc:
                self._cache[key] = (False, exc)
        ok, val = self._cache[key]
        if not ok:
            raise val
        return val

    def lengths(self, entry):
        """Sequence lengths r to examine for an entry."""
        d = entry.model.dim
        if self.config.r is not None:
            return [self.config.r] if 1 <= self.config.r <= d else []
        return list(range(1, d + 1))

    def graded(self, entry):
        return self._memo(("graded", entry.key), lambda: assoc_graded_presentation(entry.ideal))

    def depth(self, entry):
        return self._memo(("depth", entry.key, self.config.strategy),
                          lambda: depth_assoc_graded(entry.ideal, self.config.strategy, self.config.seed))

    def ar(self, entry, r):
        c = self.config

        def run():
            return ar_estimate(entry.ideal, r, c.samples, c.seed, window=c.window)
        return self._memo(("ar", entry.key, r), run)

    def q_nmax(self, entry):
        if self.config.nmax is not None:
            return self.config.nmax
        return entry.ideal.N + entry.model.dim + 3

    def l_window(self, entry):
        return self._memo(("win", entry.key),
                          lambda: build_l_window(entry.ideal, max(1, self.q_nmax(entry)), self.config.seed))

    def q(self, entry, i):
        def run():
            return q_estimate(i, entry.ideal, win=self.l_window(entry), n_max=self.q_nmax(entry),
                              seed=self.config.seed)
        return self._memo(("q", entry.key, i), run)

    def powers(self, entry, r):
        c = self.config

        def run():
            base_q = [self.q(entry, i) for i in range(r)]
            return powers_scan(entry.ideal, r, c.lmax, c.samples, c.seed, q_nmax=c.nmax,
                               base_q=base_q, base_ar=self.ar(entry, r), window=c.window)
        return self._memo(("powers", entry.key, r, c.lmax), run)


def _guard(name, fn):
    """Run a check body, turning pipeline errors into verdicts."""
    try:
        return fn()
    except UnstabilizedError as exc:
        return [verdict(name, UNSTABLE, reason=str(exc), seed=str(exc.seed))]
    except OracleDisagreement as exc:
        return [verdict(name, FAIL, reason=str(exc))]
    except SamplingError as exc:
        return [verdict(name, FAIL, reason=str(exc), failures=len(exc.failures))]
    except VVError as exc:
        return [verdict(name, FAIL, reason=f"{type(exc).__name__}: {exc}")]


# -- kernel soundness on the entry's own ideal ---------------------------

def check_kernel(entry, session):
    def body():
        h = entry.ideal.handle
        gb = h.groebner()
        again = IdealHandle(h.ring, gb).groebner()
        idem = [str(g) for g in gb] == [str(g) for g in again]
        gens = list(h.gens)
        members = all(h.contains(g) for g in gens)
        products = all(h.contains(f * g) for f in gens for g in gens)
        lead = h.lead_monomials()
        n_std = len(h.standard_monomials())
        counted = count_standard(lead, h.ring.nvars)
        return [
            verdict("gb_idempotent", PASS if idem else FAIL, size=len(gb)),
            verdict("membership", PASS if members and products else FAIL, generators=len(gens)),
            verdict("colength_two_counts", PASS if n_std == counted == entry.ideal.colength else FAIL,
                    enumerated=n_std, counted=counted),
        ]
    return _guard("kernel", body)


# -- Valabrega-Valla criterion ------------------------------------------

def check_vv_criterion(entry, session):
    def body():
        out = []
        dep = session.depth(entry)
        out.append(verdict("depth_routes_agree", PASS, depth=dep.depth, strategy=dep.strategy))
        graded = session.graded(entry)
        for r in session.lengths(entry):
            est = session.ar(entry, r)
            rows = []
            for k, rep in enumerate(est.reports):
                regular, _ = is_G_regular_sequence(rep.elements, entry.ideal, graded)
                rows.append({"sample": k + 1, "vv_zero": rep.is_zero, "regular": regular})
            agree = all(row["vv_zero"] == row["regular"] for row in rows)
            out.append(verdict("vv_zero_iff_regular", PASS if agree else FAIL, r=r, samples=len(rows),
                               mismatches=[row for row in rows if row["vv_zero"] != row["regular"]]))
            generic = all(row["vv_zero"] == (r <= dep.depth) for row in rows)
            out.append(verdict("vv_zero_iff_depth", PASS if generic else FAIL, r=r, depth=dep.depth))
        return out
    return _guard("vv_criterion", body)


# -- Koszul H_1 against the VV lengths -----------------------------------

def check_koszul(entry, session):
    def body():
        out = []
        k_max = session.config.koszul_samples
        for r in session.lengths(entry):
            est = session.ar(entry, r)
            for k, rep in enumerate(est.reports[:k_max]):
                cmp = koszul_h1_check(rep.elements, entry.ideal, range(1, len(rep.pieces) + 1),
                                      vv_report=rep)
                ok = cmp.agree and cmp.annihilators_agree is not False
                out.append(verdict("koszul_h1_equals_vv", PASS if ok else FAIL, r=r, sample=k + 1,
                                   h1={str(n): v for n, v in cmp.h1.items()},
                                   vv={str(n): v for n, v in cmp.vv.items()},
                                   uncertified=cmp.uncertified,
                                   annihilators_agree=cmp.annihilators_agree))
        return out
    return _guard("koszul", body)


# -- main theorem at sample level -----------------------------------------

def check_main_theorem(entry, session):
    def body():
        out = []
        depth = session.depth(entry).depth
        for r in session.lengths(entry):
            est = session.ar(entry, r)
            kinds = [rep.verdict.kind for rep in est.reports]
            if not est.stable:
                out.append(verdict("ar_estimate_stabilized", UNSTABLE, r=r, samples=est.samples))
                continue
            if depth < r:
                ok = all(k == "m-primary" for k in kinds) and est.verdict.kind == "m-primary"
                out.append(verdict("ann_m_primary", PASS if ok else FAIL, r=r, depth=depth,
                                   sample_kinds=sorted(set(kinds)), estimate=est.ideal.render(),
                                   N=est.verdict.N, stabilization_index=est.stabilization_index,
                                   samples=est.samples))
            else:
                ok = all(k == "unit" for k in kinds) and est.verdict.kind == "unit"
                out.append(verdict("ann_unit_when_depth_suffices", PASS if ok else FAIL, r=r,
                                   depth=depth, estimate=est.ideal.render()))
            out.append(verdict("trace_descending", PASS if est.descending else FAIL, r=r))
        return out
    return _guard("main_theorem", body)


# -- q-product containment -------------------------------------------------

def check_containment(entry, session):
    def body():
        out = []
        for r in session.lengths(entry):
            qs = [session.q(entry, i) for i in range(r)]
            if any(q.status != "stable" for q in qs):
                out.append(verdict("q_product_in_ann", UNSTABLE, r=r,
                                   unstable=[q.i for q in qs if q.status != "stable"]))
                continue
            est = session.ar(entry, r)
            chk = q_product_check(entry.ideal, r, est.reports, qs)
            if not est.stable:
                out.append(verdict("q_product_in_ann", PASS if chk.passed else FAIL, r=r,
                                   product=chk.product.render(), samples=len(chk.rows)))
                out.append(verdict("q_product_in_estimate", UNSTABLE, r=r))
                continue
            in_est = est.ideal.contains_ideal(chk.product)
            ok = chk.passed and in_est
            out.append(verdict("q_product_in_ann", PASS if ok else FAIL, r=r,
                               q=[q.ideal.render() for q in qs], product=chk.product.render(),
                               samples=len(chk.rows), in_estimate=in_est))
        return out
    return _guard("containment", body)


# -- powers of I -------------------------------------------------------------

def deficient_length(entry, session):
    """Smallest r with depth G < r, or None when G is Cohen-Macaulay."""
    depth = session.depth(entry).depth
    return depth + 1 if depth < entry.model.dim else None


def check_powers(entry, session):
    def body():
        r = deficient_length(entry, session)
        if session.config.r is not None:
            r = session.config.r if r is not None and session.config.r >= r else None
        if r is None:
            return [verdict("powers_scan", SKIPPED, reason="depth G equals dim A")]
        scan = session.powers(entry, r)
        out = []
        if scan.failed:
            out.append(verdict("powers_rows", UNSTABLE, r=r, failed=scan.failed))
        base = [session.q(entry, i) for i in range(r)]
        if any(q.status != "stable" for q in base):
            out.append(verdict("veronese_containment", UNSTABLE, r=r))
            return out
        prod = q_product(base, entry.ideal.handle.ring)
        for row in scan.rows:
            if row.error:
                continue
            if row.l > 1:
                stable_rows = [q.status == "stable" for q in row.qs]
                if not all(stable_rows):
                    out.append(verdict("veronese_containment", UNSTABLE, r=r, l=row.l))
                else:
                    ok = all(c for _, c in row.veronese) and len(row.veronese) == r
                    out.append(verdict("veronese_containment", PASS if ok else FAIL, r=r, l=row.l,
                                       q_l=[q.ideal.render() for q in row.qs]))
            contains = row.running.contains_ideal(prod)
            mp = row.running_verdict.kind == "m-primary"
            out.append(verdict("running_intersection", PASS if contains and mp else FAIL, r=r, l=row.l,
                               running=row.running.render(), kind=row.running_verdict.kind,
                               N=row.running_verdict.N, contains_q_product=contains))
        return out
    return _guard("powers", body)


CHECKS = (
    ("kernel", check_kernel),
    ("vv_criterion", check_vv_criterion),
    ("koszul", check_koszul),
    ("main_theorem", check_main_theorem),
    ("containment", check_containment),
    ("powers", check_powers),
)


def verify_entry(entry, session):
    out = []
    for name, fn in CHECKS:
        for v in fn(entry, session):
            v["group"] = name
            out.append(v)
    return out


def summarize(verdicts):
    statuses = {v["status"] for v in verdicts}
    if FAIL in statuses:
        return FAIL
    if UNSTABLE in statuses:
        return UNSTABLE
    return PASS
