"""Monte-Carlo estimates of a_r(I) and the scan over powers I^l."""

import random
from dataclasses import dataclass, field

from ..errors import PreconditionError, SamplingError, UnstabilizedError
from ..kernel.ideal import ideal_intersect
from ..lc_estimator import q_estimate, q_product
from ..local_model import declare_ideal, is_m_primary
from ..superficial_vv import VV_WINDOW, sample_superficial_sequence, vv_module

AR_SAMPLES = 32
AR_WINDOW = 8
UPPER_LABEL = "upper estimate (contains a_r(I))"


def sample_seeds(seed, count):
    """Per-sample 64-bit seeds; a longer run extends a shorter one."""
    rng = random.Random(seed)
    return [rng.getrandbits(64) for _ in range(count)]


@dataclass
class ArEstimate:
    r: int
    samples: int
    seeds: list
    trace: list  # fingerprints of the running intersection
    trace_ideals: list
    ideal: object
    verdict: object
    stabilization_index: int = None
    descending: bool = True
    reports: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def stable(self):
        """The trace stopped shrinking at least ``window`` samples before the budget ran out."""
        return self.stabilization_index is not None

    def to_dict(self):
        d = {
            "r": self.r,
            "label": UPPER_LABEL,
            "status": "stable" if self.stable else "unstabilized",
            "samples": self.samples,
            "seeds": [str(s) for s in self.seeds],
            "descending": self.descending,
            "stabilization_index": self.stabilization_index,
        }
        if self.stable:
            d["trace"] = self.trace
            d["ideal"] = self.ideal.render()
            d["verdict"] = self.verdict.to_dict()
        d["annihilators"] = [rep.annihilator.render() for rep in self.reports]
        d["warnings"] = self.warnings
        return d


def ar_estimate(I, r, samples=AR_SAMPLES, seed=0, window=AR_WINDOW, vv_window=VV_WINDOW, depth=None):
    """Intersect ann V_I(x) over ``samples`` sampled superficial sequences of length r."""
    seeds = sample_seeds(seed, samples)
    ring = I.handle.ring
    cur = ring.unit_ideal()
    trace, ideals, reports = [], [], []
    descending = True
    last_shrink = 0
    warnings = []
    if depth is not None and depth >= r:
        warnings.append(f"depth G = {depth} >= r = {r}: the unit ideal is expected")
    for k, sd in enumerate(seeds, start=1):
        seq = sample_superficial_sequence(I, r, sd)
        rep = vv_module(seq.elements, I, window=vv_window, seed=sd)
        if not rep.stabilized:
            raise UnstabilizedError(f"VV module unstabilized for sample {k}", sd)
        reports.append(rep)
        nxt = ideal_intersect(cur, rep.annihilator)
        if not cur.contains_ideal(nxt):
            descending = False
        if nxt != cur:
            last_shrink = k
        cur = nxt
        trace.append(cur.fingerprint())
        ideals.append(cur)
    stab = max(last_shrink, 1) if samples - last_shrink >= window else None
    return ArEstimate(r, samples, seeds, trace, ideals, cur, is_m_primary(cur), stab, descending,
                      reports, warnings)


# -- powers of I ------------------------------------------------------------

@dataclass
class PowerRow:
    l: int
    ar: object = None
    qs: list = field(default_factory=list)
    veronese: list = field(default_factory=list)  # [i, contained] for q_i(I) in q_i(I^l)
    running: object = None
    running_verdict: object = None
    contains_q_product: bool = None
    error: str = None

    def to_dict(self):
        d = {"l": self.l}
        if self.error:
            d["error"] = self.error
            return d
        d["ar"] = self.ar.to_dict() if self.ar else None
        d["q"] = [q.to_dict() for q in self.qs]
        d["veronese"] = [{"i": i, "contained": ok} for i, ok in self.veronese]
        d["running_intersection"] = self.running.render() if self.running is not None else None
        d["running_verdict"] = self.running_verdict.to_dict() if self.running_verdict else None
        d["running_contains_q_product"] = self.contains_q_product
        return d


@dataclass
class PowersScanReport:
    r: int
    l_max: int
    rows: list
    q_product: object = None
    tail_constant: bool = None
    maximal_q: list = field(default_factory=list)

    @property
    def failed(self):
        return [row.l for row in self.rows if row.error]

    def to_dict(self):
        return {
            "r": self.r,
            "l_max": self.l_max,
            "q_product": self.q_product.render() if self.q_product is not None else None,
            "rows": [row.to_dict() for row in self.rows],
            "tail_constant_observed": self.tail_constant,
            "maximal_q_probe": self.maximal_q,
            "note": "empirical tail behaviour only; no answer to the open questions is asserted",
        }


def power_ideal(I, l):
    """I^l declared afresh so that all validations and caches are rebuilt."""
    gens = [str(g) for g in I.power(l).minimal_generators()]
    return declare_ideal(I.model, gens)


def powers_scan(I, r, l_max=3, samples=AR_SAMPLES, seed=0, q_nmax=None, vv_window=VV_WINDOW,
                base_q=None, base_ar=None, window=AR_WINDOW):
    """Per-l pipeline on I^l for l = 1..l_max; ``base_q``/``base_ar`` reuse the l = 1 results."""
    if l_max < 2:
        raise PreconditionError("l_max must be at least 2")
    if base_q is None:
        base_q = [q_estimate(i, I, n_max=q_nmax, seed=seed) for i in range(r)]
    base_q = list(base_q[:r])
    stable = all(q.status == "stable" for q in base_q)
    prod = q_product(base_q, I.handle.ring) if stable else None
    rows = []
    running = None
    for l in range(1, l_max + 1):
        row = PowerRow(l)
        try:
            Il = I if l == 1 else power_ideal(I, l)
            if l == 1 and base_ar is not None:
                row.ar = base_ar
            else:
                row.ar = ar_estimate(Il, r, samples, seed, window=window, vv_window=vv_window)
            if not row.ar.stable:
                raise UnstabilizedError(f"a_r trace of I^{l} did not stabilize", seed)
            row.qs = base_q if l == 1 else [q_estimate(i, Il, n_max=q_nmax, seed=seed) for i in range(r)]
            for i in range(r):
                if base_q[i].status == "stable" and row.qs[i].status == "stable":
                    row.veronese.append((i, row.qs[i].ideal.contains_ideal(base_q[i].ideal)))
            running = row.ar.ideal if running is None else ideal_intersect(running, row.ar.ideal)
            row.running = running
            row.running_verdict = is_m_primary(running)
            if prod is not None:
                row.contains_q_product = running.contains_ideal(prod)
        except UnstabilizedError as exc:
            row.error = f"unstabilized (seed {exc.seed})"
        except SamplingError as exc:
            row.error = f"sampling failed: {exc}"
        rows.append(row)
    ok_rows = [row for row in rows if not row.error]
    tail = None
    if len(ok_rows) >= 2:
        tail = ok_rows[-1].ar.ideal == ok_rows[-2].ar.ideal
    maximal = []
    for i in range(r):
        qs = [(row.l, row.qs[i].ideal) for row in ok_rows if row.qs[i].status == "stable"]
        tops = [l for l, q in qs if not any(q2 != q and q2.contains_ideal(q) for _, q2 in qs)]
        maximal.append({"i": i, "maximal_at_l": tops})
    return PowersScanReport(r, l_max, rows, prod, tail, maximal)
