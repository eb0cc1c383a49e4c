"""Experimental estimates of H^i_{R(I)+}(L)_n for L = (+) A/I^{n+1}.

The local cohomology piece is approximated by Koszul cohomology of the powers
u^t = (u_1^t..u_d^t) on L, where u_i = x_i t for a maximal superficial
sequence x. In degree n the cochain module C^k is the sum over |S| = k of
L_{n + t|S|}; raising t to t + 1 multiplies the S-component by prod_{j in S} u_j,
which is a chain map. A piece is reported stable once two consecutive values
of t give the same dimension and annihilator and the transition map between
them is an isomorphism.

Everything here is labeled experimental; downstream checks only consume stable
estimates.
"""

from dataclasses import dataclass, field
from itertools import combinations

from .errors import PreconditionError
from .kernel import linalg
from .kernel.ideal import ideal_intersect, ideal_product
from .local_model import MPrimaryIdeal, is_m_primary
from .lseries import LSeriesWindow, module_annihilator

T_SCHEDULE = tuple(range(1, 7))
STABLE_WINDOW = 2


COMMUTATION_CHECK_DEGREES = 4


def build_l_window(I, n_max, seed=0, xs=None, check_degrees=COMMUTATION_CHECK_DEGREES):
    """Window of L with u_1..u_d from a sampled maximal superficial sequence.

    Commutation of the u_i is spot-checked on the first ``check_degrees`` pieces
    (None checks the whole window).
    """
    from .superficial_vv import sample_superficial_sequence

    if n_max < 1:
        raise PreconditionError("n_max must be at least 1")
    if xs is None:
        d = I.model.dim if isinstance(I, MPrimaryIdeal) else None
        if d is None:
            raise PreconditionError("pass xs or a declared m-primary ideal")
        xs = sample_superficial_sequence(I, d, seed).elements
    win = LSeriesWindow(I, xs, n_max=n_max)
    top = n_max if check_degrees is None else min(n_max, check_degrees)
    for n in range(0, top):
        if win.commutation_defect(n):
            raise AssertionError(f"action maps do not commute on L_{n}")
    return win


class KoszulCochains:
    """The cochain complex C^*(u^t; L)_n split by internal degree."""

    def __init__(self, win, n, t):
        self.win, self.n, self.t = win, n, t
        self.d = len(win.xs)
        self.subsets = {k: list(combinations(range(self.d), k)) for k in range(self.d + 1)}

    def comp_key(self, delta, S):
        if delta is None:
            return None
        return delta + self.t * sum(self.win.xdeg[j] for j in S)

    def comps(self, k, delta):
        return [(S, self.n + self.t * k, self.comp_key(delta, S)) for S in self.subsets[k]]

    def dims(self, k, delta):
        return [self.win.dim(m, key) for _, m, key in self.comps(k, delta)]

    def deltas(self, k):
        """Normalized slice keys carrying a nonzero component of C^k."""
        if not self.win.sliced:
            return [None]
        out = set()
        for S in self.subsets[k]:
            m = self.n + self.t * k
            shift = self.t * sum(self.win.xdeg[j] for j in S)
            for key in self.win.keys(m):
                out.add(key - shift)
        return sorted(out)

    def differential(self, k, delta):
        """Matrix of d^k: C^k -> C^{k+1} on the delta slice (None if a side is zero)."""
        src = self.comps(k, delta)
        dst = self.comps(k + 1, delta)
        sd = self.dims(k, delta)
        dd = self.dims(k + 1, delta)
        R, Cc = sum(dd), sum(sd)
        if R == 0 or Cc == 0:
            return None, R, Cc
        rows = [[0] * Cc for _ in range(R)]
        soff = [sum(sd[:a]) for a in range(len(sd))]
        doff = [sum(dd[:a]) for a in range(len(dd))]
        didx = {S: a for a, (S, _, _) in enumerate(dst)}
        p = self.win.p
        for a, (S, m, key) in enumerate(src):
            if not sd[a]:
                continue
            for j in range(self.d):
                if j in S:
                    continue
                T = tuple(sorted(S + (j,)))
                b = didx[T]
                if not dd[b]:
                    continue
                sign = -1 if sum(1 for s in S if s < j) % 2 else 1
                M = self.win.u_power_rows(j, self.t, m, key)
                off = soff[a]
                for rr in range(dd[b]):
                    row = rows[doff[b] + rr]
                    for cc, v in enumerate(M[rr]):
                        if v:
                            row[off + cc] = (row[off + cc] + sign * v) % p
        return linalg.matrix(rows, R, Cc, p, reduced=True), R, Cc

    def cohomology(self, i, delta):
        """SubquotientSpace of H^i on the delta slice, in C^i coordinates."""
        D = sum(self.dims(i, delta))
        if D == 0:
            return None
        out, _, _ = self.differential(i, delta)
        if out is None:
            Z = [[int(a == b) for a in range(D)] for b in range(D)]
        else:
            Z = linalg.kernel(out)
        B = []
        if i > 0:
            inc, _, cols = self.differential(i - 1, delta)
            if inc is not None:
                lst = inc.tolist()
                B = [[int(lst[rr][cc]) for rr in range(D)] for cc in range(cols)]
        return linalg.SubquotientSpace(Z, B, D, self.win.p)

    def transition(self, i, delta, vec):
        """Image of a C^i(t) vector in C^i(t + 1)."""
        out = []
        pos = 0
        nxt = KoszulCochains(self.win, self.n, self.t + 1)
        for (S, m, key), dim, (_, m2, key2) in zip(self.comps(i, delta), self.dims(i, delta),
                                                   nxt.comps(i, delta)):
            part = vec[pos:pos + dim]
            pos += dim
            target_dim = self.win.dim(m2, key2)
            col = [[v] for v in part]
            cur_m, cur_key = m, key
            for j in S:
                M = self.win.u(j, cur_m, cur_key)
                col = linalg.mul(M, linalg.matrix(col, len(col), 1, self.win.p), self.win.p).tolist() \
                    if len(col) and M.nrows() else [[0] for _ in range(M.nrows())]
                col = [[int(r[0])] for r in col]
                cur_m += 1
                cur_key = self.win.shift(cur_key, self.win.xdeg[j])
            if len(col) != target_dim:
                col = [[0] for _ in range(target_dim)]
            out.extend(r[0] for r in col)
        return out

    def act(self, i, var, delta, vec):
        """Action of a ring variable on a C^i vector (slice delta -> delta + weight)."""
        win = self.win
        xv = win.S.gens()[var]
        wv = win.S.weights[var] if win.sliced else 0
        out = []
        pos = 0
        for (S, m, key), dim in zip(self.comps(i, delta), self.dims(i, delta)):
            part = vec[pos:pos + dim]
            pos += dim
            tk = win.shift(key, wv)
            M = win.multiply(xv, wv, m, m, key)
            if dim and M.nrows():
                res = linalg.mul(M, linalg.matrix([[v] for v in part], dim, 1, win.p), win.p).tolist()
                out.extend(int(r[0]) for r in res)
            else:
                out.extend([0] * win.dim(m, tk))
        return win.shift(delta, wv), out


@dataclass
class CohomologyPieceEstimate:
    i: int
    n: int
    dim: int
    annihilator: object
    status: str  # stable, unstable or zero
    t_onset: int = None
    window: int = STABLE_WINDOW
    trace: list = field(default_factory=list)  # dims per t

    @property
    def usable(self):
        return self.status in ("stable", "zero")

    def to_dict(self):
        d = {"i": self.i, "n": self.n, "status": self.status, "t_onset": self.t_onset,
             "window": self.window}
        if self.usable:
            d["dims_by_t"] = self.trace
            d["dim"] = self.dim
            d["annihilator"] = self.annihilator.render() if self.annihilator is not None else None
        return d


def _piece_at(win, i, n, t):
    cx = KoszulCochains(win, n, t)
    spaces = {}
    for delta in cx.deltas(i):
        sp = cx.cohomology(i, delta)
        if sp is not None and sp.qdim:
            spaces[delta] = sp
    return cx, spaces


def _annihilator(win, cx, i, spaces):
    def act(var, key, vec):
        return cx.act(i, var, key, vec)

    return module_annihilator(win.ring, spaces, act, win.p)


def cohomology_piece(i, n, I, win, t_schedule=T_SCHEDULE, window=STABLE_WINDOW):
    """Stabilized Koszul-colimit estimate of H^i_{R+}(L)_n."""
    d = len(win.xs)
    if not 0 <= i <= d - 1:
        raise PreconditionError(f"i must lie in [0, {d - 1}]")
    ts = list(t_schedule)
    # below degree -t the components L_{n+t} are zero and say nothing yet
    shift = max(0, -n - min(ts))
    ts = [t + shift for t in ts]
    need = n + (max(ts) + 1) * d
    if win.n_max is not None and need > win.n_max:
        win.n_max = need
    trace = []
    prev = None
    run = 1
    for t in ts + [max(ts) + 1]:
        cx, spaces = _piece_at(win, i, n, t)
        dim = sum(sp.qdim for sp in spaces.values())
        trace.append(dim)
        if prev is not None:
            pcx, pspaces, pdim = prev
            if pdim == dim and _transition_iso(pcx, i, pspaces, spaces):
                run += 1
            else:
                run = 1
            if run >= window:
                if dim == 0:
                    return CohomologyPieceEstimate(i, n, 0, win.ring.unit_ideal(), "zero", t - window + 1,
                                                   window, trace)
                a_prev = _annihilator(win, pcx, i, pspaces)
                a_cur = _annihilator(win, cx, i, spaces)
                if a_prev == a_cur:
                    return CohomologyPieceEstimate(i, n, dim, a_cur, "stable", t - window + 1, window, trace)
                run = 1
        prev = (cx, spaces, dim)
    return CohomologyPieceEstimate(i, n, trace[-1], None, "unstable", None, window, trace)


def _transition_iso(cx, i, spaces, spaces_next):
    p = cx.win.p
    for delta, sp in spaces.items():
        nsp = spaces_next.get(delta)
        if nsp is None or nsp.qdim != sp.qdim:
            return False
        cols = [nsp.coords(cx.transition(i, delta, rep)) for rep in sp.reps]
        M = linalg.from_columns(cols, nsp.qdim, p)
        if M.rank() != sp.qdim:
            return False
    return set(spaces_next) == set(spaces)


@dataclass
class QEstimate:
    i: int
    ideal: object
    status: str  # stable or unstable
    support: list
    scanned: tuple
    verdict: object = None
    pieces: list = field(default_factory=list)

    def to_dict(self):
        d = {"i": self.i, "status": self.status, "support": self.support,
             "scanned": list(self.scanned), "label": "experimental",
             "pieces": [pc.to_dict() for pc in self.pieces]}
        if self.status == "stable":
            d["ideal"] = self.ideal.render()
            d["verdict"] = self.verdict.to_dict()
        return d


def q_estimate(i, I, win=None, n_max=None, seed=0, t_schedule=T_SCHEDULE, window=STABLE_WINDOW):
    """q_i(I): intersection of the annihilators of the pieces H^i_n over the scanned support."""
    d = I.model.dim
    if n_max is None:
        n_max = I.N + d + 3
    if win is None:
        win = build_l_window(I, max(1, n_max), seed)
    lo = -d
    pieces = []
    for n in range(lo, n_max + 1):
        pieces.append(cohomology_piece(i, n, I, win, t_schedule, window))
    support = [pc.n for pc in pieces if pc.dim and pc.usable]
    unstable = [pc.n for pc in pieces if not pc.usable]
    tail_zero = pieces[-1].status == "zero"
    if unstable or not tail_zero:
        return QEstimate(i, None, "unstable", support, (lo, n_max), None, pieces)
    q = win.ring.unit_ideal()
    for pc in pieces:
        if pc.status == "stable":
            q = ideal_intersect(q, pc.annihilator)
    return QEstimate(i, q, "stable", support, (lo, n_max), is_m_primary(q), pieces)


def q_product(qs, ring):
    prod = ring.unit_ideal()
    for q in qs:
        prod = ideal_product(prod, q.ideal)
    return prod


@dataclass
class QProductCheck:
    r: int
    product: object
    status: str
    rows: list
    reason: str = None

    @property
    def passed(self):
        return self.status == "checked" and all(row["contained"] for row in self.rows)

    def to_dict(self):
        d = {"r": self.r, "status": self.status, "rows": self.rows}
        if self.product is not None:
            d["product"] = self.product.render()
        if self.reason:
            d["reason"] = self.reason
        return d


def q_product_check(I, r, vv_reports, qs):
    """q_0...q_{r-1} inside ann V_I(x) for each sampled sequence, by generator membership."""
    if any(q.status != "stable" for q in qs[:r]):
        return QProductCheck(r, None, "skipped", [], "unstable q estimate")
    prod = q_product(qs[:r], I.handle.ring)
    rows = []
    for rep in vv_reports:
        if not rep.stabilized:
            rows.append({"elements": [str(x) for x in rep.elements], "contained": False,
                         "reason": "unstabilized"})
            continue
        ok = rep.annihilator.contains_ideal(prod)
        rows.append({"elements": [str(x) for x in rep.elements], "seed": rep.seed, "contained": ok})
    return QProductCheck(r, prod, "checked", rows)
