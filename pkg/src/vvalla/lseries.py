"""Finite windows of L = (+)_{n>=0} A/I^{n+1} with the action of u_i = x_i t.

L_n has the standard monomials of I^{n+1} + J as basis. When I and every x_i
are homogeneous for the ring weights, each L_n splits into internal-degree
slices and all maps respect the splitting; otherwise a single slice (key
None) is used.

Koszul homology convention: K_1 = L(-1)^r and K_2 = L(-2)^{r choose 2}, so
H_1(u, L)_n is the kernel of L_{n-1}^r -> L_n modulo the image of
L_{n-2}^{(r choose 2)}. With this convention H_1(u, L)_n matches V_n.
"""

import threading
from dataclasses import dataclass, field
from itertools import combinations

from .kernel import linalg
from .kernel.ideal import IdealHandle
from .local_model import MPrimaryIdeal


def _handle(I):
    return I.handle if isinstance(I, MPrimaryIdeal) else I


class LSeriesWindow:
    def __init__(self, I, xs, n_max=None, sliced=None):
        self.h = _handle(I)
        self.ring = self.h.ring
        self.S = self.ring.poly_ring
        self.p = self.S.p
        self.xs = [self.ring.check(x) for x in xs]
        w = self.S.weights
        if sliced is None:
            sliced = self.h.is_homogeneous(w) and all(x.is_homogeneous(w) for x in self.xs)
        self.sliced = sliced
        self.xdeg = [x.wdegree(w) if sliced else 0 for x in self.xs]
        self.n_max = n_max
        self._lock = threading.RLock()
        self._bases = {}
        self._maps = {}
        self._nfs = {}

    # -- pieces ------------------------------------------------------------
    def _key(self, e):
        return self.S.wdeg(e) if self.sliced else None

    def _piece(self, n):
        """(basis dict slice -> list of exponents, index dict exponent -> (slice, position))."""
        with self._lock:
            if n not in self._bases:
                if n < 0:
                    self._bases[n] = ({}, {})
                else:
                    std = self.h.power(n + 1).standard_monomials()
                    slices, index = {}, {}
                    for e in sorted(std):
                        k = self._key(e)
                        lst = slices.setdefault(k, [])
                        index[e] = (k, len(lst))
                        lst.append(e)
                    self._bases[n] = (slices, index)
            return self._bases[n]

    def dim(self, n, key=...):
        slices, _ = self._piece(n)
        if key is ...:
            return sum(len(v) for v in slices.values())
        return len(slices.get(key, ()))

    def keys(self, n):
        return sorted(self._piece(n)[0], key=lambda k: (k is None, k))

    def basis(self, n, key=...):
        slices, _ = self._piece(n)
        if key is ...:
            return [e for k in self.keys(n) for e in slices[k]]
        return list(slices.get(key, ()))

    def shift(self, key, d):
        return None if key is None else key + d

    # -- maps ------------------------------------------------------------------
    def multiply(self, f, fdeg, n_src, n_dst, key):
        """Matrix of v -> f v from L_{n_src}[key] to L_{n_dst}[key + fdeg]."""
        rows, nrows, ncols = self.multiply_rows(f, fdeg, n_src, n_dst, key)
        cache_key = ("mat", str(f), n_src, n_dst, key)
        with self._lock:
            M = self._maps.get(cache_key)
            if M is None:
                M = self._maps[cache_key] = linalg.matrix(rows, nrows, ncols, self.p, reduced=True)
        return M

    def multiply_rows(self, f, fdeg, n_src, n_dst, key):
        """Rows (reduced ints) and shape of the matrix of ``multiply``."""
        cache_key = (str(f), n_src, n_dst, key)
        with self._lock:
            if cache_key in self._maps:
                return self._maps[cache_key]
        src = self.basis(n_src, key)
        tkey = self.shift(key, fdeg)
        _, index = self._piece(n_dst)
        ncols = len(src)
        nrows = self.dim(n_dst, tkey)
        rows = [[0] * ncols for _ in range(nrows)]
        if n_dst >= 0 and nrows:
            p = self.p
            terms = list(f.terms.items())
            if self._monomial_gb(n_dst):
                # the normal form of a monomial is itself or zero
                for j, e in enumerate(src):
                    for m, c in terms:
                        hit = index.get(tuple(a + b for a, b in zip(m, e)))
                        if hit is not None:
                            row = rows[hit[1]]
                            row[j] = (row[j] + c) % p
            else:
                for j, e in enumerate(src):
                    for m, c in terms:
                        ne = tuple(a + b for a, b in zip(m, e))
                        for s, cs in self._nf(n_dst, ne).items():
                            i = index[s][1]
                            rows[i][j] = (rows[i][j] + c * cs) % p
        out = (rows, nrows, ncols)
        with self._lock:
            self._maps[cache_key] = out
        return out

    def _monomial_gb(self, n):
        self._nf(n, (0,) * self.S.nvars)
        return self._nfs[n][1] is None

    def _nf(self, n, m):
        """Normal form of the monomial m in L_n as {standard monomial: coeff}, memoized.

        A monomial Groebner basis gives m or 0 directly; otherwise
        NF(x_v m') = NF(x_v NF(m')) is unwound one variable at a time.
        """
        with self._lock:
            memo = self._nfs.get(n)
            if memo is None:
                gb = self.h.power(n + 1).gb_dicts()
                monomial_gb = all(len(g) == 1 for g in gb)
                red = None if monomial_gb else self.h.power(n + 1).reducer()
                memo = self._nfs[n] = ({}, red)
        cache, red = memo
        hit = cache.get(m)
        if hit is not None:
            return hit
        index = self._piece(n)[1]
        if m in index:
            out = {m: 1}
        elif red is None:
            out = {}
        else:
            v = next(i for i, a in enumerate(m) if a)
            prev = self._nf(n, tuple(a - (i == v) for i, a in enumerate(m)))
            out = {}
            p = self.p
            for s, c in prev.items():
                up = tuple(a + (i == v) for i, a in enumerate(s))
                if up in index:
                    border = {up: 1}
                else:
                    border = cache.get(up)
                    if border is None:
                        border = red.reduce({up: 1})
                        cache[up] = border
                for t, ct in border.items():
                    val = (out.get(t, 0) + c * ct) % p
                    if val:
                        out[t] = val
                    else:
                        out.pop(t, None)
        cache[m] = out
        return out

    def u(self, i, n, key):
        """u_i: L_n[key] -> L_{n+1}[key + deg x_i]."""
        return self.multiply(self.xs[i], self.xdeg[i], n, n + 1, key)

    def u_power(self, i, t, n, key):
        """u_i^t: L_n[key] -> L_{n+t}[key + t deg x_i]."""
        return self.multiply(self.xs[i] ** t, t * self.xdeg[i], n, n + t, key)

    def u_power_rows(self, i, t, n, key):
        return self.multiply_rows(self.xs[i] ** t, t * self.xdeg[i], n, n + t, key)[0]

    def commutation_defect(self, n):
        """Number of (i, j, slice) with u_i u_j != u_j u_i on L_n."""
        bad = 0
        for key in self.keys(n):
            for i, j in combinations(range(len(self.xs)), 2):
                a = linalg.mul(self.u(i, n + 1, self.shift(key, self.xdeg[j])), self.u(j, n, key), self.p)
                b = linalg.mul(self.u(j, n + 1, self.shift(key, self.xdeg[i])), self.u(i, n, key), self.p)
                if a.tolist() != b.tolist():
                    bad += 1
        return bad


# -- Koszul homology H_1(u, L) ----------------------------------------------

def _koszul_h1_slice(win, n, key):
    """dim H_1(u, L)_n in one internal-degree slice (key is the K_0 slice)."""
    r = len(win.xs)
    p = win.p
    d0 = win.dim(n, key)
    k1 = [win.shift(key, -win.xdeg[i]) if key is not None else None for i in range(r)]
    dims1 = [win.dim(n - 1, k) for k in k1]
    pairs = list(combinations(range(r), 2))
    k2 = [win.shift(key, -win.xdeg[i] - win.xdeg[j]) if key is not None else None for i, j in pairs]
    dims2 = [win.dim(n - 2, k) for k in k2]
    D1 = sum(dims1)
    if D1 == 0:
        return 0
    # d1: (a_i) -> sum u_i a_i
    blocks = [win.u(i, n - 1, k1[i]) for i in range(r)]
    d1 = linalg.hstack(blocks, d0, p) if d0 else None
    rank1 = d1.rank() if d1 is not None else 0
    # d2: e_i ^ e_j -> u_i e_j - u_j e_i
    rank2 = 0
    if sum(dims2):
        rows = [[] for _ in range(D1)]
        offs = [sum(dims1[:i]) for i in range(r)]
        for (i, j), k, dk in zip(pairs, k2, dims2):
            col_block = [[0] * dk for _ in range(D1)]
            if dk:
                ui = win.u(i, n - 2, k).tolist()  # lands in slice of e_j
                uj = win.u(j, n - 2, k).tolist()
                for a in range(dims1[j]):
                    for b in range(dk):
                        col_block[offs[j] + a][b] = int(ui[a][b])
                for a in range(dims1[i]):
                    for b in range(dk):
                        col_block[offs[i] + a][b] = (col_block[offs[i] + a][b] - int(uj[a][b])) % p
            for row, add in zip(rows, col_block):
                row.extend(add)
        d2 = linalg.matrix(rows, D1, len(rows[0]), p)
        rank2 = d2.rank()
    return D1 - rank1 - rank2


def koszul_h1_dim(win, n):
    if n < 1:
        return 0
    keys = set()
    for i in range(len(win.xs)):
        for k in win.keys(n - 1):
            keys.add(win.shift(k, win.xdeg[i]))
    return sum(_koszul_h1_slice(win, n, k) for k in sorted(keys, key=lambda k: (k is None, k)))


@dataclass
class KoszulComparison:
    degrees: list
    h1: dict
    vv: dict
    uncertified: list
    agree: bool
    annihilators_agree: bool = None
    filter_regular_from: int = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "degrees": self.degrees,
            "h1": {str(k): v for k, v in self.h1.items()},
            "vv": {str(k): v for k, v in self.vv.items()},
            "uncertified": self.uncertified,
            "agree": self.agree,
            "annihilators_agree": self.annihilators_agree,
            "filter_regular_from": self.filter_regular_from,
        }


def u_kernel_dim(win, i, n):
    total = 0
    for k in win.keys(n):
        M = win.u(i, n, k)
        total += win.dim(n, k) - M.rank()
    return total


def koszul_h1_check(xs, I, n_range, vv_report=None, win=None, compare_annihilators=True):
    """Compare dim H_1(u, L)_n with ell(V_n) for n in ``n_range``.

    Degrees beyond the window of L are reported as uncertified. When a VV report
    with annihilators is given, annihilators of nonzero H_1 pieces are compared
    with (W_n : U_n).
    """
    from .superficial_vv import VVLengths

    n_range = list(n_range)
    n_top = max(n_range)
    win = win or LSeriesWindow(I, xs, n_max=n_top)
    limit = win.n_max if win.n_max is not None else n_top
    vl = VVLengths(I, xs)
    h1, vv, unc = {}, {}, []
    for n in n_range:
        if n > limit:
            unc.append(n)
            continue
        h1[n] = koszul_h1_dim(win, n)
        vv[n] = vl.length(n)
    agree = all(h1[n] == vv[n] for n in h1)
    cmp = KoszulComparison(sorted(h1), h1, vv, unc, agree)
    if compare_annihilators and vv_report is not None and vv_report.annihilator is not None:
        anns = {pc.n: pc.ann for pc in vv_report.pieces if pc.length}
        ok = True
        for n, ann in anns.items():
            if n in h1 and h1[n]:
                a2 = h1_annihilator(win, n)
                ok = ok and (a2 == ann)
        cmp.annihilators_agree = ok
    # filter-regularity of u_1 past the superficiality onset
    onset = None
    for n in range(0, limit + 1):
        if u_kernel_dim(win, 0, n) == 0:
            onset = n if onset is None else onset
        else:
            onset = None
    cmp.filter_regular_from = onset
    return cmp


# -- A-module structure of finite pieces ---------------------------------

def h1_space(win, n):
    """Subquotient spaces of H_1(u, L)_n per K_0 slice, in the coordinates of L_{n-1}^r."""
    r = len(win.xs)
    p = win.p
    keys = set()
    for i in range(r):
        for k in win.keys(n - 1):
            keys.add(win.shift(k, win.xdeg[i]))
    out = {}
    for key in keys:
        k1 = [win.shift(key, -win.xdeg[i]) for i in range(r)]
        dims1 = [win.dim(n - 1, k) for k in k1]
        D1 = sum(dims1)
        if D1 == 0:
            continue
        d0 = win.dim(n, key)
        if d0:
            d1 = linalg.hstack([win.u(i, n - 1, k1[i]) for i in range(r)], d0, p)
            Z = linalg.kernel(d1)
        else:
            Z = [[int(a == b) for a in range(D1)] for b in range(D1)]
        B = []
        offs = [sum(dims1[:i]) for i in range(r)]
        for i, j in combinations(range(r), 2):
            k = win.shift(key, -win.xdeg[i] - win.xdeg[j])
            dk = win.dim(n - 2, k)
            if not dk:
                continue
            ui = win.u(i, n - 2, k).tolist()
            uj = win.u(j, n - 2, k).tolist()
            for b in range(dk):
                v = [0] * D1
                for a in range(dims1[j]):
                    v[offs[j] + a] = int(ui[a][b])
                for a in range(dims1[i]):
                    v[offs[i] + a] = (v[offs[i] + a] - int(uj[a][b])) % p
                B.append(v)
        space = linalg.SubquotientSpace(Z, B, D1, p)
        if space.qdim:
            out[key] = (space, k1, dims1)
    return out


def _component_action(win, var_index, n_comp, comps, vec, target_comps):
    """Multiply each component (in L_{n_comp}[k]) of vec by a variable."""
    S = win.S
    xv = S.gens()[var_index]
    wv = S.weights[var_index] if win.sliced else 0
    out = []
    pos = 0
    for k, dim in comps:
        part = vec[pos:pos + dim]
        pos += dim
        M = win.multiply(xv, wv, n_comp, n_comp, k)
        tk = win.shift(k, wv)
        if M.nrows() and dim:
            res = linalg.mul(M, linalg.matrix([[v] for v in part], dim, 1, win.p), win.p).tolist()
            out.extend(int(r[0]) for r in res)
        else:
            out.extend([0] * win.dim(n_comp, tk))
    return out


def module_annihilator(ring, spaces, act, p):
    """Annihilator of a finite-dimensional A-module given slice-wise.

    ``spaces`` maps a slice key to a SubquotientSpace; ``act(var, key, vec)``
    returns (target key, image vector) for the action of a variable. The
    annihilator is {a : a acts as zero}; the module has length h, so m^h kills
    it and only standard monomials of J + m^h need to be tested.
    """
    from .kernel.monomial import standard_monomials

    S = ring.poly_ring
    order = sorted(spaces, key=lambda k: (k is None, k))
    offsets, total = {}, 0
    for k in order:
        offsets[k] = total
        total += spaces[k].qdim
    if total == 0:
        return ring.unit_ideal()
    # matrices of the variables on the whole module
    mats = []
    for v in range(S.nvars):
        M = [[0] * total for _ in range(total)]
        for k in order:
            sp = spaces[k]
            for c, rep in enumerate(sp.reps):
                tk, img = act(v, k, rep)
                if tk in spaces:
                    co = spaces[tk].coords(img)
                    for rr, val in enumerate(co):
                        M[offsets[tk] + rr][offsets[k] + c] = val % p
        mats.append(linalg.matrix(M, total, total, p))
    h = total
    mpow = IdealHandle(ring, list(ring.maximal_ideal().power(h).gens))
    std = standard_monomials(mpow.lead_monomials(), S.nvars)
    ident = linalg.matrix([[int(i == j) for j in range(total)] for i in range(total)], total, total, p)
    cache = {(0,) * S.nvars: ident}

    def mono_mat(e):
        if e in cache:
            return cache[e]
        v = max(i for i, a in enumerate(e) if a)
        prev = tuple(a - (i == v) for i, a in enumerate(e))
        M = mats[v] * mono_mat(prev)
        cache[e] = M
        return M

    std.sort(key=sum)
    cols = []
    for e in std:
        flat = [int(v) for row in mono_mat(e).tolist() for v in row]
        cols.append(flat)
    big = linalg.from_columns(cols, total * total, p)
    rel = linalg.kernel(big)
    gens = list(mpow.gens)
    for vec in rel:
        f = S.zero()
        for e, c in zip(std, vec):
            if c % p:
                f = f + S.monomial(e, c)
        gens.append(f)
    return IdealHandle(ring, gens)


def h1_annihilator(win, n):
    spaces_full = h1_space(win, n)
    spaces = {k: v[0] for k, v in spaces_full.items()}

    def act(var, key, vec):
        _, k1, dims1 = spaces_full[key]
        wv = win.S.weights[var] if win.sliced else 0
        img = _component_action(win, var, n - 1, list(zip(k1, dims1)), vec, None)
        return win.shift(key, wv), img

    return module_annihilator(win.ring, spaces, act, win.p)
