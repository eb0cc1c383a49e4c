"""Independent oracles: brute force and truncated linear algebra, no Groebner machinery.

Polynomials are dicts {exponent tuple: coefficient}. Everything here is
deliberately naive (plain Gaussian elimination, box enumeration) so that it
shares no code path with the package algorithms it checks.
"""

from itertools import combinations, product

P = 32003


# -- linear algebra mod p -------------------------------------------------

def rank_mod(rows, p=P):
    """Rank of a list of sparse rows {column: value}."""
    pivots = {}
    r = 0
    for row in rows:
        v = {k: c % p for k, c in row.items() if c % p}
        while v:
            col = min(v)
            if col not in pivots:
                inv = pow(v[col], -1, p)
                pivots[col] = {k: c * inv % p for k, c in v.items()}
                r += 1
                break
            piv = pivots[col]
            f = v[col]
            for k, c in piv.items():
                nv = (v.get(k, 0) - f * c) % p
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
    return r


def in_span(vec, rows, p=P):
    return rank_mod(list(rows) + [vec], p) == rank_mod(rows, p)


# -- monomials --------------------------------------------------------------

def monomials_of_degree(n, d, weights=None):
    weights = weights or (1,) * n
    out = []

    def rec(prefix, left):
        i = len(prefix)
        if i == n - 1:
            if left % weights[i] == 0:
                out.append(tuple(prefix) + (left // weights[i],))
            return
        for a in range(left // weights[i] + 1):
            rec(prefix + [a], left - a * weights[i])

    if n == 0:
        return [()] if d == 0 else []
    rec([], d)
    return out


def wdeg(e, weights):
    return sum(a * w for a, w in zip(e, weights))


def divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def brute_monomial_colength(gens, nvars, box):
    """Count monomials in [0, box)^n outside the monomial ideal (finite colength assumed)."""
    return sum(1 for e in product(range(box), repeat=nvars) if not any(divides(g, e) for g in gens))


# -- homogeneous ideals by degree slices -----------------------------------

def mul(f, g, p=P):
    out = {}
    for a, c in f.items():
        for b, d in g.items():
            e = tuple(x + y for x, y in zip(a, b))
            out[e] = (out.get(e, 0) + c * d) % p
    return {e: c for e, c in out.items() if c}


def power(f, k, nvars, p=P):
    out = {(0,) * nvars: 1}
    for _ in range(k):
        out = mul(out, f, p)
    return out


def hdeg(f, weights):
    degs = {wdeg(e, weights) for e in f}
    assert len(degs) == 1, "oracle expects homogeneous input"
    return degs.pop()


def slice_rows(gens, d, nvars, weights):
    """Rows spanning (gens)_d: every monomial multiple of degree d."""
    rows = []
    for g in gens:
        dg = hdeg(g, weights)
        if dg > d:
            continue
        for m in monomials_of_degree(nvars, d - dg, weights):
            rows.append({tuple(a + b for a, b in zip(e, m)): c for e, c in g.items()})
    return rows


def _index_rows(rows, d, nvars, weights):
    idx = {e: i for i, e in enumerate(monomials_of_degree(nvars, d, weights))}
    return [{idx[e]: c for e, c in r.items()} for r in rows], len(idx)


def slice_dim(gens, d, nvars, weights):
    rows, _ = _index_rows(slice_rows(gens, d, nvars, weights), d, nvars, weights)
    return rank_mod(rows)


def homogeneous_colength(gens, nvars, weights, relations=(), top=60):
    """dim k[x]/(gens + relations) by degree slices, stopping once a slice is all of S_d."""
    total = 0
    allg = list(gens) + list(relations)
    full_run = 0
    for d in range(top + 1):
        n_mono = len(monomials_of_degree(nvars, d, weights))
        r = slice_dim(allg, d, nvars, weights)
        total += n_mono - r
        full_run = full_run + 1 if n_mono == r else 0
        if full_run >= max(weights):
            return total
    raise AssertionError("colength did not close within the degree bound")


def homogeneous_member(f, gens, nvars, weights):
    """f in (gens) for homogeneous data, slice by slice."""
    parts = {}
    for e, c in f.items():
        parts.setdefault(wdeg(e, weights), {})[e] = c
    for d, part in parts.items():
        rows, n = _index_rows(slice_rows(gens, d, nvars, weights), d, nvars, weights)
        vec, _ = _index_rows([part], d, nvars, weights)
        if not in_span(vec[0], rows):
            return False
    return True


# -- naive division and the S-pair fixpoint ---------------------------------

def drl_key(e):
    return (sum(e),) + tuple(-v for v in reversed(e))


def lead(f):
    return max(f, key=drl_key)


def divide_remainder(f, G, p=P):
    """Remainder of the textbook multivariate division by G (degrevlex)."""
    f = dict(f)
    rem = {}
    while f:
        m = lead(f)
        c = f[m]
        for g in G:
            lg = lead(g)
            if divides(lg, m):
                q = tuple(a - b for a, b in zip(m, lg))
                fac = c * pow(g[lg], -1, p) % p
                for e, v in g.items():
                    ne = tuple(a + b for a, b in zip(e, q))
                    nv = (f.get(ne, 0) - fac * v) % p
                    if nv:
                        f[ne] = nv
                    else:
                        f.pop(ne, None)
                break
        else:
            rem[m] = c
            del f[m]
    return rem


def s_poly(f, g, p=P):
    lf, lg = lead(f), lead(g)
    l = tuple(max(a, b) for a, b in zip(lf, lg))
    a = tuple(x - y for x, y in zip(l, lf))
    b = tuple(x - y for x, y in zip(l, lg))
    cf, cg = pow(f[lf], -1, p), pow(g[lg], -1, p)
    out = {}
    for e, c in f.items():
        ne = tuple(x + y for x, y in zip(e, a))
        out[ne] = (out.get(ne, 0) + c * cf) % p
    for e, c in g.items():
        ne = tuple(x + y for x, y in zip(e, b))
        out[ne] = (out.get(ne, 0) - c * cg) % p
    return {e: c for e, c in out.items() if c}


def is_groebner(G, p=P):
    return all(not divide_remainder(s_poly(f, g, p), G, p) for f, g in combinations(G, 2))


# -- truncated linear algebra for V_n ----------------------------------------

def vv_length_oracle(I_gens, xs, n, nvars, weights, relations=(), top=None):
    """ell((I^{n+1} cap (x)) / x I^n) in A = S/(relations), homogeneous data only.

    Each ideal is replaced by its degree slices; U and W contain the
    relations so the quotient by J is automatic.
    """
    I_pow = [{(0,) * nvars: 1}]
    for _ in range(n):
        I_pow = [mul(a, g) for a in I_pow for g in I_gens]
    big = [mul(a, g) for a in I_pow for g in I_gens]
    W_gens = [mul(x, a) for x in xs for a in I_pow] + list(relations)
    X_gens = list(xs) + list(relations)
    U_gens = big + list(relations)
    if top is None:
        top = max(hdeg(g, weights) for g in big) + 3 * max(weights) * (nvars + 2)
    total = 0
    for d in range(top + 1):
        rows_u, _ = _index_rows(slice_rows(U_gens, d, nvars, weights), d, nvars, weights)
        rows_x, _ = _index_rows(slice_rows(X_gens, d, nvars, weights), d, nvars, weights)
        rows_w, _ = _index_rows(slice_rows(W_gens, d, nvars, weights), d, nvars, weights)
        ru, rx, rsum = rank_mod(rows_u), rank_mod(rows_x), rank_mod(rows_u + rows_x)
        cap = ru + rx - rsum
        total += cap - rank_mod(rows_w)
    return total


# -- Betti numbers from Koszul homology --------------------------------------

def koszul_betti(gens, nvars, top):
    """Total Betti numbers of S/(gens) (S standard graded) via Tor(S/I, k) = H(K(x) (x) S/I).

    Works in degrees <= top; S/I is represented slice-wise by complements of I_d.
    """
    weights = (1,) * nvars
    basis, reduce_maps = {}, {}

    def quotient(d):
        """Standard coordinates of (S/I)_d: a list of monomials and a reduction function."""
        if d in basis:
            return basis[d], reduce_maps[d]
        monos = monomials_of_degree(nvars, d, weights) if d >= 0 else []
        idx = {e: i for i, e in enumerate(monos)}
        rows = [{idx[e]: c for e, c in r.items()} for r in slice_rows(gens, d, nvars, weights)] if d >= 0 else []
        # row echelon of I_d with pivots
        pivots = {}
        for row in rows:
            v = dict(row)
            while v:
                col = min(v)
                if col not in pivots:
                    inv = pow(v[col], -1, P)
                    pivots[col] = {k: c * inv % P for k, c in v.items()}
                    break
                f = v[col]
                for k, c in pivots[col].items():
                    nv = (v.get(k, 0) - f * c) % P
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        free = [i for i in range(len(monos)) if i not in pivots]
        pos = {i: j for j, i in enumerate(free)}

        def red(vec):
            v = {k: c % P for k, c in vec.items() if c % P}
            for col in sorted(pivots):
                if col in v:
                    f = v[col]
                    for k, c in pivots[col].items():
                        nv = (v.get(k, 0) - f * c) % P
                        if nv:
                            v[k] = nv
                        else:
                            v.pop(k, None)
            return {pos[k]: c for k, c in v.items()}

        basis[d] = (monos, idx, free)
        reduce_maps[d] = red
        return basis[d], red

    subsets = {i: list(combinations(range(nvars), i)) for i in range(nvars + 1)}

    def diff_rank(i, d):
        """Rank of d_i: K_i (x) (S/I) -> K_{i-1} (x) (S/I) in total degree d."""
        if i == 0 or i > nvars:
            return 0
        (monos_s, _, free_s), _ = quotient(d - i)
        (monos_t, idx_t, _), red_t = quotient(d - i + 1)
        tgt_index = {T: k for k, T in enumerate(subsets[i - 1])}
        dim_t = len(quotient(d - i + 1)[0][2])
        rows = []
        for S in subsets[i]:
            for f in free_s:
                e = monos_s[f]
                out = {}
                for pos_j, j in enumerate(S):
                    T = S[:pos_j] + S[pos_j + 1:]
                    ne = tuple(a + (k == j) for k, a in enumerate(e))
                    v = red_t({idx_t[ne]: 1})
                    sign = -1 if pos_j % 2 else 1
                    for k, c in v.items():
                        key = tgt_index[T] * dim_t + k
                        out[key] = (out.get(key, 0) + sign * c) % P
                rows.append(out)
        return rank_mod(rows)

    betti = []
    for i in range(nvars + 1):
        total = 0
        for d in range(top + 1):
            dim_c = len(subsets[i]) * len(quotient(d - i)[0][2]) if d - i >= 0 else 0
            if not dim_c:
                continue
            total += dim_c - diff_rank(i, d) - diff_rank(i + 1, d)
        betti.append(total)
    while betti and betti[-1] == 0:
        betti.pop()
    return betti


# -- Ratliff-Rush route to H^0 ---------------------------------------------

def ratliff_rush_h0(I_handle, n, colon, max_m=12):
    """dim and annihilator of H^0(L)_n = RR(I^{n+1}) / I^{n+1}, RR(J) = union (J I^m : I^m).

    ``colon`` is (a, b) -> (a : b); it is passed in so the caller can choose
    the implementation under test.
    """
    base = I_handle.power(n + 1)
    prev = None
    for m in range(1, max_m + 1):
        cur = colon(I_handle.power(n + 1 + m), I_handle.power(m))
        if prev is not None and cur == prev:
            break
        prev = cur
    else:
        raise AssertionError("Ratliff-Rush closure did not stabilize")
    dim = base.colength() - cur.colength()
    return dim, colon(base, cur)


# -- multiplication by an initial form on G = (+) I^n / I^{n+1} --------------

def _power_gens(I_gens, n, nvars):
    out = [{(0,) * nvars: 1}]
    for _ in range(n):
        out = [mul(a, g) for a in out for g in I_gens]
    return out


def g_kernel_dims(I_gens, x, nvars, weights, n_max, relations=(), top=None):
    """dim ker(x*: G_n -> G_{n+1}) for n = 0..n_max, x homogeneous in I minus I^2.

    Works in S with J added to every span: for A_d = (I^n + J)_d, B = (I^{n+2} + J),
    the kernel is {a in A : x a in B} modulo (I^{n+1} + J).
    """
    rel = list(relations)
    e = hdeg(x, weights)
    out = []
    for n in range(n_max + 1):
        A_g = _power_gens(I_gens, n, nvars) + rel
        C_g = _power_gens(I_gens, n + 1, nvars) + rel
        B_g = _power_gens(I_gens, n + 2, nvars) + rel
        if top is None:
            hi = max(hdeg(g, weights) for g in B_g) + 3 * max(weights) * (nvars + 1)
        else:
            hi = top
        total = 0
        for d in range(hi + 1):
            A, _ = _index_rows(slice_rows(A_g, d, nvars, weights), d, nvars, weights)
            C, _ = _index_rows(slice_rows(C_g, d, nvars, weights), d, nvars, weights)
            J, _ = _index_rows(slice_rows(rel, d, nvars, weights), d, nvars, weights)
            xa = [mul(x, r) for r in slice_rows(A_g, d, nvars, weights)]
            XA, _ = _index_rows(xa, d + e, nvars, weights)
            B, _ = _index_rows(slice_rows(B_g, d + e, nvars, weights), d + e, nvars, weights)
            rank_a = rank_mod(A)
            # preimage of B + J under x restricted to A (x is injective on S)
            pre = rank_a - (rank_mod(XA + B) - rank_mod(B))
            # the kernel of x on A may be larger than the part inside J: count in S
            total += pre - rank_mod(C)
        out.append(total)
    return out


def colon_defect(I_gens, x, n, nvars, weights, relations=(), top=None):
    """c(I^n) - c(I^{n+1} : x) in A = S/J by degree slices (x homogeneous)."""
    rel = list(relations)
    e = hdeg(x, weights)
    In = _power_gens(I_gens, n, nvars) + rel
    B_g = _power_gens(I_gens, n + 1, nvars) + rel
    hi = top if top is not None else max(hdeg(g, weights) for g in B_g) + 3 * max(weights) * (nvars + 1)
    total = 0
    for d in range(hi + 1):
        monos = monomials_of_degree(nvars, d, weights)
        xs = [mul(x, {m: 1}) for m in monos]
        XS, _ = _index_rows(xs, d + e, nvars, weights)
        B, _ = _index_rows(slice_rows(B_g, d + e, nvars, weights), d + e, nvars, weights)
        pre = len(monos) - (rank_mod(XS + B) - rank_mod(B))
        A, _ = _index_rows(slice_rows(In, d, nvars, weights), d, nvars, weights)
        total += pre - rank_mod(A)
    return total


def down_sets(n, D):
    """All finite down-sets of monomials of degree <= D in n variables."""
    monos = [e for d in range(D + 1) for e in monomials_of_degree(n, d)]
    out = []

    def rec(i, cur):
        if i == len(monos):
            out.append(frozenset(cur))
            return
        e = monos[i]
        rec(i + 1, cur)
        preds = [tuple(a - (k == j) for k, a in enumerate(e)) for j in range(n) if e[j]]
        if all(q in cur for q in preds):
            cur.add(e)
            rec(i + 1, cur)
            cur.discard(e)
    rec(0, set())
    return out


def ideal_of_down_set(std, n):
    """Minimal generators of the monomial ideal whose standard set is ``std``."""
    cand = set()
    for e in list(std) + [(0,) * n]:
        for j in range(n):
            f = tuple(a + (k == j) for k, a in enumerate(e))
            if f not in std:
                cand.add(f)
    return sorted(g for g in cand if not any(h != g and divides(h, g) for h in cand))
