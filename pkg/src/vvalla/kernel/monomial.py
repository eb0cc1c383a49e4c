"""Combinatorics of monomial ideals: minimal generators, standard-monomial
counts, Krull dimension and Hilbert series numerators."""

import math
from functools import lru_cache
from itertools import combinations
from operator import le

INFINITE = math.inf


def minimalize(gens):
    """Minimal generators of the monomial ideal generated by ``gens``."""
    gens = sorted(set(tuple(g) for g in gens), key=lambda g: (sum(g), g))
    out = []
    for g in gens:
        if not any(all(map(le, h, g)) for h in out):
            out.append(g)
    return out


def in_ideal(mono, gens):
    return any(all(map(le, g, mono)) for g in gens)


def is_finite_colength(gens, nvars):
    if nvars == 0:
        return True
    pure = set()
    for g in gens:
        support = [i for i, a in enumerate(g) if a]
        if len(support) == 0:
            return True
        if len(support) == 1:
            pure.add(support[0])
    return len(pure) == nvars


def count_standard(gens, nvars):
    """Number of monomials outside the ideal, or ``INFINITE``."""
    gens = minimalize(gens)
    if not is_finite_colength(gens, nvars):
        return INFINITE
    return _count(tuple(gens), nvars)


@lru_cache(maxsize=65536)
def _count(gens, n):
    if any(not any(g) for g in gens):
        return 0
    if n == 1:
        return min(g[0] for g in gens)
    bound = min(g[-1] for g in gens if not any(g[:-1]))
    levels = sorted({g[-1] for g in gens if g[-1] < bound} | {0})
    total = 0
    for idx, a in enumerate(levels):
        nxt = levels[idx + 1] if idx + 1 < len(levels) else bound
        sl = tuple(minimalize(g[:-1] for g in gens if g[-1] <= a))
        total += (nxt - a) * _count(sl, n - 1)
    return total


def standard_monomials(gens, nvars, max_degree=None):
    """Enumerate monomials outside the ideal (all of them when finite)."""
    gens = minimalize(gens)
    if any(not any(g) for g in gens):
        return []
    if max_degree is None:
        if not is_finite_colength(gens, nvars):
            raise ValueError("infinitely many standard monomials")
        max_degree = 0
        for i in range(nvars):
            max_degree += min(g[i] for g in gens if sum(g) == g[i]) - 1
        max_degree = max(max_degree, 0)
    out = []
    if nvars == 0:
        return [()]

    def rec(prefix, remaining):
        if len(prefix) == nvars - 1:
            # last variable: standard exactly below the lowest generator over the prefix
            top = remaining + 1
            for g in gens:
                if g[-1] < top and all(map(le, g[:-1], prefix)):
                    top = g[-1]
            out.extend(tuple(prefix) + (a,) for a in range(top))
            return
        for a in range(remaining + 1):
            # once prefix*x_i^a lies in the ideal, larger a does too
            probe = tuple(prefix) + (a,) + (0,) * (nvars - len(prefix) - 1)
            if in_ideal(probe, gens):
                break
            rec(prefix + [a], remaining - a)

    rec([], max_degree)
    return out


def krull_dimension(gens, nvars):
    """Dimension of k[x]/M: the largest set of variables avoiding every generator's support."""
    gens = minimalize(gens)
    if any(not any(g) for g in gens):
        return -1
    supports = [frozenset(i for i, a in enumerate(g) if a) for g in gens]
    for size in range(nvars, -1, -1):
        for subset in combinations(range(nvars), size):
            s = set(subset)
            if all(not sup <= s for sup in supports):
                return size
    return 0


# -- Hilbert series ---------------------------------------------------------
# Integer polynomials in z are dicts {exponent: coefficient}.

def zpoly_add(a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
        if not out[k]:
            del out[k]
    return out


def zpoly_mul(a, b):
    out = {}
    for k1, v1 in a.items():
        for k2, v2 in b.items():
            out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
    return {k: v for k, v in out.items() if v}


def zpoly_shift(a, d):
    return {k + d: v for k, v in a.items()}


def hilbert_numerator(gens, weights):
    """Numerator N(z) with HS(k[x]/M) = N(z) / prod(1 - z^w_i); weights positive."""
    gens = tuple(minimalize(gens))
    return dict(_hnum(gens, tuple(weights)))


def _wdeg(g, weights):
    return sum(a * w for a, w in zip(g, weights))


@lru_cache(maxsize=65536)
def _hnum_cached(gens, weights):
    return tuple(sorted(_hnum_impl(gens, weights).items()))


def _hnum(gens, weights):
    return dict(_hnum_cached(gens, weights))


def _hnum_impl(gens, weights):
    if not gens:
        return {0: 1}
    if any(not any(g) for g in gens):
        return {}
    supports = [{i for i, a in enumerate(g) if a} for g in gens]
    used = set()
    disjoint = True
    for s in supports:
        if used & s:
            disjoint = False
            break
        used |= s
    if disjoint:
        out = {0: 1}
        for g in gens:
            out = zpoly_mul(out, {0: 1, _wdeg(g, weights): -1})
        return out
    n = len(weights)
    freq = [0] * n
    for g, s in zip(gens, supports):
        if len(s) > 1:
            for i in s:
                freq[i] += 1
    v = max(range(n), key=lambda i: (freq[i], -i))
    exps = sorted(g[v] for g, s in zip(gens, supports) if len(s) > 1 and g[v] > 0)
    e = exps[(len(exps) - 1) // 2]
    pivot = tuple(e if i == v else 0 for i in range(n))
    with_pivot = tuple(minimalize(list(gens) + [pivot]))
    colon = tuple(minimalize(
        tuple(max(0, g[i] - pivot[i]) for i in range(n)) for g in gens
    ))
    left = _hnum(with_pivot, weights)
    right = zpoly_shift(_hnum(colon, weights), e * weights[v])
    return zpoly_add(left, right)


def divide_by_denominator(num, weights):
    """Exact quotient num / prod(1 - z^w); raises ValueError if not a polynomial."""
    q = dict(num)
    for w in weights:
        if not q:
            return {}
        top = max(q)
        out = {}
        for k in range(0, top + 1):
            v = q.get(k, 0) + out.get(k - w, 0)
            if v:
                out[k] = v
        # out = q / (1 - z^w) as power series; exact iff it terminates by top - w
        if any(k > top - w for k in out):
            raise ValueError("Hilbert series is not a polynomial")
        q = out
    return q


def hilbert_function_from_numerator(num, weights, upto):
    """Coefficients of N(z)/prod(1 - z^w) for degrees 0..upto."""
    series = [0] * (upto + 1)
    for k, v in num.items():
        if k <= upto:
            series[k] += v
    for w in weights:
        for k in range(w, upto + 1):
            series[k] += series[k - w]
    return series


def mixed_hilbert_numerator(gens, weights):
    """Hilbert numerator when some weights are zero.

    The zero-weight variables must be nilpotent modulo the ideal (pure powers
    among the generators); the series is summed over the finitely many standard
    monomials in those variables. Returns ``(numerator, positive_weights)``.
    """
    gens = minimalize(gens)
    zero = [i for i, w in enumerate(weights) if w == 0]
    pos = [i for i, w in enumerate(weights) if w > 0]
    pw = tuple(weights[i] for i in pos)
    if not zero:
        return hilbert_numerator(gens, weights), pw
    zgens = [tuple(g[i] for i in zero) for g in gens if all(g[i] == 0 for i in pos)]
    fibers = standard_monomials(zgens, len(zero))
    total = {}
    for mu in fibers:
        sub = []
        for g in gens:
            if all(g[i] <= a for i, a in zip(zero, mu)):
                sub.append(tuple(g[i] for i in pos))
        total = zpoly_add(total, hilbert_numerator(sub, pw))
    return total, pw
