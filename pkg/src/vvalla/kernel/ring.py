"""Polynomial rings over prime fields and their elements.

Polynomials are stored densely per monomial: a dict mapping exponent tuples to
residues in ``[0, p)``. Zero coefficients are never stored.
"""

import re
from functools import lru_cache

import flint

from ..errors import InputError, PreconditionError, StructuralError

DEFAULT_CHARACTERISTIC = 32003


def is_prime(p):
    return p >= 2 and bool(flint.fmpz(p).is_prime())


@lru_cache(maxsize=None)
def _drl(e):
    return (sum(e),) + tuple(-v for v in reversed(e))


def degrevlex_key(e):
    """Sort key for degree-reverse-lexicographic order (larger key = larger monomial)."""
    return _drl(e)


class PolyRing:
    """Free polynomial ring k[x_1..x_n] over the prime field F_p.

    ``weights`` is a positive integer grading used for homogeneity tests;
    the monomial order is always degrevlex on the standard degree.
    """

    def __init__(self, names, p=DEFAULT_CHARACTERISTIC, weights=None):
        names = tuple(names)
        if not is_prime(p):
            raise PreconditionError(f"characteristic {p} is not prime")
        if len(set(names)) != len(names):
            raise StructuralError(f"duplicate variable names in {names}")
        for nm in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", nm):
                raise StructuralError(f"invalid variable name {nm!r}")
        self.names = names
        self.nvars = len(names)
        self.p = p
        if weights is None:
            weights = (1,) * self.nvars
        weights = tuple(int(w) for w in weights)
        if len(weights) != self.nvars:
            raise StructuralError("weights must match the number of variables")
        self.weights = weights
        self.zero_exp = (0,) * self.nvars

    def signature(self):
        return (self.names, self.p)

    def __eq__(self, other):
        return isinstance(other, PolyRing) and self.signature() == other.signature()

    def __hash__(self):
        return hash(self.signature())

    def __repr__(self):
        return f"PolyRing({list(self.names)}, p={self.p})"

    # -- construction -----------------------------------------------------
    def gens(self):
        out = []
        for i in range(self.nvars):
            e = [0] * self.nvars
            e[i] = 1
            out.append(Polynomial(self, {tuple(e): 1}))
        return out

    def var(self, name):
        return self.gens()[self.names.index(name)]

    def zero(self):
        return Polynomial(self, {})

    def one(self):
        return Polynomial(self, {self.zero_exp: 1})

    def const(self, c):
        c %= self.p
        return Polynomial(self, {self.zero_exp: c} if c else {})

    def monomial(self, exps, coeff=1):
        coeff %= self.p
        return Polynomial(self, {tuple(exps): coeff} if coeff else {})

    def __call__(self, obj):
        if isinstance(obj, Polynomial):
            if obj.ring != self:
                raise StructuralError("polynomial belongs to a different ring")
            return obj
        if isinstance(obj, int):
            return self.const(obj)
        if isinstance(obj, str):
            return parse_polynomial(obj, self)
        raise TypeError(f"cannot coerce {type(obj).__name__} into {self!r}")

    def extend(self, names, weights=None):
        """Return a ring with extra variables appended (same characteristic)."""
        if weights is None:
            weights = (1,) * len(names)
        return PolyRing(self.names + tuple(names), self.p, self.weights + tuple(weights))

    def wdeg(self, e):
        return sum(a * w for a, w in zip(e, self.weights))


class Polynomial:
    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms):
        self.ring = ring
        self.terms = terms

    # -- inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def lead_monomial(self):
        if not self.terms:
            raise PreconditionError("zero polynomial has no leading monomial")
        return max(self.terms, key=degrevlex_key)

    def lead_coeff(self):
        return self.terms[self.lead_monomial()]

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self):
        return min((sum(e) for e in self.terms), default=-1)

    def wdegree(self, weights=None):
        w = weights or self.ring.weights
        return max((sum(a * b for a, b in zip(e, w)) for e in self.terms), default=-1)

    def is_homogeneous(self, weights=None):
        w = weights or self.ring.weights
        degs = {sum(a * b for a, b in zip(e, w)) for e in self.terms}
        return len(degs) <= 1

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def variables_used(self):
        used = set()
        for e in self.terms:
            used.update(i for i, a in enumerate(e) if a)
        return used

    def monic(self):
        if not self.terms:
            return self
        inv = pow(self.lead_coeff(), -1, self.ring.p)
        p = self.ring.p
        return Polynomial(self.ring, {e: c * inv % p for e, c in self.terms.items()})

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: degrevlex_key(ec[0]), reverse=True)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                raise StructuralError("polynomials from different rings")
            return other
        if isinstance(other, int):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = (out.get(e, 0) + c) % p
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Polynomial(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = (out.get(e, 0) + c1 * c2) % p
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Polynomial(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise PreconditionError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c):
        p = self.ring.p
        c %= p
        if not c:
            return self.ring.zero()
        return Polynomial(self.ring, {e: v * c % p for e, v in self.terms.items()})

    def mul_monomial(self, mono, coeff=1):
        p = self.ring.p
        return Polynomial(
            self.ring,
            {tuple(a + b for a, b in zip(e, mono)): c * coeff % p for e, c in self.terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.signature(), frozenset(self.terms.items())))

    def homogeneous_part(self, degree, weights=None):
        w = weights or self.ring.weights
        return Polynomial(
            self.ring,
            {e: c for e, c in self.terms.items() if sum(a * b for a, b in zip(e, w)) == degree},
        )

    def substitute(self, images, target_ring):
        """Evaluate at the given polynomials (one image per variable)."""
        out = target_ring.zero()
        powers = [dict() for _ in images]
        for e, c in self.terms.items():
            term = target_ring.const(c)
            for i, a in enumerate(e):
                if a:
                    if a not in powers[i]:
                        powers[i][a] = images[i] ** a
                    term = term * powers[i][a]
            out = out + term
        return out

    # -- rendering --------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        p = self.ring.p
        pieces = []
        for e, c in self.sorted_terms():
            sc = c if c <= p // 2 else c - p
            mono = "*".join(
                (nm if a == 1 else f"{nm}^{a}") for nm, a in zip(self.ring.names, e) if a
            )
            if not mono:
                body = str(abs(sc))
            elif abs(sc) == 1:
                body = mono
            else:
                body = f"{abs(sc)}*{mono}"
            sign = "-" if sc < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


# -- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*^()]))")


def _tokenize(text, ring):
    pos = 0
    tokens = []
    names = sorted(ring.names, key=len, reverse=True)
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise InputError(f"unexpected character {text[pos:].strip()[0]!r} in {text!r}")
        num, ident, op = m.groups()
        if num is not None:
            tokens.append(("num", int(num)))
        elif ident is not None:
            # identifiers may be juxtaposed variable names, e.g. "xy" -> x*y
            rest = ident
            while rest:
                for nm in names:
                    if rest.startswith(nm):
                        tokens.append(("var", nm))
                        rest = rest[len(nm):]
                        break
                else:
                    m2 = re.match(r"\d+", rest)
                    if m2:
                        tokens.append(("num", int(m2.group())))
                        rest = rest[m2.end():]
                    else:
                        raise InputError(f"unknown variable {rest!r} in {text!r}")
        else:
            tokens.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, tokens, ring, text):
        self.tokens = tokens
        self.i = 0
        self.ring = ring
        self.text = text

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self):
        sign = 1
        tok = self.peek()
        if tok in (("op", "+"), ("op", "-")):
            self.take()
            sign = -1 if tok[1] == "-" else 1
        acc = self.term().scale(sign)
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self):
        acc = self.factor()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                acc = acc * self.factor()
            elif tok is not None and (tok[0] in ("num", "var") or tok == ("op", "(")):
                acc = acc * self.factor()
            else:
                return acc

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            tok = self.take()
            if tok is None or tok[0] != "num":
                raise InputError(f"exponent must be a non-negative integer in {self.text!r}")
            base = base ** tok[1]
        return base

    def atom(self):
        tok = self.take()
        if tok is None:
            raise InputError(f"unexpected end of polynomial {self.text!r}")
        kind, val = tok
        if kind == "num":
            return self.ring.const(val)
        if kind == "var":
            return self.ring.var(val)
        if val == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                raise InputError(f"unbalanced parenthesis in {self.text!r}")
            return inner
        if val == "-":
            return -self.factor()
        raise InputError(f"unexpected {val!r} in {self.text!r}")


def parse_polynomial(text, ring):
    """Parse ``text`` such as ``"y^3 - x^4"`` or ``"3x^2y + 1"`` into ``ring``."""
    if not isinstance(text, str):
        text = str(text)
    tokens = _tokenize(text, ring)
    if not tokens:
        raise InputError(f"empty polynomial {text!r}")
    parser = _Parser(tokens, ring, text)
    poly = parser.expr()
    if parser.peek() is not None:
        raise InputError(f"trailing input in polynomial {text!r}")
    return poly
