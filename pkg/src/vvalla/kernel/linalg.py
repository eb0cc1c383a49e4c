"""Dense linear algebra over F_p, backed by flint's nmod_mat.

Matrices act on column vectors: a map V -> W with dim V = a, dim W = b is a
b x a matrix. Zero-sized shapes are handled here because flint is not uniform
about them.
"""

from flint import nmod_mat


def matrix(rows, nrows, ncols, p, reduced=False):
    """``reduced`` promises Python ints already in [0, p)."""
    if nrows == 0 or ncols == 0:
        return _Empty(nrows, ncols, p)
    if reduced:
        return nmod_mat(rows, p)
    return nmod_mat([[int(v) % p for v in r] for r in rows], p)


def zero(nrows, ncols, p):
    return matrix([[0] * ncols for _ in range(nrows)], nrows, ncols, p)


def from_columns(cols, nrows, p, reduced=False):
    ncols = len(cols)
    rows = [list(r) for r in zip(*cols)] if ncols else []
    return matrix(rows, nrows, ncols, p, reduced)


class _Empty:
    """Stand-in for matrices with a zero dimension."""

    def __init__(self, nrows, ncols, p):
        self._r, self._c, self.p = nrows, ncols, p

    def nrows(self):
        return self._r

    def ncols(self):
        return self._c

    def rank(self):
        return 0

    def tolist(self):
        return [[] for _ in range(self._r)]


def shape(m):
    return m.nrows(), m.ncols()


def rank(m):
    return m.rank()


def mul(a, b, p):
    """Product a*b tolerating empty shapes."""
    if isinstance(a, _Empty) or isinstance(b, _Empty):
        return zero(a.nrows(), b.ncols(), p)
    return a * b


def hstack(mats, nrows, p):
    rows = [[] for _ in range(nrows)]
    for m in mats:
        lst = m.tolist()
        for i in range(nrows):
            rows[i].extend(int(v) for v in lst[i])
    return matrix(rows, nrows, len(rows[0]) if rows else 0, p)


def vstack(mats, ncols, p):
    rows = []
    for m in mats:
        rows.extend([int(v) for v in r] for r in m.tolist())
    return matrix(rows, len(rows), ncols, p)


def kernel(m):
    """Basis of the null space, as a list of column vectors (lists of ints)."""
    r, c = shape(m)
    if c == 0:
        return []
    if r == 0:
        return [[int(i == j) for i in range(c)] for j in range(c)]
    x, nullity = m.nullspace()
    cols = x.tolist()
    return [[int(cols[i][j]) for i in range(c)] for j in range(nullity)]


def column_space(m):
    """A basis of the column span (list of column vectors)."""
    r, c = shape(m)
    if r == 0 or c == 0:
        return []
    t = m.transpose()
    red, rk = t.rref()
    lst = red.tolist()
    return [[int(v) for v in lst[i]] for i in range(rk)]


def quotient_dim(ambient_dim, sub_vectors, p):
    return ambient_dim - span_rank(sub_vectors, ambient_dim, p)


def span_rank(vectors, dim, p):
    if not vectors or dim == 0:
        return 0
    return matrix(vectors, len(vectors), dim, p).rank()


def homology_dim(outgoing, incoming, dim, p):
    """dim ker(outgoing) - rank(incoming) for V --outgoing--> and --incoming--> V."""
    k = dim - (rank(outgoing) if outgoing is not None else 0)
    return k - (rank(incoming) if incoming is not None else 0)


def pivot_columns(vectors, dim, p):
    """Indices of the vectors that are independent of all earlier ones."""
    if not vectors or dim == 0:
        return []
    red, rk = from_columns(vectors, dim, p, reduced=True).rref()
    lst = red.tolist()
    out = []
    for i in range(rk):
        row = lst[i]
        out.append(next(j for j in range(len(vectors)) if int(row[j])))
    return out


def in_span(vec, vectors, dim, p):
    if not any(v % p for v in vec):
        return True
    if not vectors:
        return False
    return span_rank(list(vectors) + [vec], dim, p) == span_rank(vectors, dim, p)


class SubquotientSpace:
    """Coordinates on ker / im inside a space V of dimension ``dim``.

    ``kernel_basis`` spans Z and ``image_vectors`` spans B with B inside Z. The
    quotient Z/B gets the basis formed by kernel vectors that extend a basis of
    B; ``coords`` maps a vector of Z to its class in that basis.
    """

    def __init__(self, kernel_basis, image_vectors, dim, p):
        self.p = p
        self.dim = dim
        img = [[x % p for x in v] for v in image_vectors if any(x % p for x in v)]
        if img:
            base = column_space(from_columns(img, dim, p, reduced=True))
        else:
            base = []
        self.image = base
        kernel_basis = [[x % p for x in z] for z in kernel_basis]
        # greedy extension of the image basis: pivot columns of [base | Z]
        rep = [kernel_basis[j - len(base)] for j in pivot_columns(base + kernel_basis, dim, p)
               if j >= len(base)]
        cur = list(base) + rep
        self.reps = rep
        self.ambient_basis = cur
        self._solver = None
        if cur:
            self._solver = matrix([list(v) for v in cur], len(cur), dim, p)

    @property
    def qdim(self):
        return len(self.reps)

    def coords(self, vec):
        """Coordinates of the class of ``vec`` (assumed in Z) in the quotient basis."""
        if not self.reps:
            return []
        p = self.p
        a = self._solver.transpose()
        aug = hstack([a, matrix([[v] for v in vec], self.dim, 1, p)], self.dim, p)
        red, rk = aug.rref()
        lst = red.tolist()
        n = len(self.ambient_basis)
        sol = [0] * n
        pivcol = []
        for i in range(rk):
            row = lst[i]
            j = next(k for k in range(n + 1) if int(row[k]))
            if j == n:
                raise ValueError("vector outside the ambient subspace")
            pivcol.append((i, j))
        for i, j in pivcol:
            sol[j] = int(lst[i][n])
        return sol[len(self.image):]
