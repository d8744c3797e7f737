"""Exact integer and rational matrix utilities.

Everything here is exact: entries are Python ints or fractions.Fraction,
never floats.  Normal forms are deterministic (fixed pivot rules) so that
repeated runs produce identical output.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def _normalize_entry(x):
    if isinstance(x, bool):
        raise TypeError("boolean matrix entries are not allowed")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    raise TypeError(f"matrix entries must be int or Fraction, got {type(x).__name__}")


class Matrix:
    """Immutable exact matrix over the integers or rationals."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data):
        rows = tuple(tuple(_normalize_entry(x) for x in row) for row in data)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", len(rows[0]) if rows else 0)
        object.__setattr__(self, "data", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @staticmethod
    def identity(n):
        return Matrix([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zeros(r, c):
        return Matrix([[0] * c for _ in range(r)])

    @staticmethod
    def diagonal(entries):
        n = len(entries)
        return Matrix([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i):
        return self.data[i]

    def column(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def is_integral(self):
        return all(isinstance(x, int) for row in self.data for x in row)

    def is_square(self):
        return self.rows == self.cols

    def transpose(self):
        return Matrix([[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)])

    def __neg__(self):
        return Matrix([[-x for x in row] for row in self.data])

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return Matrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)])

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other):
        if self.cols != other.rows:
            raise ValueError("shape mismatch in product")
        ot = other.transpose().data
        return Matrix([[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.data])

    def matvec(self, v):
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.data)

    def scaled(self, c):
        return Matrix([[c * x for x in row] for row in self.data])

    def to_lists(self):
        return [list(row) for row in self.data]

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.data == other.data

    def __hash__(self):
        return hash(self.data)

    def __repr__(self):
        return f"Matrix({self.to_lists()!r})"

    def det(self):
        """Exact determinant (Bareiss for integer input, Gauss over Q otherwise)."""
        if not self.is_square():
            raise ValueError("determinant of non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        if self.is_integral():
            return _det_bareiss([list(r) for r in self.data])
        m = [[Fraction(x) for x in row] for row in self.data]
        sign = 1
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c] != 0), None)
            if piv is None:
                return 0
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                sign = -sign
            for r in range(c + 1, n):
                f = m[r][c] / m[c][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        out = Fraction(sign)
        for i in range(n):
            out *= m[i][i]
        return _normalize_entry(out)

    def rank(self):
        """Rank over the rationals."""
        m = [[Fraction(x) for x in row] for row in self.data]
        rank = 0
        for c in range(self.cols):
            piv = next((r for r in range(rank, self.rows) if m[r][c] != 0), None)
            if piv is None:
                continue
            m[rank], m[piv] = m[piv], m[rank]
            for r in range(self.rows):
                if r != rank and m[r][c] != 0:
                    f = m[r][c] / m[rank][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
            rank += 1
        return rank

    def inverse(self):
        """Exact inverse; entries are ints when the matrix is unimodular."""
        if not self.is_square():
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        m = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
             for i, row in enumerate(self.data)]
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c] != 0), None)
            if piv is None:
                raise ValueError("matrix is singular")
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [x * inv for x in m[c]]
            for r in range(n):
                if r != c and m[r][c] != 0:
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return Matrix([row[n:] for row in m])


def _det_bareiss(m):
    n = len(m)
    sign = 1
    prev = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for r in range(c + 1, n):
            for k in range(c + 1, n):
                m[r][k] = (m[r][k] * m[c][c] - m[r][c] * m[c][k]) // prev
            m[r][c] = 0
        prev = m[c][c]
    return sign * m[n - 1][n - 1]


def vector_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def divisibility_index(v):
    """Largest positive integer dividing every entry of v; v/index is primitive."""
    if all(x == 0 for x in v):
        raise ValueError("divisibility index of the zero vector is undefined")
    if any(not isinstance(x, int) for x in v):
        raise TypeError("divisibility index needs an integer vector")
    return vector_gcd(v)


def is_primitive(v):
    return divisibility_index(v) == 1


class _SNFState:
    """Working state for Smith reduction: S = L @ A @ R with all four
    transforms tracked, so A = U @ S @ V for U = L^-1, V = R^-1."""

    def __init__(self, a):
        self.s = [list(row) for row in a.data]
        self.r, self.c = a.rows, a.cols
        self.u = [[int(i == j) for j in range(self.r)] for i in range(self.r)]
        self.ui = [[int(i == j) for j in range(self.r)] for i in range(self.r)]
        self.v = [[int(i == j) for j in range(self.c)] for i in range(self.c)]
        self.vi = [[int(i == j) for j in range(self.c)] for i in range(self.c)]

    def row_swap(self, i, j):
        if i == j:
            return
        self.s[i], self.s[j] = self.s[j], self.s[i]
        for row in self.u:
            row[i], row[j] = row[j], row[i]
        self.ui[i], self.ui[j] = self.ui[j], self.ui[i]

    def col_swap(self, i, j):
        if i == j:
            return
        for row in self.s:
            row[i], row[j] = row[j], row[i]
        self.v[i], self.v[j] = self.v[j], self.v[i]
        for row in self.vi:
            row[i], row[j] = row[j], row[i]

    def row_add(self, i, j, q):
        # row_i += q * row_j
        if q == 0:
            return
        self.s[i] = [a + q * b for a, b in zip(self.s[i], self.s[j])]
        for row in self.u:
            row[j] -= q * row[i]
        self.ui[i] = [a + q * b for a, b in zip(self.ui[i], self.ui[j])]

    def col_add(self, j, i, q):
        # col_j += q * col_i
        if q == 0:
            return
        for row in self.s:
            row[j] += q * row[i]
        self.v[i] = [a - q * b for a, b in zip(self.v[i], self.v[j])]
        for row in self.vi:
            row[j] += q * row[i]

    def row_negate(self, i):
        self.s[i] = [-x for x in self.s[i]]
        for row in self.u:
            row[i] = -row[i]
        self.ui[i] = [-x for x in self.ui[i]]

    def pivot_search(self, t):
        best = None
        for i in range(t, self.r):
            for j in range(t, self.c):
                x = abs(self.s[i][j])
                if x and (best is None or x < best[0]):
                    best = (x, i, j)
        return best


def smith_normal_form(a):
    """Smith normal form with transforms.

    Returns (U, S, V) with A = U @ S @ V, U and V unimodular, and S diagonal
    with nonnegative entries d_1 | d_2 | ... .  The reduction picks the
    smallest-magnitude pivot (ties broken by position), which makes the
    output deterministic.
    """
    if not a.is_integral():
        raise TypeError("Smith normal form needs an integer matrix")
    st = _SNFState(a)
    t = 0
    limit = min(st.r, st.c)
    while t < limit:
        found = st.pivot_search(t)
        if found is None:
            break
        _, pi, pj = found
        st.row_swap(t, pi)
        st.col_swap(t, pj)
        while True:
            # clear column t with row operations, restarting if a remainder
            # becomes the new (smaller) pivot
            dirty = False
            for i in range(t + 1, st.r):
                if st.s[i][t] == 0:
                    continue
                q = st.s[i][t] // st.s[t][t]
                st.row_add(i, t, -q)
                if st.s[i][t] != 0:
                    st.row_swap(t, i)
                    dirty = True
                    break
            if dirty:
                continue
            for j in range(t + 1, st.c):
                if st.s[t][j] == 0:
                    continue
                q = st.s[t][j] // st.s[t][t]
                st.col_add(j, t, -q)
                if st.s[t][j] != 0:
                    st.col_swap(t, j)
                    dirty = True
                    break
            if dirty:
                continue
            # pivot must divide the rest of the submatrix
            offender = None
            for i in range(t + 1, st.r):
                for j in range(t + 1, st.c):
                    if st.s[i][j] % st.s[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            st.row_add(t, offender, 1)
        if st.s[t][t] < 0:
            st.row_negate(t)
        t += 1
    return Matrix(st.u), Matrix(st.s), Matrix(st.v)


def smith_diagonal(a):
    _, s, _ = smith_normal_form(a)
    return tuple(s[i, i] for i in range(min(a.rows, a.cols)))


def cokernel_invariants(a):
    """Invariant factors of Z^rows / A . Z^cols.

    Factors of 1 are dropped; one 0 per unit of free rank is appended, so
    e.g. (2, 2, 0) means Z/2 + Z/2 + Z.
    """
    diag = smith_diagonal(a)
    rank = sum(1 for d in diag if d != 0)
    factors = [d for d in diag if d not in (0, 1)]
    factors.extend([0] * (a.rows - rank))
    return tuple(factors)


def hermite_row_basis(vectors, width):
    """Canonical basis (row-style Hermite form) of the lattice spanned by
    the given integer vectors: pivots positive, entries above each pivot
    reduced into [0, pivot), rows ordered by pivot column."""
    rows = [list(v) for v in vectors if any(x != 0 for x in v)]
    h = []
    for col in range(width):
        live = [r for r in rows if r[col] != 0]
        if not live:
            continue
        # fold the column entries into a single pivot row carrying their gcd
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            piv = live[0]
            for r in live[1:]:
                q = r[col] // piv[col]
                for k in range(width):
                    r[k] -= q * piv[k]
            live = [r for r in live if r[col] != 0]
        piv = live[0]
        if piv[col] < 0:
            for k in range(width):
                piv[k] = -piv[k]
        h.append(piv)
        rows = [r for r in rows if r is not piv and any(x != 0 for x in r)]
    # reduce entries above pivots
    for idx in range(len(h) - 1, -1, -1):
        piv_col = next(c for c in range(width) if h[idx][c] != 0)
        for upper in range(idx):
            q = h[upper][piv_col] // h[idx][piv_col]
            if q:
                for k in range(width):
                    h[upper][k] -= q * h[idx][k]
    return tuple(tuple(r) for r in h)


def kernel_basis(a):
    """Basis of the saturated integer kernel {n : A n = 0}, canonically
    normalized (Hermite form, deterministic)."""
    if not a.is_integral():
        raise TypeError("kernel basis needs an integer matrix")
    _, s, v = smith_normal_form(a)
    rank = sum(1 for i in range(min(a.rows, a.cols)) if s[i, i] != 0)
    vi = v.inverse()
    raw = [vi.column(j) for j in range(rank, a.cols)]
    return hermite_row_basis(raw, a.cols)


def solve_integer(a, b):
    """Some integer x with A x = b, or None if no integral solution exists.

    The choice is deterministic: free coordinates of the Smith back
    substitution are set to zero.
    """
    if len(b) != a.rows:
        raise ValueError("right-hand side length mismatch")
    u, s, v = smith_normal_form(a)
    c = u.inverse().matvec(b)
    y = [0] * a.cols
    for i in range(a.rows):
        d = s[i, i] if i < min(a.rows, a.cols) else 0
        if d == 0:
            if c[i] != 0:
                return None
        else:
            if c[i] % d != 0:
                return None
            y[i] = c[i] // d
    return v.inverse().matvec(y)


def lattice_span_equal(vectors_a, vectors_b, width):
    """Do two integer vector families span the same sublattice of Z^width?"""
    return hermite_row_basis(vectors_a, width) == hermite_row_basis(vectors_b, width)


def is_saturated_family(vectors, width):
    """A family of independent integer vectors spans a saturated sublattice
    iff all its Smith invariant factors are 1."""
    m = Matrix(list(vectors))
    if m.rows == 0:
        return True
    diag = smith_diagonal(m)
    return all(d == 1 for d in diag[: m.rows]) and len([d for d in diag if d != 0]) == m.rows
