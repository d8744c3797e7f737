"""Seeds for cluster mutation: fixed lattice data, bases, and the mutation
formulas for bases, exchange matrices, and tropicalized maps.

Conventions used throughout the package:

* Indices are 0-based.
* A seed is stored as a unimodular integer matrix whose columns express the
  current basis vectors e_i in the coordinates of the initial basis.  All
  vectors in N are tuples of initial-basis coordinates; all vectors in the
  dual lattice M° are tuples of coordinates in the initial dual basis
  f_a = e_a^* / d_a.
* The skew form is an n x n rational matrix in initial coordinates; the
  exchange matrix is eps[i][j] = {e_i, e_j} d_j, integral whenever i, j are
  not both frozen.

Out of scope by design: dual seeds obtained by transposing the roles of the
symmetrizers (general d_i are supported, but no dual-seed constructions),
and the partial compactifications of the dual-side variety obtained by
allowing coordinates to vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import UnsupportedError, ValidationError
from .intmat import (
    Matrix,
    cokernel_invariants,
    lattice_span_equal,
    smith_normal_form,
    vector_gcd,
)


def _as_int(x, what):
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    raise ValidationError(f"{what} must be an integer, got {x!r}")


def pos_part(x):
    return x if x > 0 else 0


def neg_part(x):
    return x if x < 0 else 0


class FixedData:
    """Mutation-independent data: rank, skew form, symmetrizers, frozen set."""

    __slots__ = ("n", "skew", "d", "frozen")

    def __init__(self, n, skew, d=None, frozen=()):
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "skew", skew)
        object.__setattr__(self, "d", tuple(d) if d is not None else (1,) * n)
        object.__setattr__(self, "frozen", frozenset(frozen))
        self._validate()

    def __setattr__(self, name, value):
        raise AttributeError("FixedData is immutable")

    def _validate(self):
        if self.skew.rows != self.n or self.skew.cols != self.n:
            raise ValidationError("skew form has the wrong shape")
        if self.skew.transpose() != -self.skew:
            raise ValidationError("skew form is not skew-symmetric")
        if len(self.d) != self.n or any(not isinstance(x, int) or x <= 0 for x in self.d):
            raise ValidationError("symmetrizers d must be positive integers")
        if self.n and gcd(*self.d) != 1:
            raise ValidationError("symmetrizers d must have gcd 1")
        if not all(isinstance(i, int) and 0 <= i < self.n for i in self.frozen):
            raise ValidationError("frozen indices out of range")
        for i in range(self.n):
            for j in range(self.n):
                if i in self.frozen and j in self.frozen:
                    continue
                e = self.skew[i, j] * self.d[j]
                if isinstance(e, Fraction) and e.denominator != 1:
                    raise ValidationError(
                        f"entry {{e_{i}, e_{j}}} d_{j} = {e} is not integral"
                    )

    @property
    def unfrozen(self):
        return tuple(i for i in range(self.n) if i not in self.frozen)

    def d_matrix(self):
        return Matrix.diagonal(list(self.d))

    def __eq__(self, other):
        return (
            isinstance(other, FixedData)
            and self.n == other.n
            and self.skew == other.skew
            and self.d == other.d
            and self.frozen == other.frozen
        )

    def __hash__(self):
        return hash((self.n, self.skew, self.d, self.frozen))


def _epsilon_from_basis(fixed, basis):
    """Definitional exchange matrix: (B^T skew B) D, with integrality checked
    off the frozen block."""
    eps = basis.transpose() @ fixed.skew @ basis @ fixed.d_matrix()
    for i in range(fixed.n):
        for j in range(fixed.n):
            if i in fixed.frozen and j in fixed.frozen:
                continue
            if not isinstance(eps[i, j], int):
                raise ValidationError("exchange matrix has a non-integral entry")
    return eps


class Seed:
    """A basis of the fixed lattice, expressed in initial coordinates.

    Construction validates all structural invariants.  Seeds produced by
    mutate_seed take a fast internal path instead: the mutation rule
    provably preserves the invariants, and the acceptance suite checks the
    equality of both epsilon routes on random seeds.
    """

    __slots__ = ("fixed", "basis", "path", "eps", "_basis_inv")

    def __init__(self, fixed, basis, path=()):
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "path", tuple(path))
        object.__setattr__(self, "_basis_inv", None)
        self._validate_and_derive()

    def __setattr__(self, name, value):
        raise AttributeError("Seed is immutable")

    @classmethod
    def _trusted(cls, fixed, basis, path, eps):
        self = object.__new__(cls)
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "path", tuple(path))
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "_basis_inv", None)
        return self

    def _validate_and_derive(self):
        fx, b = self.fixed, self.basis
        n = fx.n
        if b.rows != n or b.cols != n or not b.is_integral():
            raise ValidationError("seed basis must be an integral n x n matrix")
        if abs(b.det()) != 1:
            raise ValidationError("seed basis is not unimodular")

        def unit(i):
            return tuple(int(a == i) for a in range(n))

        unf = fx.unfrozen
        if not lattice_span_equal(
            [b.column(i) for i in unf], [unit(i) for i in unf], n
        ):
            raise ValidationError("unfrozen columns do not span the unfrozen sublattice")
        if not lattice_span_equal(
            [tuple(fx.d[i] * x for x in b.column(i)) for i in range(n)],
            [tuple(fx.d[i] * x for x in unit(i)) for i in range(n)],
            n,
        ):
            raise ValidationError("scaled columns d_i e_i do not span the expected sublattice")
        object.__setattr__(self, "eps", _epsilon_from_basis(fx, b))

    @property
    def basis_inv(self):
        cached = self._basis_inv
        if cached is None:
            cached = self.basis.inverse()
            object.__setattr__(self, "_basis_inv", cached)
        return cached

    @property
    def n(self):
        return self.fixed.n

    def __hash__(self):
        return hash((self.fixed, self.basis))

    def __eq__(self, other):
        return (
            isinstance(other, Seed)
            and self.fixed == other.fixed
            and self.basis == other.basis
        )

    def __repr__(self):
        return f"<Seed rank {self.n} path {list(self.path)}>"

    # -- coordinate helpers -------------------------------------------------

    def e_vector(self, i):
        """Basis vector e_i in initial coordinates."""
        return self.basis.column(i)

    def f_vector(self, i):
        """Dual basis vector f_i = e_i^*/d_i in initial dual coordinates."""
        d = self.fixed.d
        out = []
        for a in range(self.n):
            x = Fraction(d[a], d[i]) * self.basis_inv[i, a]
            out.append(_as_int(x, "dual basis coordinate"))
        return tuple(out)

    def v_vector(self, i):
        """v_i = {e_i, .} in initial dual coordinates (integral for unfrozen i)."""
        d = self.fixed.d
        col = self.basis.column(i)
        skew = self.fixed.skew
        out = []
        for a in range(self.n):
            x = sum(col[b] * skew[b, a] for b in range(self.n)) * d[a]
            out.append(_as_int(x, "v-vector coordinate"))
        return tuple(out)

    def pair_with_dual(self, n_vec, m_vec):
        """Canonical pairing of n (initial coords) with m (dual coords)."""
        d = self.fixed.d
        return sum(Fraction(n_vec[a] * m_vec[a], d[a]) for a in range(self.n))

    def skew_pair(self, n1, n2):
        """{n1, n2} for vectors in initial coordinates."""
        skew = self.fixed.skew
        return sum(
            n1[a] * skew[a, b] * n2[b]
            for a in range(self.n)
            for b in range(self.n)
            if n1[a] and skew[a, b]
        )


def root_seed(fixed):
    return Seed(fixed, Matrix.identity(fixed.n))


def seed_from_epsilon(eps_rows, d=None, frozen=()):
    """Root seed realizing a given d-skew-symmetrizable exchange matrix."""
    eps = Matrix(eps_rows)
    n = eps.rows
    dd = tuple(d) if d is not None else (1,) * n
    check_symmetrizable(eps, dd)
    skew = Matrix(
        [[Fraction(eps[i, j], dd[j]) for j in range(n)] for i in range(n)]
    )
    return root_seed(FixedData(n, skew, dd, frozen))


def epsilon_matrix(seed):
    """eps[i][j] = {e_i, e_j} d_j in the seed's own basis."""
    return seed.eps


def epsilon_from_basis(seed):
    """Recompute the exchange matrix from the basis and skew form.

    Always equal to seed.eps; kept as the definitional route so tests can
    cross-check it against the matrix-mutation rule used by mutate_seed.
    """
    return _epsilon_from_basis(seed.fixed, seed.basis)


def check_symmetrizable(eps, d):
    n = eps.rows
    if eps.cols != n or len(d) != n:
        raise ValidationError("exchange matrix must be square, with matching d")
    for i in range(n):
        for j in range(n):
            if d[i] * eps[i, j] != -d[j] * eps[j, i]:
                raise ValidationError(
                    f"matrix is not d-skew-symmetrizable at ({i}, {j})"
                )


def mutate_epsilon(eps, d, k):
    """Matrix mutation at index k (three-case rule).

    Entries of the frozen block may be rational; the rule is the same.
    """
    check_symmetrizable(eps, d)
    n = eps.rows
    if not 0 <= k < n:
        raise ValidationError(f"mutation index {k} out of range")
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            if i == k or j == k:
                row.append(-eps[i, j])
            elif eps[i, k] * eps[k, j] > 0:
                row.append(eps[i, j] + abs(eps[i, k]) * eps[k, j])
            else:
                row.append(eps[i, j])
        out.append(row)
    return Matrix(out)


def mutate_seed(seed, k):
    """Seed mutation: e_k -> -e_k, e_i -> e_i + [eps_ik]_+ e_k.

    The mutated exchange matrix is produced by the two-line matrix rule;
    it provably equals the recomputation from the new basis, and that
    coherence is property-tested, so the result skips re-validation.
    """
    if k in seed.fixed.frozen:
        raise ValidationError(f"cannot mutate at frozen index {k}")
    if not 0 <= k < seed.n:
        raise ValidationError(f"mutation index {k} out of range")
    eps = seed.eps
    n = seed.n
    j = [[int(a == b) for b in range(n)] for a in range(n)]
    j[k][k] = -1
    for i in range(n):
        if i != k:
            j[k][i] = pos_part(eps[i, k])
    return Seed._trusted(
        seed.fixed,
        seed.basis @ Matrix(j),
        seed.path + (k,),
        mutate_epsilon(eps, seed.fixed.d, k),
    )


def mutate_along(seed, path):
    for k in path:
        seed = mutate_seed(seed, k)
    return seed


def tropical_mutation_A(seed, k, n_vec):
    """Piecewise-linear mutation on N: n -> n + [{n, d_k e_k}]_+ e_k."""
    if k in seed.fixed.frozen:
        raise ValidationError(f"index {k} is frozen")
    ek = seed.e_vector(k)
    br = seed.skew_pair(n_vec, tuple(seed.fixed.d[k] * x for x in ek))
    br = _as_int(br, "tropical pairing")
    c = pos_part(br)
    return tuple(x + c * y for x, y in zip(n_vec, ek))


def tropical_mutation_X(seed, k, m_vec):
    """Piecewise-linear mutation on the dual: m -> m + [<d_k e_k, m>]_- v_k."""
    if k in seed.fixed.frozen:
        raise ValidationError(f"index {k} is frozen")
    ek = seed.e_vector(k)
    br = seed.pair_with_dual(tuple(seed.fixed.d[k] * x for x in ek), m_vec)
    br = _as_int(br, "tropical pairing")
    c = neg_part(br)
    vk = seed.v_vector(k)
    return tuple(x + c * y for x, y in zip(m_vec, vk))


# -- principal coefficients -------------------------------------------------

@dataclass(frozen=True)
class PrincipalSeed:
    """A seed on the doubled lattice N + M°, with principal coefficients.

    The double of rank n carries the skew form
    {(n1, m1), (n2, m2)} = {n1, n2} + <n1, m2> - <n2, m1>, symmetrizers
    (d, d), and the second block of indices frozen.  p_star is the standard
    unimodular choice of p* for the double (None when the underlying data
    has frozen indices of its own, in which case the choice is not pinned
    down).
    """

    seed: Seed
    p_star: Matrix | None


def principal_double(seed):
    if seed.basis != Matrix.identity(seed.n):
        raise ValidationError("principal coefficients are attached at a root seed")
    n = seed.n
    fx = seed.fixed
    d2 = fx.d + fx.d
    rows = []
    for i in range(2 * n):
        row = []
        for j in range(2 * n):
            if i < n and j < n:
                row.append(fx.skew[i, j])
            elif i < n <= j:
                row.append(Fraction(int(i == j - n), fx.d[i]))
            elif j < n <= i:
                row.append(Fraction(-int(i - n == j), fx.d[j]))
            else:
                row.append(0)
        rows.append(row)
    frozen2 = frozenset(fx.frozen) | frozenset(range(n, 2 * n))
    double = root_seed(FixedData(2 * n, Matrix(rows), d2, frozen2))
    p_star = None
    if not fx.frozen:
        eps_t = seed.eps.transpose()
        blocks = []
        for i in range(2 * n):
            row = []
            for j in range(2 * n):
                if i < n and j < n:
                    row.append(eps_t[i, j])
                elif i < n <= j:
                    row.append(-int(i == j - n))
                elif j < n <= i:
                    row.append(int(i - n == j))
                else:
                    row.append(0)
            blocks.append(row)
        p_star = Matrix(blocks)
    return PrincipalSeed(double, p_star)


# -- maps to the dual and Picard data ---------------------------------------

def p_star_matrix(seed):
    """Matrix of p*: N -> M° in the seed's bases (e_i) and (f_i).

    Only defined here when there are no frozen indices; with frozen indices
    the map is only pinned down up to a choice, which we refuse to make.
    """
    if seed.fixed.frozen:
        raise UnsupportedError(
            "p* is not determined when frozen indices are present"
        )
    return seed.eps.transpose()


def _check_no_zero_row(eps):
    n = eps.rows
    for i in range(n):
        if all(eps[i, j] == 0 for j in range(n)):
            raise ValidationError(f"exchange matrix has zero row {i}")


def picard_invariants(seed):
    """Invariant factors of M° / p*(N): the Picard group of the once-glued
    union of seed tori (and of its general twisted fibre)."""
    p = p_star_matrix(seed)
    _check_no_zero_row(seed.eps)
    return cokernel_invariants(p)


@dataclass(frozen=True)
class LineBundleClass:
    """Coset of a dual vector in M° / p*(N), in Smith coordinates.

    Two dual vectors give the same line-bundle class iff their coordinate
    tuples agree; moduli[i] == 0 marks a free coordinate.
    """

    coordinates: tuple
    moduli: tuple


def line_bundle_class(seed, m_vec):
    p = p_star_matrix(seed)
    _check_no_zero_row(seed.eps)
    u, s, _ = smith_normal_form(p)
    c = u.inverse().matvec(m_vec)
    coords = []
    moduli = []
    for i in range(p.rows):
        di = s[i, i] if i < min(p.rows, p.cols) else 0
        moduli.append(di)
        coords.append(c[i] % di if di != 0 else c[i])
    return LineBundleClass(tuple(coords), tuple(moduli))


def picard_torsion_free(seed):
    return all(f == 0 for f in picard_invariants(seed))


# -- coprimality -------------------------------------------------------------

def _trim(p):
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_gcd_is_unit(c1, c2):
    """Is gcd(1 + t^c1, 1 + t^c2) = 1 over the rationals?

    Plain Euclidean algorithm on dense rational coefficient lists; degrees
    here are divisibility indices of exchange binomials, so small.
    """

    def poly_mod(a, b):
        a = _trim(a[:])
        db, lb = len(b) - 1, b[-1]
        while a and len(a) - 1 >= db:
            da, la = len(a) - 1, a[-1]
            f = la / lb
            for i in range(db + 1):
                a[da - db + i] -= f * b[i]
            _trim(a)
        return a

    p1 = [Fraction(0)] * (c1 + 1)
    p1[0] = p1[c1] = Fraction(1)
    p2 = [Fraction(0)] * (c2 + 1)
    p2[0] = p2[c2] = Fraction(1)
    a, b = p1, p2
    while b:
        a, b = b, poly_mod(a, b)
    return len(a) == 1


def is_coprime_seed(seed):
    """Are the exchange binomials 1 + z^{v_k} pairwise coprime?

    Two such binomials share a factor iff the v's are proportional (up to
    sign) and the univariate gcd of 1 + t^{c} along the common primitive
    direction is non-trivial; constant binomials (v = 0) are units.
    """
    data = []
    for i in seed.fixed.unfrozen:
        v = seed.v_vector(i)
        if all(x == 0 for x in v):
            continue
        c = vector_gcd(v)
        prim = tuple(x // c for x in v)
        neg = tuple(-x for x in prim)
        if prim < neg:
            prim = neg
        data.append((prim, c))
    for a in range(len(data)):
        for b in range(a + 1, len(data)):
            if data[a][0] != data[b][0]:
                continue
            if not _poly_gcd_is_unit(data[a][1], data[b][1]):
                return False
    return True


def totally_coprime_sufficient(seed):
    """Full rank of the unfrozen rows of the exchange matrix guarantees that
    every seed reachable by mutation is coprime.  False only means unknown.
    """
    unf = seed.fixed.unfrozen
    if not unf:
        return True
    rows = [seed.eps.row(i) for i in unf]
    return Matrix(rows).rank() == len(unf)


# -- fans of rays ------------------------------------------------------------

@dataclass(frozen=True)
class XRay:
    """One ray of the dual-side fan: primitive direction (initial dual
    coordinates), blowup multiplicity, and the seed index it came from."""

    index: int
    direction: tuple
    multiplicity: int


def fan_rays_A(seed):
    """Rays d_i e_i of the A-side fan, one per unfrozen index."""
    d = seed.fixed.d
    return tuple(
        tuple(d[i] * x for x in seed.e_vector(i)) for i in seed.fixed.unfrozen
    )


def fan_rays_X(seed):
    """Rays of the dual-side fan: primitive direction of -d_i v_i with its
    divisibility index.  Repeated directions are kept (they record centers
    stacked on one divisor)."""
    out = []
    d = seed.fixed.d
    for i in seed.fixed.unfrozen:
        col = [seed.eps[j, i] for j in range(seed.n)]
        if all(x == 0 for x in col):
            raise ValidationError(f"v_{i} vanishes (zero exchange-matrix column)")
        mult = vector_gcd(col)
        v = seed.v_vector(i)
        raw = tuple(-d[i] * x for x in v)
        if any(x % mult for x in raw):
            raise ValidationError("inconsistent divisibility index")
        direction = tuple(x // mult for x in raw)
        out.append(XRay(i, direction, mult))
    return tuple(out)


def fan_mutation_consistency(seed, k):
    """Do the tropical maps carry the fan rays of this seed onto the rays of
    the mutated seed (with the sign flip at the mutated index)?"""
    mutated = mutate_seed(seed, k)
    d = seed.fixed.d
    for i in seed.fixed.unfrozen:
        ray = tuple(d[i] * x for x in seed.e_vector(i))
        new_ray = tuple(d[i] * x for x in mutated.e_vector(i))
        image = tropical_mutation_A(seed, k, ray)
        if i == k:
            image = tuple(-x for x in image)
        if image != new_ray:
            return False
    for i in seed.fixed.unfrozen:
        ray = tuple(-d[i] * x for x in seed.v_vector(i))
        new_ray = tuple(-d[i] * x for x in mutated.v_vector(i))
        image = tropical_mutation_X(seed, k, ray)
        if i == k:
            image = tuple(-x for x in image)
        if image != new_ray:
            return False
    return True
