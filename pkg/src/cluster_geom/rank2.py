"""Rank-2 realizations: seeds built from primitive plane vectors, smooth fan
completion, boundary blowups of toric surfaces, the induced symmetric pairing
on the kernel of the skew form, and the two derived classifiers
(finite-generation obstruction, dual-basis-conjecture obstruction).

A collection of primitive vectors w_1..w_n generating Z^2 together with
positive weights nu_i determines seed data: the skew form
{e_i, e_j} = gcd(nu) (w_i ^ w_j) with symmetrizers d_i = nu_i / gcd(nu).
When all nu_i = 1, the dual-side geometry is a smooth toric surface (any
smooth complete fan containing the rays w_i) blown up at one very general
point on the boundary divisor of w_i for each i, and the kernel K of the
skew form acquires a mutation-invariant symmetric pairing from intersection
numbers of divisor classes orthogonal to the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from .errors import PreconditionError, UnsupportedError, ValidationError
from .intmat import Matrix, kernel_basis, smith_diagonal, solve_integer, vector_gcd
from .seeds import FixedData, mutate_along, root_seed


def wedge(u, v):
    return u[0] * v[1] - u[1] * v[0]


def rot90(u):
    return (-u[1], u[0])


@dataclass(frozen=True)
class Rank2Data:
    """Primitive vectors in Z^2 (repetitions allowed) with positive weights."""

    w: tuple
    nu: tuple

    def __init__(self, w, nu=None):
        w = tuple(tuple(v) for v in w)
        nu = tuple(nu) if nu is not None else (1,) * len(w)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "nu", nu)
        if len(w) != len(nu):
            raise ValidationError("w and nu must have the same length")
        for v in w:
            if len(v) != 2 or not all(isinstance(x, int) for x in v):
                raise ValidationError("each w must be an integer pair")
            if v == (0, 0) or vector_gcd(v) != 1:
                raise ValidationError(f"vector {v} is not primitive")
        if any(not isinstance(x, int) or x <= 0 for x in nu):
            raise ValidationError("weights nu must be positive integers")
        cols = Matrix([[v[0] for v in w], [v[1] for v in w]])
        if smith_diagonal(cols) != (1, 1):
            raise ValidationError("the vectors w do not generate Z^2")

    @property
    def n(self):
        return len(self.w)


def nine_ray_data():
    """Three vectors on each coordinate line of the triangle fan, weight 1."""
    return Rank2Data(((1, 0),) * 3 + ((0, 1),) * 3 + ((-1, -1),) * 3)


def cubic_data():
    """The triangle fan vectors once each, weight 1."""
    return Rank2Data(((1, 0), (0, 1), (-1, -1)))


def weighted_triangle_data():
    """The triangle fan vectors once each, weight 3 (singular geometry)."""
    return Rank2Data(((1, 0), (0, 1), (-1, -1)), (3, 3, 3))


def build_seed(data):
    """Root seed with {e_i, e_j} = gcd(nu)(w_i ^ w_j) and d_i = nu_i/gcd(nu)."""
    nu0 = gcd(*data.nu)
    d = tuple(x // nu0 for x in data.nu)
    skew = Matrix(
        [[nu0 * wedge(u, v) for v in data.w] for u in data.w]
    )
    return root_seed(FixedData(data.n, skew, d))


def seed_to_rank2(seed):
    """Recover plane vectors from a seed, when the seed is of the special
    shape: no frozen indices, all d_i = 1, skew form of rank 2 inducing a
    unimodular pairing on N/K, and all basis images in N/K primitive."""
    if seed.fixed.frozen:
        raise UnsupportedError("rank-2 realization needs no frozen indices")
    if any(x != 1 for x in seed.fixed.d):
        raise PreconditionError("rank-2 realization needs all d_i = 1")
    eps = seed.eps
    if eps.rank() != 2:
        raise PreconditionError("skew form does not have rank 2")
    n = seed.n
    kernel_initial = [seed.basis.matvec(a) for a in kernel_basis(eps)]
    r = len(kernel_initial)
    if r:
        u, _, _ = smith_normal_form_cols(kernel_initial, n)
    else:
        u = Matrix.identity(n)
    u_inv = u.inverse()
    lifts = [u.column(n - 2), u.column(n - 1)]
    c = seed.skew_pair(lifts[0], lifts[1])
    if abs(c) != 1:
        raise PreconditionError(
            "induced pairing on the quotient by the kernel is not unimodular"
        )
    swap = c == -1

    def project(x):
        y = u_inv.matvec(x)
        out = (y[n - 2], y[n - 1])
        return (out[1], out[0]) if swap else out

    ws = []
    for i in range(n):
        wi = project(seed.e_vector(i))
        if wi == (0, 0) or vector_gcd(wi) != 1:
            raise PreconditionError(
                f"image of basis vector {i} in the rank-2 quotient is not primitive"
            )
        ws.append(wi)
    return Rank2Data(tuple(ws))


def smith_normal_form_cols(columns, height):
    """Smith form of the matrix with the given columns; returns (U, S, V)."""
    from .intmat import smith_normal_form

    m = Matrix([[col[i] for col in columns] for i in range(height)])
    return smith_normal_form(m)


# -- fans --------------------------------------------------------------------

@dataclass(frozen=True)
class Fan2D:
    """Complete smooth fan in Z^2: primitive rays, counterclockwise, every
    consecutive pair (cyclically) of determinant one."""

    rays: tuple

    def __init__(self, rays):
        rays = tuple(tuple(r) for r in rays)
        object.__setattr__(self, "rays", rays)
        if len(rays) < 3:
            raise ValidationError("a complete fan needs at least three rays")
        if len(set(rays)) != len(rays):
            raise ValidationError("fan rays must be distinct")
        for u in rays:
            if vector_gcd(u) != 1:
                raise ValidationError(f"ray {u} is not primitive")
        for u, v in zip(rays, rays[1:] + rays[:1]):
            if wedge(u, v) != 1:
                raise ValidationError(
                    f"consecutive rays {u}, {v} do not span a smooth cone"
                )

    @property
    def size(self):
        return len(self.rays)

    def index_of(self, ray):
        return self.rays.index(tuple(ray))


def _ccw_sorted(rays):
    def half(u):
        return 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1

    def cmp(u, v):
        if half(u) != half(v):
            return half(u) - half(v)
        w = wedge(u, v)
        return -1 if w > 0 else (1 if w < 0 else 0)

    return sorted(rays, key=cmp_to_key(cmp))


def complete_smooth_fan(rays):
    """Deterministic smooth completion containing every input ray.

    Steps: sort the distinct rays counterclockwise; while some cyclically
    consecutive pair spans a non-convex or degenerate angle, insert the
    90-degree rotation of the first ray; then subdivide every non-smooth
    cone by the unique primitive interior ray (v + a u)/det, repeating until
    all consecutive determinants are one (continued-fraction resolution).
    """
    rays = [tuple(r) for r in rays]
    if not rays:
        raise ValidationError("need at least one ray")
    for r in rays:
        if len(r) != 2 or r == (0, 0) or vector_gcd(r) != 1:
            raise ValidationError(f"ray {r} must be a primitive integer pair")
    out = _ccw_sorted(set(rays))
    while True:
        for i, u in enumerate(out):
            v = out[(i + 1) % len(out)]
            if len(out) == 1 or wedge(u, v) <= 0:
                out.insert(i + 1, rot90(u))
                break
        else:
            break
    changed = True
    while changed:
        changed = False
        for i, u in enumerate(out):
            v = out[(i + 1) % len(out)]
            det = wedge(u, v)
            if det > 1:
                a = next(
                    a for a in range(1, det)
                    if (v[0] + a * u[0]) % det == 0 and (v[1] + a * u[1]) % det == 0
                )
                out.insert(i + 1, ((v[0] + a * u[0]) // det, (v[1] + a * u[1]) // det))
                changed = True
                break
    return Fan2D(tuple(out))


def self_intersections(fan):
    """Self-intersection numbers a_i of the boundary divisors, from the wall
    relations u_{i-1} + u_{i+1} = -a_i u_i."""
    out = []
    rays = fan.rays
    r = len(rays)
    for i, u in enumerate(rays):
        s = tuple(p + n for p, n in zip(rays[i - 1], rays[(i + 1) % r]))
        if u[0] != 0:
            if s[0] % u[0] or s[1] * u[0] != s[0] * u[1]:
                raise ValidationError("wall relation unsolvable: malformed fan")
            a = -(s[0] // u[0])
        else:
            if s[1] % u[1] or s[0] != 0:
                raise ValidationError("wall relation unsolvable: malformed fan")
            a = -(s[1] // u[1])
        out.append(a)
    return tuple(out)


# -- blown-up surfaces --------------------------------------------------------

@dataclass(frozen=True)
class DivisorClass:
    """A class on the blown-up surface: integer multiples of the pulled-back
    toric boundary divisors plus multiples of the exceptional curves."""

    toric: tuple
    exceptional: tuple


@dataclass(frozen=True)
class BlowupSurface:
    """A smooth toric surface blown up at distinct very general points of its
    boundary divisors, with its integral intersection form.

    centers[i] is the ray index carrying the i-th blown-up point.  The
    toric block of the intersection form is Q (self-intersections on the
    diagonal, ones between cyclically adjacent rays); exceptional curves are
    mutually orthogonal with square -1 and meet no pulled-back divisor.
    """

    fan: Fan2D
    centers: tuple
    q: Matrix
    boundary_self_intersections: tuple

    @property
    def picard_rank(self):
        return self.fan.size + len(self.centers) - 2

    def intersect(self, c1, c2):
        toric = sum(
            x * y for x, y in zip(self.q.matvec(c1.toric), c2.toric)
        )
        return toric - sum(x * y for x, y in zip(c1.exceptional, c2.exceptional))

    def boundary_component_class(self, j):
        """Proper transform of the j-th toric boundary divisor."""
        toric = tuple(int(i == j) for i in range(self.fan.size))
        exceptional = tuple(-int(c == j) for c in self.centers)
        return DivisorClass(toric, exceptional)


def blowup_surface(fan, assignments):
    """Blow up one point on the boundary divisor of each assigned ray.

    assignments: pairs (ray index, weight); only weight 1 is supported, the
    weighted case produces singular surfaces which this intersection-form
    model does not cover.
    """
    centers = []
    for ray_idx, weight in assignments:
        if weight != 1:
            raise UnsupportedError(
                "weighted blowups (nu > 1) give singular surfaces and are unsupported"
            )
        if not 0 <= ray_idx < fan.size:
            raise ValidationError(f"ray index {ray_idx} out of range")
        centers.append(ray_idx)
    selfints = self_intersections(fan)
    r = fan.size
    q_rows = [[0] * r for _ in range(r)]
    for i in range(r):
        q_rows[i][i] = selfints[i]
        q_rows[i][(i + 1) % r] += 1
        q_rows[i][(i - 1) % r] += 1
    q = Matrix(q_rows)
    # the descended form must kill the character relations sum <m, u_i> D_i
    for m in ((1, 0), (0, 1)):
        rel = tuple(m[0] * u[0] + m[1] * u[1] for u in fan.rays)
        if any(x != 0 for x in q.matvec(rel)):
            raise ValidationError("intersection form does not kill toric relations")
    counts = [centers.count(j) for j in range(r)]
    boundary = tuple(a - c for a, c in zip(selfints, counts))
    return BlowupSurface(fan, tuple(centers), q, boundary)


# -- the kernel pairing --------------------------------------------------------

def _require_weight_one(data):
    if any(x != 1 for x in data.nu):
        raise UnsupportedError(
            "kernel pairing is computed only for weight-one data (nu_i = 1)"
        )


def _surface_for(data, fan=None):
    if fan is None:
        fan = complete_smooth_fan(set(data.w))
    ray_index = []
    for w in data.w:
        if tuple(w) not in fan.rays:
            raise ValidationError(f"fan does not contain the ray {w}")
        ray_index.append(fan.index_of(w))
    surface = blowup_surface(fan, [(j, 1) for j in ray_index])
    return surface, tuple(ray_index)


def k_to_dperp(data, a, fan=None):
    """The divisor class attached to a kernel element sum a_i e_i: pull back
    the unique toric class meeting the boundary divisor of each ray in the
    total weight of its centers, and subtract a_i exceptional curves.

    Returns (class, surface).  The class is orthogonal to every boundary
    component, which is verified.
    """
    _require_weight_one(data)
    a = tuple(a)
    if len(a) != data.n or any(not isinstance(x, int) for x in a):
        raise PreconditionError("kernel element must be an integer coefficient vector")
    if any(x != 0 for x in (
        sum(ai * wi[0] for ai, wi in zip(a, data.w)),
        sum(ai * wi[1] for ai, wi in zip(a, data.w)),
    )):
        raise PreconditionError("vector is not in the kernel of the skew form")
    surface, ray_index = _surface_for(data, fan)
    r = surface.fan.size
    c = [0] * r
    for ai, j in zip(a, ray_index):
        c[j] += ai
    x = solve_integer(surface.q, tuple(c))
    if x is None:
        raise ValidationError("no integral toric class matches the kernel element")
    cls = DivisorClass(tuple(x), tuple(-ai for ai in a))
    for j in range(r):
        if surface.intersect(cls, surface.boundary_component_class(j)) != 0:
            raise ValidationError("class is not orthogonal to the boundary")
    return cls, surface


@dataclass(frozen=True)
class KGram:
    """A fixed basis of the kernel of the skew form together with the Gram
    matrix of the induced symmetric pairing."""

    basis: tuple
    gram: Matrix


def _gram_for_vectors(ws, kernel_vectors, fan=None):
    data_like = Rank2Data(tuple(ws))
    surface, ray_index = _surface_for(data_like, fan)
    r = surface.fan.size
    cs = []
    xs = []
    for a in kernel_vectors:
        c = [0] * r
        for ai, j in zip(a, ray_index):
            c[j] += ai
        x = solve_integer(surface.q, tuple(c))
        if x is None:
            raise ValidationError("no integral toric class matches a kernel element")
        cs.append(tuple(c))
        xs.append(tuple(x))
    size = len(kernel_vectors)
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            toric = sum(p * q for p, q in zip(xs[i], cs[j]))
            row.append(toric - sum(p * q for p, q in zip(kernel_vectors[i], kernel_vectors[j])))
        rows.append(row)
    gram = Matrix(rows)
    if gram.transpose() != gram:
        raise ValidationError("kernel pairing failed to be symmetric")
    return gram


def symmetric_form(data, fan=None):
    """Gram matrix of the induced pairing on the kernel of the skew form,
    on the canonical kernel basis."""
    _require_weight_one(data)
    seed = build_seed(data)
    basis = kernel_basis(seed.eps)
    return KGram(basis, _gram_for_vectors(data.w, basis, fan))


def period_evaluation_vectors(data):
    """Splitting-dependent raw data for evaluating period points on kernel
    classes: for each index i, the kernel component of e_i written in the
    canonical kernel basis.

    The splitting of Z^n into the kernel and a complement is the one induced
    by the Smith reduction of the kernel inclusion (deterministic).  Only
    this lattice-level data is provided; summing a_i times the i-th vector
    recovers the coordinates of a kernel element a, which is the identity
    the analytic period evaluation rests on.
    """
    seed = build_seed(data)
    basis = kernel_basis(seed.eps)
    n = data.n
    r = len(basis)
    if r == 0:
        return tuple(() for _ in range(n))
    u, _, _ = smith_normal_form_cols([tuple(v) for v in basis], n)
    u_inv = u.inverse()
    # columns 0..r-1 of u span the kernel; express that block in the chosen
    # kernel basis
    transition = Matrix([[u[i, j] for j in range(r)] for i in range(n)])
    coeffs = []
    basis_mat = Matrix([list(v) for v in basis]).transpose()
    to_basis = (basis_mat.transpose() @ basis_mat).inverse() @ basis_mat.transpose()
    for i in range(n):
        e_i = tuple(int(a == i) for a in range(n))
        y = u_inv.matvec(e_i)
        kernel_part = transition.matvec(y[:r])
        coords = to_basis.matvec(kernel_part)
        coeffs.append(tuple(_require_int(c) for c in coords))
    return tuple(coeffs)


def _require_int(x):
    if isinstance(x, int):
        return x
    if x.denominator == 1:
        return int(x)
    raise ValidationError("kernel component has non-integral coordinates")


def invariance_check(data, path, fan=None):
    """Recompute the kernel pairing from the data mutated along the path
    (new plane vectors, fresh fan completion, same kernel basis carried
    through) and compare with the unmutated pairing."""
    _require_weight_one(data)
    seed = build_seed(data)
    base = symmetric_form(data, fan)
    mutated = mutate_along(seed, path)
    ws = []
    for i in range(data.n):
        col = mutated.basis.column(i)
        wi = (
            sum(c * w[0] for c, w in zip(col, data.w)),
            sum(c * w[1] for c, w in zip(col, data.w)),
        )
        if wi == (0, 0) or vector_gcd(wi) != 1:
            raise PreconditionError(
                f"mutated image of basis vector {i} is not primitive"
            )
        ws.append(wi)
    binv = mutated.basis.inverse()
    carried = [binv.matvec(kappa) for kappa in base.basis]
    gram = _gram_for_vectors(tuple(ws), carried)
    return gram == base.gram


# -- classification ------------------------------------------------------------

def characteristic_polynomial(m):
    """Coefficients [1, c_1, ..., c_n] of det(x I - M), exactly
    (Faddeev-LeVerrier over the rationals)."""
    n = m.rows
    coeffs = [Fraction(1)]
    mk = Matrix([[Fraction(x) for x in row] for row in m.data]) if n else m
    ident = Matrix.identity(n)
    current = mk
    for k in range(1, n + 1):
        trace = sum(current[i, i] for i in range(n))
        c = Fraction(-trace, k)
        coeffs.append(c)
        if k < n:
            current = mk @ (current + ident.scaled(c))
    return coeffs


def inertia(m):
    """(positive, negative, zero) eigenvalue counts of a symmetric integer
    matrix, via exact sign counts on the real-rooted characteristic
    polynomial (Descartes' rule is exact for real-rooted polynomials)."""
    if m.transpose() != m:
        raise ValidationError("inertia needs a symmetric matrix")
    n = m.rows
    if n == 0:
        return (0, 0, 0)
    coeffs = characteristic_polynomial(m)
    zero = 0
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
        zero += 1
    signs = [1 if c > 0 else -1 for c in coeffs if c != 0]
    # roots of the trailing-stripped polynomial are the nonzero eigenvalues;
    # it has no zero coefficients between sign blocks affecting the count
    changes = sum(1 for a, b in zip(signs, signs[1:]) if a != b)
    pos = changes
    neg = (n - zero) - pos
    return (pos, neg, zero)


def classify_definiteness(gram):
    """One of zero_rank, negative_definite, negative_semidefinite_degenerate,
    indefinite.  Any form with a positive direction is reported indefinite;
    forms arising from boundary-orthogonal classes never come out positive
    definite."""
    if gram.rows == 0:
        return "zero_rank"
    pos, neg, zero = inertia(gram)
    if pos > 0:
        return "indefinite"
    if zero > 0:
        return "negative_semidefinite_degenerate"
    return "negative_definite"


def fg_failure_flag(data):
    """Can the dual-basis conjecture possibly hold for this data?

    It requires the generic fibre of the dual-side family to be affine,
    which happens exactly when the kernel pairing is negative definite (or
    the kernel is trivial)."""
    form = symmetric_form(data)
    cls = classify_definiteness(form.gram)
    possible = cls in ("negative_definite", "zero_rank")
    return {
        "form_classification": cls,
        "inertia": list(inertia(form.gram)) if form.gram.rows else [0, 0, 0],
        "fg_conjecture_possible": possible,
        "rationale": (
            "the dual-basis conjecture needs an affine generic fibre, which "
            "holds exactly when the kernel pairing is negative definite"
        ),
    }


def non_fg_flag(data):
    """Detector for non-finitely-generated upper cluster algebras with
    principal (or general) coefficients: if every component of the boundary
    anticanonical cycle has self-intersection -2, the algebra is
    non-Noetherian.

    Weight nu_i = 3 style inputs are known cases in the literature but fall
    outside this checker (singular surfaces); they are reported as
    unsupported rather than classified."""
    if any(x != 1 for x in data.nu):
        return {
            "supported": False,
            "note": (
                "weighted data (some nu_i > 1) gives singular surfaces; such "
                "examples can be non-finitely generated but are outside this checker"
            ),
            "boundary_self_intersections": None,
            "all_minus_two": None,
            "non_noetherian_principal": None,
        }
    surface, _ = _surface_for(data)
    boundary = surface.boundary_self_intersections
    all_minus_two = all(b == -2 for b in boundary)
    return {
        "supported": True,
        "boundary_self_intersections": list(boundary),
        "all_minus_two": all_minus_two,
        "non_noetherian_principal": all_minus_two,
        "criterion": (
            "every boundary component of self-intersection -2 forces a "
            "non-Noetherian ring of global functions with principal coefficients"
        ),
    }
