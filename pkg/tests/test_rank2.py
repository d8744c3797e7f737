import random

import pytest

from cluster_geom.errors import PreconditionError, UnsupportedError, ValidationError
from cluster_geom.intmat import Matrix, kernel_basis
from cluster_geom.rank2 import (
    Fan2D,
    Rank2Data,
    blowup_surface,
    build_seed,
    classify_definiteness,
    complete_smooth_fan,
    cubic_data,
    fg_failure_flag,
    inertia,
    invariance_check,
    k_to_dperp,
    nine_ray_data,
    non_fg_flag,
    seed_to_rank2,
    self_intersections,
    weighted_triangle_data,
    symmetric_form,
    wedge,
)
from cluster_geom.seeds import epsilon_matrix, seed_from_epsilon


# ---------------------------------------------------------------------------
# Independent oracle for the nine-ray and cubic examples: on the blowup of
# the projective plane the Picard lattice is Z H + sum Z E_i with H^2 = 1,
# E_i^2 = -1.  A kernel vector a (sum a_i w_i = 0) has equal center sums
# c_1 = c_2 = c_3 on the three lines, the matching class is c_1 H - sum a_i
# E_i, and pairings follow from bilinearity.
# ---------------------------------------------------------------------------

def p2_oracle_gram(data, kernel_vectors):
    groups = {}
    for idx, w in enumerate(data.w):
        groups.setdefault(tuple(w), []).append(idx)
    assert set(groups) == {(1, 0), (0, 1), (-1, -1)}

    def line_multiple(a):
        sums = {w: sum(a[i] for i in idxs) for w, idxs in groups.items()}
        vals = set(sums.values())
        assert len(vals) == 1
        return vals.pop()

    size = len(kernel_vectors)
    out = []
    for i in range(size):
        row = []
        for j in range(size):
            ci = line_multiple(kernel_vectors[i])
            cj = line_multiple(kernel_vectors[j])
            dot = sum(x * y for x, y in zip(kernel_vectors[i], kernel_vectors[j]))
            row.append(ci * cj - dot)
        out.append(row)
    return Matrix(out)


P2_RAYS = ((1, 0), (0, 1), (-1, -1))


class TestRank2Data:
    def test_validates_primitivity(self):
        with pytest.raises(ValidationError):
            Rank2Data(((2, 0), (0, 1), (-1, -1)))

    def test_validates_generation(self):
        with pytest.raises(ValidationError):
            Rank2Data(((1, 0), (1, 0), (-1, 0)))

    def test_weights_positive(self):
        with pytest.raises(ValidationError):
            Rank2Data(((1, 0), (0, 1)), (1, 0))


class TestBuildSeed:
    def test_weighted_triangle_epsilon(self):
        seed = build_seed(weighted_triangle_data())
        assert epsilon_matrix(seed) == Matrix(
            [[0, 3, -3], [-3, 0, 3], [3, -3, 0]]
        )
        assert seed.fixed.d == (1, 1, 1)

    def test_nine_ray_epsilon(self):
        data = nine_ray_data()
        seed = build_seed(data)
        eps = epsilon_matrix(seed)
        for i in range(9):
            for j in range(9):
                assert eps[i, j] == wedge(data.w[i], data.w[j])

    def test_two_vector_trivial_kernel(self):
        seed = build_seed(Rank2Data(((1, 0), (0, 1))))
        assert epsilon_matrix(seed) == Matrix([[0, 1], [-1, 0]])
        assert kernel_basis(seed.eps) == ()


class TestSeedToRank2:
    def test_markov_not_unimodular(self):
        seed = seed_from_epsilon([[0, 2, -2], [-2, 0, 2], [2, -2, 0]])
        with pytest.raises(PreconditionError, match="unimodular"):
            seed_to_rank2(seed)

    def test_cubic_roundtrip(self):
        data = cubic_data()
        recovered = seed_to_rank2(build_seed(data))
        # recovered w's agree with the originals up to one GL_2(Z) change
        m = [[None] * 2 for _ in range(2)]
        # solve G w_0 = w'_0, G w_1 = w'_1 using that (w_0, w_1) is a basis
        w0, w1 = data.w[0], data.w[1]
        v0, v1 = recovered.w[0], recovered.w[1]
        base = Matrix([[w0[0], w1[0]], [w0[1], w1[1]]])
        img = Matrix([[v0[0], v1[0]], [v0[1], v1[1]]])
        g = img @ base.inverse()
        assert g.is_integral()
        assert abs(g.det()) == 1
        for w, v in zip(data.w, recovered.w):
            assert g.matvec(w) == v

    def test_rank_zero_rejected(self):
        seed = seed_from_epsilon([[0, 0], [0, 0]])
        with pytest.raises(PreconditionError, match="rank"):
            seed_to_rank2(seed)

    def test_d_not_one_rejected(self):
        seed = seed_from_epsilon([[0, 2], [-1, 0]], d=(1, 2))
        with pytest.raises(PreconditionError, match="d_i"):
            seed_to_rank2(seed)


class TestFans:
    def test_p2_fan_unchanged(self):
        fan = complete_smooth_fan(P2_RAYS)
        assert set(fan.rays) == set(P2_RAYS)

    def test_completion_postconditions(self):
        fan = complete_smooth_fan(((1, 0), (1, 2)))
        assert (1, 0) in fan.rays and (1, 2) in fan.rays
        # Fan2D construction already verifies smoothness/completeness

    def test_single_ray(self):
        fan = complete_smooth_fan(((1, 0),))
        assert (1, 0) in fan.rays

    def test_rejects_non_primitive(self):
        with pytest.raises(ValidationError):
            complete_smooth_fan(((2, 0),))

    def test_random_completions(self):
        rng = random.Random(21)
        from math import gcd
        for _ in range(50):
            rays = []
            for _ in range(rng.randint(1, 6)):
                while True:
                    v = (rng.randint(-5, 5), rng.randint(-5, 5))
                    if v != (0, 0):
                        g = gcd(abs(v[0]), abs(v[1]))
                        rays.append((v[0] // g, v[1] // g))
                        break
            fan = complete_smooth_fan(rays)
            for r in rays:
                assert r in fan.rays


class TestSelfIntersections:
    def test_p2(self):
        assert self_intersections(Fan2D(P2_RAYS)) == (1, 1, 1)

    def test_hirzebruch(self):
        for a in range(5):
            fan = Fan2D(((1, 0), (0, 1), (-1, a), (0, -1)))
            ints = self_intersections(fan)
            assert ints[fan.index_of((0, 1))] == -a

    def test_p1xp1(self):
        fan = Fan2D(((1, 0), (0, 1), (-1, 0), (0, -1)))
        assert self_intersections(fan) == (0, 0, 0, 0)


class TestBlowupSurface:
    def test_one_center_per_line(self):
        fan = Fan2D(P2_RAYS)
        surf = blowup_surface(fan, [(0, 1), (1, 1), (2, 1)])
        assert surf.boundary_self_intersections == (0, 0, 0)
        assert surf.picard_rank == 4

    def test_three_centers_per_line(self):
        fan = Fan2D(P2_RAYS)
        surf = blowup_surface(fan, [(j, 1) for j in range(3) for _ in range(3)])
        assert surf.boundary_self_intersections == (-2, -2, -2)

    def test_no_centers(self):
        fan = Fan2D(P2_RAYS)
        surf = blowup_surface(fan, [])
        assert surf.boundary_self_intersections == (1, 1, 1)
        assert surf.picard_rank == 1

    def test_weighted_rejected(self):
        fan = Fan2D(P2_RAYS)
        with pytest.raises(UnsupportedError):
            blowup_surface(fan, [(0, 3)])


class TestKToDPerp:
    def test_nine_ray_difference_vector(self):
        data = nine_ray_data()
        a = (1, -1, 0, 0, 0, 0, 0, 0, 0)
        cls, surface = k_to_dperp(data, a)
        # C = 0: the class is E_1 - E_0 with square -2
        assert all(x == 0 for x in surface.q.matvec(cls.toric))
        assert surface.intersect(cls, cls) == -2

    def test_cubic_anticanonical_vector(self):
        data = cubic_data()
        cls, surface = k_to_dperp(data, (1, 1, 1))
        # C is a line class: C^2 = 1, and the full class has square -2
        toric_sq = sum(
            x * y for x, y in zip(surface.q.matvec(cls.toric), cls.toric)
        )
        assert toric_sq == 1
        assert surface.intersect(cls, cls) == -2

    def test_zero_class(self):
        data = cubic_data()
        cls, surface = k_to_dperp(data, (0, 0, 0))
        assert surface.intersect(cls, cls) == 0

    def test_not_in_kernel(self):
        with pytest.raises(PreconditionError):
            k_to_dperp(cubic_data(), (1, 0, 0))

    def test_weighted_rejected(self):
        with pytest.raises(UnsupportedError):
            k_to_dperp(weighted_triangle_data(), (1, 1, 1))

    def test_gram_stable_under_relation_shift(self):
        # shifting the toric solution by a character relation does not move
        # intersection numbers
        data = nine_ray_data()
        a = (1, 1, 1, 1, 1, 1, 1, 1, 1)
        cls, surface = k_to_dperp(data, a)
        rel = tuple(u[0] for u in surface.fan.rays)  # <(1,0), u_i>
        shifted = tuple(x + r for x, r in zip(cls.toric, rel))
        from cluster_geom.rank2 import DivisorClass
        cls2 = DivisorClass(shifted, cls.exceptional)
        assert surface.intersect(cls2, cls2) == surface.intersect(cls, cls)


class TestSymmetricForm:
    def test_cubic_gram(self):
        form = symmetric_form(cubic_data())
        assert form.basis == ((1, 1, 1),)
        assert form.gram == Matrix([[-2]])

    def test_nine_ray_values(self):
        data = nine_ray_data()
        form = symmetric_form(data)
        assert len(form.basis) == 7
        # oracle cross-check on the canonical kernel basis
        assert form.gram == p2_oracle_gram(data, form.basis)

    def test_nine_ray_specific_vectors(self):
        from cluster_geom.rank2 import _gram_for_vectors
        data = nine_ray_data()
        vecs = [(1, -1, 0, 0, 0, 0, 0, 0, 0), (1, 1, 1, 1, 1, 1, 1, 1, 1)]
        gram = _gram_for_vectors(data.w, vecs)
        assert gram[0, 0] == -2
        assert gram[1, 1] == 0
        assert gram == p2_oracle_gram(data, vecs)

    def test_trivial_kernel(self):
        form = symmetric_form(Rank2Data(((1, 0), (0, 1))))
        assert form.basis == ()
        assert form.gram.rows == 0

    def test_completion_independent(self):
        data = nine_ray_data()
        default = symmetric_form(data)
        other = symmetric_form(
            data, fan=Fan2D(((1, 0), (1, 1), (0, 1), (-1, -1)))
        )
        assert default.gram == other.gram

    def test_weighted_rejected(self):
        with pytest.raises(UnsupportedError):
            symmetric_form(weighted_triangle_data())


class TestInvariance:
    def test_empty_path(self):
        assert invariance_check(cubic_data(), ())

    def test_nine_ray_single_mutations(self):
        data = nine_ray_data()
        for k in range(9):
            assert invariance_check(data, (k,))

    def test_cubic_depth_two(self):
        data = cubic_data()
        for a in range(3):
            for b in range(3):
                assert invariance_check(data, (a, b))

    def test_random_small_instances(self):
        rng = random.Random(31)
        pool = [(1, 0), (0, 1), (-1, -1), (1, 1), (-1, 0), (0, -1), (1, 2)]
        done = 0
        while done < 12:
            ws = tuple(rng.choice(pool) for _ in range(rng.randint(3, 5)))
            try:
                data = Rank2Data(ws)
            except ValidationError:
                continue
            path = tuple(rng.randrange(len(ws)) for _ in range(rng.randint(1, 3)))
            assert invariance_check(data, path)
            done += 1


class TestPeriodEvaluationData:
    def test_kernel_elements_recover_their_coordinates(self):
        from cluster_geom.rank2 import period_evaluation_vectors
        data = nine_ray_data()
        vectors = period_evaluation_vectors(data)
        form = symmetric_form(data)
        for idx, kappa in enumerate(form.basis):
            total = [0] * len(form.basis)
            for a_i, comp in zip(kappa, vectors):
                total = [t + a_i * c for t, c in zip(total, comp)]
            expected = [int(i == idx) for i in range(len(form.basis))]
            assert total == expected

    def test_trivial_kernel(self):
        from cluster_geom.rank2 import period_evaluation_vectors
        assert period_evaluation_vectors(Rank2Data(((1, 0), (0, 1)))) == ((), ())


class TestClassification:
    def test_inertia_oracle(self):
        # independent oracle: exact symmetric Gaussian reduction over Q
        from fractions import Fraction

        def inertia_oracle(m):
            n = m.rows
            a = [[Fraction(x) for x in row] for row in m.data]
            pos = neg = zero = 0
            idx = list(range(n))
            while idx:
                piv = next((i for i in idx if a[i][i] != 0), None)
                if piv is None:
                    off = next(
                        ((i, j) for i in idx for j in idx if a[i][j] != 0), None
                    )
                    if off is None:
                        zero += len(idx)
                        break
                    i, j = off
                    for t in idx:
                        a[i][t] += a[j][t]
                    for t in idx:
                        a[t][i] += a[t][j]
                    piv = i
                p = a[piv][piv]
                if p > 0:
                    pos += 1
                else:
                    neg += 1
                idx.remove(piv)
                # Schur complement on the remaining index set; the pivot row
                # must stay intact until every remaining row is updated
                for i in idx:
                    f = a[i][piv] / p
                    for j in idx:
                        a[i][j] -= f * a[piv][j]
                for i in idx:
                    a[i][piv] = a[piv][i] = 0
            return (pos, neg, zero)

        rng = random.Random(41)
        for _ in range(120):
            n = rng.randint(1, 5)
            sym = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    sym[i][j] = sym[j][i] = rng.randint(-4, 4)
            m = Matrix(sym)
            assert inertia(m) == inertia_oracle(m)

    def test_classifications(self):
        assert classify_definiteness(Matrix([[-2]])) == "negative_definite"
        assert classify_definiteness(Matrix([])) == "zero_rank"
        assert classify_definiteness(Matrix([[0]])) == "negative_semidefinite_degenerate"
        assert classify_definiteness(Matrix([[1]])) == "indefinite"
        assert classify_definiteness(Matrix([[-1, 0], [0, 1]])) == "indefinite"

    def test_nine_ray_degenerate(self):
        form = symmetric_form(nine_ray_data())
        assert classify_definiteness(form.gram) == "negative_semidefinite_degenerate"

    def test_cubic_negative_definite(self):
        form = symmetric_form(cubic_data())
        assert classify_definiteness(form.gram) == "negative_definite"

    def test_indefinite_twelve_rays(self):
        data = Rank2Data(((1, 0),) * 4 + ((0, 1),) * 4 + ((-1, -1),) * 4)
        form = symmetric_form(data)
        assert classify_definiteness(form.gram) == "indefinite"


class TestFlags:
    def test_fg_cubic(self):
        rep = fg_failure_flag(cubic_data())
        assert rep["fg_conjecture_possible"] is True
        assert rep["form_classification"] == "negative_definite"

    def test_fg_nine_ray(self):
        rep = fg_failure_flag(nine_ray_data())
        assert rep["fg_conjecture_possible"] is False

    def test_fg_trivial_kernel(self):
        rep = fg_failure_flag(Rank2Data(((1, 0), (0, 1))))
        assert rep["fg_conjecture_possible"] is True
        assert rep["form_classification"] == "zero_rank"

    def test_non_fg_nine_ray(self):
        rep = non_fg_flag(nine_ray_data())
        assert rep["all_minus_two"] is True
        assert rep["non_noetherian_principal"] is True

    def test_non_fg_cubic(self):
        rep = non_fg_flag(cubic_data())
        assert rep["boundary_self_intersections"] == [0, 0, 0]
        assert rep["non_noetherian_principal"] is False

    def test_non_fg_mixed_centers(self):
        data = Rank2Data(
            ((1, 0), (1, 0), (0, 1), (0, 1), (-1, -1))
        )
        rep = non_fg_flag(data)
        assert rep["boundary_self_intersections"] == [-1, -1, 0]
        assert rep["non_noetherian_principal"] is False

    def test_non_fg_weighted_reported_unsupported(self):
        rep = non_fg_flag(weighted_triangle_data())
        assert rep["supported"] is False
        assert rep["non_noetherian_principal"] is None
