from fractions import Fraction

import pytest

from tests.conftest import VERONESE_2, orthant
from toric_fsig.cone_geometry import Cone, hull_to_halfspaces
from toric_fsig.exceptions import (
    EffectivityError,
    ExponentRangeError,
    InvalidConeError,
    InvalidInputError,
    NotFullDimensionalError,
    PreconditionError,
    SinghPresentationError,
)
from toric_fsig.fsignature import (
    MonomialIdeal,
    ToricRing,
    TorusDivisor,
    TripleProblem,
    build_p_polytope,
    check_singh_presentation,
    f_signature,
    f_signature_pair,
    f_signature_triple,
    newton_polyhedron,
    product_ring,
    q_gorenstein_vector,
    reflection_polytope,
    singh_count,
    singh_ring,
    triple_polytope,
)
from toric_fsig.lattice_core import Lattice, hermite_basis
from toric_fsig.polytope_engine import vertices, volume

half = Fraction(1, 2)
CONIFOLD = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -1)]
# four rays that do not lie on a common affine hyperplane
NON_GORENSTEIN = [(1, 0, 0), (0, 1, 0), (1, 0, 1), (0, 2, 1)]


def triple(ring, generators, t, divisor=None):
    return TripleProblem(
        ring=ring,
        divisor=divisor or TorusDivisor.zero(len(ring.sigma.rays)),
        ideal=MonomialIdeal(generators=generators),
        t=t,
    )


class TestToricRing:
    def test_rejects_a_cone_with_a_line(self):
        with pytest.raises(InvalidConeError, match="line"):
            ToricRing.of([(1, 0), (-1, 0), (0, 1)])

    def test_rejects_a_lower_rank_sublattice(self):
        with pytest.raises(InvalidInputError, match="full-rank"):
            ToricRing.of(orthant(2), sublattice=hermite_basis([(1, 1)]))

    def test_rejects_a_lower_rank_n(self):
        with pytest.raises(InvalidInputError, match="full-rank"):
            ToricRing(lattice=hermite_basis([(1, 0)]), sigma=Cone.from_generators(orthant(2)))

    def test_reduced_cone_uses_the_basis_of_n(self):
        ring = ToricRing.of([(2, 1), (0, 1)], lattice=hermite_basis([(2, 0), (0, 1)]))

        assert ring.reduced_cone().rays == ((1, 1), (0, 1))

    def test_reduced_cone_for_the_standard_lattice(self, quadric):
        assert quadric.reduced_cone() == quadric.sigma


class TestFSignature:
    def test_quadric(self, quadric):
        result = f_signature(quadric)

        assert result.value == half
        assert result.torus_rank == 0
        assert vertices(result.polytope) == [(0, 0), (half, 0), (half, 1), (1, 1)]

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_polynomial_ring(self, n):
        assert f_signature(ToricRing.of(orthant(n))).value == 1

    @pytest.mark.parametrize("k", [2, 3, 4, 5, 7])
    def test_cyclic_quotient(self, k):
        assert f_signature(ToricRing.of([(1, 0), (1, k)])).value == Fraction(1, k)

    def test_conifold(self):
        assert f_signature(ToricRing.of(CONIFOLD)).value == Fraction(2, 3)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_veronese(self, n):
        generators = [(n - i, i) for i in range(n + 1)]
        ring = ToricRing.of(orthant(2), sublattice=hermite_basis(generators))

        assert f_signature(ring).value == Fraction(1, n)

    def test_veronese_fixture(self, veronese):
        assert f_signature(veronese).value == half

    def test_changing_n_only_relabels_the_cone(self):
        ring = ToricRing.of([(2, 1), (0, 1)], lattice=hermite_basis([(2, 0), (0, 1)]))

        assert f_signature(ring).value == 1

    def test_torus_factor_is_split_off(self):
        result = f_signature(ToricRing.of([(0, 1, 0), (2, -1, 0)]))

        assert result.value == half
        assert result.torus_rank == 1

    def test_ray_in_the_plane(self):
        result = f_signature(ToricRing.of([(1, 0)]))

        assert result.value == 1
        assert result.torus_rank == 1

    def test_torus(self):
        ring = ToricRing(lattice=Lattice.standard(1), sigma=Cone(ambient_rank=1, rays=()))

        result = f_signature(ring)

        assert result.value == 1
        assert result.torus_rank == 1

    def test_sublattice_with_torus_factors_is_rejected(self):
        ring = ToricRing.of([(1, 0)], sublattice=hermite_basis([(2, 0), (0, 1)]))

        with pytest.raises(PreconditionError, match="torus"):
            f_signature(ring)

    def test_p_polytope_needs_a_full_dimensional_cone(self):
        with pytest.raises(NotFullDimensionalError):
            build_p_polytope(ToricRing.of([(1, 0)]))


class TestQGorensteinVector:
    def test_gorenstein_quadric(self, quadric):
        assert q_gorenstein_vector(quadric) == (-1, -1)
        assert f_signature(quadric).qgorenstein_vector == (-1, -1)

    def test_with_a_divisor(self, quadric):
        divisor = TorusDivisor.of(["1/2", 0])

        assert q_gorenstein_vector(quadric, divisor) == (Fraction(-3, 4), -half)

    def test_conifold(self):
        assert q_gorenstein_vector(ToricRing.of(CONIFOLD)) == (-1, -1, -1)

    def test_inconsistent_system(self):
        assert q_gorenstein_vector(ToricRing.of(NON_GORENSTEIN)) is None


class TestPairs:
    def test_half_boundary_divisor(self, quadric):
        assert f_signature_pair(quadric, TorusDivisor.of(["1/2", 0])).value == Fraction(1, 4)

    @pytest.mark.parametrize("a", [1, "3/2", 2])
    def test_coefficient_at_least_one_gives_zero(self, quadric, a):
        result = f_signature_pair(quadric, TorusDivisor.of([a, 0]))

        assert result.value == 0
        assert vertices(result.polytope) == []

    def test_zero_divisor_matches_the_ring(self, quadric):
        assert f_signature_pair(quadric, TorusDivisor.zero(2)).value == f_signature(quadric).value

    def test_negative_coefficient(self):
        with pytest.raises(EffectivityError, match="negative"):
            TorusDivisor.of([Fraction(-1, 2), 0])

    def test_float_coefficient(self):
        with pytest.raises(InvalidInputError, match="rational"):
            TorusDivisor.of([0.5, 0])

    def test_wrong_length(self, quadric):
        with pytest.raises(InvalidInputError, match="coefficients"):
            f_signature_pair(quadric, TorusDivisor.zero(3))

    def test_sublattice_is_rejected(self, veronese):
        with pytest.raises(PreconditionError, match="character lattice"):
            f_signature_pair(veronese, TorusDivisor.zero(2))


class TestNewtonPolyhedron:
    def test_redundant_generators_are_pruned(self, plane):
        newton = newton_polyhedron(
            MonomialIdeal(generators=((3, 0), (0, 2), (3, 2), (4, 0))), plane
        )

        assert newton.vertices == ((0, 2), (3, 0))
        assert set(newton.rays) == {(1, 0), (0, 1)}

    def test_membership(self, plane):
        halfspaces = hull_to_halfspaces(
            newton_polyhedron(MonomialIdeal(generators=((3, 0), (0, 2))), plane)
        )

        assert halfspaces.contains((2, 1))
        assert not halfspaces.contains((1, 1))

    def test_generator_outside_the_semigroup(self, plane):
        with pytest.raises(InvalidInputError, match="dual cone"):
            newton_polyhedron(MonomialIdeal(generators=((-1, 0),)), plane)


class TestTriples:
    def test_xy_to_the_half(self, plane):
        problem = triple(plane, ((1, 1),), half)

        result = f_signature_triple(problem)

        assert result.value == Fraction(1, 4)
        assert vertices(result.polytope) == [(0, 0), (0, half), (half, 0), (half, half)]
        assert result.qgorenstein_vector == (-1, -1)

    def test_reflection_polytope(self, plane):
        reflected = reflection_polytope(triple(plane, ((1, 1),), half))

        assert vertices(reflected) == [(half, half), (half, 1), (1, half), (1, 1)]
        assert volume(reflected) == Fraction(1, 4)

    def test_zero_exponent_reduces_to_the_pair(self, quadric):
        divisor = TorusDivisor.of(["1/2", 0])

        result = f_signature_triple(triple(quadric, ((1, 1),), 0, divisor))

        assert result.value == f_signature_pair(quadric, divisor).value

    def test_unit_ideal_reduces_to_the_pair(self, plane):
        problem = triple(plane, MonomialIdeal.unit(2).generators, 3)

        assert f_signature_triple(problem).value == 1

    def test_threshold_exponent_gives_zero(self, plane):
        assert f_signature_triple(triple(plane, ((1, 0),), 1)).value == 0

    def test_quadric_reflection_agrees(self, quadric):
        result = f_signature_triple(triple(quadric, ((1, 1),), half))

        assert 0 < result.value < half

    def test_non_gorenstein_skips_the_reflection(self):
        ring = ToricRing.of(NON_GORENSTEIN)

        result = f_signature_triple(triple(ring, ((1, 1, 0),), "1/4"))

        assert result.qgorenstein_vector is None
        assert 0 < result.value < f_signature(ring).value

    def test_reflection_check_can_be_disabled(self, plane):
        problem = triple(plane, ((1, 1),), half)

        assert f_signature_triple(problem, reflection_check=False).value == Fraction(1, 4)

    def test_negative_exponent(self, plane):
        with pytest.raises(ExponentRangeError):
            triple(plane, ((1, 1),), "-1/2")

    def test_float_exponent(self, plane):
        with pytest.raises(InvalidInputError, match="rational"):
            triple(plane, ((1, 1),), 0.5)

    def test_generator_outside_l(self, veronese):
        with pytest.raises(InvalidInputError, match="not in L"):
            triple(veronese, ((1, 0),), half)

    def test_sublattice_is_rejected(self, veronese):
        with pytest.raises(PreconditionError):
            triple_polytope(triple(veronese, ((1, 1),), half))


class TestSingh:
    def test_full_without_property_star(self):
        presentation = check_singh_presentation([(2, 0), (0, 1)], 2)

        assert presentation.full
        assert not presentation.property_star

    def test_not_full(self):
        presentation = check_singh_presentation([(1, 0), (1, 1), (1, 2)], 2)

        assert not presentation.full
        assert presentation.property_star

    def test_veronese(self):
        presentation = check_singh_presentation(VERONESE_2, 2)

        assert presentation.full and presentation.property_star
        assert singh_count(VERONESE_2, 2, 2) == 2
        assert singh_count(VERONESE_2, 2, 4) == 8

    def test_polynomial_ring(self):
        assert singh_count(orthant(2), 2, 4) == 16

    def test_ring_matches_the_presentation(self):
        assert f_signature(singh_ring(VERONESE_2, 2)).value == half

    def test_count_requires_a_good_presentation(self):
        with pytest.raises(SinghPresentationError, match="not full"):
            singh_count([(1, 0), (1, 1), (1, 2)], 2, 2)

    def test_negative_generator(self):
        with pytest.raises(InvalidInputError, match="negative"):
            check_singh_presentation([(1, -1), (0, 1)], 2)

    @pytest.mark.parametrize(
        "generators, rank, expected",
        [
            ([(1, 0)], 2, (True, False)),
            ([(2, 0)], 2, (True, False)),
            ([(1, 1)], 2, (True, True)),
            ([(2, 2, 0), (3, 3, 0)], 3, (False, False)),
            ([(1, 0, 0), (1, 1, 0)], 3, (False, False)),
            ([(1, 0, 0), (0, 1, 0), (1, 1, 0)], 3, (True, False)),
        ],
    )
    def test_lower_rank_generators_are_judged_in_their_span(self, generators, rank, expected):
        presentation = check_singh_presentation(generators, rank)

        assert (presentation.full, presentation.property_star) == expected

    def test_count_requires_a_full_rank_lattice(self):
        with pytest.raises(PreconditionError, match="full-rank"):
            singh_count([(1, 1)], 2, 4)


class TestProducts:
    def test_product_of_rings(self, quadric, plane):
        ring = product_ring(quadric, plane)

        assert ring.rank == 4
        assert f_signature(ring).value == half

    def test_product_with_a_torus_factor(self, quadric):
        torus = ToricRing(lattice=Lattice.standard(1), sigma=Cone(ambient_rank=1, rays=()))

        result = f_signature(product_ring(quadric, torus))

        assert result.value == half
        assert result.torus_rank == 1

    def test_product_with_a_sublattice(self, veronese, quadric):
        ring = product_ring(veronese, quadric)

        assert ring.sublattice is not None
        assert f_signature(ring).value == Fraction(1, 4)


class TestWorkedSequences:
    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_veronese_in_n_variables(self, n):
        generators = [tuple(n * int(j == 0) for j in range(n))] + [
            tuple(int(j == i) - int(j == 0) for j in range(n)) for i in range(1, n)
        ]
        ring = ToricRing.of(orthant(n), sublattice=hermite_basis(generators))

        assert f_signature(ring).value == Fraction(1, n)

    def test_pair_values_decrease_with_the_coefficient(self, quadric):
        values = [
            f_signature_pair(quadric, TorusDivisor.of([a, 0])).value
            for a in [0, "1/4", "1/2", "3/4", 1]
        ]

        assert values == [half, Fraction(3, 8), Fraction(1, 4), Fraction(1, 8), 0]

    def test_triple_values_decrease_with_the_exponent(self, plane):
        values = [f_signature_triple(triple(plane, ((1, 1),), t)).value for t in [0, "1/4", "1/2"]]

        assert values == [1, Fraction(9, 16), Fraction(1, 4)]


class TestUnimodularInvariance:
    # rays move by (x, y) -> (x + 2y, x + 3y), monomials by its inverse transpose
    moved_rays = [(2, 3), (0, -1)]
    moved_monomial = (2, -1)

    def test_ring(self, quadric):
        assert f_signature(ToricRing.of(self.moved_rays)).value == f_signature(quadric).value

    def test_pair(self, quadric):
        divisor = TorusDivisor.of(["1/2", 0])

        moved = f_signature_pair(ToricRing.of(self.moved_rays), divisor).value

        assert moved == f_signature_pair(quadric, divisor).value == Fraction(1, 4)

    def test_triple(self, quadric):
        moved = f_signature_triple(triple(ToricRing.of(self.moved_rays), (self.moved_monomial,), half))

        original = f_signature_triple(triple(quadric, ((1, 1),), half))

        assert moved.value == original.value == Fraction(1, 8)
