import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toric_fsig.exceptions import (
    ContainmentError,
    DegeneratePairingError,
    InvalidInputError,
    PreconditionError,
)
from toric_fsig.lattice_core import (
    Lattice,
    determinant,
    dot,
    format_rational,
    hermite_basis,
    integer_kernel,
    lattice_index,
    min_positive_pairing,
    nullspace,
    parse_rational,
    primitivize,
    rank,
    solve_linear_system,
)

small_ints = st.integers(min_value=-6, max_value=6)
vectors = st.lists(small_ints, min_size=3, max_size=3).filter(any)
generator_lists = st.lists(vectors, min_size=1, max_size=4)


class TestHermiteBasis:
    @pytest.mark.parametrize(
        "generators, expected",
        [
            ([(1, 0), (1, 2)], ((1, 0), (0, 2))),
            ([(2, 4)], ((2, 4),)),
            ([(0, 3), (0, 5)], ((0, 1),)),
            ([(4, 6), (2, 4)], ((2, 0), (0, 2))),
        ],
    )
    def test_canonical_basis(self, generators, expected):
        assert hermite_basis(generators).basis == expected

    def test_index_two_sublattice_of_z3(self):
        lattice = hermite_basis([(1, 1, 0), (0, 1, 1), (1, 0, 1)])

        assert lattice.covolume() == 2
        assert lattice_index(lattice, Lattice.standard(3)) == 2

    def test_equal_lattices_have_equal_bases(self):
        assert hermite_basis([(1, 1), (0, 2)]) == hermite_basis([(1, -1), (2, 0), (3, 1)])

    def test_empty_generators_raise_input_error(self):
        with pytest.raises(InvalidInputError, match="must be nonempty"):
            hermite_basis([])

    def test_ragged_generators_raise_input_error(self):
        with pytest.raises(InvalidInputError, match="different lengths"):
            hermite_basis([(1, 0), (1, 2, 3)])

    @given(generator_lists)
    def test_hermite_basis_is_idempotent(self, generators):
        lattice = hermite_basis(generators)
        again = Lattice(ambient_rank=3, basis=lattice.basis)

        assert again.basis == lattice.basis

    @given(generator_lists)
    def test_basis_generates_every_input(self, generators):
        lattice = hermite_basis(generators)

        assert all(lattice.contains(g) for g in generators)
        assert lattice.rank == rank(generators)


class TestLatticeCoordinates:
    def test_coordinates_round_trip(self):
        lattice = hermite_basis([(1, 1), (0, 2)])

        coords = lattice.coordinates((3, 5))

        assert coords is not None
        assert lattice.point(coords) == (3, 5)

    def test_vector_outside_lattice_has_no_coordinates(self):
        assert hermite_basis([(1, 1), (0, 2)]).coordinates((1, 0)) is None

    def test_wrong_length_raises_input_error(self):
        with pytest.raises(InvalidInputError, match="has length"):
            Lattice.standard(2).coordinates((1, 2, 3))

    def test_covolume_requires_full_rank(self):
        with pytest.raises(PreconditionError, match="full-rank"):
            hermite_basis([(1, 0)]).covolume()


class TestLatticeIndex:
    def test_veronese_lattice_has_index_two(self):
        assert lattice_index(hermite_basis([(1, 1), (1, -1)]), Lattice.standard(2)) == 2

    def test_identity_has_index_one(self):
        assert lattice_index(Lattice.standard(2), Lattice.standard(2)) == 1

    def test_rank_drop_is_infinite(self):
        assert lattice_index(hermite_basis([(1, 0)]), Lattice.standard(2)) == math.inf

    def test_sublattice_not_contained_raises(self):
        with pytest.raises(ContainmentError, match="not in the ambient lattice"):
            lattice_index(Lattice.standard(2), hermite_basis([(2, 0), (0, 1)]))

    @given(st.lists(vectors, min_size=3, max_size=3).filter(lambda rows: rank(rows) == 3))
    def test_index_is_covolume_ratio(self, rows):
        lattice = hermite_basis(rows)

        assert lattice_index(lattice, Lattice.standard(3)) == lattice.covolume()
        assert lattice.covolume() == abs(determinant(lattice.basis))


class TestPrimitivize:
    @pytest.mark.parametrize(
        "vector, expected",
        [((2, 4), (1, 2)), ((0, -3), (0, -1)), ((6, 10, 15), (6, 10, 15))],
    )
    def test_divides_by_gcd(self, vector, expected):
        assert primitivize(vector) == expected

    def test_zero_vector_raises_input_error(self):
        with pytest.raises(InvalidInputError, match="zero vector"):
            primitivize((0, 0))

    @given(vectors, st.integers(min_value=1, max_value=9))
    def test_positive_multiples_share_primitive_vector(self, v, k):
        assert primitivize([k * a for a in v]) == primitivize(v)


class TestMinPositivePairing:
    @pytest.mark.parametrize(
        "basis, v, expected",
        [
            ([(1, 0), (0, 1)], (0, 1), 1),
            ([(1, 1), (0, 2)], (1, 0), 1),
            ([(3, 0), (0, 1)], (1, 0), 3),
        ],
    )
    def test_examples(self, basis, v, expected):
        assert min_positive_pairing(hermite_basis(basis), v) == expected

    def test_zero_pairing_raises(self):
        with pytest.raises(DegeneratePairingError, match="pairs to zero"):
            min_positive_pairing(hermite_basis([(1, 0)]), (0, 1))

    def test_zero_vector_raises(self):
        with pytest.raises(InvalidInputError):
            min_positive_pairing(Lattice.standard(2), (0, 0))

    @given(generator_lists, vectors, st.lists(small_ints, min_size=4, max_size=4))
    def test_divides_every_pairing(self, generators, v, coefficients):
        lattice = hermite_basis(generators)
        pairings = [dot(row, v) for row in lattice.basis]
        if not any(pairings):
            return
        u = lattice.point(coefficients[: lattice.rank])

        assert dot(u, v) % min_positive_pairing(lattice, v) == 0


class TestRationals:
    @pytest.mark.parametrize(
        "value, expected",
        [("1/2", Fraction(1, 2)), ("3", Fraction(3)), (" -2/4 ", Fraction(-1, 2)), (5, Fraction(5))],
    )
    def test_parses_exact_values(self, value, expected):
        assert parse_rational(value) == expected

    @pytest.mark.parametrize("value", [0.5, "0.5", "1e3", True, None, "1/0"])
    def test_rejects_inexact_or_malformed_values(self, value):
        with pytest.raises(InvalidInputError):
            parse_rational(value)

    def test_format_is_num_over_den(self):
        assert format_rational(Fraction(-3, 6)) == "-1/2"
        assert format_rational(2) == "2/1"


class TestLinearAlgebra:
    def test_determinant(self):
        assert determinant([(0, 1), (2, -1)]) == -2

    def test_inconsistent_system_has_no_solution(self):
        rows = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, -2)]

        assert solve_linear_system(rows, [-1, -1, -1, -1]) is None

    def test_consistent_system(self):
        assert solve_linear_system([(0, 1), (2, -1)], [-1, -1]) == (Fraction(-1), Fraction(-1))

    def test_nullspace_is_orthogonal(self):
        rows = [(1, 1, 0)]

        basis = nullspace(rows, 3)

        assert len(basis) == 2
        assert all(dot(rows[0], b) == 0 for b in basis)

    def test_integer_kernel_is_saturated(self):
        kernel = integer_kernel([(2, 2, 0)], 3)

        assert kernel.rank == 2
        assert kernel.contains((1, -1, 0))
        assert kernel.contains((0, 0, 1))
