"""
Exact integer and rational linear algebra.

Vectors are plain tuples of ``int`` or ``Fraction``; lattices are stored as
row-style Hermite normal forms so that two equal lattices compare equal.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Sequence
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, ConfigDict, model_validator

from toric_fsig.exceptions import (
    ContainmentError,
    DegeneratePairingError,
    InvalidInputError,
    PreconditionError,
)

IntVector = tuple[int, ...]
RatVector = tuple[Fraction, ...]
Number = int | Fraction

_RATIONAL = re.compile(r"^\s*-?\d+(\s*/\s*\d+)?\s*$")


def dot(u: Sequence[Number], v: Sequence[Number]) -> Number:
    return sum((a * b for a, b in zip(u, v, strict=True)), 0)


def check_lengths(vectors: Sequence[Sequence[Number]], what: str = "vectors") -> int:
    """
    Validate a nonempty list of equal-length vectors
    Args:
        vectors: vectors to check
        what: name used in error messages

    Returns:
        The common length

    Raises:
        InvalidInputError: if the list is empty or the lengths differ
    """
    if not vectors:
        raise InvalidInputError(f"{what} must be nonempty")
    n = len(vectors[0])
    if any(len(v) != n for v in vectors):
        raise InvalidInputError(f"{what} have different lengths")
    return n


def parse_rational(value: object) -> Fraction:
    """
    Read an exact rational
    Args:
        value: an int, a Fraction, or a string "n" or "num/den"

    Returns:
        The value as a Fraction

    Raises:
        InvalidInputError: for floats, booleans, decimal strings or a zero denominator
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError as e:
            raise InvalidInputError(f"zero denominator in {value!r}") from e
    raise InvalidInputError(f"expected a rational number such as \"1/2\", got {value!r}")


def format_rational(value: Fraction | int) -> str:
    """"num/den" rendering used at every file boundary."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def primitivize(v: Sequence[int]) -> IntVector:
    """
    Shortest integer vector on the ray through v
    Args:
        v: nonzero integer vector

    Returns:
        v divided by the gcd of its coordinates

    Raises:
        InvalidInputError: if v is the zero vector
    """
    g = math.gcd(*v)
    if g == 0:
        raise InvalidInputError("cannot primitivize the zero vector")
    return tuple(a // g for a in v)


def scale_to_integer(v: Sequence[Number]) -> IntVector:
    """Primitive integer vector on the ray through a nonzero rational vector."""
    denominator = math.lcm(*(Fraction(a).denominator for a in v))
    return primitivize([int(Fraction(a) * denominator) for a in v])


def _hermite_rows(generators: Iterable[Sequence[int]], n: int) -> tuple[IntVector, ...]:
    work = [list(g) for g in generators if any(g)]
    basis: list[list[int]] = []
    for col in range(n):
        candidates = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        if not candidates:
            continue
        while len(candidates) > 1:
            candidates.sort(key=lambda r: abs(r[col]))
            pivot = candidates[0]
            reduced = [pivot]
            for row in candidates[1:]:
                f = row[col] // pivot[col]
                row = [a - f * b for a, b in zip(row, pivot)]
                if row[col] != 0:
                    reduced.append(row)
                elif any(row):
                    rest.append(row)
            candidates = reduced
        pivot = candidates[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        for i, row in enumerate(basis):
            f = row[col] // pivot[col]
            if f:
                basis[i] = [a - f * b for a, b in zip(row, pivot)]
        basis.append(pivot)
        work = rest
    return tuple(tuple(r) for r in basis)


def _pivot_column(row: Sequence[int]) -> int:
    return next(i for i, a in enumerate(row) if a != 0)


class Lattice(BaseModel):
    """A subgroup of Z^n, stored by its Hermite normal form basis."""

    model_config = ConfigDict(frozen=True)

    ambient_rank: int
    basis: tuple[IntVector, ...]

    @model_validator(mode="before")
    @classmethod
    def _canonical_basis(cls, data: Any) -> Any:
        if isinstance(data, dict) and "basis" in data:
            n = data.get("ambient_rank")
            rows = [tuple(int(a) for a in r) for r in data["basis"]]
            if n is None:
                n = check_lengths(rows, "basis rows")
            if any(len(r) != n for r in rows):
                raise InvalidInputError(f"basis rows must have length {n}")
            data = {**data, "ambient_rank": n, "basis": _hermite_rows(rows, n)}
        return data

    @classmethod
    def standard(cls, n: int) -> Lattice:
        return cls(ambient_rank=n, basis=[tuple(int(i == j) for j in range(n)) for i in range(n)])

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def is_full_rank(self) -> bool:
        return self.rank == self.ambient_rank

    def coordinates(self, v: Sequence[int]) -> IntVector | None:
        """Integer coordinates of v in this basis, or None if v is not in the lattice."""
        if len(v) != self.ambient_rank:
            raise InvalidInputError(f"vector {list(v)} has length != {self.ambient_rank}")
        remainder = list(v)
        coefficients = []
        for row in self.basis:
            col = _pivot_column(row)
            f, r = divmod(remainder[col], row[col])
            if r:
                return None
            coefficients.append(f)
            remainder = [a - f * b for a, b in zip(remainder, row)]
        return tuple(coefficients) if not any(remainder) else None

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def point(self, coordinates: Sequence[int]) -> IntVector:
        """The lattice vector with the given coordinates in this basis."""
        return tuple(
            sum(c * row[j] for c, row in zip(coordinates, self.basis, strict=True))
            for j in range(self.ambient_rank)
        )

    def covolume(self) -> int:
        """
        Volume of a fundamental cell
        Returns:
            |det(basis)|

        Raises:
            PreconditionError: if the lattice is not full rank
        """
        if not self.is_full_rank:
            raise PreconditionError("covolume is only defined for full-rank lattices")
        # HNF is upper triangular
        return math.prod(row[i] for i, row in enumerate(self.basis))


def hermite_basis(generators: Sequence[Sequence[int]]) -> Lattice:
    """
    Lattice spanned over Z by the given vectors
    Args:
        generators: nonempty list of integer vectors of a common length

    Returns:
        The lattice, with its basis in Hermite normal form

    Raises:
        InvalidInputError: if generators is empty or ragged
    """
    n = check_lengths(generators, "generators")
    return Lattice(ambient_rank=n, basis=generators)


def lattice_index(sub: Lattice, ambient: Lattice) -> int | float:
    """
    Index of a sublattice
    Args:
        sub: lattice contained in ambient
        ambient: the enclosing lattice

    Returns:
        |ambient/sub| when the ranks agree, math.inf when sub has smaller rank

    Raises:
        InvalidInputError: if the ambient ranks differ
        ContainmentError: if sub is not contained in ambient
    """
    if sub.ambient_rank != ambient.ambient_rank:
        raise InvalidInputError("lattices live in spaces of different rank")
    coordinates = []
    for row in sub.basis:
        c = ambient.coordinates(row)
        if c is None:
            raise ContainmentError(f"basis vector {list(row)} is not in the ambient lattice")
        coordinates.append(c)
    if sub.rank < ambient.rank:
        return math.inf
    return abs(int(determinant(coordinates)))


def min_positive_pairing(lattice: Lattice, v: Sequence[int]) -> int:
    """
    Positive generator of the subgroup {u.v : u in lattice} of Z
    Args:
        lattice: the lattice
        v: nonzero integer vector

    Returns:
        gcd of the pairings of v with the basis vectors

    Raises:
        InvalidInputError: if v is zero
        DegeneratePairingError: if v pairs to zero with the whole lattice
    """
    if not any(v):
        raise InvalidInputError("pairing vector must be nonzero")
    g = math.gcd(*(int(dot(row, v)) for row in lattice.basis)) if lattice.basis else 0
    if g == 0:
        raise DegeneratePairingError(f"{list(v)} pairs to zero with the whole lattice")
    return g


def row_echelon(rows: Sequence[Sequence[Number]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q, with the pivot columns."""
    matrix = [[Fraction(a) for a in r] for r in rows]
    pivots: list[int] = []
    if not matrix:
        return matrix, pivots
    n = len(matrix[0])
    r = 0
    for col in range(n):
        pivot = next((i for i in range(r, len(matrix)) if matrix[i][col] != 0), None)
        if pivot is None:
            continue
        matrix[r], matrix[pivot] = matrix[pivot], matrix[r]
        lead = matrix[r][col]
        matrix[r] = [a / lead for a in matrix[r]]
        for i in range(len(matrix)):
            if i != r and matrix[i][col] != 0:
                f = matrix[i][col]
                matrix[i] = [a - f * b for a, b in zip(matrix[i], matrix[r])]
        pivots.append(col)
        r += 1
        if r == len(matrix):
            break
    return matrix[:r], pivots


def rank(rows: Sequence[Sequence[Number]]) -> int:
    return len(row_echelon(rows)[1])


def determinant(rows: Sequence[Sequence[Number]]) -> Fraction:
    matrix = [[Fraction(a) for a in r] for r in rows]
    n = len(matrix)
    if any(len(r) != n for r in matrix):
        raise InvalidInputError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(n):
        pivot = next((i for i in range(col, n) if matrix[i][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            matrix[col], matrix[pivot] = matrix[pivot], matrix[col]
            det = -det
        lead = matrix[col][col]
        det *= lead
        for i in range(col + 1, n):
            f = matrix[i][col] / lead
            if f:
                matrix[i] = [a - f * b for a, b in zip(matrix[i], matrix[col])]
    return det


def solve_linear_system(
    rows: Sequence[Sequence[Number]], rhs: Sequence[Number]
) -> RatVector | None:
    """
    One rational solution of A x = b
    Args:
        rows: the rows of A
        rhs: the vector b

    Returns:
        A solution with free variables set to zero, or None if inconsistent
    """
    n = check_lengths(rows, "matrix rows")
    augmented = [list(r) + [b] for r, b in zip(rows, rhs, strict=True)]
    echelon, pivots = row_echelon(augmented)
    if n in pivots:
        return None
    solution = [Fraction(0)] * n
    for row, col in zip(echelon, pivots):
        solution[col] = row[n]
    return tuple(solution)


def nullspace(rows: Sequence[Sequence[Number]], n: int) -> list[IntVector]:
    """Integer vectors spanning {x in Q^n : A x = 0} over Q."""
    echelon, pivots = row_echelon(rows) if rows else ([], [])
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        x = [Fraction(0)] * n
        x[free] = Fraction(1)
        for row, col in zip(echelon, pivots):
            x[col] = -row[free]
        basis.append(scale_to_integer(x))
    return basis


def integer_kernel(rows: Sequence[Sequence[int]], n: int) -> Lattice:
    """
    Saturated lattice {x in Z^n : A x = 0}
    Args:
        rows: integer rows of A (may be empty)
        n: number of columns

    Returns:
        The kernel lattice, possibly of rank 0
    """
    if not rows:
        return Lattice.standard(n)
    m = len(rows)
    # row-reduce [A^T | I]: rows with zero left block span the kernel over Z
    extended = [
        tuple(rows[i][j] for i in range(m)) + tuple(int(j == k) for k in range(n))
        for j in range(n)
    ]
    echelon = _hermite_rows(extended, m + n)
    kernel = [row[m:] for row in echelon if not any(row[:m])]
    if not kernel:
        return Lattice(ambient_rank=n, basis=())
    return hermite_basis(kernel)
