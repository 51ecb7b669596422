"""
Rational polyhedral cones and polyhedra.

H<->V conversions are done by cddlib in exact fraction arithmetic; results
come back as primitive integer rays and rational vertices.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

import cdd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from toric_fsig.exceptions import (
    ContainmentError,
    InvalidConeError,
    InvalidInputError,
)
from toric_fsig.lattice_core import (
    IntVector,
    Lattice,
    Number,
    RatVector,
    check_lengths,
    dot,
    integer_kernel,
    nullspace,
    primitivize,
    rank,
    scale_to_integer,
)

logger = logging.getLogger(__name__)


class Cone(BaseModel):
    model_config = ConfigDict(frozen=True)

    ambient_rank: int
    rays: tuple[IntVector, ...]

    @model_validator(mode="after")
    def _rays_are_primitive(self) -> Cone:
        for ray in self.rays:
            if len(ray) != self.ambient_rank:
                raise InvalidInputError(f"ray {list(ray)} has length != {self.ambient_rank}")
            if primitivize(ray) != ray:
                raise InvalidInputError(f"ray {list(ray)} is not primitive")
        return self

    @classmethod
    def from_generators(
        cls, generators: Sequence[Sequence[int]], ambient_rank: int | None = None
    ) -> Cone:
        """
        Cone spanned by the given vectors
        Args:
            generators: nonzero integer vectors
            ambient_rank: required only when generators is empty (the zero cone)

        Returns:
            Cone whose rays are the primitive extreme rays among the generators,
            in the order first given. Cones containing a line keep every
            distinct primitive generator.

        Raises:
            InvalidInputError: if generators is empty, ragged, or has a zero vector
        """
        if not generators and ambient_rank is not None:
            return cls(ambient_rank=ambient_rank, rays=())
        n = check_lengths(generators, "cone generators")
        rays: list[IntVector] = []
        for g in generators:
            ray = primitivize(g)
            if ray not in rays:
                rays.append(ray)
        facets, lines = extreme_rays(rays, n)
        if rank(facets + lines) == n:
            rays = [
                r
                for r in rays
                if rank([u for u in facets if dot(u, r) == 0] + lines) == n - 1
            ]
        return cls(ambient_rank=n, rays=tuple(rays))


class Inequality(BaseModel):
    """normal . x >= offset, or > when strict."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    normal: IntVector
    offset: Fraction
    strict: bool = False

    @field_validator("offset", mode="before")
    @classmethod
    def _as_fraction(cls, value: Any) -> Fraction:
        if isinstance(value, float):
            raise InvalidInputError(f"inequality offsets must be rational, got {value!r}")
        return Fraction(value)

    def holds(self, x: Sequence[Number]) -> bool:
        value = dot(self.normal, x)
        return value > self.offset if self.strict else value >= self.offset

    def is_tight(self, x: Sequence[Number]) -> bool:
        return dot(self.normal, x) == self.offset


class HPolyhedron(BaseModel):
    model_config = ConfigDict(frozen=True)

    ambient_rank: int
    inequalities: tuple[Inequality, ...]

    @model_validator(mode="before")
    @classmethod
    def _drop_duplicates(cls, data: Any) -> Any:
        if isinstance(data, dict) and "inequalities" in data:
            rows = [
                i if isinstance(i, Inequality) else Inequality.model_validate(i)
                for i in data["inequalities"]
            ]
            data = {**data, "inequalities": tuple(dict.fromkeys(rows))}
        return data

    @model_validator(mode="after")
    def _check_inequalities(self) -> HPolyhedron:
        for inequality in self.inequalities:
            if len(inequality.normal) != self.ambient_rank:
                raise InvalidInputError(
                    f"normal {list(inequality.normal)} has length != {self.ambient_rank}"
                )
            if not any(inequality.normal):
                raise InvalidInputError("inequality normals must be nonzero")
        return self

    def contains(self, x: Sequence[Number]) -> bool:
        return all(inequality.holds(x) for inequality in self.inequalities)

    def closure(self) -> HPolyhedron:
        return HPolyhedron(
            ambient_rank=self.ambient_rank,
            inequalities=tuple(i.model_copy(update={"strict": False}) for i in self.inequalities),
        )

    def scaled(self, factor: Fraction) -> HPolyhedron:
        """The polyhedron factor * self (offsets scale, normals do not)."""
        return HPolyhedron(
            ambient_rank=self.ambient_rank,
            inequalities=tuple(
                i.model_copy(update={"offset": i.offset * factor}) for i in self.inequalities
            ),
        )


class VPolyhedron(BaseModel):
    """conv(vertices) + cone(rays). An empty vertex list is the empty polyhedron."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ambient_rank: int
    vertices: tuple[RatVector, ...]
    rays: tuple[IntVector, ...] = ()

    @field_validator("vertices", mode="before")
    @classmethod
    def _as_fractions(cls, value: Any) -> tuple[RatVector, ...]:
        return tuple(tuple(Fraction(a) for a in v) for v in value)

    @model_validator(mode="after")
    def _check_shapes(self) -> VPolyhedron:
        for v in self.vertices + tuple(self.rays):
            if len(v) != self.ambient_rank:
                raise InvalidInputError(f"{list(v)} has length != {self.ambient_rank}")
        if any(primitivize(r) != r for r in self.rays):
            raise InvalidInputError("recession rays must be primitive")
        if self.rays and not self.vertices:
            raise InvalidInputError("an empty polyhedron has no recession rays")
        return self

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    @property
    def is_bounded(self) -> bool:
        return not self.rays


class ConeClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    strongly_convex: bool
    full_dimensional: bool
    span_rank: int


def _convert(
    rows: Sequence[Sequence[Number]], rep_type: Any
) -> tuple[list[tuple[Fraction, ...]], frozenset[int]]:
    """
    Run cddlib on a nonempty matrix in exact arithmetic
    Args:
        rows: inequality rows [b, a] meaning b + a.x >= 0, or generator rows
            [t, v] with t = 1 for a point and t = 0 for a ray
        rep_type: cdd.RepType of the rows

    Returns:
        Tuple[
            rows of the other representation,
            indices of the rows that are equations (or lines)
        ]
    """
    matrix = cdd.Matrix([list(r) for r in rows], number_type="fraction")
    matrix.rep_type = rep_type
    polyhedron = cdd.Polyhedron(matrix)
    if rep_type == cdd.RepType.INEQUALITY:
        output = polyhedron.get_generators()
    else:
        output = polyhedron.get_inequalities()
        output.canonicalize()
    converted = [tuple(Fraction(a) for a in output[i]) for i in range(output.row_size)]
    logger.debug(
        "cdd: %d rows in, %d rows out, %d linear", len(rows), len(converted), len(output.lin_set)
    )
    return converted, frozenset(output.lin_set)


def _modulo_lines(v: Sequence[Number], lines: Sequence[IntVector]) -> tuple[Fraction, ...]:
    """Component of v orthogonal to the span of lines."""
    basis: list[list[Fraction]] = []
    for line in lines:
        w = [Fraction(a) for a in line]
        for b in basis:
            c = Fraction(dot(w, b)) / Fraction(dot(b, b))
            w = [x - c * y for x, y in zip(w, b)]
        if any(w):
            basis.append(w)
    out = [Fraction(a) for a in v]
    for b in basis:
        c = Fraction(dot(out, b)) / Fraction(dot(b, b))
        out = [x - c * y for x, y in zip(out, b)]
    return tuple(out)


def _units(n: int) -> list[IntVector]:
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def extreme_rays(
    constraints: Sequence[Sequence[int]], d: int
) -> tuple[list[IntVector], list[IntVector]]:
    """
    Double description of {x in Q^d : a.x >= 0 for every constraint a}
    Args:
        constraints: integer constraint vectors of length d
        d: ambient dimension

    Returns:
        Tuple[
            primitive extreme rays, taken orthogonal to the lineality space,
            primitive basis of the lineality space
        ]
    """
    if d == 0:
        return [], []
    if not constraints:
        return [], _units(d)
    rows, linearity = _convert([(0, *a) for a in constraints], cdd.RepType.INEQUALITY)
    lines = [scale_to_integer(row[1:]) for i, row in enumerate(rows) if i in linearity]
    rays: list[IntVector] = []
    for i, row in enumerate(rows):
        if i in linearity or row[0] != 0:
            continue
        reduced = _modulo_lines(row[1:], lines)
        if any(reduced):
            rays.append(scale_to_integer(reduced))
    rays = list(dict.fromkeys(rays))
    logger.debug("double description in dim %d: %d rays, %d lines", d, len(rays), len(lines))
    return rays, lines


def _inequality_from(row: Sequence[Fraction]) -> Inequality:
    """b + a.x >= 0 as a.x >= -b with a made primitive."""
    b, a = row[0], row[1:]
    normal = scale_to_integer(a)
    j = next(k for k, x in enumerate(a) if x != 0)
    return Inequality(normal=normal, offset=-b * normal[j] / a[j])


def _empty_halfspaces(n: int) -> HPolyhedron:
    e1 = tuple(int(j == 0) for j in range(n))
    return HPolyhedron(
        ambient_rank=n,
        inequalities=(
            Inequality(normal=e1, offset=1),
            Inequality(normal=tuple(-a for a in e1), offset=0),
        ),
    )


def hull_to_halfspaces(v: VPolyhedron) -> HPolyhedron:
    """
    H-representation of conv(vertices) + cone(rays)
    Args:
        v: polyhedron in V-representation

    Returns:
        Irredundant closed inequalities; affine hulls of lower-dimensional
        polyhedra appear as pairs of opposing inequalities. The empty
        polyhedron maps to an infeasible pair.
    """
    n = v.ambient_rank
    if v.is_empty:
        return _empty_halfspaces(n)
    generators: list[tuple[Number, ...]] = [(Fraction(1), *vertex) for vertex in v.vertices]
    generators.extend((0, *ray) for ray in v.rays)
    rows, linearity = _convert(generators, cdd.RepType.GENERATOR)
    inequalities: list[Inequality] = []
    for i, row in enumerate(rows):
        if not any(row[1:]):
            continue
        inequalities.append(_inequality_from(row))
        if i in linearity:
            inequalities.append(_inequality_from([-a for a in row]))
    return HPolyhedron(ambient_rank=n, inequalities=tuple(inequalities))


def halfspaces_to_hull(h: HPolyhedron) -> VPolyhedron:
    """
    V-representation of the closure of an H-polyhedron
    Args:
        h: polyhedron in H-representation (strict flags are ignored)

    Returns:
        Vertices and primitive recession rays; a lineality direction l shows
        up as the two rays l and -l, and vertices and rays are reduced
        orthogonally to the lineality space. The empty polyhedron has no
        vertices.
    """
    n = h.ambient_rank
    if not h.inequalities:
        units = _units(n)
        return VPolyhedron(
            ambient_rank=n,
            vertices=((Fraction(0),) * n,),
            rays=tuple(units + [tuple(-a for a in u) for u in units]),
        )
    rows, linearity = _convert(
        [(-i.offset, *i.normal) for i in h.inequalities], cdd.RepType.INEQUALITY
    )
    lines = [scale_to_integer(row[1:]) for i, row in enumerate(rows) if i in linearity]
    vertices: list[RatVector] = []
    rays: list[IntVector] = []
    for i, row in enumerate(rows):
        if i in linearity:
            continue
        reduced = _modulo_lines(row[1:], lines)
        if row[0] != 0:
            vertices.append(tuple(a / row[0] for a in reduced))
        elif any(reduced):
            rays.append(scale_to_integer(reduced))
    if not vertices:
        return VPolyhedron(ambient_rank=n, vertices=())
    for line in lines:
        rays.append(line)
        rays.append(tuple(-a for a in line))
    return VPolyhedron(
        ambient_rank=n,
        vertices=tuple(dict.fromkeys(vertices)),
        rays=tuple(dict.fromkeys(rays)),
    )


def dual_cone(c: Cone) -> tuple[HPolyhedron, Cone]:
    """
    Dual cone {u : u.v >= 0 for every v in c}
    Args:
        c: the cone

    Returns:
        Tuple[
            H-representation with one closed inequality u.v_i >= 0 per ray,
            the dual cone by its minimal ray generators (a line l as l and -l)
        ]
    """
    n = c.ambient_rank
    halfspaces = HPolyhedron(
        ambient_rank=n,
        inequalities=tuple(Inequality(normal=ray, offset=0) for ray in c.rays),
    )
    rays, lines = extreme_rays(c.rays, n)
    generators = rays + [x for line in lines for x in (line, tuple(-a for a in line))]
    return halfspaces, Cone(ambient_rank=n, rays=tuple(generators))


def classify_cone(c: Cone) -> ConeClassification:
    """
    Strong convexity, full dimensionality and span rank of a cone
    Args:
        c: the cone

    Returns:
        Classification; strong convexity is decided as full dimensionality
        of the dual cone
    """
    n = c.ambient_rank
    span_rank = rank(c.rays) if c.rays else 0
    rays, lines = extreme_rays(c.rays, n)
    return ConeClassification(
        strongly_convex=(rank(rays + lines) == n) if rays or lines else n == 0,
        full_dimensional=span_rank == n,
        span_rank=span_rank,
    )


def split_torus_factors(c: Cone, lattice: Lattice) -> tuple[Cone, Lattice, int]:
    """
    Rewrite a cone as a full-dimensional cone in the saturated lattice it spans
    Args:
        c: strongly convex cone
        lattice: the lattice N containing the rays of c

    Returns:
        Tuple[
            the cone in coordinates of the basis of N' = span(c) & N,
            N' in ambient coordinates,
            rank of the torus factor, n - rank(N')
        ]

    Raises:
        InvalidConeError: if c is not strongly convex
        ContainmentError: if a ray of c is not in the lattice
    """
    classification = classify_cone(c)
    if not classification.strongly_convex:
        raise InvalidConeError("cone contains a line")
    if classification.full_dimensional:
        return c, lattice, 0
    n = c.ambient_rank
    coordinates = []
    for ray in c.rays:
        coords = lattice.coordinates(ray)
        if coords is None:
            raise ContainmentError(f"ray {list(ray)} is not in the lattice")
        coordinates.append(coords)
    annihilator = nullspace(coordinates, n)
    saturated = integer_kernel(annihilator, n)
    sublattice = Lattice(
        ambient_rank=n, basis=[lattice.point(row) for row in saturated.basis]
    )
    rays = []
    for ray in c.rays:
        coords = sublattice.coordinates(ray)
        if coords is None:  # pragma: no cover - rays lie in their own span
            raise ContainmentError(f"ray {list(ray)} is not in the saturated lattice")
        rays.append(coords)
    logger.debug("split %d torus factor(s) from cone %s", n - sublattice.rank, c.rays)
    return Cone(ambient_rank=sublattice.rank, rays=tuple(rays)), sublattice, n - sublattice.rank
