"""
Half-open polytopes: vertices, lattice-normalized volumes, counts of scaled
lattice points and the Minkowski-sum-then-intersect construction.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import lru_cache, partial

from pydantic import BaseModel, ConfigDict, model_validator

from toric_fsig.cone_geometry import (
    HPolyhedron,
    Inequality,
    VPolyhedron,
    halfspaces_to_hull,
    hull_to_halfspaces,
)
from toric_fsig.config import get_settings
from toric_fsig.exceptions import InvalidInputError, UnboundedPolytopeError
from toric_fsig.lattice_core import (
    Lattice,
    Number,
    RatVector,
    determinant,
    dot,
    rank,
    solve_linear_system,
)

logger = logging.getLogger(__name__)


class HalfOpenPolytope(BaseModel):
    """
    A bounded polyhedron given by inequalities normal . x >= offset, some of
    them strict, measured against a full-rank reference lattice.
    """

    model_config = ConfigDict(frozen=True)

    base: HPolyhedron
    lattice: Lattice

    @model_validator(mode="after")
    def _check_lattice(self) -> HalfOpenPolytope:
        if self.lattice.ambient_rank != self.base.ambient_rank:
            raise InvalidInputError("polytope and lattice live in spaces of different rank")
        if not self.lattice.is_full_rank:
            raise InvalidInputError("the reference lattice must have full rank")
        return self

    @property
    def ambient_rank(self) -> int:
        return self.base.ambient_rank

    def contains(self, x: Sequence[Number]) -> bool:
        return self.base.contains(x)


def merge_inequalities(inequalities: Iterable[Inequality]) -> tuple[Inequality, ...]:
    """Drop repeated inequalities; of a closed and a strict copy the strict one is kept."""
    merged: dict[tuple[tuple[int, ...], Fraction], bool] = {}
    for i in inequalities:
        key = (i.normal, i.offset)
        merged[key] = merged.get(key, False) or i.strict
    return tuple(
        Inequality(normal=normal, offset=offset, strict=strict)
        for (normal, offset), strict in merged.items()
    )


@lru_cache(maxsize=512)
def _closure_hull(base: HPolyhedron) -> VPolyhedron:
    return halfspaces_to_hull(base)


def is_empty(p: HalfOpenPolytope) -> bool:
    """True when no point satisfies every inequality, strict flags included."""
    hull = _closure_hull(p.base)
    if hull.is_empty:
        return True
    return any(
        all(i.is_tight(v) for v in hull.vertices) for i in p.base.inequalities if i.strict
    )


def vertices(p: HalfOpenPolytope) -> list[RatVector]:
    """
    Vertices of the closure of a polytope
    Args:
        p: bounded half-open polytope

    Returns:
        The irredundant vertex list in lexicographic order, empty when p is empty

    Raises:
        UnboundedPolytopeError: if the closure has a recession ray
    """
    hull = _closure_hull(p.base)
    if hull.rays:
        raise UnboundedPolytopeError(hull.rays[0])
    if is_empty(p):
        return []
    return sorted(hull.vertices)


def _affine_rank(points: Sequence[RatVector]) -> int:
    if len(points) < 2:
        return 0
    origin = points[0]
    return rank([[a - b for a, b in zip(v, origin)] for v in points[1:]])


def _pulling_triangulation(
    points: Sequence[RatVector], incidences: Sequence[frozenset[int]]
) -> list[tuple[int, ...]]:
    """Simplices of a triangulation obtained by pulling the smallest vertex of every face."""
    cache: dict[frozenset[int], list[tuple[int, ...]]] = {}

    def triangulate(face: frozenset[int], dim: int) -> list[tuple[int, ...]]:
        if face in cache:
            return cache[face]
        if dim == 0:
            return [(min(face),)]
        apex = min(face)
        facets = set()
        for tight in incidences:
            facet = face & tight
            if apex in facet or facet in facets or len(facet) < dim:
                continue
            if _affine_rank([points[i] for i in sorted(facet)]) == dim - 1:
                facets.add(facet)
        simplices = [
            simplex + (apex,)
            for facet in sorted(facets, key=sorted)
            for simplex in triangulate(facet, dim - 1)
        ]
        cache[face] = simplices
        return simplices

    return triangulate(frozenset(range(len(points))), len(points[0]))


def volume(p: HalfOpenPolytope) -> Fraction:
    """
    Volume of the closure, a fundamental cell of p.lattice having volume 1
    Args:
        p: bounded half-open polytope

    Returns:
        Exact volume; 0 for empty or lower-dimensional polytopes

    Raises:
        UnboundedPolytopeError: if the closure has a recession ray
    """
    points = vertices(p)
    n = p.ambient_rank
    if not points or _affine_rank(points) < n:
        return Fraction(0)
    incidences = [
        frozenset(k for k, v in enumerate(points) if i.is_tight(v)) for i in p.base.inequalities
    ]
    simplices = _pulling_triangulation(points, incidences)
    total = Fraction(0)
    for simplex in simplices:
        origin = points[simplex[0]]
        total += abs(
            determinant([[a - b for a, b in zip(points[k], origin)] for k in simplex[1:]])
        )
    logger.debug("volume from %d simplices over %d vertices", len(simplices), len(points))
    return total / math.factorial(n) / p.lattice.covolume()


def lattice_box(
    points: Sequence[RatVector], lattice: Lattice, q: int
) -> list[tuple[int, int]]:
    """Per-coordinate integer bounds of the points of (1/q)lattice near the given vertices."""
    n = lattice.ambient_rank
    columns = [[row[i] for row in lattice.basis] for i in range(n)]
    lows: list[Fraction] = []
    highs: list[Fraction] = []
    for v in points:
        coords = solve_linear_system(columns, [q * a for a in v])
        if coords is None:  # pragma: no cover - full-rank lattices always solve
            raise InvalidInputError("vertex outside the span of the lattice")
        lows = list(coords) if not lows else [min(a, b) for a, b in zip(lows, coords)]
        highs = list(coords) if not highs else [max(a, b) for a, b in zip(highs, coords)]
    return [(math.floor(lo), math.ceil(hi)) for lo, hi in zip(lows, highs)]


def _fiber_length(
    prefix: Sequence[int],
    constraints: Sequence[tuple[tuple[int, ...], Fraction, bool]],
    bounds: tuple[int, int],
) -> int:
    lo, hi = bounds
    for normal, offset, strict in constraints:
        partial = dot(normal[:-1], prefix)
        last = normal[-1]
        if last == 0:
            if partial < offset or (strict and partial == offset):
                return 0
            continue
        threshold = Fraction(offset - partial, last)
        if last > 0:
            lo = max(lo, math.floor(threshold) + 1 if strict else math.ceil(threshold))
        else:
            hi = min(hi, math.ceil(threshold) - 1 if strict else math.floor(threshold))
        if lo > hi:
            return 0
    return hi - lo + 1


def _count_slab(
    first: int,
    prefixes: Sequence[range],
    constraints: Sequence[tuple[tuple[int, ...], Fraction, bool]],
    last: tuple[int, int],
) -> int:
    """Points whose first lattice coordinate is `first`; runs in a worker process."""
    ranges = [range(first, first + 1), *prefixes[1:]]
    return sum(_fiber_length(prefix, constraints, last) for prefix in itertools.product(*ranges))


def count_scaled_lattice_points(p: HalfOpenPolytope, q: int) -> int:
    """
    Number of points of p in (1/q)*p.lattice, strict inequalities honored
    Args:
        p: bounded half-open polytope
        q: positive integer scale

    Returns:
        The exact count

    Raises:
        InvalidInputError: if q < 1
        UnboundedPolytopeError: if the closure has a recession ray
    """
    if q < 1:
        raise InvalidInputError(f"q must be a positive integer, got {q}")
    points = vertices(p)
    if not points:
        return 0
    if p.ambient_rank == 0:
        return 1
    basis = p.lattice.basis
    # x = (1/q) sum_j c_j b_j turns normal.x >= offset into normal'.c >= q*offset
    constraints = [
        (tuple(int(dot(i.normal, b)) for b in basis), q * i.offset, i.strict)
        for i in p.base.inequalities
    ]
    box = lattice_box(points, p.lattice, q)
    prefixes = [range(lo, hi + 1) for lo, hi in box[:-1]]

    workers = get_settings().workers
    if workers == 1 or not prefixes:
        return sum(
            _fiber_length(prefix, constraints, box[-1]) for prefix in itertools.product(*prefixes)
        )
    logger.debug("counting q=%d over box %s with %d worker process(es)", q, box, workers)
    slab = partial(_count_slab, prefixes=prefixes, constraints=constraints, last=box[-1])
    with ProcessPoolExecutor(max_workers=min(workers, len(prefixes[0]))) as pool:
        return sum(pool.map(slab, prefixes[0]))


def _strict_sum_facet(facet: Inequality, p: HalfOpenPolytope, p_vertices: Sequence[RatVector]) -> bool:
    """A sum facet is strict when the face of p it comes from lies outside p."""
    values = [dot(facet.normal, v) for v in p_vertices]
    lowest = min(values)
    face = [v for v, value in zip(p_vertices, values) if value == lowest]
    return any(
        all(i.is_tight(v) for v in face) for i in p.base.inequalities if i.strict
    )


def minkowski_sum_intersect(
    p: HalfOpenPolytope, q: VPolyhedron, scale: Fraction, cone: HPolyhedron
) -> HalfOpenPolytope:
    """
    The polytope (p - scale*q) & cone
    Args:
        p: bounded half-open polytope
        q: polyhedron given by vertices and recession rays
        scale: nonnegative factor applied to the vertices of q; rays are kept
        cone: closed cone the difference is intersected with

    Returns:
        The half-open polytope, measured against p.lattice. A facet of the sum
        is strict when the face of p minimizing its normal misses p; cone
        facets are closed.

    Raises:
        InvalidInputError: if scale is negative or q is empty
        UnboundedPolytopeError: if the intersection is unbounded
    """
    if scale < 0:
        raise InvalidInputError(f"scale must be nonnegative, got {scale}")
    if q.is_empty:
        raise InvalidInputError("cannot subtract an empty polyhedron")
    if is_empty(p):
        return p
    p_vertices = vertices(p)
    difference = VPolyhedron(
        ambient_rank=p.ambient_rank,
        vertices=tuple(
            tuple(a - scale * b for a, b in zip(pv, qv))
            for pv in p_vertices
            for qv in q.vertices
        ),
        rays=tuple(tuple(-a for a in r) for r in q.rays),
    )
    facets = [
        f.model_copy(update={"strict": _strict_sum_facet(f, p, p_vertices)})
        for f in hull_to_halfspaces(difference).inequalities
    ]
    result = HalfOpenPolytope(
        base=HPolyhedron(
            ambient_rank=p.ambient_rank,
            inequalities=merge_inequalities(
                facets + [i.model_copy(update={"strict": False}) for i in cone.inequalities]
            ),
        ),
        lattice=p.lattice,
    )
    vertices(result)
    logger.debug("minkowski difference has %d inequalities", len(result.base.inequalities))
    return result


def product_polytope(p1: HalfOpenPolytope, p2: HalfOpenPolytope) -> HalfOpenPolytope:
    """p1 x p2 inside the direct sum of the two spaces, with the block lattice."""
    n1, n2 = p1.ambient_rank, p2.ambient_rank
    inequalities = [
        i.model_copy(update={"normal": i.normal + (0,) * n2}) for i in p1.base.inequalities
    ] + [i.model_copy(update={"normal": (0,) * n1 + i.normal}) for i in p2.base.inequalities]
    basis = [row + (0,) * n2 for row in p1.lattice.basis] + [
        (0,) * n1 + row for row in p2.lattice.basis
    ]
    return HalfOpenPolytope(
        base=HPolyhedron(ambient_rank=n1 + n2, inequalities=tuple(inequalities)),
        lattice=Lattice(ambient_rank=n1 + n2, basis=basis),
    )
