"""
F-signatures of affine toric rings, pairs and triples as polytope volumes.

M-side data (sublattices, ideal generators, Q-Gorenstein vectors and the
polytopes themselves) is written in the basis dual to the basis of N.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Sequence
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from toric_fsig.cone_geometry import (
    Cone,
    HPolyhedron,
    Inequality,
    VPolyhedron,
    classify_cone,
    dual_cone,
    extreme_rays,
    halfspaces_to_hull,
    hull_to_halfspaces,
    split_torus_factors,
)
from toric_fsig.exceptions import (
    EffectivityError,
    ExponentRangeError,
    InvalidConeError,
    InvalidInputError,
    NotFullDimensionalError,
    PreconditionError,
    ReflectionMismatchError,
    SinghPresentationError,
)
from toric_fsig.lattice_core import (
    IntVector,
    Lattice,
    RatVector,
    check_lengths,
    dot,
    hermite_basis,
    min_positive_pairing,
    nullspace,
    parse_rational,
    primitivize,
    scale_to_integer,
    solve_linear_system,
)
from toric_fsig.polytope_engine import (
    HalfOpenPolytope,
    merge_inequalities,
    minkowski_sum_intersect,
    volume,
)

logger = logging.getLogger(__name__)


class ToricRing(BaseModel):
    """
    k[sigma^dual & L] for a strongly convex cone sigma in N.

    Attributes:
        lattice: the lattice N, full rank in Z^n
        sigma: the cone, with rays written as vectors of Z^n spanning N
        sublattice: the lattice L of M; None means all of M
    """

    model_config = ConfigDict(frozen=True)

    lattice: Lattice
    sigma: Cone
    sublattice: Lattice | None = None

    @model_validator(mode="after")
    def _check_ring(self) -> ToricRing:
        n = self.sigma.ambient_rank
        if self.lattice.ambient_rank != n or not self.lattice.is_full_rank:
            raise InvalidInputError(f"N must be a full-rank lattice in Z^{n}")
        if not classify_cone(self.sigma).strongly_convex:
            raise InvalidConeError(f"cone {[list(r) for r in self.sigma.rays]} contains a line")
        if self.sublattice is not None and (
            self.sublattice.ambient_rank != n or not self.sublattice.is_full_rank
        ):
            raise InvalidInputError(f"L must be a full-rank lattice in Z^{n}")
        return self

    @classmethod
    def of(
        cls,
        rays: Sequence[Sequence[int]],
        lattice: Lattice | None = None,
        sublattice: Lattice | None = None,
    ) -> ToricRing:
        sigma = Cone.from_generators(rays)
        return cls(
            lattice=lattice or Lattice.standard(sigma.ambient_rank),
            sigma=sigma,
            sublattice=sublattice,
        )

    @property
    def rank(self) -> int:
        return self.sigma.ambient_rank

    def reduced_cone(self) -> Cone:
        """sigma in coordinates of the basis of N, rays primitive in N and in their given order."""
        if self.lattice == Lattice.standard(self.rank):
            return self.sigma
        columns = [[row[i] for row in self.lattice.basis] for i in range(self.rank)]
        rays = []
        for ray in self.sigma.rays:
            coords = solve_linear_system(columns, ray)
            if coords is None:  # pragma: no cover - N has full rank
                raise InvalidInputError(f"ray {list(ray)} is not in the span of N")
            rays.append(scale_to_integer(coords))
        return Cone(ambient_rank=self.rank, rays=tuple(rays))


class TorusDivisor(BaseModel):
    """D = sum a_i D_i, one coefficient per ray of the cone in order."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coefficients: tuple[Fraction, ...]

    @field_validator("coefficients", mode="before")
    @classmethod
    def _as_fractions(cls, value: Any) -> tuple[Fraction, ...]:
        return tuple(parse_rational(a) for a in value)

    @model_validator(mode="after")
    def _check_effective(self) -> TorusDivisor:
        for i, a in enumerate(self.coefficients):
            if a < 0:
                raise EffectivityError(f"divisor coefficient a_{i} = {a} is negative")
        return self

    @classmethod
    def of(cls, coefficients: Sequence[Any]) -> TorusDivisor:
        return cls(coefficients=coefficients)

    @classmethod
    def zero(cls, length: int) -> TorusDivisor:
        return cls(coefficients=(Fraction(0),) * length)


class MonomialIdeal(BaseModel):
    model_config = ConfigDict(frozen=True)

    generators: tuple[IntVector, ...]

    @model_validator(mode="after")
    def _check_generators(self) -> MonomialIdeal:
        check_lengths(self.generators, "ideal generators")
        return self

    @classmethod
    def unit(cls, n: int) -> MonomialIdeal:
        return cls(generators=((0,) * n,))


def _check_in_semigroup(ring: ToricRing, u: Sequence[int]) -> None:
    cone = ring.reduced_cone()
    if len(u) != ring.rank:
        raise InvalidInputError(f"monomial {list(u)} has length != {ring.rank}")
    if any(dot(v, u) < 0 for v in cone.rays):
        raise InvalidInputError(f"monomial {list(u)} is not in the dual cone")
    if ring.sublattice is not None and not ring.sublattice.contains(u):
        raise InvalidInputError(f"monomial {list(u)} is not in L")


def _check_divisor(ring: ToricRing, divisor: TorusDivisor) -> None:
    if len(divisor.coefficients) != len(ring.sigma.rays):
        raise InvalidInputError(
            f"divisor has {len(divisor.coefficients)} coefficients for {len(ring.sigma.rays)} rays"
        )


class TripleProblem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    ring: ToricRing
    divisor: TorusDivisor
    ideal: MonomialIdeal
    t: Fraction

    @field_validator("t", mode="before")
    @classmethod
    def _as_fraction(cls, value: Any) -> Fraction:
        return parse_rational(value)

    @model_validator(mode="after")
    def _check_problem(self) -> TripleProblem:
        if self.t < 0:
            raise ExponentRangeError(f"t = {self.t} is negative")
        _check_divisor(self.ring, self.divisor)
        for u in self.ideal.generators:
            _check_in_semigroup(self.ring, u)
        return self


class FSignatureResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: Fraction
    polytope: HalfOpenPolytope
    torus_rank: int = 0
    qgorenstein_vector: RatVector | None = None


class SinghPresentation(BaseModel):
    model_config = ConfigDict(frozen=True)

    full: bool
    property_star: bool


def require_full_dimensional(cone: Cone) -> None:
    if not classify_cone(cone).full_dimensional:
        raise NotFullDimensionalError(
            "the cone is not full-dimensional; split off torus factors with "
            "split_torus_factors first"
        )


def require_character_lattice(ring: ToricRing, what: str) -> None:
    if ring.sublattice is not None:
        raise PreconditionError(f"{what} are computed over the full character lattice M only")


def build_p_polytope(ring: ToricRing, divisor: TorusDivisor | None = None) -> HalfOpenPolytope:
    """
    The polytope {w : 0 <= w.v_i < c_i} whose volume is the F-signature
    Args:
        ring: toric ring with a full-dimensional cone
        divisor: optional effective torus-invariant divisor

    Returns:
        Half-open polytope with c_i = 1 - a_i for a divisor, the minimal
        positive pairing of v_i with L for a sublattice, and 1 otherwise

    Raises:
        NotFullDimensionalError: if the cone has torus factors
        PreconditionError: if both a divisor and a sublattice are given
        InvalidInputError: if the divisor length differs from the ray count
    """
    cone = ring.reduced_cone()
    require_full_dimensional(cone)
    if divisor is not None:
        require_character_lattice(ring, "pairs")
        _check_divisor(ring, divisor)
    inequalities = []
    for i, v in enumerate(cone.rays):
        if divisor is not None:
            bound = 1 - divisor.coefficients[i]
        elif ring.sublattice is not None:
            bound = Fraction(min_positive_pairing(ring.sublattice, v))
        else:
            bound = Fraction(1)
        inequalities.append(Inequality(normal=v, offset=0))
        inequalities.append(Inequality(normal=tuple(-a for a in v), offset=-bound, strict=True))
    return HalfOpenPolytope(
        base=HPolyhedron(ambient_rank=ring.rank, inequalities=merge_inequalities(inequalities)),
        lattice=ring.sublattice or Lattice.standard(ring.rank),
    )


def q_gorenstein_vector(
    ring: ToricRing, divisor: TorusDivisor | None = None
) -> RatVector | None:
    """
    Solution of w.v_i = a_i - 1 for every ray
    Args:
        ring: toric ring with a full-dimensional cone
        divisor: optional divisor, zero when omitted

    Returns:
        w, or None when the system is inconsistent

    Raises:
        NotFullDimensionalError: if the cone has torus factors
    """
    cone = ring.reduced_cone()
    require_full_dimensional(cone)
    if divisor is None:
        divisor = TorusDivisor.zero(len(cone.rays))
    _check_divisor(ring, divisor)
    if not cone.rays:
        return ()
    return solve_linear_system(cone.rays, [a - 1 for a in divisor.coefficients])


def f_signature(ring: ToricRing) -> FSignatureResult:
    """
    F-signature of k[sigma^dual & L]
    Args:
        ring: the toric ring

    Returns:
        Result holding the volume of P_sigma (or P_sigma^L) of the cone with
        its torus factors split off

    Raises:
        PreconditionError: if a sublattice is combined with torus factors
    """
    n = ring.rank
    cone, _, torus_rank = split_torus_factors(ring.reduced_cone(), Lattice.standard(n))
    if torus_rank and ring.sublattice is not None:
        raise PreconditionError("a sublattice L cannot be combined with torus factors")
    reduced = ToricRing(
        lattice=Lattice.standard(cone.ambient_rank), sigma=cone, sublattice=ring.sublattice
    )
    polytope = build_p_polytope(reduced)
    value = volume(polytope)
    logger.debug("f-signature %s with %d torus factor(s)", value, torus_rank)
    return FSignatureResult(
        value=value,
        polytope=polytope,
        torus_rank=torus_rank,
        qgorenstein_vector=q_gorenstein_vector(reduced),
    )


def newton_polyhedron(ideal: MonomialIdeal, ring: ToricRing) -> VPolyhedron:
    """
    conv(generators) + sigma^dual
    Args:
        ideal: monomial ideal with generators in the semigroup
        ring: the toric ring

    Returns:
        The Newton polyhedron with its vertex list pruned to extreme points

    Raises:
        InvalidInputError: if a generator is outside the semigroup
    """
    for u in ideal.generators:
        _check_in_semigroup(ring, u)
    _, dual = dual_cone(ring.reduced_cone())
    hull = VPolyhedron(ambient_rank=ring.rank, vertices=ideal.generators, rays=dual.rays)
    pruned = halfspaces_to_hull(hull_to_halfspaces(hull))
    return pruned.model_copy(update={"vertices": tuple(sorted(pruned.vertices))})


def f_signature_pair(ring: ToricRing, divisor: TorusDivisor) -> FSignatureResult:
    """
    F-signature of the pair (R, D)
    Args:
        ring: toric ring over M with a full-dimensional cone
        divisor: effective divisor

    Returns:
        Result holding the volume of P_sigma^D, zero when some a_i >= 1

    Raises:
        NotFullDimensionalError: if the cone has torus factors
        PreconditionError: if the ring carries a sublattice
    """
    require_character_lattice(ring, "pairs")
    polytope = build_p_polytope(ring, divisor)
    return FSignatureResult(
        value=volume(polytope),
        polytope=polytope,
        qgorenstein_vector=q_gorenstein_vector(ring, divisor),
    )


def reflection_polytope(problem: TripleProblem) -> HalfOpenPolytope:
    """P_sigma^D & t*Newt(a), with t*Newt(a) = t*conv(generators) + sigma^dual."""
    p = build_p_polytope(problem.ring, problem.divisor)
    newton = hull_to_halfspaces(newton_polyhedron(problem.ideal, problem.ring))
    return HalfOpenPolytope(
        base=HPolyhedron(
            ambient_rank=p.ambient_rank,
            inequalities=merge_inequalities(
                p.base.inequalities + newton.scaled(problem.t).inequalities
            ),
        ),
        lattice=p.lattice,
    )


def triple_polytope(problem: TripleProblem) -> HalfOpenPolytope:
    """(P_sigma^D - t*Newt(a)) & sigma^dual."""
    require_character_lattice(problem.ring, "triples")
    p = build_p_polytope(problem.ring, problem.divisor)
    newton = newton_polyhedron(problem.ideal, problem.ring)
    halfspaces, _ = dual_cone(problem.ring.reduced_cone())
    return minkowski_sum_intersect(p, newton, problem.t, halfspaces)


def f_signature_triple(problem: TripleProblem, reflection_check: bool = True) -> FSignatureResult:
    """
    F-signature of the triple (R, D, a^t)
    Args:
        problem: ring, divisor, ideal and exponent
        reflection_check: when the pair is Q-Gorenstein, also compute the
            volume of P_sigma^D & t*Newt(a) and require equality

    Returns:
        Result holding the volume of (P_sigma^D - t*Newt(a)) & sigma^dual

    Raises:
        NotFullDimensionalError: if the cone has torus factors
        PreconditionError: if the ring carries a sublattice
        ReflectionMismatchError: if the two volumes differ
    """
    polytope = triple_polytope(problem)
    value = volume(polytope)
    w = q_gorenstein_vector(problem.ring, problem.divisor)
    if w is not None and reflection_check:
        reflected = volume(reflection_polytope(problem))
        logger.debug("reflection check: %s against %s", reflected, value)
        if reflected != value:
            raise ReflectionMismatchError(
                f"triple volume {value} differs from reflected volume {reflected}"
            )
    return FSignatureResult(value=value, polytope=polytope, qgorenstein_vector=w)


def _semigroup_members(generators: Sequence[IntVector], bounds: Sequence[int]) -> set[IntVector]:
    """Points of the box prod [0, bounds_i] that are sums of the generators."""
    steps = [g for g in generators if any(g)]
    members: set[IntVector] = set()
    for x in itertools.product(*(range(b + 1) for b in bounds)):
        if not any(x) or any(
            tuple(a - b for a, b in zip(x, g)) in members
            for g in steps
            if all(b <= a for a, b in zip(x, g))
        ):
            members.add(x)
    return members


def _axis_multiples(lattice: Lattice) -> list[int]:
    n = lattice.ambient_rank
    covolume = lattice.covolume()
    multiples = []
    for i in range(n):
        multiples.append(
            next(
                m
                for m in range(1, covolume + 1)
                if lattice.contains(tuple(m * int(i == j) for j in range(n)))
            )
        )
    return multiples


def _singh_lattice(generators: Sequence[Sequence[int]], ambient_rank: int) -> Lattice:
    if check_lengths(generators, "semigroup generators") != ambient_rank:
        raise InvalidInputError(f"semigroup generators must have length {ambient_rank}")
    for g in generators:
        if any(a < 0 for a in g):
            raise InvalidInputError(f"generator {list(g)} has a negative coordinate")
    return hermite_basis(generators)


def _full_in_span(generators: Sequence[IntVector], lattice: Lattice) -> bool:
    """
    Fullness when Lattice(S) may have lower rank

    S is full iff cone(S) is the whole cone C = span(S) & R^n_+ and every
    point of Lattice(S) & Z^n_+ in the box below the sum of the generators
    lies in S; any point of Lattice(S) & C is a sum of generators plus such
    a remainder.
    """
    n = lattice.ambient_rank
    steps = [g for g in generators if any(g)]
    annihilator = nullspace(lattice.basis, n)
    constraints = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    constraints += annihilator + [tuple(-a for a in u) for u in annihilator]
    rays, _ = extreme_rays(constraints, n)
    on_rays = {primitivize(g) for g in steps}
    if any(r not in on_rays for r in rays):
        return False
    bounds = [sum(g[j] for g in steps) for j in range(n)]
    members = _semigroup_members(steps, bounds)
    return all(
        x in members
        for x in itertools.product(*(range(b + 1) for b in bounds))
        if lattice.contains(x)
    )


def check_singh_presentation(
    generators: Sequence[Sequence[int]], ambient_rank: int
) -> SinghPresentation:
    """
    Fullness and property (*) of a semigroup S of Z^n_+
    Args:
        generators: nonnegative integer generators of S
        ambient_rank: n

    Returns:
        full: Lattice(S) & Z^n_+ = S; property_star: for every i the lattice
        has a vector with i-th coordinate -1. A lattice of lower rank is
        handled inside its own span.

    Raises:
        InvalidInputError: if a generator has a negative coordinate
    """
    lattice = _singh_lattice(generators, ambient_rank)
    property_star = all(
        math.gcd(*(row[i] for row in lattice.basis)) == 1 for i in range(ambient_rank)
    )
    if not lattice.is_full_rank:
        full = _full_in_span([tuple(g) for g in generators], lattice)
        return SinghPresentation(full=full, property_star=property_star)
    # every point of Lattice(S) & Z^n_+ reduces into the box of axis multiples
    multiples = _axis_multiples(lattice)
    members = _semigroup_members([tuple(g) for g in generators], multiples)
    full = all(
        tuple(m * int(i == j) for j in range(ambient_rank)) in members
        for i, m in enumerate(multiples)
    ) and all(
        x in members
        for x in itertools.product(*(range(m) for m in multiples))
        if lattice.contains(x)
    )
    return SinghPresentation(full=full, property_star=property_star)


def _require_singh(generators: Sequence[Sequence[int]], ambient_rank: int) -> Lattice:
    presentation = check_singh_presentation(generators, ambient_rank)
    if not (presentation.full and presentation.property_star):
        raise SinghPresentationError(
            f"presentation is {'' if presentation.full else 'not '}full and "
            f"{'has' if presentation.property_star else 'lacks'} property (*)"
        )
    lattice = hermite_basis(generators)
    if not lattice.is_full_rank:
        raise PreconditionError("the semigroup generators must span a full-rank lattice")
    return lattice


def singh_count(generators: Sequence[Sequence[int]], ambient_rank: int, q: int) -> int:
    """
    Length of R/(m^[q] & R) for R = k[S]
    Args:
        generators: generators of a full semigroup with property (*)
        ambient_rank: n
        q: positive integer

    Returns:
        #{v in Lattice(S) : 0 <= v_i < q}

    Raises:
        SinghPresentationError: if the presentation is not full or lacks (*)
    """
    if q < 1:
        raise InvalidInputError(f"q must be a positive integer, got {q}")
    lattice = _require_singh(generators, ambient_rank)
    return sum(
        1 for x in itertools.product(range(q), repeat=ambient_rank) if lattice.contains(x)
    )


def singh_ring(generators: Sequence[Sequence[int]], ambient_rank: int) -> ToricRing:
    """The ring k[Z^n_+ & Lattice(S)] that a full presentation with (*) describes."""
    lattice = _require_singh(generators, ambient_rank)
    orthant = [tuple(int(i == j) for j in range(ambient_rank)) for i in range(ambient_rank)]
    return ToricRing.of(orthant, sublattice=lattice)


def product_ring(ring1: ToricRing, ring2: ToricRing) -> ToricRing:
    """The ring of sigma1 x sigma2 in N1 + N2, with block-diagonal lattices."""
    n1, n2 = ring1.rank, ring2.rank

    def block(a: Lattice, b: Lattice) -> Lattice:
        return Lattice(
            ambient_rank=n1 + n2,
            basis=[row + (0,) * n2 for row in a.basis] + [(0,) * n1 + row for row in b.basis],
        )

    rays = [v + (0,) * n2 for v in ring1.sigma.rays] + [(0,) * n1 + v for v in ring2.sigma.rays]
    sublattice = None
    if ring1.sublattice is not None or ring2.sublattice is not None:
        sublattice = block(
            ring1.sublattice or Lattice.standard(n1), ring2.sublattice or Lattice.standard(n2)
        )
    return ToricRing(
        lattice=block(ring1.lattice, ring2.lattice),
        sigma=Cone(ambient_rank=n1 + n2, rays=tuple(rays)),
        sublattice=sublattice,
    )
