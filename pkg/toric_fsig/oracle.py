"""
Brute-force counters that check the polytope volumes against the counting
characterizations they come from.
"""

from __future__ import annotations

import itertools
import logging
import os
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from functools import partial
from importlib import resources
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from toric_fsig.cone_geometry import HPolyhedron, VPolyhedron, hull_to_halfspaces
from toric_fsig.config import WORKERS_ENV_VAR, get_settings
from toric_fsig.exceptions import (
    IntegralityError,
    InvalidInputError,
)
from toric_fsig.fsignature import (
    ToricRing,
    TorusDivisor,
    TripleProblem,
    build_p_polytope,
    f_signature,
    f_signature_pair,
    f_signature_triple,
    newton_polyhedron,
    product_ring,
    require_character_lattice,
    require_full_dimensional,
    singh_count,
    singh_ring,
    triple_polytope,
)
from toric_fsig.lattice_core import IntVector, dot, format_rational, parse_rational
from toric_fsig.polytope_engine import (
    HalfOpenPolytope,
    count_scaled_lattice_points,
    lattice_box,
    product_polytope,
    vertices,
    volume,
)

logger = logging.getLogger(__name__)


class Check(BaseModel):
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    name: str
    passed: bool = Field(alias="pass")


class OracleReport(BaseModel):
    """Counts at each q next to the volume they should converge to."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: str
    q_values: list[int]
    counts: list[int]
    reference_counts: list[int] = []
    normalized: list[Fraction]
    target: Fraction
    max_deviation: Fraction
    fitted_constant: Fraction
    deviation_nonincreasing: bool
    radius: int | None = None
    checks: list[Check] = []
    passed: bool

    @field_validator("normalized", mode="before")
    @classmethod
    def _parse_list(cls, value: Any) -> list[Fraction]:
        return [parse_rational(a) for a in value]

    @field_validator("target", "max_deviation", "fitted_constant", mode="before")
    @classmethod
    def _parse_value(cls, value: Any) -> Fraction:
        return parse_rational(value)

    @field_serializer("normalized")
    def _format_list(self, value: list[Fraction]) -> list[str]:
        return [format_rational(a) for a in value]

    @field_serializer("target", "max_deviation", "fitted_constant")
    def _format_value(self, value: Fraction) -> str:
        return format_rational(value)


def build_report(
    mode: str,
    q_values: Sequence[int],
    counts: Sequence[int],
    target: Fraction,
    dimension: int,
    reference_counts: Sequence[int] = (),
    radius: int | None = None,
    checks: Sequence[Check] = (),
) -> OracleReport:
    """
    Assemble a report; it passes when every check passes. The fitted
    constant is the smallest C with |count/q^n - target| <= C/q over every tested q.
    """
    normalized = [Fraction(c, q**dimension) for q, c in zip(q_values, counts, strict=True)]
    deviations = [abs(x - target) for x in normalized]
    ordered = sorted(zip(q_values, deviations))
    nonincreasing = all(a >= b for (_, a), (_, b) in itertools.pairwise(ordered))
    return OracleReport(
        mode=mode,
        q_values=list(q_values),
        counts=list(counts),
        reference_counts=list(reference_counts),
        normalized=normalized,
        target=target,
        max_deviation=max(deviations, default=Fraction(0)),
        fitted_constant=max((q * d for q, d in ordered), default=Fraction(0)),
        deviation_nonincreasing=nonincreasing,
        radius=radius,
        checks=list(checks),
        passed=all(c.passed for c in checks),
    )


def _check_q(q: int) -> None:
    if q < 1:
        raise InvalidInputError(f"q must be a positive integer, got {q}")


def _maximal_pairings(pairings: set[IntVector]) -> list[IntVector]:
    """Pareto-maximal vectors; a vector dominated componentwise can never witness more."""
    kept: list[IntVector] = []
    for p in sorted(pairings, key=lambda x: (-sum(x), x)):
        if not any(all(a >= b for a, b in zip(k, p)) for k in kept):
            kept.append(p)
    return kept


def bruteforce_free_generators(
    ring: ToricRing, q: int, search_radius: int, divisor: TorusDivisor | None = None
) -> int:
    """
    Count free generators of R^{1/q} (of R(qD)^{1/q} with a divisor) directly
    Args:
        ring: toric ring with a full-dimensional cone
        q: positive integer
        search_radius: bound on the coordinates of the witnesses k
        divisor: optional effective divisor over M

    Returns:
        #{v in sigma^dual & (1/q)L : no k in L outside sigma^dual within the
        radius has (v + k).v_i >= -a_i for all i}. A small radius can only
        overcount.

    Raises:
        NotFullDimensionalError: if the cone has torus factors
        InvalidInputError: if q or search_radius is not positive
    """
    _check_q(q)
    if search_radius < 1:
        raise InvalidInputError(f"search radius must be positive, got {search_radius}")
    cone = ring.reduced_cone()
    require_full_dimensional(cone)
    if divisor is not None:
        require_character_lattice(ring, "pairs")
    lattice = build_p_polytope(ring).lattice
    # pairings of the lattice basis with each ray: v.v_i = c.r_i / q
    rays = [tuple(int(dot(b, v)) for b in lattice.basis) for v in cone.rays]
    shifts = [q * a for a in divisor.coefficients] if divisor else [Fraction(0)] * len(rays)

    pairings = set()
    for k in itertools.product(range(-search_radius, search_radius + 1), repeat=ring.rank):
        pairing = tuple(int(dot(k, r)) for r in rays)
        if min(pairing) < 0:
            pairings.add(pairing)
    witnesses = _maximal_pairings(pairings)

    box = lattice_box(vertices(build_p_polytope(ring)), lattice, q)
    count = 0
    for c in itertools.product(*(range(lo - q, hi + q + 1) for lo, hi in box)):
        values = [dot(c, r) for r in rays]
        if min(values) < 0:
            continue
        if not any(
            all(x + q * w >= -s for x, w, s in zip(values, witness, shifts))
            for witness in witnesses
        ):
            count += 1
    logger.debug("free generators at q=%d, radius %d: %d", q, search_radius, count)
    return count


def _scaled_points(polytope: HalfOpenPolytope, q: int, closed: bool = False) -> list[IntVector]:
    """Integer c with c/q in the polytope (or its closure); the lattice is Z^n."""
    points = vertices(polytope)
    if not points:
        return []
    base = polytope.base.closure() if closed else polytope.base
    box = lattice_box(points, polytope.lattice, q)
    return [
        c
        for c in itertools.product(*(range(lo, hi + 1) for lo, hi in box))
        if base.contains([Fraction(a, q) for a in c])
    ]


def bruteforce_triple_count(problem: TripleProblem, q: int) -> tuple[int, int]:
    """
    The counts a_q^a and a'_q whose difference vanishes in the limit
    Args:
        problem: triple over M with a full-dimensional cone
        q: positive integer with q*t and every q*a_i integral

    Returns:
        Tuple[
            #((P^D & (1/q)M) - (t*Newt(a) & (1/q)M)) & sigma^dual,
            count of (1/q)M points of (P^D - t*Newt(a)) & sigma^dual
        ]

    Raises:
        IntegralityError: if q*t or some q*a_i is not an integer
    """
    _check_q(q)
    if (q * problem.t).denominator != 1 or any(
        (q * a).denominator != 1 for a in problem.divisor.coefficients
    ):
        raise IntegralityError(f"q = {q} does not clear the denominators of t and D")
    p = build_p_polytope(problem.ring, problem.divisor)
    rays = problem.ring.reduced_cone().rays
    xs = _scaled_points(p, q)
    # y = x - s with s in sigma^dual keeps y inside the closure of P^D
    newton = hull_to_halfspaces(newton_polyhedron(problem.ideal, problem.ring)).scaled(problem.t)
    ys = [y for y in _scaled_points(p, q, closed=True) if newton.contains([Fraction(a, q) for a in y])]
    differences: set[IntVector] = set()
    for x in xs:
        for y in ys:
            d = tuple(a - b for a, b in zip(x, y))
            if all(dot(v, d) >= 0 for v in rays):
                differences.add(d)
    a_frak = len(differences)
    a_prime = count_scaled_lattice_points(triple_polytope(problem), q)
    logger.debug("triple counts at q=%d: %d <= %d", q, a_frak, a_prime)
    return a_frak, a_prime


def _cell_bounds(p: HalfOpenPolytope, q: int) -> tuple[Fraction, Fraction]:
    """
    Volumes of p shrunk and grown by one cell of (1/q)*p.lattice

    Every counted point owns the cell c/q + (1/q)*Pi, Pi the fundamental
    parallelepiped of the basis. The cells of counted points cover the
    shrunk polytope and lie inside the grown one, so count/q^n is between
    the two volumes.
    """
    points = vertices(p)
    if not points:
        return Fraction(0), Fraction(0)
    n = p.ambient_rank
    if n == 0:
        return Fraction(1), Fraction(1)
    basis = p.lattice.basis
    corners = [
        tuple(Fraction(sum(t * b[j] for t, b in zip(ts, basis)), q) for j in range(n))
        for ts in itertools.product((0, 1), repeat=len(basis))
    ]
    grown = VPolyhedron(
        ambient_rank=n,
        vertices=[tuple(a + c for a, c in zip(v, corner)) for v in points for corner in corners],
    )
    shrunk = HPolyhedron(
        ambient_rank=n,
        inequalities=tuple(
            i.model_copy(
                update={"offset": i.offset + max(dot(i.normal, c) for c in corners), "strict": False}
            )
            for i in p.base.inequalities
        ),
    )
    return (
        volume(HalfOpenPolytope(base=shrunk, lattice=p.lattice)),
        volume(HalfOpenPolytope(base=hull_to_halfspaces(grown), lattice=p.lattice)),
    )


def ehrhart_convergence(p: HalfOpenPolytope, q_values: Sequence[int]) -> OracleReport:
    """
    Normalized lattice-point counts of p against its volume
    Args:
        p: bounded half-open polytope
        q_values: positive integers

    Returns:
        Report with C fitted over the whole range, so that
        |count/q^n - volume| <= C/q at every tested q. Its check requires
        count/q^n to lie between the volumes of p shrunk and grown by one
        lattice cell, a bound that is itself O(1/q).
    """
    n = p.ambient_rank
    target = volume(p)
    counts = [count_scaled_lattice_points(p, q) for q in q_values]
    within = True
    for q, c in zip(q_values, counts):
        low, high = _cell_bounds(p, q)
        within = within and low <= Fraction(c, q**n) <= high
    return build_report(
        "ehrhart",
        q_values,
        counts,
        target,
        n,
        checks=[Check(name="count within one lattice cell of the volume", passed=within)],
    )


def _radius_checks(counts: Sequence[int], reference: Sequence[int], doubled: Sequence[int]) -> list[Check]:
    return [
        Check(name="oracle matches polytope count", passed=list(counts) == list(reference)),
        Check(name="stable under doubling the radius", passed=list(counts) == list(doubled)),
    ]


def plain_report(ring: ToricRing, q_values: Sequence[int], radius: int) -> OracleReport:
    result = f_signature(ring)
    counts = [bruteforce_free_generators(ring, q, radius) for q in q_values]
    doubled = [bruteforce_free_generators(ring, q, 2 * radius) for q in q_values]
    reference = [count_scaled_lattice_points(result.polytope, q) for q in q_values]
    return build_report(
        "plain",
        q_values,
        counts,
        result.value,
        ring.rank,
        reference_counts=reference,
        radius=radius,
        checks=_radius_checks(counts, reference, doubled),
    )


def pair_report(
    ring: ToricRing, divisor: TorusDivisor, q_values: Sequence[int], radius: int
) -> OracleReport:
    result = f_signature_pair(ring, divisor)
    counts = [bruteforce_free_generators(ring, q, radius, divisor) for q in q_values]
    doubled = [bruteforce_free_generators(ring, q, 2 * radius, divisor) for q in q_values]
    reference = [count_scaled_lattice_points(result.polytope, q) for q in q_values]
    return build_report(
        "pair",
        q_values,
        counts,
        result.value,
        ring.rank,
        reference_counts=reference,
        radius=radius,
        checks=_radius_checks(counts, reference, doubled),
    )


def triple_report(
    problem: TripleProblem, q_values: Sequence[int], reflection_check: bool = True
) -> OracleReport:
    """
    The a_q^a counts against the triple volume; a'_q are the reference counts.
    The gap (a'_q - a_q)/q^n must not grow and must stay below 4B/q, B being
    the boundary constant max q*(grown - shrunk volume) of P^D over the range.
    """
    value = f_signature_triple(problem, reflection_check=reflection_check).value
    pairs = [bruteforce_triple_count(problem, q) for q in q_values]
    n = problem.ring.rank
    ordered = sorted(zip(q_values, pairs, strict=True))
    gaps = [(q, Fraction(b - a, q**n)) for q, (a, b) in ordered]
    p = build_p_polytope(problem.ring, problem.divisor)
    boundary = Fraction(0)
    for q in q_values:
        low, high = _cell_bounds(p, q)
        boundary = max(boundary, q * (high - low))
    checks = [
        Check(name="a_q <= a'_q", passed=all(a <= b for a, b in pairs)),
        Check(
            name="(a'_q - a_q)/q^n nonincreasing",
            passed=all(x >= y for (_, x), (_, y) in itertools.pairwise(gaps)),
        ),
        Check(
            name="(a'_q - a_q)/q^n <= 4B/q",
            passed=all(gap <= 4 * boundary / q for q, gap in gaps),
        ),
    ]
    logger.debug("triple gaps %s against boundary constant %s", gaps, boundary)
    return build_report(
        "triple",
        q_values,
        [a for a, _ in pairs],
        value,
        n,
        reference_counts=[b for _, b in pairs],
        checks=checks,
    )


def singh_report(
    generators: Sequence[Sequence[int]], ambient_rank: int, q_values: Sequence[int]
) -> OracleReport:
    ring = singh_ring(generators, ambient_rank)
    result = f_signature(ring)
    counts = [singh_count(generators, ambient_rank, q) for q in q_values]
    reference = [count_scaled_lattice_points(result.polytope, q) for q in q_values]
    return build_report(
        "singh",
        q_values,
        counts,
        result.value,
        ambient_rank,
        reference_counts=reference,
        checks=[Check(name="singh count matches polytope count", passed=counts == reference)],
    )


def product_check(ring1: ToricRing, ring2: ToricRing) -> bool:
    """f_signature(sigma1 x sigma2) == f_signature(sigma1) * f_signature(sigma2)."""
    product = f_signature(product_ring(ring1, ring2)).value
    return product == f_signature(ring1).value * f_signature(ring2).value


def product_report(ring1: ToricRing, ring2: ToricRing, q_values: Sequence[int]) -> OracleReport:
    first, second = f_signature(ring1), f_signature(ring2)
    result = f_signature(product_ring(ring1, ring2))
    factors = product_polytope(first.polytope, second.polytope)
    counts = [count_scaled_lattice_points(result.polytope, q) for q in q_values]
    reference = [count_scaled_lattice_points(factors, q) for q in q_values]
    return build_report(
        "product",
        q_values,
        counts,
        result.value,
        result.polytope.ambient_rank,
        reference_counts=reference,
        checks=[
            Check(name="product formula", passed=product_check(ring1, ring2)),
            Check(name="product polytope counts", passed=counts == reference),
        ],
    )


class CorpusEntry(BaseModel):
    name: str
    rays: list[list[int]]


class Corpus(BaseModel):
    cones: list[CorpusEntry]


def load_corpus() -> dict[str, ToricRing]:
    """The checked-in oracle corpus, by name."""
    text = resources.files("toric_fsig").joinpath("data/corpus.json").read_text(encoding="utf-8")
    corpus = Corpus.model_validate_json(text)
    return {entry.name: ToricRing.of(entry.rays) for entry in corpus.cones}


def _serial_counting() -> None:
    # corpus workers count in-process rather than starting pools of their own
    os.environ[WORKERS_ENV_VAR] = "1"


def run_corpus(q_values: Sequence[int], radius: int) -> dict[str, OracleReport]:
    """plain_report for every corpus cone, spread over up to TORIC_FSIG_THREADS processes."""
    corpus = load_corpus()
    workers = get_settings().workers
    run = partial(plain_report, q_values=list(q_values), radius=radius)
    if workers == 1:
        return {name: run(ring) for name, ring in corpus.items()}
    with ProcessPoolExecutor(max_workers=workers, initializer=_serial_counting) as pool:
        return dict(zip(corpus, pool.map(run, corpus.values())))
