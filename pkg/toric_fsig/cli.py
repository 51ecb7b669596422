"""
Command-line front end.

    toric-fsig compute problem.json [--pair | --triple] [--no-reflection-check] [--lattice-volume]
    toric-fsig verify problem.json --mode plain --q 2,4,8 [--radius 8]

Exit codes: 0 success, 1 a verification check failed, 2 invalid input,
3 a precondition of the requested computation does not hold.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path

from pydantic import (
    BaseModel,
    ConfigDict,
    StrictInt,
    StrictStr,
    ValidationError,
)

from toric_fsig.cone_geometry import Cone
from toric_fsig.config import get_settings
from toric_fsig.exceptions import (
    BaseToricFSignatureException,
    InvalidInputError,
    PreconditionError,
)
from toric_fsig.fsignature import (
    FSignatureResult,
    MonomialIdeal,
    ToricRing,
    TorusDivisor,
    TripleProblem,
    f_signature,
    f_signature_pair,
    f_signature_triple,
)
from toric_fsig.lattice_core import Lattice, format_rational, lattice_index, parse_rational
from toric_fsig.oracle import (
    Check,
    OracleReport,
    pair_report,
    plain_report,
    product_report,
    singh_report,
    triple_report,
)
from toric_fsig.polytope_engine import vertices, volume

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_PRECONDITION = 3

MODES = ("plain", "pair", "triple", "singh", "product")


class FactorFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rank: StrictInt
    rays: list[list[StrictInt]]
    lattice: list[list[StrictInt]] | None = None


class ProblemFile(FactorFile):
    """One problem; rationals are "num/den" strings or integers, never floats."""

    divisor: list[StrictStr | StrictInt] | None = None
    ideal: list[list[StrictInt]] | None = None
    t: StrictStr | StrictInt | None = None
    generators: list[list[StrictInt]] | None = None
    factors: list[FactorFile] | None = None


class RationalValue(BaseModel):
    num: int
    den: int


class ResultFile(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: RationalValue
    decimal: str
    polytope: list[list[str]]
    torus_rank: int
    qgorenstein: list[str] | None = None
    checks: list[Check] = []


def to_json(model: BaseModel) -> str:
    """Canonical rendering: sorted keys, two-space indentation."""
    return json.dumps(model.model_dump(mode="json", by_alias=True), sort_keys=True, indent=2)


def decimal_string(value: Fraction, digits: int = 20) -> str:
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(value.numerator) / Decimal(value.denominator))


def ring_from(problem: FactorFile) -> ToricRing:
    for ray in problem.rays:
        if len(ray) != problem.rank:
            raise InvalidInputError(f"ray {ray} does not have length {problem.rank}")
    sigma = Cone.from_generators(problem.rays, ambient_rank=problem.rank)
    sublattice = None
    if problem.lattice is not None:
        sublattice = Lattice(ambient_rank=problem.rank, basis=problem.lattice)
    return ToricRing(lattice=Lattice.standard(problem.rank), sigma=sigma, sublattice=sublattice)


def divisor_from(problem: ProblemFile, ring: ToricRing) -> TorusDivisor:
    if problem.divisor is None:
        return TorusDivisor.zero(len(ring.sigma.rays))
    if len(problem.divisor) != len(ring.sigma.rays):
        raise InvalidInputError(
            f"divisor has {len(problem.divisor)} coefficients but the cone has "
            f"{len(ring.sigma.rays)} extreme rays"
        )
    return TorusDivisor.of(problem.divisor)


def triple_from(problem: ProblemFile, ring: ToricRing) -> TripleProblem:
    if problem.ideal is None or problem.t is None:
        raise InvalidInputError("a triple needs both 'ideal' and 't'")
    return TripleProblem(
        ring=ring,
        divisor=divisor_from(problem, ring),
        ideal=MonomialIdeal(generators=tuple(tuple(g) for g in problem.ideal)),
        t=parse_rational(problem.t),
    )


def read_problem(path: Path) -> ProblemFile:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidInputError(f"cannot read {path}: {e}") from e
    return ProblemFile.model_validate_json(text)


def lattice_volume_check(ring: ToricRing, result: FSignatureResult) -> Check:
    """Vol_M(P) = [M:L] * Vol_L(P)."""
    polytope = result.polytope
    n = polytope.ambient_rank
    ambient = polytope.model_copy(update={"lattice": Lattice.standard(n)})
    index = lattice_index(polytope.lattice, Lattice.standard(n))
    return Check(name="lattice volume", passed=volume(ambient) == index * result.value)


def run_compute(args: argparse.Namespace) -> int:
    problem = read_problem(args.input)
    ring = ring_from(problem)
    if args.triple or (problem.ideal is not None and not args.pair):
        result = f_signature_triple(
            triple_from(problem, ring), reflection_check=not args.no_reflection_check
        )
    elif args.pair or problem.divisor is not None:
        result = f_signature_pair(ring, divisor_from(problem, ring))
    else:
        result = f_signature(ring)
    checks = [lattice_volume_check(ring, result)] if args.lattice_volume else []
    output = ResultFile(
        value=RationalValue(num=result.value.numerator, den=result.value.denominator),
        decimal=decimal_string(result.value),
        polytope=[[format_rational(a) for a in v] for v in vertices(result.polytope)],
        torus_rank=result.torus_rank,
        qgorenstein=(
            None
            if result.qgorenstein_vector is None
            else [format_rational(a) for a in result.qgorenstein_vector]
        ),
        checks=checks,
    )
    print(to_json(output))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def parse_q_values(text: str) -> list[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}") from e
    if not values or any(q < 1 for q in values):
        raise argparse.ArgumentTypeError("q values must be positive integers")
    return values


def run_verify(args: argparse.Namespace) -> int:
    problem = read_problem(args.input)
    q_values = args.q
    report: OracleReport
    if args.mode == "singh":
        if problem.generators is None:
            raise InvalidInputError("mode singh needs 'generators'")
        report = singh_report(problem.generators, problem.rank, q_values)
    elif args.mode == "product":
        if problem.factors is None or len(problem.factors) != 2:
            raise InvalidInputError("mode product needs exactly two 'factors'")
        report = product_report(
            ring_from(problem.factors[0]), ring_from(problem.factors[1]), q_values
        )
    else:
        ring = ring_from(problem)
        if args.mode == "plain":
            report = plain_report(ring, q_values, args.radius)
        elif args.mode == "pair":
            report = pair_report(ring, divisor_from(problem, ring), q_values, args.radius)
        else:
            report = triple_report(
                triple_from(problem, ring),
                q_values,
                reflection_check=not args.no_reflection_check,
            )
    print(to_json(report))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="toric-fsig", description="Exact F-signatures of affine toric rings, pairs and triples."
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level on stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    compute = subparsers.add_parser("compute", help="compute an F-signature")
    compute.add_argument("input", type=Path, help="problem file (JSON)")
    kind = compute.add_mutually_exclusive_group()
    kind.add_argument("--pair", action="store_true", help="treat the problem as a pair (R, D)")
    kind.add_argument("--triple", action="store_true", help="treat the problem as a triple (R, D, a^t)")
    compute.add_argument(
        "--no-reflection-check",
        action="store_true",
        help="skip the Q-Gorenstein reflection cross-check for triples",
    )
    compute.add_argument(
        "--lattice-volume",
        action="store_true",
        help="add the check Vol_M(P) = [M:L] Vol_L(P) to the result",
    )

    verify = subparsers.add_parser("verify", help="run a brute-force oracle against the volume")
    verify.add_argument("input", type=Path, help="problem file (JSON)")
    verify.add_argument("--mode", choices=MODES, required=True)
    verify.add_argument("--q", type=parse_q_values, default=[2, 4, 8], help="comma-separated q values")
    verify.add_argument("--radius", type=int, default=8, help="search radius of the plain and pair oracles")
    verify.add_argument("--no-reflection-check", action="store_true")
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    args = parse_args(argv)
    try:
        settings = get_settings()
    except BaseToricFSignatureException as e:
        print(f"toric-fsig: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.log_level,
        format="%(name)s:%(levelname)s:%(message)s",
        stream=sys.stderr,
    )
    try:
        if args.command == "compute":
            return run_compute(args)
        return run_verify(args)
    except ValidationError as e:
        logger.error("invalid problem file: %s", e)
        return EXIT_INVALID_INPUT
    except InvalidInputError as e:
        logger.error("invalid input: %s", e)
        return EXIT_INVALID_INPUT
    except PreconditionError as e:
        logger.error("precondition failed: %s", e)
        return EXIT_PRECONDITION
    except BaseToricFSignatureException as e:
        logger.error("%s", e)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
