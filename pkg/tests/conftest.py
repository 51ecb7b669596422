from fractions import Fraction

import pytest
from hypothesis import settings

from toric_fsig.cone_geometry import HPolyhedron, Inequality
from toric_fsig.fsignature import ToricRing
from toric_fsig.lattice_core import Lattice, hermite_basis
from toric_fsig.polytope_engine import HalfOpenPolytope

settings.register_profile("toric", max_examples=30, deadline=None)
settings.load_profile("toric")

QUADRIC_RAYS = [(0, 1), (2, -1)]
VERONESE_2 = [(2, 0), (1, 1), (0, 2)]


def orthant(n: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]


def half_open(
    rows: list[tuple[tuple[int, ...], Fraction | int, bool]],
    lattice: Lattice | None = None,
) -> HalfOpenPolytope:
    """Polytope from (normal, offset, strict) rows meaning normal.x >= offset (> if strict)."""
    n = len(rows[0][0])
    return HalfOpenPolytope(
        base=HPolyhedron(
            ambient_rank=n,
            inequalities=tuple(
                Inequality(normal=normal, offset=offset, strict=strict)
                for normal, offset, strict in rows
            ),
        ),
        lattice=lattice or Lattice.standard(n),
    )


def unit_box(n: int, lattice: Lattice | None = None) -> HalfOpenPolytope:
    """[0,1)^n."""
    rows = []
    for e in orthant(n):
        rows.append((e, 0, False))
        rows.append((tuple(-a for a in e), -1, True))
    return half_open(rows, lattice)


@pytest.fixture
def quadric() -> ToricRing:
    return ToricRing.of(QUADRIC_RAYS)


@pytest.fixture
def plane() -> ToricRing:
    return ToricRing.of(orthant(2))


@pytest.fixture
def veronese() -> ToricRing:
    return ToricRing.of(orthant(2), sublattice=hermite_basis(VERONESE_2))


@pytest.fixture
def quadric_polytope() -> HalfOpenPolytope:
    """0 <= y < 1, 0 <= 2x - y < 1."""
    return half_open(
        [
            ((0, 1), 0, False),
            ((0, -1), -1, True),
            ((2, -1), 0, False),
            ((-2, 1), -1, True),
        ]
    )


@pytest.fixture
def triangle() -> HalfOpenPolytope:
    """x, y >= 0, x + y < 1."""
    return half_open([((1, 0), 0, False), ((0, 1), 0, False), ((-1, -1), -1, True)])
