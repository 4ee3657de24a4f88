from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict

from ..exceptions import ParameterError


class Region(Enum):
    CORNER = 'corner'
    EDGE = 'edge'
    BULK = 'bulk'

    @staticmethod
    def from_degree(degree: int) -> 'Region':
        try:
            return _REGION_BY_DEGREE[degree]
        except KeyError:
            raise ParameterError(f'no region for stabilizer degree {degree}')


_REGION_BY_DEGREE = {2: Region.CORNER, 3: Region.EDGE, 4: Region.BULK}


@dataclass(frozen=True)
class QubitGeometry:
    row: int
    col: int
    degree: int

    @property
    def coord(self):
        return self.row, self.col

    @property
    def region(self) -> Region:
        return Region.from_degree(self.degree)

    @property
    def as_dict(self):
        return {'row': self.row, 'col': self.col, 'degree': self.degree, 'region': self.region.value}


def check_distance(d) -> int:
    if not isinstance(d, int) or isinstance(d, bool):
        raise ParameterError(f'code distance must be an integer, not {d!r}')
    if d < 3 or d % 2 == 0:
        raise ParameterError(f'code distance must be odd and at least 3, not {d}')
    return d


def expected_region_sizes(d: int) -> Dict[Region, int]:
    check_distance(d)
    return {Region.BULK: (d - 2) ** 2, Region.EDGE: 4 * (d - 2), Region.CORNER: 4}


def stabilizer_ratio(d: int) -> Fraction:
    """The published closed form 4(d-1)/(3d-2) for bulk-average over boundary-average degree.

    It takes the boundary average as (3d-2)/(d-1); counting 4(d-2) edges of degree 3 and four
    corners of degree 2 actually gives (3d-4)/(d-1), see `degree_ratio`. Both tend to 4/3.
    """
    check_distance(d)
    return Fraction(4 * (d - 1), 3 * d - 2)


def degree_ratio(d: int) -> Fraction:
    """Bulk-average over boundary-average degree as the lattice census gives it, 4(d-1)/(3d-4)."""
    check_distance(d)
    return Fraction(4 * (d - 1), 3 * d - 4)


def census_ratio(degrees) -> Fraction:
    """Bulk-average over boundary-average degree from an explicit list of qubit degrees."""
    census = Counter(degrees)
    bulk = [degree for degree in census.elements() if degree == 4]
    boundary = [degree for degree in census.elements() if degree < 4]
    if not bulk or not boundary:
        raise ParameterError('census needs both bulk and boundary qubits')
    return Fraction(sum(bulk), len(bulk)) / Fraction(sum(boundary), len(boundary))


def boundary_fraction(d: int) -> Fraction:
    check_distance(d)
    return Fraction(4 * (d - 1), d * d)
