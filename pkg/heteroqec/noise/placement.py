from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from ..codes import CodeInstance
from ..exceptions import ParameterError


class Strategy(Enum):
    BULK_NOISY = 'BulkNoisy'
    BOUNDARY_NOISY = 'BoundaryNoisy'
    RANDOM = 'Random'

    @staticmethod
    def parse(value) -> 'Strategy':
        if isinstance(value, Strategy):
            return value
        for strategy in Strategy:
            if str(value).replace('-', '').replace('_', '').lower() == strategy.value.lower():
                return strategy
        raise ParameterError(f'unknown placement strategy {value!r}')


class QubitType(Enum):
    # noisy in Regime A, low-bias in Regime B
    TYPE_A = 'A'
    # quiet in Regime A, high-bias in Regime B
    TYPE_B = 'B'


@dataclass(frozen=True)
class PlacementSpec:
    strategy: Strategy
    noisy_count: Optional[int] = None
    seed: int = 0

    def count_for(self, n: int) -> int:
        count = (n + 1) // 2 if self.noisy_count is None else self.noisy_count
        if not 0 <= count <= n:
            raise ParameterError(f'noisy_count {count} outside [0, {n}]')
        return count


def placement_order(code: CodeInstance, spec: PlacementSpec) -> list:
    """Qubit indices in fill order: the first `noisy_count` receive TYPE_A."""
    if spec.strategy is Strategy.RANDOM:
        return [int(q) for q in np.random.default_rng(spec.seed).permutation(code.n)]
    sign = -1 if spec.strategy is Strategy.BULK_NOISY else 1
    return sorted(range(code.n), key=lambda q: (sign * code.geometry[q].degree, code.geometry[q].row,
                                                code.geometry[q].col))


def assign_placement(code: CodeInstance, spec: PlacementSpec) -> Tuple[QubitType, ...]:
    count = spec.count_for(code.n)
    types = [QubitType.TYPE_B] * code.n
    for q in placement_order(code, spec)[:count]:
        types[q] = QubitType.TYPE_A
    return tuple(types)
