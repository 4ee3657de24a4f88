import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

from ..constants import TIE_BREAK_ORDER
from ..exceptions import ParameterError
from ..pauli import PauliOp, Letter

CLASS_ORDER = (Letter.I, Letter.X, Letter.Y, Letter.Z)


class Method(Enum):
    EXACT = 'exact'
    TN = 'tn'

    @staticmethod
    def parse(value) -> 'Method':
        if isinstance(value, Method):
            return value
        try:
            return Method(str(value).lower())
        except ValueError:
            raise ParameterError(f'unknown decoding method {value!r}, expected exact or tn')


@dataclass(frozen=True)
class CosetLikelihoods:
    """Log coset probabilities in class order (I, X, Y, Z), up to a common additive constant."""
    log_pi: Tuple[float, float, float, float]
    method: Method
    chi: Optional[int] = None
    discarded_weight: float = 0.0

    def __getitem__(self, letter) -> float:
        return self.log_pi[CLASS_ORDER.index(Letter(letter))]

    def best(self) -> Letter:
        best = None
        for letter in map(Letter, TIE_BREAK_ORDER):
            if best is None or self[letter] > self[best]:
                best = letter
        return best

    def margin(self) -> float:
        """Gap between the chosen class and the runner-up; ties give 0."""
        best = self[self.best()]
        runner_up = max(value for letter, value in zip(CLASS_ORDER, self.log_pi) if letter is not self.best())
        if runner_up == -math.inf:
            return math.inf if best > -math.inf else 0.0
        return best - runner_up

    def differences(self) -> Tuple[float, ...]:
        """log_pi relative to the I class; -inf stays -inf."""
        reference = self[Letter.I]
        if reference == -math.inf:
            return tuple(-math.inf if value == -math.inf else math.inf for value in self.log_pi)
        return tuple(value - reference for value in self.log_pi)

    @property
    def as_dict(self):
        return {
            'log_pi': {letter.value: _finite_or_str(value) for letter, value in zip(CLASS_ORDER, self.log_pi)},
            'method': self.method.value,
            'chi': self.chi,
            'discarded_weight': self.discarded_weight,
        }


@dataclass(frozen=True)
class Correction:
    op: PauliOp
    chosen_class: Letter
    likelihoods: CosetLikelihoods

    @property
    def as_dict(self):
        return {
            'chosen_class': self.chosen_class.value,
            'correction': str(self.op),
            **self.likelihoods.as_dict,
        }


def _finite_or_str(value: float):
    return value if math.isfinite(value) else str(value)
