import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from ..exceptions import ParameterError
from ..helpers import parse_bias, format_bias

Bias = Union[Fraction, float]


@dataclass(frozen=True)
class BiasedChannel:
    """(1 - p) rho + p (eta/(1+eta) Z rho Z + (X rho X + Y rho Y) / (2 (1 + eta)))."""
    p: float
    eta: Bias

    @property
    def p_x(self) -> float:
        if self.eta == math.inf:
            return 0.0
        return self.p / (2 * (1 + float(self.eta)))

    @property
    def p_y(self) -> float:
        return self.p_x

    @property
    def p_z(self) -> float:
        if self.eta == math.inf:
            return self.p
        eta = float(self.eta)
        return self.p * eta / (1 + eta)

    def probabilities(self) -> np.ndarray:
        """Probabilities indexed by letter code x | z << 1: [I, X, Z, Y]."""
        return np.array([1 - self.p, self.p_x, self.p_z, self.p_y])

    @property
    def as_dict(self):
        return {'p': self.p, 'eta': format_bias(self.eta), 'p_x': self.p_x, 'p_y': self.p_y, 'p_z': self.p_z}


def make_channel(p, eta) -> BiasedChannel:
    try:
        p = float(p)
        eta = eta if eta == math.inf else parse_bias(eta)
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise ParameterError(f'invalid channel parameters p={p!r}, eta={eta!r}: {e}')
    if not 0 <= p <= 1:
        raise ParameterError(f'error probability must lie in [0, 1], not {p}')
    if not eta > 0:
        raise ParameterError(f'bias must be positive or inf, not {eta}')
    return BiasedChannel(p, eta)
