import csv
from dataclasses import dataclass, replace, field
from enum import Enum
from functools import cached_property
from typing import Tuple, ClassVar, Union

import numpy as np

from .channel import BiasedChannel, Bias, make_channel
from .placement import PlacementSpec, QubitType, Strategy, assign_placement
from ..codes import CodeInstance
from ..constants import DEFAULT_RATIO, ETA_LOW
from ..exceptions import ParameterError
from ..helpers import format_bias
from ..pauli import PauliOp, bits_to_int


class RegimeKind(Enum):
    A = 'A'
    B = 'B'
    HOMOGENEOUS = 'homogeneous'


@dataclass(frozen=True)
class RegimeA:
    """Shared bias, total error rates p_noisy = ratio * p_quiet. The swept p is p_noisy."""
    p_noisy: float
    eta: Bias
    ratio: float = DEFAULT_RATIO
    kind: ClassVar[RegimeKind] = RegimeKind.A

    def channels(self) -> Tuple[BiasedChannel, BiasedChannel]:
        if not self.ratio >= 1:
            raise ParameterError(f'Regime A needs p_noisy / p_quiet >= 1, not {self.ratio}')
        return make_channel(self.p_noisy, self.eta), make_channel(self.p_quiet, self.eta)

    @property
    def p_quiet(self) -> float:
        return self.p_noisy / self.ratio

    def at(self, p: float) -> 'RegimeA':
        return replace(self, p_noisy=p)

    def columns(self) -> dict:
        eta = format_bias(self.eta)
        return {'eta_low': eta, 'eta_high': eta, 'p_quiet': self.p_quiet, 'p_noisy': self.p_noisy}


@dataclass(frozen=True)
class RegimeB:
    """Shared total error rate p; low-bias (TYPE_A) and high-bias (TYPE_B) qubits."""
    p: float
    eta_high: Bias
    eta_low: Bias = ETA_LOW
    kind: ClassVar[RegimeKind] = RegimeKind.B

    def channels(self) -> Tuple[BiasedChannel, BiasedChannel]:
        return make_channel(self.p, self.eta_low), make_channel(self.p, self.eta_high)

    def at(self, p: float) -> 'RegimeB':
        return replace(self, p=p)

    def columns(self) -> dict:
        return {'eta_low': format_bias(self.eta_low), 'eta_high': format_bias(self.eta_high), 'p_quiet': self.p,
                'p_noisy': self.p}


@dataclass(frozen=True)
class Homogeneous:
    p: float
    eta: Bias
    kind: ClassVar[RegimeKind] = RegimeKind.HOMOGENEOUS

    def channels(self) -> Tuple[BiasedChannel, BiasedChannel]:
        channel = make_channel(self.p, self.eta)
        return channel, channel

    def at(self, p: float) -> 'Homogeneous':
        return replace(self, p=p)

    def columns(self) -> dict:
        eta = format_bias(self.eta)
        return {'eta_low': eta, 'eta_high': eta, 'p_quiet': self.p, 'p_noisy': self.p}


Regime = Union[RegimeA, RegimeB, Homogeneous]


@dataclass(frozen=True)
class NoiseModel:
    channels: Tuple[BiasedChannel, ...]
    types: Tuple[QubitType, ...]
    regime: Regime
    placement: PlacementSpec = field(default_factory=lambda: PlacementSpec(Strategy.BULK_NOISY))

    @property
    def n(self) -> int:
        return len(self.channels)

    @cached_property
    def probability_table(self) -> np.ndarray:
        """(n, 4) probabilities indexed by letter code [I, X, Z, Y]."""
        return np.array([channel.probabilities() for channel in self.channels])

    @cached_property
    def log_table(self) -> np.ndarray:
        with np.errstate(divide='ignore'):
            return np.log(self.probability_table)

    @cached_property
    def _thresholds(self) -> np.ndarray:
        # cumulative X, X+Y, X+Y+Z per qubit
        table = self.probability_table
        return np.cumsum(np.stack([table[:, 1], table[:, 3], table[:, 2]], axis=1), axis=1)


def build_noise_model(code: CodeInstance, regime: Regime, placement: PlacementSpec) -> NoiseModel:
    type_a, type_b = regime.channels()
    types = assign_placement(code, placement)
    channels = tuple(type_a if qubit_type is QubitType.TYPE_A else type_b for qubit_type in types)
    return NoiseModel(channels, types, regime, placement)


def uniform_model(n: int, p: float, eta: Bias = 0.5) -> NoiseModel:
    channel = make_channel(p, eta)
    return NoiseModel((channel,) * n, (QubitType.TYPE_B,) * n, Homogeneous(p, channel.eta))


def point_key(seed: int, *labels: int) -> np.ndarray:
    """128-bit Philox key mixed from the experiment seed and the point labels by SeedSequence hashing."""
    return np.random.SeedSequence([seed, *labels]).generate_state(2, np.uint64)


def trial_stream(key: np.ndarray, trial: int) -> np.random.Generator:
    """Counter-based stream for one trial: Philox under the point key, counter word 1 set to the trial."""
    return np.random.Generator(np.random.Philox(key=key, counter=[0, trial, 0, 0]))


def sample_error(model: NoiseModel, rng: np.random.Generator) -> PauliOp:
    u = rng.random(model.n)
    thresholds = model._thresholds
    is_x = u < thresholds[:, 0]
    is_y = ~is_x & (u < thresholds[:, 1])
    is_z = ~is_x & ~is_y & (u < thresholds[:, 2])
    return PauliOp(bits_to_int(is_x | is_y), bits_to_int(is_y | is_z), model.n)


def channel_table(code: CodeInstance, model: NoiseModel) -> list:
    rows = []
    for q, (qubit, channel, qubit_type) in enumerate(zip(code.geometry, model.channels, model.types)):
        rows.append({
            'qubit': q, 'row': qubit.row, 'col': qubit.col, 'degree': qubit.degree, 'type': qubit_type.value,
            'p': channel.p, 'eta': format_bias(channel.eta), 'p_x': channel.p_x, 'p_y': channel.p_y,
            'p_z': channel.p_z,
        })
    return rows


def write_channel_table(path: str, code: CodeInstance, model: NoiseModel) -> None:
    rows = channel_table(code, model)
    with open(path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0]))
        writer.writeheader()
        writer.writerows(rows)


