"""Experiment configuration files.

A config is a JSON object; `ExperimentConfig.from_dict` collects every problem it finds and raises a
single ConfigError listing all of them.
"""
import json
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .codes import Deformation, check_distance
from .constants import CONFIG_SCHEMA_VERSION, DEFAULT_CHI, DEFAULT_TRIALS, DEFAULT_RATIO, ETA_LOW, EXACT_MAX_D
from .decoder import Method
from .exceptions import ConfigError, HeteroQECError
from .helpers import parse_bias, format_bias, config_hash
from .noise import RegimeKind, RegimeA, RegimeB, Homogeneous, Strategy, PlacementSpec

_REGIME_KEYS = {
    RegimeKind.A: ({'eta'}, {'ratio'}),
    RegimeKind.B: ({'eta_high'}, {'eta_low'}),
    RegimeKind.HOMOGENEOUS: ({'eta'}, set()),
}
_COMMON_KEYS = {
    'schema_version', 'name', 'regime', 'deformation', 'distances', 'placements', 'noisy_count', 'placement_seed',
    'p_values', 'trials', 'trial_overrides', 'chi', 'method', 'seed', 'output',
}
_CHANNEL_KEYS = {'eta', 'ratio', 'eta_high', 'eta_low'}
_OVERRIDE_KEYS = {'d', 'placement', 'p', 'trials'}

NO_PLACEMENT = 'none'


@dataclass(frozen=True)
class TrialOverride:
    trials: int
    d: Optional[int] = None
    placement: Optional[Strategy] = None
    p: Optional[float] = None

    def matches(self, d: int, placement: Optional[Strategy], p: float) -> bool:
        return ((self.d is None or self.d == d) and (self.placement is None or self.placement is placement)
                and (self.p is None or math.isclose(self.p, p, rel_tol=1e-12, abs_tol=0)))

    @property
    def specificity(self) -> int:
        return sum(value is not None for value in (self.d, self.placement, self.p))

    @property
    def as_dict(self):
        res = {'trials': self.trials}
        if self.d is not None:
            res['d'] = self.d
        if self.placement is not None:
            res['placement'] = self.placement.value
        if self.p is not None:
            res['p'] = self.p
        return res


@dataclass(frozen=True)
class ExperimentConfig:
    regime: RegimeKind
    deformation: Deformation
    distances: Tuple[int, ...]
    p_values: Tuple[float, ...]
    placements: Tuple[Optional[Strategy], ...] = (None,)
    eta: object = None
    ratio: float = DEFAULT_RATIO
    eta_high: object = None
    eta_low: object = ETA_LOW
    noisy_count: Optional[int] = None
    placement_seed: Optional[int] = None
    trials: int = DEFAULT_TRIALS
    trial_overrides: Tuple[TrialOverride, ...] = ()
    chi: int = DEFAULT_CHI
    method: Method = Method.TN
    seed: int = 0
    output: Optional[str] = None
    name: Optional[str] = None
    schema_version: int = CONFIG_SCHEMA_VERSION
    source: dict = field(default=None, compare=False, repr=False)

    def regime_at(self, p: float):
        if self.regime is RegimeKind.A:
            return RegimeA(p, self.eta, self.ratio)
        if self.regime is RegimeKind.B:
            return RegimeB(p, self.eta_high, self.eta_low)
        return Homogeneous(p, self.eta)

    def placement_spec(self, strategy: Optional[Strategy]) -> PlacementSpec:
        if strategy is None:
            return PlacementSpec(Strategy.BULK_NOISY, 0)
        seed = self.seed if self.placement_seed is None else self.placement_seed
        return PlacementSpec(strategy, self.noisy_count, seed)

    def trials_for(self, d: int, placement: Optional[Strategy], p: float) -> int:
        best, trials = -1, self.trials
        for override in self.trial_overrides:
            if override.matches(d, placement, p) and override.specificity >= best:
                best, trials = override.specificity, override.trials
        return trials

    @property
    def as_dict(self):
        res = {
            'schema_version': self.schema_version,
            'regime': self.regime.value,
            'deformation': self.deformation.value,
            'distances': list(self.distances),
            'p_values': list(self.p_values),
            'trials': self.trials,
            'trial_overrides': [override.as_dict for override in self.trial_overrides],
            'chi': self.chi,
            'method': self.method.value,
            'seed': self.seed,
        }
        if self.regime is not RegimeKind.HOMOGENEOUS:
            res['placements'] = [placement.value for placement in self.placements]
            if self.noisy_count is not None:
                res['noisy_count'] = self.noisy_count
            if self.placement_seed is not None:
                res['placement_seed'] = self.placement_seed
        if self.regime is RegimeKind.A:
            res.update(eta=format_bias(self.eta), ratio=self.ratio)
        elif self.regime is RegimeKind.B:
            res.update(eta_high=format_bias(self.eta_high), eta_low=format_bias(self.eta_low))
        else:
            res['eta'] = format_bias(self.eta)
        if self.name is not None:
            res['name'] = self.name
        if self.output is not None:
            res['output'] = self.output
        return res

    @property
    def hash(self) -> str:
        """Hash of the result-determining fields; `output` and `name` do not enter it."""
        document = self.as_dict
        document.pop('output', None)
        document.pop('name', None)
        return config_hash(document)

    @staticmethod
    def from_dict(data) -> 'ExperimentConfig':
        problems = []
        if not isinstance(data, dict):
            raise ConfigError('config must be a JSON object')

        def check(key, parse, default=None, required=False):
            if key not in data:
                if required:
                    problems.append(f'missing required key {key!r}')
                return default
            try:
                return parse(data[key])
            except (HeteroQECError, ValueError, TypeError, ZeroDivisionError) as e:
                problems.append(f'{key}: {e}')
                return default

        schema_version = check('schema_version', _integer, CONFIG_SCHEMA_VERSION)
        if schema_version != CONFIG_SCHEMA_VERSION:
            problems.append(f'schema_version {schema_version} is not supported (expected {CONFIG_SCHEMA_VERSION})')
        regime = check('regime', _regime, required=True)
        deformation = check('deformation', Deformation.parse, Deformation.XY)
        distances = check('distances', lambda v: _list_of(v, _distance, allow_empty=False), (), required=True)
        p_values = check('p_values', lambda v: _list_of(v, _probability), (), required=True)
        trials = check('trials', _positive_integer, DEFAULT_TRIALS)
        chi = check('chi', _positive_integer, DEFAULT_CHI)
        method = check('method', Method.parse, Method.TN)
        seed = check('seed', _non_negative_integer, 0)
        noisy_count = check('noisy_count', _non_negative_integer)
        placement_seed = check('placement_seed', _non_negative_integer)
        overrides = check('trial_overrides', lambda v: _list_of(v, _override), ())
        output = check('output', _string)
        name = check('name', _string)

        for key in sorted(set(data) - _COMMON_KEYS - _CHANNEL_KEYS):
            problems.append(f'unknown key {key!r}')

        eta = ratio = eta_high = None
        eta_low = ETA_LOW
        placements = (None,)
        if regime is not None:
            required, optional = _REGIME_KEYS[regime]
            for key in sorted(_CHANNEL_KEYS - required - optional):
                if key in data:
                    problems.append(f'{key!r} does not apply to regime {regime.value}')
            if regime is RegimeKind.A:
                eta = check('eta', _bias, required=True)
                ratio = check('ratio', _ratio, float(DEFAULT_RATIO))
            elif regime is RegimeKind.B:
                eta_high = check('eta_high', _bias, required=True)
                eta_low = check('eta_low', _bias, ETA_LOW)
            else:
                eta = check('eta', _bias, required=True)
            if regime is RegimeKind.HOMOGENEOUS:
                for key in ('placements', 'noisy_count', 'placement_seed'):
                    if key in data:
                        problems.append(f'{key!r} does not apply to the homogeneous regime')
            else:
                placements = check('placements', lambda v: _list_of(v, Strategy.parse, allow_empty=False), (),
                                   required=True)
                if len(set(placements)) != len(placements):
                    problems.append('placements contains duplicates')

        if len(set(p_values)) != len(p_values):
            problems.append('p_values contains duplicates')
        if method is Method.EXACT and any(d > EXACT_MAX_D for d in distances):
            problems.append(f'method exact supports d <= {EXACT_MAX_D} only')

        if problems:
            raise ConfigError(problems)
        return ExperimentConfig(
            regime=regime, deformation=deformation, distances=tuple(distances), p_values=tuple(p_values),
            placements=tuple(placements), eta=eta, ratio=ratio if ratio is not None else DEFAULT_RATIO,
            eta_high=eta_high, eta_low=eta_low, noisy_count=noisy_count, placement_seed=placement_seed,
            trials=trials, trial_overrides=tuple(overrides), chi=chi, method=method, seed=seed, output=output,
            name=name, schema_version=schema_version, source=data,
        )

    @staticmethod
    def load(path: str) -> 'ExperimentConfig':
        try:
            with open(path) as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f'cannot read config {path}: {e.strerror}')
        except json.JSONDecodeError as e:
            raise ConfigError(f'{path}: invalid JSON at line {e.lineno}: {e.msg}')
        return ExperimentConfig.from_dict(data)


def placement_label(placement: Optional[Strategy]) -> str:
    return NO_PLACEMENT if placement is None else placement.value


def _integer(value) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f'expected an integer, got {value!r}')
    return value


def _positive_integer(value) -> int:
    if _integer(value) < 1:
        raise ValueError(f'expected a positive integer, got {value}')
    return value


def _non_negative_integer(value) -> int:
    if _integer(value) < 0:
        raise ValueError(f'expected a non-negative integer, got {value}')
    return value


def _string(value) -> str:
    if not isinstance(value, str):
        raise ValueError(f'expected a string, got {value!r}')
    return value


def _number(value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ValueError(f'expected a finite number, got {value!r}')
    return float(value)


def _probability(value) -> float:
    value = _number(value)
    if not 0 < value < 1:
        raise ValueError(f'p values must lie in (0, 1), got {value}')
    return value


def _ratio(value) -> float:
    value = _number(value)
    if value < 1:
        raise ValueError(f'ratio p_noisy / p_quiet must be at least 1, got {value}')
    return value


def _bias(value):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ValueError(f'bias must be a number or "inf", got {value!r}')
    eta = parse_bias(value)
    if not eta > 0:
        raise ValueError(f'bias must be positive, got {value!r}')
    return eta


def _distance(value) -> int:
    return check_distance(value)


def _regime(value) -> RegimeKind:
    try:
        return RegimeKind(value)
    except ValueError:
        raise ValueError(f'unknown regime {value!r}, expected one of {[kind.value for kind in RegimeKind]}')


def _list_of(value, parse, allow_empty: bool = True) -> list:
    if not isinstance(value, list):
        raise ValueError(f'expected a list, got {value!r}')
    if not value and not allow_empty:
        raise ValueError('must not be empty')
    return [parse(item) for item in value]


def _override(value) -> TrialOverride:
    if not isinstance(value, dict):
        raise ValueError(f'trial override must be an object, got {value!r}')
    unknown = set(value) - _OVERRIDE_KEYS
    if unknown:
        raise ValueError(f'unknown trial override keys {sorted(unknown)}')
    if 'trials' not in value:
        raise ValueError('trial override without "trials"')
    return TrialOverride(
        trials=_positive_integer(value['trials']),
        d=_distance(value['d']) if 'd' in value else None,
        placement=Strategy.parse(value['placement']) if 'placement' in value else None,
        p=_probability(value['p']) if 'p' in value else None,
    )
