import csv
import json
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, asdict, fields
from multiprocessing import Pool
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pickledb
from icecream import ic
from scipy.stats import norm
from tqdm import tqdm

from .codes import CodeInstance, build_code, syndrome, logical_class
from .config import ExperimentConfig, placement_label
from .constants import CSV_COLUMNS, DEFAULT_CHI, VERSION, WILSON_CONFIDENCE
from .decoder import Decoder, Method
from .exceptions import DecoderError, HeteroQECError, ParameterError, ConfigError
from .helpers import dumps
from .noise import NoiseModel, RegimeKind, Strategy, build_noise_model, point_key, trial_stream, sample_error
from .pauli import Letter, multiply

_print = print
print = ic

NO_PLACEMENT_LABEL = 3


@dataclass(frozen=True)
class Tally:
    trials: int = 0
    fail_x: int = 0
    fail_y: int = 0
    fail_z: int = 0

    def __add__(self, other: 'Tally') -> 'Tally':
        return Tally(self.trials + other.trials, self.fail_x + other.fail_x, self.fail_y + other.fail_y,
                     self.fail_z + other.fail_z)

    @property
    def failures(self) -> int:
        return self.fail_x + self.fail_y + self.fail_z


@dataclass(frozen=True)
class ExperimentPoint:
    regime: str
    placement: str
    deformation: str
    d: int
    eta_low: str
    eta_high: str
    p_quiet: float
    p_noisy: float
    p: float
    chi: object
    trials: int
    fail_x: int
    fail_y: int
    fail_z: int
    seed: int

    def __post_init__(self):
        if self.trials < 1 or min(self.fail_x, self.fail_y, self.fail_z) < 0 or self.failures > self.trials:
            raise ParameterError(f'inconsistent tallies {self.fail_x}+{self.fail_y}+{self.fail_z} > {self.trials}')

    @property
    def failures(self) -> int:
        return self.fail_x + self.fail_y + self.fail_z

    @property
    def p_fail(self) -> float:
        return self.failures / self.trials

    @property
    def wilson(self) -> Tuple[float, float]:
        return wilson_interval(self.failures, self.trials)

    def rate(self, letter) -> float:
        return {Letter.X: self.fail_x, Letter.Y: self.fail_y, Letter.Z: self.fail_z}[Letter(letter)] / self.trials

    def merge(self, other: 'ExperimentPoint') -> 'ExperimentPoint':
        if self.key != other.key:
            raise ParameterError(f'cannot merge points {self.key} and {other.key}')
        return ExperimentPoint(**{
            **asdict(self), 'trials': self.trials + other.trials, 'fail_x': self.fail_x + other.fail_x,
            'fail_y': self.fail_y + other.fail_y, 'fail_z': self.fail_z + other.fail_z,
        })

    @property
    def key(self) -> tuple:
        return self.regime, self.placement, self.deformation, self.d, self.eta_low, self.eta_high, self.p

    @property
    def as_row(self) -> dict:
        lo, hi = self.wilson
        row = asdict(self)
        row.update(p_fail=self.p_fail, wilson_lo=lo, wilson_hi=hi)
        return {column: row[column] for column in CSV_COLUMNS}

    @property
    def as_dict(self):
        return self.as_row

    @staticmethod
    def from_row(row: dict) -> 'ExperimentPoint':
        names = {f.name for f in fields(ExperimentPoint)}
        return ExperimentPoint(**{key: value for key, value in row.items() if key in names})


def wilson_interval(k: int, n: int, conf: float = WILSON_CONFIDENCE) -> Tuple[float, float]:
    if n < 1 or not 0 <= k <= n:
        raise ParameterError(f'Wilson interval needs 0 <= k <= n and n >= 1, got k={k}, n={n}')
    if not 0 < conf < 1:
        raise ParameterError(f'confidence level must lie in (0, 1), not {conf}')
    z = norm.ppf(1 - (1 - conf) / 2)
    z2 = z * z
    center = (k + z2 / 2) / (n + z2)
    half = z * math.sqrt(k * (n - k) / n + z2 / 4) / (n + z2)
    lo = 0.0 if k == 0 else max(0.0, center - half)
    hi = 1.0 if k == n else min(1.0, center + half)
    return lo, hi


def _run_shard(args) -> Tuple[Tally, Optional[Tuple[int, str]]]:
    code, model, method, chi, key, start, stop, step = args
    decoder = Decoder(code, model, method, chi)
    counts = Counter()
    trials = 0
    for trial in range(start, stop, step):
        try:
            error = sample_error(model, trial_stream(key, trial))
            correction = decoder(syndrome(code, error))
            counts[logical_class(code, multiply(error, correction.op))] += 1
        except (HeteroQECError, ArithmeticError, np.linalg.LinAlgError) as e:
            return Tally(), (trial, f'{type(e).__name__}: {e}')
        trials += 1
    return Tally(trials, counts[Letter.X], counts[Letter.Y], counts[Letter.Z]), None


def run_trials(code: CodeInstance, model: NoiseModel, trials: int, key: np.ndarray, method='tn',
               chi: Optional[int] = DEFAULT_CHI, threads: int = 1, pool: Pool = None) -> Tally:
    """Tally logical failures over trials 0 .. trials - 1; shards split trials as start/step strides."""
    if trials < 1:
        raise ParameterError(f'a point needs at least one trial, not {trials}')
    shards = max(1, min(threads, trials))
    jobs = [(code, model, method, chi, key, start, trials, shards) for start in range(shards)]
    if pool is not None and shards > 1:
        results = pool.map(_run_shard, jobs)
    else:
        results = [_run_shard(job) for job in jobs]
    failures = [failure for _, failure in results if failure is not None]
    if failures:
        trial, message = min(failures)
        raise DecoderError(message, trial)
    total = Tally()
    for tally, _ in results:
        total = total + tally
    return total


def run_point(code: CodeInstance, model: NoiseModel, p: float, trials: int, chi: Optional[int] = DEFAULT_CHI,
              seed: int = 0, method='tn', labels: Sequence[int] = (), threads: int = 1,
              pool: Pool = None) -> ExperimentPoint:
    method = Method.parse(method)
    key = point_key(seed, code.d, *labels)
    tally = run_trials(code, model, trials, key, method, chi, threads, pool)
    columns = model.regime.columns()
    return ExperimentPoint(
        regime=model.regime.kind.value,
        placement=placement_label(None if model.regime.kind is RegimeKind.HOMOGENEOUS else model.placement.strategy),
        deformation=code.deformation.value,
        d=code.d,
        p=p,
        chi='exact' if method is Method.EXACT else chi,
        trials=tally.trials,
        fail_x=tally.fail_x,
        fail_y=tally.fail_y,
        fail_z=tally.fail_z,
        seed=seed,
        **columns,
    )


@dataclass(frozen=True)
class RatioEntry:
    d: int
    ratio: Optional[float]
    sigma: Optional[float]
    # None for a two-sided estimate, else 'lower', 'upper' or 'undetermined'
    bound: Optional[str] = None

    @property
    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class RatioSeries:
    entries: Tuple[RatioEntry, ...]

    @property
    def distances(self) -> List[int]:
        return [entry.d for entry in self.entries]

    def __getitem__(self, d: int) -> RatioEntry:
        for entry in self.entries:
            if entry.d == d:
                return entry
        raise KeyError(d)

    @property
    def as_dict(self):
        return {'entries': [entry.as_dict for entry in self.entries]}


def _by_distance(points: Iterable[ExperimentPoint]) -> Dict[int, ExperimentPoint]:
    res = {}
    for point in points:
        res[point.d] = res[point.d].merge(point) if point.d in res else point
    return res


def improvement_ratio(points_boundary: Iterable[ExperimentPoint],
                      points_bulk: Iterable[ExperimentPoint]) -> RatioSeries:
    """p_L(BoundaryNoisy) / p_L(BulkNoisy) per distance, with independent-binomial error propagation."""
    boundary, bulk = _by_distance(points_boundary), _by_distance(points_bulk)
    if set(boundary) != set(bulk):
        raise ParameterError(f'distance sets differ: {sorted(boundary)} vs {sorted(bulk)}')
    entries = []
    for d in sorted(boundary):
        num, den = boundary[d], bulk[d]
        if num.failures and den.failures:
            ratio = num.p_fail / den.p_fail
            relative = math.sqrt((1 - num.p_fail) / num.failures + (1 - den.p_fail) / den.failures)
            entries.append(RatioEntry(d, ratio, ratio * relative))
        elif num.failures:
            entries.append(RatioEntry(d, num.p_fail / wilson_interval(0, den.trials)[1], None, 'lower'))
        elif den.failures:
            entries.append(RatioEntry(d, wilson_interval(0, num.trials)[1] / den.p_fail, None, 'upper'))
        else:
            entries.append(RatioEntry(d, None, None, 'undetermined'))
    return RatioSeries(tuple(entries))


@dataclass(frozen=True)
class LogicalBias:
    eta_l: float
    lo: float
    hi: float
    # None when both tallies are nonzero
    bound: Optional[str] = None

    @property
    def as_dict(self):
        return asdict(self)


def logical_bias(point: ExperimentPoint, conf: float = WILSON_CONFIDENCE) -> LogicalBias:
    """eta_L = fail_z / (fail_x + fail_y); the interval combines the Wilson bounds of both counts."""
    n = point.trials
    num, den = point.fail_z, point.fail_x + point.fail_y
    num_lo, num_hi = wilson_interval(num, n, conf)
    den_lo, den_hi = wilson_interval(den, n, conf)
    if den == 0:
        # one-sided: at most den_hi * n transverse failures were likely
        eta = num / (den_hi * n)
        return LogicalBias(eta, eta, math.inf, 'lower')
    eta = num / den
    return LogicalBias(eta, num_lo / den_hi, num_hi / den_lo, 'upper' if num == 0 else None)


def merge_points(points: Iterable[ExperimentPoint]) -> List[ExperimentPoint]:
    """Tally-merge points sharing (regime, placement, deformation, d, eta, p), keeping first-seen order."""
    merged = {}
    for point in points:
        merged[point.key] = merged[point.key].merge(point) if point.key in merged else point
    return list(merged.values())


@dataclass(frozen=True)
class PointTask:
    d: int
    placement: Optional[Strategy]
    p_index: int
    p: float
    trials: int

    @property
    def ledger_key(self) -> str:
        return f'{self.d}/{placement_label(self.placement)}/{self.p_index}'

    @property
    def seed_labels(self) -> Tuple[int, int]:
        placement = NO_PLACEMENT_LABEL if self.placement is None else list(Strategy).index(self.placement)
        return self.p_index, placement


def sweep_tasks(config: ExperimentConfig) -> List[PointTask]:
    return [
        PointTask(d, placement, p_index, p, config.trials_for(d, placement, p))
        for d in config.distances
        for placement in config.placements
        for p_index, p in enumerate(config.p_values)
    ]


class RunLedger:
    """Per-output record of the config, completed rows and failed points, persisted with pickledb."""

    def __init__(self, path: str):
        self.path = path
        if not os.path.exists(path):
            with open(path, 'w') as f:
                json.dump({}, f)
        self.db = pickledb.load(path, True)

    def open(self, config: ExperimentConfig) -> None:
        recorded = self.db.get('config_hash')
        if recorded and recorded != config.hash:
            raise ConfigError(f'{self.path} belongs to a different config ({recorded}); choose another output')
        if not recorded:
            self.db.set('config_hash', config.hash)
            self.db.set('config', config.as_dict)
            self.db.set('version', VERSION)
            self.db.set('completed', {})
            self.db.set('failed', {})

    @property
    def completed(self) -> dict:
        return self.db.get('completed') or {}

    @property
    def failed(self) -> dict:
        return self.db.get('failed') or {}

    def complete(self, task: PointTask, row: dict) -> None:
        completed = self.completed
        completed[task.ledger_key] = row
        self.db.set('completed', completed)
        failed = self.failed
        if failed.pop(task.ledger_key, None) is not None:
            self.db.set('failed', failed)

    def fail(self, task: PointTask, trial: Optional[int], message: str) -> None:
        failed = self.failed
        failed[task.ledger_key] = {'trial': trial, 'error': message}
        self.db.set('failed', failed)


def ledger_path(csv_path: str) -> str:
    return csv_path + '.ledger.json'


def write_rows(csv_path: str, tasks: Sequence[PointTask], rows: Dict[str, dict]) -> None:
    """Rewrite `csv_path` with every finished row, always in sweep order."""
    with open(csv_path, 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, lineterminator='\n')
        writer.writeheader()
        for task in tasks:
            if task.ledger_key in rows:
                writer.writerow(rows[task.ledger_key])


def sidecar_path(csv_path: str) -> str:
    return csv_path + '.json'


def write_sidecar(csv_path: str, config: ExperimentConfig) -> None:
    with open(sidecar_path(csv_path), 'w') as f:
        f.write(dumps({'config': config.as_dict, 'config_hash': config.hash, 'version': VERSION}))
        f.write('\n')


@dataclass
class SweepResult:
    points: List[ExperimentPoint]
    failed: Dict[str, dict]

    @property
    def ok(self) -> bool:
        return not self.failed


def sweep(config: ExperimentConfig, csv_path: str = None, threads: int = 1, progress: bool = False) -> SweepResult:
    """Run every (d, placement, p) point, rewriting `csv_path` in sweep order after each finished point.

    With an existing ledger for the same config, completed points are reused and only the rest run.
    """
    tasks = sweep_tasks(config)
    ledger = None
    completed = {}
    if csv_path is not None:
        ledger = RunLedger(ledger_path(csv_path))
        ledger.open(config)
        completed = ledger.completed
        write_sidecar(csv_path, config)
    codes = {d: build_code(d, config.deformation) for d in config.distances}

    points, failed = [], {}
    pool = Pool(threads) if threads > 1 else None
    try:
        if csv_path is not None:
            write_rows(csv_path, tasks, completed)
        for task in tqdm(tasks, disable=not progress, unit='point'):
            if task.ledger_key in completed:
                points.append(ExperimentPoint.from_row(completed[task.ledger_key]))
                continue
            code = codes[task.d]
            model = build_noise_model(code, config.regime_at(task.p), config.placement_spec(task.placement))
            start = time.time()
            try:
                point = run_point(code, model, task.p, task.trials, config.chi, config.seed, config.method,
                                  task.seed_labels, threads, pool)
            except DecoderError as e:
                print(f'point {task.ledger_key} failed at trial {e.trial}: {e}')
                failed[task.ledger_key] = {'trial': e.trial, 'error': str(e)}
                if ledger is not None:
                    ledger.fail(task, e.trial, str(e))
                continue
            print(f'point {task.ledger_key}: {point.failures}/{point.trials} failures in {time.time() - start:.1f}s')
            points.append(point)
            if ledger is not None:
                ledger.complete(task, point.as_row)
                completed[task.ledger_key] = point.as_row
                write_rows(csv_path, tasks, completed)
    finally:
        if pool is not None:
            pool.close()
            pool.join()
    return SweepResult(points, failed)
