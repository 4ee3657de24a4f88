import json
import math
from multiprocessing import Pool

import numpy as np
import pytest
from scipy.stats import binom, binomtest

from heteroqec.codes import build_code
from heteroqec.config import ExperimentConfig
from heteroqec.constants import CSV_COLUMNS
from heteroqec.exceptions import ParameterError, ConfigError, DecoderError
from heteroqec import montecarlo
from heteroqec.montecarlo import ExperimentPoint, wilson_interval, improvement_ratio, logical_bias, run_point, \
    run_trials, sweep, ledger_path, sidecar_path, merge_points, point_key
from heteroqec.noise import build_noise_model, Homogeneous, PlacementSpec, Strategy
from heteroqec.helpers import parse_bias
from heteroqec.pauli import Letter

from .support import regime_a

HOMOGENEOUS = {'regime': 'homogeneous', 'eta': '0.5', 'deformation': 'xy', 'distances': [3],
               'p_values': [0.05, 0.15], 'trials': 40, 'seed': 11}


def point(placement='BulkNoisy', d=5, trials=1000, fail_x=0, fail_y=0, fail_z=0, p=0.3):
    return ExperimentPoint(regime='A', placement=placement, deformation='xy', d=d, eta_low='10', eta_high='10',
                           p_quiet=p / 10, p_noisy=p, p=p, chi=16, trials=trials, fail_x=fail_x, fail_y=fail_y,
                           fail_z=fail_z, seed=0)


def read(path):
    with open(path) as f:
        return f.read()


def test_wilson_golden_value():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.40383, abs=1e-5)
    assert hi == pytest.approx(0.59617, abs=1e-5)


def test_wilson_edges():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0 and 0 < hi < 0.05
    lo, hi = wilson_interval(100, 100)
    assert hi == 1 and 0.95 < lo < 1
    with pytest.raises(ParameterError):
        wilson_interval(5, 0)
    with pytest.raises(ParameterError):
        wilson_interval(11, 10)


@pytest.mark.parametrize('k, n', [(1, 20), (7, 50), (333, 1000), (999, 1000)])
def test_wilson_matches_scipy(k, n):
    interval = binomtest(k, n).proportion_ci(confidence_level=0.95, method='wilson')
    lo, hi = wilson_interval(k, n)
    assert lo == pytest.approx(interval.low, abs=1e-9)
    assert hi == pytest.approx(interval.high, abs=1e-9)


def wilson_coverage(p, n=1000):
    lo, hi = np.array([wilson_interval(k, n) for k in range(n + 1)]).T
    return float(np.sum(binom.pmf(np.arange(n + 1), n, p)[(lo <= p) & (p <= hi)]))


# Wilson coverage oscillates around the nominal 0.95; at n=1000 its minimum over p is just above 0.945
@pytest.mark.parametrize('p, expected', [(0.01, 0.9635), (0.1, 0.9491), (0.5, 0.9463)])
def test_wilson_coverage(p, expected):
    coverage = wilson_coverage(p)
    assert coverage == pytest.approx(expected, abs=5e-4)
    assert coverage >= 0.945


def test_wilson_coverage_averages_to_nominal():
    grid = np.arange(1, 100) / 100
    lo, hi = np.array([wilson_interval(k, 1000) for k in range(1001)]).T
    k = np.arange(1001)
    coverage = [np.sum(binom.pmf(k, 1000, p)[(lo <= p) & (p <= hi)]) for p in grid]
    assert np.mean(coverage) >= 0.949


def test_point_validation_and_rows():
    with pytest.raises(ParameterError):
        point(trials=10, fail_z=11)
    with pytest.raises(ParameterError):
        point(trials=0)
    sample = point(fail_x=3, fail_y=2, fail_z=15)
    assert sample.failures == 20
    assert sample.p_fail == pytest.approx(0.02)
    assert sample.rate(Letter.Z) == pytest.approx(0.015)
    row = sample.as_row
    assert tuple(row) == CSV_COLUMNS
    assert ExperimentPoint.from_row(row) == sample


def test_merging_adds_tallies():
    merged = merge_points([point(fail_z=10), point(placement='BoundaryNoisy', fail_z=50), point(fail_x=4)])
    assert len(merged) == 2
    assert (merged[0].trials, merged[0].fail_z, merged[0].fail_x) == (2000, 10, 4)
    with pytest.raises(ParameterError):
        point().merge(point(d=7))


def test_improvement_ratio_two_sided():
    series = improvement_ratio([point('BoundaryNoisy', fail_z=100)], [point('BulkNoisy', fail_z=10)])
    entry = series[5]
    assert entry.bound is None
    assert entry.ratio == pytest.approx(10)
    assert entry.sigma == pytest.approx(10 * math.sqrt(0.9 / 100 + 0.99 / 10))


def test_improvement_ratio_bounds():
    series = improvement_ratio(
        [point('BoundaryNoisy', d=3, fail_z=100), point('BoundaryNoisy', d=5), point('BoundaryNoisy', d=7)],
        [point('BulkNoisy', d=3), point('BulkNoisy', d=5, fail_z=10), point('BulkNoisy', d=7)],
    )
    assert series.distances == [3, 5, 7]
    assert series[3].bound == 'lower'
    assert series[3].ratio == pytest.approx(0.1 / wilson_interval(0, 1000)[1])
    assert series[5].bound == 'upper'
    assert series[7].bound == 'undetermined' and series[7].ratio is None
    with pytest.raises(ParameterError):
        improvement_ratio([point('BoundaryNoisy', d=3)], [point('BulkNoisy', d=5)])


def test_logical_bias():
    bias = logical_bias(point(fail_x=5, fail_y=5, fail_z=90))
    assert bias.eta_l == pytest.approx(9)
    assert bias.lo < 9 < bias.hi
    assert bias.bound is None
    dephased = logical_bias(point(fail_z=40))
    assert dephased.bound == 'lower'
    assert dephased.hi == math.inf
    assert dephased.eta_l > 1
    assert logical_bias(point(fail_x=4)).bound == 'upper'


def test_noiseless_point_never_fails(css3):
    model = build_noise_model(css3, Homogeneous(0.0, parse_bias('0.5')), PlacementSpec(Strategy.BULK_NOISY))
    result = run_point(css3, model, 0.0, trials=25)
    assert result.failures == 0
    assert result.placement == 'none'
    assert result.chi == 16
    assert result.wilson[0] == 0


def test_exact_method_is_labelled(xy3):
    result = run_point(xy3, regime_a(xy3, p_noisy=0.1), 0.1, trials=10, method='exact', labels=(0, 0))
    assert result.chi == 'exact'
    assert result.placement == 'BulkNoisy'
    assert result.regime == 'A'


def test_tallies_do_not_depend_on_threads(xy3):
    model = regime_a(xy3, p_noisy=0.25)
    key = point_key(3, 3, 0, 0)
    serial = run_trials(xy3, model, 60, key)
    with Pool(3) as pool:
        parallel = run_trials(xy3, model, 60, key, threads=3, pool=pool)
    assert serial == parallel
    assert serial.trials == 60
    with pytest.raises(ParameterError):
        run_trials(xy3, model, 0, key)


def test_sweep_is_reproducible(tmp_path):
    config = ExperimentConfig.from_dict(HOMOGENEOUS)
    first, second = str(tmp_path / 'first.csv'), str(tmp_path / 'second.csv')
    result = sweep(config, first)
    sweep(config, second)
    assert result.ok
    assert len(result.points) == 2
    assert read(first) == read(second)
    assert read(first).splitlines()[0] == ','.join(CSV_COLUMNS)
    with open(sidecar_path(first)) as f:
        assert json.load(f)['config_hash'] == config.hash


def test_sweep_without_p_values(tmp_path):
    config = ExperimentConfig.from_dict({**HOMOGENEOUS, 'p_values': []})
    path = str(tmp_path / 'empty.csv')
    result = sweep(config, path)
    assert result.points == [] and result.ok
    assert read(path) == ','.join(CSV_COLUMNS) + '\n'


def _forget(path, keys):
    with open(ledger_path(path)) as f:
        ledger = json.load(f)
    for key in keys:
        del ledger['completed'][key]
    with open(ledger_path(path), 'w') as f:
        json.dump(ledger, f)


def test_sweep_resumes_from_the_ledger(tmp_path, monkeypatch):
    config = ExperimentConfig.from_dict(HOMOGENEOUS)
    path = str(tmp_path / 'resume.csv')
    sweep(config, path)
    original = read(path)

    _forget(path, ['3/none/1'])
    calls = []
    real = montecarlo.run_point

    def counting(*args, **kwargs):
        calls.append(args[2])
        return real(*args, **kwargs)

    monkeypatch.setattr(montecarlo, 'run_point', counting)
    sweep(config, path)
    assert calls == [0.15]
    assert read(path) == original

    _forget(path, ['3/none/0'])
    sweep(config, path)
    assert read(path) == original


def test_ledger_file_is_valid_json(tmp_path):
    config = ExperimentConfig.from_dict(HOMOGENEOUS)
    path = str(tmp_path / 'ledger.csv')
    sweep(config, path)
    with open(ledger_path(path)) as f:
        ledger = json.load(f)
    assert ledger['config_hash'] == config.hash
    assert sorted(ledger['completed']) == ['3/none/0', '3/none/1']


def test_ledger_rejects_another_config(tmp_path):
    path = str(tmp_path / 'shared.csv')
    sweep(ExperimentConfig.from_dict(HOMOGENEOUS), path)
    with pytest.raises(ConfigError):
        sweep(ExperimentConfig.from_dict({**HOMOGENEOUS, 'seed': 12}), path)
    sweep(ExperimentConfig.from_dict({**HOMOGENEOUS, 'output': 'ignored.csv'}), path)


def test_failed_points_are_recorded(tmp_path, monkeypatch):
    real = montecarlo.run_point

    def flaky(code, model, p, *args, **kwargs):
        if p == 0.05:
            raise DecoderError('SVD did not converge', 7)
        return real(code, model, p, *args, **kwargs)

    monkeypatch.setattr(montecarlo, 'run_point', flaky)
    path = str(tmp_path / 'flaky.csv')
    result = sweep(ExperimentConfig.from_dict(HOMOGENEOUS), path)
    assert not result.ok
    assert result.failed['3/none/0']['trial'] == 7
    assert [p.p for p in result.points] == [0.15]
    with open(ledger_path(path)) as f:
        assert '3/none/0' in json.load(f)['failed']


def test_trial_overrides_apply(tmp_path):
    config = ExperimentConfig.from_dict({
        'regime': 'A', 'eta': 10, 'distances': [3], 'p_values': [0.1, 0.2], 'trials': 12,
        'placements': ['BulkNoisy', 'BoundaryNoisy'], 'trial_overrides': [{'placement': 'BoundaryNoisy', 'trials': 5}],
    })
    result = sweep(config)
    assert [(p.placement, p.trials) for p in result.points] == [
        ('BulkNoisy', 12), ('BulkNoisy', 12), ('BoundaryNoisy', 5), ('BoundaryNoisy', 5),
    ]


@pytest.mark.slow
def test_larger_codes_fail_less_below_threshold():
    rates = {}
    for d in (3, 5):
        code = build_code(d, 'xy')
        model = regime_a(code, p_noisy=0.1, eta=10)
        rates[d] = run_point(code, model, 0.1, trials=400, seed=1, labels=(0, 0), threads=4).p_fail
    assert rates[5] < rates[3]
