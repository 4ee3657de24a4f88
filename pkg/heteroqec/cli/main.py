import argparse
import csv
import logging
import math
import os
import sys
from fractions import Fraction
from typing import List

import numpy as np
from icecream import ic
from scipy.special import logsumexp

from .plots import plot, plot_layout, PlotKind
from .results import read_points, select, group, results_hash
from ..codes import build_code, describe, census_ratio, degree_ratio, stabilizer_ratio
from ..config import ExperimentConfig
from ..constants import DEFAULT_CHI, DEFAULT_RATIO, ETA_LOW, FIT_WINDOW, FIT_ORDER, BOOTSTRAP_RESAMPLES, VERSION, \
    DEPOLARIZING_ETA
from ..decoder import decode, exact_coset_likelihoods, tn_coset_likelihoods, LatticeNetwork
from ..exceptions import HeteroQECError, ConfigError, ParameterError, NoCrossingError, DegenerateFitError
from ..helpers import dumps, output_dir, default_threads, parse_bias, _print
from ..montecarlo import sweep
from ..noise import RegimeKind, RegimeA, RegimeB, Homogeneous, Strategy, PlacementSpec, build_noise_model, \
    write_channel_table
from ..threshold import fit_threshold

print = ic

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2

THRESHOLD_COLUMNS = ('regime', 'placement', 'deformation', 'eta_low', 'eta_high', 'chi', 'p_th', 'stderr', 'nu', 'A',
                     'B', 'C', 'n_points', 'converged', 'bound', 'error')


class UsageError(HeteroQECError):
    pass


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f'{self.prog}: {message}')


def _emit(document) -> None:
    _print(dumps(document))


def _noise_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--regime', choices=[kind.value for kind in RegimeKind], default='homogeneous')
    parser.add_argument('--p', type=float, default=0.1, help='p_noisy for regime A, the shared p otherwise')
    parser.add_argument('--eta', default=str(DEPOLARIZING_ETA), help='bias for regime A and homogeneous noise')
    parser.add_argument('--ratio', type=float, default=DEFAULT_RATIO)
    parser.add_argument('--eta-high', default=None)
    parser.add_argument('--eta-low', default=str(ETA_LOW))
    parser.add_argument('--placement', default='BulkNoisy')
    parser.add_argument('--noisy-count', type=int, default=None)
    parser.add_argument('--placement-seed', type=int, default=0)


def _regime(args):
    kind = RegimeKind(args.regime)
    if kind is RegimeKind.A:
        return RegimeA(args.p, parse_bias(args.eta), args.ratio)
    if kind is RegimeKind.B:
        if args.eta_high is None:
            raise ParameterError('regime B needs --eta-high')
        return RegimeB(args.p, parse_bias(args.eta_high), parse_bias(args.eta_low))
    return Homogeneous(args.p, parse_bias(args.eta))


def _model(code, args):
    placement = PlacementSpec(Strategy.parse(args.placement), args.noisy_count, args.placement_seed)
    return build_noise_model(code, _regime(args), placement)


def cmd_build_code(args) -> int:
    code = build_code(args.d, args.deformation)
    model = _model(code, args) if args.channels_csv or args.layout_svg or args.with_types else None
    document = describe(code, model.types if model is not None else None)
    if args.output:
        with open(args.output, 'w') as f:
            f.write(dumps(document) + '\n')
    else:
        _emit(document)
    if args.layout_svg:
        plot_layout(code, model.types, args.layout_svg)
    if args.channels_csv:
        write_channel_table(args.channels_csv, code, model)
    return EXIT_OK


def _parse_syndrome(text: str, length: int) -> np.ndarray:
    text = text.strip()
    if len(text) != length or set(text) - {'0', '1'}:
        raise ParameterError(f'syndrome must be a bit string of length {length}, got {text!r}')
    return np.array([int(char) for char in text], dtype=np.uint8)


def cmd_decode_one(args) -> int:
    code = build_code(args.d, args.deformation)
    model = _model(code, args)
    s = _parse_syndrome(args.syndrome, code.num_stabilizers)
    correction = decode(code, model, s, args.method, args.chi, allow_large=args.allow_large)
    _emit(correction.as_dict)
    return EXIT_OK


def _csv_path(config: ExperimentConfig, args, config_path: str) -> str:
    if args.output:
        return args.output
    if config.output:
        return config.output
    stem = config.name or os.path.splitext(os.path.basename(config_path))[0]
    return os.path.join(output_dir('.'), f'{stem}.csv')


def cmd_run(args) -> int:
    config = ExperimentConfig.load(args.config)
    path = _csv_path(config, args, args.config)
    if os.path.dirname(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
    result = sweep(config, path, threads=args.threads, progress=not args.no_progress)
    print(f'{len(result.points)} points written to {path}')
    if not result.ok:
        for key, failure in result.failed.items():
            _print(f'point {key} failed at trial {failure["trial"]}: {failure["error"]}', file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_fit(args) -> int:
    points = select(read_points(args.csv), regime=args.regime, placement=args.placement,
                    deformation=args.deformation)
    if not points:
        raise ParameterError(f'no rows of {args.csv} match the filters')
    rows = []
    for key, members in group(points).items():
        row = dict(zip(('regime', 'placement', 'deformation', 'eta_low', 'eta_high', 'chi'), key))
        try:
            result = fit_threshold(members, window=args.window, order=args.order, resamples=args.resamples,
                                   seed=args.seed)
            row.update({k: v for k, v in result.as_dict.items() if k in THRESHOLD_COLUMNS})
            row['window'] = list(result.window)
        except NoCrossingError as e:
            row['bound'] = f'{">" if e.bound == "lower" else "<"} {e.value}'
        except DegenerateFitError as e:
            row['error'] = str(e)
        rows.append(row)

    stem = args.output or os.path.join(output_dir(os.path.dirname(args.csv) or '.'),
                                       os.path.splitext(os.path.basename(args.csv))[0] + '.thresholds')
    with open(stem + '.csv', 'w', newline='') as f:
        writer = csv.DictWriter(f, fieldnames=THRESHOLD_COLUMNS, extrasaction='ignore', lineterminator='\n')
        writer.writeheader()
        writer.writerows(rows)
    with open(stem + '.json', 'w') as f:
        f.write(dumps(rows) + '\n')
    _emit(rows)
    return EXIT_OK


def cmd_plot(args) -> int:
    points = select(read_points(args.csv), regime=args.regime, placement=args.placement,
                    deformation=args.deformation)
    path = args.output or os.path.join(output_dir(os.path.dirname(args.csv) or '.'),
                                       f'{os.path.splitext(os.path.basename(args.csv))[0]}.{args.kind}.svg')
    plot(args.kind, points, path, results_hash(args.csv))
    print(f'wrote {path}')
    return EXIT_OK


def _verify_models(code):
    bulk = PlacementSpec(Strategy.BULK_NOISY)
    return [
        ('depolarizing p=0.1', build_noise_model(code, Homogeneous(0.1, parse_bias('0.5')), bulk)),
        ('regime A eta=100 p_noisy=0.2 BulkNoisy', build_noise_model(code, RegimeA(0.2, parse_bias(100)), bulk)),
        ('regime B eta_high=100 p=0.3 BulkNoisy', build_noise_model(code, RegimeB(0.3, parse_bias(100)), bulk)),
    ]


def _all_syndromes(m: int):
    for value in range(2 ** m):
        yield ((value >> np.arange(m)) & 1).astype(np.uint8)


def verify_oracle(deformation: str = 'xy', chi: int = DEFAULT_CHI, tolerance: float = 1e-6) -> List[dict]:
    code = build_code(3, deformation)
    network = LatticeNetwork(code)
    checks = []
    for name, model in _verify_models(code):
        mismatches, worst, totals = 0, 0.0, []
        for s in _all_syndromes(code.num_stabilizers):
            exact = exact_coset_likelihoods(code, model, s)
            tn = tn_coset_likelihoods(code, model, s, chi, network)
            # exact ties may split either way under rounding
            mismatches += exact.best() is not tn.best() and exact.margin() > tolerance
            for a, b in zip(exact.differences(), tn.differences()):
                if math.isfinite(a) or math.isfinite(b):
                    worst = max(worst, abs(a - b))
            totals.append(logsumexp(exact.log_pi))
        total = float(np.exp(logsumexp(totals)))
        checks.append({'check': f'oracle equivalence, {name}', 'ok': mismatches == 0 and worst <= tolerance,
                       'detail': f'{mismatches} argmax mismatches, max |delta log_pi| = {worst:.2e}'})
        checks.append({'check': f'exact normalization, {name}', 'ok': abs(total - 1) <= 1e-10,
                       'detail': f'sum over syndromes and classes = {total:.12f}'})
    return checks


def verify_census(distances=range(3, 17, 2)) -> List[dict]:
    checks = []
    for d in distances:
        code = build_code(d)
        census = census_ratio([qubit.degree for qubit in code.geometry])
        closed = degree_ratio(d)
        checks.append({'check': f'stabilizer ratio census d={d}', 'ok': census == closed,
                       'detail': f'census {census}, 4(d-1)/(3d-4) = {closed}, '
                                 f'published 4(d-1)/(3d-2) = {stabilizer_ratio(d)}'})
    limit = stabilizer_ratio(10001)
    checks.append({'check': 'stabilizer ratio limit', 'ok': abs(limit - Fraction(4, 3)) < Fraction(1, 1000),
                   'detail': f'r(10001) = {float(limit):.6f}'})
    return checks


def verify_spot_check(samples: int, seed: int = 0) -> List[dict]:
    code = build_code(5, 'xy')
    model = build_noise_model(code, Homogeneous(0.1, parse_bias('0.5')), PlacementSpec(Strategy.BULK_NOISY))
    rng = np.random.default_rng(seed)
    agree = 0
    for _ in range(samples):
        s = rng.integers(0, 2, code.num_stabilizers, dtype=np.uint8)
        exact = exact_coset_likelihoods(code, model, s, allow_large=True)
        agree += exact.best() is tn_coset_likelihoods(code, model, s).best()
    return [{'check': f'd=5 spot check over {samples} syndromes', 'ok': agree == samples,
             'detail': f'{agree}/{samples} argmax agreements'}]


def cmd_verify(args) -> int:
    checks = verify_oracle(args.deformation, args.chi) + verify_census()
    if args.spot_check:
        checks += verify_spot_check(args.spot_check)
    for check in checks:
        _print(f'{"PASS" if check["ok"] else "FAIL"}  {check["check"]}: {check["detail"]}')
    ok = all(check['ok'] for check in checks)
    _print(f'{sum(check["ok"] for check in checks)}/{len(checks)} checks passed')
    return EXIT_OK if ok else EXIT_RUNTIME


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='heteroqec', description='Heterogeneous surface code simulation toolkit')
    parser.add_argument('--version', action='version', version=VERSION)
    parser.add_argument('--threads', type=int, default=None, help='worker processes (default HETEROQEC_THREADS)')
    parser.add_argument('--nologs', action='store_true')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=ArgumentParser)

    build = commands.add_parser('build-code', help='print the JSON description of a code')
    build.add_argument('--d', type=int, required=True)
    build.add_argument('--deformation', choices=['css', 'xy'], default='xy')
    build.add_argument('--output', default=None)
    build.add_argument('--layout-svg', default=None)
    build.add_argument('--channels-csv', default=None)
    build.add_argument('--with-types', action='store_true', help='include per-qubit types in the description')
    _noise_args(build)
    build.set_defaults(func=cmd_build_code)

    one = commands.add_parser('decode-one', help='decode a single syndrome')
    one.add_argument('--d', type=int, required=True)
    one.add_argument('--deformation', choices=['css', 'xy'], default='xy')
    one.add_argument('--syndrome', required=True, help='bit string, one bit per stabilizer in face order')
    one.add_argument('--method', choices=['exact', 'tn'], default='tn')
    one.add_argument('--chi', type=int, default=DEFAULT_CHI)
    one.add_argument('--allow-large', action='store_true', help='allow exact decoding at d=5')
    _noise_args(one)
    one.set_defaults(func=cmd_decode_one)

    run = commands.add_parser('run', help='run a sweep from a JSON config')
    run.add_argument('config')
    run.add_argument('--output', default=None, help='CSV path (default from the config or the output dir)')
    run.add_argument('--no-progress', action='store_true')
    run.set_defaults(func=cmd_run)

    for name, func, help_text in (('fit-threshold', cmd_fit, 'fit thresholds per parameter group'),
                                  ('plot', cmd_plot, 'draw an SVG figure from a results CSV')):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument('csv')
        sub.add_argument('--regime', default=None)
        sub.add_argument('--placement', default=None)
        sub.add_argument('--deformation', default=None)
        sub.add_argument('--output', default=None)
        sub.set_defaults(func=func)
        if name == 'plot':
            sub.add_argument('--kind', choices=[kind.value for kind in PlotKind], required=True)
        else:
            sub.add_argument('--window', type=float, default=FIT_WINDOW)
            sub.add_argument('--order', type=int, choices=[2, 3], default=FIT_ORDER)
            sub.add_argument('--resamples', type=int, default=BOOTSTRAP_RESAMPLES)
            sub.add_argument('--seed', type=int, default=0)

    verify = commands.add_parser('verify', help='run the d=3 oracle equivalence and census checks')
    verify.add_argument('--deformation', choices=['css', 'xy'], default='xy')
    verify.add_argument('--chi', type=int, default=DEFAULT_CHI)
    verify.add_argument('--spot-check', type=int, default=0, help='also compare N random d=5 syndromes')
    verify.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        _print(str(e), file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.nologs else logging.INFO)
    if args.threads is None:
        args.threads = default_threads()
    try:
        return args.func(args)
    except ConfigError as e:
        for problem in e.problems:
            _print(f'config error: {problem}', file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, UsageError) as e:
        _print(f'error: {e}', file=sys.stderr)
        return EXIT_USAGE
    except (HeteroQECError, ArithmeticError, OSError) as e:
        _print(f'{type(e).__name__}: {e}', file=sys.stderr)
        return EXIT_RUNTIME
