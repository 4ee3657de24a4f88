"""Reading sweep CSVs back into points."""
import json
import os
from collections import OrderedDict
from typing import Dict, Iterable, List, Tuple

import pandas as pd

from ..constants import CSV_COLUMNS
from ..exceptions import ConfigError
from ..helpers import sha256
from ..montecarlo import ExperimentPoint, sidecar_path

_TEXT_COLUMNS = ('regime', 'placement', 'deformation', 'eta_low', 'eta_high', 'chi')
_INT_COLUMNS = ('d', 'trials', 'fail_x', 'fail_y', 'fail_z', 'seed')
_FLOAT_COLUMNS = ('p_quiet', 'p_noisy', 'p')

GROUP_KEYS = ('regime', 'placement', 'deformation', 'eta_low', 'eta_high', 'chi')


def read_points(path: str) -> List[ExperimentPoint]:
    try:
        frame = pd.read_csv(path, dtype={column: str for column in _TEXT_COLUMNS})
    except FileNotFoundError:
        raise ConfigError(f'no such file: {path}')
    except pd.errors.EmptyDataError:
        raise ConfigError(f'{path} is empty')
    except pd.errors.ParserError as e:
        raise ConfigError(f'{path}: malformed CSV: {e}')
    missing = [column for column in CSV_COLUMNS if column not in frame.columns]
    if missing:
        raise ConfigError(f'{path} lacks required columns {missing}')

    points = []
    for index, row in frame.iterrows():
        line = index + 2
        empty = [column for column in CSV_COLUMNS if pd.isna(row[column])]
        if empty:
            raise ConfigError(f'{path}, line {line}: missing values in {empty}')
        try:
            values = {column: str(row[column]) for column in _TEXT_COLUMNS}
            values.update({column: int(row[column]) for column in _INT_COLUMNS})
            values.update({column: float(row[column]) for column in _FLOAT_COLUMNS})
            if values['chi'].isdigit():
                values['chi'] = int(values['chi'])
            points.append(ExperimentPoint(**values))
        except (ValueError, TypeError) as e:
            raise ConfigError(f'{path}, line {line}: {e}')
    return points


def select(points: Iterable[ExperimentPoint], **filters) -> List[ExperimentPoint]:
    """Keep points whose fields equal every non-None filter value (compared as strings)."""
    active = {key: str(value) for key, value in filters.items() if value is not None}
    return [point for point in points if all(str(getattr(point, key)) == value for key, value in active.items())]


def group(points: Iterable[ExperimentPoint], keys: Tuple[str, ...] = GROUP_KEYS) -> Dict[tuple, list]:
    groups = OrderedDict()
    for point in points:
        groups.setdefault(tuple(getattr(point, key) for key in keys), []).append(point)
    return groups


def results_hash(path: str) -> str:
    """The config hash from the sidecar when there is one, else a hash of the CSV bytes."""
    sidecar = sidecar_path(path)
    if os.path.exists(sidecar):
        with open(sidecar) as f:
            recorded = json.load(f).get('config_hash')
        if recorded:
            return recorded
    with open(path, 'rb') as f:
        return sha256(f.read())[:16]
