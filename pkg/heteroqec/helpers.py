import hashlib
import json
import logging
import math
import os
from fractions import Fraction
from typing import Union

from dotenv import dotenv_values
from icecream import ic

_print = print
logger = logging.getLogger('heteroqec')


def log(s):
    logger.info(s)


ic.configureOutput(outputFunction=log)


def settings() -> dict:
    """Environment settings, `.env` first and the process environment on top."""
    return {**dotenv_values('.env'), **os.environ}


def output_dir(default: str = '.') -> str:
    return settings().get('HETEROQEC_OUTPUT_DIR') or default


def default_threads() -> int:
    value = settings().get('HETEROQEC_THREADS')
    return int(value) if value else 1


def get_json(obj):
    return json.loads(
        json.dumps(obj, default=lambda o: getattr(o, 'as_dict', getattr(o, '__dict__', str(o))))
    )


def dumps(obj, pretty: bool = True) -> str:
    return json.dumps(get_json(obj), indent=4 if pretty else None, sort_keys=True)


def sha256(message: Union[str, bytes]):
    if isinstance(message, str):
        message = message.encode('utf-8')
    return hashlib.sha256(message).hexdigest()


def config_hash(config: dict) -> str:
    return sha256(json.dumps(config, sort_keys=True, separators=(',', ':')))[:16]


def parse_bias(value) -> Union[Fraction, float]:
    """Bias values are finite rationals or the symbol 'inf'."""
    if isinstance(value, str):
        if value.strip().lower() in ('inf', 'infinity', '∞'):
            return math.inf
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value):
            raise ValueError('use the string "inf" for an infinite bias')
        return Fraction(value).limit_denominator(10 ** 9)
    return Fraction(value)


def format_bias(eta) -> str:
    if eta == math.inf:
        return 'inf'
    eta = Fraction(eta)
    return str(eta.numerator) if eta.denominator == 1 else repr(float(eta))
