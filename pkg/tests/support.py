import numpy as np

from heteroqec.helpers import parse_bias
from heteroqec.noise import Homogeneous, RegimeA, RegimeB, PlacementSpec, Strategy, build_noise_model


def depolarizing(code, p=0.1):
    return build_noise_model(code, Homogeneous(p, parse_bias('0.5')), PlacementSpec(Strategy.BULK_NOISY))


def regime_a(code, p_noisy=0.2, eta=100, placement=Strategy.BULK_NOISY):
    return build_noise_model(code, RegimeA(p_noisy, parse_bias(eta)), PlacementSpec(placement))


def regime_b(code, p=0.3, eta_high=100, placement=Strategy.BULK_NOISY):
    return build_noise_model(code, RegimeB(p, parse_bias(eta_high)), PlacementSpec(placement))


def all_syndromes(m):
    for value in range(2 ** m):
        yield ((value >> np.arange(m)) & 1).astype(np.uint8)
