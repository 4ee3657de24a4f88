from typing import Optional

import numpy as np

from .exact import exact_coset_likelihoods
from .likelihoods import Correction, CosetLikelihoods, Method
from .tn import LatticeNetwork, tn_coset_likelihoods
from ..codes import CodeInstance, pure_error
from ..constants import DEFAULT_CHI
from ..noise import NoiseModel
from ..pauli import multiply


def coset_likelihoods(code: CodeInstance, model: NoiseModel, s, method='tn', chi: Optional[int] = DEFAULT_CHI,
                      allow_large: bool = False, network: LatticeNetwork = None) -> CosetLikelihoods:
    if Method.parse(method) is Method.EXACT:
        return exact_coset_likelihoods(code, model, s, allow_large)
    return tn_coset_likelihoods(code, model, s, chi, network)


def correction_for(code: CodeInstance, s, likelihoods: CosetLikelihoods) -> Correction:
    chosen = likelihoods.best()
    op = multiply(pure_error(code, s), code.representative(chosen))
    return Correction(op, chosen, likelihoods)


def decode(code: CodeInstance, model: NoiseModel, s, method='tn', chi: Optional[int] = DEFAULT_CHI,
           allow_large: bool = False) -> Correction:
    return correction_for(code, s, coset_likelihoods(code, model, s, method, chi, allow_large))


class Decoder:
    """A decoder bound to one (code, model) pair, memoizing corrections by syndrome.

    Instances are not shared between processes; each worker builds its own.
    """

    def __init__(self, code: CodeInstance, model: NoiseModel, method='tn', chi: Optional[int] = DEFAULT_CHI,
                 allow_large: bool = False, cache_size: int = 1 << 16):
        self.code = code
        self.model = model
        self.method = Method.parse(method)
        self.chi = chi
        self.allow_large = allow_large
        self.network = LatticeNetwork(code) if self.method is Method.TN else None
        self.cache_size = cache_size
        self.cache = {}

    def __call__(self, s) -> Correction:
        s = np.asarray(s, dtype=np.uint8)
        key = np.packbits(s).tobytes()
        correction = self.cache.get(key)
        if correction is None:
            likelihoods = coset_likelihoods(self.code, self.model, s, self.method, self.chi, self.allow_large,
                                            self.network)
            correction = correction_for(self.code, s, likelihoods)
            if len(self.cache) < self.cache_size:
                self.cache[key] = correction
        return correction
