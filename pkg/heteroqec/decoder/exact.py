"""Maximum-likelihood coset probabilities by summing over the whole stabilizer group."""
import numpy as np
from scipy.special import logsumexp

from .likelihoods import CosetLikelihoods, Method, CLASS_ORDER
from ..codes import CodeInstance, pure_error, stabilizer_group, check_enumerable
from ..constants import STABILIZER_CHUNK_BITS
from ..noise import NoiseModel
from ..pauli import multiply


def exact_coset_likelihoods(code: CodeInstance, model: NoiseModel, s, allow_large: bool = False) -> CosetLikelihoods:
    check_enumerable(code.d, allow_large)
    e = pure_error(code, s)
    qubits = np.arange(code.n)
    table = model.log_table
    bases = []
    for letter in CLASS_ORDER:
        base = multiply(e, code.representative(letter))
        bases.append((base.x_bits(), base.z_bits()))

    partial = [[] for _ in CLASS_ORDER]
    with np.errstate(divide='ignore', invalid='ignore'):
        for xs, zs in stabilizer_group(code, STABILIZER_CHUNK_BITS):
            for k, (base_x, base_z) in enumerate(bases):
                codes = (xs ^ base_x).astype(np.int64) | ((zs ^ base_z).astype(np.int64) << 1)
                partial[k].append(logsumexp(table[qubits, codes].sum(axis=1)))
        log_pi = tuple(float(logsumexp(values)) for values in partial)
    return CosetLikelihoods(log_pi, Method.EXACT)
