import math
from typing import Tuple

import numpy as np

from .surface_code import CodeInstance, GF2, stabilizer_group, check_enumerable
from ..constants import DISTANCE_MAX_D
from ..exceptions import UnsupportedError
from ..pauli import PauliOp, Letter, commutes, letter_at, bits_to_int


def _pure_letter_checks(code: CodeInstance, letter: Letter) -> np.ndarray:
    """H[j, q] = 1 when a pure `letter` on qubit q anticommutes with stabilizer j there."""
    rows = []
    for stabilizer in code.stabilizers:
        rows.append([letter_at(stabilizer.op, q) not in (Letter.I, letter) for q in range(code.n)])
    return np.array(rows, dtype=np.uint8)


def pure_letter_distance(code: CodeInstance, letter) -> float:
    """Minimum weight of a nontrivial logical whose every non-identity site is `letter` (inf if none)."""
    letter = Letter(letter)
    if code.d > DISTANCE_MAX_D:
        raise UnsupportedError(f'pure-letter distances enumerate kernels; d={code.d} exceeds {DISTANCE_MAX_D}')
    kernel = GF2(_pure_letter_checks(code, letter)).null_space()
    basis = [bits_to_int(np.asarray(row, dtype=bool)) for row in kernel]
    best = math.inf
    mask = 0
    # Gray-code walk over the kernel
    for i in range(1, 2 ** len(basis)):
        mask ^= basis[(i & -i).bit_length() - 1]
        op = PauliOp.from_support(code.n, [q for q in range(code.n) if (mask >> q) & 1], letter)
        if commutes(op, code.logical_x) and commutes(op, code.logical_z):
            continue
        best = min(best, mask.bit_count())
    return best


def pauli_distances(code: CodeInstance) -> Tuple[float, float, float]:
    return tuple(pure_letter_distance(code, letter) for letter in (Letter.X, Letter.Y, Letter.Z))


def coset_min_weights(code: CodeInstance, allow_large: bool = False) -> Tuple[int, int, int]:
    """Minimum weight over each nontrivial logical coset (X_L, Y_L, Z_L) times the whole stabilizer group.

    d=5 walks 2^24 group elements per coset and needs `allow_large`.
    """
    check_enumerable(code.d, allow_large)
    weights = []
    for letter in (Letter.X, Letter.Y, Letter.Z):
        rep = code.representative(letter)
        rep_x, rep_z = rep.x_bits(), rep.z_bits()
        best = code.n
        for xs, zs in stabilizer_group(code):
            best = min(best, int(((xs ^ rep_x) | (zs ^ rep_z)).sum(axis=1).min()))
        weights.append(best)
    return tuple(weights)
