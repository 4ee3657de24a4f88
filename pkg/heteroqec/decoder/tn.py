"""Tensor-network coset probabilities by a column sweep over the rotated lattice.

Every stabilizer face carries a binary variable b_g saying whether g is multiplied into the error.
The boundary MPS has one site per face row (-1 .. d - 1) and, after qubit column c, represents the
partial sum as a function of the variables in face column c. Qubit (r, c) touches faces (r - 1, c - 1),
(r, c - 1), (r - 1, c) and (r, c), so its tensor sits on MPS site r and reads the face row r - 1
variables through the left bond of the column MPO.
"""
from typing import List, Optional

import numpy as np

from .likelihoods import CosetLikelihoods, Method, CLASS_ORDER
from ..codes import CodeInstance, pure_error
from ..constants import DEFAULT_CHI
from ..exceptions import DimensionError
from ..noise import NoiseModel
from ..helpers import logger
from ..pauli import multiply, letter_codes
from ..tensor import BoundaryMPS, apply_column


class LatticeNetwork:
    """Per-code layout shared by every contraction: face extents and face letters on each qubit."""

    def __init__(self, code: CodeInstance):
        self.code = code
        self.d = code.d
        self.rows = list(range(-1, code.d))
        self.face_codes = [letter_codes(s.op) for s in code.stabilizers]

    def extent(self, r: int, k: int) -> int:
        return 2 if (r, k) in self.code.face_index else 1

    def face_code(self, r: int, k: int, q: int) -> int:
        index = self.code.face_index.get((r, k))
        return 0 if index is None else int(self.face_codes[index][q])

    def qubit_tensor(self, probabilities: np.ndarray, base_code: int, r: int, c: int) -> np.ndarray:
        """T[a', a, b', b] over faces (r - 1, c - 1), (r, c - 1), (r - 1, c), (r, c)."""
        q = self.code.qubit(r, c)
        faces = [(r - 1, c - 1), (r, c - 1), (r - 1, c), (r, c)]
        grids = np.ix_(*[np.arange(self.extent(*face)) for face in faces])
        codes = np.full([self.extent(*face) for face in faces], base_code, dtype=np.int64)
        for grid, face in zip(grids, faces):
            codes = codes ^ (grid * self.face_code(*face, q))
        return probabilities[q][codes]

    def column(self, probabilities: np.ndarray, base_codes: np.ndarray, c: int) -> List[np.ndarray]:
        sites = []
        for r in self.rows:
            pa, pb = self.extent(r, c - 1), self.extent(r, c)
            if r < 0:
                t = np.ones((1, pa, 1, pb))
            else:
                t = self.qubit_tensor(probabilities, int(base_codes[self.code.qubit(r, c)]), r, c)
            left = t.shape[0] * t.shape[2]
            if r == self.d - 1:
                w = t.transpose(0, 2, 1, 3).reshape(left, pa, pb, 1)
            else:
                # copy (a, b) onto the right bond for the qubit below
                w = np.einsum('xaYb,ac,bd->xYabcd', t, np.eye(pa), np.eye(pb)).reshape(left, pa, pb, pa * pb)
            sites.append(w)
        return sites

    def boundary(self) -> BoundaryMPS:
        return BoundaryMPS.ones([self.extent(r, -1) for r in self.rows])

    def contract(self, probabilities: np.ndarray, base_codes: np.ndarray, chi: Optional[int]) -> BoundaryMPS:
        mps = self.boundary()
        for c in range(self.d):
            mps = apply_column(mps, self.column(probabilities, base_codes, c), chi)
        return mps


def tn_coset_likelihoods(code: CodeInstance, model: NoiseModel, s, chi: Optional[int] = DEFAULT_CHI,
                         network: LatticeNetwork = None) -> CosetLikelihoods:
    if chi is not None and chi < 1:
        raise DimensionError(f'bond dimension must be at least 1, not {chi}')
    network = network or LatticeNetwork(code)
    e = pure_error(code, s)
    probabilities = model.probability_table
    log_pi, discarded = [], 0.0
    for letter in CLASS_ORDER:
        base_codes = letter_codes(multiply(e, code.representative(letter)))
        mps = network.contract(probabilities, base_codes, chi)
        log_pi.append(mps.log_value())
        discarded += mps.discarded
    logger.debug('tn decode: chi=%s discarded weight %.3e', chi, discarded)
    return CosetLikelihoods(tuple(log_pi), Method.TN, chi, discarded)
